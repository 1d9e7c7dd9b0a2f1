//! Gate templates for Pauli rotations on the probe-controlled gate set.
//!
//! A string spanning qubits `lo..=hi` is first folded onto `(lo, lo + 1)`
//! by an inward ladder of iSWAPs, rotated there, and unfolded again.
//! Basis changes are chosen by tracking the strings through candidate
//! Clifford prefixes.

use std::f64::consts::PI;

use super::clifford::Tracked;
use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::pauli_algebra::{Pauli, PauliSum};

/// `exp(−i angle · term)`.
#[derive(Clone, Debug)]
pub struct Rotation {
    pub term: Tracked,
    pub angle: f64,
}

/// Rotations implementing `exp(−i dt · unit)` for a sum of commuting strings.
pub fn rotations(unit: &PauliSum, dt: f64) -> Result<Vec<Rotation>> {
    let mut out = Vec::new();
    for term in unit.terms() {
        let (letters, coeff) = (term.letters, term.coeff);
        if coeff.im.abs() > 1e-12 {
            return Err(Error::InvalidParameter("generator is not Hermitian".into()));
        }
        if letters.iter().all(|p| *p == Pauli::I) {
            return Err(Error::Unsupported("identity component in a string rotation".into()));
        }
        out.push(Rotation { term: Tracked { sign: 1, letters }, angle: coeff.re * dt });
    }
    Ok(out)
}

/// Lowest and highest qubit touched by any rotation.
pub fn span(rots: &[Rotation]) -> Option<(usize, usize)> {
    let support: Vec<usize> = rots.iter().flat_map(|r| r.term.support()).collect();
    Some((*support.iter().min()?, *support.iter().max()?))
}

/// Inward ladder folding `lo..=hi` onto `(lo, lo + 1)`.
pub fn ladder(lo: usize, hi: usize) -> Vec<Gate> {
    (lo + 2..=hi).rev().map(|k| Gate::ciswap(false, k - 1)).collect()
}

fn undo(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

fn tracked_through(term: &Tracked, gates: &[Gate]) -> Tracked {
    let mut t = term.clone();
    t.conjugate_all(gates);
    t
}

/// Rotation gate for a single-qubit X or Y image.
fn axis_rotation(image: &Tracked, angle: f64) -> Option<Gate> {
    let (q, p) = image.single()?;
    let theta = angle * image.sign as f64;
    match p {
        Pauli::X => Some(Gate::crot(GateKind::RSigmaX, q, theta)),
        Pauli::Y => Some(Gate::crot(GateKind::RSigmaY, q, theta)),
        _ => None,
    }
}

const BASIS: [GateKind; 3] = [GateKind::H, GateKind::J, GateKind::Jdag];

fn push_all(circ: &mut Circuit, gates: &[Gate]) {
    for g in gates {
        circ.push(g.clone());
    }
}

fn folded(rots: &[Rotation], lo: usize, hi: usize) -> Result<(Vec<Gate>, Vec<Tracked>)> {
    let fold = ladder(lo, hi);
    let images: Vec<Tracked> = rots.iter().map(|r| tracked_through(&r.term, &fold)).collect();
    if images.iter().any(|t| t.support().iter().any(|&q| q != lo && q != lo + 1)) {
        return Err(Error::Unsupported("string does not fold onto two qubits".into()));
    }
    Ok((fold, images))
}

/// Commuting strings over `lo..=hi` rotated together between one iSWAP pair.
pub fn emit_tight(circ: &mut Circuit, rots: &[Rotation]) -> Result<()> {
    let Some((lo, hi)) = span(rots) else { return Ok(()) };
    if hi == lo {
        return emit_split(circ, rots);
    }
    let (fold, images) = folded(rots, lo, hi)?;
    let mut options: Vec<(Option<GateKind>, Option<GateKind>)> = Vec::new();
    for g1 in BASIS {
        for g2 in BASIS {
            options.push((Some(g1), Some(g2)));
        }
    }
    for g in BASIS {
        options.push((Some(g), None));
        options.push((None, Some(g)));
    }
    options.push((None, None));
    for (g1, g2) in options {
        for plus in [false, true] {
            let mut core = Vec::new();
            if let Some(k) = g1 {
                core.push(Gate::c1(k, lo));
            }
            if let Some(k) = g2 {
                core.push(Gate::c1(k, lo + 1));
            }
            core.push(Gate::ciswap(plus, lo));
            let gates: Option<Vec<Gate>> =
                images.iter().zip(rots).map(|(t, r)| axis_rotation(&tracked_through(t, &core), r.angle)).collect();
            if let Some(gates) = gates {
                push_all(circ, &fold);
                push_all(circ, &core);
                push_all(circ, &gates);
                push_all(circ, &undo(&core));
                push_all(circ, &undo(&fold));
                return Ok(());
            }
        }
    }
    Err(Error::Unsupported("no two-qubit basis maps the strings onto single axes".into()))
}

/// Core for one folded string: `[g, iSWAP, R, iSWAP†, g†]` or shorter.
fn split_core(image: &Tracked, angle: f64, lo: usize) -> Option<Vec<Gate>> {
    if let Some(r) = axis_rotation(image, angle) {
        return Some(vec![r]);
    }
    if let Some((q, _)) = image.single() {
        for g in BASIS {
            let pre = [Gate::c1(g, q)];
            if let Some(r) = axis_rotation(&tracked_through(image, &pre), angle) {
                return Some(vec![pre[0].clone(), r, pre[0].inverse()]);
            }
        }
        return None;
    }
    for q in [lo, lo + 1] {
        for g in BASIS {
            for plus in [false, true] {
                let pre = vec![Gate::c1(g, q), Gate::ciswap(plus, lo)];
                if let Some(r) = axis_rotation(&tracked_through(image, &pre), angle) {
                    let mut out = pre.clone();
                    out.push(r);
                    out.extend(undo(&pre));
                    return Some(out);
                }
            }
        }
    }
    None
}

/// Commuting strings over `lo..=hi`, each rotated between its own iSWAP pair.
pub fn emit_split(circ: &mut Circuit, rots: &[Rotation]) -> Result<()> {
    let Some((lo, hi)) = span(rots) else { return Ok(()) };
    let hi = hi.max(lo + 1);
    let (fold, images) = folded(rots, lo, hi)?;
    push_all(circ, &fold);
    for (image, r) in images.iter().zip(rots) {
        let core = split_core(image, r.angle, lo).ok_or_else(|| Error::Unsupported("no basis for string".into()))?;
        push_all(circ, &core);
    }
    push_all(circ, &undo(&fold));
    Ok(())
}

/// `exp(−iΘ n_q)`.
pub fn emit_number_phase(circ: &mut Circuit, q: usize, theta: f64) {
    circ.push(Gate::crot(GateKind::RSigmaN, q, theta));
}

/// `exp(−iΘ n_up n_{up+1})` on adjacent qubits, global phase included.
pub fn emit_interaction(circ: &mut Circuit, up: usize, theta: f64) -> Result<()> {
    let down = up + 1;
    let mut letters = vec![Pauli::I; circ.n_system];
    letters[up] = Pauli::Z;
    letters[down] = Pauli::Z;
    let zz = Tracked { sign: 1, letters };
    for g in BASIS {
        for plus in [false, true] {
            let pre = vec![Gate::c1(g, down), Gate::ciswap(plus, up)];
            let image = tracked_through(&zz, &pre);
            if let Some((q, Pauli::Y)) = image.single() {
                if image.sign != 1 {
                    continue;
                }
                push_all(circ, &pre);
                circ.push(Gate::crot(GateKind::RSigmaU, q, theta / 2.0));
                push_all(circ, &undo(&pre));
                circ.push(Gate::crot(GateKind::RSigmaN, down, theta / 2.0));
                circ.push(Gate::crot(GateKind::RSigmaN, up, theta / 2.0));
                return Ok(());
            }
        }
    }
    Err(Error::Unsupported("no basis maps ZZ onto +Y".into()))
}

/// Probe-controlled Pauli string, exact including its sign.
///
/// The string is folded onto qubit 0. The core is `R_σU(π) = Y`,
/// `R_σn(π) = −Z`, or one of these between basis changes.
pub fn emit_pauli(circ: &mut Circuit, term: &Tracked) -> Result<()> {
    let support = term.support();
    let Some(&top) = support.last() else {
        return Err(Error::Unsupported("identity probe".into()));
    };
    let bottom = support[0];
    let mut choices: Vec<Vec<Gate>> = Vec::new();
    if top == bottom {
        choices.push(Vec::new());
    } else {
        let rest: Vec<Gate> = (bottom + 2..=top).rev().map(|k| Gate::ciswap(false, k - 1)).collect();
        for plus in [false, true] {
            let mut fold = rest.clone();
            fold.push(Gate::ciswap(plus, bottom));
            choices.push(fold);
        }
    }
    let mut bases: Vec<Option<GateKind>> = vec![None];
    bases.extend(BASIS.map(Some));
    for basis in bases {
        for fold in &choices {
            let mut pre = fold.clone();
            let image0 = tracked_through(term, fold);
            let Some((q, _)) = image0.single() else { continue };
            if let Some(k) = basis {
                pre.push(Gate::c1(k, q));
            }
            let image = tracked_through(term, &pre);
            let core = match (image.single(), image.sign) {
                (Some((q, Pauli::Y)), 1) => Gate::crot(GateKind::RSigmaU, q, PI),
                (Some((q, Pauli::Z)), -1) => Gate::crot(GateKind::RSigmaN, q, PI),
                _ => continue,
            };
            push_all(circ, &pre);
            circ.push(core);
            push_all(circ, &undo(&pre));
            return Ok(());
        }
    }
    Err(Error::Unsupported("no fold maps the probe onto a single axis".into()))
}

/// Probe-controlled global phase `e^{−iφ}`.
pub fn emit_phase(circ: &mut Circuit, q: usize, phi: f64) {
    if phi.abs() < 1e-15 {
        return;
    }
    circ.push(Gate::crot(GateKind::RSigmaU, q, -2.0 * phi));
    circ.push(Gate::crot(GateKind::RSigmaY, q, phi));
}
