//! Optional peephole passes. Both look backwards past gates on disjoint
//! qubits, which commute with the gate being placed.

use crate::circuit::{Circuit, Gate};

const ANGLE_EPS: f64 = 1e-15;

/// Qubits a gate acts on, counting the probe `p` for controlled gates.
fn touches(g: &Gate, q: usize, p: usize) -> bool {
    g.targets.contains(&q) || (g.controlled && q == p)
}

/// Controlled gates share the probe as control only, so they still commute
/// when their targets are disjoint.
fn disjoint(a: &Gate, b: &Gate, p: usize) -> bool {
    let shared = |x: &Gate, y: &Gate| x.targets.iter().any(|&q| touches(y, q, p));
    !shared(a, b) && !shared(b, a)
}

fn is_inverse(a: &Gate, b: &Gate) -> bool {
    let inv = a.inverse();
    inv.kind == b.kind && inv.targets == b.targets && inv.controlled == b.controlled && (inv.theta - b.theta).abs() < ANGLE_EPS
}

/// Index of the latest gate in `out` that `gate` meets, skipping disjoint gates.
fn partner(out: &[Gate], gate: &Gate, p: usize) -> Option<usize> {
    out.iter().rposition(|g| !disjoint(g, gate, p))
}

/// Removes gates that meet their own inverse.
pub fn cancel_inverse_pairs(circuit: &Circuit) -> Circuit {
    let mut out: Vec<Gate> = Vec::with_capacity(circuit.len());
    for g in &circuit.gates {
        match partner(&out, g, circuit.control()) {
            Some(k) if is_inverse(&out[k], g) => {
                out.remove(k);
            }
            _ => out.push(g.clone()),
        }
    }
    Circuit { gates: out, ..circuit.clone() }
}

/// Merges rotations about the same axis on the same qubit; angles add.
pub fn fuse_rotations(circuit: &Circuit) -> Circuit {
    let mut out: Vec<Gate> = Vec::with_capacity(circuit.len());
    for g in &circuit.gates {
        if g.kind.has_angle() {
            if let Some(k) = partner(&out, g, circuit.control()) {
                let prev = &mut out[k];
                if prev.kind == g.kind && prev.targets == g.targets && prev.controlled == g.controlled {
                    prev.theta += g.theta;
                    if prev.theta.abs() < ANGLE_EPS {
                        out.remove(k);
                    }
                    continue;
                }
            }
        }
        out.push(g.clone());
    }
    Circuit { gates: out, ..circuit.clone() }
}
