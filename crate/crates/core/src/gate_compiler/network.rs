//! Exact propagators of quadratic fermion Hamiltonians.
//!
//! A number-conserving `H = Σ h_ab c†_a c_b` is propagated through the
//! single-particle unitary `u = e^{−iht}`. Eliminating `u` to a diagonal
//! with adjacent-mode phases and real Givens rotations factors `e^{−iHt}`
//! into gates on neighbouring qubits. Pairing terms are first turned into
//! hopping by a particle-hole transformation on a subset of modes.

use num_complex::Complex64;

use super::templates::{emit_phase, emit_tight, rotations};
use crate::circuit::{Circuit, Gate, GateKind};
use crate::cluster_hamiltonian::{d_wave_sign, ClusterSpec};
use crate::error::{Error, Result};
use crate::jordan_wigner::{annihilation_op, creation_op, Orbital, Spin};
use crate::linalg::{c, CMatrix, HermitianEigen};
use crate::pauli_algebra::PauliSum;

/// `c†_mode` if `dag`, else `c_mode`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Op {
    pub mode: usize,
    pub dag: bool,
}

impl Op {
    pub fn create(mode: usize) -> Self {
        Op { mode, dag: true }
    }

    pub fn destroy(mode: usize) -> Self {
        Op { mode, dag: false }
    }
}

/// A sum of two-operator monomials plus a constant.
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub n_modes: usize,
    pub terms: Vec<(Complex64, Op, Op)>,
    pub constant: f64,
}

impl Quadratic {
    pub fn new(n_modes: usize) -> Self {
        Quadratic { n_modes, terms: Vec::new(), constant: 0.0 }
    }

    pub fn push(&mut self, coeff: Complex64, a: Op, b: Op) {
        self.terms.push((coeff, a, b));
    }

    /// Adds `coeff · a b` and its Hermitian conjugate.
    pub fn push_with_hc(&mut self, coeff: Complex64, a: Op, b: Op) {
        self.push(coeff, a, b);
        let flip = |o: Op| Op { mode: o.mode, dag: !o.dag };
        self.push(coeff.conj(), flip(b), flip(a));
    }

    pub fn scaled(&self, factor: f64) -> Quadratic {
        Quadratic {
            n_modes: self.n_modes,
            terms: self.terms.iter().map(|&(k, a, b)| (k * factor, a, b)).collect(),
            constant: self.constant * factor,
        }
    }

    pub fn extend(&mut self, other: &Quadratic) {
        self.terms.extend(other.terms.iter().copied());
        self.constant += other.constant;
    }

    /// Jordan-Wigner image; modes are qubits.
    pub fn to_pauli(&self) -> Result<PauliSum> {
        if self.n_modes % 2 != 0 {
            return Err(Error::InvalidParameter("mode count must be even".into()));
        }
        let sites = self.n_modes / 2;
        let op = |o: Op| {
            let orb = Orbital::from_qubit(o.mode);
            if o.dag {
                creation_op(orb, sites)
            } else {
                annihilation_op(orb, sites)
            }
        };
        let mut out = PauliSum::identity(self.n_modes).scale_real(self.constant);
        for &(k, a, b) in &self.terms {
            out = out.try_add(&op(a)?.try_mul(&op(b)?)?.scale(k))?;
        }
        Ok(out)
    }

    /// Conjugation by `W = Π_{k ∈ mask} X_k`.
    ///
    /// `W c_k W = s_k c_k` off the mask and `s_k c†_k` on it, with
    /// `s_k = (−1)^{#masked modes below k}`.
    pub fn particle_hole(&self, mask: &[bool]) -> Quadratic {
        let mut below = vec![0usize; self.n_modes];
        for k in 1..self.n_modes {
            below[k] = below[k - 1] + usize::from(mask[k - 1]);
        }
        let map = |o: Op| {
            let sign = if below[o.mode] % 2 == 0 { 1.0 } else { -1.0 };
            (sign, Op { mode: o.mode, dag: o.dag != mask[o.mode] })
        };
        let terms = self
            .terms
            .iter()
            .map(|&(k, a, b)| {
                let (sa, a) = map(a);
                let (sb, b) = map(b);
                (k * sa * sb, a, b)
            })
            .collect();
        Quadratic { n_modes: self.n_modes, terms, constant: self.constant }
    }

    /// `(h, constant)` with `H = Σ h_ab c†_a c_b + constant`.
    ///
    /// Fails if pairing terms survive normal ordering.
    pub fn hopping_matrix(&self) -> Result<(CMatrix, f64)> {
        let n = self.n_modes;
        let mut h = CMatrix::zeros(n, n);
        let mut create = CMatrix::zeros(n, n);
        let mut destroy = CMatrix::zeros(n, n);
        let mut constant = c(self.constant, 0.0);
        for &(k, a, b) in &self.terms {
            match (a.dag, b.dag) {
                (true, false) => h[(a.mode, b.mode)] += k,
                (false, true) => {
                    if a.mode == b.mode {
                        constant += k;
                    }
                    h[(b.mode, a.mode)] -= k;
                }
                (true, true) => create[(a.mode, b.mode)] += k,
                (false, false) => destroy[(a.mode, b.mode)] += k,
            }
        }
        let antisym = |m: &CMatrix| (m - m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if antisym(&create) > 1e-12 || antisym(&destroy) > 1e-12 {
            return Err(Error::Unsupported("quadratic form does not conserve particle number".into()));
        }
        if (&h - h.adjoint()).iter().any(|z| z.norm() > 1e-12) || constant.im.abs() > 1e-12 {
            return Err(Error::InvalidParameter("quadratic form is not Hermitian".into()));
        }
        Ok((h, constant.re))
    }
}

fn mode(site: usize, spin: Spin) -> usize {
    Orbital::new(site, spin).qubit()
}

/// Kinetic block as a quadratic form.
pub fn kin_form(spec: &ClusterSpec) -> Quadratic {
    let mut q = Quadratic::new(spec.n_qubits());
    for b in spec.geometry.bonds() {
        for spin in Spin::ALL {
            q.push_with_hc(c(-spec.t, 0.0), Op::create(mode(b.i, spin)), Op::destroy(mode(b.j, spin)));
        }
    }
    q
}

/// d-wave pairing block as a quadratic form.
pub fn d_pair_form(spec: &ClusterSpec) -> Result<Quadratic> {
    if !spec.has_d_pair() {
        return Err(Error::Unsupported(format!("d-wave pairing needs a 2D cluster, got {}", spec.geometry)));
    }
    let mut q = Quadratic::new(spec.n_qubits());
    for b in spec.geometry.bonds() {
        let w = spec.delta_d * d_wave_sign(&b) / 2.0;
        for spin in Spin::ALL {
            let k = c(w * spin.sign(), 0.0);
            q.push_with_hc(k, Op::create(mode(b.i, spin)), Op::create(mode(b.j, spin.flip())));
        }
    }
    Ok(q)
}

/// Mask selecting the spin-down modes.
pub fn down_mask(n_modes: usize) -> Vec<bool> {
    (0..n_modes).map(|k| k % 2 == 1).collect()
}

/// One elementary factor of the elimination.
#[derive(Clone, Copy, Debug)]
enum Elementary {
    /// Multiplies row `r` by `e^{iα}`.
    Phase { r: usize, alpha: f64 },
    /// Real rotation of rows `(a, a + 1)` by `θ`.
    Givens { a: usize, theta: f64 },
}

const NEGLIGIBLE: f64 = 1e-14;

/// Factors `u = T_1† ⋯ T_K† D`; returns the `T_k` in order and the phases of `D`.
fn eliminate(u: &CMatrix) -> (Vec<Elementary>, Vec<f64>) {
    let n = u.nrows();
    let mut m = u.clone();
    let mut ops = Vec::new();
    for col in 0..n {
        for r in (col + 1..n).rev() {
            let b = m[(r, col)];
            if b.norm() < NEGLIGIBLE {
                continue;
            }
            let a = m[(r - 1, col)];
            let alpha = if a.norm() < NEGLIGIBLE { -b.arg() } else { a.arg() - b.arg() };
            let phase = Complex64::from_polar(1.0, alpha);
            for k in 0..n {
                m[(r, k)] *= phase;
            }
            ops.push(Elementary::Phase { r, alpha });
            let theta = b.norm().atan2(a.norm());
            let (s, co) = theta.sin_cos();
            for k in 0..n {
                let (x, y) = (m[(r - 1, k)], m[(r, k)]);
                m[(r - 1, k)] = x * co + y * s;
                m[(r, k)] = -x * s + y * co;
            }
            ops.push(Elementary::Givens { a: r - 1, theta });
        }
    }
    let phases = (0..n).map(|r| m[(r, r)].arg()).collect();
    (ops, phases)
}

/// `Γ(G)` for the real rotation `[[cos θ, sin θ], [−sin θ, cos θ]]` on modes `(a, a + 1)`.
fn emit_givens(circ: &mut Circuit, a: usize, theta: f64) -> Result<()> {
    let mut k = Quadratic::new(circ.n_system);
    k.push(c(0.0, theta), Op::create(a), Op::destroy(a + 1));
    k.push(c(0.0, -theta), Op::create(a + 1), Op::destroy(a));
    emit_tight(circ, &rotations(&k.to_pauli()?, 1.0)?)
}

/// Appends `e^{−i dt (Σ h_ab c†_a c_b + constant)}`.
pub fn emit_number_conserving(circ: &mut Circuit, h: &CMatrix, constant: f64, dt: f64) -> Result<()> {
    let u = HermitianEigen::new(h).propagator(dt);
    let (ops, phases) = eliminate(&u);
    for (r, &delta) in phases.iter().enumerate() {
        if delta.abs() > NEGLIGIBLE {
            circ.push(Gate::crot(GateKind::RSigmaN, r, -delta));
        }
    }
    for op in ops.iter().rev() {
        match *op {
            Elementary::Phase { r, alpha } => {
                if alpha.abs() > NEGLIGIBLE {
                    circ.push(Gate::crot(GateKind::RSigmaN, r, alpha));
                }
            }
            Elementary::Givens { a, theta } => {
                if theta.abs() > NEGLIGIBLE {
                    emit_givens(circ, a, -theta)?;
                }
            }
        }
    }
    emit_phase(circ, 0, constant * dt);
    Ok(())
}

/// Appends `e^{−i dt Q}`, undoing pairing with a particle-hole mask.
pub fn emit_quadratic(circ: &mut Circuit, form: &Quadratic, mask: &[bool], dt: f64) -> Result<()> {
    let (h, constant) = form.particle_hole(mask).hopping_matrix()?;
    let flipped: Vec<usize> = (0..form.n_modes).filter(|&k| mask[k]).collect();
    for &k in &flipped {
        circ.push(Gate::crot(GateKind::RSigmaX, k, std::f64::consts::FRAC_PI_2));
    }
    emit_number_conserving(circ, &h, constant, dt)?;
    for &k in &flipped {
        circ.push(Gate::crot(GateKind::RSigmaX, k, -std::f64::consts::FRAC_PI_2));
    }
    Ok(())
}
