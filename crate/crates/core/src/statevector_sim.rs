//! Dense state-vector and density-matrix simulation.
//!
//! A state on `N` qubits has amplitude index bit `q` for qubit `q`; the
//! probe qubit P of a circuit is bit `N − 1`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, ONE, ZERO};
use crate::pauli_algebra::PauliSum;

#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure { n: usize, amps: CVector },
    Mixed { n: usize, rho: CMatrix },
}

impl QuantumState {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        QuantumState::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        linalg::check_dense(n, linalg::dense_limit())?;
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = CVector::zeros(dim);
        amps[index] = ONE;
        Ok(QuantumState::Pure { n, amps })
    }

    pub fn from_amplitudes(amps: CVector) -> Result<Self> {
        let n = qubits_for(amps.len())?;
        Ok(QuantumState::Pure { n, amps })
    }

    pub fn from_density(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::InvalidParameter("density matrix must be square".into()));
        }
        let n = qubits_for(rho.nrows())?;
        Ok(QuantumState::Mixed { n, rho })
    }

    /// `|0⟩⟨0|_P ⊗ ρ` with P appended above the system qubits.
    pub fn with_probe(system_rho: &CMatrix) -> Result<Self> {
        let d = system_rho.nrows();
        let n = qubits_for(d)? + 1;
        linalg::check_dense(n, linalg::dense_limit())?;
        let mut rho = CMatrix::zeros(2 * d, 2 * d);
        rho.view_mut((0, 0), (d, d)).copy_from(system_rho);
        Ok(QuantumState::Mixed { n, rho })
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            QuantumState::Pure { n, .. } | QuantumState::Mixed { n, .. } => *n,
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let n = self.n_qubits();
        check_gate(gate, n)?;
        match self {
            QuantumState::Pure { amps, .. } => apply_to_slice(amps.as_mut_slice(), gate, n),
            QuantumState::Mixed { rho, .. } => conjugate(rho, |m| apply_left(m, gate, n)),
        }
        Ok(())
    }

    /// Functional form of [`apply_gate`](Self::apply_gate).
    pub fn applied(mut self, gate: &Gate) -> Result<Self> {
        self.apply_gate(gate)?;
        Ok(self)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch { left: circuit.n_qubits(), right: self.n_qubits() });
        }
        for g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Applies `u` to the system register when P (the top qubit) is |1⟩.
    pub fn apply_controlled_unitary(&mut self, u: &CMatrix) -> Result<()> {
        let n = self.n_qubits();
        let d = 1usize << (n - 1);
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::DimensionMismatch { left: qubits_for(u.nrows()).unwrap_or(0), right: n - 1 });
        }
        match self {
            QuantumState::Pure { amps, .. } => {
                let upper = u * amps.rows(d, d);
                amps.rows_mut(d, d).copy_from(&upper);
            }
            QuantumState::Mixed { rho, .. } => {
                // Blocks [[a, b], [c, e]] become [[a, b u†], [u c, u e u†]].
                let block = |r: usize, c: usize| -> CMatrix { rho.view((r, c), (d, d)).into_owned() };
                let b = linalg::matmul_adjoint(&block(0, d), u);
                let cblk = linalg::matmul(u, &block(d, 0));
                let e = linalg::matmul_adjoint(&linalg::matmul(u, &block(d, d)), u);
                rho.view_mut((0, d), (d, d)).copy_from(&b);
                rho.view_mut((d, 0), (d, d)).copy_from(&cblk);
                rho.view_mut((d, d), (d, d)).copy_from(&e);
            }
        }
        Ok(())
    }

    /// Probability that `qubit` reads 0.
    pub fn probability_zero(&self, qubit: usize) -> f64 {
        let mask = 1usize << qubit;
        match self {
            QuantumState::Pure { amps, .. } => amps.iter().enumerate().filter(|(k, _)| k & mask == 0).map(|(_, a)| a.norm_sqr()).sum(),
            QuantumState::Mixed { rho, .. } => (0..rho.nrows()).filter(|k| k & mask == 0).map(|k| rho[(k, k)].re).sum(),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            QuantumState::Pure { amps, .. } => amps.norm(),
            QuantumState::Mixed { rho, .. } => rho.trace().re,
        }
    }

    /// JSON snapshot: `[re, im]` pairs, nested by row for density matrices.
    pub fn to_json(&self) -> Value {
        let pair = |z: &Complex64| json!([z.re, z.im]);
        match self {
            QuantumState::Pure { amps, .. } => Value::Array(amps.iter().map(pair).collect()),
            QuantumState::Mixed { rho, .. } => {
                Value::Array((0..rho.nrows()).map(|r| Value::Array(rho.row(r).iter().map(pair).collect())).collect())
            }
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = || Error::Parse("state snapshot must hold [re, im] pairs".into());
        let parse_pair = |v: &Value| -> Result<Complex64> {
            let a = v.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            Ok(Complex64::new(a[0].as_f64().ok_or_else(bad)?, a[1].as_f64().ok_or_else(bad)?))
        };
        let rows = value.as_array().ok_or_else(bad)?;
        let nested = rows.first().and_then(|r| r.as_array()).is_some_and(|r| r.first().is_some_and(Value::is_array));
        if nested {
            let d = rows.len();
            let mut rho = CMatrix::zeros(d, d);
            for (r, row) in rows.iter().enumerate() {
                let row = row.as_array().filter(|a| a.len() == d).ok_or_else(bad)?;
                for (col, v) in row.iter().enumerate() {
                    rho[(r, col)] = parse_pair(v)?;
                }
            }
            QuantumState::from_density(rho)
        } else {
            let amps: Vec<Complex64> = rows.iter().map(parse_pair).collect::<Result<_>>()?;
            QuantumState::from_amplitudes(CVector::from_vec(amps))
        }
    }
}

fn qubits_for(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("dimension {dim} is not a power of two")));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_gate(gate: &Gate, n: usize) -> Result<()> {
    for &q in &gate.targets {
        if q >= n {
            return Err(Error::QubitOutOfRange { qubit: q, n });
        }
    }
    if gate.controlled && gate.targets.contains(&(n - 1)) {
        return Err(Error::InvalidParameter(format!("controlled gate {gate} targets the control qubit")));
    }
    if gate.is_two_qubit() && gate.targets[0] == gate.targets[1] {
        return Err(Error::InvalidParameter(format!("gate {gate} repeats a target")));
    }
    Ok(())
}

/// Applies a gate to one amplitude vector of an `n`-qubit register.
fn apply_to_slice(v: &mut [Complex64], gate: &Gate, n: usize) {
    let m = gate.matrix();
    let cmask = if gate.controlled { 1usize << (n - 1) } else { 0 };
    match *gate.targets.as_slice() {
        [t] => {
            let tm = 1usize << t;
            let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            for k in 0..v.len() {
                if k & tm != 0 || k & cmask != cmask {
                    continue;
                }
                let (a, b) = (v[k], v[k | tm]);
                v[k] = m00 * a + m01 * b;
                v[k | tm] = m10 * a + m11 * b;
            }
        }
        [t0, t1] => {
            let (m0, m1) = (1usize << t0, 1usize << t1);
            for k in 0..v.len() {
                if k & (m0 | m1) != 0 || k & cmask != cmask {
                    continue;
                }
                let idx = [k, k | m0, k | m1, k | m0 | m1];
                let old = idx.map(|i| v[i]);
                for (r, &i) in idx.iter().enumerate() {
                    v[i] = (0..4).fold(ZERO, |acc, col| acc + m[(r, col)] * old[col]);
                }
            }
        }
        _ => unreachable!("gate arity is 1 or 2"),
    }
}

/// `m ← G m` column by column.
fn apply_left(m: &mut CMatrix, gate: &Gate, n: usize) {
    for j in 0..m.ncols() {
        apply_to_slice(m.column_mut(j).as_mut_slice(), gate, n);
    }
}

/// `ρ ← U ρ U†` given a routine that left-multiplies by `U`.
fn conjugate(rho: &mut CMatrix, left: impl Fn(&mut CMatrix)) {
    left(rho);
    let mut t = rho.adjoint();
    left(&mut t);
    *rho = t.adjoint();
}

/// Full unitary of a circuit on `n_system + 1` qubits.
pub fn circuit_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_qubits();
    linalg::check_dense(n, linalg::dense_limit())?;
    let mut u = linalg::identity(1 << n);
    for g in &circuit.gates {
        check_gate(g, n)?;
        apply_left(&mut u, g, n);
    }
    Ok(u)
}

/// The system unitary applied when P is |1⟩.
///
/// Requires every gate to be controlled, so that the circuit is
/// block-diagonal with the identity on the P = 0 branch.
pub fn circuit_branch_unitary(circuit: &Circuit) -> Result<CMatrix> {
    let n = circuit.n_system;
    linalg::check_dense(n, linalg::dense_limit())?;
    let mut u = linalg::identity(1 << n);
    for g in &circuit.gates {
        if !g.controlled {
            return Err(Error::InvalidParameter(format!("gate {g} is not controlled by the probe qubit")));
        }
        let free = Gate { controlled: false, ..g.clone() };
        check_gate(&free, n)?;
        apply_left(&mut u, &free, n);
    }
    Ok(u)
}

/// `e^{−iHt}` from the eigendecomposition of `H`.
pub fn exact_unitary(h: &PauliSum, t: f64) -> Result<CMatrix> {
    Ok(linalg::expm_hermitian(&h.to_dense()?, t))
}

/// Thermal state `e^{−βH}/Z`.
pub fn gibbs_state(h: &PauliSum, beta: f64) -> Result<CMatrix> {
    gibbs_from_eigen(&HermitianEigen::new(&h.to_dense()?), beta)
}

pub fn gibbs_from_eigen(eig: &HermitianEigen, beta: f64) -> Result<CMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite and non-negative, got {beta}")));
    }
    // Shifting by the ground energy keeps the weights in range at large beta.
    let e0 = eig.min_value();
    let z: f64 = eig.values.iter().map(|e| (-beta * (e - e0)).exp()).sum();
    Ok(eig.apply(|e| Complex64::new((-beta * (e - e0)).exp() / z, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;
    use crate::linalg::{c, distance};

    #[test]
    fn hadamard_on_zero() {
        let s = QuantumState::zero(1).unwrap().applied(&Gate::plain(GateKind::H, vec![0], 0.0)).unwrap();
        let QuantumState::Pure { amps, .. } = s else { panic!() };
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((amps[1] - c(r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn plus_iswap_moves_excitation_with_phase() {
        // |01⟩ means qubit 0 set: index 1.
        let s = QuantumState::basis(2, 1).unwrap().applied(&Gate::plain(GateKind::PlusISwap, vec![0, 1], 0.0)).unwrap();
        let QuantumState::Pure { amps, .. } = s else { panic!() };
        assert!((amps[2] - c(0.0, 1.0)).norm() < 1e-15);
        assert!(amps[1].norm() < 1e-15);
    }

    #[test]
    fn controlled_rotation_is_block_diagonal() {
        let mut circ = Circuit::new(1, 0.1, "x");
        circ.push(Gate::crot(GateKind::RSigmaN, 0, 0.4));
        let u = circuit_unitary(&circ).unwrap();
        assert_eq!(u[(0, 0)], ONE);
        assert_eq!(u[(1, 1)], ONE);
        assert!((u[(2, 2)] - linalg::cis(-0.4)).norm() < 1e-15);
        assert!(distance(&circuit_unitary(&Circuit::new(2, 0.1, "e")).unwrap(), &linalg::identity(8)) < 1e-15);
    }

    #[test]
    fn out_of_range_target() {
        let mut s = QuantumState::zero(2).unwrap();
        assert!(matches!(s.apply_gate(&Gate::c1(GateKind::H, 5)), Err(Error::QubitOutOfRange { qubit: 5, n: 2 })));
    }

    #[test]
    fn negative_beta_is_rejected() {
        assert!(gibbs_state(&PauliSum::identity(1), -1.0).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let s = QuantumState::basis(2, 3).unwrap();
        assert_eq!(QuantumState::from_json(&s.to_json()).unwrap(), s);
        let m = QuantumState::with_probe(&linalg::identity(2).scale(0.5)).unwrap();
        assert_eq!(QuantumState::from_json(&m.to_json()).unwrap(), m);
    }
}
