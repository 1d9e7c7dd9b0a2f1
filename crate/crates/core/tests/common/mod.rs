//! Independent dense oracles shared by the integration suites.

#![allow(dead_code)]

use hubbard_qsim::linalg::{CMatrix, ONE};
use hubbard_qsim::{ClusterSpec, Geometry, HamiltonianBlocks};
use num_complex::Complex64;

pub fn geometry(text: &str) -> Geometry {
    text.parse().expect("geometry parses")
}

pub fn stress(text: &str) -> ClusterSpec {
    ClusterSpec::stress(geometry(text))
}

pub fn with_u(text: &str, u: f64) -> ClusterSpec {
    let mut spec = ClusterSpec::new(geometry(text));
    spec.u = u;
    spec
}

/// `c†_q` built from bit operations: qubit `q` is bit `q` of the basis
/// index, occupied is bit 0, and the sign counts set bits below `q`.
pub fn creation(q: usize, n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        if k >> q & 1 == 1 {
            let below = (k & ((1 << q) - 1)).count_ones();
            m[(k ^ (1 << q), k)] = if below % 2 == 0 { ONE } else { -ONE };
        }
    }
    m
}

pub fn annihilation(q: usize, n_qubits: usize) -> CMatrix {
    creation(q, n_qubits).adjoint()
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dense_hamiltonian(spec: &ClusterSpec) -> CMatrix {
    HamiltonianBlocks::build(spec).unwrap().full().to_dense().unwrap()
}

/// Gibbs state by direct eigendecomposition.
pub fn gibbs(h: &CMatrix, beta: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let v = &eig.eigenvectors;
    let mut rho = CMatrix::zeros(h.nrows(), h.nrows());
    for (k, w) in weights.iter().enumerate() {
        let col = v.column(k);
        rho += col * col.adjoint() * Complex64::new(w / z, 0.0);
    }
    rho
}

/// `e^{−iHt}` by nalgebra's eigendecomposition.
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t)));
    v * phases * v.adjoint()
}

/// `Tr[ρ A(τ) B]` with `A(τ) = e^{iHτ} A e^{−iHτ}`.
pub fn heisenberg(rho: &CMatrix, h: &CMatrix, a: &CMatrix, b: &CMatrix, tau: f64) -> Complex64 {
    let u = propagator(h, tau);
    (rho * u.adjoint() * a * &u * b).trace()
}
