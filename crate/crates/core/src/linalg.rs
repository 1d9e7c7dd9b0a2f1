//! Dense complex linear algebra shared by the simulator and the oracles.

use faer::Side;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Environment variable overriding the dense qubit ceiling.
pub const DENSE_LIMIT_ENV: &str = "HUBBARD_QSIM_DENSE_LIMIT";
pub const DEFAULT_DENSE_LIMIT: usize = 14;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{i phi}`.
#[inline]
pub fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// Largest qubit count for which dense matrices are materialized.
pub fn dense_limit() -> usize {
    std::env::var(DENSE_LIMIT_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_DENSE_LIMIT)
}

pub fn check_dense(qubits: usize, limit: usize) -> Result<()> {
    if qubits > limit {
        return Err(Error::DenseLimitExceeded { qubits, limit });
    }
    Ok(())
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Kronecker product with `a` acting on the more significant index bits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn distance(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius(&(a - b))
}

fn view(m: &CMatrix) -> faer::MatRef<'_, Complex64> {
    faer::MatRef::from_column_major_slice(m.as_slice(), m.nrows(), m.ncols())
}

fn from_faer(m: faer::Mat<Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// `a b`; dense products go through faer, which is much faster than the
/// generic nalgebra kernel for complex matrices.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    from_faer(view(a) * view(b))
}

/// `a b†`.
pub fn matmul_adjoint(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "matmul shape mismatch");
    from_faer(view(a) * view(b).adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    matmul(a, b) - matmul(b, a)
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && distance(&matmul_adjoint(m, m), &identity(m.nrows())) <= tol
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && distance(m, &m.adjoint()) <= tol
}

/// `m^k` by repeated squaring.
pub fn power(m: &CMatrix, mut k: u64) -> CMatrix {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    let mut first = true;
    while k > 0 {
        if k & 1 == 1 {
            result = if first { base.clone() } else { matmul(&result, &base) };
            first = false;
        }
        k >>= 1;
        if k > 0 {
            base = matmul(&base, &base);
        }
    }
    result
}

/// Block-diagonal `|0><0| ⊗ I + |1><1| ⊗ u` with the control as the most
/// significant qubit.
pub fn controlled(u: &CMatrix) -> CMatrix {
    let d = u.nrows();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for k in 0..d {
        m[(k, k)] = ONE;
    }
    m.view_mut((d, d), (d, d)).copy_from(u);
    m
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Self {
        // nalgebra's complex symmetric solver loses accuracy on strongly
        // degenerate spectra, so the decomposition is delegated to faer.
        let n = h.nrows();
        let m = faer::Mat::<Complex64>::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
        let eig = m.self_adjoint_eigen(Side::Lower).expect("Hermitian eigendecomposition converges");
        let (s, u) = (eig.S().column_vector(), eig.U());
        HermitianEigen { values: (0..n).map(|k| s[k].re).collect(), vectors: CMatrix::from_fn(n, n, |i, j| u[(i, j)]) }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= w;
            }
        }
        matmul_adjoint(&scaled, &self.vectors)
    }

    /// `e^{-iHt}`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.apply(|lambda| cis(-lambda * t))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `e^{-iHt}` for a Hermitian matrix.
pub fn expm_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    HermitianEigen::new(h).propagator(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_repeated_product() {
        let m = CMatrix::from_fn(3, 3, |i, j| c((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let mut expected = identity(3);
        for _ in 0..7 {
            expected = &expected * &m;
        }
        assert!(distance(&power(&m, 7), &expected) < 1e-12);
        assert!(distance(&power(&m, 0), &identity(3)) < 1e-15);
    }

    #[test]
    fn propagator_of_pauli_z() {
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, -ONE]));
        let u = expm_hermitian(&z, std::f64::consts::FRAC_PI_2);
        assert!((u[(0, 0)] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((u[(1, 1)] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn eigen_reconstructs_degenerate_spectrum() {
        // XX − YY on two of eight qubits: eigenvalues ±3 and 0 with large multiplicity.
        let n = 256;
        let mut h = CMatrix::zeros(n, n);
        for i in 0..n {
            let same = ((i >> 2) & 1) == ((i >> 3) & 1);
            h[(i ^ 0b1100, i)] = c(if same { 3.0 } else { 0.0 }, 0.0);
        }
        let eig = HermitianEigen::new(&h);
        assert!(distance(&eig.apply(|l| c(l, 0.0)), &h) < 1e-12);
    }

    #[test]
    fn controlled_places_block_in_lower_right() {
        let u = CMatrix::from_element(1, 1, I);
        let cu = controlled(&u);
        assert_eq!(cu[(0, 0)], ONE);
        assert_eq!(cu[(1, 1)], I);
    }
}
