//! Weighted Pauli strings and their sums.
//!
//! Qubit 0 is the least significant bit of a basis-state index. Textual
//! labels are written most-significant qubit first, so `"ZX"` is X on qubit 0
//! and Z on qubit 1.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};

/// Coefficients at or below this magnitude are dropped from a [`PauliSum`].
pub const COEFF_EPS: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// The product `self · rhs` as `(phase, pauli)`.
    pub fn mul(self, rhs: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let i = Complex64::new(0.0, 1.0);
        match (self, rhs) {
            (I, p) | (p, I) => (ONE, p),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }

    pub fn commutes(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    pub fn matrix(self) -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }
}

fn parse_label(label: &str) -> Result<Vec<Pauli>> {
    label.chars().rev().map(|c| Pauli::from_letter(c).ok_or_else(|| Error::Parse(format!("bad Pauli letter `{c}`")))).collect()
}

fn format_label(letters: &[Pauli]) -> String {
    letters.iter().rev().map(|p| p.letter()).collect()
}

/// A single weighted Pauli string.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub letters: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(coeff: Complex64, letters: Vec<Pauli>) -> Self {
        PauliTerm { coeff, letters }
    }

    pub fn identity(n: usize) -> Self {
        PauliTerm::new(ONE, vec![Pauli::I; n])
    }

    /// A single Pauli letter on `qubit` of an `n`-qubit register.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Result<Self> {
        if qubit >= n {
            return Err(Error::QubitOutOfRange { qubit, n });
        }
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = p;
        Ok(PauliTerm::new(ONE, letters))
    }

    /// Parses a most-significant-first label such as `"ZXI"`.
    pub fn from_label(coeff: Complex64, label: &str) -> Result<Self> {
        Ok(PauliTerm::new(coeff, parse_label(label)?))
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn label(&self) -> String {
        format_label(&self.letters)
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, p)| **p != Pauli::I).map(|(q, _)| q).collect()
    }

    pub fn with_coeff(&self, coeff: Complex64) -> Self {
        PauliTerm::new(coeff, self.letters.clone())
    }

    pub fn adjoint(&self) -> Self {
        self.with_coeff(self.coeff.conj())
    }

    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        check_len(self.n_qubits(), other.n_qubits())?;
        let mut coeff = self.coeff * other.coeff;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(a, b)| {
                let (phase, p) = a.mul(*b);
                coeff *= phase;
                p
            })
            .collect();
        Ok(PauliTerm::new(coeff, letters))
    }

    /// Whether the two strings commute (coefficients are ignored).
    ///
    /// # Panics
    /// If the qubit counts differ.
    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits(), "qubit count mismatch");
        let anti = self.letters.iter().zip(&other.letters).filter(|(a, b)| !a.commutes(**b)).count();
        anti % 2 == 0
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        PauliSum::from_term(self.clone()).to_dense()
    }
}

fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

/// A canonical sum of Pauli strings on a fixed number of qubits.
///
/// Like strings are merged on insertion and coefficients with magnitude at
/// most [`COEFF_EPS`] are removed, so structural equality is algebraic
/// equality up to that threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<Vec<Pauli>, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        PauliSum::from_term(PauliTerm::identity(n))
    }

    pub fn from_term(term: PauliTerm) -> Self {
        let mut sum = PauliSum::zero(term.n_qubits());
        sum.insert(term.letters, term.coeff);
        sum
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = PauliSum::zero(n);
        for t in terms {
            sum.add_term(t)?;
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(l, c)| PauliTerm::new(*c, l.clone()))
    }

    /// Coefficient of the string with the given most-significant-first label.
    pub fn coefficient(&self, label: &str) -> Result<Complex64> {
        let letters = parse_label(label)?;
        check_len(self.n, letters.len())?;
        Ok(self.terms.get(&letters).copied().unwrap_or(ZERO))
    }

    fn insert(&mut self, letters: Vec<Pauli>, coeff: Complex64) {
        match self.terms.entry(letters) {
            Entry::Vacant(v) => {
                if coeff.norm() > COEFF_EPS {
                    v.insert(coeff);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().norm() <= COEFF_EPS {
                    o.remove();
                }
            }
        }
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        check_len(self.n, term.n_qubits())?;
        self.insert(term.letters, term.coeff);
        Ok(())
    }

    pub fn try_add(&self, other: &PauliSum) -> Result<PauliSum> {
        check_len(self.n, other.n)?;
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.insert(l.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.try_add(&other.scale(-ONE))
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (l, c) in &self.terms {
            out.insert(l.clone(), c * factor);
        }
        out
    }

    pub fn scale_real(&self, factor: f64) -> PauliSum {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn try_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        check_len(self.n, other.n)?;
        let mut out = PauliSum::zero(self.n);
        for a in self.terms() {
            for b in other.terms() {
                let p = a.multiply(&b)?;
                out.insert(p.letters, p.coeff);
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> PauliSum {
        let mut out = PauliSum::zero(self.n);
        for (l, c) in &self.terms {
            out.insert(l.clone(), c.conj());
        }
        out
    }

    /// `A·B − B·A` in canonical form.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        check_len(self.n, other.n)?;
        let mut out = PauliSum::zero(self.n);
        for a in self.terms() {
            for b in other.terms() {
                // Commuting strings cancel exactly; anticommuting ones double.
                if !a.commutes_with(&b) {
                    let p = a.multiply(&b)?;
                    out.insert(p.letters, p.coeff * 2.0);
                }
            }
        }
        Ok(out)
    }

    /// `A·B + B·A` in canonical form.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        check_len(self.n, other.n)?;
        let mut out = PauliSum::zero(self.n);
        for a in self.terms() {
            for b in other.terms() {
                if a.commutes_with(&b) {
                    let p = a.multiply(&b)?;
                    out.insert(p.letters, p.coeff * 2.0);
                }
            }
        }
        Ok(out)
    }

    /// Hermitian iff every canonical coefficient is real to `tol`.
    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(1e-12)
    }

    /// Sum of coefficient magnitudes, an upper bound on the operator norm.
    pub fn norm1(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Union of the supports of all terms, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&q| self.terms.keys().any(|l| l[q] != Pauli::I)).collect()
    }

    /// Whether every pair of strings in the sum commutes.
    pub fn terms_commute(&self) -> bool {
        let terms: Vec<PauliTerm> = self.terms().collect();
        terms.iter().enumerate().all(|(k, a)| terms[k + 1..].iter().all(|b| a.commutes_with(b)))
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        self.to_dense_within(linalg::dense_limit())
    }

    pub fn to_dense_within(&self, limit: usize) -> Result<CMatrix> {
        linalg::check_dense(self.n, limit)?;
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        for (letters, coeff) in &self.terms {
            let mut flip = 0usize;
            let mut sign_mask = 0usize;
            let mut n_y = 0u32;
            for (q, p) in letters.iter().enumerate() {
                match p {
                    Pauli::I => {}
                    Pauli::X => flip |= 1 << q,
                    Pauli::Y => {
                        flip |= 1 << q;
                        sign_mask |= 1 << q;
                        n_y += 1;
                    }
                    Pauli::Z => sign_mask |= 1 << q,
                }
            }
            let base = coeff * Complex64::new(0.0, 1.0).powu(n_y);
            for k in 0..dim {
                let v = if (k & sign_mask).count_ones() % 2 == 1 { -base } else { base };
                m[(k ^ flip, k)] += v;
            }
        }
        Ok(m)
    }
}

fn format_coeff(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{}{:?}i", c.re, sign, c.im.abs())
}

fn parse_coeff(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("bad coefficient `{s}`"));
    let body = s.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')).ok_or_else(bad)?;
    let re: f64 = body[..split].parse().map_err(|_| bad())?;
    let im: f64 = body[split..].parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// One line per term, `coeff  label`, most-significant qubit leftmost.
/// The zero sum prints as `0.0+0.0i  III…`.
impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "{}  {}", format_coeff(ZERO), "I".repeat(self.n));
        }
        for (l, c) in &self.terms {
            writeln!(f, "{}  {}", format_coeff(*c), format_label(l))?;
        }
        Ok(())
    }
}

impl FromStr for PauliSum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut sum: Option<PauliSum> = None;
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (coeff, label) = line.rsplit_once(char::is_whitespace).ok_or_else(|| Error::Parse(format!("bad line `{line}`")))?;
            let term = PauliTerm::from_label(parse_coeff(coeff.trim())?, label)?;
            sum.get_or_insert_with(|| PauliSum::zero(term.n_qubits())).add_term(term)?;
        }
        sum.ok_or_else(|| Error::Parse("empty Pauli sum".into()))
    }
}

impl From<PauliTerm> for PauliSum {
    fn from(t: PauliTerm) -> Self {
        PauliSum::from_term(t)
    }
}

// Operator forms for internal assembly; they panic on qubit-count mismatch
// where the `try_*` methods return an error.
impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(rhs).expect("qubit count mismatch")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self.try_sub(rhs).expect("qubit count mismatch")
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.try_mul(rhs).expect("qubit count mismatch")
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: f64) -> PauliSum {
        self.scale_real(rhs)
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn single_qubit_products() {
        let x = PauliTerm::from_label(ONE, "X").unwrap();
        let y = PauliTerm::from_label(ONE, "Y").unwrap();
        let z = PauliTerm::from_label(ONE, "Z").unwrap();
        let xy = x.multiply(&y).unwrap();
        assert_eq!(xy.letters, vec![Pauli::Z]);
        assert_eq!(xy.coeff, c(0.0, 1.0));
        let zz = z.multiply(&z).unwrap();
        assert_eq!(zz.letters, vec![Pauli::I]);
        assert_eq!(zz.coeff, ONE);
    }

    #[test]
    fn multiply_rejects_length_mismatch() {
        let a = PauliTerm::identity(2);
        let b = PauliTerm::identity(3);
        assert!(matches!(a.multiply(&b), Err(Error::DimensionMismatch { left: 2, right: 3 })));
    }

    #[test]
    fn commutator_of_x_and_y() {
        let x = PauliSum::from_str("1.0+0.0i  X").unwrap();
        let y = PauliSum::from_str("1.0+0.0i  Y").unwrap();
        let comm = x.commutator(&y).unwrap();
        assert_eq!(comm.len(), 1);
        assert_eq!(comm.coefficient("Z").unwrap(), c(0.0, 2.0));
    }

    #[test]
    fn disjoint_supports_commute() {
        let a = PauliSum::from_str("1.0+0.0i  XI").unwrap();
        let b = PauliSum::from_str("1.0+0.0i  IX").unwrap();
        assert!(a.commutator(&b).unwrap().is_zero());
    }

    #[test]
    fn display_round_trips() {
        let mut s = PauliSum::zero(3);
        s.add_term(PauliTerm::from_label(c(0.5, 0.0), "ZXI").unwrap()).unwrap();
        s.add_term(PauliTerm::from_label(c(-1.0 / 3.0, 2e-7), "YYZ").unwrap()).unwrap();
        let text = s.to_string();
        assert!(text.contains("0.5+0.0i  ZXI"));
        assert_eq!(PauliSum::from_str(&text).unwrap(), s);
    }

    #[test]
    fn x_on_qubit_zero_is_least_significant() {
        let x0 = PauliTerm::single(2, 0, Pauli::X).unwrap().to_dense().unwrap();
        // |00> -> |01>, i.e. index 0 -> index 1.
        assert_eq!(x0[(1, 0)], ONE);
        assert_eq!(x0[(2, 0)], ZERO);
    }

    #[test]
    fn tiny_coefficients_are_dropped() {
        let mut s = PauliSum::zero(1);
        s.add_term(PauliTerm::from_label(c(1.0, 0.0), "X").unwrap()).unwrap();
        s.add_term(PauliTerm::from_label(c(-1.0 + 1e-15, 0.0), "X").unwrap()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn dense_limit_is_enforced() {
        let s = PauliSum::identity(5);
        assert!(matches!(s.to_dense_within(4), Err(Error::DenseLimitExceeded { qubits: 5, limit: 4 })));
    }
}
