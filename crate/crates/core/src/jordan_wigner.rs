//! Jordan-Wigner encoding of the cluster's spin orbitals.
//!
//! Orbitals are laid out site-major, `(1↑, 1↓, 2↑, 2↓, …)`, so orbital
//! `(site, spin)` lives on qubit `2(site − 1) + [spin = ↓]`. An occupied
//! orbital is the qubit state |0⟩: `σ+ = |0⟩⟨1| = (X + iY)/2` creates a
//! fermion and `σn = σ+σ− = (I + Z)/2` counts it. The vacuum is |11…1⟩.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ONE;
use crate::pauli_algebra::{Pauli, PauliSum, PauliTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn offset(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    /// +1 for ↑, −1 for ↓.
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Spin::Up => "up",
            Spin::Down => "down",
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Spin {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" | "u" | "↑" => Ok(Spin::Up),
            "down" | "d" | "↓" => Ok(Spin::Down),
            _ => Err(Error::Parse(format!("bad spin `{s}`"))),
        }
    }
}

/// A spin orbital; sites are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbital {
    pub site: usize,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(site: usize, spin: Spin) -> Self {
        Orbital { site, spin }
    }

    pub fn up(site: usize) -> Self {
        Orbital::new(site, Spin::Up)
    }

    pub fn down(site: usize) -> Self {
        Orbital::new(site, Spin::Down)
    }

    /// Qubit index; the site must be at least 1.
    pub fn qubit(self) -> usize {
        2 * (self.site - 1) + self.spin.offset()
    }

    pub fn from_qubit(q: usize) -> Self {
        let spin = if q % 2 == 0 { Spin::Up } else { Spin::Down };
        Orbital::new(q / 2 + 1, spin)
    }

    pub fn check(self, n_sites: usize) -> Result<()> {
        if self.site == 0 || self.site > n_sites {
            return Err(Error::SiteOutOfRange { site: self.site, sites: n_sites });
        }
        Ok(())
    }

    /// All orbitals of an `n_sites` cluster in qubit order.
    pub fn all(n_sites: usize) -> Vec<Orbital> {
        (0..2 * n_sites).map(Orbital::from_qubit).collect()
    }
}

impl fmt::Display for Orbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.site, if self.spin == Spin::Up { '↑' } else { '↓' })
    }
}

/// Which Hermitian combination of `c` and `c†` a probe measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProbeKind {
    /// `c + c†`
    X,
    /// `i(c − c†)`
    Y,
}

impl ProbeKind {
    pub const ALL: [ProbeKind; 2] = [ProbeKind::X, ProbeKind::Y];

    pub fn name(self) -> &'static str {
        match self {
            ProbeKind::X => "X",
            ProbeKind::Y => "Y",
        }
    }
}

impl FromStr for ProbeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(ProbeKind::X),
            "Y" | "y" => Ok(ProbeKind::Y),
            _ => Err(Error::Parse(format!("bad probe kind `{s}`"))),
        }
    }
}

fn z_string(n: usize, below: usize, top: Pauli) -> PauliTerm {
    let mut letters = vec![Pauli::I; n];
    for l in letters.iter_mut().take(below) {
        *l = Pauli::Z;
    }
    letters[below] = top;
    PauliTerm::new(ONE, letters)
}

/// `c†` for an orbital of an `n_sites` cluster.
pub fn creation_op(orb: Orbital, n_sites: usize) -> Result<PauliSum> {
    orb.check(n_sites)?;
    let n = 2 * n_sites;
    let q = orb.qubit();
    let half = Complex64::new(0.5, 0.0);
    let x = z_string(n, q, Pauli::X).with_coeff(half);
    let y = z_string(n, q, Pauli::Y).with_coeff(Complex64::new(0.0, 0.5));
    PauliSum::from_terms(n, [x, y])
}

/// `c`, the adjoint of [`creation_op`].
pub fn annihilation_op(orb: Orbital, n_sites: usize) -> Result<PauliSum> {
    Ok(creation_op(orb, n_sites)?.adjoint())
}

/// `X = c + c†` or `Y = i(c − c†)`: a Z tail below the orbital's qubit.
pub fn hermitian_probe(orb: Orbital, kind: ProbeKind, n_sites: usize) -> Result<PauliTerm> {
    orb.check(n_sites)?;
    let top = match kind {
        ProbeKind::X => Pauli::X,
        ProbeKind::Y => Pauli::Y,
    };
    Ok(z_string(2 * n_sites, orb.qubit(), top))
}

/// Occupation `n = c†c` of one orbital.
pub fn t_local(site: usize, spin: Spin, n_sites: usize) -> Result<PauliSum> {
    let orb = Orbital::new(site, spin);
    creation_op(orb, n_sites)?.try_mul(&annihilation_op(orb, n_sites)?)
}

fn check_pair(i: usize, j: usize, n_sites: usize) -> Result<()> {
    Orbital::up(i).check(n_sites)?;
    Orbital::up(j).check(n_sites)?;
    if i >= j {
        return Err(Error::SiteOrder { i, j });
    }
    Ok(())
}

/// Hopping string `c†_{iσ}c_{jσ} + c†_{jσ}c_{iσ}` for `i < j`.
pub fn t_string(i: usize, j: usize, spin: Spin, n_sites: usize) -> Result<PauliSum> {
    check_pair(i, j, n_sites)?;
    let a = Orbital::new(i, spin);
    let b = Orbital::new(j, spin);
    let hop = creation_op(a, n_sites)?.try_mul(&annihilation_op(b, n_sites)?)?;
    hop.try_add(&hop.adjoint())
}

/// Inter-site pair string for `i < j`.
///
/// `Spin::Up` gives `c†_{i↑}c†_{j↓} + h.c.`, `Spin::Down` gives
/// `c†_{i↓}c†_{j↑} + h.c.`; the spin labels the orbital on site `i`.
pub fn d_string(i: usize, j: usize, spin: Spin, n_sites: usize) -> Result<PauliSum> {
    check_pair(i, j, n_sites)?;
    let a = Orbital::new(i, spin);
    let b = Orbital::new(j, spin.flip());
    let pair = creation_op(a, n_sites)?.try_mul(&creation_op(b, n_sites)?)?;
    pair.try_add(&pair.adjoint())
}

/// On-site pair string `c†_{i↑}c†_{i↓} + c_{i↓}c_{i↑}`.
pub fn d_local(i: usize, n_sites: usize) -> Result<PauliSum> {
    let pair = creation_op(Orbital::up(i), n_sites)?.try_mul(&creation_op(Orbital::down(i), n_sites)?)?;
    pair.try_add(&pair.adjoint())
}

/// Total particle number.
pub fn number_operator(n_sites: usize) -> Result<PauliSum> {
    let mut total = PauliSum::zero(2 * n_sites);
    for orb in Orbital::all(n_sites) {
        total = total.try_add(&t_local(orb.site, orb.spin, n_sites)?)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn qubit_map_is_site_major() {
        assert_eq!(Orbital::up(1).qubit(), 0);
        assert_eq!(Orbital::down(1).qubit(), 1);
        assert_eq!(Orbital::down(2).qubit(), 3);
        for q in 0..10 {
            assert_eq!(Orbital::from_qubit(q).qubit(), q);
        }
    }

    #[test]
    fn creation_on_first_site_has_no_tail() {
        let cd = creation_op(Orbital::up(1), 1).unwrap();
        assert_eq!(cd.coefficient("IX").unwrap(), c(0.5, 0.0));
        assert_eq!(cd.coefficient("IY").unwrap(), c(0.0, 0.5));
        assert_eq!(cd.len(), 2);
    }

    #[test]
    fn creation_tail_covers_lower_qubits() {
        let cd = creation_op(Orbital::down(2), 2).unwrap();
        assert_eq!(cd.coefficient("XZZZ").unwrap(), c(0.5, 0.0));
        assert_eq!(cd.coefficient("YZZZ").unwrap(), c(0.0, 0.5));
    }

    #[test]
    fn site_range_is_checked() {
        assert!(matches!(creation_op(Orbital::up(3), 2), Err(Error::SiteOutOfRange { site: 3, sites: 2 })));
        assert!(matches!(t_string(2, 1, Spin::Up, 2), Err(Error::SiteOrder { i: 2, j: 1 })));
        assert!(matches!(d_string(1, 1, Spin::Up, 2), Err(Error::SiteOrder { .. })));
    }

    #[test]
    fn hopping_string_coefficients_are_minus_one_half() {
        let t = t_string(1, 2, Spin::Up, 2).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.coefficient("IXZX").unwrap(), c(-0.5, 0.0));
        assert_eq!(t.coefficient("IYZY").unwrap(), c(-0.5, 0.0));
    }

    #[test]
    fn local_pair_string_coefficients() {
        let d = d_local(1, 1).unwrap();
        assert_eq!(d.coefficient("XX").unwrap(), c(-0.5, 0.0));
        assert_eq!(d.coefficient("YY").unwrap(), c(0.5, 0.0));
        assert_eq!(d.len(), 2);
    }
}
