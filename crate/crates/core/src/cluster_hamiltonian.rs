//! Cluster geometry and the six Hamiltonian blocks.
//!
//! The cluster Hamiltonian is assembled as
//! `H' = kin + int − s_pair − d_pair − local − af`
//! with open boundaries and sites labelled row-major, x fastest.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jordan_wigner::{d_local, d_string, t_local, t_string, Spin};
use crate::linalg;
use crate::pauli_algebra::PauliSum;

/// Extents of a 1D chain, 2D rectangle or 3D box of sites.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Geometry {
    extent: Vec<usize>,
}

impl Geometry {
    pub fn new(extent: Vec<usize>) -> Result<Self> {
        let text = format!("{extent:?}");
        match extent.len() {
            1 if extent[0] >= 1 => {}
            2 | 3 if extent.iter().all(|&l| l >= 2) => {}
            1..=3 => return Err(Error::Unsupported(format!("cluster extent {text}: multi-dimensional extents must be at least 2"))),
            _ => return Err(Error::InvalidGeometry(text)),
        }
        Ok(Geometry { extent })
    }

    pub fn chain(n: usize) -> Result<Self> {
        Geometry::new(vec![n])
    }

    pub fn square(l: usize) -> Result<Self> {
        Geometry::new(vec![l, l])
    }

    pub fn cube(l: usize) -> Result<Self> {
        Geometry::new(vec![l, l, l])
    }

    pub fn dims(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn n_sites(&self) -> usize {
        self.extent.iter().product()
    }

    /// Index step between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.extent[..axis].iter().product()
    }

    /// Integer position of a site (1-based label).
    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut rest = site - 1;
        self.extent
            .iter()
            .map(|&l| {
                let c = rest % l;
                rest /= l;
                c
            })
            .collect()
    }

    /// Nearest-neighbour bonds with open boundaries, ordered by `(i, j)`.
    pub fn bonds(&self) -> Vec<Bond> {
        let mut bonds = Vec::new();
        for i in 1..=self.n_sites() {
            let pos = self.coords(i);
            for axis in 0..self.dims() {
                if pos[axis] + 1 < self.extent[axis] {
                    bonds.push(Bond { i, j: i + self.stride(axis), axis });
                }
            }
        }
        bonds.sort_by_key(|b| (b.i, b.j));
        bonds
    }

    /// Checkerboard sign `e^{iQ·R}` with the all-π wavevector.
    pub fn af_sign(&self, site: usize) -> f64 {
        if self.coords(site).iter().sum::<usize>() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl FromStr for Geometry {
    type Err = Error;

    /// Accepts `1d:N`, `AxB` and `AxBxC`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGeometry(s.to_string());
        let s = s.trim();
        if let Some(n) = s.strip_prefix("1d:").or_else(|| s.strip_prefix("1D:")) {
            return Geometry::chain(n.parse().map_err(|_| bad())?);
        }
        let extent: Vec<usize> = s.split('x').map(|p| p.parse().map_err(|_| bad())).collect::<Result<_>>()?;
        if extent.len() < 2 {
            return Err(bad());
        }
        Geometry::new(extent)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dims() == 1 {
            write!(f, "1d:{}", self.extent[0])
        } else {
            let parts: Vec<String> = self.extent.iter().map(|l| l.to_string()).collect();
            f.write_str(&parts.join("x"))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub axis: usize,
}

impl Bond {
    /// Label distance `m = j − i`; a same-spin hopping string on this bond
    /// covers `2m + 1` qubits.
    pub fn span(&self) -> usize {
        self.j - self.i
    }
}

/// Geometry, couplings and variational fields of one cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct ClusterSpec {
    pub geometry: Geometry,
    pub t: f64,
    pub u: f64,
    pub mu_p: f64,
    pub m_p: f64,
    pub delta_s: f64,
    pub delta_d: f64,
}

#[derive(Serialize, Deserialize)]
struct SpecDocument {
    dims: usize,
    extent: Vec<usize>,
    t: f64,
    #[serde(rename = "U")]
    u: f64,
    mu_p: f64,
    #[serde(rename = "M_p")]
    m_p: f64,
    delta_s: f64,
    delta_d: f64,
}

impl TryFrom<SpecDocument> for ClusterSpec {
    type Error = Error;
    fn try_from(d: SpecDocument) -> Result<Self> {
        if d.dims != d.extent.len() {
            return Err(Error::InvalidGeometry(format!("dims {} with extent {:?}", d.dims, d.extent)));
        }
        let spec = ClusterSpec {
            geometry: Geometry::new(d.extent)?,
            t: d.t,
            u: d.u,
            mu_p: d.mu_p,
            m_p: d.m_p,
            delta_s: d.delta_s,
            delta_d: d.delta_d,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<ClusterSpec> for SpecDocument {
    fn from(s: ClusterSpec) -> Self {
        SpecDocument {
            dims: s.geometry.dims(),
            extent: s.geometry.extent.clone(),
            t: s.t,
            u: s.u,
            mu_p: s.mu_p,
            m_p: s.m_p,
            delta_s: s.delta_s,
            delta_d: s.delta_d,
        }
    }
}

impl ClusterSpec {
    /// All couplings zero except `t = 1`.
    pub fn new(geometry: Geometry) -> Self {
        ClusterSpec { geometry, t: 1.0, u: 0.0, mu_p: 0.0, m_p: 0.0, delta_s: 0.0, delta_d: 0.0 }
    }

    /// `t = 1, U = 8` and every variational field at 3: the worst-case
    /// setting used for the Trotter error study.
    pub fn stress(geometry: Geometry) -> Self {
        ClusterSpec { geometry, t: 1.0, u: 8.0, mu_p: 3.0, m_p: 3.0, delta_s: 3.0, delta_d: 3.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let values =
            [("t", self.t), ("U", self.u), ("mu_p", self.mu_p), ("M_p", self.m_p), ("delta_s", self.delta_s), ("delta_d", self.delta_d)];
        for (name, v) in values {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn n_sites(&self) -> usize {
        self.geometry.n_sites()
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    /// Whether the d-wave pairing block is defined for this geometry.
    pub fn has_d_pair(&self) -> bool {
        self.geometry.dims() == 2
    }
}

/// The six Hamiltonian blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Local,
    Af,
    Int,
    Kin,
    SPair,
    DPair,
}

impl Block {
    pub const ALL: [Block; 6] = [Block::Local, Block::Af, Block::Int, Block::Kin, Block::SPair, Block::DPair];

    pub fn name(self) -> &'static str {
        match self {
            Block::Local => "local",
            Block::Af => "af",
            Block::Int => "int",
            Block::Kin => "kin",
            Block::SPair => "s_pair",
            Block::DPair => "d_pair",
        }
    }

    /// Sign with which the block enters `H'`.
    pub fn sign(self) -> f64 {
        match self {
            Block::Kin | Block::Int => 1.0,
            Block::Local | Block::Af | Block::SPair | Block::DPair => -1.0,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `μ' Σ n_{iσ}`.
pub fn build_local(spec: &ClusterSpec) -> Result<PauliSum> {
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for i in 1..=l {
        for spin in Spin::ALL {
            h = &h + &t_local(i, spin, l)?.scale_real(spec.mu_p);
        }
    }
    Ok(h)
}

/// `M' Σ e^{iQ·R_i} (n_{i↑} − n_{i↓})`.
pub fn build_af(spec: &ClusterSpec) -> Result<PauliSum> {
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for i in 1..=l {
        let w = spec.m_p * spec.geometry.af_sign(i);
        for spin in Spin::ALL {
            h = &h + &t_local(i, spin, l)?.scale_real(w * spin.sign());
        }
    }
    Ok(h)
}

/// `U Σ n_{i↑} n_{i↓}`.
pub fn build_int(spec: &ClusterSpec) -> Result<PauliSum> {
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for i in 1..=l {
        let nn = t_local(i, Spin::Up, l)?.try_mul(&t_local(i, Spin::Down, l)?)?;
        h = &h + &nn.scale_real(spec.u);
    }
    Ok(h)
}

/// `−t Σ_{⟨ij⟩σ} (c†_{iσ}c_{jσ} + h.c.)`.
pub fn build_kin(spec: &ClusterSpec) -> Result<PauliSum> {
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for b in spec.geometry.bonds() {
        for spin in Spin::ALL {
            h = &h + &t_string(b.i, b.j, spin, l)?.scale_real(-spec.t);
        }
    }
    Ok(h)
}

/// `Δ's Σ (c†_{i↑}c†_{i↓} + h.c.)`.
pub fn build_s_pair(spec: &ClusterSpec) -> Result<PauliSum> {
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for i in 1..=l {
        h = &h + &d_local(i, l)?.scale_real(spec.delta_s);
    }
    Ok(h)
}

/// `+1` on x-bonds, `−1` on y-bonds.
pub fn d_wave_sign(bond: &Bond) -> f64 {
    if bond.axis == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `Δ'd Σ_{⟨ij⟩} (d_ij/2)(D↑(i,j) − D↓(i,j))`; square-lattice geometries only.
pub fn build_d_pair(spec: &ClusterSpec) -> Result<PauliSum> {
    if !spec.has_d_pair() {
        return Err(Error::Unsupported(format!("d-wave pairing needs a 2D cluster, got {}", spec.geometry)));
    }
    let l = spec.n_sites();
    let mut h = PauliSum::zero(2 * l);
    for b in spec.geometry.bonds() {
        let w = spec.delta_d * d_wave_sign(&b) / 2.0;
        let term = &d_string(b.i, b.j, Spin::Up, l)? - &d_string(b.i, b.j, Spin::Down, l)?;
        h = &h + &term.scale_real(w);
    }
    Ok(h)
}

pub fn build_block(spec: &ClusterSpec, block: Block) -> Result<PauliSum> {
    match block {
        Block::Local => build_local(spec),
        Block::Af => build_af(spec),
        Block::Int => build_int(spec),
        Block::Kin => build_kin(spec),
        Block::SPair => build_s_pair(spec),
        Block::DPair => build_d_pair(spec),
    }
}

/// All six blocks; `d_pair` is the zero sum outside two dimensions.
#[derive(Clone, Debug)]
pub struct HamiltonianBlocks {
    pub local: PauliSum,
    pub af: PauliSum,
    pub int: PauliSum,
    pub kin: PauliSum,
    pub s_pair: PauliSum,
    pub d_pair: PauliSum,
}

impl HamiltonianBlocks {
    pub fn build(spec: &ClusterSpec) -> Result<Self> {
        spec.validate()?;
        let d_pair = if spec.has_d_pair() { build_d_pair(spec)? } else { PauliSum::zero(spec.n_qubits()) };
        Ok(HamiltonianBlocks {
            local: build_local(spec)?,
            af: build_af(spec)?,
            int: build_int(spec)?,
            kin: build_kin(spec)?,
            s_pair: build_s_pair(spec)?,
            d_pair,
        })
    }

    pub fn get(&self, block: Block) -> &PauliSum {
        match block {
            Block::Local => &self.local,
            Block::Af => &self.af,
            Block::Int => &self.int,
            Block::Kin => &self.kin,
            Block::SPair => &self.s_pair,
            Block::DPair => &self.d_pair,
        }
    }

    /// `H' = kin + int − s_pair − d_pair − local − af`.
    pub fn full(&self) -> PauliSum {
        Block::ALL.iter().fold(PauliSum::zero(self.kin.n_qubits()), |acc, &b| &acc + &self.get(b).scale_real(b.sign()))
    }

    /// On-site diagonal group `int − local − af`.
    pub fn z_block(&self) -> PauliSum {
        &(&self.int - &self.local) - &self.af
    }

    /// `−s_pair`.
    pub fn s_block(&self) -> PauliSum {
        -&self.s_pair
    }

    /// `kin − d_pair`.
    pub fn kd_block(&self) -> PauliSum {
        &self.kin - &self.d_pair
    }
}

/// Pairwise commutator norms among the six blocks.
#[derive(Clone, Debug)]
pub struct CommutatorTable {
    pub norms: [[f64; 6]; 6],
}

impl CommutatorTable {
    pub fn norm(&self, a: Block, b: Block) -> f64 {
        self.norms[a as usize][b as usize]
    }
}

/// Frobenius norms of `[H_a, H_b]` computed on dense matrices.
pub fn commutator_table(spec: &ClusterSpec) -> Result<CommutatorTable> {
    let blocks = HamiltonianBlocks::build(spec)?;
    let dense: Vec<_> = Block::ALL.iter().map(|&b| blocks.get(b).to_dense()).collect::<Result<_>>()?;
    let mut norms = [[0.0; 6]; 6];
    for a in 0..6 {
        for b in a + 1..6 {
            let n = linalg::frobenius(&linalg::commutator(&dense[a], &dense[b]));
            norms[a][b] = n;
            norms[b][a] = n;
        }
    }
    Ok(CommutatorTable { norms })
}
