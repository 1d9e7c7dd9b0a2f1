//! Operator splitting over the three non-commuting blocks and the
//! trace-fidelity error of a split evolution.
//!
//! Blocks: `Z = int − local − af`, `S = −s_pair`, `KD = kin − d_pair`, so
//! that `H' = Z + S + KD`. A schedule lists factors `e^{−i c dt B}` in
//! operator order: the first factor is leftmost and acts last.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cluster_hamiltonian::{ClusterSpec, HamiltonianBlocks};
use crate::error::{Error, Result};
use crate::gate_compiler::{compile_kd, compile_s_pair, compile_z, Strategy};
use crate::linalg::{check_dense, dense_limit, identity, matmul, matmul_adjoint, power, CMatrix, HermitianEigen};
use crate::pauli_algebra::PauliSum;
use crate::statevector_sim::circuit_branch_unitary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockId {
    Z,
    S,
    KD,
}

impl BlockId {
    pub const ALL: [BlockId; 3] = [BlockId::Z, BlockId::S, BlockId::KD];

    pub fn name(self) -> &'static str {
        match self {
            BlockId::Z => "z",
            BlockId::S => "s",
            BlockId::KD => "kd",
        }
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlockId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BlockId::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| Error::Parse(format!("unknown block `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Ts2,
    Ruth,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Ts2, Scheme::Ruth];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ts2 => "ts2",
            Scheme::Ruth => "ruth",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| Error::Parse(format!("unknown scheme `{s}`")))
    }
}

/// Nesting of the recursive three-block formula: the outer split is
/// `(order[0], order[1] + order[2])`, the inner one `(order[1], order[2])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nesting {
    pub order: [BlockId; 3],
}

impl Default for Nesting {
    fn default() -> Self {
        Nesting { order: [BlockId::Z, BlockId::S, BlockId::KD] }
    }
}

impl FromStr for Nesting {
    type Err = Error;
    /// `z,s,kd` and permutations.
    fn from_str(s: &str) -> Result<Self> {
        let ids: Vec<BlockId> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_>>()?;
        match ids.as_slice() {
            &[a, b, c] if a != b && b != c && a != c => Ok(Nesting { order: [a, b, c] }),
            _ => Err(Error::Parse(format!("nesting must list z, s and kd once each, got `{s}`"))),
        }
    }
}

/// Ruth's third-order pair formula as printed: `(is_a, coefficient)` in
/// operator order. The `+i` exponents of the printed formula are the
/// negative coefficients.
pub const RUTH_PAIR: [(bool, f64); 6] =
    [(true, 7.0 / 24.0), (false, 2.0 / 3.0), (true, 3.0 / 4.0), (false, -2.0 / 3.0), (true, -1.0 / 24.0), (false, 1.0)];

/// Symmetric worst-case step over the three blocks.
pub const TS2_STEP: [(BlockId, f64); 7] = [
    (BlockId::Z, 0.25),
    (BlockId::S, 0.5),
    (BlockId::Z, 0.25),
    (BlockId::KD, 1.0),
    (BlockId::Z, 0.25),
    (BlockId::S, 0.5),
    (BlockId::Z, 0.25),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSchedule {
    pub scheme: Scheme,
    pub n_t: usize,
    /// `(block, c)` for `e^{−i c dt B}`, operator order.
    pub factors: Vec<(BlockId, f64)>,
}

fn repeat(base: &[(BlockId, f64)], n_t: usize) -> Result<Vec<(BlockId, f64)>> {
    if n_t < 1 {
        return Err(Error::InvalidParameter("n_T must be at least 1".into()));
    }
    Ok((0..n_t).flat_map(|_| base.iter().map(|&(b, c)| (b, c / n_t as f64))).collect())
}

pub fn ts_step(n_t: usize) -> Result<SplitSchedule> {
    Ok(SplitSchedule { scheme: Scheme::Ts2, n_t, factors: repeat(&TS2_STEP, n_t)? })
}

/// Ruth's formula for two blocks `A` and `B`.
pub fn ruth_pair(a: &[(BlockId, f64)], b: &[(BlockId, f64)]) -> Vec<(BlockId, f64)> {
    let mut out = Vec::new();
    for &(is_a, c) in &RUTH_PAIR {
        let inner = if is_a { a } else { b };
        out.extend(inner.iter().map(|&(id, k)| (id, k * c)));
    }
    out
}

/// Recursive Ruth step over the three blocks.
pub fn ruth_step(nesting: Nesting, n_t: usize) -> Result<SplitSchedule> {
    let [a, b, c] = nesting.order;
    let inner = ruth_pair(&[(b, 1.0)], &[(c, 1.0)]);
    let base = ruth_pair(&[(a, 1.0)], &inner);
    Ok(SplitSchedule { scheme: Scheme::Ruth, n_t, factors: repeat(&base, n_t)? })
}

pub fn schedule(scheme: Scheme, nesting: Nesting, n_t: usize) -> Result<SplitSchedule> {
    match scheme {
        Scheme::Ts2 => ts_step(n_t),
        Scheme::Ruth => ruth_step(nesting, n_t),
    }
}

impl SplitSchedule {
    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn coefficient_sums(&self) -> BTreeMap<BlockId, f64> {
        let mut sums = BTreeMap::new();
        for &(b, c) in &self.factors {
            *sums.entry(b).or_insert(0.0) += c;
        }
        sums
    }

    /// Drops absent blocks and merges neighbouring factors of one block.
    pub fn simplify(&self, present: &[BlockId]) -> SplitSchedule {
        let mut factors: Vec<(BlockId, f64)> = Vec::new();
        for &(b, c) in self.factors.iter().filter(|(b, _)| present.contains(b)) {
            match factors.last_mut() {
                Some((last, k)) if *last == b => *k += c,
                _ => factors.push((b, c)),
            }
        }
        SplitSchedule { factors, ..self.clone() }
    }
}

/// The three split blocks of a cluster.
#[derive(Clone, Debug)]
pub struct SplitBlocks {
    pub z: PauliSum,
    pub s: PauliSum,
    pub kd: PauliSum,
}

impl SplitBlocks {
    pub fn new(spec: &ClusterSpec) -> Result<Self> {
        let blocks = HamiltonianBlocks::build(spec)?;
        Ok(SplitBlocks { z: blocks.z_block(), s: blocks.s_block(), kd: blocks.kd_block() })
    }

    pub fn get(&self, id: BlockId) -> &PauliSum {
        match id {
            BlockId::Z => &self.z,
            BlockId::S => &self.s,
            BlockId::KD => &self.kd,
        }
    }

    pub fn present(&self) -> Vec<BlockId> {
        BlockId::ALL.into_iter().filter(|&b| !self.get(b).is_zero()).collect()
    }

    pub fn total(&self) -> PauliSum {
        &(&self.z + &self.s) + &self.kd
    }
}

/// Cached eigendecompositions of the blocks and of their sum.
pub struct ExactFactors {
    blocks: BTreeMap<BlockId, HermitianEigen>,
    total: HermitianEigen,
}

impl ExactFactors {
    pub fn new(blocks: &SplitBlocks) -> Result<Self> {
        let n = blocks.z.n_qubits();
        check_dense(n, dense_limit())?;
        let eig = |h: &PauliSum| -> Result<HermitianEigen> { Ok(HermitianEigen::new(&h.to_dense()?)) };
        let mut map = BTreeMap::new();
        for id in BlockId::ALL {
            map.insert(id, eig(blocks.get(id))?);
        }
        Ok(ExactFactors { blocks: map, total: eig(&blocks.total())? })
    }

    pub fn factor(&self, id: BlockId, t: f64) -> CMatrix {
        self.blocks[&id].propagator(t)
    }

    /// `e^{−i H' t}`.
    pub fn exact(&self, t: f64) -> CMatrix {
        self.total.propagator(t)
    }

    /// One split step of length `dt`.
    pub fn step(&self, schedule: &SplitSchedule, dt: f64) -> CMatrix {
        let dim = self.total.dim();
        schedule.factors.iter().fold(identity(dim), |acc, &(id, c)| matmul(&acc, &self.factor(id, c * dt)))
    }
}

/// How each factor of a split step is realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionMode {
    #[default]
    Exact,
    Compiled,
}

/// Probe-controlled circuit for one split step; factors act right to left.
pub fn step_circuit(spec: &ClusterSpec, schedule: &SplitSchedule, dt: f64, strategy: Strategy) -> Result<Circuit> {
    let mut circ = Circuit::new(spec.n_qubits(), dt, format!("{}-step", schedule.scheme));
    for &(id, c) in schedule.factors.iter().rev() {
        let piece = match id {
            BlockId::Z => compile_z(spec, c * dt)?,
            BlockId::S => compile_s_pair(spec, c * dt)?,
            BlockId::KD => compile_kd(spec, c * dt, strategy)?,
        };
        circ = circ.then(&piece)?;
    }
    Ok(circ)
}

/// System unitary of one split step.
pub fn evolve_split(spec: &ClusterSpec, schedule: &SplitSchedule, dt: f64, mode: EvolutionMode) -> Result<CMatrix> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let blocks = SplitBlocks::new(spec)?;
    let schedule = schedule.simplify(&blocks.present());
    match mode {
        EvolutionMode::Exact => Ok(ExactFactors::new(&blocks)?.step(&schedule, dt)),
        EvolutionMode::Compiled => {
            check_dense(spec.n_qubits(), dense_limit())?;
            circuit_branch_unitary(&step_circuit(spec, &schedule, dt, Strategy::Exact)?)
        }
    }
}

/// `ε = 1 − |Tr(U_ts U†)|² / d²`, evaluated without cancellation.
///
/// With `W = U_ts U†` rotated so that `Tr W` is real and positive and
/// `E = W − I`, unitarity gives `ε = ‖E‖²/d − (Tr E / d)²`.
pub fn error_metric(u_ts: &CMatrix, u_exact: &CMatrix) -> Result<f64> {
    if u_ts.shape() != u_exact.shape() {
        return Err(Error::DimensionMismatch { left: u_ts.nrows(), right: u_exact.nrows() });
    }
    let d = u_ts.nrows() as f64;
    let w = matmul_adjoint(u_ts, u_exact);
    let trace = w.trace();
    let phase = if trace.norm() > 0.0 { trace.conj() / trace.norm() } else { num_complex::Complex64::new(1.0, 0.0) };
    let mut e = w * phase;
    for k in 0..e.nrows() {
        e[(k, k)] -= 1.0;
    }
    let norm2: f64 = e.iter().map(|z| z.norm_sqr()).sum();
    let tr = e.trace().re / d;
    Ok((norm2 / d - tr * tr).clamp(0.0, 1.0))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Total evolution time `τ = N Δτ`.
    pub tau: f64,
    /// Requested step sizes; each is snapped to `τ / round(τ / Δτ)`.
    pub dtaus: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub nesting: Nesting,
    pub mode: EvolutionMode,
    /// Record wall-clock time per point; off gives reproducible output.
    pub timing: bool,
}

impl SweepConfig {
    pub fn new(tau: f64, dtaus: Vec<f64>) -> Self {
        SweepConfig { tau, dtaus, schemes: Scheme::ALL.to_vec(), nesting: Nesting::default(), mode: EvolutionMode::Exact, timing: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dtau: f64,
    pub scheme: Scheme,
    pub epsilon: f64,
    pub n_factors: usize,
    pub wall_ms: f64,
}

/// `points` log-spaced values from `lo` to `hi`.
pub fn logspace(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && points >= 1) {
        return Err(Error::InvalidParameter(format!("bad sweep range {lo}:{hi}:{points}")));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..points).map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp()).collect())
}

/// Error of the split evolution over `[0, τ]` for each scheme and step.
pub fn sweep(spec: &ClusterSpec, config: &SweepConfig) -> Result<Vec<SweepPoint>> {
    if !(config.tau.is_finite() && config.tau > 0.0) {
        return Err(Error::InvalidParameter(format!("tau must be positive, got {}", config.tau)));
    }
    let blocks = SplitBlocks::new(spec)?;
    let present = blocks.present();
    let factors = ExactFactors::new(&blocks)?;
    let exact = factors.exact(config.tau);
    let mut jobs = Vec::new();
    for &scheme in &config.schemes {
        for &requested in &config.dtaus {
            if !(requested.is_finite() && requested > 0.0) {
                return Err(Error::InvalidParameter(format!("step must be positive, got {requested}")));
            }
            let n = (config.tau / requested).round().max(1.0) as u64;
            jobs.push((scheme, n));
        }
    }
    jobs.par_iter()
        .map(|&(scheme, n)| {
            let start = Instant::now();
            let sched = schedule(scheme, config.nesting, 1)?.simplify(&present);
            let dtau = config.tau / n as f64;
            let step = match config.mode {
                EvolutionMode::Exact => factors.step(&sched, dtau),
                EvolutionMode::Compiled => circuit_branch_unitary(&step_circuit(spec, &sched, dtau, Strategy::Exact)?)?,
            };
            let epsilon = error_metric(&power(&step, n), &exact)?;
            let wall_ms = if config.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            Ok(SweepPoint { dtau, scheme, epsilon, n_factors: sched.n_factors(), wall_ms })
        })
        .collect()
}

pub const CSV_HEADER: &str = "dtau,scheme,epsilon,n_factors,wall_ms";

pub fn to_csv(points: &[SweepPoint], header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str(CSV_HEADER);
        out.push('\n');
    }
    for p in points {
        out.push_str(&format!("{:.10e},{},{:.10e},{},{:.3}\n", p.dtau, p.scheme, p.epsilon, p.n_factors, p.wall_ms));
    }
    out
}

/// Least-squares slope and `R²` of `log ε` against `log Δτ`.
pub fn fit_power_law(points: &[SweepPoint]) -> Option<(f64, f64)> {
    let xy: Vec<(f64, f64)> = points.iter().filter(|p| p.epsilon > 0.0).map(|p| (p.dtau.ln(), p.epsilon.ln())).collect();
    if xy.len() < 2 {
        return None;
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((slope, r2))
}
