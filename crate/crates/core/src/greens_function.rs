//! Correlation functions measured with a probe-controlled Hadamard test,
//! their recombination into Nambu components, moments and the retarded
//! Green's function.
//!
//! The probe P starts in |0⟩ next to a system state ρ. The circuit
//! `H; c-σμ; c-U(τ); c-σν; c-U†(τ); H` leaves `P(0) − P(1) = Re Tr[ρ O]`
//! with `O = U†σν U σμ`. A phase `R_σn(−π/2)` on P before the last `H`
//! gives `Im Tr[ρ O]`. The correlation function is `C_μν(τ) = 2 Tr[ρ O]`,
//! so `⟨σν(τ) σμ⟩ = C_μν(τ) / 2`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::cluster_hamiltonian::{ClusterSpec, HamiltonianBlocks};
use crate::error::{Error, Result};
use crate::gate_compiler::{compile_controlled_probe, Strategy};
use crate::jordan_wigner::{hermitian_probe, Orbital, ProbeKind};
use crate::linalg::{self, c, CMatrix, HermitianEigen, I, ZERO};
use crate::statevector_sim::{gibbs_from_eigen, QuantumState};
use crate::trotter::{evolve_split, schedule, step_circuit, EvolutionMode, Nesting, Scheme, SplitBlocks};

/// A Hermitian probe `X` or `Y` on one orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Probe {
    pub orbital: Orbital,
    pub kind: ProbeKind,
}

impl Probe {
    pub fn new(orbital: Orbital, kind: ProbeKind) -> Self {
        Probe { orbital, kind }
    }

    /// Every probe of a cluster, orbital-major.
    pub fn all(n_sites: usize) -> Vec<Probe> {
        Orbital::all(n_sites).into_iter().flat_map(|o| ProbeKind::ALL.map(|k| Probe::new(o, k))).collect()
    }

    /// Every ordered pair `(μ, ν)`; `4n²` for `n` orbitals.
    pub fn all_pairs(n_sites: usize) -> Vec<(Probe, Probe)> {
        let probes = Probe::all(n_sites);
        probes.iter().flat_map(|&a| probes.iter().map(move |&b| (a, b))).collect()
    }

    pub fn dense(self, n_sites: usize) -> Result<CMatrix> {
        hermitian_probe(self.orbital, self.kind, n_sites)?.to_dense()
    }
}

impl fmt::Display for Probe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.name(), self.orbital)
    }
}

/// How `c-U(τ)` is realised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evolution {
    /// `e^{−iH'τ}` from the eigendecomposition.
    #[default]
    Exact,
    /// Repeated split steps of length `dt`; `τ` must be a multiple of `dt`.
    Trotter { scheme: Scheme, dt: f64, mode: EvolutionMode },
}

enum PropagatorKind {
    Exact(HermitianEigen),
    Stepped { step: CMatrix, dt: f64 },
}

/// System propagator `U(τ)` for one cluster and evolution choice.
pub struct Propagator {
    kind: PropagatorKind,
}

/// Number of steps of length `dt` in `τ`.
pub fn step_count(tau: f64, dt: f64) -> Result<u64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!("split evolution needs τ ≥ 0, got {tau}")));
    }
    let n = (tau / dt).round();
    if (n * dt - tau).abs() > 1e-9 * tau.max(1.0) {
        return Err(Error::InvalidParameter(format!("τ = {tau} is not a multiple of dt = {dt}")));
    }
    Ok(n as u64)
}

impl Propagator {
    pub fn new(spec: &ClusterSpec, evolution: Evolution) -> Result<Self> {
        let kind = match evolution {
            Evolution::Exact => {
                let h = SplitBlocks::new(spec)?.total();
                linalg::check_dense(spec.n_qubits(), linalg::dense_limit())?;
                PropagatorKind::Exact(HermitianEigen::new(&h.to_dense()?))
            }
            Evolution::Trotter { scheme, dt, mode } => {
                let sched = schedule(scheme, Nesting::default(), 1)?;
                PropagatorKind::Stepped { step: evolve_split(spec, &sched, dt, mode)?, dt }
            }
        };
        Ok(Propagator { kind })
    }

    pub fn unitary(&self, tau: f64) -> Result<CMatrix> {
        match &self.kind {
            PropagatorKind::Exact(eig) => Ok(eig.propagator(tau)),
            PropagatorKind::Stepped { step, dt } => Ok(linalg::power(step, step_count(tau, *dt)?)),
        }
    }
}

/// One piece of a correlation circuit.
#[derive(Clone, Debug)]
pub enum Stage {
    Gates(Circuit),
    /// `c-U(τ)`, or `c-U†(τ)` when `adjoint`.
    Evolve {
        adjoint: bool,
    },
}

/// The Hadamard-test circuit for `C_μν(τ)`; `imaginary` selects the
/// phase-shifted variant.
#[derive(Clone, Debug)]
pub struct CorrelationCircuit {
    pub mu: Probe,
    pub nu: Probe,
    pub tau: f64,
    pub imaginary: bool,
    pub stages: Vec<Stage>,
}

fn probe_gate(n_system: usize, kind: GateKind, theta: f64, label: &str) -> Circuit {
    let mut circ = Circuit::new(n_system, 0.0, label);
    circ.push(Gate::plain(kind, vec![n_system], theta));
    circ
}

fn assemble(n_system: usize, mu: (Probe, &Circuit), nu: (Probe, &Circuit), tau: f64, imaginary: bool) -> CorrelationCircuit {
    let mut stages = vec![
        Stage::Gates(probe_gate(n_system, GateKind::H, 0.0, "h")),
        Stage::Gates(mu.1.clone()),
        Stage::Evolve { adjoint: false },
        Stage::Gates(nu.1.clone()),
        Stage::Evolve { adjoint: true },
    ];
    if imaginary {
        stages.push(Stage::Gates(probe_gate(n_system, GateKind::RSigmaN, -FRAC_PI_2, "phase")));
    }
    stages.push(Stage::Gates(probe_gate(n_system, GateKind::H, 0.0, "h")));
    CorrelationCircuit { mu: mu.0, nu: nu.0, tau, imaginary, stages }
}

pub fn correlation_circuit(spec: &ClusterSpec, mu: Probe, nu: Probe, tau: f64, imaginary: bool) -> Result<CorrelationCircuit> {
    let pm = compile_controlled_probe(spec, mu.orbital, mu.kind)?;
    let pn = compile_controlled_probe(spec, nu.orbital, nu.kind)?;
    Ok(assemble(spec.n_qubits(), (mu, &pm), (nu, &pn), tau, imaginary))
}

fn check_density(rho: &CMatrix, n_system: usize) -> Result<()> {
    let d = 1usize << n_system;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::InvalidParameter(format!("state has dimension {}, expected {d}", rho.nrows())));
    }
    if !linalg::is_hermitian(rho, 1e-10) || (rho.trace() - 1.0).norm() > 1e-8 {
        return Err(Error::InvalidParameter("state is not a unit-trace Hermitian matrix".into()));
    }
    Ok(())
}

fn run_stages(stages: &[Stage], mut state: QuantumState, u: &CMatrix, u_dag: &CMatrix) -> Result<QuantumState> {
    for stage in stages {
        match stage {
            Stage::Gates(circ) => state.apply_circuit(circ)?,
            Stage::Evolve { adjoint } => state.apply_controlled_unitary(if *adjoint { u_dag } else { u })?,
        }
    }
    Ok(state)
}

impl CorrelationCircuit {
    /// `P(ℳ = 0)` starting from `|0⟩⟨0|_P ⊗ ρ` with `u = U(τ)`.
    pub fn probability_zero(&self, rho: &CMatrix, u: &CMatrix, u_dag: &CMatrix) -> Result<f64> {
        let state = run_stages(&self.stages, QuantumState::with_probe(rho)?, u, u_dag)?;
        Ok(state.probability_zero(state.n_qubits() - 1))
    }

    /// The whole circuit over the gate set, with compiled split steps for `U`.
    pub fn to_gates(&self, spec: &ClusterSpec, scheme: Scheme, dt: f64) -> Result<Circuit> {
        let blocks = SplitBlocks::new(spec)?;
        let sched = schedule(scheme, Nesting::default(), 1)?.simplify(&blocks.present());
        let step = step_circuit(spec, &sched, dt, Strategy::Exact)?;
        let n = step_count(self.tau, dt)?;
        let mut out = Circuit::new(spec.n_qubits(), dt, format!("correlation-{}-{}", self.mu, self.nu));
        for stage in &self.stages {
            let piece = match stage {
                Stage::Gates(circ) => circ.clone(),
                Stage::Evolve { adjoint } => {
                    let one = if *adjoint { step.inverse() } else { step.clone() };
                    let mut rep = Circuit::new(spec.n_qubits(), dt, "evolve");
                    for _ in 0..n {
                        rep.gates.extend(one.gates.iter().cloned());
                    }
                    rep
                }
            };
            out = out.then(&piece)?;
        }
        Ok(out)
    }
}

/// Samples of `C_μν` on a τ grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub mu: Probe,
    pub nu: Probe,
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// `0, step, …` up to `tau_max`.
pub fn uniform_grid(tau_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && tau_max.is_finite() && tau_max >= 0.0) {
        return Err(Error::InvalidParameter(format!("bad τ grid {tau_max} / {step}")));
    }
    let n = (tau_max / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| k as f64 * step).collect())
}

/// Measures correlation functions with cached probe circuits.
pub struct Correlator {
    n_system: usize,
    propagator: Propagator,
    probes: BTreeMap<Probe, Circuit>,
}

impl Correlator {
    pub fn new(spec: &ClusterSpec, evolution: Evolution) -> Result<Self> {
        let probes = Probe::all(spec.n_sites())
            .into_iter()
            .map(|p| Ok((p, compile_controlled_probe(spec, p.orbital, p.kind)?)))
            .collect::<Result<_>>()?;
        Ok(Correlator { n_system: spec.n_qubits(), propagator: Propagator::new(spec, evolution)?, probes })
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    fn circuit(&self, mu: Probe, nu: Probe, tau: f64, imaginary: bool) -> Result<CorrelationCircuit> {
        let get = |p: Probe| self.probes.get(&p).ok_or(Error::SiteOutOfRange { site: p.orbital.site, sites: self.n_system / 2 });
        Ok(assemble(self.n_system, (mu, get(mu)?), (nu, get(nu)?), tau, imaginary))
    }

    /// `C_μν` from the two Hadamard tests with a given `U` and `U†`.
    pub fn measure_with(&self, rho: &CMatrix, mu: Probe, nu: Probe, u: &CMatrix, u_dag: &CMatrix) -> Result<Complex64> {
        // The two variants share every stage before the final phase and H.
        let plain = self.circuit(mu, nu, 0.0, false)?;
        let shifted = self.circuit(mu, nu, 0.0, true)?;
        let shared = plain.stages.len() - 1;
        let state = run_stages(&plain.stages[..shared], QuantumState::with_probe(rho)?, u, u_dag)?;
        let p = self.n_system;
        let re = run_stages(&plain.stages[shared..], state.clone(), u, u_dag)?.probability_zero(p);
        let im = run_stages(&shifted.stages[shared..], state, u, u_dag)?.probability_zero(p);
        Ok(c(2.0 * (2.0 * re - 1.0), 2.0 * (2.0 * im - 1.0)))
    }

    pub fn measure(&self, rho: &CMatrix, mu: Probe, nu: Probe, tau: f64) -> Result<Complex64> {
        check_density(rho, self.n_system)?;
        let u = self.propagator.unitary(tau)?;
        self.measure_with(rho, mu, nu, &u, &u.adjoint())
    }

    /// One series per pair, in the order given; τ points run in parallel.
    pub fn series(&self, rho: &CMatrix, pairs: &[(Probe, Probe)], taus: &[f64]) -> Result<Vec<CorrelationSeries>> {
        check_density(rho, self.n_system)?;
        let rows: Vec<Vec<Complex64>> = taus
            .par_iter()
            .map(|&tau| {
                let u = self.propagator.unitary(tau)?;
                let u_dag = u.adjoint();
                pairs.iter().map(|&(mu, nu)| self.measure_with(rho, mu, nu, &u, &u_dag)).collect()
            })
            .collect::<Result<_>>()?;
        Ok(pairs
            .iter()
            .enumerate()
            .map(|(k, &(mu, nu))| CorrelationSeries { mu, nu, taus: taus.to_vec(), values: rows.iter().map(|r| r[k]).collect() })
            .collect())
    }
}

/// `C_μν(τ)` for one state and probe pair.
pub fn measure_c(spec: &ClusterSpec, rho: &CMatrix, mu: Probe, nu: Probe, tau: f64, evolution: Evolution) -> Result<Complex64> {
    Correlator::new(spec, evolution)?.measure(rho, mu, nu, tau)
}

/// Nambu components, first operator at time τ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Component {
    /// `⟨c_i(τ) c†_j⟩`
    CCdag,
    /// `⟨c†_i(τ) c_j⟩`
    CdagC,
    /// `⟨c_i(τ) c_j⟩`
    CC,
    /// `⟨c†_i(τ) c†_j⟩`
    CdagCdag,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::CCdag, Component::CdagC, Component::CC, Component::CdagCdag];

    pub fn name(self) -> &'static str {
        match self {
            Component::CCdag => "c_cdag",
            Component::CdagC => "cdag_c",
            Component::CC => "c_c",
            Component::CdagCdag => "cdag_cdag",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Component::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| Error::Parse(format!("unknown component `{s}`")))
    }
}

/// Nambu components from the probe correlators `⟨X_i(τ)X_j⟩`, `⟨Y_i(τ)Y_j⟩`,
/// `⟨Y_i(τ)X_j⟩` and `⟨X_i(τ)Y_j⟩`, in [`Component::ALL`] order.
///
/// With `c = (X − iY)/2` and `c† = (X + iY)/2`.
pub fn nambu_combine(xx: Complex64, yy: Complex64, yx: Complex64, xy: Complex64) -> [Complex64; 4] {
    [
        (xx + yy + I * xy - I * yx) * 0.25,
        (xx + yy - I * xy + I * yx) * 0.25,
        (xx - yy - I * xy - I * yx) * 0.25,
        (xx - yy + I * xy + I * yx) * 0.25,
    ]
}

/// Applies [`nambu_combine`] pointwise to vectors keyed by `(μ, ν)` that
/// are linear in `C_μν`, returning `(i, j, components)` for every pair of
/// orbitals seen in the keys.
fn recombine(table: &BTreeMap<(Probe, Probe), Vec<Complex64>>) -> Result<Vec<(Orbital, Orbital, [Vec<Complex64>; 4])>> {
    let orbitals: BTreeSet<Orbital> = table.keys().flat_map(|(a, b)| [a.orbital, b.orbital]).collect();
    let mut out = Vec::new();
    for &i in &orbitals {
        for &j in &orbitals {
            // ⟨A_i(τ) B_j⟩ = C_{μ = B_j, ν = A_i} / 2.
            let get = |a: ProbeKind, b: ProbeKind| -> Result<&Vec<Complex64>> {
                let key = (Probe::new(j, b), Probe::new(i, a));
                table.get(&key).ok_or_else(|| Error::InvalidParameter(format!("incomplete probe set: missing C[{}, {}]", key.0, key.1)))
            };
            use ProbeKind::{X, Y};
            let (xx, yy, yx, xy) = (get(X, X)?, get(Y, Y)?, get(Y, X)?, get(X, Y)?);
            let len = xx.len();
            if [yy.len(), yx.len(), xy.len()].iter().any(|&l| l != len) {
                return Err(Error::InvalidParameter(format!("probe series for ({i}, {j}) differ in length")));
            }
            let mut comps: [Vec<Complex64>; 4] = Default::default();
            for k in 0..len {
                let v = nambu_combine(xx[k] * 0.5, yy[k] * 0.5, yx[k] * 0.5, xy[k] * 0.5);
                for (dst, val) in comps.iter_mut().zip(v) {
                    dst.push(val);
                }
            }
            out.push((i, j, comps));
        }
    }
    Ok(out)
}

/// One Nambu component for an orbital pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NambuSeries {
    pub component: Component,
    pub i: Orbital,
    pub j: Orbital,
    pub taus: Vec<f64>,
    pub values: Vec<Complex64>,
}

fn keyed(series: &[CorrelationSeries]) -> Result<(Vec<f64>, BTreeMap<(Probe, Probe), Vec<Complex64>>)> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidParameter("incomplete probe set: no series".into()));
    };
    let mut table = BTreeMap::new();
    for s in series {
        if s.taus != first.taus {
            return Err(Error::InvalidParameter("probe series use different τ grids".into()));
        }
        table.insert((s.mu, s.nu), s.values.clone());
    }
    Ok((first.taus.clone(), table))
}

/// All four Nambu components for every orbital pair; needs all `4n²` series.
pub fn nambu_from_probes(series: &[CorrelationSeries]) -> Result<Vec<NambuSeries>> {
    let (taus, table) = keyed(series)?;
    let mut out = Vec::new();
    for (i, j, comps) in recombine(&table)? {
        for (component, values) in Component::ALL.into_iter().zip(comps) {
            out.push(NambuSeries { component, i, j, taus: taus.clone(), values });
        }
    }
    Ok(out)
}

/// Finite-difference weights for derivatives `0..=order` at 0 from samples
/// at `offsets`; `w[k][p]` multiplies the sample at `offsets[p]`.
pub fn fd_weights(offsets: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = offsets.len();
    let mut w = vec![vec![0.0; n]; order + 1];
    if n == 0 {
        return w;
    }
    w[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = offsets[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = offsets[i];
        for j in 0..i {
            let c3 = offsets[i] - offsets[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    w[k][i] = c1 * (k as f64 * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                w[k][j] = (c4 * w[k][j] - k as f64 * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    w
}

pub const DEFAULT_STENCIL_HALF_WIDTH: usize = 4;

/// `C^{(s)}` for `s ≤ s_max` from a centred window of `2h + 1` samples
/// at `τ = −h·step, …, h·step`.
pub fn finite_difference_moments(window: &[Complex64], step: f64, s_max: usize) -> Result<Vec<Complex64>> {
    if window.len() % 2 == 0 || window.len() < 3 {
        return Err(Error::InvalidParameter("centred window needs an odd number of at least 3 samples".into()));
    }
    let half = window.len() / 2;
    if s_max >= 2 * half {
        return Err(Error::InvalidParameter(format!("moment order {s_max} is beyond a {}-point stencil", window.len())));
    }
    let offsets: Vec<f64> = (0..window.len()).map(|k| (k as f64 - half as f64) * step).collect();
    let w = fd_weights(&offsets, s_max);
    Ok(w.iter().map(|row| row.iter().zip(window).map(|(&a, &f)| f * a).sum()).collect())
}

/// Centred window of `C_μν` from forward samples of `C_μν` and `C_νμ`,
/// using `C_μν(−τ) = conj C_νμ(τ)` for a stationary state.
pub fn symmetric_window(mu_nu: &[Complex64], nu_mu: &[Complex64], half: usize) -> Result<Vec<Complex64>> {
    if mu_nu.len() <= half || nu_mu.len() <= half {
        return Err(Error::InvalidParameter(format!("need {} forward samples for a half-width {half} stencil", half + 1)));
    }
    Ok((1..=half).rev().map(|k| nu_mu[k].conj()).chain(mu_nu[..=half].iter().copied()).collect())
}

fn uniform_step(taus: &[f64]) -> Result<f64> {
    if taus.len() < 2 || taus[0] != 0.0 {
        return Err(Error::InvalidParameter("τ grid must start at 0 with at least two points".into()));
    }
    let h = taus[1] - taus[0];
    if !(h > 0.0) || taus.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidParameter("τ grid must be uniform and increasing".into()));
    }
    Ok(h)
}

/// Finite-difference moments of every series whose transpose is present.
pub fn probe_moments(series: &[CorrelationSeries], s_max: usize, half: usize) -> Result<BTreeMap<(Probe, Probe), Vec<Complex64>>> {
    let (taus, table) = keyed(series)?;
    let h = uniform_step(&taus)?;
    let mut out = BTreeMap::new();
    for (&(mu, nu), values) in &table {
        let transposed =
            table.get(&(nu, mu)).ok_or_else(|| Error::InvalidParameter(format!("incomplete probe set: missing C[{nu}, {mu}]")))?;
        let window = symmetric_window(values, transposed, half)?;
        out.insert((mu, nu), finite_difference_moments(&window, h, s_max)?);
    }
    Ok(out)
}

/// Eigenbasis and Boltzmann weights of a Gibbs state.
pub struct ThermalSpectrum {
    pub eigen: HermitianEigen,
    pub populations: Vec<f64>,
}

impl ThermalSpectrum {
    pub fn new(h: &CMatrix, beta: f64) -> Result<Self> {
        let eigen = HermitianEigen::new(h);
        let diag = |rho: &CMatrix| -> Vec<f64> { (0..rho.nrows()).map(|k| rho[(k, k)].re).collect() };
        let rho = gibbs_from_eigen(&eigen, beta)?;
        let rotated = linalg::matmul(&eigen.vectors.adjoint(), &linalg::matmul(&rho, &eigen.vectors));
        Ok(ThermalSpectrum { populations: diag(&rotated), eigen })
    }

    pub fn for_spec(spec: &ClusterSpec, beta: f64) -> Result<Self> {
        linalg::check_dense(spec.n_qubits(), linalg::dense_limit())?;
        ThermalSpectrum::new(&HamiltonianBlocks::build(spec)?.full().to_dense()?, beta)
    }

    pub fn density(&self) -> CMatrix {
        let mut scaled = self.eigen.vectors.clone();
        for (k, &p) in self.populations.iter().enumerate() {
            for z in scaled.column_mut(k).iter_mut() {
                *z *= p;
            }
        }
        linalg::matmul_adjoint(&scaled, &self.eigen.vectors)
    }

    /// Lehmann weights of `C_μν` for dense probes `σμ`, `σν`.
    pub fn lehmann(&self, mu: &CMatrix, nu: &CMatrix) -> Lehmann {
        let v = &self.eigen.vectors;
        let to_eigen = |m: &CMatrix| linalg::matmul(&v.adjoint(), &linalg::matmul(m, v));
        let (am, an) = (to_eigen(mu), to_eigen(nu));
        let e = &self.eigen.values;
        let mut terms = Vec::new();
        for (n, &p) in self.populations.iter().enumerate() {
            if p < 1e-300 {
                continue;
            }
            for m in 0..e.len() {
                let a = an[(n, m)] * am[(m, n)] * (2.0 * p);
                if a.norm() > 1e-15 {
                    terms.push((e[m] - e[n], a));
                }
            }
        }
        Lehmann { terms }
    }
}

/// `C_μν(τ) = Σ A^{mn} e^{−i(E_m − E_n)τ}` with
/// `A^{mn} = 2 p_n ⟨n|σν|m⟩⟨m|σμ|n⟩`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lehmann {
    /// `(E_m − E_n, A^{mn})`.
    pub terms: Vec<(f64, Complex64)>,
}

impl Lehmann {
    pub fn correlation(&self, tau: f64) -> Complex64 {
        self.terms.iter().map(|&(de, a)| a * linalg::cis(-de * tau)).sum()
    }

    /// `C^{(s)} = (−i)^s Σ A^{mn} (E_m − E_n)^s`.
    pub fn moment(&self, s: usize) -> Complex64 {
        let sum: Complex64 = self.terms.iter().map(|&(de, a)| a * de.powi(s as i32)).sum();
        sum * (-I).powi(s as i32)
    }

    pub fn moments(&self, s_max: usize) -> Vec<Complex64> {
        (0..=s_max).map(|s| self.moment(s)).collect()
    }

    /// The moment series summed to all orders: `Σ A / (ω − (E_m − E_n) + iη)`.
    pub fn retarded(&self, eta: f64, omegas: &[f64]) -> Vec<Complex64> {
        omegas.iter().map(|&w| self.terms.iter().map(|&(de, a)| a / c(w - de, eta)).sum()).collect()
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidParameter(format!("η must be positive, got {eta}")));
    }
    Ok(())
}

/// `∫_0^L x^k e^{zx} dx` for `k = 0, 1, 2`.
fn exp_moments(z: Complex64, l: f64) -> [Complex64; 3] {
    if z.norm() * l < 1.0 {
        exp_moments_series(z, l)
    } else {
        exp_moments_closed(z, l)
    }
}

fn exp_moments_series(z: Complex64, l: f64) -> [Complex64; 3] {
    let mut out = [ZERO; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut term = c(l.powi(k as i32 + 1), 0.0);
        let mut sum = term / (k as f64 + 1.0);
        for j in 1..80 {
            term *= z * l / j as f64;
            let add = term / (j + k + 1) as f64;
            sum += add;
            if add.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        *slot = sum;
    }
    out
}

fn exp_moments_closed(z: Complex64, l: f64) -> [Complex64; 3] {
    let e = (z * l).exp();
    let i0 = (e - 1.0) / z;
    let i1 = (e * l - i0) / z;
    let i2 = (e * (l * l) - i1 * 2.0) / z;
    [i0, i1, i2]
}

/// Damped transform `G(ω) = −i ∫_0^{τ_max} e^{(iω − η)τ} C(τ) dτ` over the
/// sampled window, with `C` interpolated piecewise quadratically and the
/// exponential integrated exactly.
pub fn fourier_gf(taus: &[f64], values: &[Complex64], eta: f64, omegas: &[f64]) -> Result<Vec<Complex64>> {
    check_eta(eta)?;
    let h = uniform_step(taus)?;
    if values.len() != taus.len() {
        return Err(Error::DimensionMismatch { left: values.len(), right: taus.len() });
    }
    let n = taus.len() - 1;
    let pairs = n / 2;
    Ok(omegas
        .iter()
        .map(|&w| {
            let z = c(-eta, w);
            let [i0, i1, i2] = exp_moments(z, 2.0 * h);
            let w0 = i0 - i1 * (1.5 / h) + i2 * (0.5 / (h * h));
            let w1 = i1 * (2.0 / h) - i2 / (h * h);
            let w2 = i1 * (-0.5 / h) + i2 * (0.5 / (h * h));
            let hop = (z * (2.0 * h)).exp();
            let mut shift = c(1.0, 0.0);
            let mut acc = ZERO;
            for p in 0..pairs {
                let k = 2 * p;
                acc += shift * (w0 * values[k] + w1 * values[k + 1] + w2 * values[k + 2]);
                shift *= hop;
            }
            if n % 2 == 1 {
                let [j0, j1, _] = exp_moments(z, h);
                let shift = (z * taus[n - 1]).exp();
                let (f0, f1) = (values[n - 1], values[n]);
                acc += shift * (f0 * j0 + (f1 - f0) * (j1 / h));
            }
            -I * acc
        })
        .collect())
}

/// Truncated moment series `−i Σ_s C^{(s)} / (η − iω)^{s+1}`.
///
/// Converges where `|η − iω|` exceeds every excitation energy.
pub fn moment_series_gf(moments: &[Complex64], eta: f64, omegas: &[f64]) -> Result<Vec<Complex64>> {
    check_eta(eta)?;
    Ok(omegas
        .iter()
        .map(|&w| {
            let d = c(eta, -w);
            let mut pow = d;
            let mut acc = ZERO;
            for &m in moments {
                acc += m / pow;
                pow *= d;
            }
            -I * acc
        })
        .collect())
}

/// Local maxima of the spectral weight `−Im G / π` above a fraction of
/// the largest value.
pub fn spectral_peaks(omegas: &[f64], values: &[Complex64], rel_threshold: f64) -> Vec<f64> {
    let a: Vec<f64> = values.iter().map(|z| -z.im / std::f64::consts::PI).collect();
    let top = a.iter().copied().fold(0.0, f64::max);
    (1..a.len().saturating_sub(1))
        .filter(|&k| a[k] > a[k - 1] && a[k] >= a[k + 1] && a[k] > rel_threshold * top)
        .map(|k| omegas[k])
        .collect()
}

/// `points` evenly spaced values from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    pub eta: f64,
    pub omegas: Vec<f64>,
    pub s_max: usize,
    pub stencil_half_width: usize,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig { eta: 0.05, omegas: linspace(-8.0, 8.0, 801), s_max: 2, stencil_half_width: DEFAULT_STENCIL_HALF_WIDTH }
    }
}

/// `G^R` or moments of one Nambu component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NambuEntry {
    pub component: Component,
    pub i: Orbital,
    pub j: Orbital,
    pub values: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensData {
    pub eta: f64,
    pub omegas: Vec<f64>,
    /// `G^R(ω)` on `omegas` from the damped transform.
    pub greens: Vec<NambuEntry>,
    /// Finite-difference `C^{(s)}`, `s = 0..=s_max`.
    pub moments: Vec<NambuEntry>,
}

impl GreensData {
    pub fn get(&self, component: Component, i: Orbital, j: Orbital) -> Option<&NambuEntry> {
        self.greens.iter().find(|e| e.component == component && e.i == i && e.j == j)
    }
}

fn entries(table: &BTreeMap<(Probe, Probe), Vec<Complex64>>) -> Result<Vec<NambuEntry>> {
    let mut out = Vec::new();
    for (i, j, comps) in recombine(table)? {
        for (component, values) in Component::ALL.into_iter().zip(comps) {
            out.push(NambuEntry { component, i, j, values });
        }
    }
    Ok(out)
}

/// Nambu `G^R` by the damped transform, and Nambu moments by finite
/// differences, from a complete probe set.
pub fn retarded_gf(series: &[CorrelationSeries], config: &SpectralConfig) -> Result<GreensData> {
    check_eta(config.eta)?;
    let transformed: Vec<((Probe, Probe), Vec<Complex64>)> = series
        .par_iter()
        .map(|s| Ok(((s.mu, s.nu), fourier_gf(&s.taus, &s.values, config.eta, &config.omegas)?)))
        .collect::<Result<_>>()?;
    let greens = entries(&transformed.into_iter().collect())?;
    let moments = entries(&probe_moments(series, config.s_max, config.stencil_half_width)?)?;
    Ok(GreensData { eta: config.eta, omegas: config.omegas.clone(), greens, moments })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub beta: f64,
    pub tau_max: f64,
    pub tau_step: f64,
    pub evolution: Evolution,
    pub spectral: SpectralConfig,
}

impl PipelineConfig {
    pub fn new(beta: f64) -> Self {
        PipelineConfig { beta, tau_max: 50.0, tau_step: 0.05, evolution: Evolution::Exact, spectral: SpectralConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub series: Vec<CorrelationSeries>,
    pub nambu: Vec<NambuSeries>,
    pub greens: GreensData,
}

/// Gibbs state, all `4n²` probe series, Nambu components and `G^R`.
pub fn run_pipeline(spec: &ClusterSpec, config: &PipelineConfig) -> Result<PipelineOutput> {
    let rho = ThermalSpectrum::for_spec(spec, config.beta)?.density();
    let taus = uniform_grid(config.tau_max, config.tau_step)?;
    let correlator = Correlator::new(spec, config.evolution)?;
    let series = correlator.series(&rho, &Probe::all_pairs(spec.n_sites()), &taus)?;
    let nambu = nambu_from_probes(&series)?;
    let greens = retarded_gf(&series, &config.spectral)?;
    Ok(PipelineOutput { series, nambu, greens })
}

pub const CORRELATION_CSV_HEADER: &str = "mu_site,mu_spin,mu_kind,nu_site,nu_spin,nu_kind,tau,re,im";
pub const GREENS_CSV_HEADER: &str = "component,i,j,spin_i,spin_j,omega,re,im";

pub fn correlation_csv(series: &[CorrelationSeries], header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str(CORRELATION_CSV_HEADER);
        out.push('\n');
    }
    for s in series {
        let (m, n) = (s.mu, s.nu);
        for (tau, v) in s.taus.iter().zip(&s.values) {
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.6},{:.12e},{:.12e}\n",
                m.orbital.site,
                m.orbital.spin,
                m.kind.name(),
                n.orbital.site,
                n.orbital.spin,
                n.kind.name(),
                tau,
                v.re,
                v.im
            ));
        }
    }
    out
}

pub fn greens_csv(data: &GreensData, header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str(GREENS_CSV_HEADER);
        out.push('\n');
    }
    for e in &data.greens {
        for (w, v) in data.omegas.iter().zip(&e.values) {
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{:.12e},{:.12e}\n",
                e.component, e.i.site, e.j.site, e.i.spin, e.j.spin, w, v.re, v.im
            ));
        }
    }
    out
}
