//! Resource counts for a cluster.
//!
//! Closed-form columns are computed from the orbital count. Per-step gate
//! counts come from emitting the template circuits and counting gates, so
//! they hold for any geometry. Published reference values are attached
//! where known and any disagreement is listed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{compile_term, Strategy, Term};
use crate::circuit::{Circuit, GateCounts};
use crate::cluster_hamiltonian::ClusterSpec;
use crate::error::Result;

/// One row of published reference values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReferenceRow {
    pub geometry: &'static str,
    pub orbitals: usize,
    pub qubits: usize,
    pub correlators: usize,
    pub tune_c_sqg: usize,
    pub tune_c_iswap: usize,
    pub hopping_gates: usize,
}

const fn row(
    geometry: &'static str,
    orbitals: usize,
    correlators: usize,
    tune_c_sqg: usize,
    tune_c_iswap: usize,
    hopping_gates: usize,
) -> ReferenceRow {
    ReferenceRow { geometry, orbitals, qubits: orbitals + 1, correlators, tune_c_sqg, tune_c_iswap, hopping_gates }
}

pub const REFERENCE_VALUES: [ReferenceRow; 9] = [
    row("1d:2", 4, 64, 28, 6, 24),
    row("1d:3", 6, 144, 42, 10, 48),
    row("1d:4", 8, 256, 56, 14, 72),
    row("2x2", 8, 256, 56, 14, 96),
    row("3x3", 18, 1296, 126, 34, 336),
    row("4x4", 32, 4096, 224, 62, 768),
    row("2x2x2", 16, 1024, 112, 30, 416),
    row("3x3x3", 54, 11664, 378, 106, 2736),
    row("4x4x4", 128, 65536, 896, 254, 10368),
];

pub fn reference_row(geometry: &str) -> Option<ReferenceRow> {
    REFERENCE_VALUES.iter().copied().find(|r| r.geometry == geometry)
}

/// Distinct tunable gates appearing in emitted circuits.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TuningCounts {
    /// Distinct `(kind, qubit)` controlled single-qubit gates.
    pub c_sqg: usize,
    /// Distinct `(sign, pair)` controlled iSWAPs.
    pub c_iswap: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResourceReport {
    pub geometry: String,
    pub orbitals: usize,
    /// `log2` of the Hilbert-space dimension, i.e. `orbitals`.
    pub hilbert_dim_log2: usize,
    pub hilbert_dim: f64,
    pub qubits: usize,
    pub correlators: usize,
    pub tune_c_sqg: usize,
    pub tune_c_iswap: usize,
    pub tuning_emitted: TuningCounts,
    /// `Σ_bonds,spins (6 + 4m)` with `m` half the string's qubit span.
    pub hopping_gates_formula: usize,
    pub hopping_gates_emitted: usize,
    pub terms: BTreeMap<String, GateCounts>,
    pub step_total: GateCounts,
    pub reference: Option<ReferenceRow>,
    pub mismatches: Vec<String>,
}

fn tuning(circuits: &[Circuit]) -> TuningCounts {
    let mut sqg = BTreeSet::new();
    let mut iswap = BTreeSet::new();
    for g in circuits.iter().flat_map(|c| c.gates.iter()).filter(|g| g.controlled) {
        if g.is_two_qubit() {
            iswap.insert((g.kind.name(), g.targets.clone()));
        } else {
            sqg.insert((g.kind.name(), g.targets[0]));
        }
    }
    TuningCounts { c_sqg: sqg.len(), c_iswap: iswap.len() }
}

pub fn count_resources(spec: &ClusterSpec) -> Result<ResourceReport> {
    spec.validate()?;
    let n = spec.n_qubits();
    let circuits: Vec<Circuit> =
        Term::present(spec).into_iter().map(|t| compile_term(spec, t, 1.0, Strategy::Templates)).collect::<Result<_>>()?;
    let mut terms = BTreeMap::new();
    let mut step_total = GateCounts::default();
    for c in &circuits {
        let counts = c.counts();
        step_total.add(&counts);
        terms.insert(c.label.clone(), counts);
    }
    let hopping_gates_emitted = terms.get(Term::Hopping.name()).map_or(0, |c| c.total);
    let hopping_gates_formula = 2 * spec.geometry.bonds().iter().map(|b| 6 + 4 * b.span()).sum::<usize>();
    let geometry = spec.geometry.to_string();
    let mut report = ResourceReport {
        orbitals: n,
        hilbert_dim_log2: n,
        hilbert_dim: 2f64.powi(n as i32),
        qubits: n + 1,
        correlators: 4 * n * n,
        tune_c_sqg: 7 * n,
        tune_c_iswap: 2 * n - 2,
        tuning_emitted: tuning(&circuits),
        hopping_gates_formula,
        hopping_gates_emitted,
        terms,
        step_total,
        reference: reference_row(&geometry),
        mismatches: Vec::new(),
        geometry,
    };
    report.mismatches = mismatches(&report);
    Ok(report)
}

fn mismatches(r: &ResourceReport) -> Vec<String> {
    let Some(reference) = r.reference else { return Vec::new() };
    let pairs = [
        ("orbitals", r.orbitals, reference.orbitals),
        ("qubits", r.qubits, reference.qubits),
        ("correlators", r.correlators, reference.correlators),
        ("tune_c_sqg", r.tune_c_sqg, reference.tune_c_sqg),
        ("tune_c_iswap", r.tune_c_iswap, reference.tune_c_iswap),
        ("hopping_gates", r.hopping_gates_emitted, reference.hopping_gates),
    ];
    pairs
        .iter()
        .filter(|(_, ours, theirs)| ours != theirs)
        .map(|(name, ours, theirs)| format!("{name}: emitted {ours}, reference {theirs}"))
        .collect()
}

fn hilbert_text(log2: usize) -> String {
    if log2 < 53 {
        format!("{}", 1u64 << log2)
    } else {
        format!("{:.1e}", 2f64.powi(log2 as i32))
    }
}

/// Aligned text table, one row per report.
pub fn render_table(reports: &[ResourceReport]) -> String {
    let header = [
        "geometry",
        "orbitals",
        "hilbert_dim",
        "qubits",
        "correlators",
        "tune_c_sqg",
        "tune_c_iswap",
        "hopping_gates",
        "reference",
        "flag",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let reference = r.reference.map_or("-".to_string(), |x| x.hopping_gates.to_string());
            let flag = if r.mismatches.is_empty() { "" } else { "MISMATCH" };
            vec![
                r.geometry.clone(),
                r.orbitals.to_string(),
                hilbert_text(r.hilbert_dim_log2),
                r.qubits.to_string(),
                r.correlators.to_string(),
                r.tune_c_sqg.to_string(),
                r.tune_c_iswap.to_string(),
                r.hopping_gates_emitted.to_string(),
                reference,
                flag.to_string(),
            ]
        })
        .collect();
    let widths: Vec<usize> =
        (0..header.len()).map(|k| rows.iter().map(|r| r[k].len()).chain([header[k].len()]).max().unwrap_or(0)).collect();
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for r in &rows {
        line(r.iter().map(String::as_str).collect(), &mut out);
    }
    out
}
