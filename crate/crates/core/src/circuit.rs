//! Gates and circuits over the restricted gate set.
//!
//! System qubits are `0..n_system`; the probe qubit P is `n_system`.
//! Controlled gates are always controlled by P.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, cis, CMatrix, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    /// Hadamard.
    H,
    /// `(1/√2)[[1, −i], [1, i]]`, cycling X → Y → Z → X under conjugation.
    J,
    Jdag,
    /// `e^{−iΘ σn} = diag(e^{−iΘ}, 1)`.
    RSigmaN,
    /// `e^{−iΘX}`.
    RSigmaX,
    /// `e^{−iΘY}`.
    RSigmaY,
    /// `e^{iΘ/2} e^{−iΘY/2}`.
    RSigmaU,
    PlusISwap,
    MinusISwap,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 10] = [
        GateKind::H,
        GateKind::J,
        GateKind::Jdag,
        GateKind::RSigmaN,
        GateKind::RSigmaX,
        GateKind::RSigmaY,
        GateKind::RSigmaU,
        GateKind::PlusISwap,
        GateKind::MinusISwap,
        GateKind::Swap,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::PlusISwap | GateKind::MinusISwap | GateKind::Swap => 2,
            _ => 1,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::RSigmaN | GateKind::RSigmaX | GateKind::RSigmaY | GateKind::RSigmaU)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::J => "j",
            GateKind::Jdag => "jdag",
            GateKind::RSigmaN => "rz-n",
            GateKind::RSigmaX => "rx",
            GateKind::RSigmaY => "ry",
            GateKind::RSigmaU => "ry-u",
            GateKind::PlusISwap => "iswap+",
            GateKind::MinusISwap => "iswap-",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Gate matrix; two-qubit matrices index `b_lo + 2 b_hi`.
    pub fn matrix(self, theta: f64) -> CMatrix {
        let s = FRAC_1_SQRT_2;
        let (cs, sn) = (theta.cos(), theta.sin());
        match self {
            GateKind::H => CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]),
            GateKind::J => CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, -s), c(s, 0.0), c(0.0, s)]),
            GateKind::Jdag => GateKind::J.matrix(0.0).adjoint(),
            GateKind::RSigmaN => CMatrix::from_row_slice(2, 2, &[cis(-theta), ZERO, ZERO, ONE]),
            GateKind::RSigmaX => CMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(0.0, -sn), c(0.0, -sn), c(cs, 0.0)]),
            GateKind::RSigmaY => CMatrix::from_row_slice(2, 2, &[c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)]),
            GateKind::RSigmaU => {
                let (ch, sh) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                let ph = cis(theta / 2.0);
                CMatrix::from_row_slice(2, 2, &[ph * ch, -ph * sh, ph * sh, ph * ch])
            }
            GateKind::PlusISwap | GateKind::MinusISwap => {
                let off = if self == GateKind::PlusISwap { I } else { -I };
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(3, 3)] = ONE;
                m[(1, 2)] = off;
                m[(2, 1)] = off;
                m
            }
            GateKind::Swap => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(3, 3)] = ONE;
                m[(1, 2)] = ONE;
                m[(2, 1)] = ONE;
                m
            }
        }
    }
}

/// One gate; `targets` are absolute qubit indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GateDocument", into = "GateDocument")]
pub struct Gate {
    pub kind: GateKind,
    pub theta: f64,
    pub targets: Vec<usize>,
    pub controlled: bool,
}

impl Gate {
    /// P-controlled single-qubit gate without an angle.
    pub fn c1(kind: GateKind, q: usize) -> Self {
        Gate { kind, theta: 0.0, targets: vec![q], controlled: true }
    }

    /// P-controlled rotation.
    pub fn crot(kind: GateKind, q: usize, theta: f64) -> Self {
        Gate { kind, theta, targets: vec![q], controlled: true }
    }

    /// P-controlled ±iSWAP on `(lo, lo + 1)`.
    pub fn ciswap(plus: bool, lo: usize) -> Self {
        let kind = if plus { GateKind::PlusISwap } else { GateKind::MinusISwap };
        Gate { kind, theta: 0.0, targets: vec![lo, lo + 1], controlled: true }
    }

    /// Uncontrolled gate.
    pub fn plain(kind: GateKind, targets: Vec<usize>, theta: f64) -> Self {
        Gate { kind, theta, targets, controlled: false }
    }

    pub fn matrix(&self) -> CMatrix {
        self.kind.matrix(self.theta)
    }

    pub fn inverse(&self) -> Gate {
        let (kind, theta) = match self.kind {
            GateKind::J => (GateKind::Jdag, 0.0),
            GateKind::Jdag => (GateKind::J, 0.0),
            GateKind::PlusISwap => (GateKind::MinusISwap, 0.0),
            GateKind::MinusISwap => (GateKind::PlusISwap, 0.0),
            k if k.has_angle() => (k, -self.theta),
            k => (k, 0.0),
        };
        Gate { kind, theta, targets: self.targets.clone(), controlled: self.controlled }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// Name as written in circuit files, `c-` marking control on P.
    pub fn label(&self) -> String {
        if self.controlled {
            format!("c-{}", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.label(), self.targets)?;
        if self.kind.has_angle() {
            write!(f, "({})", self.theta)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct GateDocument {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    targets: Vec<usize>,
}

impl TryFrom<GateDocument> for Gate {
    type Error = Error;
    fn try_from(d: GateDocument) -> Result<Self> {
        let (controlled, name) = match d.kind.strip_prefix("c-") {
            Some(rest) => (true, rest),
            None => (false, d.kind.as_str()),
        };
        let kind = GateKind::from_name(name).ok_or_else(|| Error::Parse(format!("unknown gate kind `{}`", d.kind)))?;
        if d.targets.len() != kind.arity() {
            return Err(Error::Parse(format!("gate `{}` expects {} targets", d.kind, kind.arity())));
        }
        let theta = match (kind.has_angle(), d.theta) {
            (true, Some(t)) if t.is_finite() => t,
            (true, _) => return Err(Error::Parse(format!("gate `{}` needs a finite theta", d.kind))),
            (false, _) => 0.0,
        };
        Ok(Gate { kind, theta, targets: d.targets, controlled })
    }
}

impl From<Gate> for GateDocument {
    fn from(g: Gate) -> Self {
        GateDocument { kind: g.label(), theta: g.kind.has_angle().then_some(g.theta), targets: g.targets }
    }
}

/// An ordered gate list; the first gate acts first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_system: usize,
    pub dt: f64,
    pub label: String,
    pub gates: Vec<Gate>,
}

/// A gate that breaks a layout or gate-set rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub gate: Gate,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gate {} ({}): {}", self.index, self.gate, self.reason)
    }
}

/// Gate counts of a circuit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateCounts {
    pub total: usize,
    pub c_sqg: usize,
    pub c_iswap_plus: usize,
    pub c_iswap_minus: usize,
    pub sqg_on_p: usize,
    pub by_kind: BTreeMap<String, usize>,
}

impl GateCounts {
    pub fn c_iswap(&self) -> usize {
        self.c_iswap_plus + self.c_iswap_minus
    }

    pub fn add(&mut self, other: &GateCounts) {
        self.total += other.total;
        self.c_sqg += other.c_sqg;
        self.c_iswap_plus += other.c_iswap_plus;
        self.c_iswap_minus += other.c_iswap_minus;
        self.sqg_on_p += other.sqg_on_p;
        for (k, v) in &other.by_kind {
            *self.by_kind.entry(k.clone()).or_default() += v;
        }
    }
}

impl Circuit {
    pub fn new(n_system: usize, dt: f64, label: impl Into<String>) -> Self {
        Circuit { n_system, dt, label: label.into(), gates: Vec::new() }
    }

    /// Total qubits including P.
    pub fn n_qubits(&self) -> usize {
        self.n_system + 1
    }

    pub fn control(&self) -> usize {
        self.n_system
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.n_system != other.n_system {
            return Err(Error::DimensionMismatch { left: self.n_system, right: other.n_system });
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    /// The reversed circuit of inverse gates.
    pub fn inverse(&self) -> Circuit {
        let mut out = Circuit::new(self.n_system, -self.dt, format!("{}^-1", self.label));
        out.gates = self.gates.iter().rev().map(Gate::inverse).collect();
        out
    }

    pub fn counts(&self) -> GateCounts {
        let mut counts = GateCounts { total: self.gates.len(), ..Default::default() };
        for g in &self.gates {
            *counts.by_kind.entry(g.label()).or_default() += 1;
            match (g.controlled, g.kind) {
                (true, GateKind::PlusISwap) => counts.c_iswap_plus += 1,
                (true, GateKind::MinusISwap) => counts.c_iswap_minus += 1,
                (true, k) if k.arity() == 1 => counts.c_sqg += 1,
                (false, k) if k.arity() == 1 && g.targets == [self.n_system] => counts.sqg_on_p += 1,
                _ => {}
            }
        }
        counts
    }

    /// Every two-qubit gate acts on adjacent system qubits and every target
    /// is in range.
    pub fn validate_adjacency(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (index, g) in self.gates.iter().enumerate() {
            let reason = if let Some(&q) = g.targets.iter().find(|&&q| q > self.n_system) {
                Some(format!("qubit {q} out of range"))
            } else if g.is_two_qubit() {
                let (a, b) = (g.targets[0], g.targets[1]);
                if a.max(b) >= self.n_system {
                    Some("two-qubit gate touches the probe qubit".to_string())
                } else if a.abs_diff(b) != 1 {
                    Some(format!("qubits {a} and {b} are not adjacent"))
                } else {
                    None
                }
            } else {
                None
            };
            if let Some(reason) = reason {
                out.push(Violation { index, gate: g.clone(), reason });
            }
        }
        out
    }

    /// Adjacency plus the gate-set rule: single-qubit gates on P, controlled
    /// single-qubit gates and controlled ±iSWAPs on system qubits, no SWAP.
    pub fn validate_gate_set(&self) -> Vec<Violation> {
        let mut out = self.validate_adjacency();
        for (index, g) in self.gates.iter().enumerate() {
            let reason = match (g.controlled, g.kind) {
                (_, GateKind::Swap) => Some("SWAP is outside the compiled gate set"),
                (false, k) if k.arity() == 2 => Some("uncontrolled two-qubit gate"),
                (false, _) if g.targets != [self.n_system] => Some("uncontrolled gate on a system qubit"),
                (true, _) if g.targets.contains(&self.n_system) => Some("controlled gate targets the probe qubit"),
                _ => None,
            };
            if let Some(reason) = reason {
                out.push(Violation { index, gate: g.clone(), reason: reason.to_string() });
            }
        }
        out.sort_by_key(|v| v.index);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance, identity, is_unitary};

    #[test]
    fn all_gate_matrices_are_unitary() {
        for k in GateKind::ALL {
            assert!(is_unitary(&k.matrix(0.37), 1e-14), "{k:?}");
        }
    }

    #[test]
    fn inverse_gates_cancel() {
        for k in GateKind::ALL {
            let g = Gate { kind: k, theta: 0.81, targets: vec![0; k.arity()], controlled: true };
            let prod = g.inverse().matrix() * g.matrix();
            assert!(distance(&prod, &identity(prod.nrows())) < 1e-14, "{k:?}");
        }
    }

    #[test]
    fn json_kind_names() {
        let mut circ = Circuit::new(8, 0.01, "kin");
        circ.push(Gate::ciswap(false, 2));
        circ.push(Gate::crot(GateKind::RSigmaN, 4, -0.08));
        let text = serde_json::to_string(&circ).unwrap();
        assert_eq!(
            text,
            r#"{"n_system":8,"dt":0.01,"label":"kin","gates":[{"kind":"c-iswap-","targets":[2,3]},{"kind":"c-rz-n","theta":-0.08,"targets":[4]}]}"#
        );
        assert_eq!(Circuit::from_json(&text).unwrap(), circ);
    }

    #[test]
    fn json_rejects_missing_angle() {
        let text = r#"{"n_system":2,"dt":0.1,"label":"x","gates":[{"kind":"c-rx","targets":[0]}]}"#;
        assert!(Circuit::from_json(text).is_err());
    }

    #[test]
    fn adjacency_violations() {
        let mut circ = Circuit::new(4, 0.1, "x");
        assert!(circ.validate_adjacency().is_empty());
        circ.push(Gate { kind: GateKind::PlusISwap, theta: 0.0, targets: vec![0, 2], controlled: true });
        let v = circ.validate_adjacency();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].index, 0);
    }
}
