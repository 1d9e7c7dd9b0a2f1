//! Compilation of Hamiltonian blocks into the probe-controlled gate set.
//!
//! Every compiled term implements `e^{−i dt G}` on the branch where the
//! probe is |1⟩, with `G` the generator returned by [`generator`]:
//!
//! | term        | `G`             |
//! |-------------|-----------------|
//! | local       | `−local − af`   |
//! | interaction | `int`           |
//! | hopping     | `kin`           |
//! | spair       | `−s_pair`       |
//! | dpair       | `−d_pair`       |

pub mod clifford;
pub mod network;
pub mod passes;
pub mod resources;
pub mod templates;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::cluster_hamiltonian::{build_af, build_d_pair, build_int, build_kin, build_local, build_s_pair, d_wave_sign, ClusterSpec};
use crate::error::{Error, Result};
use crate::jordan_wigner::{d_local, d_string, hermitian_probe, t_string, Orbital, ProbeKind, Spin};
use crate::linalg::distance;
use crate::pauli_algebra::PauliSum;
use crate::statevector_sim::{circuit_branch_unitary, exact_unitary};

use self::clifford::Tracked;
use self::network::{d_pair_form, down_mask, emit_quadratic, kin_form};
use self::templates::{emit_interaction, emit_number_phase, emit_pauli, emit_split, emit_tight, rotations};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Local,
    Interaction,
    Hopping,
    SPair,
    DPair,
}

impl Term {
    pub const ALL: [Term; 5] = [Term::Local, Term::Interaction, Term::Hopping, Term::SPair, Term::DPair];

    pub fn name(self) -> &'static str {
        match self {
            Term::Local => "local",
            Term::Interaction => "interaction",
            Term::Hopping => "hopping",
            Term::SPair => "spair",
            Term::DPair => "dpair",
        }
    }

    /// Terms present for a cluster; `dpair` only in two dimensions.
    pub fn present(spec: &ClusterSpec) -> Vec<Term> {
        Term::ALL.into_iter().filter(|&t| t != Term::DPair || spec.has_d_pair()).collect()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Term::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::Parse(format!("unknown term `{s}`")))
    }
}

/// How terms with non-commuting pieces are compiled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// One template per bond or site, in a fixed order. Exact only when
    /// the pieces commute; this is the variant whose gate counts are
    /// reported by the resource estimator.
    Templates,
    /// Templates when the pieces commute, otherwise a Givens network for
    /// the quadratic form. Always exact.
    #[default]
    Exact,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Templates => "templates",
            Strategy::Exact => "exact",
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "templates" => Ok(Strategy::Templates),
            "exact" => Ok(Strategy::Exact),
            _ => Err(Error::Parse(format!("unknown strategy `{s}`"))),
        }
    }
}

/// The generator `G` a compiled term exponentiates.
pub fn generator(spec: &ClusterSpec, term: Term) -> Result<PauliSum> {
    spec.validate()?;
    Ok(match term {
        Term::Local => -&(&build_local(spec)? + &build_af(spec)?),
        Term::Interaction => build_int(spec)?,
        Term::Hopping => build_kin(spec)?,
        Term::SPair => build_s_pair(spec)?.scale_real(-1.0),
        Term::DPair => build_d_pair(spec)?.scale_real(-1.0),
    })
}

/// Template pieces of a string term, one per bond and spin or per site.
pub fn units(spec: &ClusterSpec, term: Term) -> Result<Vec<PauliSum>> {
    spec.validate()?;
    let l = spec.n_sites();
    let mut out = Vec::new();
    match term {
        Term::Hopping => {
            for b in spec.geometry.bonds() {
                for spin in Spin::ALL {
                    out.push(t_string(b.i, b.j, spin, l)?.scale_real(-spec.t));
                }
            }
        }
        Term::SPair => {
            for i in 1..=l {
                out.push(d_local(i, l)?.scale_real(-spec.delta_s));
            }
        }
        Term::DPair => {
            if !spec.has_d_pair() {
                return Err(Error::Unsupported(format!("d-wave pairing needs a 2D cluster, got {}", spec.geometry)));
            }
            for b in spec.geometry.bonds() {
                let w = spec.delta_d * d_wave_sign(&b) / 2.0;
                for spin in Spin::ALL {
                    out.push(d_string(b.i, b.j, spin, l)?.scale_real(-w * spin.sign()));
                }
            }
        }
        Term::Local | Term::Interaction => {
            return Err(Error::Unsupported(format!("{term} is compiled per qubit, not from string units")));
        }
    }
    Ok(out.into_iter().filter(|u| !u.is_zero()).collect())
}

/// Whether every pair of units commutes, so their templates multiply exactly.
pub fn units_commute(units: &[PauliSum]) -> Result<bool> {
    for (k, a) in units.iter().enumerate() {
        for b in &units[k + 1..] {
            if !a.commutator(b)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn new_circuit(spec: &ClusterSpec, dt: f64, label: &str) -> Circuit {
    Circuit::new(spec.n_qubits(), dt, label)
}

/// `e^{+i dt (local + af)}`: one `c-R_σn` per orbital.
pub fn compile_local_af(spec: &ClusterSpec, dt: f64) -> Result<Circuit> {
    spec.validate()?;
    let mut circ = new_circuit(spec, dt, "local");
    for orb in Orbital::all(spec.n_sites()) {
        let energy = spec.mu_p + spec.geometry.af_sign(orb.site) * orb.spin.sign() * spec.m_p;
        emit_number_phase(&mut circ, orb.qubit(), -dt * energy);
    }
    Ok(circ)
}

/// `e^{−i dt int}`.
pub fn compile_interaction(spec: &ClusterSpec, dt: f64) -> Result<Circuit> {
    spec.validate()?;
    let mut circ = new_circuit(spec, dt, "interaction");
    for i in 1..=spec.n_sites() {
        emit_interaction(&mut circ, Orbital::up(i).qubit(), spec.u * dt)?;
    }
    Ok(circ)
}

fn compile_units(spec: &ClusterSpec, term: Term, dt: f64, tight: bool) -> Result<Circuit> {
    let mut circ = new_circuit(spec, dt, term.name());
    for unit in units(spec, term)? {
        let rots = rotations(&unit, dt)?;
        if tight {
            emit_tight(&mut circ, &rots)?;
        } else {
            emit_split(&mut circ, &rots)?;
        }
    }
    Ok(circ)
}

fn use_network(spec: &ClusterSpec, term: Term, strategy: Strategy) -> Result<bool> {
    Ok(strategy == Strategy::Exact && !units_commute(&units(spec, term)?)?)
}

/// `e^{−i dt kin}`.
pub fn compile_hopping(spec: &ClusterSpec, dt: f64, strategy: Strategy) -> Result<Circuit> {
    if use_network(spec, Term::Hopping, strategy)? {
        let mut circ = new_circuit(spec, dt, "hopping");
        emit_quadratic(&mut circ, &kin_form(spec), &vec![false; spec.n_qubits()], dt)?;
        return Ok(circ);
    }
    compile_units(spec, Term::Hopping, dt, true)
}

/// `e^{+i dt s_pair}`.
pub fn compile_s_pair(spec: &ClusterSpec, dt: f64) -> Result<Circuit> {
    compile_units(spec, Term::SPair, dt, false)
}

/// `e^{+i dt d_pair}`; two-dimensional clusters only.
pub fn compile_d_pair(spec: &ClusterSpec, dt: f64, strategy: Strategy) -> Result<Circuit> {
    if use_network(spec, Term::DPair, strategy)? {
        let mut circ = new_circuit(spec, dt, "dpair");
        let form = d_pair_form(spec)?.scaled(-1.0);
        emit_quadratic(&mut circ, &form, &down_mask(spec.n_qubits()), dt)?;
        return Ok(circ);
    }
    compile_units(spec, Term::DPair, dt, false)
}

pub fn compile_term(spec: &ClusterSpec, term: Term, dt: f64, strategy: Strategy) -> Result<Circuit> {
    match term {
        Term::Local => compile_local_af(spec, dt),
        Term::Interaction => compile_interaction(spec, dt),
        Term::Hopping => compile_hopping(spec, dt, strategy),
        Term::SPair => compile_s_pair(spec, dt),
        Term::DPair => compile_d_pair(spec, dt, strategy),
    }
}

/// `e^{−i dt (kin − d_pair)}` as one circuit.
///
/// The exact strategy propagates the combined quadratic form in a single
/// network; templates concatenate the hopping and pairing circuits.
pub fn compile_kd(spec: &ClusterSpec, dt: f64, strategy: Strategy) -> Result<Circuit> {
    let mut circ = new_circuit(spec, dt, "kd");
    match strategy {
        Strategy::Exact => {
            let mut form = kin_form(spec);
            let mut mask = vec![false; spec.n_qubits()];
            if spec.has_d_pair() {
                form.extend(&d_pair_form(spec)?.scaled(-1.0));
                mask = down_mask(spec.n_qubits());
            }
            emit_quadratic(&mut circ, &form, &mask, dt)?;
        }
        Strategy::Templates => {
            circ = circ.then(&compile_hopping(spec, dt, strategy)?)?;
            if spec.has_d_pair() {
                circ = circ.then(&compile_d_pair(spec, dt, strategy)?)?;
            }
        }
    }
    Ok(circ)
}

/// `e^{−i dt (int − local − af)}`.
pub fn compile_z(spec: &ClusterSpec, dt: f64) -> Result<Circuit> {
    let mut circ = compile_local_af(spec, dt)?.then(&compile_interaction(spec, dt)?)?;
    circ.label = "z".into();
    Ok(circ)
}

/// Frobenius distance between a compiled term and `c-e^{−i dt G}`.
///
/// The P = 0 blocks of both are the identity, so the distance is taken
/// on the P = 1 branch; `dt` is read from the circuit.
pub fn term_distance(spec: &ClusterSpec, term: Term, circuit: &Circuit) -> Result<f64> {
    if circuit.n_system != spec.n_qubits() {
        return Err(Error::DimensionMismatch { left: circuit.n_system, right: spec.n_qubits() });
    }
    let exact = exact_unitary(&generator(spec, term)?, circuit.dt)?;
    Ok(distance(&circuit_branch_unitary(circuit)?, &exact))
}

/// Probe-controlled `X_q = c + c†` or `Y_q = i(c − c†)`.
pub fn compile_controlled_probe(spec: &ClusterSpec, orb: Orbital, kind: ProbeKind) -> Result<Circuit> {
    let term = hermitian_probe(orb, kind, spec.n_sites())?;
    let mut circ = Circuit::new(spec.n_qubits(), 0.0, format!("probe-{}-{}", kind.name(), orb));
    emit_pauli(&mut circ, &Tracked::from_term(&term))?;
    Ok(circ)
}
