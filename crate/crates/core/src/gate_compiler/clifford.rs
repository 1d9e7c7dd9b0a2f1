//! Tracking Pauli strings through Clifford gates.
//!
//! Conjugation tables are derived from the dense gate matrices rather than
//! written out by hand.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::circuit::{Gate, GateKind};
use crate::linalg::{kron, CMatrix};
use crate::pauli_algebra::{Pauli, PauliTerm};

/// A signed Pauli string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tracked {
    pub sign: i8,
    pub letters: Vec<Pauli>,
}

impl Tracked {
    pub fn from_term(term: &PauliTerm) -> Self {
        Tracked { sign: 1, letters: term.letters.clone() }
    }

    pub fn support(&self) -> Vec<usize> {
        self.letters.iter().enumerate().filter(|(_, p)| **p != Pauli::I).map(|(q, _)| q).collect()
    }

    /// `(qubit, letter)` if exactly one qubit carries a non-identity letter.
    pub fn single(&self) -> Option<(usize, Pauli)> {
        match self.support().as_slice() {
            &[q] => Some((q, self.letters[q])),
            _ => None,
        }
    }

    /// `self ← G self G†`.
    pub fn conjugate(&mut self, gate: &Gate) {
        let tables = tables();
        match *gate.targets.as_slice() {
            [q] => {
                let table = tables.single.get(&gate.kind).expect("gate is not a tracked Clifford");
                let (s, p) = table[self.letters[q] as usize];
                self.sign *= s;
                self.letters[q] = p;
            }
            [a, b] => {
                let table = tables.pair.get(&gate.kind).expect("gate is not a tracked Clifford");
                let (s, pa, pb) = table[self.letters[a] as usize][self.letters[b] as usize];
                self.sign *= s;
                self.letters[a] = pa;
                self.letters[b] = pb;
            }
            _ => unreachable!(),
        }
    }

    pub fn conjugate_all(&mut self, gates: &[Gate]) {
        for g in gates {
            self.conjugate(g);
        }
    }
}

type SingleTable = [(i8, Pauli); 4];
type PairTable = [[(i8, Pauli, Pauli); 4]; 4];

struct Tables {
    single: HashMap<GateKind, SingleTable>,
    pair: HashMap<GateKind, PairTable>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let single = [GateKind::H, GateKind::J, GateKind::Jdag].into_iter().map(|k| (k, single_table(&k.matrix(0.0)))).collect();
        let pair =
            [GateKind::PlusISwap, GateKind::MinusISwap, GateKind::Swap].into_iter().map(|k| (k, pair_table(&k.matrix(0.0)))).collect();
        Tables { single, pair }
    })
}

/// Sign `s` and index of the Pauli matrix `q` with `m = s q`.
fn decompose(m: &CMatrix, basis: &[CMatrix]) -> (i8, usize) {
    let dim = m.nrows() as f64;
    for (k, q) in basis.iter().enumerate() {
        let overlap = (q.adjoint() * m).trace() / dim;
        if (overlap.re.abs() - 1.0).abs() < 1e-12 && overlap.im.abs() < 1e-12 {
            return (if overlap.re > 0.0 { 1 } else { -1 }, k);
        }
    }
    panic!("gate is not Clifford")
}

fn single_table(g: &CMatrix) -> SingleTable {
    let basis: Vec<CMatrix> = Pauli::ALL.iter().map(|p| p.matrix()).collect();
    Pauli::ALL.map(|p| {
        let (s, k) = decompose(&(g * p.matrix() * g.adjoint()), &basis);
        (s, Pauli::ALL[k])
    })
}

fn pair_table(g: &CMatrix) -> PairTable {
    // Index `4 * b + a` for letter `a` on the low target and `b` on the high.
    let mut basis = Vec::new();
    for b in Pauli::ALL {
        for a in Pauli::ALL {
            basis.push(kron(&b.matrix(), &a.matrix()));
        }
    }
    Pauli::ALL.map(|a| {
        Pauli::ALL.map(|b| {
            let p = kron(&b.matrix(), &a.matrix());
            let (s, k) = decompose(&(g * p * g.adjoint()), &basis);
            (s, Pauli::ALL[k % 4], Pauli::ALL[k / 4])
        })
    })
}
