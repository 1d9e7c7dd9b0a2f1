mod common;

use common::*;
use hubbard_qsim::cluster_hamiltonian::{commutator_table, d_wave_sign};
use hubbard_qsim::jordan_wigner::number_operator;
use hubbard_qsim::linalg::{commutator, distance, frobenius, CMatrix};
use hubbard_qsim::{Block, ClusterSpec, Error, Geometry, HamiltonianBlocks, Orbital, Spin};

fn cd(site: usize, spin: Spin, n_qubits: usize) -> CMatrix {
    creation(Orbital::new(site, spin).qubit(), n_qubits)
}

fn number(site: usize, spin: Spin, n: usize) -> CMatrix {
    let c = cd(site, spin, n);
    &c * c.adjoint()
}

/// The cluster Hamiltonian assembled directly from second-quantised terms.
fn oracle(spec: &ClusterSpec) -> CMatrix {
    let l = spec.n_sites();
    let n = 2 * l;
    let mut h = CMatrix::zeros(1 << n, 1 << n);
    for b in spec.geometry.bonds() {
        for spin in Spin::ALL {
            let hop = cd(b.i, spin, n) * cd(b.j, spin, n).adjoint();
            h -= (&hop + hop.adjoint()) * c64(spec.t);
        }
        if spec.has_d_pair() {
            let singlet = cd(b.i, Spin::Up, n) * cd(b.j, Spin::Down, n) - cd(b.i, Spin::Down, n) * cd(b.j, Spin::Up, n);
            h -= (&singlet + singlet.adjoint()) * c64(spec.delta_d * d_wave_sign(&b) / 2.0);
        }
    }
    for i in 1..=l {
        let (up, down) = (number(i, Spin::Up, n), number(i, Spin::Down, n));
        h += &up * &down * c64(spec.u);
        h -= (&up + &down) * c64(spec.mu_p);
        h -= (&up - &down) * c64(spec.m_p * spec.geometry.af_sign(i));
        let pair = cd(i, Spin::Up, n) * cd(i, Spin::Down, n);
        h -= (&pair + pair.adjoint()) * c64(spec.delta_s);
    }
    h
}

fn c64(x: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(x, 0.0)
}

fn mixed(g: &str) -> ClusterSpec {
    ClusterSpec { t: 1.3, u: 5.1, mu_p: 0.7, m_p: -0.4, delta_s: 0.9, delta_d: 1.7, ..ClusterSpec::new(geometry(g)) }
}

#[test]
fn full_hamiltonian_matches_second_quantised_oracle() {
    for g in ["1d:2", "1d:3", "2x2"] {
        let spec = mixed(g);
        let ours = dense_hamiltonian(&spec);
        assert!(distance(&ours, &oracle(&spec)) < 1e-12, "{g}");
        assert!(HamiltonianBlocks::build(&spec).unwrap().full().is_hermitian_within(1e-14));
    }
}

#[test]
fn split_groups_sum_to_full() {
    let blocks = HamiltonianBlocks::build(&mixed("2x2")).unwrap();
    let sum = &(&blocks.z_block() + &blocks.s_block()) + &blocks.kd_block();
    assert!(distance(&sum.to_dense().unwrap(), &blocks.full().to_dense().unwrap()) < 1e-12);
}

#[test]
fn pairing_blocks_break_number_conservation() {
    let spec = mixed("2x2");
    let blocks = HamiltonianBlocks::build(&spec).unwrap();
    let n = number_operator(4).unwrap().to_dense().unwrap();
    for b in Block::ALL {
        let norm = frobenius(&commutator(&blocks.get(b).to_dense().unwrap(), &n));
        if matches!(b, Block::SPair | Block::DPair) {
            assert!(norm > 1e-6, "{b}");
        } else {
            assert!(norm < 1e-12, "{b}");
        }
    }
}

#[test]
fn commutator_table_is_symmetric_with_zero_diagonal() {
    let table = commutator_table(&stress("2x2")).unwrap();
    for a in Block::ALL {
        assert_eq!(table.norm(a, a), 0.0);
        for b in Block::ALL {
            assert_eq!(table.norm(a, b), table.norm(b, a));
        }
    }
}

#[test]
fn kinetic_and_d_wave_commute_only_with_matching_signs() {
    let table = commutator_table(&stress("2x2")).unwrap();
    assert!(table.norm(Block::Kin, Block::DPair) < 1e-12);
    // The d-wave sign pattern is what makes the two commute; an extended
    // s-wave pattern on the same bonds does not.
    let spec = stress("2x2");
    let n = 8;
    let kin = HamiltonianBlocks::build(&spec).unwrap().kin.to_dense().unwrap();
    let mut extended = CMatrix::zeros(1 << n, 1 << n);
    for b in spec.geometry.bonds() {
        let singlet = cd(b.i, Spin::Up, n) * cd(b.j, Spin::Down, n) - cd(b.i, Spin::Down, n) * cd(b.j, Spin::Up, n);
        extended += &singlet + singlet.adjoint();
    }
    assert!(frobenius(&commutator(&kin, &extended)) > 1e-6);
}

#[test]
fn geometry_bonds_and_sublattice() {
    let g: Geometry = "3x3".parse().unwrap();
    assert_eq!(g.bonds().len(), 12);
    assert_eq!(g.af_sign(1), 1.0);
    assert_eq!(g.af_sign(2), -1.0);
    assert_eq!(g.af_sign(5), 1.0);
    let cube: Geometry = "2x2x2".parse().unwrap();
    assert_eq!(cube.bonds().len(), 12);
    assert_eq!("1d:4".parse::<Geometry>().unwrap().bonds().len(), 3);
    assert!(matches!("2x3x1".parse::<Geometry>(), Err(Error::Unsupported(_))));
}

#[test]
fn d_wave_needs_two_dimensions() {
    let spec = stress("1d:3");
    assert!(matches!(hubbard_qsim::cluster_hamiltonian::build_d_pair(&spec), Err(Error::Unsupported(_))));
    assert!(HamiltonianBlocks::build(&spec).unwrap().d_pair.is_zero());
}

#[test]
fn spec_json_round_trip_and_validation() {
    let spec = mixed("2x2");
    let back = ClusterSpec::from_json(&spec.to_json()).unwrap();
    assert_eq!(back, spec);
    let text = r#"{"dims":2,"extent":[2,2],"t":1.0,"U":8.0,"mu_p":3.0,"M_p":3.0,"delta_s":3.0,"delta_d":3.0}"#;
    assert_eq!(ClusterSpec::from_json(text).unwrap(), stress("2x2"));
    let mismatch = r#"{"dims":1,"extent":[2,2],"t":1.0,"U":0.0,"mu_p":0.0,"M_p":0.0,"delta_s":0.0,"delta_d":0.0}"#;
    assert!(ClusterSpec::from_json(mismatch).is_err());
    let mut bad = spec;
    bad.u = f64::NAN;
    assert!(bad.validate().is_err());
}
