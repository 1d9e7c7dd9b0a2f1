mod common;

use common::*;
use hubbard_qsim::jordan_wigner::*;
use hubbard_qsim::linalg::{c, distance, CMatrix};
use hubbard_qsim::{Orbital, Pauli, PauliSum, PauliTerm, ProbeKind, Spin};
use proptest::prelude::*;

#[test]
fn creation_matches_bit_oracle() {
    for l in 1..=3 {
        for orb in Orbital::all(l) {
            let ours = creation_op(orb, l).unwrap().to_dense().unwrap();
            assert!(distance(&ours, &creation(orb.qubit(), 2 * l)) < 1e-14, "{orb}");
        }
    }
}

#[test]
fn qubit_layout_interleaves_spins() {
    assert_eq!(Orbital::up(1).qubit(), 0);
    assert_eq!(Orbital::down(1).qubit(), 1);
    assert_eq!(Orbital::up(3).qubit(), 4);
    for q in 0..8 {
        assert_eq!(Orbital::from_qubit(q).qubit(), q);
    }
    assert!(Orbital::up(3).check(2).is_err());
    assert!(Orbital::up(0).check(2).is_err());
}

#[test]
fn probes_are_real_and_imaginary_parts() {
    let l = 2;
    for orb in Orbital::all(l) {
        let cd = creation(orb.qubit(), 2 * l);
        let a = cd.adjoint();
        let x = hermitian_probe(orb, ProbeKind::X, l).unwrap().to_dense().unwrap();
        let y = hermitian_probe(orb, ProbeKind::Y, l).unwrap().to_dense().unwrap();
        assert!(distance(&x, &(&a + &cd)) < 1e-14);
        assert!(distance(&y, &((&a - &cd) * c(0.0, 1.0))) < 1e-14);
    }
}

#[test]
fn number_operator_counts_particles() {
    let l = 2;
    let n = number_operator(l).unwrap().to_dense().unwrap();
    let oracle = (0..2 * l).fold(CMatrix::zeros(16, 16), |acc, q| {
        let cd = creation(q, 2 * l);
        acc + &cd * cd.adjoint()
    });
    assert!(distance(&n, &oracle) < 1e-14);
    // Occupied is |0⟩, so the all-zeros state holds every particle.
    assert!((n[(0, 0)].re - 4.0).abs() < 1e-14);
    assert!(n[(15, 15)].norm() < 1e-14);
}

#[test]
fn hopping_and_pair_strings() {
    let l = 3;
    let cd = |site, spin| creation(Orbital::new(site, spin).qubit(), 2 * l);
    let hop = &cd(1, Spin::Up) * cd(3, Spin::Up).adjoint();
    let t = t_string(1, 3, Spin::Up, l).unwrap().to_dense().unwrap();
    assert!(distance(&t, &(&hop + hop.adjoint())) < 1e-14);
    let pair = &cd(1, Spin::Down) * cd(2, Spin::Up);
    let d = d_string(1, 2, Spin::Down, l).unwrap().to_dense().unwrap();
    assert!(distance(&d, &(&pair + pair.adjoint())) < 1e-14);
    let onsite = &cd(2, Spin::Up) * cd(2, Spin::Down);
    let local = d_local(2, l).unwrap().to_dense().unwrap();
    assert!(distance(&local, &(&onsite + onsite.adjoint())) < 1e-14);
    assert!(t_string(2, 1, Spin::Up, l).is_err());
    assert!(d_string(1, 4, Spin::Up, l).is_err());
}

const QUBITS: usize = 3;

fn pauli_sum() -> impl Strategy<Value = PauliSum> {
    let term = (-2.0..2.0f64, -2.0..2.0f64, prop::collection::vec(0..4usize, QUBITS));
    prop::collection::vec(term, 1..5).prop_map(|terms| {
        let terms = terms.into_iter().map(|(re, im, l)| PauliTerm::new(c(re, im), l.into_iter().map(|k| Pauli::ALL[k]).collect()));
        PauliSum::from_terms(QUBITS, terms).unwrap()
    })
}

fn dense(p: &PauliSum) -> CMatrix {
    p.to_dense().unwrap()
}

proptest! {
    #[test]
    fn product_is_matrix_product(a in pauli_sum(), b in pauli_sum()) {
        let ab = a.try_mul(&b).unwrap();
        prop_assert!(distance(&dense(&ab), &(dense(&a) * dense(&b))) < 1e-12);
    }

    #[test]
    fn commutator_and_anticommutator(a in pauli_sum(), b in pauli_sum()) {
        let (da, db) = (dense(&a), dense(&b));
        let comm = dense(&a.commutator(&b).unwrap());
        let anti = dense(&a.anticommutator(&b).unwrap());
        prop_assert!(distance(&comm, &(&da * &db - &db * &da)) < 1e-12);
        prop_assert!(distance(&anti, &(&da * &db + &db * &da)) < 1e-12);
        prop_assert!(distance(&comm, &(-dense(&b.commutator(&a).unwrap()))) < 1e-12);
    }

    #[test]
    fn adjoint_is_conjugate_transpose(a in pauli_sum()) {
        prop_assert!(distance(&dense(&a.adjoint()), &dense(&a).adjoint()) < 1e-12);
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let h = a.try_add(&a.adjoint()).unwrap();
        prop_assert!(h.is_hermitian_within(1e-12));
    }

    #[test]
    fn text_round_trip(a in pauli_sum()) {
        let back: PauliSum = a.to_string().parse().unwrap();
        prop_assert!(distance(&dense(&back), &dense(&a)) < 1e-12);
    }

    #[test]
    fn letters_multiply_as_matrices(i in 0..4usize, j in 0..4usize) {
        let (p, q) = (Pauli::ALL[i], Pauli::ALL[j]);
        let (phase, r) = p.mul(q);
        prop_assert!(distance(&(r.matrix() * phase), &(p.matrix() * q.matrix())) < 1e-15);
        prop_assert_eq!(p.commutes(q), distance(&(p.matrix() * q.matrix()), &(q.matrix() * p.matrix())) < 1e-15);
    }
}
