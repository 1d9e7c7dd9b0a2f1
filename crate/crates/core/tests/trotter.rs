mod common;

use common::*;
use hubbard_qsim::linalg::{c, distance, CMatrix};
use hubbard_qsim::statevector_sim::exact_unitary;
use hubbard_qsim::trotter::*;
use hubbard_qsim::ClusterSpec;
use proptest::prelude::*;

fn sums(s: &SplitSchedule) -> Vec<f64> {
    BlockId::ALL.iter().map(|b| s.coefficient_sums().get(b).copied().unwrap_or(0.0)).collect()
}

#[test]
fn symmetric_step_coefficients_sum_to_one() {
    for n_t in [1, 2, 5] {
        let s = ts_step(n_t).unwrap();
        assert_eq!(s.n_factors(), 7 * n_t);
        for v in sums(&s) {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }
    assert!(ts_step(0).is_err());
}

#[test]
fn ruth_coefficients_follow_the_printed_formula() {
    let s = ruth_step(Nesting::default(), 1).unwrap();
    assert_eq!(s.n_factors(), 3 + 3 * 6);
    // Outer A = Z takes 7/24 + 3/4 − 1/24 = 1; B terms nest the same sum.
    for v in sums(&s) {
        assert!((v - 1.0).abs() < 1e-14, "{v}");
    }
    let printed: Vec<f64> = RUTH_PAIR.iter().map(|p| p.1).collect();
    assert_eq!(printed, [7.0 / 24.0, 2.0 / 3.0, 0.75, -2.0 / 3.0, -1.0 / 24.0, 1.0]);
}

#[test]
fn nesting_parses_permutations_only() {
    let n: Nesting = "kd,s,z".parse().unwrap();
    assert_eq!(n.order, [BlockId::KD, BlockId::S, BlockId::Z]);
    assert!("z,z,kd".parse::<Nesting>().is_err());
    assert!("z,s".parse::<Nesting>().is_err());
}

#[test]
fn simplify_merges_and_drops() {
    let s = ts_step(1).unwrap().simplify(&[BlockId::Z, BlockId::KD]);
    assert_eq!(s.factors, [(BlockId::Z, 0.5), (BlockId::KD, 1.0), (BlockId::Z, 0.5)]);
    let only = ts_step(2).unwrap().simplify(&[BlockId::Z]);
    assert_eq!(only.factors, [(BlockId::Z, 1.0)]);
}

#[test]
fn single_block_evolution_is_exact() {
    let spec = ClusterSpec { t: 0.0, u: 8.0, ..ClusterSpec::new(geometry("2x2")) };
    let blocks = SplitBlocks::new(&spec).unwrap();
    assert_eq!(blocks.present(), [BlockId::Z]);
    let mut cfg = SweepConfig::new(3.0, logspace(3e-3, 3e-1, 5).unwrap());
    cfg.timing = false;
    for p in sweep(&spec, &cfg).unwrap() {
        assert!(p.epsilon <= 1e-12, "{} {}: {:e}", p.scheme, p.dtau, p.epsilon);
        assert_eq!(p.n_factors, 1);
    }
}

#[test]
fn split_step_converges_to_exact_exponential() {
    let spec = stress("1d:2");
    let exact = exact_unitary(&SplitBlocks::new(&spec).unwrap().total(), 0.01).unwrap();
    for scheme in Scheme::ALL {
        let s = schedule(scheme, Nesting::default(), 1).unwrap();
        let u = evolve_split(&spec, &s, 0.01, EvolutionMode::Exact).unwrap();
        assert!(distance(&u, &exact) < 1e-4, "{scheme}");
    }
    assert!(evolve_split(&spec, &ts_step(1).unwrap(), 0.0, EvolutionMode::Exact).is_err());
}

#[test]
fn exact_and_compiled_modes_agree() {
    let spec = stress("2x2");
    for scheme in Scheme::ALL {
        let s = schedule(scheme, Nesting::default(), 1).unwrap();
        let a = evolve_split(&spec, &s, 0.05, EvolutionMode::Exact).unwrap();
        let b = evolve_split(&spec, &s, 0.05, EvolutionMode::Compiled).unwrap();
        assert!(distance(&a, &b) < 1e-9, "{scheme}: {:e}", distance(&a, &b));
    }
}

#[test]
fn merging_commuting_kinetic_and_d_wave_factors_is_free() {
    // The KD factor is one exponential of kin − d_pair; splitting it into
    // its two commuting parts must leave the step unchanged.
    let spec = stress("2x2");
    let blocks = hubbard_qsim::HamiltonianBlocks::build(&spec).unwrap();
    let factors = ExactFactors::new(&SplitBlocks::new(&spec).unwrap()).unwrap();
    let dt = 0.05;
    let merged = factors.factor(BlockId::KD, dt);
    let kin = exact_unitary(&blocks.kin, dt).unwrap();
    let d = exact_unitary(&blocks.d_pair.scale_real(-1.0), dt).unwrap();
    let exact = factors.exact(3.0);
    let s = ts_step(1).unwrap();
    let step = factors.step(&s, dt);
    let split_step = replace_kd(&factors, &s, dt, &(&kin * &d));
    let eps_merged = error_metric(&hubbard_qsim::linalg::power(&step, 60), &exact).unwrap();
    let eps_split = error_metric(&hubbard_qsim::linalg::power(&split_step, 60), &exact).unwrap();
    assert!(distance(&merged, &(&kin * &d)) < 1e-12);
    assert!((eps_merged - eps_split).abs() <= 1e-12);
}

/// One step with the KD factor `e^{−i c dt KD}` replaced by `kd` for `c = 1`.
fn replace_kd(factors: &ExactFactors, s: &SplitSchedule, dt: f64, kd: &CMatrix) -> CMatrix {
    let dim = kd.nrows();
    s.factors.iter().rev().fold(CMatrix::identity(dim, dim), |acc, &(b, k)| {
        let f = if b == BlockId::KD && k == 1.0 { kd.clone() } else { factors.factor(b, k * dt) };
        f * acc
    })
}

#[test]
fn fig7_anchor_magnitudes() {
    let spec = stress("2x2");
    let mut cfg = SweepConfig::new(3.0, vec![1e-2]);
    cfg.timing = false;
    for p in sweep(&spec, &cfg).unwrap() {
        let (lo, hi) = match p.scheme {
            Scheme::Ts2 => (1e-6, 1e-4),
            Scheme::Ruth => (1e-11, 1e-9),
        };
        assert!((lo..=hi).contains(&p.epsilon), "{}: {:e}", p.scheme, p.epsilon);
    }
}

#[test]
fn error_falls_as_a_power_law() {
    let spec = stress("2x2");
    let mut cfg = SweepConfig::new(3.0, logspace(3e-3, 3e-1, 12).unwrap());
    cfg.timing = false;
    let points = sweep(&spec, &cfg).unwrap();
    for scheme in Scheme::ALL {
        let mut own: Vec<SweepPoint> = points.iter().filter(|p| p.scheme == scheme).cloned().collect();
        own.sort_by(|a, b| a.dtau.total_cmp(&b.dtau));
        assert!(own.windows(2).all(|w| w[0].epsilon <= w[1].epsilon), "{scheme} not monotone");
        let (slope, r2) = fit_power_law(&own).unwrap();
        assert!(r2 >= 0.99, "{scheme}: R² {r2}");
        // Halving the step cuts the squared-fidelity error by at least 2³.
        assert!(slope >= 3.0, "{scheme}: slope {slope}");
    }
}

#[test]
fn sweep_csv_is_reproducible_without_timing() {
    let spec = stress("1d:2");
    let mut cfg = SweepConfig::new(1.0, vec![0.1, 0.05]);
    cfg.timing = false;
    let a = to_csv(&sweep(&spec, &cfg).unwrap(), true);
    let b = to_csv(&sweep(&spec, &cfg).unwrap(), true);
    assert_eq!(a, b);
    assert!(a.starts_with(CSV_HEADER));
    assert_eq!(a.lines().count(), 5);
}

fn random_unitary(seed: &[f64]) -> CMatrix {
    let n = 4;
    let mut h = CMatrix::zeros(n, n);
    for (k, w) in seed.chunks(2).enumerate().take(n * n) {
        let (i, j) = (k / n, k % n);
        h[(i, j)] += c(w[0], w[1]);
        h[(j, i)] += c(w[0], -w[1]);
    }
    propagator(&h, 1.0)
}

proptest! {
    #[test]
    fn metric_is_phase_blind_and_bounded(seed in prop::collection::vec(-1.0..1.0f64, 32), other in prop::collection::vec(-1.0..1.0f64, 32), phi in 0.0..6.3f64) {
        let u = random_unitary(&seed);
        let v = random_unitary(&other);
        prop_assert!(error_metric(&u, &u).unwrap() < 1e-14);
        prop_assert!(error_metric(&(&u * c(phi.cos(), phi.sin())), &u).unwrap() < 1e-14);
        let e = error_metric(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&e));
        let rotated = error_metric(&(&u * c(phi.cos(), phi.sin())), &v).unwrap();
        prop_assert!((e - rotated).abs() < 1e-12);
        let direct = 1.0 - ((&u * v.adjoint()).trace().norm_sqr()) / 16.0;
        prop_assert!((e - direct).abs() < 1e-12);
    }

    #[test]
    fn schedules_sum_to_one_for_any_repeat(n_t in 1usize..6, order in 0usize..6) {
        let perms = ["z,s,kd", "z,kd,s", "s,z,kd", "s,kd,z", "kd,z,s", "kd,s,z"];
        let nesting: Nesting = perms[order].parse().unwrap();
        for scheme in Scheme::ALL {
            for v in sums(&schedule(scheme, nesting, n_t).unwrap()) {
                prop_assert!((v - 1.0).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn metric_rejects_mismatched_dimensions() {
    assert!(error_metric(&CMatrix::identity(4, 4), &CMatrix::identity(8, 8)).is_err());
}
