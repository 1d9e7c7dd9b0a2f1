//! Benchmark bodies for the compiler, simulator, splitting and
//! correlation stages; `benches/pipeline.rs` registers them.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use hubbard_qsim::gate_compiler::{compile_term, Strategy, Term};
use hubbard_qsim::greens_function::{Correlator, Evolution, Probe, ThermalSpectrum};
use hubbard_qsim::linalg::power;
use hubbard_qsim::statevector_sim::circuit_branch_unitary;
use hubbard_qsim::trotter::{error_metric, schedule, ExactFactors, Nesting, Scheme, SplitBlocks};
use hubbard_qsim::{ClusterSpec, Geometry, ProbeKind, QuantumState};

fn stress(geometry: &str) -> ClusterSpec {
    ClusterSpec::stress(geometry.parse::<Geometry>().expect("geometry parses"))
}

pub fn compile(c: &mut Criterion) {
    let mut group = c.benchmark_group("compile");
    for geometry in ["1d:4", "2x2", "3x3"] {
        let spec = stress(geometry);
        for strategy in [Strategy::Templates, Strategy::Exact] {
            let id = BenchmarkId::new(format!("hopping-{}", strategy.name()), geometry);
            group.bench_function(id, |b| b.iter(|| compile_term(black_box(&spec), Term::Hopping, 0.01, strategy).unwrap()));
        }
    }
    group.finish();
}

pub fn simulate(c: &mut Criterion) {
    let spec = stress("2x2");
    let circ = compile_term(&spec, Term::DPair, 0.05, Strategy::Exact).unwrap();
    let mut group = c.benchmark_group("simulate");
    group.bench_function("branch-unitary-dpair-2x2", |b| b.iter(|| circuit_branch_unitary(black_box(&circ)).unwrap()));
    let start = QuantumState::basis(circ.n_qubits(), 0b1_0101_0101).unwrap();
    group.bench_function("statevector-dpair-2x2", |b| {
        b.iter(|| {
            let mut s = start.clone();
            s.apply_circuit(black_box(&circ)).unwrap();
            s
        })
    });
    group.finish();
}

pub fn split_error(c: &mut Criterion) {
    let spec = stress("2x2");
    let blocks = SplitBlocks::new(&spec).unwrap();
    let factors = ExactFactors::new(&blocks).unwrap();
    let exact = factors.exact(3.0);
    let mut group = c.benchmark_group("split-error");
    group.sample_size(10);
    for scheme in Scheme::ALL {
        let sched = schedule(scheme, Nesting::default(), 1).unwrap().simplify(&blocks.present());
        group.bench_function(scheme.name(), |b| {
            b.iter(|| {
                let step = factors.step(&sched, 0.01);
                error_metric(&power(&step, 300), &exact).unwrap()
            })
        });
    }
    group.finish();
}

pub fn correlate(c: &mut Criterion) {
    let mut spec = ClusterSpec::new("1d:2".parse().unwrap());
    spec.u = 4.0;
    let rho = ThermalSpectrum::for_spec(&spec, 2.0).unwrap().density();
    let correlator = Correlator::new(&spec, Evolution::Exact).unwrap();
    let mu = Probe::new(hubbard_qsim::Orbital::up(1), ProbeKind::X);
    let nu = Probe::new(hubbard_qsim::Orbital::down(2), ProbeKind::Y);
    c.bench_function("correlate/measure-1d2", |b| b.iter(|| correlator.measure(black_box(&rho), mu, nu, 1.5).unwrap()));
}
