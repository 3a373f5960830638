//! Sequential against data-parallel execution for the three embarrassingly
//! parallel workloads: SSA ensembles, multi-start Newton and elementary-step
//! enumeration.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use crnkit::deterministic::{stationary_points, StationaryOptions};
use crnkit::network::load_builtin;
use crnkit::stochastic::{ensemble, JumpMethod};
use crnkit::stoichiometry::{atomic_matrix, elementary_reactions, ElementaryOptions};
use crnkit::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn ssa_ensemble(c: &mut Criterion) {
    let lv = load_builtin("lotka-volterra").unwrap();
    let mut group = c.benchmark_group("ssa_ensemble");
    group.sample_size(10);
    for (name, ex) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &ex, |b, &ex| {
            b.iter(|| {
                ensemble(&lv.network, &lv.rates, &[600, 400], 2.0, JumpMethod::Direct, 64, 1, &[1.0, 2.0], ex).unwrap()
            })
        });
    }
    group.finish();
}

fn multistart(c: &mut Criterion) {
    let b = load_builtin("envz-ompr").unwrap();
    let mut group = c.benchmark_group("stationary_multistart");
    group.sample_size(10);
    for (name, ex) in MODES {
        let opts = StationaryOptions { starts: 64, execution: ex, ..Default::default() };
        group.bench_function(name, |bn| {
            bn.iter(|| stationary_points(&b.network, &b.rates, black_box(&b.initial), &opts).unwrap())
        });
    }
    group.finish();
}

fn elementary(c: &mut Criterion) {
    let a = atomic_matrix(&[
        "H2", "O2", "H2O", "H", "O", "OH", "HO2", "H2O2", "O3", "CO", "CO2", "CH4", "CH3", "HCO", "CH2O", "CH3OH",
    ])
    .unwrap();
    let mut group = c.benchmark_group("elementary_enumeration");
    group.sample_size(10);
    for (name, ex) in MODES {
        let opts = ElementaryOptions { execution: ex, ..Default::default() };
        group.bench_function(name, |b| b.iter(|| elementary_reactions(black_box(&a), &opts).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, ssa_ensemble, multistart, elementary);
criterion_main!(benches);
