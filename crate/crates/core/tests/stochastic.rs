use std::time::Instant;

use crnkit::network::{load_builtin, network_from_dsl};
use crnkit::stochastic::{ensemble, ssa_direct, tau_leap, JumpMethod, LeapVariant, TauOptions};
use crnkit::{Execution, RateAssignment};

#[test]
fn ssa_decay_mean() {
    let net = network_from_dsl("A -> B").unwrap();
    let s = ensemble(&net, &RateAssignment::ones(1), &[1000, 0], 1.0, JumpMethod::Direct, 1000, 1, &[1.0], Execution::Parallel)
        .unwrap();
    let expected = 1000.0 * (-1.0f64).exp();
    assert!((s.means[0][0] - expected).abs() <= 3.0 * s.standard_error(0, 0), "{}", s.means[0][0]);
    assert_eq!(s.means[0][0] + s.means[0][1], 1000.0);
}

#[test]
fn tau_leap_decay_mean_large_population() {
    let net = network_from_dsl("A -> B").unwrap();
    let method = JumpMethod::TauLeap(TauOptions::new(0.03));
    let s = ensemble(&net, &RateAssignment::ones(1), &[100_000, 0], 1.0, method, 100, 2, &[1.0], Execution::Parallel).unwrap();
    let expected = 1e5 * (-1.0f64).exp();
    assert!((s.means[0][0] / expected - 1.0).abs() < 0.01, "{}", s.means[0][0]);
}

#[test]
fn leap_bias_shrinks_with_eps() {
    let net = network_from_dsl("A -> B").unwrap();
    let expected = 1e5 * (-1.0f64).exp();
    let errors: Vec<f64> = [0.1, 0.03, 0.01]
        .iter()
        .map(|&eps| {
            let opts = TauOptions { variant: LeapVariant::Euler, ..TauOptions::new(eps) };
            let s = ensemble(&net, &RateAssignment::ones(1), &[100_000, 0], 1.0, JumpMethod::TauLeap(opts), 200, 3, &[1.0], Execution::Parallel)
                .unwrap();
            (s.means[0][0] - expected).abs()
        })
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn tau_leap_outpaces_ssa_on_lotka_volterra() {
    let lv = load_builtin("lotka-volterra").unwrap();
    let opts = TauOptions::new(0.03);
    let time = |f: &dyn Fn(u64)| {
        let start = Instant::now();
        for seed in 0..10 {
            f(seed);
        }
        start.elapsed().as_secs_f64()
    };
    let ssa = time(&|seed| {
        ssa_direct(&lv.network, &lv.rates, &[600, 400], 10.0, seed).unwrap();
    });
    let leap = time(&|seed| {
        tau_leap(&lv.network, &lv.rates, &[600, 400], 10.0, &opts, seed).unwrap();
    });
    assert!(ssa >= 5.0 * leap, "ssa {ssa:.4}s, tau-leap {leap:.4}s");
}

#[test]
fn lotka_volterra_oscillates() {
    let lv = load_builtin("lotka-volterra").unwrap();
    let tr = tau_leap(&lv.network, &lv.rates, &[600, 400], 10.0, &TauOptions::new(0.03), 11).unwrap();
    let prey: Vec<i64> = tr.counts.iter().map(|x| x[0]).collect();
    let turns = prey.windows(3).filter(|w| (w[1] > w[0]) != (w[2] > w[1])).count();
    assert!(turns > 2);
    assert!(tr.counts.iter().flatten().all(|&v| v >= 0));
}

#[test]
fn invalid_eps_rejected() {
    let net = network_from_dsl("A -> B").unwrap();
    for eps in [0.0, 0.25, f64::NAN] {
        assert!(tau_leap(&net, &RateAssignment::ones(1), &[10, 0], 1.0, &TauOptions::new(eps), 0).is_err());
    }
}
