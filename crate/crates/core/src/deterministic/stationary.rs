//! Stationary points in a stoichiometric compatibility class.
//!
//! Newton's method on the square system made of the `S` pivot rows of the
//! right-hand side and one residual `w . (c - c0)` per conservation law.
//! Several deterministic starts are tried; a start whose Newton iteration
//! fails is retried once from the end of a short stiff ODE run.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::integrate::{integrate_system, Method, OdeOptions};
use super::{check_state, MassActionSystem};
use crate::error::{Error, Result};
use crate::exact;
use crate::exec::Execution;
use crate::network::{RateAssignment, ReactionNetwork};
use crate::structure::conservation_laws;

#[derive(Clone, Debug)]
pub struct StationaryOptions {
    /// Keep only points with every coordinate above `positivity_tol`.
    pub positivity: bool,
    pub positivity_tol: f64,
    /// Number of starts, the first of which is `c0` itself.
    pub starts: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Points closer than this (max norm, relative to magnitude) are merged.
    pub dedup_tol: f64,
    /// Retry failed starts from a relaxed ODE state.
    pub relax: bool,
    pub execution: Execution,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            positivity: false,
            positivity_tol: 1e-10,
            starts: 16,
            tol: 1e-10,
            max_iter: 64,
            dedup_tol: 1e-8,
            relax: true,
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub c: Vec<f64>,
    /// `max |rhs(c)|`.
    pub residual: f64,
    /// `max |w . (c - c0)|` over conservation laws.
    pub class_residual: f64,
    /// Index of the start that produced the point.
    pub start: usize,
}

struct NewtonSystem<'a> {
    sys: &'a MassActionSystem,
    rows: Vec<usize>,
    laws: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

impl NewtonSystem<'_> {
    fn residuals(&self, c: &[f64]) -> (Vec<f64>, f64, f64) {
        let f = self.sys.rhs(c);
        let rhs_res = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut out: Vec<f64> = self.rows.iter().map(|&i| f[i]).collect();
        let mut class_res = 0.0f64;
        for (w, b) in self.laws.iter().zip(&self.targets) {
            let v = dot(w, c) - b;
            class_res = class_res.max(v.abs());
            out.push(v);
        }
        (out, rhs_res, class_res)
    }

    fn jacobian(&self, c: &[f64]) -> DMatrix<f64> {
        let m = c.len();
        let full = self.sys.jacobian(c);
        let mut jac = DMatrix::zeros(m, m);
        for (r, &i) in self.rows.iter().enumerate() {
            jac.set_row(r, &full.row(i));
        }
        for (q, w) in self.laws.iter().enumerate() {
            for j in 0..m {
                jac[(self.rows.len() + q, j)] = w[j];
            }
        }
        jac
    }

    fn newton(&self, start: &[f64], opts: &StationaryOptions) -> Option<(Vec<f64>, f64, f64)> {
        let mut c = start.to_vec();
        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..=opts.max_iter {
            let (f, rhs_res, class_res) = self.residuals(&c);
            if rhs_res <= opts.tol && class_res <= opts.tol {
                return Some((c, rhs_res, class_res));
            }
            let delta = self.jacobian(&c).lu().solve(&-DVector::from_column_slice(&f))?;
            if delta.iter().any(|d| !d.is_finite()) {
                return None;
            }
            // Stay in the closed orthant: stop short of zero for positive coordinates.
            let mut lambda: f64 = 1.0;
            for (ci, di) in c.iter().zip(delta.iter()) {
                if *ci > 0.0 && *di < 0.0 {
                    lambda = lambda.min(0.99 * ci / -di);
                }
            }
            let f0 = norm2(&f);
            loop {
                let trial: Vec<f64> = c.iter().zip(delta.iter()).map(|(a, d)| (a + lambda * d).max(0.0)).collect();
                let (ft, _, _) = self.residuals(&trial);
                if norm2(&ft) < f0 || lambda < 1e-10 {
                    c = trial;
                    break;
                }
                lambda *= 0.5;
            }
        }
        None
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Additive recurrence with the generalised golden ratio: a low-discrepancy
/// sequence in `[0, 1)^d` that behaves well in any dimension.
fn kronecker_point(n: usize, d: usize) -> Vec<f64> {
    let mut phi = 2.0f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (0..d)
        .map(|j| {
            let alpha = phi.powi(-(j as i32 + 1)).fract();
            (0.5 + n as f64 * alpha).fract()
        })
        .collect()
}

/// Start points: `c0`, then interior samples moved onto the conservation
/// class by least squares and kept strictly positive.
pub(crate) fn start_points(c0: &[f64], laws: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let m = c0.len();
    let mean = c0.iter().sum::<f64>() / m.max(1) as f64;
    let scale = if mean > 0.0 { mean } else { 1.0 };
    let w = DMatrix::from_fn(laws.len(), m, |i, j| laws[i][j]);
    let gram_lu = (!laws.is_empty()).then(|| (&w * w.transpose()).lu());
    let target = DVector::from_iterator(laws.len(), laws.iter().map(|l| dot(l, c0)));
    let mut out = vec![c0.to_vec()];
    for s in 1..n {
        let u = kronecker_point(s, m);
        let mut p = DVector::from_iterator(m, u.iter().map(|x| scale * (0.05 + 1.95 * x)));
        if let Some(lu) = &gram_lu {
            if let Some(y) = lu.solve(&(&target - &w * &p)) {
                p += w.transpose() * y;
            }
        }
        out.push(p.iter().map(|&x| x.max(1e-3 * scale)).collect());
    }
    out
}

/// Stationary points of the mass-action system in the compatibility class
/// of `c0`, in order of the start that found them.
pub fn stationary_points(
    net: &ReactionNetwork,
    k: &RateAssignment,
    c0: &[f64],
    opts: &StationaryOptions,
) -> Result<Vec<StationaryPoint>> {
    check_state(net, c0)?;
    if opts.starts == 0 {
        return Err(Error::InvalidArgument("at least one start is required".into()));
    }
    let sys = MassActionSystem::new(net, k)?;
    let laws: Vec<Vec<f64>> =
        conservation_laws(net).iter().map(|w| w.weights.iter().map(|&x| x as f64).collect()).collect();
    let ns = NewtonSystem {
        sys: &sys,
        rows: exact::independent_rows(&net.gamma().to_rows()),
        targets: laws.iter().map(|w| dot(w, c0)).collect(),
        laws: laws.clone(),
    };
    let starts = start_points(c0, &laws, opts.starts);
    let results = opts.execution.map(starts.len(), |i| {
        let start = &starts[i];
        ns.newton(start, opts).or_else(|| {
            if !opts.relax {
                return None;
            }
            let ode = OdeOptions {
                method: Method::Stiff,
                rtol: 1e-6,
                atol: 1e-9,
                max_steps: 20_000,
                ..Default::default()
            };
            let relaxed = integrate_system(&sys, start, (0.0, 100.0), &ode).ok()?;
            ns.newton(relaxed.last(), opts)
        })
    });
    if results.iter().all(Option::is_none) {
        return Err(Error::NoConvergence);
    }
    let mut points: Vec<StationaryPoint> = Vec::new();
    for (start, r) in results.into_iter().enumerate() {
        let Some((c, residual, class_residual)) = r else { continue };
        if c.iter().any(|&v| v < -opts.positivity_tol) {
            continue;
        }
        if opts.positivity && c.iter().any(|&v| v <= opts.positivity_tol) {
            continue;
        }
        let mag = c.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let dup = points.iter().any(|p| p.c.iter().zip(&c).all(|(a, b)| (a - b).abs() <= opts.dedup_tol * mag));
        if !dup {
            points.push(StationaryPoint { c, residual, class_residual, start });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl, ROSS_RATES};

    #[test]
    fn r1_positive_point() {
        let net = load_builtin("wegscheider-irrev").unwrap().network;
        let k = RateAssignment::new(vec![2.0, 1.0]).unwrap();
        let opts = StationaryOptions { positivity: true, ..Default::default() };
        let pts = stationary_points(&net, &k, &[2.0, 1.0], &opts).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].c[0] - 0.5).abs() < 1e-10);
        assert!((pts[0].c[1] - 2.5).abs() < 1e-10);
    }

    #[test]
    fn r1_boundary_point_without_positivity() {
        let net = load_builtin("wegscheider-irrev").unwrap().network;
        let k = RateAssignment::new(vec![2.0, 1.0]).unwrap();
        let pts = stationary_points(&net, &k, &[2.0, 1.0], &StationaryOptions::default()).unwrap();
        assert!(pts.iter().any(|p| (p.c[0] - 3.0).abs() < 1e-8 && p.c[1].abs() < 1e-8));
        assert!(pts.iter().any(|p| (p.c[0] - 0.5).abs() < 1e-8));
    }

    #[test]
    fn symmetric_pair() {
        let net = network_from_dsl("A <-> B").unwrap();
        let pts = stationary_points(&net, &RateAssignment::ones(2), &[2.0, 0.0], &StationaryOptions::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].c[0] - 1.0).abs() < 1e-10 && (pts[0].c[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ross_chain_unique_point() {
        let b = load_builtin("ross-chain").unwrap();
        let pts = stationary_points(&b.network, &b.rates, &b.initial, &StationaryOptions::default()).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(b.rates.values(), &ROSS_RATES);
        assert!((pts[0].c[7] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn starts_respect_conservation() {
        let laws = vec![vec![1.0, 1.0, 0.0]];
        for s in start_points(&[1.0, 2.0, 0.5], &laws, 8).iter().skip(1) {
            assert!(s.iter().all(|&x| x > 0.0));
        }
        let a = kronecker_point(3, 4);
        assert_eq!(a, kronecker_point(3, 4));
        assert!(a.iter().all(|x| (0.0..1.0).contains(x)));
    }
}
