//! Adaptive integration of the mass-action ODE.
//!
//! * `ExplicitAdaptive`: Dormand–Prince 5(4), PI step control, fifth-order
//!   continuous extension.
//! * `Stiff`: the two-stage Rosenbrock pair of Shampine's `ode23s`
//!   (order 2, embedded order-3 error estimate) with the analytic Jacobian.
//!
//! A step that would push any concentration below `-atol` is rejected and
//! retried with half the step.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{check_state, MassActionSystem};
use crate::error::{Error, Result};
use crate::network::{RateAssignment, ReactionNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExplicitAdaptive,
    Stiff,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ExplicitAdaptive => "dopri5",
            Method::Stiff => "ros23",
        }
    }
}

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Output times. `None` records every accepted step.
    pub samples: Option<Vec<f64>>,
    /// Constant step size with error control switched off.
    pub fixed_step: Option<f64>,
    pub initial_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            method: Method::ExplicitAdaptive,
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 1_000_000,
            samples: None,
            fixed_step: None,
            initial_step: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub solver: String,
    pub accepted: usize,
    pub rejected: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl OdeTrajectory {
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one state")
    }
}

/// Integrates the mass-action ODE of `net` from `c0` over `t_span`.
pub fn integrate(
    net: &ReactionNetwork,
    k: &RateAssignment,
    c0: &[f64],
    t_span: (f64, f64),
    opts: &OdeOptions,
) -> Result<OdeTrajectory> {
    check_state(net, c0)?;
    let sys = MassActionSystem::new(net, k)?;
    integrate_system(&sys, c0, t_span, opts)
}

trait Scheme {
    /// Exponent of the error estimate used by the step-size controller.
    fn error_order(&self) -> i32;
    /// One trial step of size `h` from `(t, y)` with `f = rhs(y)`. Fills
    /// `y_new`, `f_new` and `err` (unscaled local error estimate).
    fn attempt(&mut self, sys: &MassActionSystem, y: &[f64], f: &[f64], h: f64) -> Result<()>;
    fn y_new(&self) -> &[f64];
    fn f_new(&self) -> &[f64];
    fn err(&self) -> &[f64];
    /// State at `t + theta h` for the last attempted step.
    fn interpolate(&self, y: &[f64], h: f64, theta: f64, out: &mut [f64]);
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Dopri5 {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
    /// Coefficients of the continuous extension.
    cont: [Vec<f64>; 5],
}

impl Dopri5 {
    fn new(m: usize) -> Self {
        let v = || vec![0.0; m];
        Dopri5 {
            k: [v(), v(), v(), v(), v(), v(), v()],
            tmp: v(),
            y_new: v(),
            err: v(),
            cont: [v(), v(), v(), v(), v()],
        }
    }
}

impl Scheme for Dopri5 {
    fn error_order(&self) -> i32 {
        5
    }

    fn attempt(&mut self, sys: &MassActionSystem, y: &[f64], f: &[f64], h: f64) -> Result<()> {
        let m = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        k1.copy_from_slice(f);
        let tmp = &mut self.tmp;
        for i in 0..m {
            tmp[i] = y[i] + h * A21 * k1[i];
        }
        sys.rhs_into(tmp, k2);
        for i in 0..m {
            tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        sys.rhs_into(tmp, k3);
        for i in 0..m {
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        sys.rhs_into(tmp, k4);
        for i in 0..m {
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        sys.rhs_into(tmp, k5);
        for i in 0..m {
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        sys.rhs_into(tmp, k6);
        for i in 0..m {
            self.y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        sys.rhs_into(&self.y_new, k7);
        for i in 0..m {
            self.err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let ydiff = self.y_new[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            self.cont[0][i] = y[i];
            self.cont[1][i] = ydiff;
            self.cont[2][i] = bspl;
            self.cont[3][i] = ydiff - h * k7[i] - bspl;
            self.cont[4][i] =
                h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        Ok(())
    }

    fn y_new(&self) -> &[f64] {
        &self.y_new
    }

    fn f_new(&self) -> &[f64] {
        &self.k[6]
    }

    fn err(&self) -> &[f64] {
        &self.err
    }

    fn interpolate(&self, _y: &[f64], _h: f64, theta: f64, out: &mut [f64]) {
        let t1 = 1.0 - theta;
        let [c0, c1, c2, c3, c4] = &self.cont;
        for i in 0..out.len() {
            out[i] = c0[i] + theta * (c1[i] + t1 * (c2[i] + theta * (c3[i] + t1 * c4[i])));
        }
    }
}

struct Rosenbrock23 {
    d: f64,
    e32: f64,
    jac: DMatrix<f64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
    f1: Vec<f64>,
    tmp: Vec<f64>,
    y_new: Vec<f64>,
    f_new: Vec<f64>,
    err: Vec<f64>,
}

impl Rosenbrock23 {
    fn new(m: usize) -> Self {
        let v = || vec![0.0; m];
        Rosenbrock23 {
            d: 1.0 / (2.0 + std::f64::consts::SQRT_2),
            e32: 6.0 + std::f64::consts::SQRT_2,
            jac: DMatrix::zeros(m, m),
            k1: v(),
            k2: v(),
            f1: v(),
            tmp: v(),
            y_new: v(),
            f_new: v(),
            err: v(),
        }
    }
}

impl Scheme for Rosenbrock23 {
    fn error_order(&self) -> i32 {
        3
    }

    fn attempt(&mut self, sys: &MassActionSystem, y: &[f64], f: &[f64], h: f64) -> Result<()> {
        let m = y.len();
        sys.jacobian_into(y, &mut self.jac);
        let mut w = DMatrix::<f64>::identity(m, m);
        w -= &self.jac * (h * self.d);
        let lu = w.lu();
        let solve = |rhs: &[f64]| -> Option<Vec<f64>> {
            lu.solve(&DVector::from_column_slice(rhs)).map(|v| v.as_slice().to_vec())
        };
        // Singular W: report as a failed (rejected) attempt.
        let fail = |s: &mut Self| {
            s.err.iter_mut().for_each(|e| *e = f64::INFINITY);
            Ok(())
        };
        let Some(k1) = solve(f) else { return fail(self) };
        self.k1 = k1;
        for i in 0..m {
            self.tmp[i] = y[i] + 0.5 * h * self.k1[i];
        }
        sys.rhs_into(&self.tmp, &mut self.f1);
        let r: Vec<f64> = (0..m).map(|i| self.f1[i] - self.k1[i]).collect();
        let Some(mut k2) = solve(&r) else { return fail(self) };
        for i in 0..m {
            k2[i] += self.k1[i];
            self.y_new[i] = y[i] + h * k2[i];
        }
        self.k2 = k2;
        sys.rhs_into(&self.y_new, &mut self.f_new);
        let r: Vec<f64> = (0..m)
            .map(|i| self.f_new[i] - self.e32 * (self.k2[i] - self.f1[i]) - 2.0 * (self.k1[i] - f[i]))
            .collect();
        let Some(k3) = solve(&r) else { return fail(self) };
        for i in 0..m {
            self.err[i] = h / 6.0 * (self.k1[i] - 2.0 * self.k2[i] + k3[i]);
        }
        Ok(())
    }

    fn y_new(&self) -> &[f64] {
        &self.y_new
    }

    fn f_new(&self) -> &[f64] {
        &self.f_new
    }

    fn err(&self) -> &[f64] {
        &self.err
    }

    fn interpolate(&self, y: &[f64], h: f64, theta: f64, out: &mut [f64]) {
        let den = 1.0 - 2.0 * self.d;
        let a = theta * (1.0 - theta) / den;
        let b = theta * (theta - 2.0 * self.d) / den;
        for i in 0..out.len() {
            out[i] = y[i] + h * (a * self.k1[i] + b * self.k2[i]);
        }
    }
}

fn scaled_norm(err: &[f64], y: &[f64], y_new: &[f64], rtol: f64, atol: f64) -> f64 {
    if err.is_empty() {
        return 0.0;
    }
    let s: f64 = err
        .iter()
        .zip(y.iter().zip(y_new))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / err.len() as f64).sqrt()
}

fn initial_step(sys: &MassActionSystem, y: &[f64], f: &[f64], order: i32, opts: &OdeOptions, span: f64) -> f64 {
    let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let norm = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            (v.iter().zip(&sc).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        }
    };
    let (d0, d1) = (norm(y), norm(f));
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }.min(span);
    let y1: Vec<f64> = y.iter().zip(f).map(|(a, b)| a + h0 * b).collect();
    let f1 = sys.rhs(&y1);
    let diff: Vec<f64> = f1.iter().zip(f).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / order as f64)
    };
    (100.0 * h0).min(h1).min(span)
}

pub(crate) fn integrate_system(
    sys: &MassActionSystem,
    c0: &[f64],
    (t0, t1): (f64, f64),
    opts: &OdeOptions,
) -> Result<OdeTrajectory> {
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("time span ({t0}, {t1}) must satisfy t1 > t0")));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidArgument("rtol and atol must be positive".into()));
    }
    if let Some(h) = opts.fixed_step {
        if !(h > 0.0) {
            return Err(Error::InvalidArgument("fixed step must be positive".into()));
        }
    }
    let samples = match &opts.samples {
        None => None,
        Some(s) => {
            if s.windows(2).any(|w| !(w[1] > w[0])) || s.iter().any(|&x| x < t0 || x > t1) {
                return Err(Error::InvalidArgument(format!(
                    "sample times must be strictly increasing and within [{t0}, {t1}]"
                )));
            }
            Some(s.clone())
        }
    };
    let m = sys.dim();
    let mut scheme: Box<dyn Scheme> = match opts.method {
        Method::ExplicitAdaptive => Box::new(Dopri5::new(m)),
        Method::Stiff => Box::new(Rosenbrock23::new(m)),
    };
    let order = scheme.error_order();

    let mut traj = OdeTrajectory {
        times: Vec::new(),
        states: Vec::new(),
        solver: opts.method.name().to_string(),
        accepted: 0,
        rejected: 0,
        rtol: opts.rtol,
        atol: opts.atol,
    };
    let mut next_sample = 0;
    let record_initial = |traj: &mut OdeTrajectory, next: &mut usize| match &samples {
        None => {
            traj.times.push(t0);
            traj.states.push(c0.to_vec());
        }
        Some(s) => {
            while *next < s.len() && s[*next] <= t0 {
                traj.times.push(s[*next]);
                traj.states.push(c0.to_vec());
                *next += 1;
            }
        }
    };
    record_initial(&mut traj, &mut next_sample);

    let mut t = t0;
    let mut y = c0.to_vec();
    let mut f = sys.rhs(&y);
    let mut h = opts
        .fixed_step
        .or(opts.initial_step)
        .unwrap_or_else(|| initial_step(sys, &y, &f, order, opts, t1 - t0));
    let neg_limit = -opts.atol;
    // PI controller constants (Hairer & Wanner).
    let beta = if order == 5 { 0.04 } else { 0.0 };
    let expo = 1.0 / order as f64 - 0.75 * beta;
    let safe = 0.9;
    let mut fac_old: f64 = 1e-4;
    let mut buf = vec![0.0; m];

    while t < t1 {
        if traj.accepted + traj.rejected >= opts.max_steps {
            return Err(Error::MaxStepsExceeded { max_steps: opts.max_steps, t });
        }
        let last = t + h >= t1 || (t1 - (t + h)) <= 1e-12 * t1.abs().max(1.0);
        if last {
            h = t1 - t;
        }
        scheme.attempt(sys, &y, &f, h)?;
        let err = if opts.fixed_step.is_some() {
            0.0
        } else {
            scaled_norm(scheme.err(), &y, scheme.y_new(), opts.rtol, opts.atol)
        };
        let negative = opts.fixed_step.is_none() && scheme.y_new().iter().any(|&v| v < neg_limit);
        if err.is_finite() && err <= 1.0 && !negative {
            let t_new = if last { t1 } else { t + h };
            match &samples {
                None => {
                    traj.times.push(t_new);
                    traj.states.push(scheme.y_new().to_vec());
                }
                Some(s) => {
                    while next_sample < s.len() && s[next_sample] <= t_new {
                        let theta = ((s[next_sample] - t) / h).clamp(0.0, 1.0);
                        if theta >= 1.0 {
                            buf.copy_from_slice(scheme.y_new());
                        } else {
                            scheme.interpolate(&y, h, theta, &mut buf);
                        }
                        traj.times.push(s[next_sample]);
                        traj.states.push(buf.clone());
                        next_sample += 1;
                    }
                }
            }
            y.copy_from_slice(scheme.y_new());
            f.copy_from_slice(scheme.f_new());
            t = t_new;
            traj.accepted += 1;
            if opts.fixed_step.is_none() {
                let fac11 = err.max(1e-16).powf(expo);
                let fac = (fac11 / fac_old.powf(beta) / safe).clamp(0.2, 10.0);
                fac_old = err.max(1e-4);
                h /= fac;
            }
        } else {
            traj.rejected += 1;
            let shrink = if negative || !err.is_finite() {
                0.5
            } else {
                (err.powf(1.0 / order as f64) / safe).clamp(1.0, 10.0).recip()
            };
            h *= shrink;
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl};
    use crate::structure::conservation_laws;

    fn decay() -> (ReactionNetwork, RateAssignment) {
        (network_from_dsl("A -> B").unwrap(), RateAssignment::ones(1))
    }

    #[test]
    fn linear_decay_both_methods() {
        let (net, k) = decay();
        for (method, tol) in [(Method::ExplicitAdaptive, 1e-8), (Method::Stiff, 1e-5)] {
            let opts = OdeOptions { method, rtol: tol, atol: tol * 1e-2, ..Default::default() };
            let tr = integrate(&net, &k, &[1.0, 0.0], (0.0, 1.0), &opts).unwrap();
            assert_eq!(*tr.times.last().unwrap(), 1.0);
            assert!((tr.last()[0] - (-1f64).exp()).abs() < 10.0 * tol, "{method:?} {:?}", tr.last());
        }
    }

    #[test]
    fn dense_output_hits_samples() {
        let (net, k) = decay();
        let samples: Vec<f64> = (0..=10).map(|i| i as f64 * 0.3).collect();
        for method in [Method::ExplicitAdaptive, Method::Stiff] {
            let opts = OdeOptions { method, rtol: 1e-7, atol: 1e-10, samples: Some(samples.clone()), ..Default::default() };
            let tr = integrate(&net, &k, &[1.0, 0.0], (0.0, 3.0), &opts).unwrap();
            assert_eq!(tr.times, samples);
            let tol = if method == Method::Stiff { 1e-4 } else { 1e-6 };
            for (t, s) in tr.times.iter().zip(&tr.states) {
                assert!((s[0] - (-t).exp()).abs() < tol, "{method:?} t={t}");
            }
        }
    }

    #[test]
    fn fixed_step_order() {
        let (net, k) = decay();
        let err = |h: f64, method| {
            let opts = OdeOptions { method, fixed_step: Some(h), ..Default::default() };
            let tr = integrate(&net, &k, &[1.0, 0.0], (0.0, 1.0), &opts).unwrap();
            (tr.last()[0] - (-1f64).exp()).abs()
        };
        let r5 = err(0.1, Method::ExplicitAdaptive) / err(0.05, Method::ExplicitAdaptive);
        assert!(r5 > 25.0, "dopri5 ratio {r5}");
        let r2 = err(0.1, Method::Stiff) / err(0.05, Method::Stiff);
        assert!(r2 > 3.5, "rosenbrock ratio {r2}");
    }

    #[test]
    fn conservation_and_nonnegativity_on_envz() {
        let b = load_builtin("envz-ompr").unwrap();
        let laws = conservation_laws(&b.network);
        for method in [Method::ExplicitAdaptive, Method::Stiff] {
            let opts = OdeOptions { method, rtol: 1e-6, atol: 1e-9, ..Default::default() };
            let tr = integrate(&b.network, &b.rates, &b.initial, (0.0, 20.0), &opts).unwrap();
            for s in &tr.states {
                assert!(s.iter().all(|&v| v >= -10.0 * opts.atol));
                for w in &laws {
                    assert!((w.evaluate(s) - w.evaluate(&b.initial)).abs() <= 10.0 * opts.atol);
                }
            }
        }
    }

    #[test]
    fn errors() {
        let (net, k) = decay();
        let opts = OdeOptions { max_steps: 3, ..Default::default() };
        assert!(matches!(
            integrate(&net, &k, &[1.0, 0.0], (0.0, 100.0), &opts),
            Err(Error::MaxStepsExceeded { max_steps: 3, .. })
        ));
        assert!(integrate(&net, &k, &[1.0, 0.0], (1.0, 1.0), &OdeOptions::default()).is_err());
    }
}
