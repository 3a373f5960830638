//! Deterministic mass-action kinetics: right-hand side, Jacobian,
//! integrators and stationary points.

mod integrate;
mod stationary;

pub use integrate::{integrate, Method, OdeOptions, OdeTrajectory};
pub use stationary::{stationary_points, StationaryOptions, StationaryPoint};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::network::{RateAssignment, ReactionNetwork};

/// Concentrations below this are rejected as inputs.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Mass-action vector field `dc/dt = sum_r gamma_r k_r c^alpha_r`, compiled to
/// sparse per-step exponent and stoichiometry lists.
#[derive(Clone, Debug)]
pub struct MassActionSystem {
    m: usize,
    k: Vec<f64>,
    reactant: Vec<Vec<(usize, u32)>>,
    change: Vec<Vec<(usize, f64)>>,
}

impl MassActionSystem {
    pub fn new(net: &ReactionNetwork, k: &RateAssignment) -> Result<Self> {
        k.check_len(net)?;
        let m = net.num_species();
        let reactant = net.steps().iter().map(|s| s.reactant.terms().to_vec()).collect();
        let change = (0..net.num_steps())
            .map(|r| {
                net.reaction_vector(r)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, g)| *g != 0)
                    .map(|(i, g)| (i, g as f64))
                    .collect()
            })
            .collect();
        Ok(MassActionSystem { m, k: k.values().to_vec(), reactant, change })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn num_steps(&self) -> usize {
        self.k.len()
    }

    /// Reaction rates `k_r c^alpha_r`, with `0^0 = 1`.
    pub fn rates_into(&self, c: &[f64], out: &mut [f64]) {
        for (r, terms) in self.reactant.iter().enumerate() {
            out[r] = terms.iter().fold(self.k[r], |acc, &(i, e)| acc * c[i].powi(e as i32));
        }
    }

    pub fn rhs_into(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (r, terms) in self.reactant.iter().enumerate() {
            let rate = terms.iter().fold(self.k[r], |acc, &(i, e)| acc * c[i].powi(e as i32));
            if rate != 0.0 {
                for &(i, g) in &self.change[r] {
                    out[i] += g * rate;
                }
            }
        }
    }

    pub fn rhs(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        self.rhs_into(c, &mut out);
        out
    }

    /// `d rhs_i / d c_j` from the monomial exponents.
    pub fn jacobian_into(&self, c: &[f64], jac: &mut DMatrix<f64>) {
        jac.fill(0.0);
        for (r, terms) in self.reactant.iter().enumerate() {
            for (n, &(j, e)) in terms.iter().enumerate() {
                // d/dc_j of k c_j^e prod_{other} c_i^e_i
                let mut d = self.k[r] * e as f64 * c[j].powi(e as i32 - 1);
                for (q, &(i, ei)) in terms.iter().enumerate() {
                    if q != n {
                        d *= c[i].powi(ei as i32);
                    }
                }
                if d != 0.0 {
                    for &(i, g) in &self.change[r] {
                        jac[(i, j)] += g * d;
                    }
                }
            }
        }
    }

    pub fn jacobian(&self, c: &[f64]) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.m, self.m);
        self.jacobian_into(c, &mut jac);
        jac
    }
}

fn check_state(net: &ReactionNetwork, c: &[f64]) -> Result<()> {
    if c.len() != net.num_species() {
        return Err(Error::DimensionMismatch { what: "concentrations", expected: net.num_species(), found: c.len() });
    }
    if let Some((species, &value)) = c.iter().enumerate().find(|(_, v)| !(**v >= -NEGATIVE_TOLERANCE)) {
        return Err(Error::NegativeConcentration { species, value });
    }
    Ok(())
}

/// Mass-action right-hand side at `c`.
pub fn rhs(net: &ReactionNetwork, k: &RateAssignment, c: &[f64]) -> Result<Vec<f64>> {
    check_state(net, c)?;
    Ok(MassActionSystem::new(net, k)?.rhs(c))
}

/// Analytic Jacobian of [`rhs`] at `c`.
pub fn jacobian(net: &ReactionNetwork, k: &RateAssignment, c: &[f64]) -> Result<DMatrix<f64>> {
    check_state(net, c)?;
    Ok(MassActionSystem::new(net, k)?.jacobian(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl};
    use approx::assert_relative_eq;

    #[test]
    fn r1_rhs() {
        let net = load_builtin("wegscheider-irrev").unwrap().network;
        let k = RateAssignment::new(vec![2.0, 3.0]).unwrap();
        let (a, b) = (0.7, 1.3);
        let f = rhs(&net, &k, &[a, b]).unwrap();
        assert_relative_eq!(f[0], -2.0 * a * b + 3.0 * b, epsilon = 1e-15);
        assert_relative_eq!(f[1], 2.0 * a * b - 3.0 * b, epsilon = 1e-15);
        let j = jacobian(&net, &k, &[a, b]).unwrap();
        assert_relative_eq!(j[(0, 0)], -2.0 * b);
        assert_relative_eq!(j[(0, 1)], -2.0 * a + 3.0);
        assert_relative_eq!(j[(1, 0)], 2.0 * b);
        assert_relative_eq!(j[(1, 1)], 2.0 * a - 3.0);
    }

    #[test]
    fn lotka_volterra_rhs() {
        let b = load_builtin("lotka-volterra").unwrap();
        let (x, y) = (600.0, 400.0);
        let f = rhs(&b.network, &b.rates, &[x, y]).unwrap();
        assert_relative_eq!(f[0], x - x * y / 1000.0);
        assert_relative_eq!(f[1], x * y / 1000.0 - y);
    }

    #[test]
    fn linear_jacobian_and_zero_complex() {
        let net = network_from_dsl("A -> B").unwrap();
        let j = jacobian(&net, &RateAssignment::ones(1), &[2.0, 5.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 1.0, 0.0]));
        let inflow = network_from_dsl("0 -> X").unwrap();
        assert_eq!(rhs(&inflow, &RateAssignment::new(vec![0.5]).unwrap(), &[0.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn negative_input_rejected() {
        let net = network_from_dsl("A -> B").unwrap();
        assert!(matches!(
            rhs(&net, &RateAssignment::ones(1), &[-1e-6, 0.0]),
            Err(Error::NegativeConcentration { species: 0, .. })
        ));
        assert!(rhs(&net, &RateAssignment::ones(1), &[-1e-13, 0.0]).is_ok());
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let net = network_from_dsl("2 A + B -> C, C -> A, 0 -> B, 3 B <-> A + C").unwrap();
        let k = RateAssignment::new(vec![1.3, 0.4, 2.0, 0.7, 1.1]).unwrap();
        let c = [0.8, 1.7, 0.3];
        let sys = MassActionSystem::new(&net, &k).unwrap();
        let j = sys.jacobian(&c);
        let h = 1e-6;
        for col in 0..3 {
            let (mut p, mut q) = (c, c);
            p[col] += h;
            q[col] -= h;
            let (fp, fq) = (sys.rhs(&p), sys.rhs(&q));
            for row in 0..3 {
                assert!((j[(row, col)] - (fp[row] - fq[row]) / (2.0 * h)).abs() < 1e-6);
            }
        }
    }
}
