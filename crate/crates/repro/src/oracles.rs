//! Reference computations that share no code with the algorithms they check.

#![allow(clippy::needless_range_loop, clippy::explicit_counter_loop)]

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crnkit::ReactionNetwork;

/// Stationary concentrations of `0 -> X1 <-> ... <-> X8 -> 0` from the
/// closed form, with rates ordered `k0, k1, k-1, ..., k7, k-7, k8`.
pub fn ross_closed_form(rates: &[f64; 16]) -> [f64; 8] {
    let k0 = rates[0];
    let kp = |l: usize| if l == 8 { rates[15] } else { rates[2 * l - 1] };
    let km = |l: usize| rates[2 * l];
    let mut c = [0.0; 8];
    for i in 1..=8 {
        let mut sum = 0.0;
        for j in 1..=9 - i {
            let forward: f64 = (10 - j..=8).map(kp).product();
            let backward: f64 = (i..=8 - j).map(km).product();
            sum += forward * backward;
        }
        let denom: f64 = (i..=8).map(kp).product();
        c[i - 1] = k0 * sum / denom;
    }
    c
}

/// Mass-action right-hand side written out term by term.
pub fn naive_rhs(net: &ReactionNetwork, k: &[f64], c: &[f64]) -> Vec<f64> {
    let alpha = net.alpha();
    let gamma = net.gamma();
    let mut f = vec![0.0; net.num_species()];
    for r in 0..net.num_steps() {
        let mut rate = k[r];
        for (m, cm) in c.iter().enumerate() {
            rate *= cm.powi(alpha.get(m, r) as i32);
        }
        for (m, fm) in f.iter_mut().enumerate() {
            *fm += gamma.get(m, r) as f64 * rate;
        }
    }
    f
}

/// Central finite-difference Jacobian of [`naive_rhs`].
pub fn fd_jacobian(net: &ReactionNetwork, k: &[f64], c: &[f64]) -> Vec<Vec<f64>> {
    let m = c.len();
    let mut jac = vec![vec![0.0; m]; m];
    for j in 0..m {
        let h = 1e-6 * c[j].abs().max(1.0);
        let (mut up, mut down) = (c.to_vec(), c.to_vec());
        up[j] += h;
        down[j] -= h;
        let (fu, fd) = (naive_rhs(net, k, &up), naive_rhs(net, k, &down));
        for i in 0..m {
            jac[i][j] = (fu[i] - fd[i]) / (2.0 * h);
        }
    }
    jac
}

/// Detailed balance by direct solution of the pairwise equations
/// `gamma_p . ln c = ln(k_p / k_-p)` in the least-squares sense. Returns the
/// residual norm and the point `c = exp(y)`.
pub fn log_linear_balance(net: &ReactionNetwork, k: &[f64], pairs: &[(usize, usize)]) -> (f64, Vec<f64>) {
    let m = net.num_species();
    let g = DMatrix::from_fn(pairs.len(), m, |p, i| net.gamma().get(i, pairs[p].0) as f64);
    let d = DVector::from_iterator(pairs.len(), pairs.iter().map(|&(f, b)| (k[f] / k[b]).ln()));
    let svd = g.clone().svd(true, true);
    let y = svd.solve(&d, 1e-12).expect("SVD computed with both factors");
    let res = (&g * &y - &d).norm();
    (res, y.iter().map(|v| v.exp()).collect())
}

/// All nonnegative integer vectors of length `n` with entry sum at most `total`.
pub fn bounded_vectors(n: usize, total: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            let used: u64 = v.iter().sum();
            for x in 0..=total - used {
                let mut u = v.clone();
                u.push(x);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

pub fn apply(gamma: &[Vec<i64>], x: &[u64]) -> Vec<i64> {
    gamma.iter().map(|row| row.iter().zip(x).map(|(g, v)| g * *v as i64).sum()).collect()
}

/// Solutions of `gamma x = w`, `x != 0`, with `sum x <= total` that dominate
/// no other such solution.
pub fn brute_minimal_solutions(gamma: &[Vec<i64>], w: &[i64], total: u64) -> Vec<Vec<u64>> {
    let r = gamma.first().map_or(0, Vec::len);
    let sols: Vec<Vec<u64>> = bounded_vectors(r, total)
        .into_iter()
        .filter(|x| x.iter().any(|&v| v > 0) && apply(gamma, x) == w)
        .collect();
    let mut min: Vec<Vec<u64>> = sols
        .iter()
        .filter(|x| !sols.iter().any(|y| y != *x && x.iter().zip(y).all(|(a, b)| a >= b)))
        .cloned()
        .collect();
    min.sort();
    min
}

/// Unique solution of the square-or-tall system `cols * x = b` if the columns
/// are independent and the system is consistent.
fn solve_exact(cols: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let (m, n) = (b.len(), cols.len());
    let mut a: Vec<Vec<BigRational>> =
        (0..m).map(|i| cols.iter().map(|c| c[i].clone()).chain([b[i].clone()]).collect()).collect();
    let mut row = 0;
    for col in 0..n {
        let p = (row..m).find(|&i| !a[i][col].is_zero())?;
        a.swap(row, p);
        let piv = a[row][col].clone();
        for v in a[row].iter_mut() {
            *v /= &piv;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pr = a[row].clone();
                for (v, q) in a[i].iter_mut().zip(&pr) {
                    *v -= &f * q;
                }
            }
        }
        row += 1;
    }
    if a[n..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| a[i][n].clone()).collect())
}

/// Feasibility of `a x = b, x >= 0` by enumerating every column subset and
/// looking for a nonnegative basic solution.
pub fn vertex_feasible(a: &[Vec<i64>], b: &[i64]) -> bool {
    let n = a.first().map_or(0, Vec::len);
    let q = |v: i64| BigRational::from_integer(BigInt::from(v));
    let bq: Vec<BigRational> = b.iter().map(|&v| q(v)).collect();
    if b.iter().all(|&v| v == 0) {
        return true;
    }
    for mask in 1u32..(1 << n) {
        let cols: Vec<Vec<BigRational>> =
            (0..n).filter(|j| mask >> j & 1 == 1).map(|j| a.iter().map(|row| q(row[j])).collect()).collect();
        if cols.len() > b.len() {
            continue;
        }
        if let Some(x) = solve_exact(&cols, &bq) {
            if x.iter().all(|v| !v.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Cycle existence: `gamma x = 0, sum x = 1, x >= 0` by vertex enumeration.
pub fn cycle_exists(gamma: &[Vec<i64>]) -> bool {
    let r = gamma.first().map_or(0, Vec::len);
    let mut a = gamma.to_vec();
    a.push(vec![1; r]);
    let mut b = vec![0; gamma.len()];
    b.push(1);
    vertex_feasible(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_last_species() {
        let rates = [0.1, 2.0, 0.1, 8.0, 5.0, 3.0, 0.4, 1.0, 1.0, 6.0, 0.5, 4.0, 2.0, 10.0, 1.0, 1.0];
        let c = ross_closed_form(&rates);
        assert!((c[7] - 0.1).abs() < 1e-15);
        // flux balance X7 <-> X8 -> 0
        assert!((rates[13] * c[6] - rates[14] * c[7] - rates[0]).abs() < 1e-12);
    }

    #[test]
    fn vertex_oracle() {
        assert!(vertex_feasible(&[vec![1, 1]], &[1]));
        assert!(!vertex_feasible(&[vec![1]], &[-1]));
        assert!(cycle_exists(&[vec![-1, 1], vec![1, -1]]));
        assert!(!cycle_exists(&[vec![-1, 0], vec![1, -1], vec![0, 1]]));
    }

    #[test]
    fn brute_minimal() {
        let g = vec![vec![-1, 0, 1], vec![1, -1, -1], vec![0, 1, 0]];
        assert_eq!(brute_minimal_solutions(&g, &[-1, 0, 1], 4), vec![vec![1, 1, 0]]);
    }
}
