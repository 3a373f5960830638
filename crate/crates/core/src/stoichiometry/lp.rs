//! Exact feasibility of `A x = b, l <= x <= u` over the rationals.
//!
//! The problem is shifted to `x = l + y`, finite upper bounds become
//! equations `y_j + s_j = u_j - l_j`, and phase one of the simplex method with
//! Bland's rule is run on the resulting standard form
//! `[A 0; E I] (y, s) = (b - A l, u - l)`, `(y, s) >= 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bound {
    pub lower: BigRational,
    pub upper: Option<BigRational>,
}

impl Bound {
    pub fn nonnegative() -> Self {
        Bound { lower: BigRational::zero(), upper: None }
    }

    pub fn fixed(v: BigRational) -> Self {
        Bound { lower: v.clone(), upper: Some(v) }
    }

    pub fn at_least(v: BigRational) -> Self {
        Bound { lower: v, upper: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// A feasible point.
    Feasible(Vec<BigRational>),
    /// A vector `z` over the rows of the standard form (equations first, then
    /// one row per finite upper bound in variable order) with `z^T M >= 0` and
    /// `z^T rhs < 0`.
    Infeasible(Vec<BigRational>),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible(_))
    }
}

/// Integer data converted to rationals.
pub fn rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// The standard form described in the module documentation, as dense rows
/// with the right-hand side appended.
pub fn standard_form(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    bounds: &[Bound],
) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let n = bounds.len();
    let upper: Vec<usize> = (0..n).filter(|&j| bounds[j].upper.is_some()).collect();
    let cols = n + upper.len();
    let mut rows = Vec::with_capacity(a.len() + upper.len());
    let mut rhs = Vec::with_capacity(a.len() + upper.len());
    for (row, bi) in a.iter().zip(b) {
        let mut r = row.clone();
        r.resize(cols, BigRational::zero());
        let shift: BigRational = row.iter().zip(bounds).map(|(c, bd)| c * &bd.lower).sum();
        rows.push(r);
        rhs.push(bi - shift);
    }
    for (q, &j) in upper.iter().enumerate() {
        let mut r = vec![BigRational::zero(); cols];
        r[j] = BigRational::one();
        r[n + q] = BigRational::one();
        rows.push(r);
        rhs.push(bounds[j].upper.clone().unwrap() - &bounds[j].lower);
    }
    (rows, rhs)
}

/// Decides feasibility of `a x = b` with `bounds[j].lower <= x_j <= bounds[j].upper`.
pub fn lp_feasible(a: &[Vec<BigRational>], b: &[BigRational], bounds: &[Bound]) -> LpOutcome {
    let n = bounds.len();
    let (rows, rhs) = standard_form(a, b, bounds);
    let m = rows.len();
    let cols = rows.first().map_or(n, Vec::len);
    // Tableau columns: structural, then one artificial per row, then rhs.
    let width = cols + m + 1;
    let mut sign = vec![1i64; m];
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let neg = rhs[i].is_negative();
        sign[i] = if neg { -1 } else { 1 };
        let mut r: Vec<BigRational> = Vec::with_capacity(width);
        for v in &rows[i] {
            r.push(if neg { -v } else { v.clone() });
        }
        for q in 0..m {
            r.push(if q == i { BigRational::one() } else { BigRational::zero() });
        }
        r.push(if neg { -&rhs[i] } else { rhs[i].clone() });
        t.push(r);
    }
    // Reduced costs of the phase-one objective (sum of artificials); the last
    // entry holds minus the objective value.
    let mut d = vec![BigRational::zero(); width];
    for j in (0..cols).chain(std::iter::once(width - 1)) {
        d[j] = -t.iter().map(|r| &r[j]).sum::<BigRational>();
    }
    let mut basis: Vec<usize> = (cols..cols + m).collect();
    while let Some(enter) = (0..cols + m).find(|&j| d[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // Phase one is bounded below by zero, so an entering column always has
        // a positive entry.
        let (p, _) = leave.expect("phase-one objective is bounded");
        let piv = t[p][enter].clone();
        for v in t[p].iter_mut() {
            *v /= &piv;
        }
        let prow = t[p].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != p && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        let f = d[enter].clone();
        for (v, pv) in d.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
        basis[p] = enter;
    }
    if d[width - 1].is_zero() {
        let mut y = vec![BigRational::zero(); cols];
        for (i, &bj) in basis.iter().enumerate() {
            if bj < cols {
                y[bj] = t[i][width - 1].clone();
            }
        }
        let x = (0..n).map(|j| &bounds[j].lower + &y[j]).collect();
        return LpOutcome::Feasible(x);
    }
    // Dual of phase one: y_i = 1 - d(artificial i); z = -y certifies the
    // sign-adjusted system, undo the row signs.
    let cert = (0..m).map(|i| (&d[cols + i] - BigRational::one()) * int(sign[i])).collect();
    LpOutcome::Infeasible(cert)
}

/// Checks a certificate against the standard form of the same problem.
pub fn verify_certificate(
    a: &[Vec<BigRational>],
    b: &[BigRational],
    bounds: &[Bound],
    z: &[BigRational],
) -> bool {
    let (rows, rhs) = standard_form(a, b, bounds);
    if z.len() != rows.len() {
        return false;
    }
    let cols = rows.first().map_or(0, Vec::len);
    let combo_ok = (0..cols).all(|j| !rows.iter().zip(z).map(|(r, zi)| &r[j] * zi).sum::<BigRational>().is_negative());
    combo_ok && rhs.iter().zip(z).map(|(r, zi)| r * zi).sum::<BigRational>().is_negative()
}
