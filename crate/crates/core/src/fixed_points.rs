//! Scalar constants defined by fixed-point or implicit equations: the
//! survival probability, the cone parameter, the frontier levels and the
//! boundary-profile recursion of the large-N limit.
//!
//! Every solver brackets its root, bisects to width `1e-14` and then polishes
//! with a few guarded Newton steps.

use crate::error::{domain, Result};
use crate::params::{branching_rate, check_theta};
use crate::roots::bisect_polish;

const EDGE: f64 = 1e-12;
const WIDTH: f64 = 1e-14;

/// `t ln t + (1 - t) ln (1 - t)` with `0 ln 0 = 0`, without a domain check.
pub(crate) fn entropy(t: f64) -> f64 {
    let a = if t > 0.0 { t * t.ln() } else { 0.0 };
    let b = if t < 1.0 { (1.0 - t) * (1.0 - t).ln() } else { 0.0 };
    a + b
}

/// Survival probability of a Galton-Watson tree with Poisson(`1 + theta`)
/// offspring: the root in `(0, 1)` of `1 - x = exp(-(1 + theta) x)`.
pub fn solve_iota(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let r = 1.0 + theta;
    // 1 - x - e^{-rx}, written with expm1 so the small-theta branch keeps its sign.
    let f = |x: f64| -x - (-r * x).exp_m1();
    let df = |x: f64| -1.0 + r * (-r * x).exp();
    bisect_polish(f, df, EDGE, 1.0 - EDGE, WIDTH)
        .ok_or_else(|| crate::SirError::Domain(format!("no survival root for theta = {theta}")))
}

/// Cone parameter: the root in `(0, 1/2]` of
/// `k^k (1 - k)^(1 - k) = (1 + theta) / 5` for `theta` in `(1.5, 4)`, and
/// `0` for `theta >= 4`.
pub fn solve_kappa(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta <= 1.5 {
        return domain(format!("no speed-one cone for theta = {theta} <= 1.5"));
    }
    if theta >= 4.0 {
        return Ok(0.0);
    }
    let target = branching_rate(theta).ln();
    let f = |k: f64| entropy(k) - target;
    let df = |k: f64| (k / (1.0 - k)).ln();
    // The root approaches zero as theta -> 4, so the bracket starts at zero.
    bisect_polish(f, df, 0.0, 0.5, WIDTH)
        .ok_or_else(|| crate::SirError::Domain(format!("no cone root for theta = {theta}")))
}

/// First frontier level `l = 1 - exp(-2 l (1 + theta) / 5)`; zero when
/// `theta <= 1.5`, where zero is the only nonnegative root.
pub fn solve_ell1(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta <= 1.5 {
        return Ok(0.0);
    }
    let c2 = 2.0 * branching_rate(theta);
    let f = |x: f64| -(-c2 * x).exp_m1() - x;
    let df = |x: f64| c2 * (-c2 * x).exp() - 1.0;
    bisect_polish(f, df, EDGE, 1.0 - EDGE, WIDTH)
        .ok_or_else(|| crate::SirError::Domain(format!("no frontier root for theta = {theta}")))
}

/// Limiting infection proportions on the layers behind a speed-one front.
#[derive(Debug, Clone, PartialEq)]
pub struct EllTable {
    pub theta: f64,
    /// `values[i - 1]` is the level of layer `i`.
    pub values: Vec<f64>,
    /// `partial_sums[k - 1]` is the sum of the first `k` levels.
    pub partial_sums: Vec<f64>,
    pub iota: f64,
}

impl EllTable {
    /// Level of layer `i` (1-based); zero for `i < 1` and beyond the table.
    pub fn level(&self, i: i64) -> f64 {
        if i < 1 {
            return 0.0;
        }
        self.values.get((i - 1) as usize).copied().unwrap_or(0.0)
    }

    /// Largest absolute residual of the defining equations over the table.
    pub fn max_residual(&self) -> f64 {
        let c = branching_rate(self.theta);
        (1..=self.values.len() as i64)
            .map(|i| {
                let before = if i >= 2 { self.partial_sums[(i - 2) as usize] } else { 0.0 };
                let rhs = (1.0 - before)
                    * -(-c * (2.0 * self.level(i) + self.level(i - 1) + 2.0 * self.level(i - 2)))
                        .exp_m1();
                (self.level(i) - rhs).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// The first `m` frontier levels for `theta > 1.5`.
pub fn ell_sequence(theta: f64, m: usize) -> Result<EllTable> {
    check_theta(theta)?;
    if theta <= 1.5 {
        return domain(format!("frontier levels vanish for theta = {theta} <= 1.5"));
    }
    if m == 0 {
        return domain("need at least one frontier level");
    }
    let c = branching_rate(theta);
    let mut values: Vec<f64> = Vec::with_capacity(m);
    let mut partial_sums = Vec::with_capacity(m);
    let mut sum = 0.0;
    for i in 0..m {
        let prev1 = if i >= 1 { values[i - 1] } else { 0.0 };
        let prev2 = if i >= 2 { values[i - 2] } else { 0.0 };
        let room = 1.0 - sum;
        let drive = prev1 + 2.0 * prev2;
        let f = |x: f64| room * -(-c * (2.0 * x + drive)).exp_m1() - x;
        let df = |x: f64| 2.0 * c * room * (-c * (2.0 * x + drive)).exp() - 1.0;
        let value = if i == 0 {
            solve_ell1(theta)?
        } else if drive == 0.0 {
            0.0
        } else {
            // The root can fall far below 1e-12 deep in the tail, so the lower
            // end of the bracket is 0, where f is strictly positive.
            let hi = (room - EDGE).max(f64::MIN_POSITIVE);
            bisect_polish(f, df, 0.0, hi, WIDTH).ok_or_else(|| {
                crate::SirError::Domain(format!("no level root at layer {}", i + 1))
            })?
        };
        values.push(value);
        sum += value;
        partial_sums.push(sum);
    }
    Ok(EllTable { theta, values, partial_sums, iota: solve_iota(theta)? })
}

/// Interior fixed point of `x -> 1 - exp(-(1 + theta) x / 5)`, which exists
/// only for `theta > 4`.
pub fn solve_gamma1(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if theta <= 4.0 {
        return domain(format!("no interior fixed point for theta = {theta} <= 4"));
    }
    let c = branching_rate(theta);
    let f = |x: f64| -(-c * x).exp_m1() - x;
    let df = |x: f64| c * (-c * x).exp() - 1.0;
    bisect_polish(f, df, EDGE, 1.0 - EDGE, WIDTH)
        .ok_or_else(|| crate::SirError::Domain(format!("no fixed point for theta = {theta}")))
}

/// Root in `(0, 1)` of `x = 1 - exp(-(1 + theta)(x + a) / 5)` for `a >= 0`
/// and `theta > 4`.
pub(crate) fn boundary_step(theta: f64, a: f64) -> Option<f64> {
    let c = branching_rate(theta);
    let f = |x: f64| -(-c * (x + a)).exp_m1() - x;
    let df = |x: f64| c * (-c * (x + a)).exp() - 1.0;
    bisect_polish(f, df, EDGE, 1.0 - EDGE, WIDTH)
}

/// Limits of the frontier profile next to the axis for a point source when
/// `theta > 4`: `l_0 = gamma_1`, `l_{k+1} = 1 - exp(-(1 + theta)(l_k + l_{k+1}) / 5)`.
/// Returns `l_0 ..= l_k_max`.
pub fn ell_boundary_sequence(theta: f64, k_max: usize) -> Result<Vec<f64>> {
    let first = solve_gamma1(theta)?;
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(first);
    for k in 0..k_max {
        let next = boundary_step(theta, out[k]).ok_or_else(|| {
            crate::SirError::Domain(format!("no boundary root at step {}", k + 1))
        })?;
        out.push(next);
    }
    Ok(out)
}
