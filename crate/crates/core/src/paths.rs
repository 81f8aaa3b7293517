//! Exact lattice path counts.
//!
//! Closed forms for simple (`#_S`) and lazy (`#_L`) random walk paths and for
//! up/right oriented paths confined to a strip, each paired with a brute
//! force dynamic-programming count that serves as its oracle.

use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use statrs::function::factorial::ln_binomial;

use crate::error::{domain, Result};
use crate::params::{branching_rate, check_theta};
use crate::speed::rate_g_ratio;

/// An exact nonnegative count with its natural logarithm (`-inf` for 0).
#[derive(Debug, Clone, PartialEq)]
pub struct PathCount {
    pub value: BigUint,
    pub log_value: f64,
}

impl PathCount {
    pub fn new(value: BigUint) -> Self {
        let log_value = big_ln(&value);
        Self { value, log_value }
    }

    pub fn zero() -> Self {
        Self::new(BigUint::zero())
    }
}

/// Natural log of a big integer without overflowing `f64`.
pub fn big_ln(v: &BigUint) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 960 {
        return v.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `C(n, k)` exactly; zero when `k` is outside `0..=n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `C(n, j / 2)` when `j` is even, else zero.
fn half_binomial(n: u64, j: i64) -> BigUint {
    if j % 2 != 0 {
        BigUint::zero()
    } else {
        binomial(n, j / 2)
    }
}

fn check_length(n: i64) -> Result<u64> {
    if n < 0 {
        domain(format!("path length must be nonnegative, got {n}"))
    } else {
        Ok(n as u64)
    }
}

fn srw_value(m: i64, l: i64, n: u64) -> BigUint {
    let ni = n as i64;
    if m.abs() + l.abs() > ni || (ni - m - l).rem_euclid(2) != 0 {
        return BigUint::zero();
    }
    // the rotated coordinates m + l and m - l move independently by +-1
    binomial(n, (ni - (m + l)) / 2) * binomial(n, (ni - (m - l)) / 2)
}

/// Number of `n`-step simple random walk paths from the origin to `(m, l)`.
pub fn count_srw(m: i64, l: i64, n: i64) -> Result<PathCount> {
    let n = check_length(n)?;
    Ok(PathCount::new(srw_value(m, l, n)))
}

/// Number of `n`-step lazy random walk paths (stay or move to one of the
/// four neighbours) from the origin to `(m, l)`: choose the `i` moving steps,
/// then count simple paths of length `i`.
pub fn count_lrw(m: i64, l: i64, n: i64) -> Result<PathCount> {
    let n = check_length(n)?;
    let d = (m.abs() + l.abs()) as u64;
    if d > n {
        return Ok(PathCount::zero());
    }
    let mut total = BigUint::zero();
    let mut i = d;
    while i <= n {
        total += binomial(n, i as i64) * srw_value(m, l, i);
        i += 2;
    }
    Ok(PathCount::new(total))
}

/// `ln #_L(m, l; n)` by log-sum-exp over log-gamma binomials, for lengths
/// where exact integers become expensive.
pub fn log_count_lrw(m: i64, l: i64, n: u64) -> f64 {
    let d = (m.abs() + l.abs()) as u64;
    if d > n {
        return f64::NEG_INFINITY;
    }
    let terms: Vec<f64> = (d..=n)
        .step_by(2)
        .map(|i| {
            let ii = i as i64;
            ln_binomial(n, i)
                + ln_binomial(i, ((ii - (m + l)) / 2) as u64)
                + ln_binomial(i, ((ii - (m - l)) / 2) as u64)
        })
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

/// Number of `n`-step paths with `+-1` steps from `0` to `m` that stay
/// strictly inside `(-k, k)`: the oriented up-left/up-right paths in the
/// strip `(-k, k) x [0, n]`.
///
/// Reflection in the two walls gives the alternating series
/// `sum_j [P(m + 4jk) - P(2k - m + 4jk)]` over all integers `j`, with
/// `P(x) = C(n, (n + x) / 2)`. Its five leading terms
/// `P(m) - P(2k + m) - P(2k - m) + P(4k + m) + P(4k - m)` are already exact
/// when `n < 6k - |m|`; the remaining terms are included here.
pub fn count_oriented_strip(m: i64, n: i64, k: i64) -> Result<PathCount> {
    let nn = check_length(n)?;
    if k <= 0 || m.abs() >= k {
        return domain(format!("endpoint {m} is not inside the strip (-{k}, {k})"));
    }
    if (n - m).rem_euclid(2) != 0 {
        return Ok(PathCount::zero());
    }
    let p = |x: i64| half_binomial(nn, n + x);
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    let reach = n / (4 * k) + 1;
    for j in -reach..=reach {
        plus += p(m + 4 * j * k);
        minus += p(2 * k - m + 4 * j * k);
    }
    Ok(PathCount::new(plus - minus))
}

/// The five-term reflection expression alone (exact for `n < 6k - |m|`).
pub fn oriented_strip_leading_terms(m: i64, n: i64, k: i64) -> Result<i128> {
    let nn = check_length(n)?;
    if k <= 0 || m.abs() >= k {
        return domain(format!("endpoint {m} is not inside the strip (-{k}, {k})"));
    }
    let p = |x: i64| half_binomial(nn, n + x).to_i128().unwrap_or(i128::MAX);
    Ok(p(m) - p(2 * k + m) - p(2 * k - m) + p(4 * k + m) + p(4 * k - m))
}

/// Transfer-matrix counts of walks with the given step set, on the square
/// `[-n, n]^2`; entry `[(l + n)][(m + n)]` counts paths to `(m, l)`.
fn dp_walk(n: usize, lazy: bool) -> Vec<Vec<BigUint>> {
    let size = 2 * n + 1;
    let mut grid = vec![vec![BigUint::zero(); size]; size];
    grid[n][n] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![vec![BigUint::zero(); size]; size];
        for y in 0..size {
            for x in 0..size {
                if grid[y][x].is_zero() {
                    continue;
                }
                let v = &grid[y][x];
                if lazy {
                    next[y][x] += v;
                }
                if x > 0 {
                    next[y][x - 1] += v;
                }
                if x + 1 < size {
                    next[y][x + 1] += v;
                }
                if y > 0 {
                    next[y - 1][x] += v;
                }
                if y + 1 < size {
                    next[y + 1][x] += v;
                }
            }
        }
        grid = next;
    }
    grid
}

/// Brute-force simple random walk counts after `n` steps.
pub fn dp_srw_counts(n: usize) -> Vec<Vec<BigUint>> {
    dp_walk(n, false)
}

/// Brute-force lazy random walk counts after `n` steps.
pub fn dp_lrw_counts(n: usize) -> Vec<Vec<BigUint>> {
    dp_walk(n, true)
}

/// Brute-force counts of `n`-step `+-1` paths confined to `(-k, k)`;
/// entry `[m + k - 1]` for `m` in `-(k - 1)..=(k - 1)`.
pub fn dp_strip_counts(n: usize, k: usize) -> Vec<BigUint> {
    let width = 2 * k - 1;
    let mut row = vec![BigUint::zero(); width];
    row[k - 1] = BigUint::one();
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); width];
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                next[i - 1] += v;
            }
            if i + 1 < width {
                next[i + 1] += v;
            }
        }
        row = next;
    }
    row
}

/// One line of the rate-function comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub n: u64,
    /// Target `(m, l)` after `n` steps.
    pub target: (i64, i64),
    /// `(1/n) ln g_n(m, l)` with `g_n = c^n #_L(m, l; n)`.
    pub lhs: f64,
    /// `ln c - G(v, phi)` at `v = (m + l) / n`.
    pub rhs: f64,
    pub gap: f64,
}

/// Compares the exact growth of `g_n` along the ray through `direction`
/// at speed `v` with the rate function, for each length in `ns`.
pub fn growth_rate_check(
    theta: f64,
    direction: (u32, u32),
    v: f64,
    ns: &[u64],
) -> Result<Vec<GrowthRow>> {
    check_theta(theta)?;
    let (dm, dl) = direction;
    if dm + dl == 0 {
        return domain("direction must be nonzero");
    }
    if !(v > 0.0 && v <= 1.0) {
        return domain(format!("speed {v} outside (0, 1]"));
    }
    let ln_c = branching_rate(theta).ln();
    let a = f64::from(dm.min(dl)) / f64::from(dm + dl);
    ns.iter()
        .map(|&n| {
            let total = (v * n as f64).round() as i64;
            let m = (total as f64 * f64::from(dm) / f64::from(dm + dl)).round() as i64;
            let l = total - m;
            let count = count_lrw(m, l, n as i64)?;
            let lhs = ln_c + count.log_value / n as f64;
            let speed = total as f64 / n as f64;
            let rhs = ln_c - rate_g_ratio(speed, a)?;
            Ok(GrowthRow { n, target: (m, l), lhs, rhs, gap: (lhs - rhs).abs() })
        })
        .collect()
}

/// CSV with header `n,lhs,rhs,gap`.
pub fn write_growth_csv<W: Write>(rows: &[GrowthRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "n,lhs,rhs,gap")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.n, r.lhs, r.rhs, r.gap)?;
    }
    Ok(())
}
