//! Bracketed scalar root finding used by the constant solvers.

/// Bisection on `[lo, hi]` down to `width`, followed by up to five Newton
/// steps that are only accepted while they stay inside the final bracket.
///
/// `f` must change sign on the bracket. Returns `None` otherwise.
pub(crate) fn bisect_polish<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, width: f64) -> Option<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..2000 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    let (blo, bhi) = (lo - width, hi + width);
    for _ in 0..5 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - f(x) / d;
        if !(next >= blo && next <= bhi) {
            break;
        }
        if f(next).abs() > f(x).abs() {
            break;
        }
        x = next;
    }
    Some(x)
}

/// Plain bisection for a sign change, with no derivative available.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, width: f64) -> Option<f64> {
    bisect_polish(&f, |_| f64::NAN, lo, hi, width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect_polish(|x| x * x - 2.0, |x| 2.0 * x, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_missing_sign_change() {
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
