//! Exact binomial sampling.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::rng::SiteRng;

/// Mean below which sequential inversion is used.
const INVERSION_MEAN: f64 = 30.0;

/// One draw from `Bin(n, p)`. Small means use sequential inversion, larger
/// ones the BTPE accept-reject sampler of `rand_distr`; neither approximates.
pub fn sample_binomial(rng: &mut SiteRng, n: u32, p: f64) -> u32 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    if p > 0.5 {
        return n - sample_binomial(rng, n, 1.0 - p);
    }
    if f64::from(n) * p <= INVERSION_MEAN {
        return inversion(rng, n, p);
    }
    let dist = Binomial::new(u64::from(n), p).expect("p lies in (0, 1/2]");
    dist.sample(rng) as u32
}

fn inversion<R: Rng>(rng: &mut R, n: u32, p: f64) -> u32 {
    let q = 1.0 - p;
    let s = p / q;
    let a = f64::from(n + 1) * s;
    let r0 = (f64::from(n) * (-p).ln_1p()).exp();
    loop {
        let mut u: f64 = rng.random();
        let mut r = r0;
        let mut x = 0u32;
        loop {
            if u < r {
                return x;
            }
            u -= r;
            x += 1;
            if x > n {
                // rounding left mass past n; redraw
                break;
            }
            r *= a / f64::from(x) - s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;
    use crate::stats::chi_square_p_value;
    use statrs::distribution::{Binomial as ExactBinomial, Discrete};

    fn check_law(n: u32, p: f64, draws: usize) {
        let key = StreamKey::new(11, u64::from(n));
        let mut rng = key.site(0, 0, 0, 0);
        let mut counts = vec![0u64; n as usize + 1];
        for _ in 0..draws {
            counts[sample_binomial(&mut rng, n, p) as usize] += 1;
        }
        let law = ExactBinomial::new(p, u64::from(n)).unwrap();
        let expected: Vec<f64> = (0..=n).map(|k| law.pmf(u64::from(k)) * draws as f64).collect();
        let pv = chi_square_p_value(&counts, &expected);
        assert!(pv > 1e-3, "n={n} p={p} p-value {pv}");
    }

    #[test]
    fn edge_cases() {
        let mut rng = StreamKey::new(0, 0).site(0, 0, 0, 0);
        assert_eq!(sample_binomial(&mut rng, 0, 0.3), 0);
        assert_eq!(sample_binomial(&mut rng, 10, 0.0), 0);
        assert_eq!(sample_binomial(&mut rng, 10, 1.0), 10);
    }

    #[test]
    fn inversion_matches_law() {
        check_law(3, 0.2, 100_000);
        check_law(40, 0.3, 100_000);
        check_law(1000, 0.001, 100_000);
    }

    #[test]
    fn large_mean_matches_law() {
        check_law(500, 0.4, 100_000);
        check_law(200, 0.85, 100_000);
    }
}
