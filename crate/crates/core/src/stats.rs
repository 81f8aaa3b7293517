//! Goodness-of-fit and interval helpers for the Monte Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

const MIN_EXPECTED: f64 = 5.0;

/// Groups consecutive cells until each group's weight reaches `MIN_EXPECTED`;
/// a light trailing group is merged into the previous one.
fn pooled_groups(weights: &[f64]) -> Vec<std::ops::Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if acc >= MIN_EXPECTED {
            groups.push(start..i + 1);
            start = i + 1;
            acc = 0.0;
        }
    }
    if start < weights.len() {
        match groups.last_mut() {
            Some(last) => last.end = weights.len(),
            None => groups.push(0..weights.len()),
        }
    }
    groups
}

fn upper_tail(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(stat)).unwrap_or(f64::NAN)
}

/// Pearson goodness of fit of `observed` against `expected` counts, with
/// cells pooled so each expected count is at least 5.
pub fn chi_square_p_value(observed: &[u64], expected: &[f64]) -> f64 {
    assert_eq!(observed.len(), expected.len());
    let groups = pooled_groups(expected);
    let mut stat = 0.0;
    for g in &groups {
        let o: f64 = observed[g.clone()].iter().map(|&v| v as f64).sum();
        let e: f64 = expected[g.clone()].iter().sum();
        if e > 0.0 {
            stat += (o - e).powi(2) / e;
        } else if o > 0.0 {
            return 0.0;
        }
    }
    upper_tail(stat, groups.len().saturating_sub(1))
}

/// Pearson test that two samples of counts over the same categories come
/// from one law. Cells are pooled on the combined counts.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    let total = na + nb;
    // pool so that both expected counts reach the minimum
    let weights: Vec<f64> =
        a.iter().zip(b).map(|(&x, &y)| (x + y) as f64 * na.min(nb) / total).collect();
    let groups = pooled_groups(&weights);
    let mut stat = 0.0;
    for g in &groups {
        let oa: f64 = a[g.clone()].iter().map(|&v| v as f64).sum();
        let ob: f64 = b[g.clone()].iter().map(|&v| v as f64).sum();
        let col = oa + ob;
        if col == 0.0 {
            continue;
        }
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb;
    }
    upper_tail(stat, groups.len().saturating_sub(1))
}

/// Half-width of the normal-approximation 95% interval for a proportion.
pub fn proportion_ci95(successes: u64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::NAN;
    }
    let p = successes as f64 / trials as f64;
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// Sample mean and the half-width of its normal-approximation 95% interval.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooling() {
        assert_eq!(pooled_groups(&[1.0, 2.0, 3.0, 10.0, 1.0]), vec![0..3, 3..5]);
        assert_eq!(pooled_groups(&[1.0, 1.0]), vec![0..2]);
    }

    #[test]
    fn perfect_fit_has_p_one() {
        let p = chi_square_p_value(&[10, 20, 30], &[10.0, 20.0, 30.0]);
        assert!((p - 1.0).abs() < 1e-12);
        assert!(chi_square_p_value(&[60, 0, 0], &[20.0, 20.0, 20.0]) < 1e-10);
    }

    #[test]
    fn known_statistic() {
        // stat = 4 with 1 degree of freedom: P(X > 4) = 2 (1 - Phi(2))
        let p = chi_square_p_value(&[60, 40], &[50.0, 50.0]);
        assert!((p - 0.045_500_263_896_358).abs() < 1e-9, "{p}");
    }

    #[test]
    fn two_sample() {
        assert!(chi_square_two_sample(&[50, 50], &[500, 500]) > 0.99);
        assert!(chi_square_two_sample(&[90, 10], &[10, 90]) < 1e-10);
    }

    #[test]
    fn intervals() {
        assert!((proportion_ci95(50, 100) - 0.098).abs() < 1e-12);
        let (m, h) = mean_ci95(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((h - 1.96 / 3f64.sqrt()).abs() < 1e-12);
    }
}
