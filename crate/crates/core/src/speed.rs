//! Direction-dependent spreading speed.
//!
//! The speed in direction `phi` is read off the lazy-random-walk rate
//! function `G(v, phi)`, which combines the entropy of the number of lazy
//! steps with the entropies of the two diagonal step counts. `G` rises from
//! `ln(1/5)` at `v = 0` to `h(a(phi))` at `v = 1`, and the speed is the `v`
//! at which it meets the per-step branching factor `ln((1 + theta) / 5)`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use crate::error::{domain, Result};
use crate::fixed_points::entropy;
use crate::params::{branching_rate, check_theta};
use crate::roots::bisect;

const GRID_POINTS: usize = 2000;
const GOLDEN_WIDTH: f64 = 1e-12;
const SPEED_EDGE: f64 = 1e-9;

/// `h(t) = t ln t + (1 - t) ln(1 - t)` on `[0, 1]`, with `0 ln 0 = 0`.
pub fn entropy_h(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("entropy argument {t} outside [0, 1]"));
    }
    Ok(entropy(t))
}

/// Folds any angle onto `[0, pi/4]` using the dihedral symmetry of the lattice.
pub fn fold_angle(phi: f64) -> f64 {
    let r = phi.rem_euclid(FRAC_PI_2);
    r.min(FRAC_PI_2 - r).max(0.0)
}

/// `min(|sin|, |cos|) / (|sin| + |cos|)`, a value in `[0, 1/2]`.
pub fn direction_ratio_a(phi: f64) -> f64 {
    ratio_of_folded(fold_angle(phi))
}

fn ratio_of_folded(psi: f64) -> f64 {
    let (s, c) = psi.sin_cos();
    (s / (s + c)).clamp(0.0, 0.5)
}

/// Rate function `G(v, phi)` for `v` in `(0, 1]`.
pub fn rate_g(v: f64, phi: f64) -> Result<f64> {
    rate_g_ratio(v, direction_ratio_a(phi))
}

/// Rate function expressed through the direction ratio `a` in `[0, 1/2]`.
pub fn rate_g_ratio(v: f64, a: f64) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) {
        return domain(format!("speed argument {v} outside (0, 1]"));
    }
    if !(0.0..=0.5).contains(&a) {
        return domain(format!("direction ratio {a} outside [0, 1/2]"));
    }
    Ok(minimize_over_lazy_fraction(v, a))
}

/// Integrand of the infimum: `t` is the fraction of non-lazy steps.
pub(crate) fn lazy_integrand(t: f64, v: f64, a: f64) -> f64 {
    let x = (0.5 - v / (2.0 * t)).clamp(0.0, 1.0);
    let y = (0.5 - (1.0 - 2.0 * a) * v / (2.0 * t)).clamp(0.0, 1.0);
    entropy(t) + t * (entropy(x) + entropy(y))
}

fn minimize_over_lazy_fraction(v: f64, a: f64) -> f64 {
    let g = |t: f64| lazy_integrand(t, v, a);
    if v >= 1.0 {
        return g(1.0);
    }
    let span = 1.0 - v;
    let node = |k: usize| {
        if k == GRID_POINTS - 1 {
            1.0
        } else {
            v + span * k as f64 / (GRID_POINTS - 1) as f64
        }
    };
    let (best_k, best) = (0..GRID_POINTS)
        .map(|k| (k, g(node(k))))
        .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });

    let mut lo = node(best_k.saturating_sub(1));
    let mut hi = node((best_k + 1).min(GRID_POINTS - 1));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut gc, mut gd) = (g(c), g(d));
    while hi - lo > GOLDEN_WIDTH {
        if gc < gd {
            hi = d;
            d = c;
            gd = gc;
            c = hi - inv_phi * (hi - lo);
            gc = g(c);
        } else {
            lo = c;
            c = d;
            gc = gd;
            d = lo + inv_phi * (hi - lo);
            gd = g(d);
        }
    }
    best.min(g(0.5 * (lo + hi))).min(gc).min(gd)
}

/// Asymptotic speed (in lattice steps per generation, `l1` norm) in
/// direction `phi`.
pub fn upsilon(theta: f64, phi: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(upsilon_ratio(theta, direction_ratio_a(phi)))
}

fn upsilon_ratio(theta: f64, a: f64) -> f64 {
    let target = branching_rate(theta).ln();
    if entropy(a) <= target {
        return 1.0;
    }
    let f = |v: f64| minimize_over_lazy_fraction(v, a) - target;
    // Near tangency the bracket may not close; the speed is then one.
    bisect(f, SPEED_EDGE, 1.0 - SPEED_EDGE, 1e-12).unwrap_or(1.0)
}

/// Sampled limiting shape of the infected region.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCurve {
    pub theta: f64,
    /// `(phi, upsilon)` pairs at equally spaced angles in `[0, 2 pi)`.
    pub samples: Vec<(f64, f64)>,
}

impl ShapeCurve {
    /// Points `T * upsilon(phi) * (cos phi, sin phi) / (|cos phi| + |sin phi|)`,
    /// the predicted frontier after `t` generations.
    pub fn overlay(&self, t: f64) -> Vec<(f64, f64)> {
        self.samples
            .iter()
            .map(|&(phi, v)| {
                let (s, c) = phi.sin_cos();
                let l1 = s.abs() + c.abs();
                (t * v * c / l1, t * v * s / l1)
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "phi,upsilon")?;
        for (phi, v) in &self.samples {
            writeln!(out, "{phi},{v}")?;
        }
        Ok(())
    }
}

/// Samples the speed at `n_samples` equally spaced angles.
///
/// When `n_samples` is a multiple of 8 the folded angle is computed from the
/// sample index, so symmetric samples share one speed evaluation and the
/// curve is exactly symmetric.
pub fn shape_curve(theta: f64, n_samples: usize) -> Result<ShapeCurve> {
    check_theta(theta)?;
    if n_samples < 8 {
        return domain(format!("need at least 8 samples, got {n_samples}"));
    }
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let quarter = n_samples / 4;
    let samples = (0..n_samples)
        .map(|k| {
            let phi = TAU * k as f64 / n_samples as f64;
            let psi = if n_samples.is_multiple_of(8) {
                let j = k % quarter;
                let j = j.min(quarter - j);
                2.0 * PI * j as f64 / n_samples as f64
            } else {
                fold_angle(phi)
            };
            let a = ratio_of_folded(psi);
            let v = *cache.entry(a.to_bits()).or_insert_with(|| upsilon_ratio(theta, a));
            (phi, v)
        })
        .collect();
    Ok(ShapeCurve { theta, samples })
}
