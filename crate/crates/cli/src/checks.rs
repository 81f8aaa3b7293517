//! Desk-scale invariant and oracle checks shared by `validate`, `paths` and
//! `percolation-check`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_4, TAU};

use anyhow::Result;
use num_bigint::BigUint;
use spatial_sir::det::{det_run, frontier_layer_sequences};
use spatial_sir::fixed_points::{ell_sequence, solve_iota, solve_kappa};
use spatial_sir::paths::{
    count_lrw, count_oriented_strip, count_srw, dp_lrw_counts, dp_srw_counts, dp_strip_counts,
    growth_rate_check,
};
use spatial_sir::percolation::{
    exact_percolation_law, exact_sir_law, oriented_frontier, sir_from_percolation,
    PercolationSample, RandomEdges,
};
use spatial_sir::speed::{direction_ratio_a, entropy_h, rate_g, shape_curve};
use spatial_sir::stats::chi_square_two_sample;
use spatial_sir::stoch::sim_run_replicate;
use spatial_sir::{InitialCondition, ModelParams, RecordPolicy, Window};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, pass: bool, detail: impl Into<String>) -> Check {
    Check { name, pass, detail: detail.into() }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> Check {
    check(name, false, format!("error: {e}"))
}

pub fn path_counts(n_max: usize) -> Check {
    let mut cases = 0usize;
    let mut bad = 0usize;
    for n in 0..=n_max {
        let (s, l) = (dp_srw_counts(n), dp_lrw_counts(n));
        let ni = n as i64;
        for m in -ni..=ni {
            for k in -(ni - m.abs())..=(ni - m.abs()) {
                let (y, x) = ((k + ni) as usize, (m + ni) as usize);
                cases += 2;
                bad += usize::from(count_srw(m, k, ni).ok().map(|c| c.value) != Some(s[y][x].clone()));
                bad += usize::from(count_lrw(m, k, ni).ok().map(|c| c.value) != Some(l[y][x].clone()));
            }
        }
    }
    check("path_counts", bad == 0, format!("{cases} closed forms against the transfer DP, {bad} mismatches"))
}

pub fn lazy_power_sums(n_max: i64) -> Check {
    let bad: Vec<i64> = (0..=n_max)
        .filter(|&n| {
            let mut total = BigUint::from(0u32);
            for m in -n..=n {
                for k in -(n - m.abs())..=(n - m.abs()) {
                    total += count_lrw(m, k, n).map(|c| c.value).unwrap_or_default();
                }
            }
            total != BigUint::from(5u32).pow(n as u32)
        })
        .collect();
    check("lazy_power_sums", bad.is_empty(), format!("sum of lazy counts = 5^n for n <= {n_max}; failing n: {bad:?}"))
}

pub fn strip_counts(n_max: usize, k_max: usize) -> Check {
    let mut bad = 0usize;
    let mut cases = 0usize;
    for k in 1..=k_max {
        for n in 0..=n_max {
            let dp = dp_strip_counts(n, k);
            for m in -(k as i64 - 1)..=(k as i64 - 1) {
                cases += 1;
                let got = count_oriented_strip(m, n as i64, k as i64).ok().map(|c| c.value);
                bad += usize::from(got != Some(dp[(m + k as i64 - 1) as usize].clone()));
            }
        }
    }
    check("strip_counts", bad == 0, format!("{cases} strip counts against the DP, {bad} mismatches"))
}

pub fn percolation_exact(theta: f64) -> Check {
    let run = || -> spatial_sir::Result<(f64, usize, usize)> {
        let params = ModelParams::new(theta, 1)?;
        let b = Window::new(0, 1, 0, 1)?;
        let perc = exact_percolation_law(b, 1, params.p_edge(), &InitialCondition::Unit)?;
        let sir = exact_sir_law(&params, b, &InitialCondition::Unit)?;
        let gap = perc
            .iter()
            .map(|(k, v)| (v - sir.get(k).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max);
        Ok((gap, perc.len(), sir.len()))
    };
    match run() {
        Ok((gap, a, b)) => check(
            "percolation_exact",
            gap < 1e-12 && a == b,
            format!("N=1 on a 2x2 box: {a} vs {b} trajectories, max probability gap {gap:.1e}"),
        ),
        Err(e) => failed("percolation_exact", e),
    }
}

/// Percolation levels against the SIR recursion on a small box: the joint
/// law of the first generation from a point source, and the oriented
/// frontier value `W(1, 0)` from a short antidiagonal.
pub fn percolation_statistical(
    theta: f64,
    n: u32,
    radius: i64,
    gamma: f64,
    seeds: u64,
    seed: u64,
    alpha: f64,
) -> Result<Vec<Check>> {
    let params = ModelParams::new(theta, n)?;
    let b = Window::square(radius);
    let ic = InitialCondition::Point { gamma };
    let mut cats: HashMap<Vec<u32>, (u64, u64)> = HashMap::new();
    for r in 0..seeds {
        let sample = PercolationSample::new(b, n, RandomEdges::new(&params, seed, r));
        let levels = sir_from_percolation(&sample, &ic)?;
        let first = levels.get(1).map_or_else(|| vec![0; b.len()], |s| s.infected.values().to_vec());
        cats.entry(first).or_default().0 += 1;
        let run = sim_run_replicate(&ic, &params, 1, seed ^ 1, r, &RecordPolicy::Final, Some(b))?;
        cats.entry(run.final_state().infected.resized(b).values().to_vec()).or_default().1 += 1;
    }
    let mut keys: Vec<_> = cats.keys().cloned().collect();
    keys.sort();
    let a: Vec<u64> = keys.iter().map(|k| cats[k].0).collect();
    let s: Vec<u64> = keys.iter().map(|k| cats[k].1).collect();
    let p_joint = chi_square_two_sample(&a, &s);

    let line = InitialCondition::DiagLine { gamma, half_length: 1 };
    let b = Window::square(2);
    let (mut wa, mut wb) = (vec![0u64; n as usize + 1], vec![0u64; n as usize + 1]);
    for r in 0..seeds {
        let sample = PercolationSample::new(b, n, RandomEdges::new(&params, seed ^ 2, r));
        wa[oriented_frontier(&sample, &line)?.get(1, 0) as usize] += 1;
        let run = sim_run_replicate(&line, &params, 1, seed ^ 3, r, &RecordPolicy::Final, Some(b))?;
        wb[run.final_state().infected.get(1, 0) as usize] += 1;
    }
    let p_front = chi_square_two_sample(&wa, &wb);
    Ok(vec![
        check(
            "percolation_first_generation",
            p_joint > alpha,
            format!("{seeds} seeds, {} outcome classes, chi-square p = {p_joint:.4}", keys.len()),
        ),
        check("percolation_oriented_frontier", p_front > alpha, format!("{seeds} seeds, chi-square p = {p_front:.4}")),
    ])
}

fn fixed_points() -> Check {
    let mut worst = 0.0f64;
    let mut prev = 0.0;
    let mut ordered = true;
    for k in 1..=100 {
        let theta = k as f64 / 10.0;
        let Ok(iota) = solve_iota(theta) else { return failed("fixed_points", format!("no iota at {theta}")) };
        worst = worst.max((1.0 - iota - (-(1.0 + theta) * iota).exp()).abs());
        ordered &= iota > prev && iota > theta / (1.0 + theta);
        prev = iota;
        if theta > 1.5 && theta < 4.0 {
            let Ok(kappa) = solve_kappa(theta) else { return failed("fixed_points", format!("no kappa at {theta}")) };
            worst = worst.max((entropy_h(kappa).unwrap_or(f64::NAN) - ((1.0 + theta) / 5.0).ln()).abs());
        }
        if theta > 1.5 {
            match ell_sequence(theta, 50) {
                Ok(t) => worst = worst.max(t.max_residual()),
                Err(e) => return failed("fixed_points", e),
            }
        }
    }
    check("fixed_points", worst < 1e-12 && ordered, format!("max residual {worst:.1e} on theta = 0.1..10; iota increasing and above theta/(1+theta): {ordered}"))
}

fn rate_function() -> Check {
    let mut worst = 0.0f64;
    for k in 0..64 {
        let phi = TAU * k as f64 / 64.0;
        let (Ok(g), Ok(h)) = (rate_g(1.0, phi), entropy_h(direction_ratio_a(phi))) else {
            return failed("rate_function", "evaluation failed");
        };
        worst = worst.max((g - h).abs());
    }
    let low = rate_g(1e-6, FRAC_PI_4).map_or(f64::INFINITY, |g| (g - 0.2f64.ln()).abs());
    let growth = growth_rate_check(2.0, (1, 1), 0.5, &[400]).map_or(f64::INFINITY, |r| r[0].gap);
    check(
        "rate_function",
        worst < 1e-10 && low < 1e-3 && growth < 0.05,
        format!("|G(1) - h(a)| <= {worst:.1e}; |G(0+) - ln(1/5)| = {low:.1e}; growth gap at n=400 {growth:.4}"),
    )
}

fn shape() -> Check {
    let (Ok(curve), Ok(kappa)) = (shape_curve(2.0, 720), solve_kappa(2.0)) else {
        return failed("shape", "evaluation failed");
    };
    let n = curve.samples.len();
    let flags: Vec<(bool, bool)> = curve
        .samples
        .iter()
        .map(|&(phi, v)| {
            let (c, s) = (phi.cos().abs(), phi.sin().abs());
            let r = c / (c + s);
            (v == 1.0, kappa <= r && r <= 1.0 - kappa)
        })
        .collect();
    let off = (0..n)
        .filter(|&k| flags[k].0 != flags[k].1)
        .filter(|&k| flags[(k + 1) % n].1 == flags[k].1 && flags[(k + n - 1) % n].1 == flags[k].1)
        .count();
    let asym = (0..n)
        .map(|k| (curve.samples[k].1 - curve.samples[(n - k) % n].1).abs())
        .fold(0.0, f64::max);
    check("shape", off == 0 && asym < 1e-9, format!("cone mismatches away from its edge: {off}; reflection asymmetry {asym:.1e}"))
}

fn deterministic() -> Check {
    let run = det_run(&InitialCondition::Point { gamma: 0.2 }, 2.0, 60, &RecordPolicy::All);
    let layers = frontier_layer_sequences(2.0, 0.5, 5, 200);
    let table = ell_sequence(2.0, 5);
    let (Ok(run), Ok(layers), Ok(table)) = (run, layers, table) else {
        return failed("deterministic", "evaluation failed");
    };
    let bounded = run.slices.iter().all(|s| {
        s.infected.iter().all(|(x, y, i)| {
            let r = s.recovered.get(x, y);
            (0.0..=1.0).contains(&i) && (0.0..=1.0).contains(&r) && i + r <= 1.0 + 1e-12
        })
    });
    let layer_err = (1..=5).map(|i| (layers.get(i, 200) - table.level(i as i64)).abs()).fold(0.0, f64::max);
    check("deterministic", bounded && layer_err < 1e-6, format!("bounds hold: {bounded}; layer limit error {layer_err:.1e}"))
}

fn stochastic() -> Check {
    let run = || -> spatial_sir::Result<(bool, bool, bool)> {
        let params = ModelParams::new(2.0, 50)?;
        let ic = InitialCondition::Point { gamma: 0.1 };
        let a = sim_run_replicate(&ic, &params, 60, 3, 0, &RecordPolicy::All, None)?;
        let b = sim_run_replicate(&ic, &params, 60, 3, 0, &RecordPolicy::All, None)?;
        let mut conserved = true;
        let mut local = true;
        for s in &a.slices {
            for (x, y, i) in s.infected.iter() {
                conserved &= i + s.recovered.get(x, y) <= 50;
                local &= i == 0 || (x.abs() + y.abs()) as usize <= s.t;
            }
        }
        let same = a.slices.len() == b.slices.len()
            && a.slices.iter().zip(&b.slices).all(|(p, q)| p.infected.values() == q.infected.values());
        Ok((conserved, local, same))
    };
    match run() {
        Ok((c, l, d)) => check("stochastic", c && l && d, format!("conservation {c}; speed limit {l}; reproducible {d}")),
        Err(e) => failed("stochastic", e),
    }
}

pub fn desk_suite(seed: u64, seeds: u64) -> Vec<Check> {
    let mut out = vec![
        fixed_points(),
        rate_function(),
        shape(),
        path_counts(12),
        lazy_power_sums(20),
        strip_counts(14, 7),
        deterministic(),
        stochastic(),
        percolation_exact(2.0),
    ];
    match percolation_statistical(2.0, 2, 1, 0.5, seeds, seed, 1e-3) {
        Ok(cs) => out.extend(cs),
        Err(e) => out.push(failed("percolation_statistical", e)),
    }
    out
}
