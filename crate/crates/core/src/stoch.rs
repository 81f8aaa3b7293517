//! The stochastic SIR process with `N` individuals per site.
//!
//! Given generation `t`, the new infections at `x` are
//! `Bin(S_t(x), 1 - (1 - p)^{I~_t(x)})`, independently over sites, where
//! `I~` sums the infected over `x` and its four neighbours and
//! `p = (1 + theta) / (5 N)`. Infected individuals recover after one
//! generation.
//!
//! Site updates draw from a counter-based stream keyed by
//! `(seed, replicate, x, y, t)`, so runs are reproducible bit for bit and
//! independent of scheduling.

use std::io::Write;

use rayon::prelude::*;

use crate::binomial::sample_binomial;
use crate::det::InitialCondition;
use crate::error::{domain, Result, SirError};
use crate::field::{CountField, RecordPolicy, Window};
use crate::fixed_points::{solve_iota, solve_kappa};
use crate::params::ModelParams;
use crate::rng::StreamKey;
use crate::stats::{mean_ci95, proportion_ci95};

/// Site budget for one replicate's window.
pub const DEFAULT_MAX_SITES: usize = 1 << 26;

const TAG_INFECTION: u32 = 1;
const UNSET: u32 = u32::MAX;

/// One time slice: infected and recovered counts over a common window.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: usize,
    pub infected: CountField,
    pub recovered: CountField,
}

impl SimState {
    pub fn initial(ic: &InitialCondition, n: u32) -> Result<Self> {
        let infected = ic.count_field(n)?;
        let recovered = CountField::zeros(*infected.window());
        Ok(Self { t: 0, infected, recovered })
    }

    pub fn total_infected(&self) -> u64 {
        self.infected.total()
    }
}

/// One generation of the process on a dense window, growing it by one site
/// in every direction. Draws match [`Simulator`] exactly for equal keys.
pub fn sim_step(state: &SimState, params: &ModelParams, key: &StreamKey) -> SimState {
    let n = params.village_size();
    let window = state.infected.window().dilate(1);
    let mut infected = CountField::zeros(window);
    let recovered = state.recovered.resized(window);
    let mut recovered_next = recovered.clone();
    for (idx, (x, y)) in window.sites().enumerate() {
        let here = state.infected.get(x, y);
        let pressure = u64::from(here)
            + u64::from(state.infected.get(x - 1, y))
            + u64::from(state.infected.get(x + 1, y))
            + u64::from(state.infected.get(x, y - 1))
            + u64::from(state.infected.get(x, y + 1));
        let susceptible = n - here - recovered.values()[idx];
        recovered_next.values_mut()[idx] += here;
        if pressure > 0 && susceptible > 0 {
            let mut rng = key.site(x, y, state.t as u32, TAG_INFECTION);
            let q = params.infection_probability(pressure);
            infected.values_mut()[idx] = sample_binomial(&mut rng, susceptible, q);
        }
    }
    SimState { t: state.t + 1, infected, recovered: recovered_next }
}

/// Sparse engine for long runs: a dense window covering every site the
/// epidemic can reach, updated only around currently infected sites.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: ModelParams,
    key: StreamKey,
    window: Window,
    width: usize,
    height: usize,
    infected: Vec<u32>,
    recovered: Vec<u32>,
    stamp: Vec<u32>,
    active: Vec<usize>,
    candidates: Vec<usize>,
    fresh: Vec<(usize, u32)>,
    t: usize,
    current: u64,
    ever: u64,
    first_hit: Vec<u32>,
    extinct_at: Option<usize>,
}

impl Simulator {
    /// Prepares a run of at most `horizon` generations. With `domain`, the
    /// process lives on that box only (sites outside do not exist).
    pub fn new(
        params: ModelParams,
        ic: &InitialCondition,
        horizon: usize,
        seed: u64,
        replicate: u64,
        domain_box: Option<Window>,
    ) -> Result<Self> {
        let start = ic.count_field(params.village_size())?;
        let support = support_window(&start).unwrap_or(Window::point(0, 0));
        let mut window = support.dilate(horizon as i64);
        if let Some(b) = domain_box {
            window = match window.intersect(&b) {
                Some(w) => w,
                None => return domain("initial condition lies outside the domain"),
            };
        }
        if window.len() > DEFAULT_MAX_SITES {
            return Err(SirError::Resource { requested: window.len(), limit: DEFAULT_MAX_SITES });
        }
        let len = window.len();
        let mut sim = Self {
            params,
            key: StreamKey::new(seed, replicate),
            window,
            width: window.width(),
            height: window.height(),
            infected: vec![0; len],
            recovered: vec![0; len],
            stamp: vec![UNSET; len],
            active: Vec::new(),
            candidates: Vec::new(),
            fresh: Vec::new(),
            t: 0,
            current: 0,
            ever: 0,
            first_hit: Vec::new(),
            extinct_at: None,
        };
        for (x, y, v) in start.iter() {
            if v > 0 {
                if let Some(k) = window.index(x, y) {
                    sim.infected[k] = v;
                    sim.active.push(k);
                    sim.current += u64::from(v);
                    sim.note_hit(x + y, 0);
                }
            }
        }
        sim.ever = sim.current;
        if sim.current == 0 {
            sim.extinct_at = Some(0);
        }
        Ok(sim)
    }

    fn note_hit(&mut self, d: i64, t: usize) {
        if d < 0 {
            return;
        }
        let d = d as usize;
        if d >= self.first_hit.len() {
            self.first_hit.resize(d + 1, UNSET);
        }
        if self.first_hit[d] == UNSET {
            self.first_hit[d] = t as u32;
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Individuals infected now.
    pub fn current_infected(&self) -> u64 {
        self.current
    }

    /// Individuals ever infected, including the initial ones.
    pub fn ever_infected(&self) -> u64 {
        self.ever
    }

    pub fn extinct_at(&self) -> Option<usize> {
        self.extinct_at
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    /// Time the antidiagonal `x + y = d` first held an infected individual.
    pub fn first_hit(&self, d: usize) -> Option<usize> {
        self.first_hit.get(d).filter(|&&t| t != UNSET).map(|&t| t as usize)
    }

    /// `K(n) = first_hit(n) - n` for every antidiagonal reached so far.
    pub fn frontier_delay(&self) -> Vec<i64> {
        self.first_hit
            .iter()
            .enumerate()
            .take_while(|(_, &t)| t != UNSET)
            .map(|(d, &t)| t as i64 - d as i64)
            .collect()
    }

    pub fn infected_at(&self, x: i64, y: i64) -> u32 {
        self.window.index(x, y).map_or(0, |k| self.infected[k])
    }

    pub fn recovered_at(&self, x: i64, y: i64) -> u32 {
        self.window.index(x, y).map_or(0, |k| self.recovered[k])
    }

    pub fn snapshot(&self) -> SimState {
        SimState {
            t: self.t,
            infected: CountField::from_values(self.window, self.infected.clone())
                .expect("window length"),
            recovered: CountField::from_values(self.window, self.recovered.clone())
                .expect("window length"),
        }
    }

    #[inline]
    fn neighbours(&self, k: usize) -> impl Iterator<Item = usize> {
        let (i, j) = (k % self.width, k / self.width);
        let (w, h) = (self.width, self.height);
        [
            Some(k),
            (i > 0).then(|| k - 1),
            (i + 1 < w).then(|| k + 1),
            (j > 0).then(|| k - w),
            (j + 1 < h).then(|| k + w),
        ]
        .into_iter()
        .flatten()
    }

    /// Advances one generation. Returns `false` once the epidemic is extinct.
    pub fn step(&mut self) -> bool {
        if self.current == 0 {
            return false;
        }
        let n = self.params.village_size();
        let tag = self.t as u32;
        self.candidates.clear();
        for a in 0..self.active.len() {
            let k = self.active[a];
            for nk in self.neighbours(k) {
                if self.stamp[nk] != tag {
                    self.stamp[nk] = tag;
                    self.candidates.push(nk);
                }
            }
        }
        self.fresh.clear();
        for c in 0..self.candidates.len() {
            let k = self.candidates[c];
            let pressure: u64 = self.neighbours(k).map(|nk| u64::from(self.infected[nk])).sum();
            let susceptible = n - self.infected[k] - self.recovered[k];
            if pressure == 0 || susceptible == 0 {
                continue;
            }
            let (x, y) = self.window.coords(k);
            let mut rng = self.key.site(x, y, tag, TAG_INFECTION);
            let q = self.params.infection_probability(pressure);
            let new = sample_binomial(&mut rng, susceptible, q);
            if new > 0 {
                self.fresh.push((k, new));
            }
        }
        for &k in &self.active {
            self.recovered[k] += self.infected[k];
            self.infected[k] = 0;
        }
        self.active.clear();
        self.t += 1;
        self.current = 0;
        for f in 0..self.fresh.len() {
            let (k, new) = self.fresh[f];
            self.infected[k] = new;
            self.active.push(k);
            self.current += u64::from(new);
            let (x, y) = self.window.coords(k);
            self.note_hit(x + y, self.t);
        }
        self.ever += self.current;
        if self.current == 0 {
            self.extinct_at = Some(self.t);
            return false;
        }
        true
    }
}

fn support_window(f: &CountField) -> Option<Window> {
    f.iter()
        .filter(|&(_, _, v)| v > 0)
        .map(|(x, y, _)| Window::point(x, y))
        .reduce(|a, b| a.union(&b))
}

/// A recorded realization.
#[derive(Debug, Clone)]
pub struct SimRun {
    pub params: ModelParams,
    pub ic: InitialCondition,
    pub seed: u64,
    pub replicate: u64,
    /// Recorded slices in increasing time; the last one is the final state.
    pub slices: Vec<SimState>,
    pub extinct_at: Option<usize>,
    /// `K(n)` for `n = 0, 1, ...` up to the farthest antidiagonal reached.
    pub frontier_delay: Vec<i64>,
}

impl SimRun {
    pub fn final_state(&self) -> &SimState {
        self.slices.last().expect("a run records its final slice")
    }

    pub fn at(&self, t: usize) -> Option<&SimState> {
        self.slices.iter().find(|s| s.t == t)
    }
}

/// Runs `steps` generations (or until extinction), keeping slices per
/// `policy`. Trailing slices count back from the last generation simulated.
pub fn sim_run(
    ic: &InitialCondition,
    params: &ModelParams,
    steps: usize,
    seed: u64,
    policy: &RecordPolicy,
) -> Result<SimRun> {
    sim_run_replicate(ic, params, steps, seed, 0, policy, None)
}

/// As [`sim_run`], for replicate `replicate` and optionally on a finite box.
pub fn sim_run_replicate(
    ic: &InitialCondition,
    params: &ModelParams,
    steps: usize,
    seed: u64,
    replicate: u64,
    policy: &RecordPolicy,
    domain_box: Option<Window>,
) -> Result<SimRun> {
    let mut sim = Simulator::new(*params, ic, steps, seed, replicate, domain_box)?;
    let trailing = policy.trailing();
    let mut slices = Vec::new();
    let keep = |t: usize| policy.keeps(t) || t + trailing > steps;
    if keep(0) {
        slices.push(sim.snapshot());
    }
    while sim.t() < steps && sim.step() {
        if keep(sim.t()) {
            slices.push(sim.snapshot());
        }
    }
    if slices.last().is_none_or(|s| s.t != sim.t()) {
        slices.push(sim.snapshot());
    }
    Ok(SimRun {
        params: *params,
        ic: ic.clone(),
        seed,
        replicate,
        slices,
        extinct_at: sim.extinct_at(),
        frontier_delay: sim.frontier_delay(),
    })
}

/// A named point estimate with its 95% half-width and sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub name: String,
    pub estimate: f64,
    pub ci95: f64,
    pub n: u64,
}

/// Per-replicate outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateSummary {
    pub replicate: u64,
    pub survived: bool,
    pub extinct_at: Option<usize>,
    pub ever_infected: u64,
    /// `K(n*)` at the farthest antidiagonal `n*` reached.
    pub delay: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MonteCarloReport {
    pub n_replicates: u64,
    pub estimates: Vec<Estimate>,
    pub replicates: Vec<ReplicateSummary>,
}

impl MonteCarloReport {
    pub fn get(&self, name: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.name == name)
    }

    fn push(&mut self, name: impl Into<String>, estimate: f64, ci95: f64, n: u64) {
        self.estimates.push(Estimate { name: name.into(), estimate, ci95, n });
    }

    /// CSV with header `name,estimate,ci95,n`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "name,estimate,ci95,n")?;
        for e in &self.estimates {
            writeln!(out, "{},{},{},{}", e.name, e.estimate, e.ci95, e.n)?;
        }
        Ok(())
    }
}

/// Survival estimation settings beyond the model itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalOptions {
    pub seed: u64,
    /// Once this many individuals are infected in one generation the
    /// replicate is classified as surviving without running to the horizon.
    pub extinct_threshold: Option<u64>,
}

fn run_to_horizon(
    params: &ModelParams,
    ic: &InitialCondition,
    t_max: usize,
    seed: u64,
    replicate: u64,
    stop_at: Option<u64>,
) -> Result<ReplicateSummary> {
    let mut sim = Simulator::new(*params, ic, t_max, seed, replicate, None)?;
    while sim.t() < t_max && sim.step() {
        if stop_at.is_some_and(|s| sim.current_infected() >= s) {
            break;
        }
    }
    let delay = sim.frontier_delay().last().copied();
    Ok(ReplicateSummary {
        replicate,
        survived: sim.current_infected() > 0,
        extinct_at: sim.extinct_at(),
        ever_infected: sim.ever_infected(),
        delay,
    })
}

/// Fraction of replicates with infected individuals left at `t_max`.
///
/// The report holds `survival` and the reference value (`iota` for a single
/// initial infection, `1` otherwise) under `reference`.
pub fn estimate_survival(
    params: &ModelParams,
    ic: &InitialCondition,
    t_max: usize,
    n_reps: u64,
    options: SurvivalOptions,
) -> Result<MonteCarloReport> {
    if n_reps == 0 {
        return domain("need at least one replicate");
    }
    let replicates: Vec<ReplicateSummary> = (0..n_reps)
        .into_par_iter()
        .map(|r| run_to_horizon(params, ic, t_max, options.seed, r, options.extinct_threshold))
        .collect::<Result<_>>()?;
    let survived = replicates.iter().filter(|r| r.survived).count() as u64;
    let mut report = MonteCarloReport { n_replicates: n_reps, ..Default::default() };
    report.push(
        "survival",
        survived as f64 / n_reps as f64,
        proportion_ci95(survived, n_reps),
        n_reps,
    );
    let reference = match ic {
        InitialCondition::Unit => solve_iota(params.theta())?,
        _ => 1.0,
    };
    report.push("reference", reference, 0.0, n_reps);
    report.replicates = replicates;
    Ok(report)
}

/// Delay `K` at the farthest antidiagonal, single initial infection.
///
/// Replicates run in order until `n_survivors` survive to `t_max`. The
/// report has `p_delay_i` (fraction of all replicates with `K = i`, which
/// tends to `l^(i+1)`), `p_delay_i_given_survival`, `survival`, and the
/// total conditional mass `mass_given_survival`.
pub fn delay_distribution(
    params: &ModelParams,
    n_survivors: u64,
    t_max: usize,
    seed: u64,
) -> Result<MonteCarloReport> {
    if params.theta() <= 1.5 {
        return domain("the delay distribution is defined for theta > 1.5");
    }
    if n_survivors == 0 {
        return domain("need at least one surviving replicate");
    }
    let ic = InitialCondition::Unit;
    let mut replicates = Vec::new();
    let mut survivors = 0;
    let mut next = 0u64;
    while survivors < n_survivors {
        let batch = (n_survivors - survivors).max(16) * 11 / 10;
        let results: Vec<ReplicateSummary> = (next..next + batch)
            .into_par_iter()
            .map(|r| run_to_horizon(params, &ic, t_max, seed, r, None))
            .collect::<Result<_>>()?;
        next += batch;
        for r in results {
            if survivors == n_survivors {
                break;
            }
            survivors += u64::from(r.survived);
            replicates.push(r);
        }
    }
    let total = replicates.len() as u64;
    let mut counts: Vec<u64> = Vec::new();
    for r in replicates.iter().filter(|r| r.survived) {
        let k = r.delay.unwrap_or(0).max(0) as usize;
        if k >= counts.len() {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    let mut report = MonteCarloReport { n_replicates: total, ..Default::default() };
    report.push(
        "survival",
        survivors as f64 / total as f64,
        proportion_ci95(survivors, total),
        total,
    );
    for (i, &c) in counts.iter().enumerate() {
        report.push(format!("p_delay_{i}"), c as f64 / total as f64, proportion_ci95(c, total), total);
    }
    let mut mass = 0.0;
    for (i, &c) in counts.iter().enumerate() {
        let p = c as f64 / survivors as f64;
        mass += p;
        report.push(
            format!("p_delay_{i}_given_survival"),
            p,
            proportion_ci95(c, survivors),
            survivors,
        );
    }
    report.push("mass_given_survival", mass, 0.0, survivors);
    report.replicates = replicates;
    Ok(report)
}

/// Ultimate infected proportions `(R + I) / N` at `t_max` at the probe
/// sites. Single-infection runs are conditioned on survival by discarding
/// extinct replicates. Estimates are named `probe_x_y`.
pub fn final_proportion_profile(
    params: &ModelParams,
    ic: &InitialCondition,
    t_max: usize,
    n_reps: u64,
    probes: &[(i64, i64)],
    seed: u64,
) -> Result<MonteCarloReport> {
    if n_reps == 0 {
        return domain("need at least one replicate");
    }
    let condition = matches!(ic, InitialCondition::Unit);
    let n = f64::from(params.village_size());
    let runs: Vec<(ReplicateSummary, Vec<f64>)> = (0..n_reps)
        .into_par_iter()
        .map(|r| {
            let mut sim = Simulator::new(*params, ic, t_max, seed, r, None)?;
            while sim.t() < t_max && sim.step() {}
            let values = probes
                .iter()
                .map(|&(x, y)| f64::from(sim.recovered_at(x, y) + sim.infected_at(x, y)) / n)
                .collect();
            let summary = ReplicateSummary {
                replicate: r,
                survived: sim.current_infected() > 0,
                extinct_at: sim.extinct_at(),
                ever_infected: sim.ever_infected(),
                delay: sim.frontier_delay().last().copied(),
            };
            Ok((summary, values))
        })
        .collect::<Result<_>>()?;
    let kept: Vec<&(ReplicateSummary, Vec<f64>)> =
        runs.iter().filter(|(s, _)| !condition || s.survived).collect();
    let mut report = MonteCarloReport { n_replicates: n_reps, ..Default::default() };
    report.push("kept_replicates", kept.len() as f64, 0.0, n_reps);
    for (p, &(x, y)) in probes.iter().enumerate() {
        let xs: Vec<f64> = kept.iter().map(|(_, v)| v[p]).collect();
        let (mean, ci) = mean_ci95(&xs);
        report.push(format!("probe_{x}_{y}"), mean, ci, xs.len() as u64);
    }
    report.replicates = runs.into_iter().map(|(s, _)| s).collect();
    Ok(report)
}

/// Infection proportions on one layer behind the frontier.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerProfile {
    /// Layer index, 1 for the frontier itself.
    pub layer: usize,
    pub mean: f64,
    pub sd: f64,
    pub sites: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierStatistics {
    /// Antidiagonal `x + y = n` examined.
    pub n: usize,
    /// Realized delay `K(n)`.
    pub delay: i64,
    /// Range of `m` used, sites `(m, n - m)`.
    pub m_range: (usize, usize),
    pub layers: Vec<LayerProfile>,
}

/// Layer proportions `I_{n + K(n) + i - 1}(m, n - m) / N` for `m` inside the
/// speed-one cone `((kappa + eps) n, (1 - kappa - eps) n)`, `i = 1..=layers`.
/// Without a cone (`theta <= 1.5`) the range `(eps n, (1 - eps) n)` is used.
pub fn frontier_statistics(
    run: &SimRun,
    n: usize,
    layers: usize,
    eps: f64,
) -> Result<FrontierStatistics> {
    let theta = run.params.theta();
    let Some(&delay) = run.frontier_delay.get(n) else {
        return domain(format!("antidiagonal {n} was never reached"));
    };
    let kappa = if theta > 1.5 { solve_kappa(theta)? } else { 0.0 };
    let lo = ((kappa + eps) * n as f64).ceil() as usize;
    let hi = ((1.0 - kappa - eps) * n as f64).floor() as usize;
    if lo > hi {
        return domain(format!("empty cone for theta = {theta}, eps = {eps}, n = {n}"));
    }
    let big_n = f64::from(run.params.village_size());
    let mut profiles = Vec::with_capacity(layers);
    for i in 1..=layers {
        let t = (n as i64 + delay + i as i64 - 1) as usize;
        let Some(slice) = run.at(t) else {
            return domain(format!("run does not record generation {t}"));
        };
        let xs: Vec<f64> = (lo..=hi)
            .map(|m| f64::from(slice.infected.get(m as i64, (n - m) as i64)) / big_n)
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        profiles.push(LayerProfile { layer: i, mean, sd, sites: xs.len() });
    }
    Ok(FrontierStatistics { n, delay, m_range: (lo, hi), layers: profiles })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: f64, n: u32) -> ModelParams {
        ModelParams::new(theta, n).unwrap()
    }

    #[test]
    fn no_pressure_no_infection() {
        let p = params(2.0, 10);
        let mut s = SimState::initial(&InitialCondition::Unit, 10).unwrap();
        s.infected.set(0, 0, 0);
        let next = sim_step(&s, &p, &StreamKey::new(1, 0));
        assert_eq!(next.infected.total(), 0);
    }

    #[test]
    fn no_susceptibles_no_infection() {
        let p = params(2.0, 4);
        let mut s = SimState::initial(&InitialCondition::Point { gamma: 0.5 }, 4).unwrap();
        s.recovered.set(0, 0, 2);
        for seed in 0..50 {
            let next = sim_step(&s, &p, &StreamKey::new(seed, 0));
            assert_eq!(next.infected.get(0, 0), 0);
            assert_eq!(next.recovered.get(0, 0), 4);
        }
    }

    #[test]
    fn bernoulli_one_step() {
        // N = 1 and theta = 1.5 give p = 1/2; the neighbour of the origin
        // sees exactly one infected individual.
        let p = params(1.5, 1);
        let s = SimState::initial(&InitialCondition::Unit, 1).unwrap();
        let draws = 100_000u64;
        let hits: u64 = (0..draws)
            .map(|r| u64::from(sim_step(&s, &p, &StreamKey::new(5, r)).infected.get(1, 0)))
            .sum();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((hits as f64 - 0.5 * draws as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn engine_matches_dense_step() {
        let p = params(2.0, 20);
        let ic = InitialCondition::Point { gamma: 0.3 };
        let key = StreamKey::new(9, 2);
        let mut dense = SimState::initial(&ic, 20).unwrap();
        let mut sim = Simulator::new(p, &ic, 15, 9, 2, None).unwrap();
        for _ in 0..15 {
            dense = sim_step(&dense, &p, &key);
            sim.step();
            let snap = sim.snapshot();
            for (x, y, v) in dense.infected.iter() {
                assert_eq!(snap.infected.get(x, y), v);
                assert_eq!(snap.recovered.get(x, y), dense.recovered.get(x, y));
            }
        }
    }

    #[test]
    fn run_is_reproducible_and_conserving() {
        let p = params(2.0, 30);
        let ic = InitialCondition::Unit;
        let a = sim_run(&ic, &p, 40, 77, &RecordPolicy::All).unwrap();
        let b = sim_run(&ic, &p, 40, 77, &RecordPolicy::All).unwrap();
        assert_eq!(a.slices, b.slices);
        assert_eq!(a.frontier_delay, b.frontier_delay);
        for w in a.slices.windows(2) {
            for (x, y, r) in w[1].recovered.iter() {
                assert!(r >= w[0].recovered.get(x, y));
                assert!(r + w[1].infected.get(x, y) <= 30);
            }
        }
        for s in &a.slices {
            for (x, y, v) in s.infected.iter() {
                if v > 0 {
                    assert!(x.abs() + y.abs() <= s.t as i64);
                }
            }
        }
        assert!(a.frontier_delay.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(a.extinct_at.is_some(), a.final_state().infected.total() == 0);
    }

    #[test]
    fn trailing_policy_keeps_the_end() {
        let p = params(3.0, 50);
        let ic = InitialCondition::Point { gamma: 0.5 };
        let run = sim_run(&ic, &p, 20, 1, &RecordPolicy::Trailing(3)).unwrap();
        let times: Vec<usize> = run.slices.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![18, 19, 20]);
    }

    #[test]
    fn domain_box_confines_the_epidemic() {
        let p = params(4.0, 5);
        let b = Window::new(0, 1, 0, 1).unwrap();
        let run = sim_run_replicate(
            &InitialCondition::Point { gamma: 1.0 },
            &p,
            10,
            3,
            0,
            &RecordPolicy::All,
            Some(b),
        )
        .unwrap();
        assert_eq!(*run.final_state().infected.window(), b);
    }

    #[test]
    fn survival_report_shape() {
        let p = params(2.0, 50);
        let opts = SurvivalOptions { seed: 4, extinct_threshold: Some(500) };
        let rep = estimate_survival(&p, &InitialCondition::Unit, 60, 64, opts).unwrap();
        let s = rep.get("survival").unwrap();
        assert!((0.0..=1.0).contains(&s.estimate));
        assert_eq!(rep.replicates.len(), 64);
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("name,estimate,ci95,n\n"));
        let again = estimate_survival(&p, &InitialCondition::Unit, 60, 64, opts).unwrap();
        assert_eq!(rep, again);
    }

    #[test]
    fn origin_probe_is_full_under_full_ic2() {
        let p = params(2.0, 40);
        let rep = final_proportion_profile(
            &p,
            &InitialCondition::Point { gamma: 1.0 },
            10,
            8,
            &[(0, 0)],
            1,
        )
        .unwrap();
        assert_eq!(rep.get("probe_0_0").unwrap().estimate, 1.0);
    }
}
