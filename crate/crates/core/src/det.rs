//! The deterministic large-village limit of the epidemic.
//!
//! Each site carries proportions `I` (infected) and `R` (recovered) with
//! `S = 1 - I - R`. One generation maps
//! `I' = S (1 - exp(-c I~))`, `R' = R + I`, where `c = (1 + theta) / 5` and
//! `I~` is the sum of `I` over the site and its four neighbours.

use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use crate::error::{domain, Result, SirError};
use crate::field::{CountField, RealField, RecordPolicy, SliceRecorder, Window};
use crate::fixed_points::solve_iota;
use crate::params::{branching_rate, check_theta};

/// Site budget for deterministic windows (about 1 GiB for the two fields).
pub const DEFAULT_MAX_SITES: usize = 1 << 26;

const MAX_SWEEPS: usize = 100_000;
// Largest change of any log-excess in the last sweep. The excess itself
// converges only about one site per sweep further from the source.
const LOG_DRIFT_TOL: f64 = 1e-10;

const NEIGHBOURS: [(i64, i64); 5] = [(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)];

/// Starting configuration shared by the deterministic and stochastic models.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// One infected individual at the origin (stochastic model only).
    Unit,
    /// A fraction `gamma` of the origin village infected.
    Point { gamma: f64 },
    /// A fraction `gamma` infected at every `(m, -m)` with `|m| <= half_length`.
    DiagLine { gamma: f64, half_length: i64 },
    /// Arbitrary infected proportions.
    Custom(RealField),
}

impl InitialCondition {
    pub fn validate(&self) -> Result<()> {
        let check_gamma = |g: f64| {
            if g > 0.0 && g <= 1.0 {
                Ok(())
            } else {
                domain(format!("gamma must lie in (0, 1], got {g}"))
            }
        };
        match self {
            InitialCondition::Unit => Ok(()),
            InitialCondition::Point { gamma } => check_gamma(*gamma),
            InitialCondition::DiagLine { gamma, half_length } => {
                if *half_length < 0 {
                    return domain("diagonal half-length must be nonnegative");
                }
                check_gamma(*gamma)
            }
            InitialCondition::Custom(f) => {
                if f.values().iter().all(|v| (0.0..=1.0).contains(v)) {
                    Ok(())
                } else {
                    domain("custom initial proportions must lie in [0, 1]")
                }
            }
        }
    }

    /// Infected proportions for the deterministic model.
    pub fn det_field(&self) -> Result<RealField> {
        self.validate()?;
        match self {
            InitialCondition::Unit => {
                domain("a single infected individual has no deterministic limit; use Point")
            }
            InitialCondition::Point { gamma } => {
                let mut f = RealField::zeros(Window::point(0, 0));
                f.set(0, 0, *gamma);
                Ok(f)
            }
            InitialCondition::DiagLine { gamma, half_length } => {
                let l = *half_length;
                let mut f = RealField::zeros(Window::square(l));
                for m in -l..=l {
                    f.set(m, -m, *gamma);
                }
                Ok(f)
            }
            InitialCondition::Custom(f) => Ok(f.clone()),
        }
    }

    /// Infected counts for villages of size `n`; proportions are rounded and
    /// a positive proportion always yields at least one individual.
    pub fn count_field(&self, n: u32) -> Result<CountField> {
        self.validate()?;
        if let InitialCondition::Unit = self {
            let mut f = CountField::zeros(Window::point(0, 0));
            f.set(0, 0, 1);
            return Ok(f);
        }
        let real = self.det_field()?;
        Ok(real.map(|v| {
            if v > 0.0 {
                ((v * n as f64).round() as u32).clamp(1, n)
            } else {
                0
            }
        }))
    }
}

/// One time slice of the deterministic process.
#[derive(Debug, Clone, PartialEq)]
pub struct DetState {
    pub t: usize,
    pub infected: RealField,
    pub recovered: RealField,
}

impl DetState {
    pub fn initial(ic: &InitialCondition) -> Result<Self> {
        let infected = ic.det_field()?;
        let recovered = RealField::zeros(*infected.window());
        Ok(Self { t: 0, infected, recovered })
    }
}

/// Recorded slices of a deterministic run.
#[derive(Debug, Clone)]
pub struct DetRun {
    pub theta: f64,
    pub slices: Vec<DetState>,
}

impl DetRun {
    pub fn final_state(&self) -> &DetState {
        self.slices.last().expect("a run records at least its final slice")
    }

    pub fn at(&self, t: usize) -> Option<&DetState> {
        self.slices.iter().find(|s| s.t == t)
    }
}

/// One generation, growing the window by one site in every direction.
pub fn det_step(state: &DetState, theta: f64) -> Result<DetState> {
    det_step_limited(state, theta, DEFAULT_MAX_SITES)
}

pub fn det_step_limited(state: &DetState, theta: f64, max_sites: usize) -> Result<DetState> {
    check_theta(theta)?;
    let c = branching_rate(theta);
    let window = state.infected.window().dilate(1);
    if window.len() > max_sites {
        return Err(SirError::Resource { requested: window.len(), limit: max_sites });
    }
    let padded = state.infected.resized(window.dilate(1));
    let old_r = state.recovered.resized(window);
    let old_i = state.infected.resized(window);
    let w = window.width();
    let pw = w + 2;
    let pv = padded.values();

    let mut infected = vec![0.0; window.len()];
    infected.par_chunks_mut(w).enumerate().for_each(|(row, out)| {
        let base = (row + 1) * pw + 1;
        for (col, slot) in out.iter_mut().enumerate() {
            let k = base + col;
            let sum = pv[k] + pv[k - 1] + pv[k + 1] + pv[k - pw] + pv[k + pw];
            if sum > 0.0 {
                let idx = row * w + col;
                let s = (1.0 - old_i.values()[idx] - old_r.values()[idx]).max(0.0);
                *slot = s * -(-c * sum).exp_m1();
            }
        }
    });
    let recovered: Vec<f64> = old_r
        .values()
        .iter()
        .zip(old_i.values())
        .map(|(r, i)| (r + i).min(1.0))
        .collect();
    Ok(DetState {
        t: state.t + 1,
        infected: RealField::from_values(window, infected)?,
        recovered: RealField::from_values(window, recovered)?,
    })
}

/// Runs `steps` generations from `ic`, keeping slices per `policy`.
pub fn det_run(
    ic: &InitialCondition,
    theta: f64,
    steps: usize,
    policy: &RecordPolicy,
) -> Result<DetRun> {
    check_theta(theta)?;
    let mut state = DetState::initial(ic)?;
    let mut rec = SliceRecorder::new(policy.clone());
    rec.push(0, &state);
    for _ in 0..steps {
        state = det_step(&state, theta)?;
        rec.push(state.t, &state);
    }
    let slices = rec.finish().into_iter().map(|(_, s)| s).collect();
    Ok(DetRun { theta, slices })
}

/// Frontier layers under a diagonal-line initial condition.
///
/// `get(i, n)` is the infected proportion at time `n` on the antidiagonal
/// `x + y = n + 1 - i`, i.e. `i - 1` steps behind the front; it is zero
/// before the layer is reached (`n < i - 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct LayerMatrix {
    pub theta: f64,
    pub gamma: f64,
    values: Vec<Vec<f64>>,
}

impl LayerMatrix {
    pub fn get(&self, i: usize, n: usize) -> f64 {
        if i == 0 {
            return 0.0;
        }
        self.values.get(i - 1).and_then(|col| col.get(n)).copied().unwrap_or(0.0)
    }

    pub fn i_max(&self) -> usize {
        self.values.len()
    }

    pub fn n_max(&self) -> usize {
        self.values[0].len() - 1
    }

    /// Column `i` over times `0..=n_max`.
    pub fn layer(&self, i: usize) -> &[f64] {
        &self.values[i - 1]
    }
}

/// The reduced recursions for the layers behind the frontier.
///
/// Along a constant diagonal line every antidiagonal is homogeneous, so the
/// two-dimensional recursion collapses to one value per antidiagonal. A site
/// on antidiagonal `d` sees itself once and each of `d - 1`, `d + 1` twice;
/// at `d = 0` both neighbours are the mirror image `d = 1`.
pub fn frontier_layer_sequences(
    theta: f64,
    gamma: f64,
    i_max: usize,
    n_max: usize,
) -> Result<LayerMatrix> {
    check_theta(theta)?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain(format!("gamma must lie in (0, 1], got {gamma}"));
    }
    if i_max == 0 {
        return domain("need at least one layer");
    }
    let c = branching_rate(theta);
    let mut y = vec![vec![0.0; n_max + 1]; i_max];
    y[0][0] = gamma;
    let at = |y: &Vec<Vec<f64>>, i: usize, n: usize| if i == 0 { 0.0 } else { y[i - 1][n] };
    for n in 0..n_max {
        for i in 1..=i_max {
            // entry at time n + 1
            if n + 1 < i - 1 {
                continue;
            }
            let (susceptible, pressure) = if n + 1 == i - 1 {
                let burnt: f64 = (1..i).map(|j| at(&y, j, j - 1)).sum();
                let p = 4.0 * at(&y, i.saturating_sub(2), n) + at(&y, i - 1, n);
                (1.0 - burnt, p)
            } else {
                let burnt: f64 = (1..i).map(|j| at(&y, j, n + 1 + j - i)).sum();
                let p = 2.0 * at(&y, i, n)
                    + at(&y, i - 1, n)
                    + 2.0 * at(&y, i.saturating_sub(2), n);
                (1.0 - burnt, p)
            };
            y[i - 1][n + 1] = susceptible.max(0.0) * -(-c * pressure).exp_m1();
        }
    }
    Ok(LayerMatrix { theta, gamma, values: y })
}

/// `D_{n+1} = I0 + (1 - I0) (1 - exp(-c D~_n))`, the cumulative infection
/// `D_n = R_{n+1}` of the deterministic process.
pub fn cumulative_step(d_n: &RealField, i0: &RealField, theta: f64) -> Result<RealField> {
    check_theta(theta)?;
    let c = branching_rate(theta);
    let window = d_n.window().dilate(1).union(i0.window());
    let mut out = RealField::zeros(window);
    for (idx, (x, y)) in window.sites().enumerate() {
        let sum: f64 = NEIGHBOURS.iter().map(|(dx, dy)| d_n.get(x + dx, y + dy)).sum();
        let i = i0.get(x, y);
        out.values_mut()[idx] = if i >= 1.0 { 1.0 } else { i + (1.0 - i) * -(-c * sum).exp_m1() };
    }
    Ok(out)
}

/// Solution of the ultimate-proportion equation
/// `f = I0 + (1 - I0) (1 - exp(-c f~))` on a finite box.
#[derive(Debug, Clone)]
pub struct RInfinity {
    pub iota: f64,
    /// Limit of the increasing iteration started from `I0`.
    pub lower: RealField,
    /// Limit of the decreasing iteration started from `1`.
    pub upper: RealField,
    /// `ln((upper - I0) / (1 - I0) - iota)` per site; kept separately because
    /// the excess over `iota` decays exponentially and underflows `f64` far
    /// from the source.
    pub log_excess: RealField,
    pub sweeps: usize,
    pub gap: f64,
}

impl RInfinity {
    pub fn profile(&self) -> &RealField {
        &self.upper
    }

    /// `(r, f(r, 0))` along the positive x axis.
    pub fn axis_profile(&self) -> Vec<(i64, f64)> {
        let w = self.upper.window();
        (0.max(w.x_lo)..=w.x_hi).map(|r| (r, self.upper.get(r, 0))).collect()
    }
}

/// Solves the ultimate-proportion equation on `domain`, twice: upward from
/// `I0` and downward from `1`. Sites outside `domain` take the value of the
/// nearest site of the box. Sweeps are in-place and alternate their
/// orientation, which keeps both iterations monotone while letting
/// information cross the box in a few sweeps.
pub fn solve_r_infinity(
    i0: &RealField,
    theta: f64,
    domain_box: Window,
    tol: f64,
) -> Result<RInfinity> {
    check_theta(theta)?;
    if tol.is_nan() || tol <= 0.0 {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    if i0.values().iter().any(|v| !(0.0..=1.0).contains(v)) {
        return domain("initial proportions must lie in [0, 1]");
    }
    let src = i0.resized(domain_box);
    if src.values().iter().all(|&v| v == 0.0) {
        return domain("initial condition has no infection inside the box");
    }
    let c = branching_rate(theta);
    let iota = solve_iota(theta)?;
    let ln_room = (1.0 - iota).ln();
    let ln_c = c.ln();
    let w = domain_box.width();
    let h = domain_box.height();
    let s = src.values();

    let mut u: Vec<f64> = s.to_vec();
    let mut z: Vec<f64> = vec![ln_room; s.len()];
    // ln(f - iota) at a neighbour, from its log-excess
    let term = |k: usize, z: &[f64]| {
        let a = s[k];
        if a == 0.0 {
            z[k]
        } else {
            (a * (1.0 - iota) + (1.0 - a) * z[k].exp()).ln()
        }
    };

    let mut sweeps = 0;
    let mut gap = f64::INFINITY;
    let mut drift = f64::INFINITY;
    while sweeps < MAX_SWEEPS {
        drift = 0.0f64;
        let flip_x = sweeps % 2 == 1;
        let flip_y = (sweeps / 2) % 2 == 1;
        for jr in 0..h {
            let j = if flip_y { h - 1 - jr } else { jr };
            for ir in 0..w {
                let i = if flip_x { w - 1 - ir } else { ir };
                let k = j * w + i;
                let a = s[k];
                if a >= 1.0 {
                    u[k] = 1.0;
                    continue;
                }
                let mut lin = 0.0;
                let mut terms = [0.0f64; 5];
                for (q, (dx, dy)) in NEIGHBOURS.iter().enumerate() {
                    let ni = (i as i64 + dx).clamp(0, w as i64 - 1) as usize;
                    let nj = (j as i64 + dy).clamp(0, h as i64 - 1) as usize;
                    let nk = nj * w + ni;
                    lin += u[nk];
                    terms[q] = term(nk, &z);
                }
                u[k] = a + (1.0 - a) * -(-c * lin).exp_m1();
                let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let ln_w = m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln();
                let ln_e = if ln_w < -30.0 {
                    ln_c + ln_w - 0.5 * c * ln_w.exp()
                } else {
                    (-(-c * ln_w.exp()).exp_m1()).ln()
                };
                let next = ln_room + ln_e;
                drift = drift.max((next - z[k]).abs());
                z[k] = next;
            }
        }
        sweeps += 1;
        gap = 0.0f64;
        for k in 0..s.len() {
            let v = upper_value(s[k], iota, z[k]);
            gap = gap.max(v - u[k]);
        }
        if gap <= tol && drift <= LOG_DRIFT_TOL {
            break;
        }
    }
    if gap > tol || drift > LOG_DRIFT_TOL {
        return Err(SirError::NonConvergence { iterations: sweeps, gap: gap.max(drift) });
    }
    let ring = domain_box
        .sites()
        .enumerate()
        .filter(|(_, (x, y))| domain_box.on_boundary(*x, *y))
        .map(|(k, _)| z[k].exp())
        .fold(0.0, f64::max);
    if ring > 2.0 * tol {
        return domain(format!(
            "box too small: boundary values exceed iota by {ring:e} (tolerance {tol:e})"
        ));
    }
    let upper: Vec<f64> = (0..s.len()).map(|k| upper_value(s[k], iota, z[k])).collect();
    Ok(RInfinity {
        iota,
        lower: RealField::from_values(domain_box, u)?,
        upper: RealField::from_values(domain_box, upper)?,
        log_excess: RealField::from_values(domain_box, z)?,
        sweeps,
        gap,
    })
}

fn upper_value(a: f64, iota: f64, z: f64) -> f64 {
    if a >= 1.0 {
        1.0
    } else {
        (a + (1.0 - a) * (iota + z.exp())).min(1.0)
    }
}

/// `ln g(m, n)` with `g(m, n) = c^(m + n) C(m + n, m)`: the growth of the
/// derivative of the frontier value at `(m, n)` with respect to a perturbation
/// of a zero initial condition. Indexed `[m][n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeField {
    pub theta: f64,
    log_values: Vec<Vec<f64>>,
}

impl DerivativeField {
    pub fn log_value(&self, m: usize, n: usize) -> f64 {
        self.log_values[m][n]
    }

    pub fn value(&self, m: usize, n: usize) -> f64 {
        self.log_values[m][n].exp()
    }
}

pub fn frontier_derivative_field(theta: f64, m_max: usize, n_max: usize) -> Result<DerivativeField> {
    check_theta(theta)?;
    let ln_c = branching_rate(theta).ln();
    let log_values = (0..=m_max)
        .map(|m| {
            (0..=n_max)
                .map(|n| (m + n) as f64 * ln_c + ln_binomial((m + n) as u64, m as u64))
                .collect()
        })
        .collect();
    Ok(DerivativeField { theta, log_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_points::{ell_sequence, solve_ell1, solve_kappa};

    fn point(gamma: f64) -> InitialCondition {
        InitialCondition::Point { gamma }
    }

    #[test]
    fn zero_state_is_absorbing() {
        let ic = InitialCondition::Custom(RealField::zeros(Window::square(2)));
        let s1 = det_step(&DetState::initial(&ic).unwrap(), 2.0).unwrap();
        assert!(s1.infected.values().iter().all(|&v| v == 0.0));
        assert!(s1.recovered.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn one_step_from_a_point() {
        let s1 = det_step(&DetState::initial(&point(0.5)).unwrap(), 2.0).unwrap();
        let q = 1.0 - (-0.6f64 * 0.5).exp();
        assert!((s1.infected.get(1, 0) - q).abs() < 1e-15);
        assert!((s1.infected.get(0, 0) - 0.5 * q).abs() < 1e-15);
        assert_eq!(s1.infected.get(1, 1), 0.0);
        assert_eq!(s1.recovered.get(0, 0), 0.5);
    }

    #[test]
    fn one_step_from_a_line() {
        let theta = 2.0;
        let gamma = 0.7;
        let ic = InitialCondition::DiagLine { gamma, half_length: 5 };
        let s1 = det_step(&DetState::initial(&ic).unwrap(), theta).unwrap();
        let alpha = (0.6f64).exp();
        let expect = 1.0 - alpha.powf(-2.0 * gamma);
        for k in -3..=3 {
            assert!((s1.infected.get(1 - k, k) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn window_limit_is_enforced() {
        let s0 = DetState::initial(&point(0.5)).unwrap();
        let err = det_step_limited(&s0, 2.0, 4).unwrap_err();
        assert!(matches!(err, SirError::Resource { requested: 9, limit: 4 }));
        assert!(DetState::initial(&InitialCondition::Unit).is_err());
    }

    #[test]
    fn line_frontier_limits() {
        let run = |theta: f64| {
            let ic = InitialCondition::DiagLine { gamma: 1.0, half_length: 200 };
            det_run(&ic, theta, 200, &RecordPolicy::Final).unwrap().final_state().infected.get(200, 0)
        };
        assert!((run(2.0) - solve_ell1(2.0).unwrap()).abs() < 1e-8);
        assert!(run(1.0) < 1e-6);
    }

    #[test]
    fn layers_match_full_lattice() {
        let theta = 2.0;
        let ic = InitialCondition::DiagLine { gamma: 1.0, half_length: 40 };
        let run = det_run(&ic, theta, 36, &RecordPolicy::All).unwrap();
        let y = frontier_layer_sequences(theta, 1.0, 6, 36).unwrap();
        for i in 1..=6 {
            for n in 0..=30 {
                let t = n + i - 1;
                let full = run.at(t).unwrap().infected.get(n as i64, 0);
                assert!((y.get(i, t) - full).abs() < 1e-12, "i={i} n={n}");
            }
        }
    }

    #[test]
    fn first_layer_is_scalar_iteration() {
        let y = frontier_layer_sequences(2.0, 0.3, 3, 50).unwrap();
        let mut s = 0.3f64;
        for n in 0..=50 {
            assert!((y.get(1, n) - s).abs() < 1e-15);
            s = 1.0 - (-1.2 * s).exp();
        }
        assert_eq!(y.get(3, 1), 0.0);
    }

    #[test]
    fn layers_converge_to_ell() {
        let table = ell_sequence(2.0, 5).unwrap();
        let y = frontier_layer_sequences(2.0, 1.0, 5, 200).unwrap();
        for i in 1..=5 {
            assert!((y.get(i, 200) - table.level(i as i64)).abs() < 1e-6, "layer {i}");
        }
        let sub = frontier_layer_sequences(1.0, 1.0, 1, 200).unwrap();
        assert!(sub.get(1, 200) < 1e-6);
    }

    #[test]
    fn cumulative_matches_recovered() {
        let theta = 2.0;
        let ic = point(0.5);
        let i0 = ic.det_field().unwrap();
        let run = det_run(&ic, theta, 51, &RecordPolicy::All).unwrap();
        let mut d = i0.clone();
        for n in 0..=50 {
            let r = &run.at(n + 1).unwrap().recovered;
            for (x, y, v) in r.iter() {
                assert!((d.get(x, y) - v).abs() < 1e-12, "n={n}");
            }
            d = cumulative_step(&d, &i0, theta).unwrap();
        }
    }

    #[test]
    fn cumulative_single_step() {
        let zero = RealField::zeros(Window::square(1));
        let d1 = cumulative_step(&zero, &zero, 2.0).unwrap();
        assert!(d1.values().iter().all(|&v| v == 0.0));
        let g = 0.3;
        let i0 = point(g).det_field().unwrap();
        let d1 = cumulative_step(&i0, &i0, 2.0).unwrap();
        let expect = g + (1.0 - g) * (1.0 - (-0.6f64 * g).exp());
        assert!((d1.get(0, 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn r_infinity_small_box() {
        let theta = 2.0;
        let i0 = point(0.2).det_field().unwrap();
        let sol = solve_r_infinity(&i0, theta, Window::square(30), 1e-10).unwrap();
        assert!(sol.gap <= 1e-10);
        let iota = sol.iota;
        // fixed-point residual
        let c = 0.6;
        for (x, y, f) in sol.upper.iter() {
            let w = sol.upper.window();
            let sum: f64 = NEIGHBOURS
                .iter()
                .map(|(dx, dy)| {
                    let (cx, cy) = w.clamp(x + dx, y + dy);
                    sol.upper.get(cx, cy)
                })
                .sum();
            let a = i0.get(x, y);
            assert!((f - (a + (1.0 - a) * (1.0 - (-c * sum).exp()))).abs() < 1e-9);
        }
        // strict lower bound everywhere, via the log-excess
        assert!(sol.log_excess.values().iter().all(|z| z.is_finite()));
        assert!((sol.upper.get(30, 0) - iota).abs() < 1e-12);
        for x in 0..30 {
            for y in 0..30 {
                let here = sol.log_excess.get(x, y);
                assert!(here >= sol.log_excess.get(x + 1, y));
                assert!(here >= sol.log_excess.get(x, y + 1), "{x} {y} {here} {}", sol.log_excess.get(x, y + 1));
            }
        }
    }

    #[test]
    fn r_infinity_errors() {
        let zero = RealField::zeros(Window::square(2));
        assert!(solve_r_infinity(&zero, 2.0, Window::square(5), 1e-9).is_err());
        let i0 = point(0.2).det_field().unwrap();
        assert!(solve_r_infinity(&i0, 2.0, Window::square(2), 1e-9).is_err());
    }

    #[test]
    fn derivative_field_values() {
        let g = frontier_derivative_field(2.0, 3, 3).unwrap();
        assert!((g.value(0, 0) - 1.0).abs() < 1e-15);
        assert!((g.value(1, 1) - 2.0 * 0.36).abs() < 1e-14);
        assert!((g.value(2, 1) - 3.0 * 0.6f64.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn derivative_growth_boundary_is_kappa() {
        let kappa = solve_kappa(2.0).unwrap();
        let total = 1000;
        let g = frontier_derivative_field(2.0, total, total).unwrap();
        let mut boundary = None;
        for m in 0..=total / 2 {
            if g.log_value(m, total - m) > 0.0 {
                boundary = Some(m as f64 / total as f64);
                break;
            }
        }
        let s = boundary.unwrap();
        assert!((s - kappa).abs() < 0.01, "{s} vs {kappa}");
    }
}
