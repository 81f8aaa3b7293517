use anyhow::{bail, Context as _, Result};
use spatial_sir::det::{det_run, frontier_layer_sequences, solve_r_infinity};
use spatial_sir::fixed_points::{ell_sequence, solve_ell1, solve_gamma1, solve_iota, solve_kappa};
use spatial_sir::paths::{growth_rate_check, write_growth_csv};
use spatial_sir::speed::shape_curve;
use spatial_sir::stoch::{
    delay_distribution, estimate_survival, final_proportion_profile, frontier_statistics,
    sim_run_replicate, SurvivalOptions,
};
use spatial_sir::{
    write_pgm, InitialCondition, ModelParams, RealField, RecordPolicy, SirError, Window,
};

use crate::checks::{self, Check};
use crate::config::Section;
use crate::output::Outputs;

pub struct Context {
    pub seed: u64,
    pub paper_scale: bool,
}

/// Result of a command: `false` when it ran but a check inside it failed.
pub type Status = bool;

fn initial_condition(s: &Section, default: &str, gamma: f64) -> Result<InitialCondition> {
    let kind: String = s.get("ic", default.to_string())?;
    let gamma = s.get("gamma", gamma)?;
    let ic = match kind.as_str() {
        "unit" => InitialCondition::Unit,
        "point" => InitialCondition::Point { gamma },
        "line" => InitialCondition::DiagLine { gamma, half_length: s.get("half_length", 10i64)? },
        other => {
            s.ensure("ic", false, &format!("unknown initial condition `{other}` (unit, point, line)"))?;
            unreachable!()
        }
    };
    if let Err(e) = ic.validate() {
        s.ensure("gamma", false, &e.to_string())?;
    }
    Ok(ic)
}

fn record_policy(s: &Section, horizon: usize) -> Result<RecordPolicy> {
    let kind: String = s.get("record", "final".to_string())?;
    let band = s.get("record_band", 8usize)?;
    let times = s.list::<usize>("record_times", &[])?;
    Ok(match kind.as_str() {
        "final" => RecordPolicy::Final,
        "all" => RecordPolicy::All,
        "trailing" => RecordPolicy::Trailing(band),
        "times" => {
            s.ensure("record_times", !times.is_empty() && times.iter().all(|&t| t <= horizon), "need times within the horizon")?;
            RecordPolicy::Times(times)
        }
        other => {
            s.ensure("record", false, &format!("unknown record policy `{other}` (final, all, trailing, times)"))?;
            unreachable!()
        }
    })
}

fn params(s: &Section, theta: f64, n: u32) -> Result<ModelParams> {
    let theta = s.get("theta", theta)?;
    let n = s.get("n", n)?;
    match ModelParams::new(theta, n) {
        Ok(p) => Ok(p),
        Err(e) => {
            s.ensure("theta", false, &e.to_string())?;
            unreachable!()
        }
    }
}

fn write_field(out: &mut Outputs, stem: &str, field: &RealField) -> Result<()> {
    out.write(&format!("{stem}.csv"), |w| field.write_csv(w))?;
    out.write(&format!("{stem}.pgm"), |w| write_pgm(field, w))
}

fn write_rows(out: &mut Outputs, name: &str, header: &str, rows: &[String]) -> Result<()> {
    out.write(name, |w| {
        writeln!(w, "{header}")?;
        rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })
}

fn cell(v: Result<f64, SirError>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn solve(s: &Section, _: &Context, out: &mut Outputs) -> Result<Status> {
    let lo: f64 = s.get("theta_min", 0.1)?;
    let hi = s.get("theta_max", 10.0)?;
    let step = s.get("theta_step", 0.1)?;
    let levels = s.get("levels", 5usize)?;
    s.ensure("theta_min", lo > 0.0 && lo <= hi, "need 0 < theta_min <= theta_max")?;
    s.ensure("theta_step", step > 0.0, "must be positive")?;
    s.ensure("levels", levels >= 1, "must be at least 1")?;
    s.finish()?;
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(count + 1);
    for k in 0..=count {
        // round away the drift of repeated addition so the grid prints cleanly
        let theta = ((lo + k as f64 * step) * 1e10).round() / 1e10;
        let mut row = vec![theta.to_string(), cell(solve_iota(theta)), cell(solve_kappa(theta)), cell(solve_gamma1(theta))];
        match ell_sequence(theta, levels) {
            Ok(t) => row.extend(t.values.iter().map(f64::to_string)),
            Err(_) => row.extend(std::iter::repeat_n("0".to_string(), levels)),
        }
        row.push((theta / (1.0 + theta)).to_string());
        rows.push(row.join(","));
    }
    let ells: Vec<String> = (1..=levels).map(|i| format!("ell{i}")).collect();
    let header = format!("theta,iota,kappa,gamma1,{},herd", ells.join(","));
    write_rows(out, "constants.csv", &header, &rows)?;
    Ok(true)
}

pub fn shape(s: &Section, _: &Context, out: &mut Outputs) -> Result<Status> {
    let thetas = s.list("thetas", &[1.0, 2.0, 5.0])?;
    let samples = s.get("samples", 720usize)?;
    let overlay_t: Option<f64> = s.opt("overlay_t")?;
    s.ensure("thetas", !thetas.is_empty() && thetas.iter().all(|&t| t > 0.0), "need positive values")?;
    s.ensure("samples", samples >= 8, "need at least 8 samples")?;
    s.finish()?;
    for theta in thetas {
        let curve = shape_curve(theta, samples)?;
        out.write(&format!("shape_theta{theta}.csv"), |w| curve.write_csv(w))?;
        if let Some(t) = overlay_t {
            let rows: Vec<String> = curve.overlay(t).iter().map(|(x, y)| format!("{x},{y}")).collect();
            write_rows(out, &format!("overlay_theta{theta}.csv"), "x,y", &rows)?;
        }
    }
    Ok(true)
}

fn resource_hint(e: SirError) -> anyhow::Error {
    match e {
        SirError::Resource { requested, limit } => anyhow::anyhow!(
            "the simulation window needs {requested} sites but the limit is {limit}; \
             lower t, or set box_radius to confine the process"
        ),
        other => other.into(),
    }
}

pub fn simulate(s: &Section, ctx: &Context, out: &mut Outputs) -> Result<Status> {
    let (n, t) = if ctx.paper_scale { (1000, 1000) } else { (200, 300) };
    let params = params(s, 2.0, n)?;
    let horizon = s.get("t", t)?;
    let ic = initial_condition(s, "unit", 0.2)?;
    let policy = record_policy(s, horizon)?;
    let replicate = s.get("replicate", 0u64)?;
    let box_radius: Option<i64> = s.opt("box_radius")?;
    let samples = s.get("overlay_samples", 720usize)?;
    s.ensure("box_radius", box_radius.is_none_or(|r| r >= 0), "must be nonnegative")?;
    s.ensure("overlay_samples", samples >= 8, "need at least 8 samples")?;
    s.finish()?;
    let run = sim_run_replicate(&ic, &params, horizon, ctx.seed, replicate, &policy, box_radius.map(Window::square))
        .map_err(resource_hint)?;
    let n = params.village_size();
    for slice in &run.slices {
        write_field(out, &format!("infected_t{}", slice.t), &slice.infected.proportions(n))?;
        write_field(out, &format!("recovered_t{}", slice.t), &slice.recovered.proportions(n))?;
    }
    let last = run.final_state();
    let curve = shape_curve(params.theta(), samples)?;
    let overlay: Vec<String> = curve.overlay(last.t as f64).iter().map(|(x, y)| format!("{x},{y}")).collect();
    write_rows(out, "overlay.csv", "x,y", &overlay)?;
    let delays: Vec<String> = run.frontier_delay.iter().enumerate().map(|(d, k)| format!("{d},{k}")).collect();
    write_rows(out, "delay.csv", "n,delay", &delays)?;
    // plateau of the ultimate proportion well behind the front
    let reach = last.t as i64 / 2;
    let inner: Vec<f64> = last
        .recovered
        .iter()
        .filter(|(x, y, _)| x.abs() + y.abs() <= reach)
        .map(|(x, y, r)| f64::from(r + last.infected.get(x, y)) / f64::from(n))
        .collect();
    let plateau = inner.iter().sum::<f64>() / inner.len().max(1) as f64;
    let rows = vec![
        format!("final_t,{}", last.t),
        format!("extinct_at,{}", run.extinct_at.map(|t| t.to_string()).unwrap_or_default()),
        format!("ever_infected,{}", last.recovered.total() + last.infected.total()),
        format!("interior_proportion,{plateau}"),
        format!("iota,{}", solve_iota(params.theta())?),
    ];
    write_rows(out, "summary.csv", "name,value", &rows)?;
    Ok(true)
}

pub fn det(s: &Section, ctx: &Context, out: &mut Outputs) -> Result<Status> {
    let theta = s.get("theta", 2.0)?;
    let steps = s.get("steps", if ctx.paper_scale { 1000 } else { 300usize })?;
    let ic = initial_condition(s, "point", 0.2)?;
    let policy = record_policy(s, steps)?;
    let levels = s.get("layers", 5usize)?;
    let layer_n = s.get("layer_n", 200usize)?;
    let with_r = s.get("r_infinity", true)?;
    let radius = s.get("box_radius", 150i64)?;
    let tol = s.get("tol", 1e-9)?;
    s.ensure("theta", theta > 0.0, "must be positive")?;
    s.ensure("layers", levels >= 1, "must be at least 1")?;
    s.ensure("box_radius", radius >= 1, "must be at least 1")?;
    s.ensure("tol", tol > 0.0, "must be positive")?;
    if matches!(ic, InitialCondition::Unit) {
        s.ensure("ic", false, "the deterministic model needs a proportion (point or line)")?;
    }
    s.finish()?;

    let run = det_run(&ic, theta, steps, &policy)?;
    for slice in &run.slices {
        write_field(out, &format!("det_infected_t{}", slice.t), &slice.infected)?;
        write_field(out, &format!("det_recovered_t{}", slice.t), &slice.recovered)?;
    }
    let last = run.final_state();
    let n = last.t;
    let ell = solve_ell1(theta)?;
    let front: Vec<String> = (0..=n)
        .map(|m| {
            let v = last.infected.get((n - m) as i64, m as i64);
            format!("{m},{},{v},{}", m as f64 / n.max(1) as f64, v - ell)
        })
        .collect();
    write_rows(out, "frontier.csv", "m,s,value,minus_ell", &front)?;

    let gamma = match ic {
        InitialCondition::Point { gamma } | InitialCondition::DiagLine { gamma, .. } => gamma,
        _ => 1.0,
    };
    let y = frontier_layer_sequences(theta, gamma, levels, layer_n)?;
    let table = ell_sequence(theta, levels).ok();
    let header: Vec<String> = (1..=levels).map(|i| format!("y{i}")).collect();
    let mut rows: Vec<String> = (0..=layer_n)
        .map(|k| {
            let vals: Vec<String> = (1..=levels).map(|i| y.get(i, k).to_string()).collect();
            format!("{k},{}", vals.join(","))
        })
        .collect();
    let limits: Vec<String> =
        (1..=levels).map(|i| table.as_ref().map_or(0.0, |t| t.level(i as i64)).to_string()).collect();
    rows.push(format!("limit,{}", limits.join(",")));
    write_rows(out, "layers.csv", &format!("n,{}", header.join(",")), &rows)?;

    let mut summary = vec![
        format!("iota,{}", solve_iota(theta)?),
        format!("kappa,{}", cell(solve_kappa(theta))),
        format!("ell1,{ell}"),
    ];
    if with_r {
        let i0 = ic.det_field()?;
        let sol = solve_r_infinity(&i0, theta, Window::square(radius), tol)?;
        let axis: Vec<String> = sol
            .axis_profile()
            .into_iter()
            .map(|(r, f)| format!("{r},{f},{}", sol.log_excess.get(r, 0)))
            .collect();
        write_rows(out, "r_infinity_axis.csv", "r,f,log_excess", &axis)?;
        write_field(out, "r_infinity", sol.profile())?;
        summary.push(format!("r_infinity_sweeps,{}", sol.sweeps));
        summary.push(format!("r_infinity_gap,{}", sol.gap));
    }
    write_rows(out, "summary.csv", "name,value", &summary)?;
    Ok(true)
}

pub fn montecarlo(s: &Section, ctx: &Context, out: &mut Outputs) -> Result<Status> {
    let task: String = s.get("task", "survival".to_string())?;
    let default_n = match task.as_str() {
        "delay" => 2000,
        "layers" => 1000,
        _ => 500,
    };
    let params = params(s, 2.0, default_n)?;
    let theta = params.theta();
    match task.as_str() {
        "survival" => {
            let ic = initial_condition(s, "unit", 0.2)?;
            let t_max = s.get("t_max", 200usize)?;
            let reps = s.get("replicates", 2000u64)?;
            let threshold = s.get("extinct_threshold", 5000u64)?;
            s.ensure("replicates", reps > 0, "need at least one replicate")?;
            s.finish()?;
            let opts = SurvivalOptions { seed: ctx.seed, extinct_threshold: (threshold > 0).then_some(threshold) };
            let report = estimate_survival(&params, &ic, t_max, reps, opts)?;
            out.write("report.csv", |w| report.write_csv(w))?;
        }
        "delay" => {
            let survivors = s.get("survivors", 1000u64)?;
            let t_max = s.get("t_max", 60usize)?;
            s.ensure("survivors", survivors > 0, "need at least one survivor")?;
            s.ensure("theta", theta > 1.5, "the delay distribution needs theta > 1.5")?;
            s.finish()?;
            let report = delay_distribution(&params, survivors, t_max, ctx.seed)?;
            out.write("report.csv", |w| report.write_csv(w))?;
            let table = ell_sequence(theta, t_max + 1)?;
            let rows: Vec<String> = (0..=t_max)
                .map_while(|i| {
                    let e = report.get(&format!("p_delay_{i}"))?;
                    Some(format!("{i},{},{},{}", e.estimate, e.ci95, table.level(i as i64 + 1)))
                })
                .collect();
            write_rows(out, "delay_vs_ell.csv", "i,p_delay,ci95,ell_next", &rows)?;
        }
        "profile" => {
            let ic = initial_condition(s, "unit", 0.2)?;
            let t_max = s.get("t_max", 100usize)?;
            let reps = s.get("replicates", 200u64)?;
            let radii = s.list::<i64>("probe_radii", &[0, 10, 20, 40])?;
            s.ensure("replicates", reps > 0, "need at least one replicate")?;
            s.finish()?;
            let probes: Vec<(i64, i64)> = radii.iter().map(|&r| (r, 0)).collect();
            let report = final_proportion_profile(&params, &ic, t_max, reps, &probes, ctx.seed)?;
            out.write("report.csv", |w| report.write_csv(w))?;
        }
        "layers" => {
            let ic = initial_condition(s, "point", 0.2)?;
            let n = s.get("layer_n", 300usize)?;
            let levels = s.get("layers", 4usize)?;
            let eps = s.get("eps", 0.05)?;
            let slack = s.get("max_delay", 20usize)?;
            let replicate = s.get("replicate", 0u64)?;
            s.ensure("layers", levels >= 1, "must be at least 1")?;
            s.finish()?;
            let horizon = n + levels + slack;
            let policy = RecordPolicy::Times((n..=horizon).collect());
            let run = sim_run_replicate(&ic, &params, horizon, ctx.seed, replicate, &policy, None).map_err(resource_hint)?;
            let stats = frontier_statistics(&run, n, levels, eps)
                .context("the run died out or was delayed past max_delay")?;
            let table = ell_sequence(theta, levels).ok();
            let rows: Vec<String> = stats
                .layers
                .iter()
                .map(|l| {
                    let ell = table.as_ref().map_or(0.0, |t| t.level(l.layer as i64));
                    format!("{},{},{},{},{ell}", l.layer, l.mean, l.sd, l.sites)
                })
                .collect();
            write_rows(out, "layers.csv", "layer,mean,sd,sites,ell", &rows)?;
            let summary = vec![
                format!("n,{}", stats.n),
                format!("delay,{}", stats.delay),
                format!("m_lo,{}", stats.m_range.0),
                format!("m_hi,{}", stats.m_range.1),
            ];
            write_rows(out, "summary.csv", "name,value", &summary)?;
        }
        other => {
            s.ensure("task", false, &format!("unknown task `{other}` (survival, delay, profile, layers)"))?;
        }
    }
    Ok(true)
}

fn write_checks(out: &mut Outputs, name: &str, checks: &[Check]) -> Result<Status> {
    let rows: Vec<String> = checks
        .iter()
        .map(|c| format!("{},{},\"{}\"", c.name, if c.pass { "pass" } else { "fail" }, c.detail.replace('"', "'")))
        .collect();
    write_rows(out, name, "check,result,detail", &rows)?;
    for c in checks {
        println!("{:5} {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.pass))
}

pub fn paths(s: &Section, _: &Context, out: &mut Outputs) -> Result<Status> {
    let n_max = s.get("n_max", 12usize)?;
    let power_n = s.get("power_n", 20i64)?;
    let strip_n = s.get("strip_n", 14usize)?;
    let strip_k = s.get("strip_k", 7usize)?;
    let theta = s.get("theta", 2.0)?;
    let dir = s.list::<u32>("direction", &[1, 1])?;
    let v = s.get("v", 0.5)?;
    let ns = s.list::<u64>("growth_n", &[50, 100, 200, 400])?;
    s.ensure("direction", dir.len() == 2 && dir[0] + dir[1] > 0, "need two nonnegative integers, not both zero")?;
    s.ensure("v", v > 0.0 && v <= 1.0, "must lie in (0, 1]")?;
    s.ensure("strip_k", strip_k >= 1, "must be at least 1")?;
    s.finish()?;
    let checks = vec![
        checks::path_counts(n_max),
        checks::lazy_power_sums(power_n),
        checks::strip_counts(strip_n, strip_k),
    ];
    let ok = write_checks(out, "exactness.csv", &checks)?;
    let rows = growth_rate_check(theta, (dir[0], dir[1]), v, &ns)?;
    out.write("growth.csv", |w| write_growth_csv(&rows, w))?;
    Ok(ok)
}

pub fn percolation_check(s: &Section, ctx: &Context, out: &mut Outputs) -> Result<Status> {
    let theta = s.get("theta", 2.0)?;
    let n = s.get("n", 2u32)?;
    let radius = s.get("box_radius", 1i64)?;
    let gamma = s.get("gamma", 0.5)?;
    let seeds = s.get("seeds", 20_000u64)?;
    let alpha = s.get("alpha", 1e-3)?;
    s.ensure("box_radius", (0..=4).contains(&radius), "must lie in 0..=4")?;
    s.ensure("alpha", alpha > 0.0 && alpha < 1.0, "must lie in (0, 1)")?;
    s.ensure("seeds", seeds > 0, "need at least one seed")?;
    s.finish()?;
    if 1.0 + theta > 5.0 * f64::from(n) || theta <= 0.0 {
        bail!("theta = {theta} and n = {n} give an edge probability outside (0, 1]");
    }
    let mut checks = vec![checks::percolation_exact(theta)];
    checks.extend(checks::percolation_statistical(theta, n, radius, gamma, seeds, ctx.seed, alpha)?);
    write_checks(out, "percolation.csv", &checks)
}

pub fn validate(s: &Section, ctx: &Context, out: &mut Outputs) -> Result<Status> {
    let seeds = s.get("seeds", 20_000u64)?;
    s.finish()?;
    let checks = checks::desk_suite(ctx.seed, seeds);
    write_checks(out, "validate.csv", &checks)
}
