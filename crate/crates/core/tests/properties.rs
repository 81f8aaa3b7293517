use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use spatial_sir::det::{det_run, det_step};
use spatial_sir::fixed_points::{ell_sequence, solve_iota, solve_kappa};
use spatial_sir::paths::{big_ln, count_lrw, count_srw, log_count_lrw};
use spatial_sir::percolation::{
    bfs_levels, sources_for, EdgeKey, EdgeOracle, PercolationSample, RandomEdges,
};
use spatial_sir::speed::{entropy_h, rate_g, upsilon};
use spatial_sir::stoch::sim_run;
use spatial_sir::{DetState, InitialCondition, ModelParams, RealField, RecordPolicy, Window};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn custom_ic() -> impl Strategy<Value = InitialCondition> {
    prop::collection::vec(0.0f64..=1.0, 9).prop_map(|v| {
        InitialCondition::Custom(RealField::from_values(Window::square(1), v).unwrap())
    })
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn iota_root_and_bounds(theta in 0.05f64..10.0) {
        let iota = solve_iota(theta).unwrap();
        prop_assert!((1.0 - iota - (-(1.0 + theta) * iota).exp()).abs() < 1e-12);
        prop_assert!(iota > theta / (1.0 + theta));
    }

    #[test]
    fn iota_increasing(a in 0.05f64..10.0, b in 0.05f64..10.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(solve_iota(lo).unwrap() < solve_iota(hi).unwrap());
    }

    #[test]
    fn kappa_root_and_decreasing(a in 1.51f64..3.99, b in 1.51f64..3.99) {
        let ka = solve_kappa(a).unwrap();
        let c = (1.0 + a) / 5.0;
        prop_assert!((entropy_h(ka).unwrap() - c.ln()).abs() < 1e-12);
        prop_assert!(ka > 0.0 && ka < 0.5);
        prop_assume!((a - b).abs() > 1e-6);
        let kb = solve_kappa(b).unwrap();
        prop_assert_eq!(a < b, ka > kb);
    }

    #[test]
    fn ell_levels_are_consistent(theta in 1.55f64..8.0) {
        let t = ell_sequence(theta, 120).unwrap();
        prop_assert!(t.max_residual() < 1e-12);
        prop_assert!(t.values.iter().all(|&v| (0.0..1.0).contains(&v)));
        prop_assert!(t.partial_sums.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(t.partial_sums.iter().all(|&s| s <= t.iota + 1e-12));
        prop_assert!(t.values[119] <= t.values[60]);
    }

    #[test]
    fn g_increasing_in_v(phi in 0.0f64..(2.0 * PI), v in 0.01f64..0.99, dv in 0.005f64..0.01) {
        prop_assert!(rate_g(v, phi).unwrap() < rate_g(v + dv, phi).unwrap());
    }

    #[test]
    fn g_has_lattice_symmetry(phi in 0.0f64..(2.0 * PI), v in 0.01f64..1.0) {
        let g = rate_g(v, phi).unwrap();
        for other in [-phi, FRAC_PI_2 - phi, phi + FRAC_PI_2, PI - phi, phi + PI] {
            prop_assert!((rate_g(v, other).unwrap() - g).abs() < 1e-12);
        }
    }

    #[test]
    fn upsilon_monotone_in_theta(phi in 0.0f64..FRAC_PI_2, a in 0.2f64..6.0, b in 0.2f64..6.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (ul, uh) = (upsilon(lo, phi).unwrap(), upsilon(hi, phi).unwrap());
        prop_assert!(ul > 0.0 && uh <= 1.0);
        prop_assert!(ul <= uh + 1e-9);
    }

    #[test]
    fn srw_symmetry(n in 0i64..40, m in -40i64..=40, l in -40i64..=40) {
        let base = count_srw(m, l, n).unwrap().value;
        for (a, b) in [(-m, l), (m, -l), (-m, -l), (l, m)] {
            prop_assert_eq!(&count_srw(a, b, n).unwrap().value, &base);
        }
    }

    #[test]
    fn lrw_log_matches_exact(n in 1u64..60, m in 0i64..30, l in 0i64..30) {
        prop_assume!((m + l) as u64 <= n);
        let exact = count_lrw(m, l, n as i64).unwrap();
        let ln = log_count_lrw(m, l, n);
        let want = big_ln(&exact.value);
        prop_assert!(((ln - want) / want.abs().max(1.0)).abs() < 1e-10, "{} vs {}", ln, want);
    }
}

fn check_det_bounds(state: &DetState) -> Result<(), TestCaseError> {
    for (x, y, i) in state.infected.iter() {
        let r = state.recovered.get(x, y);
        prop_assert!((0.0..=1.0).contains(&i) && (0.0..=1.0).contains(&r));
        prop_assert!(i + r <= 1.0 + 1e-12);
    }
    Ok(())
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn det_bounds_and_recovered_monotone(ic in custom_ic(), theta in 0.5f64..8.0) {
        let run = det_run(&ic, theta, 12, &RecordPolicy::All).unwrap();
        for w in run.slices.windows(2) {
            check_det_bounds(&w[1])?;
            for (x, y, r) in w[0].recovered.iter() {
                prop_assert!(w[1].recovered.get(x, y) >= r - 1e-15);
            }
        }
        let again = det_step(&run.slices[0], theta).unwrap();
        prop_assert_eq!(again.infected.values(), run.slices[1].infected.values());
    }

    #[test]
    fn det_frontier_monotone_in_ic(g1 in 0.01f64..1.0, g2 in 0.01f64..1.0, theta in 1.0f64..6.0) {
        let (lo, hi) = if g1 < g2 { (g1, g2) } else { (g2, g1) };
        let n = 20usize;
        let run = |g| {
            det_run(&InitialCondition::DiagLine { gamma: g, half_length: 3 }, theta, n, &RecordPolicy::All).unwrap()
        };
        let (a, b) = (run(lo), run(hi));
        for t in 0..=n {
            let (sa, sb) = (a.at(t).unwrap(), b.at(t).unwrap());
            for m in -(t as i64) - 3..=(t as i64) + 3 {
                let (x, y) = (t as i64 - m, m);
                prop_assert!(sa.infected.get(x, y) <= sb.infected.get(x, y) + 1e-15);
            }
        }
    }

    #[test]
    fn det_point_symmetry(gamma in 0.01f64..=1.0, theta in 0.5f64..8.0) {
        let run = det_run(&InitialCondition::Point { gamma }, theta, 15, &RecordPolicy::Final).unwrap();
        let f = &run.final_state().infected;
        for (x, y, v) in f.iter() {
            for (a, b) in [(-x, y), (x, -y), (y, x), (-y, -x)] {
                prop_assert!((f.get(a, b) - v).abs() < 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn stoch_conservation_speed_limit_determinism(
        theta in 0.5f64..6.0,
        n in 1u32..40,
        gamma in 0.05f64..=1.0,
        seed in any::<u64>(),
    ) {
        prop_assume!((1.0 + theta) / (5.0 * n as f64) <= 1.0);
        let params = ModelParams::new(theta, n).unwrap();
        let ic = InitialCondition::Point { gamma };
        let steps = 25;
        let run = sim_run(&ic, &params, steps, seed, &RecordPolicy::All).unwrap();
        for w in run.slices.windows(2) {
            let (prev, s) = (&w[0], &w[1]);
            for (x, y, i) in s.infected.iter() {
                let r = s.recovered.get(x, y);
                prop_assert!(i + r <= n);
                prop_assert!(r >= prev.recovered.get(x, y));
                if i > 0 {
                    prop_assert!((x.abs() + y.abs()) as usize <= s.t);
                }
            }
        }
        prop_assert!(run.frontier_delay.windows(2).all(|w| w[1] >= w[0]));
        let last = run.final_state();
        prop_assert_eq!(run.extinct_at.is_some(), last.infected.total() == 0);
        let again = sim_run(&ic, &params, steps, seed, &RecordPolicy::All).unwrap();
        prop_assert_eq!(again.slices.len(), run.slices.len());
        for (a, b) in again.slices.iter().zip(&run.slices) {
            let (ai, ar) = (a.infected.resized(*b.infected.window()), a.recovered.resized(*b.recovered.window()));
            prop_assert_eq!(ai.values(), b.infected.values());
            prop_assert_eq!(ar.values(), b.recovered.values());
        }
    }

    #[test]
    fn percolation_edges_stable_and_levels_grow(seed in any::<u64>(), n in 1u32..4, theta in 0.5f64..4.0) {
        let params = ModelParams::new(theta, n).unwrap();
        let b = Window::square(2);
        let sample = PercolationSample::new(b, n, RandomEdges::new(&params, seed, 0));
        let edges = sample.edges();
        let first: Vec<bool> = edges.iter().map(|&e| sample.oracle.is_open(e)).collect();
        let second: Vec<bool> = edges.iter().rev().map(|&e| sample.oracle.is_open(e)).collect();
        prop_assert!(first.iter().eq(second.iter().rev()));
        let u = EdgeKey::undirected((0, 0, 0), (1, 0, 0));
        let v = EdgeKey::undirected((1, 0, 0), (0, 0, 0));
        prop_assert_eq!(u, v);
        let sources = sources_for(&InitialCondition::Point { gamma: 1.0 }, n).unwrap();
        let levels = bfs_levels(&sample, &sources).unwrap();
        for w in levels.recovered.windows(2) {
            for (x, y, r) in w[0].iter() {
                prop_assert!(w[1].get(x, y) >= r);
            }
        }
    }
}
