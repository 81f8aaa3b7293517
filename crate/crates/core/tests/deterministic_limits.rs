use spatial_sir::det::{det_run, frontier_layer_sequences};
use spatial_sir::fixed_points::{solve_ell1, solve_kappa};
use spatial_sir::{InitialCondition, RecordPolicy};

fn frontier(theta: f64, gamma: f64, n: usize) -> Vec<f64> {
    let run = det_run(&InitialCondition::Point { gamma }, theta, n, &RecordPolicy::Final).unwrap();
    let s = run.final_state();
    (0..=n).map(|m| s.infected.get((n - m) as i64, m as i64)).collect()
}

#[test]
fn cone_dichotomy_for_several_theta() {
    let n = 300;
    for theta in [2.5, 3.5] {
        let kappa = solve_kappa(theta).unwrap();
        let ell = solve_ell1(theta).unwrap();
        for (m, v) in frontier(theta, 0.3, n).into_iter().enumerate() {
            let s = m as f64 / n as f64;
            if s > kappa + 0.05 && s < 1.0 - kappa - 0.05 {
                assert!((v - ell).abs() < 0.01, "theta={theta} m={m}: {v} vs {ell}");
            } else if s < kappa - 0.05 || s > 1.0 - kappa + 0.05 {
                assert!(v < 0.01, "theta={theta} m={m}: {v}");
            }
        }
    }
}

#[test]
fn uniform_convergence_above_four() {
    let theta = 5.0;
    let ell = solve_ell1(theta).unwrap();
    let n = 300;
    let worst = frontier(theta, 0.2, n)
        .into_iter()
        .enumerate()
        .filter(|&(m, _)| m >= n / 10 && m <= n - n / 10)
        .map(|(_, v)| (v - ell).abs())
        .fold(0.0, f64::max);
    assert!(worst < 0.01, "{worst}");
}

#[test]
fn subcritical_frontier_vanishes() {
    for theta in [0.5, 1.0, 1.25] {
        let y = frontier_layer_sequences(theta, 1.0, 3, 400).unwrap();
        for i in 1..=3 {
            assert!(y.get(i, 400) < 1e-6, "theta={theta} layer {i}: {}", y.get(i, 400));
        }
    }
}

#[test]
fn diagonal_line_frontier_matches_layer_recursion() {
    let (theta, gamma, n) = (2.0, 0.4, 30usize);
    let half = n as i64 + 5;
    let run = det_run(&InitialCondition::DiagLine { gamma, half_length: 2 * half }, theta, n, &RecordPolicy::Final)
        .unwrap();
    let y = frontier_layer_sequences(theta, gamma, 1, n).unwrap();
    let s = run.final_state();
    // away from the ends of the line the frontier is translation invariant
    for m in -5..=5 {
        let v = s.infected.get(n as i64 - m, m);
        assert!((v - y.get(1, n)).abs() < 1e-12, "m={m}: {v} vs {}", y.get(1, n));
    }
}
