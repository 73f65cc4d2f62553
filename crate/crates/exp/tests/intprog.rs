use ladmm::Termination;
use ladmm_exp::experiment::run_intprog;
use ladmm_exp::{IntProgConfig, QuadraticTarget};

fn solve(lo: i64, hi: i64, target: QuadraticTarget, mu: f64) -> (f64, f64, f64) {
    let cfg = IntProgConfig {
        lo,
        hi,
        target: Some(target),
        mu,
        ..IntProgConfig::default()
    };
    let run = run_intprog(&cfg, 1, |_| {}).unwrap();
    assert_eq!(run.outcome.termination, Termination::Converged);
    let s = &run.outcome.state;
    (s.x[0], s.y[0], run.outcome.final_record.feas)
}

fn brute_force(lo: i64, hi: i64, t: &QuadraticTarget) -> f64 {
    (lo..=hi)
        .map(|k| k as f64)
        .min_by(|a, b| t.value(*a).partial_cmp(&t.value(*b)).unwrap())
        .unwrap()
}

#[test]
fn target_two_point_three_rounds_to_two() {
    let t = QuadraticTarget::centered(1.0, 2.3);
    let (x, y, feas) = solve(0, 5, t, 1.0);
    assert_eq!(x, 2.0);
    assert_eq!(x, brute_force(0, 5, &t));
    assert!((y - 2.0).abs() < 1e-8 && feas < 1e-8);
}

#[test]
fn target_four_point_nine_rounds_to_five() {
    let t = QuadraticTarget::centered(1.0, 4.9);
    let (x, y, _) = solve(0, 5, t, 1.0);
    assert_eq!(x, 5.0);
    assert!((y - 5.0).abs() < 1e-8);
}

#[test]
fn singleton_set_is_the_answer() {
    for c in [-4.0, 0.0, 3.0, 11.0] {
        let (x, y, _) = solve(3, 3, QuadraticTarget::centered(2.0, c), 0.5);
        assert_eq!(x, 3.0);
        assert!((y - 3.0).abs() < 1e-8);
    }
}

#[test]
fn targets_outside_the_range_clamp() {
    let t = QuadraticTarget::centered(0.7, -2.0);
    assert_eq!(solve(0, 5, t, 2.0).0, 0.0);
    let t = QuadraticTarget::centered(0.7, 9.0);
    assert_eq!(solve(0, 5, t, 2.0).0, 5.0);
}

#[test]
fn concave_target_picks_best_endpoint() {
    let t = QuadraticTarget { a: -0.5, b: 2.0, c: 0.0 };
    let (x, _, _) = solve(0, 5, t, 1.0);
    assert_eq!(x, brute_force(0, 5, &t));
}

#[test]
fn invalid_mu_is_a_config_error() {
    let cfg = IntProgConfig {
        mu: -1.0,
        ..IntProgConfig::default()
    };
    assert!(matches!(run_intprog(&cfg, 1, |_| {}), Err(ladmm_exp::ExpError::Config(_))));
}
