use ladmm::prox::{
    project_finite_set, prox_clipped_quad, prox_grid_oracle, soft_threshold, ClippedQuadPenalty,
    FiniteSetIndicator, ScalarPenalty, Separable,
};
use ladmm::ProxOracle;
use proptest::prelude::*;

fn prox_objective<P: ScalarPenalty>(p: &P, t: f64, v: f64, step: f64) -> f64 {
    p.value(t) + (t - v) * (t - v) / (2.0 * step)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn clipped_quad_beats_grid(
        v in -8.0f64..8.0,
        step in 0.01f64..3.0,
        lambda in 0.01f64..2.0,
        eta in 0.05f64..1.0,
    ) {
        let p = ClippedQuadPenalty::new(lambda, eta).unwrap();
        let t = prox_clipped_quad(&[v], &p, step)[0];
        let oracle = prox_grid_oracle(v, |s| p.value(s), step, 2.0 * v.abs() + 1.0 / eta + 1.0, 1e-3);
        prop_assert!(
            prox_objective(&p, t, v, step) <= prox_objective(&p, oracle, v, step) + 1e-9,
            "prox {t} vs oracle {oracle}"
        );
    }

    #[test]
    fn clipped_quad_prox_is_odd(
        v in 1e-6f64..8.0,
        step in 0.01f64..3.0,
        lambda in 0.01f64..2.0,
        eta in 0.05f64..1.0,
    ) {
        let p = ClippedQuadPenalty::new(lambda, eta).unwrap();
        prop_assert_eq!(p.prox(-v, step), -p.prox(v, step));
    }

    #[test]
    fn clipped_quad_prox_is_monotone(
        v in -8.0f64..8.0,
        dv in 0.0f64..2.0,
        step in 0.01f64..3.0,
        eta in 0.05f64..1.0,
    ) {
        let p = ClippedQuadPenalty::new(0.5, eta).unwrap();
        prop_assert!(p.prox(v, step) <= p.prox(v + dv, step));
    }

    #[test]
    fn soft_threshold_beats_grid(v in -5.0f64..5.0, c in 0.0f64..2.0) {
        let t = soft_threshold(&[v], c)[0];
        let obj = |s: f64| c * s.abs() + 0.5 * (s - v) * (s - v);
        let oracle = prox_grid_oracle(v, |s| c * s.abs(), 1.0, 2.0 * c + 1.0, 1e-4);
        prop_assert!(obj(t) <= obj(oracle) + 1e-12);
    }

    #[test]
    fn projection_is_nearest_and_idempotent(
        elems in prop::collection::vec(-10.0f64..10.0, 1..8),
        v in -15.0f64..15.0,
    ) {
        let set = FiniteSetIndicator::new(elems.clone()).unwrap();
        let t = project_finite_set(&[v], &set, 0.3)[0];
        prop_assert_eq!(set.value(t), 0.0);
        let best = elems.iter().map(|e| (e - v).abs()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!((t - v).abs(), best);
        prop_assert_eq!(project_finite_set(&[t], &set, 0.3)[0], t);
    }

    #[test]
    fn separable_prox_acts_coordinatewise(
        v in prop::collection::vec(-6.0f64..6.0, 1..10),
        step in 0.05f64..2.0,
    ) {
        let p = ClippedQuadPenalty::new(0.3, 0.2).unwrap();
        let sep = Separable::new(p, v.len());
        let mut out = vec![0.0; v.len()];
        sep.prox(&v, step, &mut out);
        for (o, vi) in out.iter().zip(&v) {
            prop_assert_eq!(*o, p.prox(*vi, step));
        }
        let total: f64 = out.iter().map(|t| p.value(*t)).sum();
        prop_assert!((sep.value(&out) - total).abs() <= 1e-12 * (1.0 + total));
    }
}

#[test]
fn integer_set_projection_ties_go_down() {
    let set = FiniteSetIndicator::integer_range(0, 5).unwrap();
    assert_eq!(project_finite_set(&[2.5, -3.0, 9.0, 4.49], &set, 1.0), vec![2.0, 0.0, 5.0, 4.0]);
}
