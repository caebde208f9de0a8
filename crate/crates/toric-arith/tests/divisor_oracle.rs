use proptest::prelude::*;
use toric_arith::divisor::{
    filtration_summary, mu_r, sup_norm_monomial, theta_region, vol_hat, vol_hat_base,
    BaseCondition, Center, ToricArithDivisor,
};
use toric_arith::oracle::{
    enumerate_sections, exact_log_count_d1, log_count, relative_gap, sup_norm_numeric,
    volume_estimate, CircleGrid,
};

fn canon(a: &[f64]) -> ToricArithDivisor {
    ToricArithDivisor::canonical(a).unwrap()
}

/// Parameters plus an admissible monomial of level `n` (coefficients
/// `(1, 0, …)` put `m` in the simplex `|m| <= n`).
fn norm_sample() -> impl Strategy<Value = (Vec<f64>, u64, Vec<i64>)> {
    (1usize..=2, 1u64..=50).prop_flat_map(|(d, n)| {
        (
            prop::collection::vec(0.2..5.0f64, d + 1),
            Just(n),
            prop::collection::vec(0..=n as i64, d)
                .prop_filter("|m| <= n", move |m| m.iter().sum::<i64>() <= n as i64),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn closed_form_norm_matches_numeric_maximization((a, n, m) in norm_sample()) {
        let d = canon(&a);
        let closed = sup_norm_monomial(&d, n, &m).unwrap();
        let numeric = sup_norm_numeric(&d, n, &m).unwrap();
        prop_assert!(relative_gap(numeric, closed) < 1e-6, "closed {closed}, numeric {numeric}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn volume_is_positive_exactly_above_the_bigness_line(a0 in 0.05..2.0f64, a1 in 0.05..2.0f64) {
        prop_assume!((a0 + a1 - 1.0).abs() > 1e-9);
        let v = vol_hat(&canon(&[a0, a1])).unwrap().value;
        prop_assert_eq!(v > 0.0, a0 + a1 > 1.0, "vol = {}", v);
    }

    #[test]
    fn twist_shifts_the_transform_by_half(a in prop::collection::vec(0.2..3.0f64, 3), lambda in -2.0..2.0f64, t in 0.0..1.0f64, u in 0.0..1.0f64) {
        let d = canon(&a);
        let x = [t * (1.0 - u), u * (1.0 - t)];
        let g = d.transform().unwrap().eval_point(&x);
        let gl = d.add_twist(lambda).transform().unwrap().eval_point(&x);
        prop_assert_eq!(gl, g + lambda / 2.0);
    }

    #[test]
    fn base_volume_decreases_in_each_bound(a in prop::collection::vec(0.3..3.0f64, 2), mu in 0.0..1.0f64, step in 0.0..0.3f64, which in 0usize..3) {
        let d = canon(&a);
        prop_assume!(d.is_big().unwrap());
        let center = [Center::Hyperplane(0), Center::Hyperplane(1), Center::VerticalFiber(3)][which];
        let at = |m: f64| vol_hat_base(&d, &[BaseCondition::new(center, m).unwrap()]).unwrap().value;
        let full = vol_hat(&d).unwrap().value;
        prop_assert_eq!(at(0.0), full);
        prop_assert!(at(mu + step) <= at(mu) + 1e-12);
        prop_assert!(at(mu) <= full + 1e-12);
    }

    #[test]
    fn bound_above_the_multiplicity_strictly_drops_the_volume(a in prop::collection::vec(0.3..3.0f64, 2), which in 0usize..2, excess in 0.02..0.3f64) {
        let d = canon(&a);
        prop_assume!(vol_hat(&d).unwrap().value > 1e-3);
        let center = Center::Hyperplane(which);
        let mu = mu_r(&d, center).unwrap() + excess;
        let cut = vol_hat_base(&d, &[BaseCondition::new(center, mu).unwrap()]).unwrap().value;
        let full = vol_hat(&d).unwrap().value;
        prop_assert!(full - cut > 1e-5, "drop {}", full - cut);
    }

    #[test]
    fn volume_scales_with_degree_plus_one(a in prop::collection::vec(0.3..3.0f64, 3), t in 0.5..3.0f64) {
        let d = canon(&a);
        let v = vol_hat(&d).unwrap().value;
        let vt = vol_hat(&d.scaled(t).unwrap()).unwrap().value;
        prop_assert!((vt - t.powi(3) * v).abs() <= 1e-8 * (1.0 + vt.abs()), "{vt} vs {}", t.powi(3) * v);
    }

    #[test]
    fn log_count_is_superadditive_up_to_log_slack(a in prop::collection::vec(0.4..3.0f64, 2), n1 in 1u64..40, n2 in 1u64..40) {
        let d = canon(&a);
        let l = |n| log_count(&d, n, &[]).unwrap();
        let slack = 4.0 * ((n1 + n2 + 2) as f64).ln();
        prop_assert!(l(n1 + n2) >= l(n1) + l(n2) - slack);
    }
}

#[test]
fn box_count_is_sandwiched_by_lattice_ball_count() {
    let cases: [(&[f64], u64); 4] = [
        (&[0.6, 0.6], 12),
        (&[1.0, 1.0], 5),
        (&[0.7, 1.0], 6),
        (&[0.5, 1.2], 6),
    ];
    for (a, n_max) in cases {
        let d = canon(a);
        for n in 1..=n_max {
            let exact = exact_log_count_d1(&d, n, CircleGrid::default()).unwrap();
            let boxed = log_count(&d, n, &[]).unwrap();
            let bound = 3.0 * (n + 1) as f64 * ((n + 3) as f64).ln();
            assert!(
                (exact - boxed).abs() <= bound,
                "a = {a:?}, n = {n}: exact {exact}, box {boxed}"
            );
        }
    }
}

#[test]
fn enumeration_of_the_balanced_line() {
    let d = canon(&[1.0, 1.0]);
    let e = enumerate_sections(&d, 2, &[]).unwrap();
    let radii: Vec<f64> = e.entries.iter().map(|x| x.radius()).collect();
    assert_eq!(
        e.entries.iter().map(|x| x.m.clone()).collect::<Vec<_>>(),
        vec![vec![0], vec![1], vec![2]]
    );
    for (r, want) in radii.iter().zip([1.0, 2.0, 1.0]) {
        assert!((r - want).abs() < 1e-12);
    }
    let cond = BaseCondition::new(Center::Hyperplane(1), 1.0).unwrap();
    let e = enumerate_sections(&d, 2, &[cond]).unwrap();
    assert_eq!(
        e.entries.iter().map(|x| x.m.clone()).collect::<Vec<_>>(),
        vec![vec![2]]
    );
}

#[test]
fn non_big_divisor_has_no_sections_of_norm_one() {
    let d = canon(&[0.25, 0.25]);
    let e = enumerate_sections(&d, 10, &[]).unwrap();
    assert!(e.entries.iter().all(|x| x.radius() < 1.0));
    assert_eq!(log_count(&d, 10, &[]).unwrap(), 0.0);
    assert!(theta_region(&d).unwrap().is_empty());
}

#[test]
fn vertical_condition_lowers_the_count_like_the_transform() {
    let d = canon(&[2.0, 2.0]);
    let cond = BaseCondition::new(Center::VerticalFiber(2), 0.5).unwrap();
    let closed = vol_hat_base(&d, &[cond]).unwrap().value;
    let oracle = volume_estimate(&d, 200, &[cond]).unwrap();
    assert!(
        (closed - oracle).abs() < 0.05,
        "closed {closed}, oracle {oracle}"
    );
}

#[test]
fn top_filtration_level_approaches_the_transform_maximum() {
    let d = canon(&[2.0, 2.0]);
    let f = filtration_summary(&d, 1).unwrap();
    let half_log2 = 0.5 * 2f64.ln();
    assert!((f.e_min - half_log2).abs() < 1e-12 && (f.e_max - half_log2).abs() < 1e-12);
    let d = canon(&[1.0, 1.0]);
    assert!((filtration_summary(&d, 2).unwrap().e_max - 2f64.ln()).abs() < 1e-12);
    for a in [[1.0, 1.0], [0.25, 2.0], [3.0, 0.5]] {
        let d = canon(&a);
        let max_g = d.transform().unwrap().max_value();
        let f = filtration_summary(&d, 100).unwrap();
        assert!(f.e_min <= f.e_max);
        assert!((f.e_max / 100.0 - max_g).abs() < 0.05);
        assert!(f.e_max <= f.growth_constant * 100.0);
    }
}
