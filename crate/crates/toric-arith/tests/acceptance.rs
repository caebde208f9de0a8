//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line
//! with its measured runtime; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toric_arith::convex::{convex_hull, slice_interior_witness, sliced_interior_nonempty};
use toric_arith::divisor::{
    discrete_lipschitz, mu_monotone_continuity_profile, mu_r, proposition_2_1_suite,
    sup_norm_monomial, vol_hat, vol_hat_base, BaseCondition, Center, Potential, PropositionInput,
    ToricArithDivisor,
};
use toric_arith::okounkov::{
    dim_via_valuations, okounkov_body, semigroup_points, volume_vs_dimension, MonomialSeries,
    ValuationFlag,
};
use toric_arith::oracle::{mu_q_approx, relative_gap, sup_norm_numeric, volume_estimate};
use toric_arith::zariski::{
    certify_nef, check_multiplicity_identity, greatest_nef_minorant, nef_comparison_check,
    nef_minorant, rational_test_points, sampled_theta, verify_zariski, RotInvariantDivisor,
    SolverConfig, GRID_TOL, VOLUME_TOL,
};

const SEED: u64 = 20240917;

type Outcome = Result<String, String>;

fn canon(a: &[f64]) -> ToricArithDivisor {
    ToricArithDivisor::canonical(a).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bigness_boundary() -> Outcome {
    let mut mismatches = Vec::new();
    let mut tested = 0;
    for i in 1..=20 {
        for j in 1..=20 {
            let (a0, a1) = (0.1 * i as f64, 0.1 * j as f64);
            if (a0 + a1 - 1.0).abs() <= 1e-9 {
                continue;
            }
            tested += 1;
            let v = vol_hat(&canon(&[a0, a1])).map_err(|e| e.to_string())?.value;
            if (v > 0.0) != (a0 + a1 > 1.0) {
                mismatches.push((a0, a1, v));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("{tested} grid points, mismatches {mismatches:?}"),
    )
}

fn volume_vs_oracle() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (a, exact, n, tol) in [
        (vec![1.0, 1.0], Some(0.5), 400, 0.05),
        (vec![2.0, 2.0], Some(2f64.ln() + 0.5), 400, 0.05),
        (vec![1.0, 2.0, 4.0], None, 60, 0.15),
    ] {
        let d = canon(&a);
        let r = vol_hat(&d).map_err(|e| e.to_string())?;
        let oracle = volume_estimate(&d, n, &[]).map_err(|e| e.to_string())?;
        if let Some(x) = exact {
            ok &= (r.value - x).abs() <= 1e-6 && (r.quadrature - x).abs() <= 1e-6;
        }
        ok &= (oracle - r.value).abs() < tol;
        lines.push(format!(
            "a={a:?} vol={:.7} quad={:.7} oracle(n={n})={oracle:.4}",
            r.value, r.quadrature
        ));
    }
    check(ok, lines.join("; "))
}

fn strict_drop() -> Outcome {
    let d = canon(&[2.0, 2.0]);
    let cond = BaseCondition::new(Center::Hyperplane(1), 0.5).unwrap();
    let mu = mu_r(&d, Center::Hyperplane(1)).map_err(|e| e.to_string())?;
    let base = vol_hat_base(&d, &[cond]).map_err(|e| e.to_string())?.value;
    let full = vol_hat(&d).map_err(|e| e.to_string())?.value;
    let ob = volume_estimate(&d, 400, &[cond]).map_err(|e| e.to_string())?;
    let of = volume_estimate(&d, 400, &[]).map_err(|e| e.to_string())?;
    let want = 0.5 * 2f64.ln() + 0.25;
    let ok = mu == 0.0
        && (base - want).abs() <= 1e-6
        && base < full
        && (ob - base).abs() < 0.05
        && (of - full).abs() < 0.05;
    check(
        ok,
        format!("mu_R={mu} base={base:.7} full={full:.7} oracle base={ob:.4} full={of:.4}"),
    )
}

fn random_family_divisor(rng: &mut ChaCha8Rng, a: &[f64]) -> ToricArithDivisor {
    loop {
        let mut coeffs: Vec<f64> = (0..a.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        coeffs[0] += 0.5;
        let twist = rng.gen_range(0.0..1.0);
        let e = ToricArithDivisor::new(
            a.len() - 1,
            coeffs,
            Potential::Canonical { a: a.to_vec() },
            twist,
        )
        .unwrap();
        if e.is_big().unwrap() {
            return e;
        }
    }
}

fn proposition_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failures = Vec::new();
    let mut nef_zero = 0;
    for trial in 0..100 {
        let d = rng.gen_range(1..=2usize);
        // every fourth trial uses a nef family (all a_i >= 1)
        let lo = if trial % 4 == 0 { 1.0 } else { 0.1 };
        let a: Vec<f64> = (0..=d).map(|_| rng.gen_range(lo..3.0)).collect();
        let (dd, e) = if trial % 4 == 0 {
            (canon(&a), random_family_divisor(&mut rng, &a))
        } else {
            (
                random_family_divisor(&mut rng, &a),
                random_family_divisor(&mut rng, &a),
            )
        };
        let center = match rng.gen_range(0..3) {
            0 => Center::Hyperplane(rng.gen_range(0..=d)),
            1 => Center::TorusFixedPoint(rng.gen_range(0..=d)),
            _ => Center::VerticalFiber([2, 3, 5][rng.gen_range(0..3)]),
        };
        let phi: Vec<i64> = (0..d).map(|_| rng.gen_range(-2..=2)).collect();
        let scalar = rng.gen_range(0.5..3.0);
        let input = PropositionInput {
            d: &dd,
            e: &e,
            phi,
            scalar,
            center,
            oracle_levels: vec![8, 16],
        };
        let report = proposition_2_1_suite(&input).map_err(|e| format!("trial {trial}: {e}"))?;
        if !report.pass {
            failures.push((
                trial,
                report
                    .items
                    .into_iter()
                    .filter(|i| !i.holds)
                    .collect::<Vec<_>>(),
            ));
            continue;
        }
        if dd.is_nef().unwrap() {
            let item6 = &report.items[5];
            if item6.lhs != 0.0 {
                failures.push((trial, vec![item6.clone()]));
            }
            nef_zero += 1;
        }
    }
    check(
        failures.is_empty(),
        format!("100 pairs, {nef_zero} nef-and-big with mu exactly 0, failures {failures:?}"),
    )
}

fn mu_q_convergence() -> Outcome {
    let samples = [
        ([0.25, 2.0], Center::Hyperplane(1)),
        ([2.0, 0.25], Center::Hyperplane(0)),
        ([0.5, 0.8], Center::Hyperplane(1)),
        ([0.5, 0.8], Center::Hyperplane(0)),
        ([0.7, 3.0], Center::Hyperplane(1)),
    ];
    let levels = [25, 50, 100, 200];
    let mut lines = Vec::new();
    let mut ok = true;
    for (a, center) in samples {
        let d = canon(&a);
        let target = mu_r(&d, center).map_err(|e| e.to_string())?;
        let approx = mu_q_approx(&d, center, &levels).map_err(|e| e.to_string())?;
        let values: Vec<f64> = approx
            .levels
            .iter()
            .map(|(_, v)| v.unwrap_or(f64::INFINITY))
            .collect();
        let monotone = values.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let last = *values.last().unwrap();
        ok &= !d.is_nef().unwrap() && monotone && (last - target).abs() < 0.05;
        lines.push(format!(
            "a={a:?} {center:?} mu_R={target:.4} mu_Q(200)={last:.4} monotone={monotone}"
        ));
    }
    check(ok, lines.join("; "))
}

fn twist_profile() -> Outcome {
    let d = canon(&[0.25, 2.0]);
    let lambdas: Vec<f64> = (0..50).map(|k| -0.5 + 3.5 * k as f64 / 49.0).collect();
    let profile = mu_monotone_continuity_profile(&d, Center::Hyperplane(1), &lambdas)
        .map_err(|e| e.to_string())?;
    let monotone = profile.windows(2).all(|w| w[1].1 <= w[0].1);
    let l = discrete_lipschitz(&profile);
    let continuous = profile
        .windows(2)
        .all(|w| (w[1].1 - w[0].1).abs() <= l * (w[1].0 - w[0].0));
    let reaches_zero = profile.last().unwrap().1 == 0.0;
    check(
        monotone && l.is_finite() && continuous && reaches_zero,
        format!(
            "monotone={monotone} L={l:.4} continuous={continuous} mu(3.0)={}",
            profile.last().unwrap().1
        ),
    )
}

fn surface_zariski() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let config = SolverConfig::default();
    let points = rational_test_points(3);
    let mut problems = Vec::new();
    let mut nef_count = 0;
    let mut minorants = 0;
    for trial in 0..10 {
        let a = loop {
            let lo = if trial % 3 == 0 { 1.0 } else { 0.1 };
            let a = [rng.gen_range(lo..3.0), rng.gen_range(0.1..3.0)];
            if a[0] + a[1] > 1.2 {
                break a;
            }
        };
        let d = canon(&a);
        let dec = greatest_nef_minorant(&d, &config).map_err(|e| e.to_string())?;
        let report = verify_zariski(&d, &dec, VOLUME_TOL).map_err(|e| e.to_string())?;
        let mu = check_multiplicity_identity(&d, &dec, 1e-3).map_err(|e| e.to_string())?;
        if !report.pass || !mu.pass {
            problems.push(format!("a={a:?} verify={} mu={}", report.pass, mu.pass));
        }
        if d.is_nef().unwrap() {
            nef_count += 1;
            let zero = dec.negative.e0 == 0.0
                && dec.negative.e1 == 0.0
                && dec.negative.values.iter().all(|&v| v == 0.0);
            if !zero {
                problems.push(format!("a={a:?} nef input with nonzero N"));
            }
        }
        let best = dec.positive.volume().map_err(|e| e.to_string())?;
        let input = RotInvariantDivisor::from_divisor(&d, config.grid().unwrap()).unwrap();
        let (ta, tb) = sampled_theta(&d, &config)
            .map_err(|e| e.to_string())?
            .ok_or("empty theta")?;
        for _ in 0..50 {
            let lo = ta + rng.gen_range(0.0..1.0) * (tb - ta);
            let hi = lo + rng.gen_range(0.0..1.0) * (tb - lo);
            let m = nef_minorant(&d, lo, hi, rng.gen_range(0.0..0.3), &config)
                .map_err(|e| e.to_string())?;
            minorants += 1;
            let below = m.excess_over(&input).map_err(|e| e.to_string())? <= GRID_TOL;
            let v = m.volume().map_err(|e| e.to_string())?;
            if !certify_nef(&m, &points).passed || !below || v > best + 1e-6 {
                problems.push(format!(
                    "a={a:?} minorant [{lo:.3},{hi:.3}] vol {v} vs {best}"
                ));
            }
        }
    }
    check(
        problems.is_empty(),
        format!(
            "10 inputs ({nef_count} nef), {minorants} random nef minorants, problems {problems:?}"
        ),
    )
}

fn nef_comparison() -> Outcome {
    let grid = SolverConfig::default().grid().unwrap();
    let mut lines = Vec::new();
    let mut ok = true;
    for a in [[2.0, 2.0], [1.0, 1.0], [1.5, 3.0], [1.2, 1.0]] {
        let p = RotInvariantDivisor::from_divisor(&canon(&a), grid).map_err(|e| e.to_string())?;
        let q = p.add_twist(0.1);
        let strict = !nef_comparison_check(&p, &q).map_err(|e| e.to_string())?;
        let (lo, hi) = p
            .transform()
            .map_err(|e| e.to_string())?
            .theta()
            .ok_or("empty theta")?;
        let gain = q.volume().unwrap() - p.volume().unwrap();
        // an independently rebuilt copy has equal volume and must coincide
        let copy: RotInvariantDivisor =
            serde_json::from_value(serde_json::to_value(&p).unwrap()).unwrap();
        let equal = nef_comparison_check(&p, &copy).map_err(|e| e.to_string())?;
        let coincide = p
            .excess_over(&copy)
            .unwrap()
            .max(copy.excess_over(&p).unwrap())
            <= 1e-6;
        ok &= strict && gain >= 0.1 * (hi - lo) - 1e-6 && equal && coincide;
        lines.push(format!(
            "a={a:?} gain={gain:.6} bound={:.6}",
            0.1 * (hi - lo)
        ));
    }
    check(ok, lines.join("; "))
}

fn okounkov_geometry() -> Outcome {
    let flag = ValuationFlag::origin(2);
    let series: Vec<MonomialSeries> = (1..=3)
        .map(|m| MonomialSeries::full(m, vec![1, 0, 0]).unwrap())
        .collect();
    let body = okounkov_body(&semigroup_points(&series, &flag).unwrap(), 3).unwrap();
    let simplex = convex_hull(&[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
    let simplex_ok = body.same_vertices(&simplex, 0.0);
    let mut dims_ok = true;
    for m in 1..=10 {
        let s = MonomialSeries::full(m, vec![1, 0, 0]).unwrap();
        dims_ok &= dim_via_valuations(&s, &flag).unwrap() == s.support().len();
    }
    let (v1, n1) = volume_vs_dimension(1, 30).unwrap();
    let (v2, n2) = volume_vs_dimension(2, 15).unwrap();
    let (g1, g2) = ((v1 - n1).abs(), (v2 - n2).abs());
    check(
        simplex_ok && dims_ok && g1 < 0.1 && g2 < 0.1,
        format!("simplex={simplex_ok} dims={dims_ok} gap d=1,m=30: {g1:.4}; gap d=2,m=15: {g2:.4}"),
    )
}

fn slice_claim() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 11);
    let mut polytopes = 0;
    let mut failures = 0;
    while polytopes < 100 {
        let dim = rng.gen_range(2..=3);
        let count = rng.gen_range(dim + 2..dim + 12);
        let pts: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let c = convex_hull(&pts).map_err(|e| e.to_string())?;
        if !c.is_full_dimensional() {
            continue;
        }
        polytopes += 1;
        let (lo, hi) = c.bounding_box()[0];
        let a = lo + rng.gen_range(0.01..1.0) * (hi - lo);
        let witness = slice_interior_witness(&c, a);
        let ok = sliced_interior_nonempty(&c, a)
            && witness.is_some_and(|(x, r)| r > 0.0 && c.contains(&x, 1e-9) && x[0] < a);
        failures += usize::from(!ok);
    }
    check(
        failures == 0,
        format!("{polytopes} polytopes, {failures} without an interior witness"),
    )
}

fn norm_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 13);
    let mut worst = 0.0_f64;
    for _ in 0..500 {
        let d = rng.gen_range(1..=2usize);
        let n = rng.gen_range(1..=50u64);
        let a: Vec<f64> = (0..=d).map(|_| rng.gen_range(0.2..5.0)).collect();
        let m: Vec<i64> = loop {
            let m: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=n as i64)).collect();
            if m.iter().sum::<i64>() <= n as i64 {
                break m;
            }
        };
        let div = canon(&a);
        let closed = sup_norm_monomial(&div, n, &m).map_err(|e| e.to_string())?;
        let numeric = sup_norm_numeric(&div, n, &m).map_err(|e| e.to_string())?;
        worst = worst.max(relative_gap(numeric, closed));
    }
    check(
        worst < 1e-6,
        format!("500 samples, worst relative gap {worst:.2e}"),
    )
}

/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("1 bigness boundary", 10, bigness_boundary),
        ("2 volume vs oracle", 120, volume_vs_oracle),
        ("3 strict drop under a base condition", 60, strict_drop),
        ("4 multiplicity laws", 30, proposition_suite),
        ("5 mu_Q converges to mu_R", 120, mu_q_convergence),
        ("6 twist profile", 30, twist_profile),
        ("7 surface Zariski decomposition", 300, surface_zariski),
        ("8 nef comparison", 30, nef_comparison),
        ("9 Okounkov geometry", 30, okounkov_geometry),
        ("10 slice interior", 30, slice_claim),
        ("11 norm oracle", 60, norm_oracle),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (verdict, detail) = match &outcome {
            Ok(d) if in_time => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d} (over the {budget} s budget)")),
            Err(d) => ("FAIL", d.clone()),
        };
        println!("{verdict} [{name}] {:.2}s: {detail}", elapsed.as_secs_f64());
        if verdict == "FAIL" {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
