use nonresp_core::design::{realize, replication_rng, Design};
use nonresp_core::estimators::{class_estimate, ratio_estimate, ClassParams, ClassShape, EstimatorKind};
use nonresp_core::population::{compute_params, synthesize_population, PopulationParams, S2_Y2_TOLERANCE};
use nonresp_core::theory::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Random parameter set together with a feasible two-phase design.
#[derive(Debug, Clone)]
struct Scenario {
    params: PopulationParams,
    n_prime: usize,
    n: usize,
    k: f64,
    shape: ClassShape,
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        20usize..400,
        prop_oneof![1.0f64..1000.0, -1000.0f64..-1.0],
        prop_oneof![1.0f64..500.0, -500.0f64..-1.0],
        0.05f64..3.0,
        0.05f64..3.0,
        -0.99f64..0.99,
        0.0f64..0.6,
        0.0f64..1.5,
        1.0f64..4.0,
        (0.0f64..1.0, 0.0f64..1.0),
        (prop_oneof![0.2f64..5.0, -5.0f64..-0.2], -2.0f64..2.0),
    )
        .prop_map(|(size, yb, xb, cy, cx, rho, w2, frac, k, (u, v), (eta, lam))| {
            let s2_y = (cy * yb).powi(2);
            let params =
                PopulationParams::from_cvs(size, yb, xb, cy, cx, rho, w2, frac * s2_y).unwrap();
            let n_prime = 3 + ((size - 3) as f64 * u) as usize;
            let n_prime = n_prime.min(size);
            let n = 2 + ((n_prime - 3) as f64 * v) as usize;
            // lambda as a multiple of eta * Xbar keeps tau away from the pole
            let lambda = lam * eta * xb;
            let lambda = if (1.0 + lam).abs() < 0.05 { 0.0 } else { lambda };
            Scenario {
                params,
                n_prime,
                n: n.min(n_prime - 1),
                k,
                shape: ClassShape { eta, lambda },
            }
        })
}

fn perturbation_grid(a1: f64, a2: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for scale in [1e-3, 1e-2] {
        let d1 = scale * a1.abs().max(1e-6);
        let d2 = scale * a2.abs().max(1e-6);
        for i in -2..=2 {
            for j in -2..=2 {
                if i != 0 || j != 0 {
                    out.push((a1 + i as f64 * d1, a2 + j as f64 * d2));
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn single_phase_optimum_is_minimal(sc in scenario()) {
        let p = sc.params;
        let (a1, a2) = optimum_alphas(&p, sc.n, sc.k, sc.shape).unwrap();
        let opt = sc.shape.with_alphas(a1, a2).unwrap();
        let best = mse_class(&p, sc.n, sc.k, &opt).unwrap();
        prop_assert!(rel(best, min_mse_class(&p, sc.n, sc.k).unwrap()) < 1e-9);
        for (b1, b2) in perturbation_grid(a1, a2) {
            let other = mse_class(&p, sc.n, sc.k, &sc.shape.with_alphas(b1, b2).unwrap()).unwrap();
            prop_assert!(best <= other * (1.0 + 1e-12), "{best} > {other}");
        }
        let [d1, d2] = mse_class_gradient(&p, sc.n, sc.k, &opt).unwrap();
        let f = 1.0 / sc.n as f64 - 1.0 / p.size as f64;
        let t = tau(sc.shape.eta, sc.shape.lambda, p.x_mean).unwrap();
        let g = p.rho * p.cv_y - t * p.cv_x;
        let scale1 = p.y_mean.powi(2) * (1.0 + a1.abs());
        let scale2 = f * ((a2 * p.x_mean.powi(2) * p.cv_x.powi(2)).abs()
            + (a1 * p.x_mean * p.y_mean * p.cv_x * g).abs());
        prop_assert!(d1.abs() <= 1e-9 * scale1, "d1 = {d1}");
        prop_assert!(d2.abs() <= 1e-9 * scale2.max(f64::MIN_POSITIVE), "d2 = {d2}");
    }

    #[test]
    fn two_phase_optimum_is_minimal(sc in scenario()) {
        let p = sc.params;
        let (a1, a2) = optimum_alphas_2p(&p, sc.n_prime, sc.n, sc.k, sc.shape).unwrap();
        let opt = sc.shape.with_alphas(a1, a2).unwrap();
        let best = mse_class_2p(&p, sc.n_prime, sc.n, sc.k, &opt).unwrap();
        prop_assert!(rel(best, min_mse_class_2p(&p, sc.n_prime, sc.n, sc.k).unwrap()) < 1e-9);
        for (b1, b2) in perturbation_grid(a1, a2) {
            let cp = sc.shape.with_alphas(b1, b2).unwrap();
            let other = mse_class_2p(&p, sc.n_prime, sc.n, sc.k, &cp).unwrap();
            prop_assert!(best <= other * (1.0 + 1e-12), "{best} > {other}");
        }
        let [d1, d2] = mse_class_2p_gradient(&p, sc.n_prime, sc.n, sc.k, &opt).unwrap();
        let g = 1.0 / sc.n as f64 - 1.0 / sc.n_prime as f64;
        let t = tau(sc.shape.eta, sc.shape.lambda, p.x_mean).unwrap();
        let h = t * p.cv_x * p.cv_x - p.rho * p.cv_x * p.cv_y;
        let scale1 = p.y_mean.powi(2) * (1.0 + a1.abs());
        let scale2 = g * ((a2 * p.x_mean * p.x_mean * p.cv_x * p.cv_x).abs()
            + (a1 * p.x_mean * p.y_mean * h).abs());
        prop_assert!(d1.abs() <= 1e-9 * scale1, "d1 = {d1}");
        prop_assert!(d2.abs() <= 1e-9 * scale2.max(f64::MIN_POSITIVE), "d2 = {d2}");
    }

    #[test]
    fn optimum_does_not_depend_on_shape(sc in scenario(), lam in -0.5f64..3.0) {
        let p = sc.params;
        let other = ClassShape { eta: 1.0, lambda: lam * p.x_mean };
        let at = |shape: ClassShape| {
            let (a1, a2) = optimum_alphas(&p, sc.n, sc.k, shape).unwrap();
            mse_class(&p, sc.n, sc.k, &shape.with_alphas(a1, a2).unwrap()).unwrap()
        };
        prop_assert!(rel(at(sc.shape), at(other)) < 1e-9);
        let at_2p = |shape: ClassShape| {
            let (a1, a2) = optimum_alphas_2p(&p, sc.n_prime, sc.n, sc.k, shape).unwrap();
            mse_class_2p(&p, sc.n_prime, sc.n, sc.k, &shape.with_alphas(a1, a2).unwrap()).unwrap()
        };
        prop_assert!(rel(at_2p(sc.shape), at_2p(other)) < 1e-9);
    }

    #[test]
    fn two_phase_at_census_first_phase_is_single_phase(
        sc in scenario(), a1 in 0.0f64..2.0, a2 in -5.0f64..5.0,
    ) {
        let p = sc.params;
        let (big_n, n, k) = (p.size, sc.n, sc.k);
        prop_assert!(rel(mse_ratio_2p(&p, big_n, n, k).value, mse_ratio(&p, n, k).value) <= 1e-12);
        prop_assert!(
            rel(mse_regression_2p(&p, big_n, n, k).value, mse_regression(&p, n, k).value) <= 1e-12
        );
        let cp = sc.shape.with_alphas(a1, a2).unwrap();
        prop_assert!(
            rel(mse_class_2p(&p, big_n, n, k, &cp).unwrap(), mse_class(&p, n, k, &cp).unwrap())
                <= 1e-12
        );
        prop_assert!(
            rel(bias_class_2p(&p, big_n, n, &cp).unwrap(), bias_class(&p, n, &cp).unwrap())
                <= 1e-12
        );
        let (o1, o2) = optimum_alphas(&p, n, k, sc.shape).unwrap();
        let (q1, q2) = optimum_alphas_2p(&p, big_n, n, k, sc.shape).unwrap();
        prop_assert!(rel(o1, q1) <= 1e-12 && rel(o2, q2) <= 1e-12);
        prop_assert!(
            rel(min_mse_class_2p(&p, big_n, n, k).unwrap(), min_mse_class(&p, n, k).unwrap())
                <= 1e-12
        );
    }

    #[test]
    fn full_response_gives_classical_forms(sc in scenario(), w2 in 0.0f64..0.6, k in 1.0f64..4.0) {
        let f = 1.0 / sc.n as f64 - 1.0 / sc.params.size as f64;
        let y2 = sc.params.y_mean.powi(2);
        let (cy, cx, rho) = (sc.params.cv_y, sc.params.cv_x, sc.params.rho);
        // either k = 1 or W2 = 0 removes the sub-sampling term
        for (p, kk) in [
            (sc.params.with_w2(w2).unwrap(), 1.0),
            (sc.params.with_w2(0.0).unwrap(), k),
        ] {
            let n = sc.n;
            prop_assert_eq!(var_hh(&p, n, kk).value, f * p.s2_y);
            prop_assert!(rel(mse_ratio(&p, n, kk).value, f * y2 * (cy * cy + cx * cx - 2.0 * rho * cx * cy)) < 1e-12);
            prop_assert!(rel(mse_regression(&p, n, kk).value, f * y2 * cy * cy * (1.0 - rho * rho)) < 1e-12);
            let classical = f * y2 * cy * cy * (1.0 - rho * rho);
            prop_assert!(rel(min_mse_class(&p, n, kk).unwrap(), classical / (1.0 + classical / y2)) < 1e-12);
            let (np, g) = (sc.n_prime, 1.0 / sc.n as f64 - 1.0 / sc.n_prime as f64);
            let f1 = 1.0 / np as f64 - 1.0 / p.size as f64;
            prop_assert!(rel(
                mse_regression_2p(&p, np, n, kk).value,
                y2 * (f1 * cy * cy + g * cy * cy * (1.0 - rho * rho)),
            ) < 1e-12);
        }
    }

    #[test]
    fn mse_is_monotone_in_nonresponse(sc in scenario(), dw in 0.0f64..0.4, dk in 0.0f64..2.0) {
        let p = sc.params;
        let q = p.with_w2((p.w2 + dw).min(1.0)).unwrap();
        let (np, n, k) = (sc.n_prime, sc.n, sc.k);
        let cp = sc.shape.with_alphas(0.8, 0.3).unwrap();
        let all = |p: &PopulationParams, k: f64| -> Vec<f64> {
            vec![
                var_hh(p, n, k).value,
                mse_ratio(p, n, k).value,
                mse_regression(p, n, k).value,
                mse_ratio_2p(p, np, n, k).value,
                mse_regression_2p(p, np, n, k).value,
                mse_class(p, n, k, &cp).unwrap(),
                mse_class_2p(p, np, n, k, &cp).unwrap(),
                min_mse_class(p, n, k).unwrap(),
                min_mse_class_2p(p, np, n, k).unwrap(),
            ]
        };
        let base = all(&p, k);
        for (a, b) in base.iter().zip(all(&q, k)) {
            prop_assert!(b >= a * (1.0 - 1e-12) - 1e-300, "W2: {a} -> {b}");
        }
        for (a, b) in base.iter().zip(all(&p, k + dk)) {
            prop_assert!(b >= a * (1.0 - 1e-12) - 1e-300, "k: {a} -> {b}");
        }
    }

    #[test]
    fn optimum_beats_regression(sc in scenario()) {
        let p = sc.params;
        prop_assert!(min_mse_class(&p, sc.n, sc.k).unwrap() <= mse_regression(&p, sc.n, sc.k).value);
        prop_assert!(
            min_mse_class_2p(&p, sc.n_prime, sc.n, sc.k).unwrap()
                <= mse_regression_2p(&p, sc.n_prime, sc.n, sc.k).value
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn synthesis_round_trips(
        size in 20usize..300,
        yb in -500.0f64..500.0,
        xb in 1.0f64..200.0,
        cy in 0.05f64..2.0,
        cx in 0.05f64..2.0,
        rho in -0.999f64..0.999,
        w2 in 0.1f64..0.5,
        frac in 0.2f64..1.2,
        seed in any::<u64>(),
    ) {
        prop_assume!(yb.abs() > 1.0);
        let target = PopulationParams::from_cvs(
            size, yb, xb, cy, cx, rho, w2, frac * (cy * yb).powi(2),
        ).unwrap();
        let pop = synthesize_population(&target, seed).unwrap();
        let got = compute_params(&pop).unwrap();
        prop_assert_eq!(got.size, size);
        prop_assert_eq!(got.w2, nonresp_core::population::round_half_up(w2 * size as f64) as f64 / size as f64);
        prop_assert!(rel(got.y_mean, yb) < 1e-9);
        prop_assert!(rel(got.x_mean, xb) < 1e-9);
        prop_assert!(rel(got.s2_y, target.s2_y) < 1e-9);
        prop_assert!(rel(got.s2_x, target.s2_x) < 1e-9);
        prop_assert!(rel(got.rho, rho) < 1e-9);
        prop_assert!(rel(got.s2_y2, target.s2_y2) < S2_Y2_TOLERANCE);
    }

    #[test]
    fn mean_square_zero_iff_constant(ys in proptest::collection::vec(-5i32..5, 4..20)) {
        use nonresp_core::population::{FinitePopulation, Group, Unit};
        let units: Vec<Unit> = ys.iter().enumerate().map(|(i, &y)| Unit {
            y: y as f64, x: 1.0 + i as f64, group: Group::Respondent,
        }).collect();
        let p = compute_params(&FinitePopulation::new(units).unwrap()).unwrap();
        prop_assert!(p.s2_y >= 0.0);
        prop_assert_eq!(p.s2_y == 0.0, ys.iter().all(|&y| y == ys[0]));
    }

    #[test]
    fn loaded_w2_is_exact(groups in proptest::collection::vec(any::<bool>(), 1..40)) {
        prop_assume!(groups.iter().any(|g| !g));
        let mut text = String::from("y,x,group\n");
        for (i, nr) in groups.iter().enumerate() {
            text.push_str(&format!("{},{},{}\n", i, i + 1, if *nr { "NR" } else { "R" }));
        }
        let pop = nonresp_core::load_population(text.as_bytes()).unwrap();
        let p = compute_params(&pop).unwrap();
        let count = groups.iter().filter(|g| **g).count();
        prop_assert_eq!(p.w2, count as f64 / groups.len() as f64);
    }
}

fn table1_population(w2: f64, seed: u64) -> nonresp_core::FinitePopulation {
    let target =
        PopulationParams::from_cvs(200, 500.0, 25.0, 15.0, 2.0, 0.9, w2, 0.8 * 5.625e7).unwrap();
    synthesize_population(&target, seed).unwrap()
}

#[test]
fn class_with_unit_constants_is_the_ratio_estimator() {
    let pop = table1_population(0.2, 1);
    let xbar = compute_params(&pop).unwrap().x_mean;
    let design = Design::single(50, 1.5);
    let cp = ClassParams::new(1.0, 0.0, 1.0, 0.0).unwrap();
    let scaled = ClassParams::new(1.0, 0.0, 3.7, 0.0).unwrap();
    for r in 0..1000 {
        let s = realize(&design, &pop, &mut replication_rng(8, r)).unwrap();
        let ratio = ratio_estimate(&s, xbar).unwrap();
        assert_eq!(class_estimate(&s, xbar, &cp).unwrap(), ratio);
        assert!(rel(class_estimate(&s, xbar, &scaled).unwrap(), ratio) < 1e-12);
    }
}

#[test]
fn estimators_finite_on_random_realizations() {
    let pop = table1_population(0.3, 2);
    let xbar = compute_params(&pop).unwrap().x_mean;
    let cp = ClassParams::new(0.6, 40.0, 1.0, 10.0).unwrap();
    let d1 = Design::single(30, 2.0);
    let d2 = Design::two_phase(80, 30, 2.0);
    for r in 0..10_000 {
        let s1 = realize(&d1, &pop, &mut replication_rng(3, r)).unwrap();
        let s2 = realize(&d2, &pop, &mut replication_rng(4, r)).unwrap();
        for kind in EstimatorKind::ALL {
            let s = if kind.is_two_phase() { &s2 } else { &s1 };
            match kind.evaluate(s, Some(xbar), Some(&cp)) {
                Ok(v) => assert!(v.is_finite(), "{kind} gave {v}"),
                Err(e) => panic!("{kind} undefined on replication {r}: {e}"),
            }
        }
    }
}

#[test]
fn expected_nonresponse_share_matches_w2() {
    let pop = table1_population(0.3, 3);
    let w2 = compute_params(&pop).unwrap().w2;
    let design = Design::single(50, 1.5);
    let reps = 10_000;
    let total: f64 = (0..reps)
        .map(|r| {
            let s = realize(&design, &pop, &mut replication_rng(5, r)).unwrap();
            s.n2 as f64 / s.n() as f64
        })
        .sum();
    let mean = total / reps as f64;
    let se = (w2 * (1.0 - w2) / 50.0).sqrt() / (reps as f64).sqrt();
    assert!((mean - w2).abs() <= 3.0 * se, "mean {mean} vs {w2}");
}
