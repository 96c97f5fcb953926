//! Property-based invariants across the library modules.

use proptest::prelude::*;

use copson::conditions::{classify, embedding_constant, Case};
use copson::fundamental::FundamentalFunction;
use copson::grid::Grid;
use copson::oracle::{cl_norm, holder_saturator, lambda_norm};
use copson::parse::parse_weight;
use copson::{StepFunction, WeightExpr};

fn power_weight() -> impl Strategy<Value = WeightExpr> {
    (0.25f64..4.0, -0.9f64..1.5).prop_map(|(c, a)| WeightExpr::power(c, a))
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![0.25f64..4.0, Just(1.0)]
}

fn step_function() -> impl Strategy<Value = StepFunction> {
    (
        proptest::collection::vec(0.01f64..100.0, 1..6),
        proptest::collection::vec(0.01f64..10.0, 6),
    )
        .prop_map(|(raw_knots, raw_vals)| {
            let mut knots: Vec<f64> = raw_knots
                .iter()
                .scan(0.0f64, |acc, &w| {
                    *acc += w;
                    Some(*acc)
                })
                .collect();
            knots.dedup();
            let values = raw_vals[..knots.len()].to_vec();
            StepFunction::new(knots, values)
        })
}

proptest! {
    #[test]
    fn classification_is_a_partition(m in exponent(), p in exponent(), q in exponent()) {
        let c = classify(m, p, q).case;
        let expected = match (m <= q, p <= q) {
            (true, true) => Case::I,
            (true, false) => Case::II,
            (false, true) => Case::III,
            (false, false) => Case::IV,
        };
        prop_assert_eq!(c, expected);
    }

    #[test]
    fn rearrangement_is_canonical(f in step_function()) {
        let r = f.rearrange();
        // nonincreasing, nonnegative, same total mass, idempotent
        prop_assert!(r.values().windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(r.values().iter().all(|&v| v >= 0.0));
        prop_assert!((r.total() - f.total()).abs() <= 1e-9 * f.total().abs().max(1.0));
        prop_assert_eq!(r.rearrange(), r);
    }

    #[test]
    fn norms_are_homogeneous(
        f in step_function(),
        lambda in 0.1f64..10.0,
        q in exponent(),
    ) {
        let w = WeightExpr::power(1.0, 0.25);
        let f = f.rearrange();
        let a = lambda_norm(&w, q, &f, 1e-9);
        let b = lambda_norm(&w, q, &f.scaled(lambda), 1e-9);
        prop_assert!((b - lambda * a).abs() <= 1e-9 * (lambda * a).max(1e-12));
    }

    #[test]
    fn holder_saturator_normalizes(
        b in proptest::collection::vec(0.0f64..10.0, 2..8),
        q in 0.2f64..0.9,
        extra in 0.2f64..3.0,
    ) {
        let p = q + extra;
        prop_assume!(b.iter().any(|&x| x > 0.0));
        let c = holder_saturator(&b, p, q).unwrap();
        let cp: f64 = c.iter().map(|&x| x.powf(p)).sum();
        prop_assert!((cp - 1.0).abs() < 1e-12, "sum c^p = {cp}");
        // equality case of the Hoelder inequality
        let lhs: f64 = c.iter().zip(&b).map(|(&ck, &bk)| ck.powf(q) * bk).sum();
        let rhs: f64 = b.iter().map(|&x| x.powf(p / (p - q))).sum();
        let lhs = lhs.powf(1.0 / q);
        let rhs = rhs.powf((p - q) / (p * q));
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-12), "{lhs} vs {rhs}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn phi_is_monotone(u in power_weight(), v in power_weight(), m in exponent(), p in exponent()) {
        let f = FundamentalFunction::new(u, v, m, p);
        let mut prev = 0.0f64;
        for e in [-6i32, -2, 0, 2, 6] {
            let t = 2f64.powi(e);
            let cur = f.phi_p(t, 1e-8).unwrap();
            prop_assert!(cur >= prev * (1.0 - 1e-8), "phi^p not monotone: {prev} then {cur}");
            prev = cur;
        }
    }

    #[test]
    fn cl_norm_is_homogeneous(f in step_function(), lambda in 0.1f64..10.0) {
        let u = WeightExpr::power(1.0, -0.25);
        let v = WeightExpr::power(1.0, -0.5);
        let f = f.rearrange();
        let a = cl_norm(&u, &v, 1.0, 2.0, &f, 1e-8);
        let b = cl_norm(&u, &v, 1.0, 2.0, &f.scaled(lambda), 1e-8);
        prop_assert!((b - lambda * a).abs() <= 1e-6 * (lambda * a).max(1e-12), "{a} {b}");
    }

    #[test]
    fn parsed_power_weights_evaluate(c in 0.1f64..10.0, a in -1.5f64..1.5) {
        let w = parse_weight(&format!("pow({c},{a})")).unwrap();
        for t in [0.5f64, 1.0, 3.0] {
            let expect = c * t.powf(a);
            prop_assert!((w.eval(t) - expect).abs() <= 1e-12 * expect.abs().max(1e-12));
        }
    }
}

#[test]
fn report_condition_scales_in_w() {
    // w -> lambda w multiplies every condition by lambda^{1/q} exactly
    let grid = Grid {
        lo_exp: -12,
        hi_exp: 12,
        points_per_octave: 4,
        tol: 1e-7,
    };
    let u = WeightExpr::power(1.0, 0.0);
    let v = WeightExpr::power(1.0, -0.5);
    let w = WeightExpr::power(1.0, 0.5);
    for &(m, p, q) in &[(1.0, 1.0, 2.0), (0.5, 3.0, 2.0)] {
        let base = embedding_constant(&u, &v, &w, m, p, q, &grid).unwrap();
        let scaled =
            embedding_constant(&u, &v, &WeightExpr::scaled(&w, 8.0), m, p, q, &grid).unwrap();
        for ((_, b), (_, s)) in base.conditions.iter().zip(&scaled.conditions) {
            if b.is_finite() && *b > 0.0 {
                let slope = (s / b).ln() / 8f64.ln();
                assert!(
                    (slope - 1.0 / q).abs() < 1e-9,
                    "slope {slope} expected {}",
                    1.0 / q
                );
            }
        }
    }
}
