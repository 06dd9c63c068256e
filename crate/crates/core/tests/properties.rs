use proptest::prelude::*;

use eisenhart_core::connection::generalized_christoffel;
use eisenhart_core::curvature::riemann_at;
use eisenhart_core::expr::{parse_expression, Expression};
use eisenhart_core::iz::iz_connection_from_torsion;
use eisenhart_core::jet::Jet2;
use eisenhart_core::metric::{metric_at, MetricityMode};
use eisenhart_core::samples;

const VARS: [&str; 4] = ["t", "x", "y", "z"];

/// Smooth expressions, finite on `[-0.8, 0.8]^4`.
fn expr_strategy() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(VARS.to_vec()).prop_map(String::from),
        (-3.0f64..3.0).prop_map(|v| format!("{v:.4}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})/(2 + sin({b}))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(tanh({a}))")),
            inner.clone().prop_map(|a| format!("sqrt(3 + cos({a}))")),
            inner.clone().prop_map(|a| format!("ln(2 + sin({a}))")),
            inner.clone().prop_map(|a| format!("-({a})^2")),
            (inner, -1.5f64..1.5).prop_map(|(a, p)| format!("pow(2 + cos({a}), {p:.3})")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-0.8f64..0.8)
}

fn parse(src: &str) -> Expression {
    parse_expression(src, &VARS).unwrap()
}

fn jet_at(e: &Expression, p: [f64; 4]) -> Jet2 {
    let vars: Vec<Jet2> = (0..4).map(|k| Jet2::variable(k, p[k])).collect();
    e.eval_jet2(&vars).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn jets_close(a: &Jet2, b: &Jet2, rel: f64) -> bool {
    close(a.value, b.value, rel)
        && (0..4).all(|i| close(a.grad[i], b.grad[i], rel))
        && (0..4).all(|i| (0..4).all(|j| close(a.hess[i][j], b.hess[i][j], rel)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_expressions_reparse(src in expr_strategy(), p in point()) {
        let e = parse(&src);
        let printed = e.to_string();
        let again = parse(&printed);
        prop_assert_eq!(again.to_string(), printed.clone());
        let (a, b) = (e.eval_value(&p).unwrap(), again.eval_value(&p).unwrap());
        prop_assert_eq!(a.to_bits(), b.to_bits(), "{} vs {}", src, printed);
    }

    #[test]
    fn jets_match_richardson_differences(src in expr_strategy(), p in point()) {
        let e = parse(&src);
        let j = jet_at(&e, p);
        let f = |k: usize, h: f64| {
            let mut q = p;
            q[k] += h;
            e.eval_value(&q).unwrap()
        };
        for k in 0..4 {
            let d = |h: f64| (f(k, h) - f(k, -h)) / (2.0 * h);
            let (a, b, c) = (d(2e-3), d(1e-3), d(5e-4));
            let fd = (16.0 * (4.0 * c - b) / 3.0 - (4.0 * b - a) / 3.0) / 15.0;
            prop_assert!(close(j.grad[k], fd, 1e-6), "{}: d/d{} jet {} fd {}", src, VARS[k], j.grad[k], fd);
        }
    }

    #[test]
    fn jets_are_linear(f in expr_strategy(), g in expr_strategy(), a in -3.0f64..3.0, b in -3.0f64..3.0, p in point()) {
        let combined = parse(&format!("{a:?}*({f}) + {b:?}*({g})"));
        let (jf, jg) = (jet_at(&parse(&f), p), jet_at(&parse(&g), p));
        let want = jf.scale(a) + jg.scale(b);
        prop_assert!(jets_close(&jet_at(&combined, p), &want, 1e-12));
    }

    #[test]
    fn jets_obey_product_rule(f in expr_strategy(), g in expr_strategy(), p in point()) {
        let prod = jet_at(&parse(&format!("({f})*({g})")), p);
        let (jf, jg) = (jet_at(&parse(&f), p), jet_at(&parse(&g), p));
        let mut want = Jet2::constant(jf.value * jg.value);
        for i in 0..4 {
            want.grad[i] = jf.grad[i] * jg.value + jf.value * jg.grad[i];
            for j in 0..4 {
                want.hess[i][j] = jf.hess[i][j] * jg.value
                    + jf.grad[i] * jg.grad[j]
                    + jf.grad[j] * jg.grad[i]
                    + jf.value * jg.hess[i][j];
            }
        }
        prop_assert!(jets_close(&prod, &want, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn curvature_symmetries(seed in any::<u64>()) {
        let mut r = samples::rng(seed);
        let model = samples::random_model(&mut r, false, true);
        let m = metric_at(&model, samples::random_point(&mut r)).unwrap();
        let c = generalized_christoffel(&m);
        let cur = riemann_at(&c, &m);
        let scale = cur.riemann.max_abs().max(1.0);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    // torsion antisymmetric in its last pair
                    prop_assert_eq!(c.torsion_low.get(&[i, j, k]), -c.torsion_low.get(&[i, k, j]));
                    for l in 0..4 {
                        let rv = |a, b, c, d| cur.riemann.get(&[a, b, c, d]);
                        prop_assert_eq!(rv(i, j, k, l), -rv(i, j, l, k));
                        let bianchi = rv(i, j, k, l) + rv(i, k, l, j) + rv(i, l, j, k);
                        prop_assert!(bianchi.abs() <= 1e-12 * scale, "bianchi {}", bianchi);
                    }
                }
                let ric = cur.ricci.get(&[i, j]) - cur.ricci.get(&[j, i]);
                prop_assert!(ric.abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn eta_is_symmetric(seed in any::<u64>(), fixed in any::<bool>()) {
        let mut r = samples::rng(seed);
        let model = samples::random_model(&mut r, false, false);
        let m = metric_at(&model, samples::random_point(&mut r)).unwrap();
        let c = generalized_christoffel(&m);
        let mode = if fixed { MetricityMode::FixedPoint } else { MetricityMode::AssumeZero };
        let ic = iz_connection_from_torsion(&m, &c, &samples::random_torsion(&mut r, 0.6), mode).unwrap();
        prop_assert!(ic.eta_asymmetry <= 1e-12);
        prop_assert!(ic.sym_identity_error <= 1e-12);
    }
}
