mod common;

use common::*;
use proptest::prelude::*;

use varmult::jetgeom::{check_normal_form, invariants, FGordonSystem};
use varmult::symexpr::{eval_rational, is_zero, parse, parse_ast, Coordinate, Direction, Sampler};

fn leaf() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "x", "y", "u", "v", "u_x", "u_y", "v_x", "v_y", "2", "-3", "(1/2)", "(5/7)",
    ])
    .prop_map(String::from)
}

/// Rational expressions in the first-order jet, optionally with exp.
fn expr(with_funcs: bool) -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 24, 2, move |inner| {
        let mut arms = vec![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")).boxed(),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a})*({b})")).boxed(),
            inner.clone().prop_map(|a| format!("({a})^2")).boxed(),
            inner.clone().prop_map(|a| format!("({a})/(3 + x^2)")).boxed(),
        ];
        if with_funcs {
            arms.push(inner.prop_map(|a| format!("exp({a})")).boxed());
        }
        proptest::strategy::Union::new(arms)
    })
}

fn ex(s: &str) -> varmult::symexpr::Expr {
    parse(s, &uv()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_commutes(a in expr(true), b in expr(true)) {
        prop_assert_eq!(ex(&format!("{a} + {b}")), ex(&format!("{b} + {a}")));
    }

    #[test]
    fn multiplication_distributes(a in expr(false), b in expr(false), c in expr(false)) {
        prop_assert_eq!(
            ex(&format!("({a})*(({b}) + ({c}))")),
            ex(&format!("({a})*({b}) + ({a})*({c})"))
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partials_commute(a in expr(true), i in 0usize..6, j in 0usize..6) {
        let cs = jet_coords(2);
        let e = ex(&a);
        prop_assert_eq!(e.partial(&cs[i]).partial(&cs[j]), e.partial(&cs[j]).partial(&cs[i]));
    }

    #[test]
    fn normalization_preserves_values(a in expr(false), seed in any::<u64>()) {
        let ast = parse_ast(&a, &uv()).unwrap();
        let e = ast.to_expr().unwrap();
        let mut s = Sampler::new(seed);
        for _ in 0..100 {
            let p = s.point(&jet_coords(2));
            match (ast.eval(&p), eval_rational(&e, &p)) {
                (Ok(l), Ok(r)) => prop_assert_eq!(l.value, r.value),
                // a pole of the unsimplified tree may cancel in normal form
                (Err(_), _) => {}
                (Ok(_), Err(e)) => prop_assert!(false, "normal form fails where the tree does not: {e}"),
            }
        }
    }

    #[test]
    fn mixed_total_derivatives_commute(
        c in base_poly(2), a in base_poly(2), b in base_poly(2), e0 in base_poly(3),
        g in base_poly(3),
    ) {
        let f = format!("-(({c})*u_x*v_y + ({a})*u_x + ({b})*v_y + {e0})");
        let s = sys(&[f.as_str(), "u*v_x + x*v"]);
        let e = ex(&format!("({g})*u_x + v_y*({g})^2"));
        let dxy = s.total_derivative(&s.total_derivative(&e, Direction::Y).unwrap(), Direction::X).unwrap();
        let dyx = s.total_derivative(&s.total_derivative(&e, Direction::X).unwrap(), Direction::Y).unwrap();
        prop_assert!(is_zero(&(dxy - dyx)).is_zero());
    }

    #[test]
    fn normal_form_reassembles(
        c0 in base_poly(2), c1 in base_poly(2), a in base_poly(2), b in base_poly(2), e in base_poly(3),
    ) {
        let f1 = format!("-(({c0})*u_x*v_y + ({c1})*v_x*u_y + ({a})*u_x + ({b})*v_y + {e})");
        let f2 = format!("-(({c1})*u_x*u_y + ({a})*v_x + {e})");
        let s = sys(&[f1.as_str(), f2.as_str()]);
        let nf = check_normal_form(s.f()).unwrap();
        let back = nf.reassemble();
        for (x, y) in back.iter().zip(s.f()) {
            prop_assert!(is_zero(&(x - y)).is_zero());
        }
    }

    #[test]
    fn s_is_antisymmetric(
        q in proptest::collection::vec(base_poly(2), 8),
        lin in proptest::collection::vec(base_poly(2), 2),
    ) {
        let terms = ["u_x*u_y", "u_x*v_y", "v_x*u_y", "v_x*v_y"];
        let rhs: Vec<String> = (0..2)
            .map(|g| {
                let quad: Vec<String> = (0..4).map(|k| format!("({})*{}", q[4 * g + k], terms[k])).collect();
                format!("{} + ({})*u_x", quad.join(" + "), lin[g])
            })
            .collect();
        let s = FGordonSystem::parse(uv(), &rhs).unwrap();
        let inv = invariants(&s).unwrap();
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    prop_assert!((&inv.s[g][a][b] + &inv.s[g][b][a]).is_zero());
                    prop_assert!(!inv.s[g][a][b].depends_on_any(|c| c.is_gradient()));
                }
            }
        }
    }

    #[test]
    fn g_form_has_equal_gradient_free_h_and_k(g1 in base_poly(4), g2 in base_poly(4)) {
        let s = sys(&[g1.as_str(), g2.as_str()]);
        let inv = invariants(&s).unwrap();
        prop_assert!(inv.s_is_zero());
        for a in 0..2 {
            for b in 0..2 {
                prop_assert_eq!(&inv.h[a][b], &inv.k[a][b]);
                prop_assert_eq!(&inv.h[a][b], &s.f()[a].partial(&Coordinate::U(b)));
            }
        }
    }
}

#[test]
fn corpus_normal_forms_reassemble() {
    for (name, s) in corpus_normal_form() {
        let back = s.normal_form().unwrap().reassemble();
        for (a, b) in back.iter().zip(s.f()) {
            assert!(is_zero(&(a - b)).is_zero(), "{name}");
        }
    }
}
