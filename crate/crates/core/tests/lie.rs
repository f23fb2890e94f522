#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use varmult::jetgeom::invariants;
use varmult::liealgebra::{
    biinvariant_forms, killing_form, lie_lagrangian, lie_system, matrix_to_vector, to_expr_matrix,
    StructureConstants,
};
use varmult::linalg::QMatrix;
use varmult::multspace::{analyze, MultiplierOptions};
use varmult::symexpr::Expr;
use varmult::varlagrange::verify_multiplier;

fn bracket(sc: &StructureConstants, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let m = sc.m();
    (0..m)
        .map(|k| {
            let mut s = BigRational::zero();
            for i in 0..m {
                for j in 0..m {
                    s += sc.get(k, i, j) * &a[i] * &b[j];
                }
            }
            s
        })
        .collect()
}

fn form(mat: &QMatrix, a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    for i in 0..a.len() {
        for j in 0..b.len() {
            s += &mat[i][j] * &a[i] * &b[j];
        }
    }
    s
}

/// `M([z, a], b) + M(a, [z, b]) = 0` on basis vectors.
fn ad_invariant(sc: &StructureConstants, mat: &QMatrix) -> bool {
    let m = sc.m();
    let e = |i: usize| (0..m).map(|k| if k == i { q(1) } else { q(0) }).collect::<Vec<_>>();
    (0..m).all(|z| {
        (0..m).all(|a| {
            (0..m).all(|b| {
                let l = form(mat, &bracket(sc, &e(z), &e(a)), &e(b));
                let r = form(mat, &e(a), &bracket(sc, &e(z), &e(b)));
                (l + r).is_zero()
            })
        })
    })
}

fn in_span(forms: &[QMatrix], mat: &QMatrix) -> bool {
    let mut rows: Vec<Vec<BigRational>> = forms.iter().map(matrix_to_vector).collect();
    let r = dense_rank(&rows);
    rows.push(matrix_to_vector(mat));
    dense_rank(&rows) == r
}

fn heisenberg() -> StructureConstants {
    StructureConstants::from_brackets(3, &[(0, 1, vec![q(0), q(0), q(1)])]).unwrap()
}

fn filiform4() -> StructureConstants {
    StructureConstants::from_brackets(
        4,
        &[(0, 1, vec![q(0), q(0), q(1), q(0)]), (0, 2, vec![q(0), q(0), q(0), q(1)])],
    )
    .unwrap()
}

/// Jacobi-satisfying algebras: random semidirect products and fixed
/// nilpotent or simple algebras, all in a random basis.
fn algebra() -> impl Strategy<Value = StructureConstants> {
    let semidirect = (2usize..=3)
        .prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(small_rational(), n), n))
        .prop_map(|d| StructureConstants::semidirect(&d).unwrap());
    let fixed = prop::sample::select(vec![0usize, 1, 2, 3]).prop_map(|i| match i {
        0 => heisenberg(),
        1 => filiform4(),
        2 => StructureConstants::so3(),
        _ => StructureConstants::affine2(),
    });
    prop_oneof![semidirect, fixed]
        .prop_flat_map(|sc| (Just(sc.clone()), invertible(sc.m())))
        .prop_map(|(sc, t)| sc.change_basis(&t).unwrap())
}

#[test]
fn killing_form_is_in_the_span_for_twenty_algebras() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(20));
    runner
        .run(&algebra(), |sc| {
            let forms = biinvariant_forms(&sc);
            let k = killing_form(&sc);
            prop_assert!(ad_invariant(&sc, &k));
            prop_assert!(in_span(&forms, &k));
            Ok(())
        })
        .unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn biinvariant_basis_is_ad_invariant(sc in algebra()) {
        for f in biinvariant_forms(&sc) {
            prop_assert!(ad_invariant(&sc, &f));
        }
    }

    #[test]
    fn s_is_twice_the_structure_constants(sc in algebra()) {
        let inv = invariants(&lie_system(&sc)).unwrap();
        let m = sc.m();
        for g in 0..m {
            for a in 0..m {
                for b in 0..m {
                    let want = Expr::rational(sc.get(g, a, b) * q(2));
                    prop_assert_eq!(&inv.s[g][a][b], &want);
                }
            }
        }
    }

    #[test]
    fn pipeline_dimension_matches_biinvariant_forms(
        sc in algebra().prop_filter("dense four-dimensional bases are slow", |sc| sc.m() <= 3),
    ) {
        let r = analyze(&lie_system(&sc), &MultiplierOptions { reconstruct: false, ..Default::default() }).unwrap();
        prop_assert_eq!(r.dimension, biinvariant_forms(&sc).len());
    }

    #[test]
    fn lie_lagrangians_verify(sc in algebra(), c in proptest::collection::vec(small_rational(), 4)) {
        let forms = biinvariant_forms(&sc);
        let m = sc.m();
        let mut mat = vec![vec![q(0); m]; m];
        for (f, k) in forms.iter().zip(&c) {
            for a in 0..m {
                for b in 0..m {
                    mat[a][b] += &f[a][b] * k;
                }
            }
        }
        let l = lie_lagrangian(&mat, &sc).unwrap();
        let v = verify_multiplier(&l, &to_expr_matrix(&mat), &lie_system(&sc)).unwrap();
        prop_assert!(v.holds);
    }
}

#[test]
fn corpus_algebras_pipeline_equality() {
    for sc in [StructureConstants::so3(), StructureConstants::solvable4(), StructureConstants::affine2()] {
        let r = analyze(&lie_system(&sc), &MultiplierOptions::default()).unwrap();
        assert_eq!(r.dimension, biinvariant_forms(&sc).len());
    }
}
