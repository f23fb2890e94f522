//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact:
//! rational arithmetic, symbolic zero tests, no floating tolerance.

mod common;

use common::*;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use varmult::classify2d::{classify, covariance_check, AffineMap, Label, Subtype};
use varmult::jetgeom::{connection_form, invariants, FGordonSystem, Matrix};
use varmult::liealgebra::{
    biinvariant_forms, is_biinvariant, killing_form, lie_lagrangian, lie_system, matrix_to_vector,
    to_expr_matrix, StructureConstants,
};
use varmult::linalg::{determinant, QMatrix};
use varmult::multspace::{analyze, satisfies_conditions, Degeneracy, MultiplierOptions, MultiplierReport};
use varmult::symexpr::{is_zero, parse, Coordinate, Expr, VarNames};
use varmult::varlagrange::{
    construct_lagrangian, divergence_equivalent, euler_lagrange, verify_multiplier, Lagrangian,
};

const FUZZ_CASES: u32 = 50;

struct Criterion {
    number: usize,
    title: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(number: usize, title: &'static str) -> Self {
        Criterion { number, title, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|(_, ok)| *ok)
    }

    fn print(&self) {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        println!("criterion {} {verdict}: {}", self.number, self.title);
        for (what, ok) in &self.checks {
            println!("    [{}] {what}", if *ok { "ok" } else { "FAILED" });
        }
    }
}

fn runner() -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases: FUZZ_CASES, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn fuzz<S: Strategy>(s: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> bool {
    runner().run(&s, test).is_ok()
}

fn ex(s: &str) -> Expr {
    parse(s, &uv()).unwrap()
}

fn mat(rows: &[&[&str]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|e| ex(e)).collect()).collect()
}

fn zero(e: &Expr) -> bool {
    is_zero(e).is_zero()
}

fn same(a: &Matrix, b: &Matrix) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| zero(&(x - y)))
}

/// True if `b` is a nonzero multiple of `a`.
fn proportional(a: &Matrix, b: &Matrix) -> bool {
    let Some((i, j)) = (0..a.len())
        .flat_map(|i| (0..a.len()).map(move |j| (i, j)))
        .find(|&(i, j)| !zero(&a[i][j]))
    else {
        return false;
    };
    let k = &b[i][j] / &a[i][j];
    !zero(&k) && a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| zero(&(&k * x - y)))
}

fn verifies(s: &FGordonSystem, l: &str, m: &Matrix) -> bool {
    let l = Lagrangian::Free(parse(l, s.names()).unwrap());
    verify_multiplier(&l, m, s).unwrap().holds
}

fn report(s: &FGordonSystem) -> MultiplierReport {
    analyze(s, &MultiplierOptions::default()).unwrap()
}

fn qmat(rows: &[&[i64]]) -> QMatrix {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

fn in_span(forms: &[QMatrix], m: &QMatrix) -> bool {
    let mut rows: Vec<Vec<BigRational>> = forms.iter().map(matrix_to_vector).collect();
    let r = dense_rank(&rows);
    rows.push(matrix_to_vector(m));
    dense_rank(&rows) == r
}

/// Nullity of `M([e_z, e_a], e_b) + M(e_a, [e_z, e_b]) = 0`, built
/// directly from the brackets.
fn dense_biinvariant_dimension(sc: &StructureConstants) -> usize {
    let m = sc.m();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect();
    let col = |a: usize, b: usize| pairs.iter().position(|&p| p == (a.min(b), a.max(b))).unwrap();
    let mut rows = Vec::new();
    for z in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut r = vec![BigRational::zero(); pairs.len()];
                for k in 0..m {
                    r[col(k, b)] += sc.get(k, z, a);
                    r[col(a, k)] += sc.get(k, z, b);
                }
                rows.push(r);
            }
        }
    }
    pairs.len() - dense_rank(&rows)
}

fn criterion1() -> Criterion {
    let mut c = Criterion::new(1, "u_xy = v, v_xy = u (tolerance: exact)");
    let s = sys(&["v", "u"]);
    let inv = invariants(&s).unwrap();
    let swap = mat(&[&["0", "1"], &["1", "0"]]);
    c.check("H = [[0,1],[1,0]]", same(&inv.h, &swap));
    c.check("K = [[0,1],[1,0]]", same(&inv.k, &swap));
    c.check("S = 0", inv.s_is_zero());
    let r = report(&s);
    c.check(format!("dimension = 2 (got {})", r.dimension), r.dimension == 2);
    let witness_ok = match &r.degeneracy {
        Degeneracy::Nondegenerate { witness, .. } => {
            let m: Matrix = (0..2)
                .map(|i| {
                    (0..2)
                        .map(|j| r.basis.iter().zip(witness).map(|(b, w)| Expr::rational(w.clone()) * &b[i][j]).sum())
                        .collect()
                })
                .collect();
            let (a, b) = (&m[0][0], &m[0][1]);
            zero(&(a - &m[1][1])) && !zero(&(a * a - b * b))
        }
        _ => false,
    };
    c.check("degeneracy witness M = [[a,b],[b,a]] with a^2 - b^2 != 0", witness_ok);
    for (a, b) in [(1i64, 0i64), (3, -2)] {
        let l = format!("-({a}/2)*(u_x*u_y + v_x*v_y + 2*u*v) - ({b}/2)*(2*u_x*v_y + u^2 + v^2)");
        let m = mat(&[&[&a.to_string(), &b.to_string()], &[&b.to_string(), &a.to_string()]]);
        c.check(format!("L verifies off-shell at (a, b) = ({a}, {b})"), verifies(&s, &l, &m));
    }
    c
}

fn criterion2() -> Criterion {
    let mut c = Criterion::new(2, "u_xy = v, v_xy = x u (tolerance: exact)");
    let s = sys(&["v", "x*u"]);
    let r = report(&s);
    let row0 = r.phi.stage_rows(0).any(|(_, row)| {
        let [a, b, d] = [&row.coeffs[0], &row.coeffs[1], &row.coeffs[2]];
        !zero(a) && zero(b) && zero(&(d / a + Expr::x()))
    });
    c.check("stage-0 row M11 - x M22", row0);
    c.check(format!("stabilized at stage {} <= 2", r.stage), r.stage <= 2);
    c.check(format!("rank = 2 (got {})", r.rank), r.rank == 2);
    c.check(format!("dimension = 1 (got {})", r.dimension), r.dimension == 1);
    let m = mat(&[&["0", "1"], &["1", "0"]]);
    c.check("reconstructed M = [[0,1],[1,0]]", r.basis.len() == 1 && proportional(&m, &r.basis[0]));
    match construct_lagrangian(&m, &s, 4) {
        Ok(l) => {
            let l = Lagrangian::Structured(l);
            let literal = Lagrangian::Free(ex("-u_x*v_y - (u^2 + x*v^2)/2"));
            c.check(
                "constructed L divergence-equivalent to -u_x v_y - (u^2 + x v^2)/2",
                divergence_equivalent(&l, &literal, 2).unwrap(),
            );
            let corrected = Lagrangian::Free(ex("-u_x*v_y - (x*u^2 + v^2)/2"));
            c.check(
                "constructed L divergence-equivalent to -u_x v_y - (x u^2 + v^2)/2",
                divergence_equivalent(&l, &corrected, 2).unwrap(),
            );
        }
        Err(e) => c.check(format!("construction failed: {e}"), false),
    }
    c
}

fn criterion3() -> Criterion {
    let mut c = Criterion::new(3, "u_xy = v, v_xy = u_x (tolerance: exact)");
    let s = sys(&["v", "u_x"]);
    let r = report(&s);
    c.check(format!("dimension = 0 (got {})", r.dimension), r.dimension == 0);
    // the stage-k rows single out the k-th unknown
    for (stage, unknown) in ["M11", "M12", "M22"].iter().enumerate() {
        let hit = r.phi.stage_rows(stage).any(|(_, row)| {
            row.coeffs.iter().enumerate().all(|(i, e)| (i == stage) != zero(e))
        });
        c.check(format!("stage {stage} row is {unknown} = 0"), hit);
    }
    c
}

fn criterion4() -> Criterion {
    let mut c = Criterion::new(4, "so(3) bi-invariant forms and Lagrangian (tolerance: exact)");
    let sc = StructureConstants::so3();
    let forms = biinvariant_forms(&sc);
    let k = killing_form(&sc);
    c.check(format!("bi-invariant dimension = 1 (got {})", forms.len()), forms.len() == 1);
    c.check("spanned by the Killing form", !determinant(&k).is_zero() && in_span(&forms, &k));
    let dense = dense_biinvariant_dimension(&sc);
    c.check(format!("independent dense nullspace dimension = {dense}"), dense == forms.len());
    let sys = lie_system(&sc);
    let r = report(&sys);
    c.check(format!("pipeline dimension on the Lie system = {}", r.dimension), r.dimension == forms.len());
    let ok = lie_lagrangian(&forms[0], &sc)
        .map(|l| verify_multiplier(&l, &to_expr_matrix(&forms[0]), &sys).unwrap().holds)
        .unwrap_or(false);
    c.check("Lie Lagrangian verifies off-shell", ok);
    c
}

fn criterion5() -> Criterion {
    let mut c = Criterion::new(5, "four-dimensional solvable algebra (tolerance: exact)");
    let sc = StructureConstants::solvable4();
    let forms = biinvariant_forms(&sc);
    let lambda = qmat(&[&[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 0]]);
    let mu = qmat(&[&[0, 0, 0, -1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 0]]);
    c.check("lambda a3 b3 is bi-invariant", is_biinvariant(&sc, &lambda) && in_span(&forms, &lambda));
    c.check(
        "mu (a2 b3 + a3 b2 - a1 b4 - a4 b1) is bi-invariant",
        is_biinvariant(&sc, &mu) && in_span(&forms, &mu),
    );
    c.check("nondegenerate at mu = 1, lambda = 0", !determinant(&mu).is_zero());
    let family_ok = [(2i64, -3i64), (-5, 1), (7, 4)].iter().all(|&(l, m)| {
        let f: QMatrix = (0..4)
            .map(|i| (0..4).map(|j| &lambda[i][j] * q(l) + &mu[i][j] * q(m)).collect())
            .collect();
        is_biinvariant(&sc, &f) && !determinant(&f).is_zero()
    });
    c.check("nondegenerate and bi-invariant for sampled mu != 0 and any lambda", family_ok);
    c
}

fn criterion6() -> Criterion {
    let mut c = Criterion::new(6, "two-component classification cases (tolerance: exact)");

    let three = sys(&["(x + y)*u", "(x + y)*v"]);
    let v = classify(&three).unwrap();
    c.check(format!("u_xy = lambda u, v_xy = lambda v -> {}", v.label), v.label == Label::ThreeLagrangians);
    let d = report(&three).dimension;
    c.check(format!("multiplier dimension = 3 (got {d})"), d == 3);
    for (l, m) in [
        ("u_x*u_y + (x + y)*u^2", mat(&[&["-2", "0"], &["0", "0"]])),
        ("u_x*v_y + (x + y)*u*v", mat(&[&["0", "-1"], &["-1", "0"]])),
        ("v_x*v_y + (x + y)*v^2", mat(&[&["0", "0"], &["0", "-2"]])),
    ] {
        c.check(format!("L = {l} verifies"), verifies(&three, l, &m));
    }

    // F = W_v, G = W_u with W = phi (u^2 - v^2)/2, and Z_u = F, -Z_v = G
    let harmonic = sys(&["-(x + y)*v", "(x + y)*u"]);
    let v = classify(&harmonic).unwrap();
    c.check(
        format!("harmonic W -> {}", v.label),
        v.label == Label::TwoLagrangians(Some(Subtype::Harmonic)),
    );
    let w = "(x + y)*(u^2 - v^2)/2";
    let z = "(-(x + y)*u*v)";
    let m1 = mat(&[&["0", "-1"], &["-1", "0"]]);
    let m2 = mat(&[&["-2", "0"], &["0", "2"]]);
    c.check("u_x v_y + W verifies", verifies(&harmonic, &format!("u_x*v_y + {w}"), &m1));
    c.check(
        "u_x u_y - v_x v_y + Z verifies",
        verifies(&harmonic, &format!("u_x*u_y - v_x*v_y + {z}"), &m2),
    );
    c.check(
        "u_x u_y - v_x v_y + 2 Z verifies",
        verifies(&harmonic, &format!("u_x*u_y - v_x*v_y + 2*{z}"), &m2),
    );

    // a(u) = u^3, b(u) = u^2
    let vvv = sys(&["3*u^2", "6*u*v + 2*u"]);
    let v = classify(&vvv).unwrap();
    c.check(
        format!("u_xy = a'(u), v_xy = a''(u) v + b'(u) -> {}", v.label),
        v.label == Label::TwoLagrangians(Some(Subtype::DegenerateWvv)),
    );
    c.check(
        "u_x u_y + 2 a(u) verifies",
        verifies(&vvv, "u_x*u_y + 2*u^3", &mat(&[&["-2", "0"], &["0", "0"]])),
    );
    c.check(
        "u_x v_y + a'(u) v + b(u) verifies",
        verifies(&vvv, "u_x*v_y + 3*u^2*v + u^2", &mat(&[&["0", "-1"], &["-1", "0"]])),
    );
    c
}

fn criterion7() -> Criterion {
    let mut c = Criterion::new(7, "wave systems u_xy = 0 for m = 1, 2, 3 (tolerance: exact)");
    for m in 1..=3 {
        let zeros = vec!["0"; m];
        let s = FGordonSystem::parse(VarNames::indexed(m), &zeros).unwrap();
        let r = report(&s);
        let n = m * (m + 1) / 2;
        c.check(
            format!("m = {m}: no rows, dimension {} = {n}", r.dimension),
            r.phi.rows().is_empty() && r.dimension == n,
        );
    }
    c
}

fn free_d(e: &Expr, dir: Coordinate, grad: fn(usize) -> Expr) -> Expr {
    let mut out = e.partial(&dir);
    for a in 0..2 {
        out += &(e.partial(&Coordinate::U(a)) * grad(a));
    }
    out
}

fn combine(basis: &[Matrix], c: &[BigRational]) -> Matrix {
    let m = basis[0].len();
    (0..m)
        .map(|a| {
            (0..m)
                .map(|b| basis.iter().zip(c).map(|(bm, k)| Expr::rational(k.clone()) * &bm[a][b]).sum())
                .collect()
        })
        .collect()
}

fn criterion8() -> Criterion {
    let mut c = Criterion::new(8, "property suites, 50 deterministic fuzz cases each (tolerance: exact)");

    let monotone = fuzz(random_system(), |s| {
        let r = analyze(&s, &MultiplierOptions { reconstruct: false, ..Default::default() }).unwrap();
        prop_assert!(r.stage_ranks.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(r.stage <= 3);
        Ok(())
    });
    c.check("rank monotonicity and stage cap", monotone);

    let antisym = fuzz(random_system(), |s| {
        let inv = invariants(&s).unwrap();
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    prop_assert!((&inv.s[g][a][b] + &inv.s[g][b][a]).is_zero());
                }
            }
        }
        Ok(())
    });
    c.check("S antisymmetry", antisym);

    let divergences = fuzz((base_poly(4), base_poly(4)), |(q1, q2)| {
        let l = free_d(&ex(&q1), Coordinate::X, Expr::ux) + free_d(&ex(&q2), Coordinate::Y, Expr::uy);
        for e in euler_lagrange(&Lagrangian::Free(l), 2).unwrap() {
            prop_assert!(e.is_zero());
        }
        Ok(())
    });
    c.check("E annihilates divergences", divergences);

    let solved: Vec<(FGordonSystem, MultiplierReport)> = corpus_normal_form()
        .into_iter()
        .map(|(_, s)| {
            let r = report(&s);
            (s, r)
        })
        .filter(|(_, r)| !r.basis.is_empty())
        .collect();
    let offshell = fuzz(
        (any::<prop::sample::Index>(), proptest::collection::vec(nonzero_rational(), 6)),
        |(pick, k)| {
            let (s, r) = pick.get(&solved);
            let m = combine(&r.basis, &k[..r.basis.len()]);
            prop_assert!(satisfies_conditions(&m, &r.phi, &connection_form(s).unwrap()));
            let l = construct_lagrangian(&m, s, 4).unwrap();
            prop_assert!(verify_multiplier(&Lagrangian::Structured(l), &m, s).unwrap().holds);
            Ok(())
        },
    );
    c.check("off-shell multiplier identity for constructed pairs", offshell);

    let two: Vec<FGordonSystem> = corpus_normal_form().into_iter().map(|(_, s)| s).filter(|s| s.m() == 2).collect();
    let maps = (nonzero_rational(), small_rational(), nonzero_rational(), small_rational(), invertible(2))
        .prop_map(|(a1, a0, b1, b0, t)| AffineMap { a: (a1, a0), b: (b1, b0), t });
    let covariance = fuzz((any::<prop::sample::Index>(), maps), |(pick, map)| {
        prop_assert!(covariance_check(pick.get(&two), &map).unwrap());
        Ok(())
    });
    c.check("covariance under affine fiber-preserving maps", covariance);

    let mismatches: Vec<String> = corpus_normal_form()
        .into_iter()
        .filter_map(|(name, s)| {
            let r = analyze(&s, &MultiplierOptions { reconstruct: false, ..Default::default() }).unwrap();
            let dense = oracle::dense_dimension(&s, 0x00ac_ce97, 3);
            (r.dimension != dense).then(|| format!("{name}: {} vs {dense}", r.dimension))
        })
        .collect();
    c.check(
        format!("oracle agreement on all corpus systems {mismatches:?}"),
        mismatches.is_empty(),
    );
    c
}

fn criterion9(suites: &Criterion) -> Criterion {
    let mut c = Criterion::new(9, "existence statements covered by exact identities");
    let covered = ["off-shell multiplier identity", "oracle agreement"];
    for name in covered {
        let ok = suites.checks.iter().any(|(w, ok)| w.starts_with(name) && *ok);
        c.check(format!("{name} holds on the fuzzed and corpus objects"), ok);
    }
    c
}

#[test]
fn acceptance() {
    let mut all = vec![
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(),
    ];
    let ninth = criterion9(&all[7]);
    all.push(ninth);
    for c in &all {
        c.print();
    }
    let failed: Vec<usize> = all.iter().filter(|c| !c.passed()).map(|c| c.number).collect();
    println!("{} of {} criteria pass", all.len() - failed.len(), all.len());
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
