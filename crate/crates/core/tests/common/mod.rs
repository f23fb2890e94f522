#![allow(dead_code, clippy::needless_range_loop)]

pub mod oracle;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use varmult::corpus::Corpus;
use varmult::jetgeom::FGordonSystem;
use varmult::liealgebra::lie_system;
use varmult::linalg::QMatrix;
use varmult::symexpr::{Coordinate, VarNames};

pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn uv() -> VarNames {
    VarNames::new(&["u", "v"]).unwrap()
}

pub fn sys(f: &[&str]) -> FGordonSystem {
    FGordonSystem::parse(uv(), f).unwrap()
}

/// Every system in the bundled corpus, Lie cases included.
pub fn corpus_systems() -> Vec<(String, FGordonSystem)> {
    Corpus::bundled()
        .cases
        .iter()
        .map(|c| {
            let s = match (&c.system, &c.lie) {
                (Some(d), _) => d.to_system().unwrap(),
                (_, Some(l)) => lie_system(&l.to_constants().unwrap()),
                _ => unreachable!(),
            };
            (c.name.clone(), s)
        })
        .collect()
}

pub fn corpus_normal_form() -> Vec<(String, FGordonSystem)> {
    corpus_systems().into_iter().filter(|(_, s)| s.is_normal_form()).collect()
}

/// Plain Gaussian elimination, kept separate from the library's own.
pub fn dense_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = BigRational::one() / &a[rank][c];
        let pivot: Vec<BigRational> = a[rank].iter().map(|v| v * &inv).collect();
        for r in 0..a.len() {
            if r != rank && !a[r][c].is_zero() {
                let k = a[r][c].clone();
                for j in c..cols {
                    let d = &k * &pivot[j];
                    a[r][j] -= d;
                }
            }
        }
        a[rank] = pivot;
        rank += 1;
    }
    rank
}

pub fn jet_coords(m: usize) -> Vec<Coordinate> {
    let mut c = Coordinate::base(m);
    c.extend((0..m).map(Coordinate::Ux));
    c.extend((0..m).map(Coordinate::Uy));
    c
}

pub fn small_rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| qf(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    small_rational().prop_filter("nonzero", |r| !r.is_zero())
}

/// Invertible integer matrices with small entries.
pub fn invertible(m: usize) -> impl Strategy<Value = QMatrix> {
    proptest::collection::vec(proptest::collection::vec(-3i64..=3, m), m)
        .prop_map(|rows| rows.into_iter().map(|r| r.into_iter().map(q).collect()).collect::<QMatrix>())
        .prop_filter("invertible", |t: &QMatrix| dense_rank(t) == t.len())
}

/// Polynomials in x, y, u, v with small integer coefficients, as source text.
pub fn base_poly(max_terms: usize) -> impl Strategy<Value = String> {
    let monomial = prop::sample::select(vec!["1", "x", "y", "u", "v", "x*y", "u*v", "x*u", "y*v", "u^2", "v^2"]);
    proptest::collection::vec((-4i64..=4, monomial), 0..=max_terms).prop_map(|terms| {
        let body: Vec<String> = terms
            .into_iter()
            .filter(|(c, _)| *c != 0)
            .map(|(c, mo)| format!("({c})*{mo}"))
            .collect();
        if body.is_empty() {
            "0".into()
        } else {
            body.join(" + ")
        }
    })
}

/// Two-component normal-form systems with polynomial coefficients.
pub fn random_system() -> impl Strategy<Value = FGordonSystem> {
    proptest::collection::vec(base_poly(2), 8).prop_map(|p| {
        let f1 = format!("-(({})*u_x*v_y + ({})*u_x + ({})*v_y + {})", p[0], p[1], p[2], p[3]);
        let f2 = format!("-(({})*v_x*u_y + ({})*v_x + ({})*u_y + {})", p[4], p[5], p[6], p[7]);
        sys(&[f1.as_str(), f2.as_str()])
    })
}
