//! Brute-force multiplier-space dimension, written without the library's
//! invariant, row or rank code. H, K, S and the connection are recomputed
//! from f, every prolonged row is kept, and rows are evaluated at fresh
//! points with several gradient samples each.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use varmult::jetgeom::FGordonSystem;
use varmult::symexpr::{eval_rational, Coordinate, Direction, Expr, Sampler};

use super::dense_rank;

type Row = Vec<Expr>;

fn idx(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    // position of (a, b) in (0,0), (0,1), .., (0,m-1), (1,1), ..
    a * m - a * (a + 1) / 2 + b
}

fn gradients_to_zero(e: &Expr, m: usize) -> Expr {
    let mut sub = BTreeMap::new();
    for i in 0..m {
        sub.insert(Coordinate::Ux(i), Expr::zero());
        sub.insert(Coordinate::Uy(i), Expr::zero());
    }
    e.substitute_all(&sub)
}

struct Data {
    m: usize,
    n: usize,
    /// Coefficient of M_j in dM_i along each base coordinate.
    gamma: Vec<(Coordinate, Vec<Vec<Expr>>)>,
}

fn stage0(s: &FGordonSystem) -> Vec<Row> {
    let m = s.m();
    let n = m * (m + 1) / 2;
    let f = s.f();
    let d = |e: &Expr, c: Coordinate| e.partial(&c);
    let mut h = vec![vec![Expr::zero(); m]; m];
    let mut k = vec![vec![Expr::zero(); m]; m];
    for g in 0..m {
        for a in 0..m {
            let mut hh = d(&f[g], Coordinate::U(a));
            let mut kk = hh.clone();
            for sg in 0..m {
                hh += &(d(&f[g], Coordinate::Uy(sg)) * d(&f[sg], Coordinate::Ux(a)));
                kk += &(d(&f[g], Coordinate::Ux(sg)) * d(&f[sg], Coordinate::Uy(a)));
            }
            hh -= &s.total_derivative(&d(&f[g], Coordinate::Ux(a)), Direction::X).unwrap();
            kk -= &s.total_derivative(&d(&f[g], Coordinate::Uy(a)), Direction::Y).unwrap();
            h[g][a] = hh;
            k[g][a] = kk;
        }
    }
    let mut rows = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let mut r = vec![Expr::zero(); n];
            for sg in 0..m {
                r[idx(m, a, sg)] += &h[sg][b];
                r[idx(m, b, sg)] -= &k[sg][a];
            }
            rows.push(r);
        }
    }
    let s3 = |g: usize, a: usize, b: usize| {
        d(&d(&f[g], Coordinate::Ux(b)), Coordinate::Uy(a)) - d(&d(&f[g], Coordinate::Ux(a)), Coordinate::Uy(b))
    };
    for a in 0..m {
        for b in 0..m {
            for g in 0..m {
                let mut r = vec![Expr::zero(); n];
                for sg in 0..m {
                    r[idx(m, a, sg)] += &s3(sg, b, g);
                    r[idx(m, b, sg)] += &s3(sg, a, g);
                }
                rows.push(r);
            }
        }
    }
    rows
}

fn data(s: &FGordonSystem) -> Data {
    let m = s.m();
    let n = m * (m + 1) / 2;
    let f = s.f();
    // Omega(x) = B, Omega(y) = A, Omega(u^t)^s_a = C^s_{a t}
    let omega = |c: &Coordinate| -> Vec<Vec<Expr>> {
        (0..m)
            .map(|sg| {
                (0..m)
                    .map(|a| {
                        let e = match c {
                            Coordinate::X => gradients_to_zero(&f[sg].partial(&Coordinate::Uy(a)), m),
                            Coordinate::Y => gradients_to_zero(&f[sg].partial(&Coordinate::Ux(a)), m),
                            Coordinate::U(t) => f[sg].partial(&Coordinate::Ux(a)).partial(&Coordinate::Uy(*t)),
                            _ => unreachable!(),
                        };
                        -e
                    })
                    .collect()
            })
            .collect()
    };
    let mut gamma = Vec::new();
    for c in Coordinate::base(m) {
        let om = omega(&c);
        let mut gm = vec![vec![Expr::zero(); n]; n];
        for a in 0..m {
            for b in a..m {
                let i = idx(m, a, b);
                for sg in 0..m {
                    gm[i][idx(m, a, sg)] += &om[sg][b];
                    gm[i][idx(m, b, sg)] += &om[sg][a];
                }
            }
        }
        gamma.push((c, gm));
    }
    Data { m, n, gamma }
}

fn derive(rows: &[Row], d: &Data) -> Vec<Row> {
    let mut out = Vec::new();
    for r in rows {
        for (c, gm) in &d.gamma {
            let mut nr: Row = r.iter().map(|e| e.partial(c)).collect();
            for i in 0..d.n {
                if r[i].is_zero() {
                    continue;
                }
                for j in 0..d.n {
                    if !gm[i][j].is_zero() {
                        nr[j] += &(&r[i] * &gm[i][j]);
                    }
                }
            }
            if nr.iter().any(|e| !e.is_zero()) {
                out.push(nr);
            }
        }
    }
    out
}

fn point_rank(rows: &[Vec<Row>], points: &[Vec<BTreeMap<Coordinate, BigRational>>]) -> usize {
    let mut best = 0;
    for samples in points {
        let mut mat = Vec::new();
        for p in samples {
            for r in rows.iter().flatten() {
                let v: Option<Vec<BigRational>> = r
                    .iter()
                    .map(|e| if e.is_zero() { Some(BigRational::zero()) } else { eval_rational(e, p).ok().map(|v| v.value) })
                    .collect();
                mat.push(v.expect("oracle point is a pole"));
            }
        }
        best = best.max(dense_rank(&mat));
    }
    best
}

/// Nullity of the fully prolonged system at `points` fresh base points.
pub fn dense_dimension(s: &FGordonSystem, seed: u64, points: usize) -> usize {
    let d = data(s);
    let m = d.m;
    let has_funcs = s.f().iter().any(|e| e.has_functions());
    let mut sampler = Sampler::new(seed);
    let pts: Vec<Vec<BTreeMap<Coordinate, BigRational>>> = (0..points)
        .map(|_| {
            let mut base = sampler.point(&Coordinate::base(m));
            if has_funcs {
                // keep opaque functions exact
                for i in 0..m {
                    base.insert(Coordinate::U(i), BigRational::zero());
                }
            }
            (0..3)
                .map(|_| {
                    let mut p = base.clone();
                    for i in 0..m {
                        p.insert(Coordinate::Ux(i), sampler.rational());
                        p.insert(Coordinate::Uy(i), sampler.rational());
                    }
                    p
                })
                .collect()
        })
        .collect();
    let mut stages = vec![stage0(s)];
    let mut rank = point_rank(&stages, &pts);
    for _ in 0..=d.n {
        if rank == d.n {
            break;
        }
        let next = derive(stages.last().unwrap(), &d);
        stages.push(next);
        let r = point_rank(&stages, &pts);
        if r == rank {
            break;
        }
        rank = r;
    }
    d.n - rank
}
