//! Two-component classification: how many independent Lagrangians a
//! system `u_xy = F, v_xy = G` can have, decided from H, K and S.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::jetgeom::{gradient_coords, invariants, FGordonSystem, InvariantError, InvariantTriple, Matrix};
use crate::linalg::{nullspace, param_equations, rank, rref, QMatrix};
use crate::multspace::{analyze, MultiplierOptions};
use crate::symexpr::{is_zero, Coordinate, Evaluator, Expr, Sampler, DEFAULT_SEED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("classification needs exactly two dependent variables, got {0}")]
    Dimension(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("change of variables is not invertible")]
    Singular,
    #[error("transformed system is invalid: {0}")]
    Transformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subtype {
    /// `W_uu + W_vv = 0`
    Harmonic,
    /// `W_uu = W_vv`
    Wave,
    /// `W_vv = 0`
    DegenerateWvv,
}

impl Subtype {
    pub fn label(&self) -> &'static str {
        match self {
            Subtype::Harmonic => "harmonic",
            Subtype::Wave => "wave",
            Subtype::DegenerateWvv => "degenerate-W_vv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    ThreeLagrangians,
    TwoLagrangians(Option<Subtype>),
    AtMostOne,
    STraceObstructed,
    NotNormalForm,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::ThreeLagrangians => "THREE_LAGRANGIANS",
            Label::TwoLagrangians(_) => "TWO_LAGRANGIANS",
            Label::AtMostOne => "AT_MOST_ONE",
            Label::STraceObstructed => "S_TRACE_OBSTRUCTED",
            Label::NotNormalForm => "NOT_NORMAL_FORM",
        }
    }

    pub fn subtype(&self) -> Option<Subtype> {
        match self {
            Label::TwoLagrangians(s) => *s,
            _ => None,
        }
    }

    /// Upper bound on independent Lagrangians implied by the label.
    pub fn count(&self) -> usize {
        match self {
            Label::ThreeLagrangians => 3,
            Label::TwoLagrangians(_) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.subtype() {
            Some(s) => write!(f, "{}({})", self.name(), s.label()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub label: Label,
    /// Generic rank of the 4x3 matrix A (only when S = 0).
    pub rank_a: Option<usize>,
    /// `H - K`, indexed like H.
    pub h_minus_k: Option<Matrix>,
    /// Trace `S^a_{a g}` for each g.
    pub s_trace: Option<Vec<Expr>>,
    pub lambda: Option<Expr>,
    /// Whether each equation is free of gradients (`u_xy = g(x, y, u)`).
    pub g_form: bool,
    /// Constant solutions of the reduced condition (g-form only).
    pub reduced_dimension: Option<usize>,
    pub reduced_basis: Vec<QMatrix>,
    /// Normalized `(a, b, c)` of `a M11 + b M12 + c M22 = 0` when that
    /// condition has rank one.
    pub pencil: Option<[BigRational; 3]>,
    /// Dimension from the general multiplier pipeline.
    pub multiplier_dimension: Option<usize>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn bare(label: Label) -> Self {
        Verdict {
            label,
            rank_a: None,
            h_minus_k: None,
            s_trace: None,
            lambda: None,
            g_form: false,
            reduced_dimension: None,
            reduced_basis: Vec::new(),
            pencil: None,
            multiplier_dimension: None,
            notes: Vec::new(),
        }
    }
}

fn require_two(m: usize) -> Result<(), ClassifyError> {
    if m == 2 {
        Ok(())
    } else {
        Err(ClassifyError::Dimension(m))
    }
}

/// Rows of the algebraic condition `M_as H^s_b = M_bs K^s_a` over
/// `(M11, M12, M22)`.
pub fn build_a(inv: &InvariantTriple) -> Result<Matrix, ClassifyError> {
    require_two(inv.h.len())?;
    let (h, k) = (&inv.h, &inv.k);
    Ok(vec![
        vec![&h[0][0] - &k[0][0], &h[1][0] - &k[1][0], Expr::zero()],
        vec![Expr::zero(), &h[0][1] - &k[0][1], &h[1][1] - &k[1][1]],
        vec![h[0][1].clone(), &h[1][1] - &k[0][0], -&k[1][0]],
        vec![k[0][1].clone(), &k[1][1] - &h[0][0], -&h[1][0]],
    ])
}

/// `S^a_{a g}` for each `g`.
pub fn s_trace(inv: &InvariantTriple) -> Vec<Expr> {
    let m = inv.s.len();
    (0..m)
        .map(|g| (0..m).map(|a| inv.s[a][a][g].clone()).sum())
        .collect()
}

/// True when the trace `S^a_{a g}` vanishes for every `g`; for two
/// components that forces `S = 0`.
pub fn trace_obstruction(inv: &InvariantTriple) -> Result<bool, ClassifyError> {
    require_two(inv.s.len())?;
    Ok(s_trace(inv).iter().all(|e| is_zero(e).is_zero()))
}

/// Maximum rank of an expression matrix over random points in x, y, u and
/// the gradients.
pub fn sampled_rank(mat: &Matrix, m: usize, seed: u64, points: usize) -> usize {
    let mut coords = Coordinate::base(m);
    coords.extend(gradient_coords(m));
    let mut sampler = Sampler::new(seed);
    let mut best = 0;
    let mut tries = 0;
    let mut done = 0;
    while done < points && tries < points * 8 {
        tries += 1;
        let p = sampler.point(&coords);
        let mut ev = Evaluator::new(&p);
        let vals: Option<QMatrix> = mat
            .iter()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        ev.eval(e)
                            .ok()
                            .map(|v| if v.is_zero() { BigRational::zero() } else { v.value })
                    })
                    .collect()
            })
            .collect();
        if let Some(v) = vals {
            best = best.max(rank(&v));
            done += 1;
        }
    }
    best
}

fn is_g_form(sys: &FGordonSystem) -> bool {
    sys.f().iter().all(|f| !f.depends_on_any(|c| c.is_gradient()))
}

struct Reduced {
    dimension: usize,
    basis: Vec<QMatrix>,
    pencil: Option<[BigRational; 3]>,
}

/// Constant solutions of `F_v M11 + (G_v - F_u) M12 - G_u M22 = 0`.
fn reduced_condition(sys: &FGordonSystem) -> Option<Reduced> {
    let (f, g) = (&sys.f()[0], &sys.f()[1]);
    let (u, v) = (Coordinate::U(0), Coordinate::U(1));
    let cond = f.partial(&v) * Expr::param(0)
        + (g.partial(&v) - f.partial(&u)) * Expr::param(1)
        - g.partial(&u) * Expr::param(2);
    let eqs = param_equations(&cond)?;
    let rows: QMatrix = eqs
        .iter()
        .map(|e| (0..3).map(|i| e.coeffs.get(&i).cloned().unwrap_or_default()).collect())
        .collect();
    let basis = nullspace(&rows, 3)
        .into_iter()
        .map(|w| {
            vec![
                vec![w[0].clone(), w[1].clone()],
                vec![w[1].clone(), w[2].clone()],
            ]
        })
        .collect::<Vec<_>>();
    let pencil = if basis.len() == 2 {
        let (r, _) = rref(&rows);
        let row = &r[0];
        Some([row[0].clone(), row[1].clone(), row[2].clone()])
    } else {
        None
    };
    Some(Reduced {
        dimension: basis.len(),
        basis,
        pencil,
    })
}

/// Sign of `b^2 - 4ac` picks the normal form: negative is harmonic,
/// positive is wave, zero is `W_vv = 0`.
pub fn pencil_subtype(p: &[BigRational; 3]) -> Subtype {
    let disc = &p[1] * &p[1] - BigRational::from_integer(BigInt::from(4)) * &p[0] * &p[2];
    if disc.is_negative() {
        Subtype::Harmonic
    } else if disc.is_positive() {
        Subtype::Wave
    } else {
        Subtype::DegenerateWvv
    }
}

pub fn classify(sys: &FGordonSystem) -> Result<Verdict, ClassifyError> {
    classify_with(sys, DEFAULT_SEED)
}

pub fn classify_with(sys: &FGordonSystem, seed: u64) -> Result<Verdict, ClassifyError> {
    require_two(sys.m())?;
    if let Err(r) = sys.normal_form() {
        let mut v = Verdict::bare(Label::NotNormalForm);
        v.notes.push(r.to_string());
        return Ok(v);
    }
    let inv = invariants(sys)?;
    let opts = MultiplierOptions {
        seed,
        reconstruct: false,
        ..MultiplierOptions::default()
    };
    let mut v = Verdict::bare(Label::AtMostOne);
    v.g_form = is_g_form(sys);
    match analyze(sys, &opts) {
        Ok(r) => v.multiplier_dimension = Some(r.dimension),
        Err(e) => v.notes.push(format!("multiplier analysis failed: {e}")),
    }
    let hk: Matrix = (0..2)
        .map(|g| (0..2).map(|a| &inv.h[g][a] - &inv.k[g][a]).collect())
        .collect();
    let h_eq_k = hk.iter().flatten().all(|e| is_zero(e).is_zero());
    v.h_minus_k = Some(hk);
    v.s_trace = Some(s_trace(&inv));

    if !trace_obstruction(&inv)? {
        v.label = Label::STraceObstructed;
        v.notes
            .push("S != 0: no nondegenerate multiplier exists".to_string());
        return Ok(v);
    }
    v.rank_a = Some(sampled_rank(&build_a(&inv)?, 2, seed, 4));
    if !h_eq_k {
        return Ok(v);
    }

    let lambda = inv.h[0][0].clone();
    let scalar = is_zero(&inv.h[0][1]).is_zero()
        && is_zero(&inv.h[1][0]).is_zero()
        && is_zero(&(&inv.h[1][1] - &lambda)).is_zero();
    if scalar {
        if lambda.depends_on_any(|c| !matches!(c, Coordinate::X | Coordinate::Y)) {
            v.notes
                .push("H = K = lambda I with lambda depending on u or gradients".to_string());
        } else {
            v.label = Label::ThreeLagrangians;
            v.lambda = Some(lambda);
            return Ok(v);
        }
    }

    if v.g_form {
        match reduced_condition(sys) {
            Some(red) => {
                v.reduced_dimension = Some(red.dimension);
                v.reduced_basis = red.basis;
                v.pencil = red.pencil.clone();
                if red.dimension >= 2 {
                    v.label = Label::TwoLagrangians(red.pencil.as_ref().map(pencil_subtype));
                }
            }
            None => v
                .notes
                .push("reduced condition is not linear over constants".to_string()),
        }
    } else {
        v.notes
            .push("reducible to u_xy = g(x, y, u); reduction not constructed".to_string());
        if v.multiplier_dimension.is_some_and(|d| d >= 2) {
            v.label = Label::TwoLagrangians(None);
        }
    }
    Ok(v)
}

/// `x -> a1 x + a0`, `y -> b1 y + b0`, `u -> T u` with T constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    pub a: (BigRational, BigRational),
    pub b: (BigRational, BigRational),
    pub t: QMatrix,
}

impl AffineMap {
    pub fn identity(m: usize) -> Self {
        let one = BigRational::from_integer(1.into());
        AffineMap {
            a: (one.clone(), BigRational::zero()),
            b: (one.clone(), BigRational::zero()),
            t: (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| if i == j { one.clone() } else { BigRational::zero() })
                        .collect()
                })
                .collect(),
        }
    }
}

fn q_inverse(t: &QMatrix) -> Option<QMatrix> {
    let n = t.len();
    let aug: QMatrix = t
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn rat(v: &BigRational) -> Expr {
    Expr::rational(v.clone())
}

/// The system in the new variables together with the substitution taking
/// old-coordinate expressions to new ones.
pub fn transform_system(
    sys: &FGordonSystem,
    map: &AffineMap,
) -> Result<(FGordonSystem, BTreeMap<Coordinate, Expr>), ClassifyError> {
    let m = sys.m();
    if map.t.len() != m || map.t.iter().any(|r| r.len() != m) {
        return Err(ClassifyError::Singular);
    }
    if map.a.0.is_zero() || map.b.0.is_zero() {
        return Err(ClassifyError::Singular);
    }
    let tinv = q_inverse(&map.t).ok_or(ClassifyError::Singular)?;
    let (a1, a0) = (rat(&map.a.0), rat(&map.a.1));
    let (b1, b0) = (rat(&map.b.0), rat(&map.b.1));
    let mut sub = BTreeMap::new();
    sub.insert(Coordinate::X, (Expr::x() - &a0) / a1.clone());
    sub.insert(Coordinate::Y, (Expr::y() - &b0) / b1.clone());
    let lin = |i: usize, c: fn(usize) -> Coordinate| -> Expr {
        (0..m)
            .map(|j| rat(&tinv[i][j]) * Expr::coord(c(j)))
            .sum()
    };
    for i in 0..m {
        sub.insert(Coordinate::U(i), lin(i, Coordinate::U));
        sub.insert(Coordinate::Ux(i), &a1 * &lin(i, Coordinate::Ux));
        sub.insert(Coordinate::Uy(i), &b1 * &lin(i, Coordinate::Uy));
    }
    let scale = Expr::one() / (&a1 * &b1);
    let old: Vec<Expr> = sys.f().iter().map(|f| f.substitute_all(&sub)).collect();
    let f: Vec<Expr> = (0..m)
        .map(|a| {
            let s: Expr = (0..m).map(|b| rat(&map.t[a][b]) * old[b].clone()).sum();
            &scale * &s
        })
        .collect();
    let new = FGordonSystem::new(sys.names().clone(), f)
        .map_err(|e| ClassifyError::Transformed(e.to_string()))?;
    Ok((new, sub))
}

/// Recompute H, K, S after the change of variables and compare with
/// `(1/(A'B')) T H T^-1`, the same for K, and `T S (T^-1, T^-1)`.
pub fn covariance_check(sys: &FGordonSystem, map: &AffineMap) -> Result<bool, ClassifyError> {
    let m = sys.m();
    let (new, sub) = transform_system(sys, map)?;
    let inv = invariants(sys)?;
    let bar = invariants(&new)?;
    let tinv = q_inverse(&map.t).ok_or(ClassifyError::Singular)?;
    let scale = Expr::one() / (rat(&map.a.0) * rat(&map.b.0));
    let conj = |h: &Matrix| -> Matrix {
        let h: Matrix = h
            .iter()
            .map(|r| r.iter().map(|e| e.substitute_all(&sub)).collect())
            .collect();
        (0..m)
            .map(|g| {
                (0..m)
                    .map(|a| {
                        let mut s = Expr::zero();
                        for sg in 0..m {
                            for t in 0..m {
                                if map.t[g][sg].is_zero() || tinv[t][a].is_zero() {
                                    continue;
                                }
                                s += &(rat(&(&map.t[g][sg] * &tinv[t][a])) * h[sg][t].clone());
                            }
                        }
                        &scale * &s
                    })
                    .collect()
            })
            .collect()
    };
    let same = |x: &Expr, y: &Expr| is_zero(&(x - y)).is_zero();
    let (h_want, k_want) = (conj(&inv.h), conj(&inv.k));
    for g in 0..m {
        for a in 0..m {
            if !same(&bar.h[g][a], &h_want[g][a]) || !same(&bar.k[g][a], &k_want[g][a]) {
                return Ok(false);
            }
        }
    }
    let s_old: Vec<Vec<Vec<Expr>>> = inv
        .s
        .iter()
        .map(|p| p.iter().map(|r| r.iter().map(|e| e.substitute_all(&sub)).collect()).collect())
        .collect();
    for g in 0..m {
        for a in 0..m {
            for b in 0..m {
                let mut want = Expr::zero();
                for sg in 0..m {
                    for t in 0..m {
                        for r in 0..m {
                            let c = &map.t[g][sg] * &tinv[t][a] * &tinv[r][b];
                            if !c.is_zero() {
                                want += &(rat(&c) * s_old[sg][t][r].clone());
                            }
                        }
                    }
                }
                if !same(&bar.s[g][a][b], &want) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::VarNames;

    fn sys(f: &[&str]) -> FGordonSystem {
        FGordonSystem::parse(VarNames::new(&["u", "v"]).unwrap(), f).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn coupled_v_u_matrix() {
        let inv = invariants(&sys(&["v", "u"])).unwrap();
        assert_eq!(sampled_rank(&build_a(&inv).unwrap(), 2, 1, 3), 1);
        assert!(trace_obstruction(&inv).unwrap());
    }

    #[test]
    fn scalar_case() {
        let v = classify(&sys(&["(x + y)*u", "(x + y)*v"])).unwrap();
        assert_eq!(v.label, Label::ThreeLagrangians);
        assert_eq!(v.rank_a, Some(0));
        assert_eq!(v.lambda, Some(Expr::x() + Expr::y()));
        assert_eq!(v.multiplier_dimension, Some(3));
    }

    #[test]
    fn subtypes() {
        let cases = [
            (["-(x + y)*v", "(x + y)*u"], Subtype::Harmonic),
            (["3*(u + v)^2", "3*(u + v)^2"], Subtype::Wave),
            (["3*u^2", "6*u*v + 2*u"], Subtype::DegenerateWvv),
        ];
        for (f, want) in cases {
            let v = classify(&sys(&f)).unwrap();
            assert_eq!(v.label, Label::TwoLagrangians(Some(want)), "{f:?}");
            assert_eq!(v.multiplier_dimension, Some(2));
        }
    }

    #[test]
    fn obstructed_and_single() {
        let v = classify(&sys(&["-u_x*v_y", "0"])).unwrap();
        assert_eq!(v.label, Label::STraceObstructed);
        let v = classify(&sys(&["v", "x*u"])).unwrap();
        assert_eq!(v.label, Label::AtMostOne);
        assert_eq!(v.reduced_dimension, Some(1));
        let v = classify(&sys(&["u_x^2", "v"])).unwrap();
        assert_eq!(v.label, Label::NotNormalForm);
        assert!(classify(&FGordonSystem::parse(VarNames::indexed(1), &["u1"]).unwrap()).is_err());
    }

    #[test]
    fn covariance_examples() {
        let e1 = sys(&["v", "u"]);
        assert!(covariance_check(&e1, &AffineMap::identity(2)).unwrap());
        let swap = AffineMap {
            t: vec![vec![q(0), q(1)], vec![q(1), q(0)]],
            ..AffineMap::identity(2)
        };
        assert!(covariance_check(&e1, &swap).unwrap());
        let dilate = AffineMap {
            a: (q(2), q(0)),
            ..AffineMap::identity(2)
        };
        assert!(covariance_check(&sys(&["v", "x*u"]), &dilate).unwrap());
        let skew = AffineMap {
            a: (q(3), q(-1)),
            b: (q(-2), q(5)),
            t: vec![vec![q(1), q(2)], vec![q(1), q(3)]],
        };
        assert!(covariance_check(&sys(&["exp(2*u)*v_x*v_y", "-(u_x*v_y + v_x*u_y)"]), &skew).unwrap());
        let singular = AffineMap {
            t: vec![vec![q(1), q(2)], vec![q(2), q(4)]],
            ..AffineMap::identity(2)
        };
        assert_eq!(covariance_check(&e1, &singular), Err(ClassifyError::Singular));
    }
}
