//! f-Gordon systems `u^a_xy = f^a(x, y, u, u_x, u_y)`, their normal form,
//! the invariants H, K, S and the connection form.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::det_expr;
use crate::symexpr::{
    is_zero, parse, total_derivative, Coordinate, DerivativeError, Direction, Expr, ParseError,
    VarNames,
};

pub type Matrix = Vec<Vec<Expr>>;
pub type Tensor3 = Vec<Vec<Vec<Expr>>>;
pub type Tensor4 = Vec<Vec<Vec<Vec<Expr>>>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("expected {expected} right-hand sides, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("right-hand side {alpha} contains the second-order coordinate {coord}")]
    SecondOrder { alpha: usize, coord: String },
    #[error("right-hand side {alpha} refers to dependent variable {index} but m = {m}")]
    IndexOutOfRange { alpha: usize, index: usize, m: usize },
    #[error("right-hand side {alpha} contains an undetermined parameter")]
    Parameter { alpha: usize },
    #[error("failed to parse right-hand side {alpha}: {source}")]
    Parse { alpha: usize, source: ParseError },
    #[error("{0}")]
    NotNormalForm(NormalFormRefusal),
    #[error("supplied normal form does not reproduce f^{alpha}")]
    NormalFormMismatch { alpha: usize },
    #[error("normal-form coefficient {0} depends on a gradient or higher jet")]
    NormalFormJet(String),
}

/// Why a system admits no first-order variational multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalFormRefusal {
    /// 1-based equation index.
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub direction: Direction,
}

impl fmt::Display for NormalFormRefusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.direction {
            Direction::X => "x",
            Direction::Y => "y",
        };
        write!(
            f,
            "no first-order variational multiplier exists: d^2 f^{} / du^{}_{d} du^{}_{d} is not zero",
            self.alpha, self.beta, self.gamma
        )
    }
}

/// Coefficients of `u^a_xy + C^a_bc u^b_x u^c_y + A^a_c u^c_x + B^a_c u^c_y + E^a = 0`.
/// Indexing: `c[a][b][c]`, `a[a][c]`, `b[a][c]`, `e[a]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub c: Tensor3,
    pub a: Matrix,
    pub b: Matrix,
    pub e: Vec<Expr>,
}

impl NormalForm {
    /// The right-hand sides f encoded by these coefficients.
    pub fn reassemble(&self) -> Vec<Expr> {
        let m = self.e.len();
        (0..m)
            .map(|al| {
                let mut s = self.e[al].clone();
                for g in 0..m {
                    s += &(&self.a[al][g] * &Expr::ux(g));
                    s += &(&self.b[al][g] * &Expr::uy(g));
                    for b in 0..m {
                        s += &(&self.c[al][b][g] * &(Expr::ux(b) * Expr::uy(g)));
                    }
                }
                -s
            })
            .collect()
    }

    fn check_base_only(&self) -> Result<(), SystemError> {
        let jet = |e: &Expr| e.depends_on_any(|c| c.order() > 0 || c.is_param());
        let m = self.e.len();
        for al in 0..m {
            if jet(&self.e[al]) {
                return Err(SystemError::NormalFormJet(format!("E^{}", al + 1)));
            }
            for g in 0..m {
                if jet(&self.a[al][g]) {
                    return Err(SystemError::NormalFormJet(format!("A^{}_{}", al + 1, g + 1)));
                }
                if jet(&self.b[al][g]) {
                    return Err(SystemError::NormalFormJet(format!("B^{}_{}", al + 1, g + 1)));
                }
                for b in 0..m {
                    if jet(&self.c[al][b][g]) {
                        return Err(SystemError::NormalFormJet(format!(
                            "C^{}_{}{}",
                            al + 1,
                            b + 1,
                            g + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A hyperbolic system `u^a_xy = f^a`.
#[derive(Debug, Clone)]
pub struct FGordonSystem {
    names: VarNames,
    f: Vec<Expr>,
    normal_form: Result<NormalForm, NormalFormRefusal>,
}

impl FGordonSystem {
    pub fn new(names: VarNames, f: Vec<Expr>) -> Result<Self, SystemError> {
        let m = names.m();
        if f.len() != m {
            return Err(SystemError::Arity {
                expected: m,
                got: f.len(),
            });
        }
        for (al, e) in f.iter().enumerate() {
            for c in e.coordinates() {
                if c.is_second_order() {
                    return Err(SystemError::SecondOrder {
                        alpha: al + 1,
                        coord: names.name(c),
                    });
                }
                if c.is_param() {
                    return Err(SystemError::Parameter { alpha: al + 1 });
                }
                if let Some(i) = c.index() {
                    if i >= m {
                        return Err(SystemError::IndexOutOfRange {
                            alpha: al + 1,
                            index: i + 1,
                            m,
                        });
                    }
                }
            }
        }
        let normal_form = check_normal_form(&f);
        Ok(FGordonSystem {
            names,
            f,
            normal_form,
        })
    }

    /// Parse right-hand sides written with the given names.
    pub fn parse<S: AsRef<str>>(names: VarNames, f: &[S]) -> Result<Self, SystemError> {
        let exprs = f
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse(s.as_ref(), &names).map_err(|source| SystemError::Parse {
                    alpha: i + 1,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        FGordonSystem::new(names, exprs)
    }

    /// Replace the extracted normal form by a supplied one, which must
    /// reproduce f exactly.
    pub fn with_normal_form(mut self, nf: NormalForm) -> Result<Self, SystemError> {
        let m = self.m();
        let shape_ok = nf.e.len() == m
            && nf.a.len() == m
            && nf.b.len() == m
            && nf.c.len() == m
            && nf.a.iter().chain(&nf.b).all(|r| r.len() == m)
            && nf.c.iter().all(|r| r.len() == m && r.iter().all(|s| s.len() == m));
        if !shape_ok {
            return Err(SystemError::Arity {
                expected: m,
                got: nf.e.len(),
            });
        }
        nf.check_base_only()?;
        for (al, (g, f)) in nf.reassemble().iter().zip(&self.f).enumerate() {
            if !is_zero(&(g - f)).is_zero() {
                return Err(SystemError::NormalFormMismatch { alpha: al + 1 });
            }
        }
        self.normal_form = Ok(nf);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.names.m()
    }

    pub fn names(&self) -> &VarNames {
        &self.names
    }

    pub fn f(&self) -> &[Expr] {
        &self.f
    }

    pub fn normal_form(&self) -> Result<&NormalForm, &NormalFormRefusal> {
        self.normal_form.as_ref()
    }

    pub fn is_normal_form(&self) -> bool {
        self.normal_form.is_ok()
    }

    /// Total derivative on this system's equation manifold.
    pub fn total_derivative(&self, e: &Expr, dir: Direction) -> Result<Expr, DerivativeError> {
        total_derivative(e, dir, &self.f)
    }

    pub fn display(&self, e: &Expr) -> String {
        e.display_with(&self.names)
    }
}

/// Normal-form extraction. The two second-derivative conditions force f
/// to be bilinear in (u_x, u_y); coefficients are read off at zero
/// gradients.
pub fn check_normal_form(f: &[Expr]) -> Result<NormalForm, NormalFormRefusal> {
    let m = f.len();
    for (al, fa) in f.iter().enumerate() {
        for b in 0..m {
            for g in b..m {
                for (dir, cb, cg) in [
                    (Direction::X, Coordinate::Ux(b), Coordinate::Ux(g)),
                    (Direction::Y, Coordinate::Uy(b), Coordinate::Uy(g)),
                ] {
                    let d2 = fa.partial(&cb).partial(&cg);
                    if !is_zero(&d2).is_zero() {
                        return Err(NormalFormRefusal {
                            alpha: al + 1,
                            beta: b + 1,
                            gamma: g + 1,
                            direction: dir,
                        });
                    }
                }
            }
        }
    }
    let zero_grad: BTreeMap<Coordinate, Expr> = (0..m)
        .flat_map(|i| [Coordinate::Ux(i), Coordinate::Uy(i)])
        .map(|c| (c, Expr::zero()))
        .collect();
    let at0 = |e: &Expr| e.substitute_all(&zero_grad);
    let mut nf = NormalForm {
        c: vec![vec![vec![Expr::zero(); m]; m]; m],
        a: vec![vec![Expr::zero(); m]; m],
        b: vec![vec![Expr::zero(); m]; m],
        e: vec![Expr::zero(); m],
    };
    for (al, fa) in f.iter().enumerate() {
        nf.e[al] = -at0(fa);
        for g in 0..m {
            nf.a[al][g] = -at0(&fa.partial(&Coordinate::Ux(g)));
            nf.b[al][g] = -at0(&fa.partial(&Coordinate::Uy(g)));
        }
        for b in 0..m {
            let fx = fa.partial(&Coordinate::Ux(b));
            for g in 0..m {
                nf.c[al][b][g] = -fx.partial(&Coordinate::Uy(g));
            }
        }
    }
    debug_assert!(nf
        .reassemble()
        .iter()
        .zip(f)
        .all(|(g, f)| is_zero(&(g - f)).is_zero()));
    Ok(nf)
}

/// H, K (indexed `[gamma][alpha]`) and S (indexed `[gamma][alpha][beta]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantTriple {
    pub h: Matrix,
    pub k: Matrix,
    pub s: Tensor3,
}

impl InvariantTriple {
    pub fn s_is_zero(&self) -> bool {
        self.s.iter().flatten().flatten().all(|e| is_zero(e).is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("invariant {0} retains second-order jets for a normal-form system")]
    SecondOrderResidue(String),
    #[error(transparent)]
    Derivative(#[from] DerivativeError),
}

/// The invariants from the general formula. For normal-form systems the
/// u_xx / u_yy contributions must cancel; a residue is an internal error.
pub fn invariants(sys: &FGordonSystem) -> Result<InvariantTriple, InvariantError> {
    let m = sys.m();
    let f = sys.f();
    let mut h = vec![vec![Expr::zero(); m]; m];
    let mut k = vec![vec![Expr::zero(); m]; m];
    let mut s = vec![vec![vec![Expr::zero(); m]; m]; m];
    for g in 0..m {
        for al in 0..m {
            let fu = f[g].partial(&Coordinate::U(al));
            let fx = f[g].partial(&Coordinate::Ux(al));
            let fy = f[g].partial(&Coordinate::Uy(al));
            let mut hh = fu.clone();
            let mut kk = fu;
            for si in 0..m {
                hh += &(f[g].partial(&Coordinate::Uy(si)) * f[si].partial(&Coordinate::Ux(al)));
                kk += &(f[g].partial(&Coordinate::Ux(si)) * f[si].partial(&Coordinate::Uy(al)));
            }
            hh -= &total_derivative(&fx, Direction::X, f)?;
            kk -= &total_derivative(&fy, Direction::Y, f)?;
            h[g][al] = hh;
            k[g][al] = kk;
            for b in 0..m {
                let a1 = f[g]
                    .partial(&Coordinate::Ux(b))
                    .partial(&Coordinate::Uy(al));
                let a2 = f[g]
                    .partial(&Coordinate::Ux(al))
                    .partial(&Coordinate::Uy(b));
                s[g][al][b] = a1 - a2;
            }
        }
    }
    if sys.is_normal_form() {
        for g in 0..m {
            for al in 0..m {
                for (name, e) in [("H", &h[g][al]), ("K", &k[g][al])] {
                    if e.depends_on_any(|c| c.is_second_order()) {
                        return Err(InvariantError::SecondOrderResidue(format!(
                            "{name}^{}_{}",
                            g + 1,
                            al + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(InvariantTriple { h, k, s })
}

/// Exponent vector over the gradient coordinates in the order
/// `u1_x, u1_y, u2_x, u2_y, ...`, ordered by total degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradientMonomial(pub Vec<u32>);

impl GradientMonomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn to_expr(&self) -> Expr {
        let coords = gradient_coords(self.0.len() / 2);
        let mut out = Expr::one();
        for (c, &e) in coords.iter().zip(&self.0) {
            if e > 0 {
                out = out * Expr::coord(*c).pow(e as i32);
            }
        }
        out
    }
}

impl Ord for GradientMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for GradientMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

pub fn gradient_coords(m: usize) -> Vec<Coordinate> {
    (0..m)
        .flat_map(|i| [Coordinate::Ux(i), Coordinate::Uy(i)])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expression is not polynomial in the gradient coordinates")]
pub struct NotPolynomialInGradients;

/// Coefficients of `e` as a polynomial in the gradients of `m` dependent
/// variables. Coefficients are free of gradients.
pub fn gradient_coefficients(
    e: &Expr,
    m: usize,
) -> Result<BTreeMap<GradientMonomial, Expr>, NotPolynomialInGradients> {
    let vars = gradient_coords(m);
    let raw = e.poly_coefficients(&vars).ok_or(NotPolynomialInGradients)?;
    Ok(raw
        .into_iter()
        .map(|(k, v)| (GradientMonomial(k), v))
        .collect())
}

/// `Omega^s_a = C^s_{a t} du^t + A^s_a dy + B^s_a dx`, stored per
/// direction with entries indexed `[sigma][alpha]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionForm {
    pub dx: Matrix,
    pub dy: Matrix,
    /// `du[t][s][a] = C^s_{a t}`
    pub du: Tensor3,
}

impl ConnectionForm {
    pub fn m(&self) -> usize {
        self.dx.len()
    }

    /// Component along a base coordinate (x, y or u^t).
    pub fn component(&self, c: &Coordinate) -> &Matrix {
        match c {
            Coordinate::X => &self.dx,
            Coordinate::Y => &self.dy,
            Coordinate::U(t) => &self.du[*t],
            _ => panic!("connection form has no component along {c}"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dx
            .iter()
            .chain(&self.dy)
            .chain(self.du.iter().flatten())
            .flatten()
            .all(|e| e.is_zero())
    }

    pub fn has_functions(&self) -> bool {
        self.dx
            .iter()
            .chain(&self.dy)
            .chain(self.du.iter().flatten())
            .flatten()
            .any(|e| e.has_functions())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct NoConnection(pub NormalFormRefusal);

pub fn connection_form(sys: &FGordonSystem) -> Result<ConnectionForm, NoConnection> {
    let nf = sys.normal_form().map_err(|r| NoConnection(r.clone()))?;
    let m = sys.m();
    let mut du = vec![vec![vec![Expr::zero(); m]; m]; m];
    for t in 0..m {
        for s in 0..m {
            for a in 0..m {
                du[t][s][a] = nf.c[s][a][t].clone();
            }
        }
    }
    Ok(ConnectionForm {
        dx: nf.b.clone(),
        dy: nf.a.clone(),
        du,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvatureError {
    #[error("connection is not symmetric in its lower indices at ({a}, {b}, {c})")]
    Asymmetric { a: usize, b: usize, c: usize },
    #[error("connection coefficients must depend on u only")]
    NotFiberwise,
    #[error("connection has the wrong shape")]
    Shape,
}

/// Curvature of a torsion-free connection `gamma[a][b][c] = Gamma^a_bc(u)`:
///
/// `R^a_{e g b} = d_b Gamma^a_{g e} - d_g Gamma^a_{b e}
///              + Gamma^a_{b l} Gamma^l_{g e} - Gamma^a_{g l} Gamma^l_{b e}`
///
/// with `d_b = d/du^b`. In this convention the system
/// `u_xy + Gamma(u_x, u_y) = 0` has `H^g_a = R^g_{e a s} u^s_x u^e_y`.
pub fn curvature(gamma: &Tensor3) -> Result<Tensor4, CurvatureError> {
    let m = gamma.len();
    if gamma
        .iter()
        .any(|r| r.len() != m || r.iter().any(|s| s.len() != m))
    {
        return Err(CurvatureError::Shape);
    }
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let g = &gamma[a][b][c];
                if g.depends_on_any(|k| !matches!(k, Coordinate::U(_))) {
                    return Err(CurvatureError::NotFiberwise);
                }
                if b < c && !is_zero(&(g - &gamma[a][c][b])).is_zero() {
                    return Err(CurvatureError::Asymmetric {
                        a: a + 1,
                        b: b + 1,
                        c: c + 1,
                    });
                }
            }
        }
    }
    let mut r = vec![vec![vec![vec![Expr::zero(); m]; m]; m]; m];
    for a in 0..m {
        for e in 0..m {
            for g in 0..m {
                for b in 0..m {
                    let mut v = gamma[a][g][e].partial(&Coordinate::U(b))
                        - gamma[a][b][e].partial(&Coordinate::U(g));
                    for l in 0..m {
                        v += &(&gamma[a][b][l] * &gamma[l][g][e]);
                        v -= &(&gamma[a][g][l] * &gamma[l][b][e]);
                    }
                    r[a][e][g][b] = v;
                }
            }
        }
    }
    Ok(r)
}

/// Christoffel symbols of a metric `g(u)`:
/// `Gamma^a_bc = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)`.
pub fn christoffel(g: &Matrix) -> Option<Tensor3> {
    let m = g.len();
    let ginv = inverse(g)?;
    let mut out = vec![vec![vec![Expr::zero(); m]; m]; m];
    let half = Expr::frac(1, 2);
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let mut v = Expr::zero();
                for d in 0..m {
                    if ginv[a][d].is_zero() {
                        continue;
                    }
                    let t = g[d][c].partial(&Coordinate::U(b)) + g[d][b].partial(&Coordinate::U(c))
                        - g[b][c].partial(&Coordinate::U(d));
                    v += &(&ginv[a][d] * &t);
                }
                out[a][b][c] = &half * &v;
            }
        }
    }
    Some(out)
}

/// Inverse by adjugate; `None` if the determinant vanishes identically.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let det = det_expr(a);
    if is_zero(&det).is_zero() {
        return None;
    }
    let mut out = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Matrix = a
                .iter()
                .enumerate()
                .filter(|(r, _)| *r != j)
                .map(|(_, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(c, _)| *c != i)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let cof = det_expr(&minor) / &det;
            out[i][j] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    Some(out)
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let p = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Expr::zero(); p]; n];
    for i in 0..n {
        for j in 0..p {
            let mut s = Expr::zero();
            for k in 0..b.len() {
                if !a[i][k].is_zero() && !b[k][j].is_zero() {
                    s += &(&a[i][k] * &b[k][j]);
                }
            }
            out[i][j] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(f: &[&str]) -> FGordonSystem {
        FGordonSystem::parse(VarNames::new(&["u", "v"]).unwrap(), f).unwrap()
    }

    fn p(s: &str) -> Expr {
        parse(s, &VarNames::new(&["u", "v"]).unwrap()).unwrap()
    }

    #[test]
    fn linear_system_normal_form() {
        let s = sys(&["v", "u"]);
        let nf = s.normal_form().unwrap();
        assert_eq!(nf.e, vec![p("-v"), p("-u")]);
        assert!(nf.c.iter().flatten().flatten().all(|e| e.is_zero()));
        assert!(nf.a.iter().chain(&nf.b).flatten().all(|e| e.is_zero()));
    }

    #[test]
    fn refusal() {
        let s = FGordonSystem::parse(VarNames::indexed(1), &["u1_x^2"]).unwrap();
        let r = s.normal_form().unwrap_err();
        assert_eq!((r.alpha, r.beta, r.gamma, r.direction), (1, 1, 1, Direction::X));
    }

    #[test]
    fn quadratic_connection() {
        let s = sys(&["-exp(u)*u_x*v_y", "-u_x*u_y"]);
        let nf = s.normal_form().unwrap();
        assert_eq!(nf.c[0][0][1], p("exp(u)"));
        assert_eq!(nf.c[1][0][0], Expr::one());
        assert!(nf.e.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn linear_invariants() {
        let inv = invariants(&sys(&["v", "u"])).unwrap();
        let want = vec![vec![p("0"), p("1")], vec![p("1"), p("0")]];
        assert_eq!(inv.h, want);
        assert_eq!(inv.k, want);
        assert!(inv.s_is_zero());
    }

    #[test]
    fn s_is_antisymmetric() {
        let inv = invariants(&sys(&["x*u_x*v_y + u*v_x*u_y", "v*u_x*u_y - v_x"])).unwrap();
        for g in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    assert!((&inv.s[g][a][b] + &inv.s[g][b][a]).is_zero());
                }
            }
        }
    }

    #[test]
    fn gradient_coefficient_extraction() {
        let c = gradient_coefficients(&p("u_x*v_y + x"), 2).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[&GradientMonomial(vec![0, 0, 0, 0])], Expr::x());
        assert_eq!(c[&GradientMonomial(vec![1, 0, 0, 1])], Expr::one());
        assert!(gradient_coefficients(&Expr::zero(), 2).unwrap().is_empty());
        assert!(gradient_coefficients(&p("1/(1 + u_x)"), 2).is_err());
        let back: Expr = c.iter().map(|(k, v)| k.to_expr() * v).sum();
        assert_eq!(back, p("u_x*v_y + x"));
    }

    #[test]
    fn supplied_normal_form_is_checked() {
        let s = sys(&["v", "u"]);
        let mut nf = s.normal_form().unwrap().clone();
        assert!(s.clone().with_normal_form(nf.clone()).is_ok());
        nf.e[0] = p("v");
        assert_eq!(
            s.with_normal_form(nf).unwrap_err(),
            SystemError::NormalFormMismatch { alpha: 1 }
        );
    }

    #[test]
    fn flat_connection_has_no_curvature() {
        let mut g = vec![vec![vec![Expr::zero(); 2]; 2]; 2];
        g[0][0][0] = p("exp(u)*u");
        let r = curvature(&g).unwrap();
        assert!(r.iter().flatten().flatten().flatten().all(|e| e.is_zero()));
        g[0][0][1] = p("v");
        assert!(matches!(curvature(&g), Err(CurvatureError::Asymmetric { .. })));
    }
}
