//! Euler-Lagrange operator for first-order Lagrangians, the off-shell
//! multiplier identity, Lagrangian construction by undetermined
//! coefficients, and divergence equivalence.

use std::collections::BTreeMap;

use num_rational::BigRational;
use thiserror::Error;

use crate::jetgeom::{connection_form, invariants, FGordonSystem, InvariantError, Matrix};
use crate::linalg::{param_equations, AffineSolution, SparseSolver};
use crate::multspace::{ansatz_atoms, build_phi0, monomials, satisfies_conditions, MultiplierError};
use crate::symexpr::{
    free_total_derivative, is_zero, Coordinate, Direction, Expr, VarNames,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LagrangeError {
    #[error("Lagrangian must be first order; found {0}")]
    NotFirstOrder(String),
    #[error("Lagrangian refers to dependent variable {index} but m = {m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("structured Lagrangian has inconsistent shapes for m = {0}")]
    Shape(usize),
    #[error("structured components must depend on (x, y, u) only")]
    StructuredJet,
}

/// `L = -(R_ab u^b_x u^a_y + Q_a u^a_x + P_a u^a_y + N)` with all
/// components functions of (x, y, u).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredLagrangian {
    pub r: Matrix,
    pub q: Vec<Expr>,
    pub p: Vec<Expr>,
    pub n: Expr,
}

impl StructuredLagrangian {
    pub fn to_expr(&self) -> Expr {
        let m = self.q.len();
        let mut s = self.n.clone();
        for a in 0..m {
            s += &(&self.q[a] * &Expr::ux(a));
            s += &(&self.p[a] * &Expr::uy(a));
            for b in 0..m {
                s += &(&self.r[a][b] * &(Expr::ux(b) * Expr::uy(a)));
            }
        }
        -s
    }

    fn validate(&self) -> Result<(), LagrangeError> {
        let m = self.q.len();
        if self.p.len() != m || self.r.len() != m || self.r.iter().any(|r| r.len() != m) {
            return Err(LagrangeError::Shape(m));
        }
        let jet = |e: &Expr| e.depends_on_any(|c| c.order() > 0);
        if self.r.iter().flatten().chain(&self.q).chain(&self.p).any(jet) || jet(&self.n) {
            return Err(LagrangeError::StructuredJet);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lagrangian {
    Free(Expr),
    Structured(StructuredLagrangian),
}

impl Lagrangian {
    pub fn to_expr(&self) -> Expr {
        match self {
            Lagrangian::Free(e) => e.clone(),
            Lagrangian::Structured(s) => s.to_expr(),
        }
    }

    pub fn display(&self, names: &VarNames) -> String {
        self.to_expr().display_with(names)
    }
}

impl From<Expr> for Lagrangian {
    fn from(e: Expr) -> Self {
        Lagrangian::Free(e)
    }
}

fn check_first_order(l: &Expr, m: usize) -> Result<(), LagrangeError> {
    for c in l.coordinates() {
        if c.is_second_order() {
            return Err(LagrangeError::NotFirstOrder(c.to_string()));
        }
        if let Some(i) = c.index() {
            if i >= m {
                return Err(LagrangeError::IndexOutOfRange { index: i + 1, m });
            }
        }
    }
    Ok(())
}

/// `E_a(L) = dL/du^a - D_x dL/du^a_x - D_y dL/du^a_y` with unconstrained
/// total derivatives; u_xx, u_xy, u_yy stay free coordinates.
pub fn euler_lagrange(l: &Lagrangian, m: usize) -> Result<Vec<Expr>, LagrangeError> {
    if let Lagrangian::Structured(s) = l {
        s.validate()?;
    }
    let l = l.to_expr();
    check_first_order(&l, m)?;
    (0..m)
        .map(|a| {
            let lx = l.partial(&Coordinate::Ux(a));
            let ly = l.partial(&Coordinate::Uy(a));
            let dx = free_total_derivative(&lx, Direction::X)
                .map_err(|e| LagrangeError::NotFirstOrder(e.to_string()))?;
            let dy = free_total_derivative(&ly, Direction::Y)
                .map_err(|e| LagrangeError::NotFirstOrder(e.to_string()))?;
            Ok(l.partial(&Coordinate::U(a)) - dx - dy)
        })
        .collect()
}

/// `M_ab = dE_a/du^b_xy`, the multiplier a Lagrangian would realize.
pub fn implied_multiplier(l: &Lagrangian, m: usize) -> Result<Matrix, LagrangeError> {
    let e = euler_lagrange(l, m)?;
    Ok(e.iter()
        .map(|ea| (0..m).map(|b| ea.partial(&Coordinate::Uxy(b))).collect())
        .collect())
}

/// `E_a(L) - M_ab (u^b_xy - f^b)` for each a.
pub fn multiplier_residuals(
    l: &Lagrangian,
    mat: &Matrix,
    sys: &FGordonSystem,
) -> Result<Vec<Expr>, LagrangeError> {
    let m = sys.m();
    if mat.len() != m || mat.iter().any(|r| r.len() != m) {
        return Err(LagrangeError::Shape(m));
    }
    let e = euler_lagrange(l, m)?;
    Ok((0..m)
        .map(|a| {
            let mut r = e[a].clone();
            for b in 0..m {
                let eq = Expr::coord(Coordinate::Uxy(b)) - &sys.f()[b];
                r -= &(&mat[a][b] * &eq);
            }
            r
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub holds: bool,
    /// Nonzero residuals, by equation index (1-based).
    pub residuals: Vec<(usize, Expr)>,
}

/// Off-shell check of `E_a(L) = M_ab (u^b_xy - f^b)` with u_xy free.
pub fn verify_multiplier(
    l: &Lagrangian,
    mat: &Matrix,
    sys: &FGordonSystem,
) -> Result<Verification, LagrangeError> {
    let res = multiplier_residuals(l, mat, sys)?;
    let residuals: Vec<(usize, Expr)> = res
        .into_iter()
        .enumerate()
        .filter(|(_, r)| !is_zero(r).is_zero())
        .map(|(a, r)| (a + 1, r))
        .collect();
    Ok(Verification {
        holds: residuals.is_empty(),
        residuals,
    })
}

/// Two first-order Lagrangians are equivalent iff their difference is a
/// null Lagrangian.
pub fn divergence_equivalent(
    l1: &Lagrangian,
    l2: &Lagrangian,
    m: usize,
) -> Result<bool, LagrangeError> {
    let diff = Lagrangian::Free(l1.to_expr() - l2.to_expr());
    Ok(euler_lagrange(&diff, m)?
        .iter()
        .all(|e| is_zero(e).is_zero()))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("system is not in normal form")]
    NotNormalForm,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix fails the multiplier conditions")]
    NotAMultiplier,
    #[error(
        "no Lagrangian found up to degree {degree_cap} \
         ({equations} equations, rank {rank}, {unknowns} unknowns in the last attempt)"
    )]
    NoSolution {
        degree_cap: usize,
        equations: usize,
        rank: usize,
        unknowns: usize,
    },
    #[error(transparent)]
    Lagrange(#[from] LagrangeError),
}

/// Build a structured Lagrangian with multiplier `mat`: the symmetric part
/// of R is `mat/2`; the skew part of R and Q, P, N are polynomials in
/// (x, y, u) and the opaque functions of the inputs, of increasing degree.
/// The skew part is first fixed at zero and only freed on failure.
pub fn construct_lagrangian(
    mat: &Matrix,
    sys: &FGordonSystem,
    degree_cap: usize,
) -> Result<StructuredLagrangian, ConstructError> {
    let m = sys.m();
    if mat.len() != m || mat.iter().any(|r| r.len() != m) {
        return Err(LagrangeError::Shape(m).into());
    }
    for a in 0..m {
        for b in a + 1..m {
            if !is_zero(&(&mat[a][b] - &mat[b][a])).is_zero() {
                return Err(ConstructError::NotSymmetric);
            }
        }
    }
    let omega = connection_form(sys).map_err(|_| ConstructError::NotNormalForm)?;
    let phi = build_phi0(&invariants(sys)?, m)?;
    if !satisfies_conditions(mat, &phi, &omega) {
        return Err(ConstructError::NotAMultiplier);
    }

    let nf = sys.normal_form().map_err(|_| ConstructError::NotNormalForm)?;
    let sources: Vec<Expr> = mat
        .iter()
        .flatten()
        .chain(nf.e.iter())
        .chain(nf.a.iter().flatten())
        .chain(nf.b.iter().flatten())
        .chain(nf.c.iter().flatten().flatten())
        .cloned()
        .collect();
    let atoms = ansatz_atoms(m, &sources);
    let half = Expr::frac(1, 2);
    let mut last = (0, 0, 0);
    for degree in 0..=degree_cap {
        let monos = monomials(&atoms, degree);
        for with_skew in [false, true] {
            if with_skew && m < 2 {
                continue;
            }
            let mut next = 0usize;
            let poly = |next: &mut usize| -> Expr {
                let e = monos
                    .iter()
                    .enumerate()
                    .map(|(j, mono)| mono * &Expr::param(*next + j))
                    .sum();
                *next += monos.len();
                e
            };
            let mut r: Matrix = mat
                .iter()
                .map(|row| row.iter().map(|e| &half * e).collect())
                .collect();
            if with_skew {
                for a in 0..m {
                    for b in a + 1..m {
                        let w = poly(&mut next);
                        r[a][b] = &r[a][b] + &w;
                        r[b][a] = &r[b][a] - &w;
                    }
                }
            }
            let q: Vec<Expr> = (0..m).map(|_| poly(&mut next)).collect();
            let p: Vec<Expr> = (0..m).map(|_| poly(&mut next)).collect();
            let n = poly(&mut next);
            let ansatz = StructuredLagrangian { r, q, p, n };
            let residuals =
                multiplier_residuals(&Lagrangian::Structured(ansatz.clone()), mat, sys)?;
            let mut solver = SparseSolver::new(next);
            let mut neq = 0;
            let mut linear = true;
            for res in &residuals {
                match param_equations(res) {
                    Some(eqs) => {
                        neq += eqs.len();
                        eqs.into_iter().for_each(|e| solver.add(e));
                    }
                    None => {
                        linear = false;
                        break;
                    }
                }
            }
            last = (neq, solver.rank(), next);
            if !linear {
                continue;
            }
            let AffineSolution::Solved { particular, .. } = solver.solve() else {
                continue;
            };
            let l = substitute_params(&ansatz, &particular);
            if verify_multiplier(&Lagrangian::Structured(l.clone()), mat, sys)?.holds {
                return Ok(l);
            }
        }
    }
    Err(ConstructError::NoSolution {
        degree_cap,
        equations: last.0,
        rank: last.1,
        unknowns: last.2,
    })
}

fn substitute_params(l: &StructuredLagrangian, vals: &[BigRational]) -> StructuredLagrangian {
    let map: BTreeMap<Coordinate, Expr> = vals
        .iter()
        .enumerate()
        .map(|(i, v)| (Coordinate::Param(i), Expr::rational(v.clone())))
        .collect();
    let s = |e: &Expr| {
        if e.depends_on_any(|c| c.is_param()) {
            e.substitute_all(&map)
        } else {
            e.clone()
        }
    };
    StructuredLagrangian {
        r: l.r.iter().map(|row| row.iter().map(s).collect()).collect(),
        q: l.q.iter().map(s).collect(),
        p: l.p.iter().map(s).collect(),
        n: s(&l.n),
    }
}

/// Structured components of a Lagrangian already in normal form, read off
/// from its Taylor coefficients in the gradients; `None` if L is not of
/// that shape.
pub fn structure_of(l: &Expr, m: usize) -> Option<StructuredLagrangian> {
    let grads = crate::jetgeom::gradient_coords(m);
    let coeffs = l.poly_coefficients(&grads)?;
    let mut out = StructuredLagrangian {
        r: vec![vec![Expr::zero(); m]; m],
        q: vec![Expr::zero(); m],
        p: vec![Expr::zero(); m],
        n: Expr::zero(),
    };
    for (key, c) in coeffs {
        let nz: Vec<usize> = key
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, _)| i)
            .collect();
        let deg: u32 = key.iter().sum();
        let c = -c;
        match (deg, nz.as_slice()) {
            (0, _) => out.n = c,
            (1, [k]) if k % 2 == 0 => out.q[k / 2] = c,
            (1, [k]) => out.p[k / 2] = c,
            // u^b_x u^a_y
            (2, [i, j]) if i % 2 != j % 2 => {
                let (bx, ay) = if i % 2 == 0 { (i / 2, j / 2) } else { (j / 2, i / 2) };
                out.r[ay][bx] = c;
            }
            _ => return None,
        }
    }
    Some(out)
}
