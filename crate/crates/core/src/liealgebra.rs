//! Lie algebra sigma-model systems `u^a_xy + C^a_bg u^b_x u^g_y = 0`:
//! structure constants, Killing form, bi-invariant forms and the cubic
//! Lagrangian.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::jetgeom::{FGordonSystem, Matrix};
use crate::linalg::{nullspace, QMatrix};
use crate::multspace::{unknown_count, unknown_index, unknown_pairs};
use crate::symexpr::{Expr, VarNames};
use crate::varlagrange::{Lagrangian, StructuredLagrangian};

pub type QTensor3 = Vec<Vec<Vec<BigRational>>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("structure constants must be an m x m x m tensor with m >= 1")]
    Shape,
    #[error("bracket index out of range: [e{i}, e{j}] with m = {m}")]
    Index { i: usize, j: usize, m: usize },
    #[error("bracket [e{i}, e{j}] given twice with conflicting values")]
    Conflict { i: usize, j: usize },
    #[error("antisymmetry fails: C^{a}_{{{b}{g}}} != -C^{a}_{{{g}{b}}}")]
    Antisymmetry { a: usize, b: usize, g: usize },
    #[error("Jacobi identity fails for (e{b}, e{g}, e{d}) in component {a}")]
    Jacobi { a: usize, b: usize, g: usize, d: usize },
    #[error("change of basis is singular")]
    Singular,
    #[error("matrix is not a symmetric bi-invariant form")]
    NotBiinvariant,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `c[a][b][g] = C^a_{bg}`, so that `[e_b, e_g] = C^a_{bg} e_a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    m: usize,
    c: QTensor3,
}

impl StructureConstants {
    /// Validates shape, antisymmetry and the Jacobi identity.
    pub fn new(c: QTensor3) -> Result<Self, LieError> {
        let m = c.len();
        if m == 0 || c.iter().any(|s| s.len() != m || s.iter().any(|r| r.len() != m)) {
            return Err(LieError::Shape);
        }
        for a in 0..m {
            for b in 0..m {
                for g in b..m {
                    if c[a][b][g] != -c[a][g][b].clone() {
                        return Err(LieError::Antisymmetry { a: a + 1, b: b + 1, g: g + 1 });
                    }
                }
            }
        }
        let sc = StructureConstants { m, c };
        sc.check_jacobi()?;
        Ok(sc)
    }

    /// Brackets `[e_i, e_j] = sum_k coeffs[k] e_k` (0-based), antisymmetry
    /// completed automatically; unlisted brackets vanish.
    pub fn from_brackets(
        m: usize,
        brackets: &[(usize, usize, Vec<BigRational>)],
    ) -> Result<Self, LieError> {
        if m == 0 {
            return Err(LieError::Shape);
        }
        let mut c = vec![vec![vec![BigRational::zero(); m]; m]; m];
        let mut seen = vec![vec![false; m]; m];
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= m || j >= m {
                return Err(LieError::Index { i: i + 1, j: j + 1, m });
            }
            if coeffs.len() != m {
                return Err(LieError::Shape);
            }
            if i == j {
                if coeffs.iter().any(|v| !v.is_zero()) {
                    return Err(LieError::Antisymmetry { a: 1, b: i + 1, g: i + 1 });
                }
                continue;
            }
            if seen[i][j] {
                let same = (0..m).all(|a| c[a][i][j] == coeffs[a]);
                if !same {
                    return Err(LieError::Conflict { i: i + 1, j: j + 1 });
                }
                continue;
            }
            for a in 0..m {
                c[a][i][j] = coeffs[a].clone();
                c[a][j][i] = -coeffs[a].clone();
            }
            seen[i][j] = true;
            seen[j][i] = true;
        }
        let sc = StructureConstants { m, c };
        sc.check_jacobi()?;
        Ok(sc)
    }

    fn check_jacobi(&self) -> Result<(), LieError> {
        let m = self.m;
        let c = &self.c;
        for b in 0..m {
            for g in 0..m {
                for d in 0..m {
                    for a in 0..m {
                        let mut s = BigRational::zero();
                        for t in 0..m {
                            s += &c[t][b][g] * &c[a][t][d];
                            s += &c[t][g][d] * &c[a][t][b];
                            s += &c[t][d][b] * &c[a][t][g];
                        }
                        if !s.is_zero() {
                            return Err(LieError::Jacobi {
                                a: a + 1,
                                b: b + 1,
                                g: g + 1,
                                d: d + 1,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn abelian(m: usize) -> Self {
        StructureConstants {
            m,
            c: vec![vec![vec![BigRational::zero(); m]; m]; m],
        }
    }

    /// so(3): `[e_i, e_j] = eps_ijk e_k`.
    pub fn so3() -> Self {
        let b = |i, j, k| {
            let mut v = vec![q(0); 3];
            v[k] = q(1);
            (i, j, v)
        };
        Self::from_brackets(3, &[b(0, 1, 2), b(1, 2, 0), b(2, 0, 1)]).expect("so(3)")
    }

    /// 2-dim nonabelian: `[e1, e2] = e1`.
    pub fn affine2() -> Self {
        Self::from_brackets(2, &[(0, 1, vec![q(1), q(0)])]).expect("aff(1)")
    }

    /// The matrices E12, E13, E22, E23 of gl(3): `[e1,e3] = e1`,
    /// `[e1,e4] = e2`, `[e3,e4] = e4`.
    pub fn solvable4() -> Self {
        let e = |k: usize| {
            let mut v = vec![q(0); 4];
            v[k] = q(1);
            v
        };
        Self::from_brackets(4, &[(0, 2, e(0)), (0, 3, e(1)), (2, 3, e(3))]).expect("solvable")
    }

    /// `R ⋉ R^n` with `[e0, e_i] = sum_k d[k][i] e_k`; Jacobi holds for any `d`.
    pub fn semidirect(d: &QMatrix) -> Result<Self, LieError> {
        let n = d.len();
        if d.iter().any(|r| r.len() != n) {
            return Err(LieError::Shape);
        }
        let m = n + 1;
        let brackets: Vec<_> = (0..n)
            .map(|i| {
                let mut v = vec![q(0); m];
                for k in 0..n {
                    v[k + 1] = d[k][i].clone();
                }
                (0, i + 1, v)
            })
            .collect();
        Self::from_brackets(m, &brackets)
    }

    /// Same algebra in the basis `e'_i = t[k][i] e_k`.
    pub fn change_basis(&self, t: &QMatrix) -> Result<Self, LieError> {
        let m = self.m;
        if t.len() != m || t.iter().any(|r| r.len() != m) {
            return Err(LieError::Shape);
        }
        let tinv = q_inverse(t).ok_or(LieError::Singular)?;
        let mut c = vec![vec![vec![q(0); m]; m]; m];
        for (a, ca) in c.iter_mut().enumerate() {
            for i in 0..m {
                for j in 0..m {
                    let mut s = q(0);
                    for p in 0..m {
                        if tinv[a][p].is_zero() {
                            continue;
                        }
                        for k in 0..m {
                            for l in 0..m {
                                s += &tinv[a][p] * &self.c[p][k][l] * &t[k][i] * &t[l][j];
                            }
                        }
                    }
                    ca[i][j] = s;
                }
            }
        }
        StructureConstants::new(c)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn tensor(&self) -> &QTensor3 {
        &self.c
    }

    pub fn get(&self, a: usize, b: usize, g: usize) -> &BigRational {
        &self.c[a][b][g]
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().flatten().flatten().all(|v| v.is_zero())
    }
}

fn q_inverse(t: &QMatrix) -> Option<QMatrix> {
    let n = t.len();
    let aug: QMatrix = t
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { q(1) } else { q(0) }));
            r
        })
        .collect();
    let (r, pivots) = crate::linalg::rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// `K_ab = C^s_{a t} C^t_{b s}`.
pub fn killing_form(sc: &StructureConstants) -> QMatrix {
    let m = sc.m;
    let c = &sc.c;
    let mut k = vec![vec![q(0); m]; m];
    for a in 0..m {
        for b in 0..m {
            let mut s = q(0);
            for sg in 0..m {
                for t in 0..m {
                    s += &c[sg][a][t] * &c[t][b][sg];
                }
            }
            k[a][b] = s;
        }
    }
    k
}

/// Rows of `M_ag C^g_{be} + M_bg C^g_{ae} = 0` over the symmetric unknowns,
/// one per `(a <= b, e)`.
pub fn biinvariant_system(sc: &StructureConstants) -> QMatrix {
    let m = sc.m;
    let n = unknown_count(m);
    let mut rows = Vec::new();
    for (a, b) in unknown_pairs(m) {
        for e in 0..m {
            let mut row = vec![q(0); n];
            for g in 0..m {
                row[unknown_index(m, a, g)] += &sc.c[g][b][e];
                row[unknown_index(m, b, g)] += &sc.c[g][a][e];
            }
            rows.push(row);
        }
    }
    rows
}

pub fn is_biinvariant(sc: &StructureConstants, mat: &QMatrix) -> bool {
    let m = sc.m;
    if mat.len() != m || mat.iter().any(|r| r.len() != m) {
        return false;
    }
    if unknown_pairs(m).iter().any(|&(a, b)| mat[a][b] != mat[b][a]) {
        return false;
    }
    let v = matrix_to_vector(mat);
    biinvariant_system(sc).iter().all(|row| {
        row.iter()
            .zip(&v)
            .map(|(r, x)| r * x)
            .sum::<BigRational>()
            .is_zero()
    })
}

/// Exact basis of the symmetric bi-invariant forms.
pub fn biinvariant_forms(sc: &StructureConstants) -> Vec<QMatrix> {
    let m = sc.m;
    nullspace(&biinvariant_system(sc), unknown_count(m))
        .iter()
        .map(|v| vector_to_qmatrix(m, v))
        .collect()
}

pub fn matrix_to_vector(mat: &QMatrix) -> Vec<BigRational> {
    unknown_pairs(mat.len())
        .into_iter()
        .map(|(a, b)| mat[a][b].clone())
        .collect()
}

pub fn vector_to_qmatrix(m: usize, v: &[BigRational]) -> QMatrix {
    (0..m)
        .map(|a| (0..m).map(|b| v[unknown_index(m, a, b)].clone()).collect())
        .collect()
}

pub fn to_expr_matrix(mat: &QMatrix) -> Matrix {
    mat.iter()
        .map(|r| r.iter().map(|v| Expr::rational(v.clone())).collect())
        .collect()
}

/// `u^a_xy = -C^a_{bg} u^b_x u^g_y` over the indexed names `u1..um`.
pub fn lie_system(sc: &StructureConstants) -> FGordonSystem {
    let m = sc.m;
    let f = (0..m)
        .map(|a| {
            let mut s = Expr::zero();
            for b in 0..m {
                for g in 0..m {
                    let c = &sc.c[a][b][g];
                    if !c.is_zero() {
                        s -= &(Expr::rational(c.clone()) * Expr::ux(b) * Expr::uy(g));
                    }
                }
            }
            s
        })
        .collect();
    FGordonSystem::new(VarNames::indexed(m), f).expect("quadratic system is in normal form")
}

/// `L = -(1/6) M_ab (3 u^a_x u^b_y - 2 C^a_{et} u^b u^e_x u^t_y)`.
pub fn lie_lagrangian(mat: &QMatrix, sc: &StructureConstants) -> Result<Lagrangian, LieError> {
    if !is_biinvariant(sc, mat) {
        return Err(LieError::NotBiinvariant);
    }
    let m = sc.m;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let mut r = vec![vec![Expr::zero(); m]; m];
    for a in 0..m {
        for b in 0..m {
            // M_ab u^a_x u^b_y lands in R[b][a]
            r[b][a] += &Expr::rational(&mat[a][b] * &half);
        }
    }
    for a in 0..m {
        for b in 0..m {
            if mat[a][b].is_zero() {
                continue;
            }
            for e in 0..m {
                for t in 0..m {
                    let c = &sc.c[a][e][t];
                    if c.is_zero() {
                        continue;
                    }
                    let k = -(&mat[a][b] * c * &third);
                    r[t][e] += &(Expr::rational(k) * Expr::u(b));
                }
            }
        }
    }
    Ok(Lagrangian::Structured(StructuredLagrangian {
        r,
        q: vec![Expr::zero(); m],
        p: vec![Expr::zero(); m],
        n: Expr::zero(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varlagrange::verify_multiplier;

    #[test]
    fn so3_killing() {
        let sc = StructureConstants::so3();
        let k = killing_form(&sc);
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(k[a][b], if a == b { q(-2) } else { q(0) });
            }
        }
        assert!(is_biinvariant(&sc, &k));
        assert_eq!(biinvariant_forms(&sc).len(), 1);
    }

    #[test]
    fn rejects_bad_tensors() {
        let mut c = StructureConstants::so3().tensor().clone();
        c[2][0][1] = q(2);
        assert!(matches!(
            StructureConstants::new(c),
            Err(LieError::Antisymmetry { .. })
        ));
        // [e1,e2] = e3, [e1,e3] = e1 violates Jacobi
        let e = |k: usize| {
            let mut v = vec![q(0); 3];
            v[k] = q(1);
            v
        };
        let bad = StructureConstants::from_brackets(3, &[(0, 1, e(2)), (0, 2, e(0))]);
        assert!(matches!(bad, Err(LieError::Jacobi { .. })));
    }

    #[test]
    fn abelian_everything() {
        let sc = StructureConstants::abelian(3);
        assert_eq!(biinvariant_forms(&sc).len(), 6);
        assert!(killing_form(&sc).iter().flatten().all(|v| v.is_zero()));
    }

    #[test]
    fn solvable_family() {
        let sc = StructureConstants::solvable4();
        let mut m = vec![vec![q(0); 4]; 4];
        m[2][2] = q(5);
        m[1][2] = q(1);
        m[2][1] = q(1);
        m[0][3] = q(-1);
        m[3][0] = q(-1);
        assert!(is_biinvariant(&sc, &m));
        assert!(!crate::linalg::determinant(&m).is_zero());
        assert!(crate::linalg::determinant(&killing_form(&sc)).is_zero());
    }

    #[test]
    fn lagrangian_verifies() {
        let sc = StructureConstants::so3();
        let k = killing_form(&sc);
        let l = lie_lagrangian(&k, &sc).unwrap();
        let v = verify_multiplier(&l, &to_expr_matrix(&k), &lie_system(&sc)).unwrap();
        assert!(v.holds, "{:?}", v.residuals);
    }

    #[test]
    fn basis_change_preserves_dimension() {
        let sc = StructureConstants::solvable4();
        let t: QMatrix = vec![
            vec![q(1), q(2), q(0), q(0)],
            vec![q(0), q(1), q(0), q(3)],
            vec![q(0), q(0), q(1), q(0)],
            vec![q(1), q(0), q(0), q(1)],
        ];
        let t2 = sc.change_basis(&t).unwrap();
        assert_eq!(biinvariant_forms(&sc).len(), biinvariant_forms(&t2).len());
    }
}
