//! Exact rational linear algebra: dense elimination for small matrices and
//! an incremental sparse solver for ansatz systems.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::symexpr::Expr;

pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &QMatrix) -> (QMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let k = a[i][c].clone();
                for j in c..cols {
                    let t = &a[r][j] * &k;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &QMatrix) -> usize {
    // Plain forward elimination; cheaper than a full rref.
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            if !a[i][c].is_zero() {
                let k = &a[i][c] / &a[r][c];
                for j in c..cols {
                    let t = &a[r][j] * &k;
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right nullspace, one vector per free column, with the free
/// coordinate set to 1.
pub fn nullspace(m: &QMatrix, cols: usize) -> Vec<Vec<BigRational>> {
    if m.is_empty() {
        return (0..cols)
            .map(|k| {
                let mut v = vec![BigRational::zero(); cols];
                v[k] = BigRational::one();
                v
            })
            .collect();
    }
    let (r, pivots) = rref(m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[i][free].clone();
        }
        out.push(v);
    }
    out
}

pub fn determinant(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let k = &a[i][c] / &a[c][c];
                for j in c..n {
                    let t = &a[c][j] * &k;
                    a[i][j] -= t;
                }
            }
        }
    }
    det
}

/// Symbolic determinant by cofactor expansion; meant for the small
/// matrices that occur here (m <= 4 or so).
pub fn det_expr(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => {
            let mut out = Expr::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Expr>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, e)| e.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][j] * &det_expr(&minor);
                if j % 2 == 0 {
                    out += &t;
                } else {
                    out -= &t;
                }
            }
            out
        }
    }
}

/// One linear equation `sum coeffs[i] * x_i = rhs`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinEq {
    pub coeffs: BTreeMap<usize, BigRational>,
    pub rhs: BigRational,
}

/// Split an expression that is affine in the `Param` unknowns into scalar
/// equations: the identity `e = 0` must hold for all values of the
/// remaining atoms, so every coefficient of the numerator vanishes.
/// Returns `None` if a parameter occurs nonlinearly or in a denominator.
pub fn param_equations(e: &Expr) -> Option<Vec<LinEq>> {
    if e.is_zero() {
        return Some(Vec::new());
    }
    let mut out = Vec::new();
    for coef in e.numerator_coefficients(|c| c.is_param()) {
        let (constant, lin) = coef.param_linear()?;
        let mut eq = LinEq {
            rhs: -constant.as_rational()?,
            ..LinEq::default()
        };
        for (i, c) in lin {
            eq.coeffs.insert(i, c.as_rational()?);
        }
        out.push(eq);
    }
    if e.den().atoms().iter().any(|a| {
        let mut s = std::collections::BTreeSet::new();
        a.coordinates(&mut s);
        s.iter().any(|c| c.is_param())
    }) {
        return None;
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AffineSolution {
    Inconsistent,
    Solved {
        /// Solution with every free variable set to zero.
        particular: Vec<BigRational>,
        /// Basis of the homogeneous solution space.
        kernel: Vec<Vec<BigRational>>,
    },
}

/// Incremental sparse Gaussian elimination over Q.
#[derive(Clone, Debug, Default)]
pub struct SparseSolver {
    nvars: usize,
    // pivot variable -> row normalized to 1 at the pivot, whose other
    // entries all have larger indices
    pivots: BTreeMap<usize, LinEq>,
    inconsistent: bool,
}

impl SparseSolver {
    pub fn new(nvars: usize) -> Self {
        SparseSolver {
            nvars,
            ..Default::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    pub fn add(&mut self, mut eq: LinEq) {
        eq.coeffs.retain(|_, c| !c.is_zero());
        loop {
            let Some((&p, _)) = eq.coeffs.iter().next() else {
                if !eq.rhs.is_zero() {
                    self.inconsistent = true;
                }
                return;
            };
            debug_assert!(p < self.nvars);
            match self.pivots.get(&p) {
                Some(row) => {
                    let k = eq.coeffs[&p].clone();
                    for (j, c) in &row.coeffs {
                        let e = eq.coeffs.entry(*j).or_insert_with(BigRational::zero);
                        *e -= c * &k;
                        if e.is_zero() {
                            eq.coeffs.remove(j);
                        }
                    }
                    eq.rhs -= &row.rhs * &k;
                }
                None => {
                    let inv = eq.coeffs[&p].recip();
                    for c in eq.coeffs.values_mut() {
                        *c *= &inv;
                    }
                    eq.rhs *= &inv;
                    self.pivots.insert(p, eq);
                    return;
                }
            }
        }
    }

    fn back_substitute(&self, free: &BTreeMap<usize, BigRational>, homogeneous: bool) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.nvars];
        for (i, v) in free {
            x[*i] = v.clone();
        }
        for (p, row) in self.pivots.iter().rev() {
            let mut v = if homogeneous {
                BigRational::zero()
            } else {
                row.rhs.clone()
            };
            for (j, c) in row.coeffs.iter().skip(1) {
                v -= c * &x[*j];
            }
            x[*p] = v;
        }
        x
    }

    pub fn solve(&self) -> AffineSolution {
        if self.inconsistent {
            return AffineSolution::Inconsistent;
        }
        let particular = self.back_substitute(&BTreeMap::new(), false);
        let kernel = (0..self.nvars)
            .filter(|i| !self.pivots.contains_key(i))
            .map(|f| {
                let mut free = BTreeMap::new();
                free.insert(f, BigRational::one());
                self.back_substitute(&free, true)
            })
            .collect();
        AffineSolution::Solved { particular, kernel }
    }
}
