//! The space of multipliers: algebraic rows from H, K, S, the
//! differentiate-and-augment iteration, rank stabilization by exact
//! evaluation at random points, and reconstruction of explicit solutions.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::jetgeom::{
    connection_form, gradient_coefficients, invariants, ConnectionForm, FGordonSystem,
    GradientMonomial, InvariantError, InvariantTriple, Matrix, NormalFormRefusal,
};
use crate::linalg::{self, det_expr, param_equations, AffineSolution, QMatrix, SparseSolver};
use crate::symexpr::{is_zero, Coordinate, Evaluator, Expr, Point, Sampler, ZeroTest, DEFAULT_SEED};

pub const DEFAULT_DEGREE_CAP: usize = 4;
pub const RANK_POINTS: usize = 8;
const MAX_POINT_RETRIES: usize = 64;

/// Number of symmetric unknowns `M_ab`, `a <= b`.
pub fn unknown_count(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Position of `M_ab` in the order (1,1), (1,2), ..., (1,m), (2,2), ..., (m,m).
pub fn unknown_index(m: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * m - a * (a + 1) / 2 + b
}

pub fn unknown_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|a| (a..m).map(move |b| (a, b))).collect()
}

/// Display label `M{a}{b}` (1-based) for each unknown.
pub fn unknown_labels(m: usize) -> Vec<String> {
    unknown_pairs(m)
        .into_iter()
        .map(|(a, b)| {
            if m < 10 {
                format!("M{}{}", a + 1, b + 1)
            } else {
                format!("M{}_{}", a + 1, b + 1)
            }
        })
        .collect()
}

/// Expand a coefficient vector over the unknowns into a symmetric matrix.
pub fn vector_to_matrix(m: usize, v: &[Expr]) -> Matrix {
    let mut out = vec![vec![Expr::zero(); m]; m];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            *e = v[unknown_index(m, a, b)].clone();
        }
    }
    out
}

/// Where a row of the constraint system came from. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowOrigin {
    /// `M_as H^s_b - M_bs K^s_a`, coefficient of a gradient monomial.
    HK {
        alpha: usize,
        beta: usize,
        monomial: GradientMonomial,
    },
    /// `M_as S^s_bg + M_bs S^s_ag`.
    S { alpha: usize, beta: usize, gamma: usize },
    /// Derivative of an earlier row along a base direction, plus the
    /// connection terms.
    Derived { parent: usize, direction: Coordinate },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiRow {
    pub coeffs: Vec<Expr>,
    pub origin: RowOrigin,
    pub stage: usize,
}

/// Linear constraints on the symmetric unknowns, accumulated by stage.
#[derive(Debug, Clone)]
pub struct PhiSystem {
    m: usize,
    rows: Vec<PhiRow>,
    stage: usize,
    seen: BTreeSet<Vec<Expr>>,
}

impl PhiSystem {
    pub fn new(m: usize) -> Self {
        PhiSystem {
            m,
            rows: Vec::new(),
            stage: 0,
            seen: BTreeSet::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[PhiRow] {
        &self.rows
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    /// Rows added at the given stage.
    pub fn stage_rows(&self, stage: usize) -> impl Iterator<Item = (usize, &PhiRow)> {
        self.rows
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.stage == stage)
    }

    /// Normalize and insert; returns false for zero rows and duplicates.
    fn push(&mut self, coeffs: Vec<Expr>, origin: RowOrigin) -> bool {
        let Some(coeffs) = normalize_row(coeffs) else {
            return false;
        };
        if !self.seen.insert(coeffs.clone()) {
            return false;
        }
        self.rows.push(PhiRow {
            coeffs,
            origin,
            stage: self.stage,
        });
        true
    }

    /// A row as the linear form `sum c_ab M_ab` with `Param` unknowns.
    pub fn row_form(&self, i: usize) -> Expr {
        self.rows[i]
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * &Expr::param(k))
            .sum()
    }
}

/// Scale so that the first nonzero entry has leading numerator
/// coefficient 1. Rows differing by a rational factor then coincide.
fn normalize_row(coeffs: Vec<Expr>) -> Option<Vec<Expr>> {
    let first = coeffs.iter().find(|c| !c.is_zero())?;
    let lc = first.leading_coefficient();
    if lc.is_one() {
        return Some(coeffs);
    }
    let k = lc.recip();
    Some(coeffs.iter().map(|c| c.scale(&k)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MultiplierError {
    #[error("{0}")]
    NotNormalForm(NormalFormRefusal),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("invariant H or K is not polynomial in the gradients")]
    NotPolynomial,
    #[error("rank still growing after {0} stages; internal inconsistency")]
    NoStabilization(usize),
    #[error("could not find {0} sample points free of poles")]
    Sampling(usize),
}

/// Rows of the algebraic conditions
/// `M_as H^s_b = M_bs K^s_a` (one row per gradient monomial) and
/// `M_as S^s_bg + M_bs S^s_ag = 0`, over all ordered index pairs.
pub fn build_phi0(inv: &InvariantTriple, m: usize) -> Result<PhiSystem, MultiplierError> {
    let n = unknown_count(m);
    let mut phi = PhiSystem::new(m);
    for al in 0..m {
        for be in 0..m {
            let mut entries = vec![Expr::zero(); n];
            for s in 0..m {
                entries[unknown_index(m, al, s)] += &inv.h[s][be];
                entries[unknown_index(m, be, s)] -= &inv.k[s][al];
            }
            let mut by_mono: BTreeMap<GradientMonomial, Vec<Expr>> = BTreeMap::new();
            for (k, e) in entries.iter().enumerate() {
                let coeffs =
                    gradient_coefficients(e, m).map_err(|_| MultiplierError::NotPolynomial)?;
                for (mono, c) in coeffs {
                    by_mono.entry(mono).or_insert_with(|| vec![Expr::zero(); n])[k] = c;
                }
            }
            for (monomial, row) in by_mono {
                phi.push(
                    row,
                    RowOrigin::HK {
                        alpha: al + 1,
                        beta: be + 1,
                        monomial,
                    },
                );
            }
        }
    }
    for al in 0..m {
        for be in 0..m {
            for ga in 0..m {
                let mut row = vec![Expr::zero(); n];
                for s in 0..m {
                    row[unknown_index(m, al, s)] += &inv.s[s][be][ga];
                    row[unknown_index(m, be, s)] += &inv.s[s][al][ga];
                }
                phi.push(
                    row,
                    RowOrigin::S {
                        alpha: al + 1,
                        beta: be + 1,
                        gamma: ga + 1,
                    },
                );
            }
        }
    }
    Ok(phi)
}

/// Derivative of `sum c_pq M_pq` along `d`, using
/// `d M_pq = M_ps Omega^s_q + M_qs Omega^s_p`.
pub fn derive_row(coeffs: &[Expr], m: usize, omega: &ConnectionForm, d: &Coordinate) -> Vec<Expr> {
    let n = unknown_count(m);
    let comp = omega.component(d);
    let mut out: Vec<Expr> = coeffs.iter().map(|c| c.partial(d)).collect();
    debug_assert_eq!(out.len(), n);
    for (k, (p, q)) in unknown_pairs(m).into_iter().enumerate() {
        let c = &coeffs[k];
        if c.is_zero() {
            continue;
        }
        for s in 0..m {
            if !comp[s][q].is_zero() {
                out[unknown_index(m, p, s)] += &(c * &comp[s][q]);
            }
            if !comp[s][p].is_zero() {
                out[unknown_index(m, q, s)] += &(c * &comp[s][p]);
            }
        }
    }
    out
}

/// One augmentation step: differentiate the rows of the latest stage in
/// every base direction. Returns the number of new rows.
pub fn augment(phi: &mut PhiSystem, omega: &ConnectionForm) -> usize {
    let m = phi.m;
    let last = phi.stage;
    let frontier: Vec<(usize, Vec<Expr>)> = phi
        .stage_rows(last)
        .map(|(i, r)| (i, r.coeffs.clone()))
        .collect();
    phi.stage += 1;
    let mut added = 0;
    for (parent, coeffs) in frontier {
        for d in Coordinate::base(m) {
            let row = derive_row(&coeffs, m, omega, &d);
            if phi.push(
                row,
                RowOrigin::Derived {
                    parent,
                    direction: d,
                },
            ) {
                added += 1;
            }
        }
    }
    added
}

/// Rows evaluated at a fixed set of random points in (x, y, u).
#[derive(Debug, Clone)]
pub struct RankSampler {
    m: usize,
    sampler: Sampler,
    points: Vec<Point>,
    values: Vec<QMatrix>,
}

impl RankSampler {
    pub fn new(m: usize, seed: u64, count: usize) -> Self {
        let mut sampler = Sampler::new(seed);
        let coords = Coordinate::base(m);
        let points = (0..count).map(|_| sampler.point(&coords)).collect();
        RankSampler {
            m,
            sampler,
            points,
            values: vec![Vec::new(); count],
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    fn eval_row(point: &Point, row: &[Expr]) -> Option<Vec<BigRational>> {
        let mut ev = Evaluator::new(point);
        row.iter()
            .map(|e| {
                ev.eval(e).ok().map(|v| {
                    // inexact values below the zero threshold count as zero
                    if v.is_zero() {
                        BigRational::zero()
                    } else {
                        v.value
                    }
                })
            })
            .collect()
    }

    /// Evaluate any rows not yet evaluated; points hitting a pole are
    /// replaced and all rows re-evaluated there.
    pub fn update(&mut self, rows: &[PhiRow]) -> Result<(), MultiplierError> {
        let coords = Coordinate::base(self.m);
        for i in 0..self.points.len() {
            let mut tries = 0;
            loop {
                let start = self.values[i].len();
                let mut ok = true;
                for r in &rows[start..] {
                    match Self::eval_row(&self.points[i], &r.coeffs) {
                        Some(v) => self.values[i].push(v),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    break;
                }
                tries += 1;
                if tries > MAX_POINT_RETRIES {
                    return Err(MultiplierError::Sampling(self.points.len()));
                }
                self.points[i] = self.sampler.point(&coords);
                self.values[i].clear();
            }
        }
        Ok(())
    }

    /// Rank of the first `nrows` rows at each point.
    pub fn ranks(&self, nrows: usize) -> Vec<usize> {
        self.values
            .iter()
            .map(|v| linalg::rank(&v[..nrows].to_vec()))
            .collect()
    }

    pub fn matrix(&self, point: usize, nrows: usize) -> QMatrix {
        self.values[point][..nrows].to_vec()
    }
}

/// Generic rank of a constraint system and the per-point ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankInfo {
    pub rank: usize,
    pub per_point: Vec<usize>,
    pub points: Vec<Point>,
}

pub fn generic_rank(phi: &PhiSystem, seed: u64) -> Result<RankInfo, MultiplierError> {
    let mut rs = RankSampler::new(phi.m, seed, RANK_POINTS);
    rs.update(&phi.rows)?;
    let per_point = rs.ranks(phi.rows.len());
    Ok(RankInfo {
        rank: per_point.iter().copied().max().unwrap_or(0),
        per_point,
        points: rs.points,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    /// `det(sum c_i M^i)` is nonzero for the witness coefficients.
    Nondegenerate {
        witness: Vec<BigRational>,
        /// The determinant as a polynomial in `c1, c2, ...` (Param coordinates).
        determinant: Expr,
    },
    AllDegenerate,
    Undetermined,
}

impl Degeneracy {
    pub fn label(&self) -> &'static str {
        match self {
            Degeneracy::Nondegenerate { .. } => "nondegenerate combination found",
            Degeneracy::AllDegenerate => "all combinations degenerate",
            Degeneracy::Undetermined => "undetermined",
        }
    }
}

/// Look for coefficients `c` with `det(sum c_i M^i)` not identically zero.
/// Unit vectors are tried first, then random ones; after `m*s + 1`
/// vanishing samples the determinant polynomial (of degree at most `m` in
/// `c`) is taken to be zero.
pub fn degeneracy_probe(basis: &[Matrix], seed: u64) -> Degeneracy {
    let s = basis.len();
    if s == 0 {
        return Degeneracy::AllDegenerate;
    }
    let m = basis[0].len();
    let combo: Matrix = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| (0..s).map(|i| &basis[i][a][b] * &Expr::param(i)).sum())
                .collect()
        })
        .collect();
    let det = det_expr(&combo);
    let mut sampler = Sampler::new(seed);
    let mut undetermined = false;
    for t in 0..m * s + 1 {
        let c: Vec<BigRational> = if t < s {
            (0..s)
                .map(|i| if i == t { BigRational::one() } else { BigRational::zero() })
                .collect()
        } else {
            (0..s).map(|_| sampler.rational()).collect()
        };
        let map: BTreeMap<Coordinate, Expr> = c
            .iter()
            .enumerate()
            .map(|(i, v)| (Coordinate::Param(i), Expr::rational(v.clone())))
            .collect();
        match crate::symexpr::is_zero_with(&det.substitute_all(&map), &mut sampler) {
            ZeroTest::NonZero => {
                return Degeneracy::Nondegenerate {
                    witness: c,
                    determinant: det,
                }
            }
            ZeroTest::Indeterminate => undetermined = true,
            ZeroTest::Zero(_) => {}
        }
    }
    if undetermined {
        Degeneracy::Undetermined
    } else {
        Degeneracy::AllDegenerate
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconstruction {
    /// Connection form vanishes; solutions are the constant null vectors.
    Constant,
    /// Polynomial ansatz succeeded at this degree.
    Ansatz { degree: usize },
    /// Dimension known, closed form not found up to the cap.
    NotFound { degree_cap: usize },
    /// Nothing to reconstruct (dimension zero).
    NotNeeded,
}

#[derive(Debug, Clone)]
pub struct MultiplierOptions {
    pub seed: u64,
    pub degree_cap: usize,
    pub reconstruct: bool,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        MultiplierOptions {
            seed: DEFAULT_SEED,
            degree_cap: DEFAULT_DEGREE_CAP,
            reconstruct: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiplierReport {
    pub m: usize,
    pub unknowns: usize,
    /// Stage at which the rank stopped growing.
    pub stage: usize,
    pub rank: usize,
    pub dimension: usize,
    /// Generic rank after each stage, starting with the algebraic rows.
    pub stage_ranks: Vec<usize>,
    pub per_point_ranks: Vec<usize>,
    pub base_point: usize,
    pub sample_points: Vec<Point>,
    /// Null vectors at the base point as symmetric matrices.
    pub pointwise_basis: Vec<Matrix>,
    /// Explicit solutions, when reconstruction succeeded.
    pub basis: Vec<Matrix>,
    pub reconstruction: Reconstruction,
    pub degeneracy: Degeneracy,
    pub warnings: Vec<String>,
    pub seed: u64,
    pub phi: PhiSystem,
}

/// Invariants, rows, stabilization, reconstruction and degeneracy probe.
pub fn analyze(
    sys: &FGordonSystem,
    opts: &MultiplierOptions,
) -> Result<MultiplierReport, MultiplierError> {
    let omega =
        connection_form(sys).map_err(|e| MultiplierError::NotNormalForm(e.0))?;
    let inv = invariants(sys)?;
    let phi = build_phi0(&inv, sys.m())?;
    stabilize(phi, &omega, opts)
}

/// Iterate `augment` until the generic rank stops growing.
pub fn stabilize(
    mut phi: PhiSystem,
    omega: &ConnectionForm,
    opts: &MultiplierOptions,
) -> Result<MultiplierReport, MultiplierError> {
    let m = phi.m;
    let n = unknown_count(m);
    let cap = n + 1;
    let mut rs = RankSampler::new(m, opts.seed, RANK_POINTS);
    let mut stage_rows = Vec::new();
    let mut stage_ranks = Vec::new();
    let mut warnings = Vec::new();

    rs.update(&phi.rows)?;
    stage_rows.push(phi.rows.len());
    stage_ranks.push(max_rank(&rs.ranks(phi.rows.len())));
    let stage = loop {
        let i = phi.stage;
        let r = stage_ranks[i];
        if r == n {
            break i;
        }
        if i >= cap {
            return Err(MultiplierError::NoStabilization(i));
        }
        let added = augment(&mut phi, omega);
        if added == 0 {
            break i;
        }
        let before = rs.points().to_vec();
        rs.update(&phi.rows)?;
        if rs.points() != before.as_slice() {
            // a point was replaced: recompute earlier stages at the new set
            for (k, &len) in stage_rows.iter().enumerate() {
                stage_ranks[k] = max_rank(&rs.ranks(len));
            }
        }
        stage_rows.push(phi.rows.len());
        stage_ranks.push(max_rank(&rs.ranks(phi.rows.len())));
        if stage_ranks[i + 1] == stage_ranks[i] {
            break i;
        }
    };
    let nrows = stage_rows[stage];
    let per_point = rs.ranks(nrows);
    let rank = max_rank(&per_point);
    if per_point.iter().any(|&r| r != rank) {
        warnings.push(format!(
            "rank depends on the point (constant-rank hypothesis fails): per-point ranks {per_point:?}"
        ));
    }
    for w in stage_ranks.windows(2) {
        if w[1] < w[0] {
            warnings.push("rank decreased between stages; internal inconsistency".into());
        }
    }
    let base_point = per_point.iter().position(|&r| r == rank).unwrap_or(0);
    let null = linalg::nullspace(&rs.matrix(base_point, nrows), n);
    let pointwise_basis: Vec<Matrix> = null
        .iter()
        .map(|v| {
            let e: Vec<Expr> = v.iter().map(|q| Expr::rational(q.clone())).collect();
            vector_to_matrix(m, &e)
        })
        .collect();
    let dimension = n - rank;

    // Drop rows beyond the stabilized stage; they add nothing generically.
    phi.rows.truncate(nrows);
    phi.stage = stage;

    let (basis, reconstruction) = if dimension == 0 {
        (Vec::new(), Reconstruction::NotNeeded)
    } else if !opts.reconstruct {
        (Vec::new(), Reconstruction::NotFound { degree_cap: 0 })
    } else {
        reconstruct_solutions(dimension, &pointwise_basis, &phi, omega, opts.degree_cap)
    };
    if matches!(reconstruction, Reconstruction::NotFound { .. }) && opts.reconstruct {
        warnings.push(format!(
            "dimension {dimension} known, closed form not found up to degree {}",
            opts.degree_cap
        ));
    }
    let probe_basis = if basis.len() == dimension {
        &basis
    } else {
        &pointwise_basis
    };
    let degeneracy = degeneracy_probe(probe_basis, opts.seed);
    Ok(MultiplierReport {
        m,
        unknowns: n,
        stage,
        rank,
        dimension,
        stage_ranks: stage_ranks[..=stage].to_vec(),
        per_point_ranks: per_point,
        base_point,
        sample_points: rs.points().to_vec(),
        pointwise_basis,
        basis,
        reconstruction,
        degeneracy,
        warnings,
        seed: opts.seed,
        phi,
    })
}

fn max_rank(r: &[usize]) -> usize {
    r.iter().copied().max().unwrap_or(0)
}

/// True if `M` annihilates every row and satisfies
/// `dM_ab = M_as Omega^s_b + M_bs Omega^s_a` in every base direction.
pub fn satisfies_conditions(mat: &Matrix, phi: &PhiSystem, omega: &ConnectionForm) -> bool {
    let m = phi.m;
    let v: Vec<Expr> = unknown_pairs(m)
        .into_iter()
        .map(|(a, b)| mat[a][b].clone())
        .collect();
    for r in &phi.rows {
        let s: Expr = r.coeffs.iter().zip(&v).map(|(c, x)| c * x).sum();
        if !is_zero(&s).is_zero() {
            return false;
        }
    }
    differential_residuals(mat, omega)
        .iter()
        .all(|e| is_zero(e).is_zero())
}

/// Components of `dM_ab - M_as Omega^s_b - M_bs Omega^s_a` for every base
/// direction and `a <= b`.
pub fn differential_residuals(mat: &Matrix, omega: &ConnectionForm) -> Vec<Expr> {
    let m = omega.m();
    let mut out = Vec::new();
    for d in Coordinate::base(m) {
        let comp = omega.component(&d);
        for (a, b) in unknown_pairs(m) {
            let mut r = mat[a][b].partial(&d);
            for s in 0..m {
                r -= &(&mat[a][s] * &comp[s][b]);
                r -= &(&mat[b][s] * &comp[s][a]);
            }
            out.push(r);
        }
    }
    out
}

/// Monomials of degree <= `deg` in the given atoms.
pub(crate) fn monomials(atoms: &[Expr], deg: usize) -> Vec<Expr> {
    let mut out = vec![Expr::one()];
    let mut last = vec![(Expr::one(), 0usize)];
    for _ in 0..deg {
        let mut next = Vec::new();
        for (mono, start) in &last {
            for (k, a) in atoms.iter().enumerate().skip(*start) {
                next.push((mono * a, k));
            }
        }
        out.extend(next.iter().map(|(e, _)| e.clone()));
        last = next;
    }
    out
}

/// Ansatz atoms: x, y, u and the opaque functions of the given expressions.
pub(crate) fn ansatz_atoms<'a>(m: usize, exprs: impl IntoIterator<Item = &'a Expr>) -> Vec<Expr> {
    let mut atoms: Vec<Expr> = Coordinate::base(m).into_iter().map(Expr::coord).collect();
    let mut funcs = BTreeSet::new();
    for e in exprs {
        funcs.extend(e.function_atoms());
    }
    atoms.extend(funcs);
    atoms
}

/// Explicit multipliers: constant null vectors when the connection form
/// vanishes, otherwise a polynomial ansatz of increasing degree solved
/// exactly against the rows and the differential condition.
pub fn reconstruct_solutions(
    dimension: usize,
    pointwise: &[Matrix],
    phi: &PhiSystem,
    omega: &ConnectionForm,
    degree_cap: usize,
) -> (Vec<Matrix>, Reconstruction) {
    if omega.is_zero() && pointwise.iter().all(|b| satisfies_conditions(b, phi, omega)) {
        return (pointwise.to_vec(), Reconstruction::Constant);
    }
    let m = phi.m;
    let n = unknown_count(m);
    let sources: Vec<Expr> = omega
        .dx
        .iter()
        .chain(&omega.dy)
        .chain(omega.du.iter().flatten())
        .flatten()
        .chain(phi.rows.iter().flat_map(|r| r.coeffs.iter()))
        .cloned()
        .collect();
    let atoms = ansatz_atoms(m, &sources);
    for degree in 0..=degree_cap {
        let monos = monomials(&atoms, degree);
        let nm = monos.len();
        // unknown (pair k, monomial j) -> Param(k * nm + j)
        let v: Vec<Expr> = (0..n)
            .map(|k| {
                monos
                    .iter()
                    .enumerate()
                    .map(|(j, mono)| mono * &Expr::param(k * nm + j))
                    .sum()
            })
            .collect();
        let mat = vector_to_matrix(m, &v);
        let mut solver = SparseSolver::new(n * nm);
        let mut ok = true;
        let mut identities: Vec<Expr> = phi
            .rows
            .iter()
            .map(|r| r.coeffs.iter().zip(&v).map(|(c, x)| c * x).sum())
            .collect();
        identities.extend(differential_residuals(&mat, omega));
        for e in &identities {
            match param_equations(e) {
                Some(eqs) => eqs.into_iter().for_each(|q| solver.add(q)),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let AffineSolution::Solved { kernel, .. } = solver.solve() else {
            continue;
        };
        if kernel.len() < dimension {
            continue;
        }
        let sols: Vec<Matrix> = kernel
            .iter()
            .map(|kv| {
                let vals: Vec<Expr> = (0..n)
                    .map(|k| {
                        monos
                            .iter()
                            .enumerate()
                            .map(|(j, mono)| mono.scale(&kv[k * nm + j]))
                            .sum()
                    })
                    .collect();
                vector_to_matrix(m, &vals)
            })
            .collect();
        if sols.iter().all(|s| satisfies_conditions(s, phi, omega)) {
            return (sols, Reconstruction::Ansatz { degree });
        }
    }
    (Vec::new(), Reconstruction::NotFound { degree_cap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::VarNames;

    fn system(f: &[&str]) -> FGordonSystem {
        FGordonSystem::parse(VarNames::new(&["u", "v"]).unwrap(), f).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn index_order() {
        assert_eq!(unknown_pairs(3), vec![(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        for (k, (a, b)) in unknown_pairs(4).into_iter().enumerate() {
            assert_eq!(unknown_index(4, a, b), k);
            assert_eq!(unknown_index(4, b, a), k);
        }
        assert_eq!(unknown_labels(2), vec!["M11", "M12", "M22"]);
    }

    #[test]
    fn linear_example_rows() {
        let sys = system(&["v", "u"]);
        let inv = invariants(&sys).unwrap();
        let phi = build_phi0(&inv, 2).unwrap();
        assert_eq!(phi.rows().len(), 1);
        assert_eq!(phi.rows()[0].coeffs, vec![Expr::one(), Expr::zero(), Expr::int(-1)]);
    }

    #[test]
    fn linear_example_report() {
        let r = analyze(&system(&["v", "u"]), &MultiplierOptions::default()).unwrap();
        assert_eq!(r.dimension, 2);
        assert_eq!(r.reconstruction, Reconstruction::Constant);
        let Degeneracy::Nondegenerate { witness, .. } = &r.degeneracy else {
            panic!()
        };
        assert_eq!(witness, &vec![q(1), q(0)]);
    }

    #[test]
    fn wave_is_maximal() {
        let r = analyze(&system(&["0", "0"]), &MultiplierOptions::default()).unwrap();
        assert_eq!(r.phi.rows().len(), 0);
        assert_eq!(r.dimension, 3);
        assert_eq!(r.stage, 0);
    }

    #[test]
    fn probe_verdicts() {
        let e = |v: i64| Expr::int(v);
        let rank_one = vec![vec![vec![e(1), e(0)], vec![e(0), e(0)]]];
        assert_eq!(degeneracy_probe(&rank_one, 1), Degeneracy::AllDegenerate);
        let swap = vec![vec![vec![e(0), e(1)], vec![e(1), e(0)]]];
        let Degeneracy::Nondegenerate { determinant, .. } = degeneracy_probe(&swap, 1) else {
            panic!()
        };
        assert_eq!(determinant, -Expr::param(0).pow(2));
        assert_eq!(degeneracy_probe(&[], 1), Degeneracy::AllDegenerate);
    }

    #[test]
    fn monomial_counts() {
        let atoms = vec![Expr::x(), Expr::y(), Expr::u(0)];
        assert_eq!(monomials(&atoms, 0).len(), 1);
        assert_eq!(monomials(&atoms, 2).len(), 10);
    }
}
