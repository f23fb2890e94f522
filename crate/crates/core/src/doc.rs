//! JSON input documents and report builders.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::classify2d::Verdict;
use crate::jetgeom::{
    connection_form, invariants, FGordonSystem, InvariantError, Matrix, NormalForm, SystemError,
};
use crate::liealgebra::{LieError, StructureConstants};
use crate::linalg::QMatrix;
use crate::multspace::{
    build_phi0, unknown_labels, unknown_pairs, Degeneracy, MultiplierError, MultiplierReport,
    PhiSystem, Reconstruction, RowOrigin,
};
use crate::symexpr::{parse, Coordinate, Expr, ParseError, Point, VarNames};
use crate::varlagrange::{Lagrangian, StructuredLagrangian, Verification};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("{0}")]
    Shape(String),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("invalid rational {0:?}")]
    Rational(String),
}

/// A matrix or vector entry: an integer or an expression string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn expr(&self, names: &VarNames, field: &str) -> Result<Expr, DocError> {
        parse(&self.text(), names).map_err(|source| DocError::Parse {
            field: field.to_string(),
            source,
        })
    }

    fn rational(&self) -> Result<BigRational, DocError> {
        match self {
            Cell::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            Cell::Text(s) => BigRational::from_str(s.trim())
                .map_err(|_| DocError::Rational(s.clone())),
        }
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormDoc {
    #[serde(rename = "C", alias = "c")]
    pub c: Vec<Vec<Vec<Cell>>>,
    #[serde(rename = "A", alias = "a")]
    pub a: Vec<Vec<Cell>>,
    #[serde(rename = "B", alias = "b")]
    pub b: Vec<Vec<Cell>>,
    #[serde(rename = "E", alias = "e")]
    pub e: Vec<Cell>,
}

/// `{"m": 2, "dependent": ["u", "v"], "f": ["v", "u"]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dependent: Option<Vec<String>>,
    pub f: Vec<Cell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<NormalFormDoc>,
}

impl SystemDoc {
    pub fn names(&self) -> Result<VarNames, DocError> {
        match &self.dependent {
            None => Ok(VarNames::indexed(self.m)),
            Some(d) if d.len() != self.m => Err(DocError::Shape(format!(
                "dependent lists {} names but m = {}",
                d.len(),
                self.m
            ))),
            Some(d) => VarNames::new(d).map_err(DocError::Shape),
        }
    }

    pub fn to_system(&self) -> Result<FGordonSystem, DocError> {
        if self.m == 0 {
            return Err(DocError::Shape("m must be positive".into()));
        }
        let names = self.names()?;
        let f = self
            .f
            .iter()
            .enumerate()
            .map(|(i, c)| c.expr(&names, &format!("f[{}]", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        let sys = FGordonSystem::new(names.clone(), f)?;
        match &self.normal_form {
            None => Ok(sys),
            Some(nf) => {
                let m = self.m;
                let bad = || DocError::Shape(format!("normal_form blocks must be sized for m = {m}"));
                let mat = |rows: &[Vec<Cell>], tag: &str| -> Result<Matrix, DocError> {
                    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
                        return Err(bad());
                    }
                    rows.iter()
                        .enumerate()
                        .map(|(i, r)| {
                            r.iter()
                                .enumerate()
                                .map(|(j, c)| c.expr(&names, &format!("{tag}[{}][{}]", i + 1, j + 1)))
                                .collect()
                        })
                        .collect()
                };
                if nf.c.len() != m || nf.e.len() != m {
                    return Err(bad());
                }
                let c = nf
                    .c
                    .iter()
                    .enumerate()
                    .map(|(i, block)| mat(block, &format!("C[{}]", i + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                let e = nf
                    .e
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.expr(&names, &format!("E[{}]", i + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                let nf = NormalForm {
                    c,
                    a: mat(&nf.a, "A")?,
                    b: mat(&nf.b, "B")?,
                    e,
                };
                Ok(sys.with_normal_form(nf)?)
            }
        }
    }

    pub fn from_system(sys: &FGordonSystem) -> Self {
        let names = sys.names();
        SystemDoc {
            m: sys.m(),
            dependent: Some(names.dependent().to_vec()),
            f: sys
                .f()
                .iter()
                .map(|e| Cell::Text(e.display_with(names)))
                .collect(),
            normal_form: None,
        }
    }
}

/// A Lagrangian as an expression string, `{"L": ...}`, or structured
/// `{"R": [[..]], "Q": [..], "P": [..], "N": ..}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LagrangianDoc {
    Text(String),
    Structured {
        #[serde(rename = "R")]
        r: Vec<Vec<Cell>>,
        #[serde(rename = "Q")]
        q: Vec<Cell>,
        #[serde(rename = "P")]
        p: Vec<Cell>,
        #[serde(rename = "N")]
        n: Cell,
    },
    Wrapped {
        #[serde(rename = "L", alias = "lagrangian")]
        l: String,
    },
}

impl LagrangianDoc {
    pub fn to_lagrangian(&self, names: &VarNames) -> Result<Lagrangian, DocError> {
        let parse_l = |s: &str| {
            parse(s, names).map_err(|source| DocError::Parse {
                field: "L".into(),
                source,
            })
        };
        match self {
            LagrangianDoc::Text(s) | LagrangianDoc::Wrapped { l: s } => {
                Ok(Lagrangian::Free(parse_l(s)?))
            }
            LagrangianDoc::Structured { r, q, p, n } => {
                let m = names.m();
                if r.len() != m || r.iter().any(|row| row.len() != m) || q.len() != m || p.len() != m {
                    return Err(DocError::Shape(format!("structured Lagrangian must be sized for m = {m}")));
                }
                let vec = |v: &[Cell], tag: &str| {
                    v.iter()
                        .enumerate()
                        .map(|(i, c)| c.expr(names, &format!("{tag}[{}]", i + 1)))
                        .collect::<Result<Vec<_>, _>>()
                };
                let r = r
                    .iter()
                    .enumerate()
                    .map(|(i, row)| vec(row, &format!("R[{}]", i + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Lagrangian::Structured(StructuredLagrangian {
                    r,
                    q: vec(q, "Q")?,
                    p: vec(p, "P")?,
                    n: n.expr(names, "N")?,
                }))
            }
        }
    }
}

/// A matrix of expressions, bare or as `{"M": [[..]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MultiplierDoc {
    Bare(Vec<Vec<Cell>>),
    Wrapped {
        #[serde(rename = "M", alias = "multiplier")]
        m: Vec<Vec<Cell>>,
    },
}

impl MultiplierDoc {
    pub fn rows(&self) -> &[Vec<Cell>] {
        match self {
            MultiplierDoc::Bare(r) | MultiplierDoc::Wrapped { m: r } => r,
        }
    }

    pub fn to_matrix(&self, names: &VarNames) -> Result<Matrix, DocError> {
        let rows = self.rows();
        let m = names.m();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(DocError::Shape(format!("multiplier must be {m} x {m}")));
        }
        rows.iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, c)| c.expr(names, &format!("M[{}][{}]", i + 1, j + 1)))
                    .collect()
            })
            .collect()
    }

    pub fn to_qmatrix(&self) -> Result<QMatrix, DocError> {
        self.rows()
            .iter()
            .map(|r| r.iter().map(Cell::rational).collect())
            .collect()
    }
}

/// Bracket `[e_i, e_j] = sum_k coeffs[k] e_k`, indices 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketDoc {
    pub i: usize,
    pub j: usize,
    pub coeffs: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub m: usize,
    #[serde(default)]
    pub brackets: Vec<BracketDoc>,
}

impl StructureDoc {
    pub fn to_constants(&self) -> Result<StructureConstants, DocError> {
        let brackets = self
            .brackets
            .iter()
            .map(|b| {
                if b.i == 0 || b.j == 0 {
                    return Err(DocError::Shape("bracket indices are 1-based".into()));
                }
                let c = b.coeffs.iter().map(Cell::rational).collect::<Result<Vec<_>, _>>()?;
                Ok((b.i - 1, b.j - 1, c))
            })
            .collect::<Result<Vec<_>, DocError>>()?;
        Ok(StructureConstants::from_brackets(self.m, &brackets)?)
    }
}

pub fn rational_str(q: &BigRational) -> String {
    q.to_string()
}

pub fn expr_json(e: &Expr, names: &VarNames) -> Value {
    Value::String(e.display_with(names))
}

pub fn vector_json(v: &[Expr], names: &VarNames) -> Value {
    Value::Array(v.iter().map(|e| expr_json(e, names)).collect())
}

pub fn matrix_json(mat: &[Vec<Expr>], names: &VarNames) -> Value {
    Value::Array(mat.iter().map(|r| vector_json(r, names)).collect())
}

pub fn qmatrix_json(mat: &QMatrix) -> Value {
    Value::Array(
        mat.iter()
            .map(|r| Value::Array(r.iter().map(|v| Value::String(rational_str(v))).collect()))
            .collect(),
    )
}

pub fn point_json(p: &Point, names: &VarNames) -> Value {
    let mut map = Map::new();
    for (c, v) in p {
        map.insert(names.name(c), Value::String(rational_str(v)));
    }
    Value::Object(map)
}

pub fn system_json(sys: &FGordonSystem) -> Value {
    serde_json::to_value(SystemDoc::from_system(sys)).expect("plain data")
}

fn unknown_names(names: &VarNames) -> VarNames {
    names.clone().with_params(unknown_labels(names.m()))
}

fn origin_json(o: &RowOrigin, names: &VarNames) -> Value {
    match o {
        RowOrigin::HK { alpha, beta, monomial } => json!({
            "kind": "HK",
            "alpha": alpha,
            "beta": beta,
            "monomial": monomial.to_expr().display_with(names),
        }),
        RowOrigin::S { alpha, beta, gamma } => json!({
            "kind": "S",
            "alpha": alpha,
            "beta": beta,
            "gamma": gamma,
        }),
        RowOrigin::Derived { parent, direction } => json!({
            "kind": "derived",
            "parent": parent,
            "direction": names.name(direction),
        }),
    }
}

pub fn phi_json(phi: &PhiSystem, names: &VarNames) -> Value {
    let un = unknown_names(names);
    Value::Array(
        phi.rows()
            .iter()
            .enumerate()
            .map(|(i, row)| {
                json!({
                    "index": i,
                    "stage": row.stage,
                    "condition": format!("{} = 0", phi.row_form(i).display_with(&un)),
                    "origin": origin_json(&row.origin, names),
                })
            })
            .collect(),
    )
}

fn wrap(s: String) -> String {
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

/// `dM_ab = (M_as W^s_b + M_bs W^s_a)` per direction, rendered.
fn differential_conditions(sys: &FGordonSystem) -> Option<Vec<String>> {
    let omega = connection_form(sys).ok()?;
    let m = sys.m();
    let names = sys.names();
    let un = unknown_names(names);
    let mm = |a: usize, b: usize| Expr::param(crate::multspace::unknown_index(m, a, b));
    let mut dirs: Vec<Coordinate> = vec![Coordinate::X, Coordinate::Y];
    dirs.extend((0..m).map(Coordinate::U));
    let labels = unknown_labels(m);
    Some(
        unknown_pairs(m)
            .into_iter()
            .zip(labels)
            .map(|((a, b), label)| {
                let terms: Vec<String> = dirs
                    .iter()
                    .filter_map(|d| {
                        let w = omega.component(d);
                        let c: Expr = (0..m)
                            .map(|s| mm(a, s) * w[s][b].clone() + mm(b, s) * w[s][a].clone())
                            .sum();
                        (!c.is_zero())
                            .then(|| format!("{} d{}", wrap(c.display_with(&un)), names.name(d)))
                    })
                    .collect();
                let rhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
                format!("d{label} = {rhs}")
            })
            .collect(),
    )
}

pub fn invariants_report(sys: &FGordonSystem) -> Result<Value, InvariantError> {
    let names = sys.names();
    let mut out = Map::new();
    out.insert("system".into(), system_json(sys));
    match sys.normal_form() {
        Err(r) => {
            out.insert("normal_form".into(), Value::Null);
            out.insert("refusal".into(), Value::String(r.to_string()));
            return Ok(Value::Object(out));
        }
        Ok(nf) => {
            out.insert(
                "normal_form".into(),
                json!({
                    "C": nf.c.iter().map(|b| matrix_json(b, names)).collect::<Vec<_>>(),
                    "A": matrix_json(&nf.a, names),
                    "B": matrix_json(&nf.b, names),
                    "E": vector_json(&nf.e, names),
                }),
            );
        }
    }
    let inv = invariants(sys)?;
    out.insert("H".into(), matrix_json(&inv.h, names));
    out.insert("K".into(), matrix_json(&inv.k, names));
    out.insert(
        "S".into(),
        Value::Array(inv.s.iter().map(|b| matrix_json(b, names)).collect()),
    );
    out.insert("S_zero".into(), Value::Bool(inv.s_is_zero()));
    if let Ok(omega) = connection_form(sys) {
        out.insert(
            "connection".into(),
            json!({
                "dx": matrix_json(&omega.dx, names),
                "dy": matrix_json(&omega.dy, names),
                "du": omega.du.iter().map(|b| matrix_json(b, names)).collect::<Vec<_>>(),
            }),
        );
    }
    let algebraic = match build_phi0(&inv, sys.m()) {
        Ok(phi) => phi_json(&phi, names),
        Err(e) => Value::String(e.to_string()),
    };
    out.insert(
        "conditions".into(),
        json!({
            "unknowns": unknown_labels(sys.m()),
            "algebraic": algebraic,
            "differential": differential_conditions(sys),
        }),
    );
    Ok(Value::Object(out))
}

pub fn degeneracy_json(d: &Degeneracy, m: usize) -> Value {
    match d {
        Degeneracy::Nondegenerate { witness, determinant } => {
            let names = VarNames::indexed(m)
                .with_params((1..=witness.len()).map(|i| format!("c{i}")));
            json!({
                "verdict": "nondegenerate",
                "witness": witness.iter().map(rational_str).collect::<Vec<_>>(),
                "determinant": determinant.display_with(&names),
            })
        }
        Degeneracy::AllDegenerate => json!({"verdict": "degenerate"}),
        Degeneracy::Undetermined => json!({"verdict": "undetermined"}),
    }
}

pub fn reconstruction_json(r: &Reconstruction) -> Value {
    match r {
        Reconstruction::Constant => json!({"method": "constant"}),
        Reconstruction::Ansatz { degree } => json!({"method": "ansatz", "degree": degree}),
        Reconstruction::NotFound { degree_cap } => {
            json!({"method": "not_found", "degree_cap": degree_cap})
        }
        Reconstruction::NotNeeded => json!({"method": "not_needed"}),
    }
}

pub fn multiplier_report_json(
    r: &MultiplierReport,
    sys: &FGordonSystem,
    degree_cap: usize,
) -> Value {
    let names = sys.names();
    json!({
        "system": system_json(sys),
        "dimension": r.dimension,
        "rank": r.rank,
        "stage": r.stage,
        "unknowns": unknown_labels(r.m),
        "stage_ranks": r.stage_ranks,
        "per_point_ranks": r.per_point_ranks,
        "base_point": r.base_point,
        "basis": r.basis.iter().map(|b| matrix_json(b, names)).collect::<Vec<_>>(),
        "pointwise_basis": r.pointwise_basis.iter().map(|b| matrix_json(b, names)).collect::<Vec<_>>(),
        "reconstruction": reconstruction_json(&r.reconstruction),
        "degeneracy": degeneracy_json(&r.degeneracy, r.m),
        "warnings": r.warnings,
        "seed": r.seed,
        "degree_cap": degree_cap,
        "sample_points": r.sample_points.iter().map(|p| point_json(p, names)).collect::<Vec<_>>(),
        "rows": phi_json(&r.phi, names),
    })
}

pub fn multiplier_error_json(e: &MultiplierError, sys: &FGordonSystem, seed: u64, degree_cap: usize) -> Value {
    json!({
        "system": system_json(sys),
        "dimension": if matches!(e, MultiplierError::NotNormalForm(_)) { Some(0) } else { None },
        "error": e.to_string(),
        "seed": seed,
        "degree_cap": degree_cap,
    })
}

pub fn verdict_json(v: &Verdict, names: &VarNames) -> Value {
    json!({
        "label": v.label.name(),
        "subtype": v.label.subtype().map(|s| s.label()),
        "verdict": v.label.to_string(),
        "rank_A": v.rank_a,
        "H_minus_K": v.h_minus_k.as_ref().map(|m| matrix_json(m, names)),
        "S_trace": v.s_trace.as_ref().map(|t| vector_json(t, names)),
        "lambda": v.lambda.as_ref().map(|e| e.display_with(names)),
        "g_form": v.g_form,
        "reduced_dimension": v.reduced_dimension,
        "reduced_basis": v.reduced_basis.iter().map(qmatrix_json).collect::<Vec<_>>(),
        "pencil": v.pencil.as_ref().map(|p| p.iter().map(rational_str).collect::<Vec<_>>()),
        "multiplier_dimension": v.multiplier_dimension,
        "notes": v.notes,
    })
}

pub fn verification_json(v: &Verification, names: &VarNames) -> Value {
    json!({
        "holds": v.holds,
        "residuals": v.residuals.iter().map(|(a, e)| json!({
            "equation": a,
            "residual": e.display_with(names),
        })).collect::<Vec<_>>(),
    })
}

pub fn structured_json(l: &StructuredLagrangian, names: &VarNames) -> Value {
    json!({
        "L": l.to_expr().display_with(names),
        "R": matrix_json(&l.r, names),
        "Q": vector_json(&l.q, names),
        "P": vector_json(&l.p, names),
        "N": l.n.display_with(names),
    })
}

pub fn lagrangian_json(l: &Lagrangian, names: &VarNames) -> Value {
    match l {
        Lagrangian::Free(e) => json!({"L": e.display_with(names)}),
        Lagrangian::Structured(s) => structured_json(s, names),
    }
}

pub fn structure_json(sc: &StructureConstants) -> Value {
    let m = sc.m();
    let mut brackets = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let coeffs: Vec<&BigRational> = (0..m).map(|a| sc.get(a, i, j)).collect();
            if coeffs.iter().any(|c| !num_traits::Zero::is_zero(*c)) {
                brackets.push(json!({
                    "i": i + 1,
                    "j": j + 1,
                    "coeffs": coeffs.into_iter().map(rational_str).collect::<Vec<_>>(),
                }));
            }
        }
    }
    json!({"m": m, "brackets": brackets})
}
