//! Golden cases with recorded expectations, and the runner that checks
//! them against the live pipeline.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::classify2d::classify_with;
use crate::doc::{DocError, LagrangianDoc, MultiplierDoc, StructureDoc, SystemDoc};
use crate::jetgeom::{connection_form, invariants, FGordonSystem, Matrix};
use crate::liealgebra::{
    biinvariant_forms, is_biinvariant, killing_form, lie_lagrangian, lie_system, to_expr_matrix,
    StructureConstants,
};
use crate::linalg::rank;
use crate::multspace::{
    analyze, build_phi0, satisfies_conditions, Degeneracy, MultiplierOptions, MultiplierReport,
    DEFAULT_DEGREE_CAP,
};
use crate::symexpr::{Coordinate, Evaluator, Sampler, DEFAULT_SEED};
use crate::varlagrange::{construct_lagrangian, verify_multiplier};

const BUNDLED: &str = include_str!("../corpus/corpus.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagrangianCheck {
    #[serde(rename = "L")]
    pub lagrangian: LagrangianDoc,
    #[serde(rename = "M")]
    pub multiplier: MultiplierDoc,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// "nondegenerate", "degenerate" or "undetermined".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classify: Option<String>,
    /// Multipliers that must lie in the solution space.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub basis: Vec<MultiplierDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lagrangians: Vec<LagrangianCheck>,
    /// Multipliers for which a Lagrangian must be constructible.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub construct: Vec<MultiplierDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub biinvariant_dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub biinvariant_contains: Vec<MultiplierDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie_lagrangian: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lie: Option<StructureDoc>,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub cases: Vec<Case>,
}

impl Corpus {
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED).expect("bundled corpus is valid")
    }

    pub fn from_json(s: &str) -> Result<Self, DocError> {
        let c: Corpus = serde_json::from_str(s)?;
        if c.cases.is_empty() {
            return Err(DocError::Shape("corpus has no cases".into()));
        }
        for case in &c.cases {
            if case.system.is_some() == case.lie.is_some() {
                return Err(DocError::Shape(format!(
                    "case {}: exactly one of \"system\" and \"lie\" is required",
                    case.name
                )));
            }
        }
        Ok(c)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseResult {
    pub name: String,
    pub checks: usize,
    pub failures: Vec<String>,
    pub observed: Value,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Checker {
    checks: usize,
    failures: Vec<String>,
}

impl Checker {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, what: &str, want: &T, got: &T) {
        self.check(want == got, || format!("{what}: expected {want:?}, got {got:?}"));
    }
}

fn degeneracy_name(d: &Degeneracy) -> &'static str {
    match d {
        Degeneracy::Nondegenerate { .. } => "nondegenerate",
        Degeneracy::AllDegenerate => "degenerate",
        Degeneracy::Undetermined => "undetermined",
    }
}

/// Whether `mat` lies in the pointwise span of `basis` at a few random
/// points of (x, y, u).
fn in_pointwise_span(mat: &Matrix, basis: &[Matrix], m: usize, seed: u64) -> bool {
    let coords = Coordinate::base(m);
    let mut sampler = Sampler::new(seed ^ 0x5a5a);
    let flat = |b: &Matrix| b.iter().flatten().cloned().collect::<Vec<_>>();
    let mut rows: Vec<Vec<crate::symexpr::Expr>> = basis.iter().map(flat).collect();
    let base = rows.len();
    rows.push(flat(mat));
    let mut good = 0;
    for _ in 0..12 {
        let p = sampler.point(&coords);
        let mut ev = Evaluator::new(&p);
        let vals: Option<Vec<Vec<_>>> = rows
            .iter()
            .map(|r| r.iter().map(|e| ev.eval(e).ok().map(|v| v.value)).collect())
            .collect();
        let Some(vals) = vals else { continue };
        if rank(&vals) > rank(&vals[..base].to_vec()) {
            return false;
        }
        good += 1;
        if good == 3 {
            return true;
        }
    }
    false
}

fn check_system(
    c: &mut Checker,
    sys: &FGordonSystem,
    expect: &Expect,
    seed: u64,
) -> Result<Value, String> {
    let names = sys.names().clone();
    let opts = MultiplierOptions {
        seed,
        ..MultiplierOptions::default()
    };
    let report: Option<MultiplierReport> = match analyze(sys, &opts) {
        Ok(r) => Some(r),
        Err(e) => {
            if expect.dimension.is_some() {
                c.check(false, || format!("multiplier analysis failed: {e}"));
            }
            None
        }
    };
    let mut observed = json!({});
    if let Some(r) = &report {
        observed["dimension"] = json!(r.dimension);
        observed["stage"] = json!(r.stage);
        observed["rank"] = json!(r.rank);
        observed["degeneracy"] = json!(degeneracy_name(&r.degeneracy));
        if let Some(d) = expect.dimension {
            c.eq("dimension", &d, &r.dimension);
        }
        if let Some(s) = expect.stage {
            c.eq("stage", &s, &r.stage);
        }
        if let Some(k) = expect.rank {
            c.eq("rank", &k, &r.rank);
        }
        if let Some(d) = &expect.degeneracy {
            c.eq("degeneracy", &d.as_str(), &degeneracy_name(&r.degeneracy));
        }
        if !expect.basis.is_empty() {
            c.eq("basis size", &expect.basis.len(), &r.basis.len());
            let omega = connection_form(sys).map_err(|e| e.0.to_string())?;
            let phi = build_phi0(&invariants(sys).map_err(|e| e.to_string())?, sys.m())
                .map_err(|e| e.to_string())?;
            for (i, doc) in expect.basis.iter().enumerate() {
                let mat = doc.to_matrix(&names).map_err(|e| e.to_string())?;
                c.check(satisfies_conditions(&mat, &phi, &omega), || {
                    format!("basis[{i}] fails the multiplier conditions")
                });
                c.check(in_pointwise_span(&mat, &r.basis, sys.m(), seed), || {
                    format!("basis[{i}] is not in the span of the reconstructed basis")
                });
            }
        }
    }
    if let Some(want) = &expect.classify {
        match classify_with(sys, seed) {
            Ok(v) => {
                let got = v.label.to_string();
                observed["classify"] = json!(got);
                c.eq("classify", want, &got);
                if let Some(r) = &report {
                    if v.label.count() >= 2 {
                        c.eq("classify count vs dimension", &v.label.count(), &r.dimension);
                    }
                }
            }
            Err(e) => c.check(false, || format!("classify failed: {e}")),
        }
    }
    for (i, lc) in expect.lagrangians.iter().enumerate() {
        let l = lc.lagrangian.to_lagrangian(&names).map_err(|e| e.to_string())?;
        let mat = lc.multiplier.to_matrix(&names).map_err(|e| e.to_string())?;
        match verify_multiplier(&l, &mat, sys) {
            Ok(v) => c.check(v.holds, || {
                format!(
                    "lagrangians[{i}] fails the multiplier identity: {}",
                    v.residuals
                        .iter()
                        .map(|(a, e)| format!("E{a}: {}", e.display_with(&names)))
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            }),
            Err(e) => c.check(false, || format!("lagrangians[{i}]: {e}")),
        }
    }
    for (i, doc) in expect.construct.iter().enumerate() {
        let mat = doc.to_matrix(&names).map_err(|e| e.to_string())?;
        match construct_lagrangian(&mat, sys, DEFAULT_DEGREE_CAP) {
            Ok(l) => {
                observed[format!("constructed_{i}")] = json!(l.to_expr().display_with(&names));
                c.check(true, String::new);
            }
            Err(e) => c.check(false, || format!("construct[{i}]: {e}")),
        }
    }
    Ok(observed)
}

fn check_lie(c: &mut Checker, sc: &StructureConstants, expect: &Expect, seed: u64) -> Result<Value, String> {
    let forms = biinvariant_forms(sc);
    let mut observed = json!({"biinvariant_dimension": forms.len()});
    if let Some(d) = expect.biinvariant_dimension {
        c.eq("biinvariant dimension", &d, &forms.len());
    }
    for (i, doc) in expect.biinvariant_contains.iter().enumerate() {
        let mat = doc.to_qmatrix().map_err(|e| e.to_string())?;
        c.check(is_biinvariant(sc, &mat), || format!("biinvariant_contains[{i}] is not bi-invariant"));
    }
    if expect.lie_lagrangian == Some(true) {
        let sys = lie_system(sc);
        let k = killing_form(sc);
        let mut candidates = forms.clone();
        if k.iter().flatten().any(|v| !num_traits::Zero::is_zero(v)) {
            candidates.push(k);
        }
        for (i, mat) in candidates.iter().enumerate() {
            let l = lie_lagrangian(mat, sc).map_err(|e| e.to_string())?;
            let ok = verify_multiplier(&l, &to_expr_matrix(mat), &sys)
                .map(|v| v.holds)
                .unwrap_or(false);
            c.check(ok, || format!("lie_lagrangian for form {i} fails verification"));
        }
    }
    let sys = lie_system(sc);
    let inner = Expect {
        biinvariant_dimension: None,
        biinvariant_contains: Vec::new(),
        lie_lagrangian: None,
        ..expect.clone()
    };
    let o = check_system(c, &sys, &inner, seed)?;
    if let Value::Object(map) = o {
        for (k, v) in map {
            observed[k] = v;
        }
    }
    Ok(observed)
}

pub fn run_case(case: &Case, seed: u64) -> CaseResult {
    let mut c = Checker {
        checks: 0,
        failures: Vec::new(),
    };
    let observed = if let Some(doc) = &case.system {
        doc.to_system()
            .map_err(|e| e.to_string())
            .and_then(|sys| check_system(&mut c, &sys, &case.expect, seed))
    } else if let Some(doc) = &case.lie {
        doc.to_constants()
            .map_err(|e| e.to_string())
            .and_then(|sc| check_lie(&mut c, &sc, &case.expect, seed))
    } else {
        Err("case has neither a system nor a Lie algebra".to_string())
    };
    let observed = match observed {
        Ok(v) => v,
        Err(e) => {
            c.failures.push(format!("input error: {e}"));
            Value::Null
        }
    };
    CaseResult {
        name: case.name.clone(),
        checks: c.checks,
        failures: c.failures,
        observed,
    }
}

/// Cases run on separate threads; results come back in corpus order.
pub fn run(corpus: &Corpus) -> Vec<CaseResult> {
    let seed = corpus.seed();
    std::thread::scope(|s| {
        let handles: Vec<_> = corpus
            .cases
            .iter()
            .map(|case| s.spawn(move || run_case(case, seed)))
            .collect();
        handles
            .into_iter()
            .zip(&corpus.cases)
            .map(|(h, case)| {
                h.join().unwrap_or_else(|_| CaseResult {
                    name: case.name.clone(),
                    checks: 1,
                    failures: vec!["internal panic".into()],
                    observed: Value::Null,
                })
            })
            .collect()
    })
}

pub fn report_json(results: &[CaseResult], seed: u64) -> Value {
    let failed = results.iter().filter(|r| !r.passed()).count();
    json!({
        "seed": seed,
        "degree_cap": DEFAULT_DEGREE_CAP,
        "passed": results.len() - failed,
        "failed": failed,
        "cases": results.iter().map(|r| json!({
            "name": r.name,
            "passed": r.passed(),
            "checks": r.checks,
            "failures": r.failures,
            "observed": r.observed,
        })).collect::<Vec<_>>(),
    })
}

pub fn summary_table(results: &[CaseResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<width$}  {:>6}  result\n", "case", "checks");
    for r in results {
        out.push_str(&format!(
            "{:<width$}  {:>6}  {}\n",
            r.name,
            r.checks,
            if r.passed() { "pass" } else { "FAIL" }
        ));
        for f in &r.failures {
            out.push_str(&format!("    - {f}\n"));
        }
    }
    let failed = results.iter().filter(|r| !r.passed()).count();
    out.push_str(&format!("{} passed, {} failed\n", results.len() - failed, failed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_passes() {
        let corpus = Corpus::bundled();
        let results = run(&corpus);
        assert!(results.iter().all(|r| r.passed()), "{}", summary_table(&results));
    }

    #[test]
    fn rejects_empty() {
        assert!(Corpus::from_json(r#"{"cases": []}"#).is_err());
        assert!(Corpus::from_json("").is_err());
    }
}
