//! The `varmult` command line: JSON report on stdout (or `--output`), a
//! short human summary on stderr.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classify2d::{classify_with, ClassifyError};
use crate::corpus::{self, Corpus};
use crate::doc::{
    self, DocError, LagrangianDoc, MultiplierDoc, StructureDoc, SystemDoc,
};
use crate::jetgeom::InvariantError;
use crate::liealgebra::{
    biinvariant_forms, killing_form, lie_lagrangian, lie_system, to_expr_matrix,
};
use crate::multspace::{analyze, degeneracy_probe, MultiplierError, MultiplierOptions, DEFAULT_DEGREE_CAP};
use crate::symexpr::DEFAULT_SEED;
use crate::varlagrange::{construct_lagrangian, verify_multiplier, ConstructError, LagrangeError};

#[derive(Debug, Parser)]
#[command(name = "varmult", version, about = "Variational multipliers for u_xy = f(x, y, u, u_x, u_y)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    pub compact: bool,
    /// Suppress the summary on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct Tuning {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long = "degree-cap", default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
}

/// Document arguments accept a path, `-` for stdin, or inline JSON.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal form, H, K, S, connection form and the multiplier conditions.
    Invariants { system: String },
    /// Dimension and basis of the multiplier space.
    Multipliers {
        system: String,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Two-component classification.
    Classify {
        system: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Check E(L) = M (u_xy - f) off-shell.
    Verify {
        system: String,
        lagrangian: String,
        multiplier: String,
    },
    /// Build a Lagrangian for a given multiplier.
    Construct {
        system: String,
        multiplier: String,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Killing form, bi-invariant forms and the associated system.
    Lie {
        structure: String,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Run the golden corpus (bundled unless --file is given).
    Corpus {
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Lagrange(#[from] LagrangeError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        CliError::Internal(e.to_string())
    }
}

/// A finished analysis. `ok` is false only when the corpus has failures.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub ok: bool,
}

fn read_source(arg: &str) -> Result<String, CliError> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') || t.starts_with('"') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|source| CliError::Io { path: "<stdin>".into(), source })?;
        return Ok(s);
    }
    if arg.is_empty() {
        return Err(CliError::Io {
            path: "\"\"".into(),
            source: io::Error::new(io::ErrorKind::NotFound, "empty path"),
        });
    }
    fs::read_to_string(arg).map_err(|source| CliError::Io { path: arg.into(), source })
}

fn load<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(&read_source(arg)?).map_err(DocError::from)?)
}

pub fn run(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Invariants { system } => {
            let sys = load::<SystemDoc>(system)?.to_system()?;
            let report = doc::invariants_report(&sys)?;
            let summary = match &report["refusal"] {
                Value::String(r) => format!("not in normal form: {r}"),
                _ => format!(
                    "H = {}, K = {}, S = 0: {}",
                    report["H"], report["K"], report["S_zero"]
                ),
            };
            Ok(Outcome { report, summary, ok: true })
        }
        Command::Multipliers { system, tuning } => {
            let sys = load::<SystemDoc>(system)?.to_system()?;
            let opts = MultiplierOptions {
                seed: tuning.seed,
                degree_cap: tuning.degree_cap,
                reconstruct: true,
            };
            match analyze(&sys, &opts) {
                Ok(r) => {
                    let summary = format!(
                        "dimension {} (rank {} of {}, stabilized at stage {}), {}",
                        r.dimension,
                        r.rank,
                        r.unknowns,
                        r.stage,
                        r.degeneracy.label()
                    );
                    let report = doc::multiplier_report_json(&r, &sys, tuning.degree_cap);
                    Ok(Outcome { report, summary, ok: true })
                }
                Err(e @ MultiplierError::NotNormalForm(_)) => Ok(Outcome {
                    report: doc::multiplier_error_json(&e, &sys, tuning.seed, tuning.degree_cap),
                    summary: format!("dimension 0: {e}"),
                    ok: true,
                }),
                Err(e) => Err(CliError::Internal(e.to_string())),
            }
        }
        Command::Classify { system, seed } => {
            let sys = load::<SystemDoc>(system)?.to_system()?;
            let v = classify_with(&sys, *seed)?;
            let mut report = doc::verdict_json(&v, sys.names());
            report["system"] = doc::system_json(&sys);
            report["seed"] = json!(seed);
            Ok(Outcome {
                summary: format!("{}", v.label),
                report,
                ok: true,
            })
        }
        Command::Verify { system, lagrangian, multiplier } => {
            let sys = load::<SystemDoc>(system)?.to_system()?;
            let l = load::<LagrangianDoc>(lagrangian)?.to_lagrangian(sys.names())?;
            let mat = load::<MultiplierDoc>(multiplier)?.to_matrix(sys.names())?;
            let v = verify_multiplier(&l, &mat, &sys)?;
            let mut report = doc::verification_json(&v, sys.names());
            report["system"] = doc::system_json(&sys);
            report["lagrangian"] = doc::lagrangian_json(&l, sys.names());
            report["multiplier"] = doc::matrix_json(&mat, sys.names());
            Ok(Outcome {
                summary: if v.holds {
                    "multiplier identity holds".into()
                } else {
                    format!("multiplier identity fails in {} equation(s)", v.residuals.len())
                },
                report,
                ok: true,
            })
        }
        Command::Construct { system, multiplier, tuning } => {
            let sys = load::<SystemDoc>(system)?.to_system()?;
            let mat = load::<MultiplierDoc>(multiplier)?.to_matrix(sys.names())?;
            let mut report = json!({
                "system": doc::system_json(&sys),
                "multiplier": doc::matrix_json(&mat, sys.names()),
                "seed": tuning.seed,
                "degree_cap": tuning.degree_cap,
            });
            let summary = match construct_lagrangian(&mat, &sys, tuning.degree_cap) {
                Ok(l) => {
                    let s = format!("L = {}", l.to_expr().display_with(sys.names()));
                    report["found"] = json!(true);
                    report["lagrangian"] = doc::structured_json(&l, sys.names());
                    s
                }
                Err(e @ ConstructError::Lagrange(_)) => return Err(CliError::Internal(e.to_string())),
                Err(e) => {
                    report["found"] = json!(false);
                    report["reason"] = json!(e.to_string());
                    if let ConstructError::NoSolution { equations, rank, unknowns, .. } = e {
                        report["constraints"] =
                            json!({"equations": equations, "rank": rank, "unknowns": unknowns});
                    }
                    format!("no Lagrangian: {e}")
                }
            };
            Ok(Outcome { report, summary, ok: true })
        }
        Command::Lie { structure, tuning } => {
            let sc = load::<StructureDoc>(structure)?.to_constants()?;
            let forms = biinvariant_forms(&sc);
            let k = killing_form(&sc);
            let sys = lie_system(&sc);
            let names = sys.names();
            let expr_forms: Vec<_> = forms.iter().map(to_expr_matrix).collect();
            let degeneracy = degeneracy_probe(&expr_forms, tuning.seed);
            let opts = MultiplierOptions {
                seed: tuning.seed,
                degree_cap: tuning.degree_cap,
                reconstruct: false,
            };
            let pipeline = analyze(&sys, &opts).map_err(|e| CliError::Internal(e.to_string()))?;
            let lagrangians: Vec<Value> = forms
                .iter()
                .map(|f| {
                    let l = lie_lagrangian(f, &sc).map_err(|e| CliError::Internal(e.to_string()))?;
                    let v = verify_multiplier(&l, &to_expr_matrix(f), &sys)?;
                    Ok(json!({
                        "M": doc::qmatrix_json(f),
                        "lagrangian": doc::lagrangian_json(&l, names),
                        "verified": v.holds,
                    }))
                })
                .collect::<Result<_, CliError>>()?;
            let report = json!({
                "structure": doc::structure_json(&sc),
                "killing_form": doc::qmatrix_json(&k),
                "killing_nondegenerate": !crate::linalg::determinant(&k).is_zero(),
                "biinvariant_dimension": forms.len(),
                "biinvariant_basis": forms.iter().map(doc::qmatrix_json).collect::<Vec<_>>(),
                "degeneracy": doc::degeneracy_json(&degeneracy, sc.m()),
                "system": doc::system_json(&sys),
                "multiplier_dimension": pipeline.dimension,
                "lagrangians": lagrangians,
                "seed": tuning.seed,
                "degree_cap": tuning.degree_cap,
            });
            let summary = format!(
                "{} bi-invariant form(s), pipeline dimension {}, {}",
                forms.len(),
                pipeline.dimension,
                degeneracy.label()
            );
            Ok(Outcome { report, summary, ok: true })
        }
        Command::Corpus { file, seed } => {
            let mut c = match file {
                None => Corpus::bundled(),
                Some(p) => Corpus::from_json(&read_source(&p.to_string_lossy())?)?,
            };
            if let Some(s) = seed {
                c.seed = Some(*s);
            }
            let results = corpus::run(&c);
            let ok = results.iter().all(|r| r.passed());
            Ok(Outcome {
                report: corpus::report_json(&results, c.seed()),
                summary: corpus::summary_table(&results),
                ok,
            })
        }
    }
}

fn emit(cli: &Cli, out: &Outcome) -> io::Result<()> {
    let text = if cli.compact {
        serde_json::to_string(&out.report)
    } else {
        serde_json::to_string_pretty(&out.report)
    }
    .map_err(io::Error::other)?;
    match &cli.output {
        Some(p) => fs::write(p, text + "\n")?,
        None => {
            let mut stdout = io::stdout().lock();
            writeln!(stdout, "{text}")?;
        }
    }
    if !cli.quiet {
        let s = out.summary.trim_end();
        eprintln!("{s}");
    }
    Ok(())
}

/// Exit codes: 0 finished, 1 corpus mismatch, 2 bad input, 3 internal.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli.command) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
