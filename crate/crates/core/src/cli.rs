//! Command-line front end.
//!
//! Every command writes JSON (numbers rounded to 12 significant digits) to
//! stdout or `--out`. Exit codes: 0 success, 1 computation failure, 2 usage
//! error. Errors are reported as one line of `{"error": ...}` on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::construct_model;
use crate::error::{Error, Result};
use crate::nlocal::{alpha_closed_form, bound_report, lhv_exhaustive_max, CLOSED_FORM_MAX_N};
use crate::qcore::{beta_quantum, Evaluator, QuantumModel};
use crate::scenario::{build_encoding, BobInputMap, ScenarioDump};
use crate::seesaw::{seesaw_optimize, SeesawConfig};
use crate::soscert::{certify, tsirelson_ceiling, CERTIFY_TOL};

/// Largest `n` for which `sweep` builds and certifies a quantum model.
pub const SWEEP_QUANTUM_MAX_N: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "chainlock", version, about = "n-locality inequalities on linear-chain networks")]
struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "CHAINLOCK_THREADS")]
    threads: Option<usize>,

    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Number of sources.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    n: u32,

    /// Print the sign encoding and Bob input map for `--n` and exit.
    #[arg(long)]
    dump_scenario: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EvaluatorArg {
    Dense,
    Contracted,
    Auto,
}

impl From<EvaluatorArg> for Evaluator {
    fn from(e: EvaluatorArg) -> Self {
        match e {
            EvaluatorArg::Dense => Evaluator::Dense,
            EvaluatorArg::Contracted => Evaluator::Contracted,
            EvaluatorArg::Auto => Evaluator::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Jw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical bound: closed form next to a search.
    Bound {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Enumerate every deterministic strategy instead of edge assignments.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Constructed quantum model and its value.
    Quantum {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value = "jw")]
        construction: ConstructionArg,
        #[arg(long, value_enum, default_value = "auto")]
        evaluator: EvaluatorArg,
        /// Also run the certificate and fail unless it holds.
        #[arg(long)]
        require_certified: bool,
        #[arg(long, default_value_t = CERTIFY_TOL)]
        tol: f64,
        /// Save the model as JSON.
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Seesaw maximization from seeded random models.
    Seesaw {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop once a sweep improves beta by less than this.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 500)]
        max_iterations: usize,
        /// Keep the random edge observables fixed.
        #[arg(long)]
        freeze_edges: bool,
        /// Bell pairs per source (default floor(n/2), at least 1).
        #[arg(long)]
        qubits_per_half: Option<usize>,
        /// Write "restart,iteration,beta" rows.
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        #[arg(long)]
        save_model: Option<PathBuf>,
    },
    /// Certificate for a saved model; exits 0 only if certified.
    Certify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = CERTIFY_TOL)]
        tol: f64,
    },
    /// Classical bound against the quantum ceiling over a range of n.
    Sweep {
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Fail unless every constructed model is certified.
        #[arg(long)]
        require_certified: bool,
        #[arg(long, default_value_t = CERTIFY_TOL)]
        tol: f64,
    },
}

/// Output of one command: the payload plus an optional failure that sets
/// the exit code after the payload is written.
struct Outcome {
    text: String,
    failure: Option<Error>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, failure: None }
    }
}

/// Rounds every float in `value` to 12 significant digits.
fn round_floats(value: Value) -> Value {
    match value {
        Value::Number(num) if num.is_f64() => {
            let x = num.as_f64().expect("f64 number");
            let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
            json!(rounded)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let value = round_floats(serde_json::to_value(value)?);
    Ok(serde_json::to_string(&value)? + "\n")
}

fn fmt12(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float");
    rounded.to_string()
}

fn usize_n(n: u32) -> usize {
    n as usize
}

fn dump(n: usize) -> Result<Outcome> {
    Ok(Outcome::ok(to_json_line(&ScenarioDump::new(n)?)?))
}

fn save_model(path: &Path, model: &QuantumModel) -> Result<()> {
    std::fs::write(path, model.to_json()?)?;
    Ok(())
}

fn run_bound(n: usize, exhaustive: bool) -> Result<Outcome> {
    let report = if exhaustive {
        lhv_exhaustive_max(n)?
    } else {
        bound_report(n)?
    };
    Ok(Outcome::ok(to_json_line(&report)?))
}

fn run_quantum(
    n: usize,
    evaluator: Evaluator,
    require_certified: bool,
    tol: f64,
    save: Option<&Path>,
) -> Result<Outcome> {
    let c = construct_model(n)?;
    let enc = build_encoding(n)?;
    let map = BobInputMap::new(n)?;
    let value = beta_quantum(&c.model, &enc, &map, evaluator)?;
    if let Some(path) = save {
        save_model(path, &c.model)?;
    }
    let certified = if require_certified {
        Some(certify(&c.model, tol)?.certified)
    } else {
        None
    };
    let mut out = json!({
        "n": n,
        "beta": value.beta,
        "expected": c.recipe.expected_beta,
        "terms": value.terms,
        "residuals": c.residuals,
        "max_residual": c.max_residual(),
        "bob_rule": c.recipe.bob_rule,
        "optimal": c.is_optimal(),
    });
    if let Some(flag) = certified {
        out["certified"] = json!(flag);
    }
    let failure = if !c.is_optimal() {
        Some(Error::ConstructionFailed {
            n,
            max_residual: c.max_residual(),
            beta: value.beta,
            expected: c.recipe.expected_beta,
            residuals: c.residuals.clone(),
        })
    } else if certified == Some(false) {
        Some(Error::Validation(format!("model for n = {n} is not certified")))
    } else {
        None
    };
    Ok(Outcome {
        text: to_json_line(&out)?,
        failure,
    })
}

fn run_seesaw(
    n: usize,
    config: SeesawConfig,
    trace_csv: Option<&Path>,
    save: Option<&Path>,
) -> Result<Outcome> {
    let report = seesaw_optimize(n, &config)?;
    if let Some(path) = trace_csv {
        let mut csv = String::from("restart,iteration,beta\n");
        for p in &report.trace {
            csv.push_str(&format!("{},{},{}\n", p.restart, p.iteration, fmt12(p.beta)));
        }
        std::fs::write(path, csv)?;
    }
    if let Some(path) = save {
        save_model(path, &report.best_model)?;
    }
    let out = json!({
        "n": n,
        "best_beta": report.best_beta,
        "ceiling": tsirelson_ceiling(n),
        "best_restart": report.best_restart,
        "converged": report.converged,
        "restart_betas": report.restart_betas,
        "config": config,
    });
    Ok(Outcome::ok(to_json_line(&out)?))
}

fn run_certify(path: &Path, tol: f64) -> Result<Outcome> {
    let model = QuantumModel::from_json(&std::fs::read_to_string(path)?)?;
    let report = certify(&model, tol)?;
    let failure = (!report.certified).then(|| {
        Error::Validation(format!(
            "model is not certified: gap {:e}, max residual {:e}",
            report.gamma,
            report.max_residual()
        ))
    });
    Ok(Outcome {
        text: to_json_line(&report)?,
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub alpha: u64,
    pub beta_opt: f64,
    pub ratio: f64,
    pub beta_constructed: Option<f64>,
    pub certified: Option<bool>,
}

/// One row per `n`; quantum columns are filled for `n <= 5`.
pub fn run_sweep(n_min: usize, n_max: usize, tol: f64) -> Result<Vec<SweepRow>> {
    if n_min < 2 || n_min > n_max || n_max > CLOSED_FORM_MAX_N {
        return Err(Error::Usage(format!(
            "need 2 <= n_min <= n_max <= {CLOSED_FORM_MAX_N}, got {n_min}..={n_max}"
        )));
    }
    (n_min..=n_max)
        .map(|n| {
            let alpha = alpha_closed_form(n)?;
            let beta_opt = tsirelson_ceiling(n);
            let (beta_constructed, certified) = if n <= SWEEP_QUANTUM_MAX_N {
                let c = construct_model(n)?;
                (Some(c.beta), Some(certify(&c.model, tol)?.certified))
            } else {
                (None, None)
            };
            Ok(SweepRow {
                n,
                alpha,
                beta_opt,
                ratio: beta_opt / alpha as f64,
                beta_constructed,
                certified,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("n,alpha,beta_opt,ratio,beta_constructed,certified\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.alpha,
            fmt12(r.beta_opt),
            fmt12(r.ratio),
            r.beta_constructed.map(fmt12).unwrap_or_default(),
            r.certified.map(|c| c.to_string()).unwrap_or_default(),
        ));
    }
    out
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Bound { scenario, exhaustive } => {
            let n = usize_n(scenario.n);
            if scenario.dump_scenario {
                return dump(n);
            }
            run_bound(n, exhaustive)
        }
        Command::Quantum {
            scenario,
            construction: ConstructionArg::Jw,
            evaluator,
            require_certified,
            tol,
            save_model,
        } => {
            let n = usize_n(scenario.n);
            if scenario.dump_scenario {
                return dump(n);
            }
            run_quantum(n, evaluator.into(), require_certified, tol, save_model.as_deref())
        }
        Command::Seesaw {
            scenario,
            restarts,
            seed,
            tol,
            max_iterations,
            freeze_edges,
            qubits_per_half,
            trace_csv,
            save_model,
        } => {
            let n = usize_n(scenario.n);
            if scenario.dump_scenario {
                return dump(n);
            }
            let config = SeesawConfig {
                max_iterations,
                tolerance: tol,
                restarts,
                seed,
                optimize_edges: !freeze_edges,
                qubits_per_half,
            };
            config
                .validate()
                .map_err(|e| Error::Usage(e.to_string()))?;
            run_seesaw(n, config, trace_csv.as_deref(), save_model.as_deref())
        }
        Command::Certify { model, tol } => run_certify(&model, tol),
        Command::Sweep {
            n_min,
            n_max,
            format,
            require_certified,
            tol,
        } => {
            let rows = run_sweep(n_min, n_max, tol)?;
            let text = match format {
                Format::Csv => sweep_csv(&rows),
                Format::Json => to_json_line(&rows)?,
            };
            let failure = (require_certified && rows.iter().any(|r| r.certified == Some(false)))
                .then(|| Error::Validation("some constructed models are not certified".into()));
            Ok(Outcome { text, failure })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::ScenarioTooSmall { .. } => 2,
        _ => 1,
    }
}

fn report_error(stderr: &mut dyn Write, message: &str) {
    let _ = writeln!(stderr, "{}", json!({ "error": message }));
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            report_error(stderr, first.trim_start_matches("error: "));
            return 2;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            report_error(stderr, &e.to_string());
            return 1;
        }
    };
    let outcome = pool.install(|| dispatch(cli.command));
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            report_error(stderr, &e.to_string());
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text),
        None => stdout.write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        report_error(stderr, &e.to_string());
        return 1;
    }
    match outcome.failure {
        Some(e) => {
            report_error(stderr, &e.to_string());
            exit_code(&e)
        }
        None => 0,
    }
}
