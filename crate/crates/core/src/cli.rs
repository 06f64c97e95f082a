//! Command-line front end.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::coherence::{coherence_report, CoherenceReport, FeasibilityOptions, ValueKind};
use crate::conversion::{
    conversion_channel, theorem2_chain, theorem3_verify, ConversionOutcome, Theorem3Outcome,
};
use crate::entanglement::{k_concurrence_mixed, maclaurin_chain, BipartitePure, ConcurrenceReport};
use crate::error::{Error, Result};
use crate::grover::{
    critical_iteration, dense_trajectory, statevector_deviation, trajectory, trajectory_csv,
    GroverParams,
};
use crate::roof::RoofOptions;
use crate::states::{load_state, StateInput};
use crate::verify::{run_suite, Suite, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const THREADS_ENV: &str = "COHLAB_THREADS";
/// Largest `N` accepted by `grover --statevector-check`.
pub const STATEVECTOR_CHECK_MAX: usize = 1 << 12;

#[derive(Debug, Parser)]
#[command(
    name = "cohlab",
    version,
    about = "Coherence number, generalized concurrences and Grover coherence depletion"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// RNG seed for optimizer restarts and random corpora.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    pub seed: u64,
    /// Tolerance override (feasibility residual or suite tolerance).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Corpus size for `verify`.
    #[arg(long, global = true)]
    pub cases: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also report log2 of the coherence number.
    #[arg(long, global = true)]
    pub log2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence (and, for d x d inputs, concurrence) report for a state file.
    Monotones { state: PathBuf },
    /// Grover trajectory for N items with m targets.
    Grover {
        n_items: usize,
        n_targets: usize,
        /// Last integer iteration; defaults to ceil(r*).
        r_max: Option<usize>,
        /// Sample real r on [0, r*] instead of integer steps.
        #[arg(long)]
        dense: bool,
        /// Append the deviation between statevector simulation and the closed form.
        #[arg(long)]
        statevector_check: bool,
    },
    /// Coherence-to-entanglement conversion report for a state file.
    Convert { state: PathBuf },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

#[derive(Debug, Serialize)]
struct MixedConcurrence {
    k_values: BTreeMap<usize, f64>,
    kind: ValueKind,
}

#[derive(Debug, Serialize)]
struct MonotonesOutput {
    coherence: CoherenceReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    concurrence: Option<ConcurrenceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    concurrence_estimates: Option<MixedConcurrence>,
}

#[derive(Debug, Serialize)]
struct ConvertOutput {
    conversion: ConversionOutcome,
    theorem3: Vec<Theorem3Outcome>,
    ok: bool,
}

struct Outcome {
    body: String,
    passed: bool,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

fn roof_options(common: &CommonArgs) -> RoofOptions {
    RoofOptions::default().with_seed(common.seed)
}

fn feasibility_options(common: &CommonArgs) -> FeasibilityOptions {
    let mut f = FeasibilityOptions::default();
    if let Some(t) = common.tol {
        f.tol = t;
    }
    f
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn reject_csv(common: &CommonArgs, command: &str) -> Result<()> {
    match common.format {
        Some(Format::Csv) => Err(usage(format!("{command} emits JSON only"))),
        _ => Ok(()),
    }
}

fn cmd_monotones(path: &Path, common: &CommonArgs) -> Result<Outcome> {
    reject_csv(common, "monotones")?;
    let state = load_state(path)?;
    let roof = roof_options(common);
    let coherence = coherence_report(&state, &feasibility_options(common), &roof, common.log2)?;
    let side = (state.dim() as f64).sqrt().round() as usize;
    let (mut concurrence, mut concurrence_estimates) = (None, None);
    if side >= 2 && side * side == state.dim() {
        match &state {
            StateInput::Pure(psi) => {
                concurrence = Some(maclaurin_chain(&BipartitePure::from_state(psi)?))
            }
            StateInput::Mixed(rho) => {
                let k_values = (2..=side)
                    .map(|k| Ok((k, k_concurrence_mixed(rho, k, &roof)?.value)))
                    .collect::<Result<_>>()?;
                concurrence_estimates = Some(MixedConcurrence {
                    k_values,
                    kind: ValueKind::UpperBound,
                });
            }
        }
    }
    let body = json(&MonotonesOutput {
        coherence,
        concurrence,
        concurrence_estimates,
    })?;
    Ok(Outcome { body, passed: true })
}

fn cmd_grover(
    n_items: usize,
    n_targets: usize,
    r_max: Option<usize>,
    dense: bool,
    statevector_check: bool,
    common: &CommonArgs,
) -> Result<Outcome> {
    let params = GroverParams::new(n_items, n_targets)?;
    if dense && (r_max.is_some() || statevector_check) {
        return Err(usage(
            "--dense samples [0, r*] and takes neither r_max nor --statevector-check",
        ));
    }
    let run = if dense {
        dense_trajectory(&params)
    } else {
        trajectory(
            &params,
            r_max.unwrap_or_else(|| critical_iteration(&params).r_star.ceil() as usize),
        )
    };
    let deviations = if statevector_check {
        if !n_items.is_power_of_two() || n_items > STATEVECTOR_CHECK_MAX {
            return Err(usage(format!(
                "--statevector-check needs N = 2^n <= {STATEVECTOR_CHECK_MAX}"
            )));
        }
        let bits = n_items.trailing_zeros() as usize;
        let targets: Vec<usize> = (0..n_targets).collect();
        let devs = run
            .points
            .iter()
            .map(|p| statevector_deviation(bits, &targets, p.r as usize))
            .collect::<Result<Vec<f64>>>()?;
        Some(devs)
    } else {
        None
    };
    let body = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => trajectory_csv(&run, deviations.as_deref()),
        Format::Json => {
            #[derive(Serialize)]
            struct GroverOutput<'a> {
                #[serde(flatten)]
                run: &'a crate::grover::GroverRun,
                #[serde(skip_serializing_if = "Option::is_none")]
                max_amp_dev: Option<Vec<f64>>,
            }
            json(&GroverOutput {
                run: &run,
                max_amp_dev: deviations,
            })?
        }
    };
    Ok(Outcome { body, passed: true })
}

fn cmd_convert(path: &Path, common: &CommonArgs) -> Result<Outcome> {
    reject_csv(common, "convert")?;
    let rho = load_state(path)?.density();
    let d = rho.dim();
    if d < 2 {
        return Err(usage("conversion needs d >= 2"));
    }
    let roof = roof_options(common);
    let conversion = theorem2_chain(&rho, &conversion_channel(d)?, &roof)?;
    let theorem3 = (2..=d)
        .map(|k| theorem3_verify(&rho, k, &roof))
        .collect::<Result<Vec<_>>>()?;
    let ok = conversion.chain_ok && theorem3.iter().all(|t| t.ok);
    Ok(Outcome {
        body: json(&ConvertOutput {
            conversion,
            theorem3,
            ok,
        })?,
        passed: ok,
    })
}

fn cmd_verify(suite: Suite, common: &CommonArgs) -> Result<Outcome> {
    reject_csv(common, "verify")?;
    let mut cfg = VerifyConfig::for_suite(suite, common.seed);
    if let Some(c) = common.cases {
        cfg.cases = c;
    }
    if let Some(t) = common.tol {
        cfg.tolerance = t;
    }
    let report = run_suite(suite, &cfg)?;
    Ok(Outcome {
        body: json(&report)?,
        passed: report.passed,
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn validate(common: &CommonArgs) -> Result<()> {
    if let Some(t) = common.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(usage(format!(
                "--tol must be a positive finite number (got {t})"
            )));
        }
    }
    if common.cases == Some(0) {
        return Err(usage("--cases must be at least 1"));
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            usage(format!(
                "{THREADS_ENV} must be a positive integer (got '{raw}')"
            ))
        })?;
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<Outcome> {
    validate(&cli.common)?;
    configure_threads()?;
    let common = &cli.common;
    match &cli.command {
        Command::Monotones { state } => cmd_monotones(state, common),
        Command::Grover {
            n_items,
            n_targets,
            r_max,
            dense,
            statevector_check,
        } => cmd_grover(
            *n_items,
            *n_targets,
            *r_max,
            *dense,
            *statevector_check,
            common,
        ),
        Command::Convert { state } => cmd_convert(state, common),
        Command::Verify { suite } => cmd_verify(*suite, common),
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &cli.common.out {
        Some(path) => write_atomic(path, &outcome.body),
        None => std::io::stdout()
            .write_all(outcome.body.as_bytes())
            .map_err(Error::from),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    }
}
