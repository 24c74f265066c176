//! Argument definitions and subcommand implementations for the `qwalk` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qwalk_core::sampling::FrequencyEntry;
use qwalk_core::synthesis::{USD_INCONCLUSIVE, USD_MINUS, USD_PLUS};
use qwalk_core::{
    build_sic, build_usd, extract_povm, extract_povm_reverse, merge_rank2, outcome_probabilities,
    position_distribution, reconstruct_state, run, run_traced, sample_outcomes_sharded,
    synthesize, usd_states, validate_povm, CoinState, Complex64, DensityMatrix, Mat2, PovmSet,
    SampleReport, SynthesisResult, TargetPovmSpec, WalkProgram,
};

/// Exit status for validation or feasibility failures.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for unreadable or malformed input.
pub const EXIT_PARSE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantum walks as qubit measuring devices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a rank-1 POVM spec into a walk program.
    Synthesize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract the POVM realized by a walk program.
    Extract {
        #[arg(long)]
        program: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Forward)]
        method: Method,
    },
    /// Check positivity and completeness of a POVM file.
    Verify {
        #[arg(long)]
        povm: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run a program on a coin state started at the origin.
    Run {
        #[arg(long)]
        program: PathBuf,
        /// Coin as "re,im,re,im" (→ then ←).
        #[arg(long, value_parser = parse_coin, allow_hyphen_values = true)]
        coin: CoinState,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the position distribution after every step as CSV.
    Trace {
        #[arg(long)]
        program: PathBuf,
        #[arg(long, value_parser = parse_coin, allow_hyphen_values = true)]
        coin: CoinState,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Unambiguous discrimination of cos(θ/2)|→⟩ ± sin(θ/2)|←⟩.
    Usd {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, value_enum, default_value_t = UsdInput::Plus)]
        input: UsdInput,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The tetrahedral SIC measurement walk.
    Sic {
        /// Input coin as "re,im,re,im"; defaults to the maximally mixed state.
        #[arg(long, value_parser = parse_coin, allow_hyphen_values = true)]
        coin: Option<CoinState>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Merge the outcomes at x = 2i and x = 2j of a synthesis result.
    Merge {
        #[arg(long)]
        result: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        i: i64,
        #[arg(long, allow_hyphen_values = true)]
        j: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a qubit state from POVM outcome frequencies.
    Tomo {
        #[arg(long)]
        povm: PathBuf,
        /// JSON with an "empirical" list of {position, frequency}.
        #[arg(long)]
        freq: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UsdInput {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SamplingArgs {
    /// Number of simulated measurements.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampling threads; worker w uses seed + w.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// A failure together with the exit status it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub error: anyhow::Error,
}

impl CliError {
    fn parse(error: anyhow::Error) -> Self {
        Self { code: EXIT_PARSE, error }
    }
}

impl From<qwalk_core::Error> for CliError {
    fn from(e: qwalk_core::Error) -> Self {
        Self {
            code: EXIT_FAILURE,
            error: e.into(),
        }
    }
}

type CliResult<T = ()> = std::result::Result<T, CliError>;

/// Parses `"re,im,re,im"` into a coin state (not normalized here).
pub fn parse_coin(s: &str) -> Result<CoinState, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad number in coin: {e}"))?;
    match parts[..] {
        [a, b, c, d] => Ok(CoinState::new(Complex64::new(a, b), Complex64::new(c, d))),
        _ => Err(format!("expected 4 comma-separated numbers, got {}", parts.len())),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::parse)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(CliError::parse)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CliResult {
    let written = match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing output"),
    };
    written.map_err(|error| CliError {
        code: EXIT_FAILURE,
        error,
    })
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T, stdout: &mut dyn Write) -> CliResult {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::parse(e.into()))?;
    text.push('\n');
    emit(out, &text, stdout)
}

#[derive(Serialize)]
struct LabelledProbability {
    position: i64,
    label: &'static str,
    probability: f64,
}

#[derive(Serialize)]
struct UsdReport {
    theta: f64,
    input: UsdInput,
    outcomes: Vec<LabelledProbability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<SampleReport>,
}

#[derive(Serialize)]
struct PositionProbability {
    position: i64,
    probability: f64,
}

#[derive(Serialize)]
struct SicReport {
    #[serde(flatten)]
    result: SynthesisResult,
    povm: PovmSet,
    input: Mat2,
    probabilities: Vec<PositionProbability>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample: Option<SampleReport>,
}

#[derive(Deserialize)]
struct FrequencyFile {
    empirical: Vec<FrequencyEntry>,
}

fn sample(dist: &BTreeMap<i64, f64>, args: &SamplingArgs) -> CliResult<Option<SampleReport>> {
    match args.samples {
        None => Ok(None),
        Some(n) => Ok(Some(sample_outcomes_sharded(dist, n, args.seed, args.workers)?)),
    }
}

/// Position distribution after each step as `t,x,probability` rows.
pub fn trace_csv(program: &WalkProgram, coin: CoinState) -> qwalk_core::Result<String> {
    let mut csv = String::from("t,x,probability\n");
    for (t, s) in run_traced(program, coin, 0)?.iter().enumerate() {
        for (x, p) in position_distribution(s) {
            writeln!(csv, "{t},{x},{p}").expect("writing to a String");
        }
    }
    Ok(csv)
}

/// Runs one subcommand, writing to `stdout` when no `--out` is given.
pub fn execute(command: Command, stdout: &mut dyn Write) -> CliResult {
    match command {
        Command::Synthesize { spec, out } => {
            let spec: TargetPovmSpec = read_json(&spec)?;
            emit_json(out.as_deref(), &synthesize(&spec)?, stdout)
        }
        Command::Extract {
            program,
            out,
            method,
        } => {
            let program: WalkProgram = read_json(&program)?;
            let set = match method {
                Method::Forward => extract_povm(&program)?,
                Method::Reverse => extract_povm_reverse(&program)?,
            };
            emit_json(out.as_deref(), &set, stdout)
        }
        Command::Verify { povm, tol } => {
            if !(tol > 0.0) {
                return Err(CliError::parse(anyhow!("--tol must be positive")));
            }
            let set: PovmSet = read_json(&povm)?;
            let report = validate_povm(&set, tol);
            emit_json(None, &report, stdout)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError {
                    code: EXIT_FAILURE,
                    error: anyhow!(
                        "POVM fails validation (completeness defect {:e})",
                        report.completeness_defect
                    ),
                })
            }
        }
        Command::Run { program, coin, out } => {
            let program: WalkProgram = read_json(&program)?;
            emit_json(out.as_deref(), &run(&program, coin, 0)?, stdout)
        }
        Command::Trace { program, coin, out } => {
            let program: WalkProgram = read_json(&program)?;
            emit(out.as_deref(), &trace_csv(&program, coin)?, stdout)
        }
        Command::Usd {
            theta,
            input,
            sampling,
            out,
        } => {
            let usd = build_usd(theta)?;
            let set = extract_povm(&usd.program)?;
            let (plus, minus) = usd_states(theta);
            let psi = match input {
                UsdInput::Plus => plus,
                UsdInput::Minus => minus,
            };
            let mut dist = outcome_probabilities(&set, &DensityMatrix::pure(&psi)?)?;
            // at θ = 0 the conclusive outcomes have no support but are still reported
            for x in [USD_MINUS, USD_PLUS, USD_INCONCLUSIVE] {
                dist.entry(x).or_insert(0.0);
            }
            let label = |x: i64| match x {
                USD_PLUS => "definitely psi_plus",
                USD_MINUS => "definitely psi_minus",
                _ => "inconclusive",
            };
            let report = UsdReport {
                theta,
                input,
                outcomes: dist
                    .iter()
                    .map(|(&position, &probability)| LabelledProbability {
                        position,
                        label: label(position),
                        probability,
                    })
                    .collect(),
                sample: sample(&dist, &sampling)?,
            };
            emit_json(out.as_deref(), &report, stdout)
        }
        Command::Sic {
            coin,
            sampling,
            out,
        } => {
            let result = build_sic();
            let set = extract_povm(&result.program)?;
            let rho = match coin {
                Some(c) => DensityMatrix::pure(&c)?,
                None => DensityMatrix::maximally_mixed(),
            };
            let dist = outcome_probabilities(&set, &rho)?;
            let report = SicReport {
                result,
                povm: set,
                input: *rho.matrix(),
                probabilities: dist
                    .iter()
                    .map(|(&position, &probability)| PositionProbability {
                        position,
                        probability,
                    })
                    .collect(),
                sample: sample(&dist, &sampling)?,
            };
            emit_json(out.as_deref(), &report, stdout)
        }
        Command::Merge { result, i, j, out } => {
            let result: SynthesisResult = read_json(&result)?;
            emit_json(out.as_deref(), &merge_rank2(&result, i, j)?, stdout)
        }
        Command::Tomo { povm, freq, out } => {
            let set: PovmSet = read_json(&povm)?;
            let report = validate_povm(&set, qwalk_core::povm::COMPLETENESS_TOL);
            if !report.pass {
                return Err(qwalk_core::Error::InvalidPovm(format!(
                    "completeness defect {:e}",
                    report.completeness_defect
                ))
                .into());
            }
            let freq: FrequencyFile = read_json(&freq)?;
            let empirical = freq
                .empirical
                .into_iter()
                .map(|f| (f.position, f.frequency))
                .collect();
            emit_json(out.as_deref(), &reconstruct_state(&set, &empirical)?, stdout)
        }
    }
}

/// Parses `args`, runs the command and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {:#}", e.error);
            e.code
        }
    }
}
