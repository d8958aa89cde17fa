//! Command-line driver for `collatz-cycles`: argument parsing, wire formats
//! and the parallel verification suites.
//!
//! Exit codes: 0 success, 1 a verification found a counterexample, 2 usage
//! error, 3 a resource cap was hit.

pub mod suites;
pub mod wire;

use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use collatz_cycles::codec::{decode_with_trace, encode, single_cycle_seed, OddParams};
use collatz_cycles::composer::{
    compose_final, compose_initial, verify_plan, weight_sum, ComposePlan, CycleShape,
};
use collatz_cycles::parallel::check_parallel;
use collatz_cycles::terminal::{build_terminal, verify_terminal, Frees};
use collatz_cycles::trajectory::trace;
use collatz_cycles::{Error, Limits};

use crate::suites::{Suite, SuiteParams};
use crate::wire::{
    dec, parse_int, parse_nat, parse_odd, read_json, write_trajectory_csv, ComposeInput,
    ComposeOutput, DecomposeDto, ParallelDto, SimulateDto, TerminalInput, TerminalOutput,
};

/// A malformed argument or input file.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub const EXIT_OK: u8 = 0;
pub const EXIT_COUNTEREXAMPLE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CAP: u8 = 3;

pub fn exit_code_for_core(e: &Error) -> u8 {
    match e {
        Error::BitCapExceeded { .. } | Error::StepCapExceeded { .. } => EXIT_CAP,
        Error::NonDivisible { .. }
        | Error::NoSolution { .. }
        | Error::InconsistentDecode { .. }
        | Error::ShapeMismatch { .. }
        | Error::FinalMismatch { .. }
        | Error::LandingMismatch { .. }
        | Error::NoConvergence { .. }
        | Error::PrematureDivergence { .. }
        | Error::MissingDivergence { .. }
        | Error::ShadowIdentity { .. } => EXIT_COUNTEREXAMPLE,
        _ => EXIT_USAGE,
    }
}

pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(core) => exit_code_for_core(core),
        None => EXIT_USAGE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "collatz-cycles",
    version,
    about = "Cycle algebra for 3x+1 trajectories"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Maximum number of Collatz steps per simulation.
    #[arg(long, global = true, default_value_t = Limits::DEFAULT_STEP_CAP)]
    pub step_cap: u64,
    /// Maximum bit length of any power of two or trajectory value.
    #[arg(long, global = true, env = "COLLATZ_BIT_CAP", default_value_t = Limits::DEFAULT_BIT_CAP)]
    pub bit_cap: u64,
    /// Worker threads for `verify` (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate from an odd start, to 1 or for a number of cycles.
    Simulate {
        a: String,
        #[arg(long)]
        cycles: Option<usize>,
        /// Add a bit-length column to the CSV trajectory.
        #[arg(long)]
        log2: bool,
        /// Also write the trajectory CSV to this file.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Read the (n, k_n, j, K_O) parameters of an odd number.
    Decompose { a: String },
    /// Build the odd number with the given parameters.
    Encode {
        n: u32,
        k_n: u64,
        j: u64,
        k_o: String,
    },
    /// The number of grade n that reaches 1 in one cycle for odd q.
    Seed { n: u32, q: String },
    /// Evaluate a composition plan (JSON file, `-` for stdin).
    Compose {
        plan: String,
        #[arg(long)]
        verify: bool,
    },
    /// Build a terminal plan (JSON file, `-` for stdin).
    Terminal {
        plan: String,
        #[arg(long)]
        verify: bool,
    },
    /// Walk a and a + 2^beta·K in lockstep and report the split.
    Parallel { a: String, beta: u64, k: String },
    /// Run a verification sweep.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        max: Option<u64>,
        #[arg(long)]
        beta_max: Option<u32>,
        #[arg(long)]
        samples: Option<usize>,
    },
}

/// Global settings shared by every command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub step_cap: u64,
    pub bit_cap: u64,
    pub format: Format,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> anyhow::Result<Self> {
        let cfg = Self {
            step_cap: cli.step_cap,
            bit_cap: cli.bit_cap,
            format: cli.format,
            seed: cli.seed,
            jobs: cli.jobs,
        };
        if cfg.step_cap == 0 || cfg.bit_cap == 0 || cfg.jobs == Some(0) {
            return Err(UsageError("caps and --jobs must be positive".into()).into());
        }
        Ok(cfg)
    }

    pub fn limits(&self) -> Limits {
        Limits::new(self.bit_cap, self.step_cap)
    }
}

fn emit_json<W: Write, T: serde::Serialize>(out: &mut W, value: &T) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn json_only(cfg: &RunConfig, command: &str) -> anyhow::Result<()> {
    if cfg.format == Format::Csv {
        return Err(UsageError(format!("`{command}` only produces JSON")).into());
    }
    Ok(())
}

/// Runs a parsed command, writing its report to `out`; returns the exit code.
pub fn run<W: Write>(cli: Cli, out: &mut W) -> anyhow::Result<u8> {
    let cfg = RunConfig::from_cli(&cli)?;
    let limits = cfg.limits();
    match cli.command {
        Command::Simulate {
            a,
            cycles,
            log2,
            trajectory,
        } => {
            let a = parse_odd(&a, "start")?;
            if cycles == Some(0) {
                return Err(UsageError("--cycles must be >= 1".into()).into());
            }
            let (t, traces) = trace(&a, cycles, &limits)?;
            if let Some(path) = trajectory {
                let f = std::fs::File::create(&path)
                    .with_context(|| format!("creating {}", path.display()))?;
                write_trajectory_csv(&t, log2, std::io::BufWriter::new(f))?;
            }
            match cfg.format {
                Format::Csv => write_trajectory_csv(&t, log2, &mut *out)?,
                Format::Json => emit_json(out, &SimulateDto::new(&t, &traces, cycles))?,
            }
            Ok(EXIT_OK)
        }
        Command::Decompose { a } => {
            json_only(&cfg, "decompose")?;
            let a = parse_odd(&a, "value")?;
            let (p, c) = decode_with_trace(&a, &limits)?;
            emit_json(out, &DecomposeDto::new(&p, &c)?)?;
            Ok(EXIT_OK)
        }
        Command::Encode { n, k_n, j, k_o } => {
            json_only(&cfg, "encode")?;
            let p = OddParams::new(n, k_n, j, parse_nat(&k_o, "K_O")?);
            emit_json(out, &dec(&encode(&p, &limits)?))?;
            Ok(EXIT_OK)
        }
        Command::Seed { n, q } => {
            json_only(&cfg, "seed")?;
            let q = parse_odd(&q, "q")?;
            emit_json(out, &dec(&single_cycle_seed(n, &q, &limits)?))?;
            Ok(EXIT_OK)
        }
        Command::Compose { plan, verify } => {
            json_only(&cfg, "compose")?;
            let input: ComposeInput = read_json(&plan)?;
            let shapes: Vec<CycleShape> = input.shapes.iter().copied().map(Into::into).collect();
            let q = input.q.as_deref().map(|q| parse_nat(q, "Q")).transpose()?;
            let plan = ComposePlan::with_defaults(shapes, input.j_delta, q, &limits)?;
            let mut report = ComposeOutput {
                shapes: input.shapes,
                j_delta: plan.j_delta,
                q: dec(&plan.q),
                weight_sum: dec(&weight_sum(&plan.shapes, &limits)?),
                initial: dec(&compose_initial(&plan, &limits)?),
                final_odd: dec(&compose_final(&plan, &limits)?),
                verified: None,
                per_cycle: None,
                error: None,
            };
            let mut code = EXIT_OK;
            if verify {
                match verify_plan(&plan, &limits) {
                    Ok(r) => {
                        report.verified = Some(true);
                        report.per_cycle = Some(wire::per_cycle(&r));
                    }
                    Err(e) => {
                        code = exit_code_for_core(&e);
                        report.verified = Some(false);
                        report.error = Some(e.to_string());
                    }
                }
            }
            emit_json(out, &report)?;
            Ok(code)
        }
        Command::Terminal { plan, verify } => {
            json_only(&cfg, "terminal")?;
            let input: TerminalInput = read_json(&plan)?;
            let shapes: Vec<CycleShape> = input.shapes.iter().copied().map(Into::into).collect();
            let frees = Frees {
                j_delta: input.j_delta,
                j_beta: input.j_beta,
                gamma_o: input.gamma_o,
                a_e: input.a_e,
                k_o: input
                    .k_o
                    .as_deref()
                    .map(|k| parse_int(k, "K_O"))
                    .transpose()?,
            };
            let tp = build_terminal(&shapes, input.n_l, &frees, &limits)?;
            let mut report = TerminalOutput::from(&tp);
            let mut code = EXIT_OK;
            if verify {
                match verify_terminal(&tp, &limits) {
                    Ok(r) => {
                        report.verified = Some(true);
                        report.converges = Some(r.landing_cycle.terminal);
                    }
                    Err(e) => {
                        code = exit_code_for_core(&e);
                        report.verified = Some(false);
                        report.error = Some(e.to_string());
                    }
                }
            }
            emit_json(out, &report)?;
            Ok(code)
        }
        Command::Parallel { a, beta, k } => {
            json_only(&cfg, "parallel")?;
            let a = parse_odd(&a, "a")?;
            let k = parse_odd(&k, "K")?;
            let r = check_parallel(&a, beta, &k, &limits)?;
            emit_json(out, &ParallelDto::from(&r))?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            n_max,
            k_max,
            max,
            beta_max,
            samples,
        } => {
            json_only(&cfg, "verify")?;
            let params = SuiteParams {
                n_max,
                k_max,
                max,
                beta_max,
                samples,
                seed: cfg.seed,
            };
            let report = match cfg.jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()?
                    .install(|| suites::run(suite, &params, &limits)),
                None => suites::run(suite, &params, &limits),
            };
            emit_json(out, &report)?;
            Ok(if report.ok {
                EXIT_OK
            } else {
                EXIT_COUNTEREXAMPLE
            })
        }
    }
}
