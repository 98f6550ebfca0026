//! `mlqsp`: filter construction, phase solving, ground-state preparation runs
//! and cost comparisons from the command line.
//!
//! Exit codes: 0 on success, 2 when an input violates a precondition, 3 when
//! a numerical construction (filter design or phase solve) fails, 1 otherwise.

mod commands;
mod config;
mod formats;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use mlqsp_core::Error;

use commands::{CompareArgs, FilterArgs, FilterKind, SolveArgs, TargetKind};
use config::{ExperimentConfig, MethodArg, RegimeArg};

const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "mlqsp", version, about = "Multi-level QSP ground state preparation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve symmetric phase factors for a target polynomial.
    SolvePhases {
        #[arg(long, value_enum, default_value = "golden")]
        target: TargetKind,
        /// Level-filter error for `--target level`.
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        /// Constant for `--target constant`.
        #[arg(long, default_value_t = 0.5)]
        value: f64,
        /// Comma-separated coefficients of T_0, T_2, T_4, ... for `--target coeffs`.
        #[arg(long, value_delimiter = ',')]
        coeffs: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value = "phases.json")]
        out: PathBuf,
    },
    /// Build a filter and write its coefficients (and optionally a sampled curve).
    BuildFilter {
        #[arg(long, value_enum)]
        kind: FilterKind,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 0.5)]
        mu: f64,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        #[arg(long, default_value_t = 20.0)]
        h_norm: f64,
        #[arg(long, default_value = "filter.json")]
        out: PathBuf,
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Run one ground-state preparation experiment.
    Run(RunArgs),
    /// Tabulate cost estimates over a grid of spectral radii.
    Compare {
        /// Comma-separated spectral radii.
        #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128,256,512,1024")]
        h_norms: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        gap: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "tau-cutoff")]
        regime: RegimeArg,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "multilevel,standard-qsp,lcu")]
        methods: Vec<MethodArg>,
        /// Also run the simulator at every grid point.
        #[arg(long)]
        simulate: bool,
        #[arg(long, default_value_t = 20.0)]
        curve_h_norm: f64,
        #[arg(long, default_value_t = 1000)]
        curve_points: usize,
        #[arg(long, default_value = "out")]
        output_dir: PathBuf,
    },
    /// Repeat the multi-level run with perturbed evolution queries of size
    /// `--delta` (1e-6 when neither the flag nor the config sets it).
    InjectError {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 100)]
        runs: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut c = ExperimentConfig::load(&self.config)?;
        if let Some(v) = self.method {
            c.method = v;
        }
        if let Some(v) = self.regime {
            c.regime = v;
        }
        if let Some(v) = self.eps {
            c.eps = v;
        }
        if self.tau.is_some() {
            c.tau = self.tau;
        }
        if let Some(v) = self.alpha {
            c.alpha = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.output_dir {
            c.output_dir = v.clone();
        }
        Ok(c)
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::SolvePhases {
            target,
            eps,
            value,
            coeffs,
            tol,
            out,
        } => {
            let f = commands::solve_phases(&SolveArgs {
                target,
                eps,
                value,
                coeffs,
                tol,
                out: out.clone(),
            })?;
            println!(
                "degree {} residual {:e} after {} iterations -> {}",
                f.degree,
                f.residual,
                f.iterations,
                out.display()
            );
        }
        Command::BuildFilter {
            kind,
            eps,
            mu,
            gap,
            h_norm,
            out,
            curve,
            points,
        } => {
            let f = commands::build_filter(&FilterArgs {
                kind,
                eps,
                mu,
                gap,
                h_norm,
                out: out.clone(),
                curve,
                points,
            })?;
            let (degree, err) = match &f {
                formats::FilterFile::Polynomial {
                    degree, eps_achieved, ..
                }
                | formats::FilterFile::Fourier {
                    degree, eps_achieved, ..
                } => (*degree, *eps_achieved),
            };
            println!("degree {degree} error {err:e} -> {}", out.display());
        }
        Command::Run(args) => {
            let cfg = args.config()?;
            let r = commands::run(&cfg)?;
            println!(
                "{}: fidelity {:.10} success probability {:.6e} oracle queries {} -> {}",
                r.method,
                r.fidelity,
                r.success_probability,
                r.oracle_queries,
                cfg.output_dir.display()
            );
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
        }
        Command::Compare {
            h_norms,
            gap,
            gamma,
            eps,
            tau,
            alpha,
            regime,
            methods,
            simulate,
            curve_h_norm,
            curve_points,
            output_dir,
        } => {
            let n = commands::compare(&CompareArgs {
                h_norms,
                gap,
                gamma,
                eps,
                tau,
                alpha,
                regime,
                methods,
                simulate,
                curve_h_norm,
                curve_points,
                output_dir: output_dir.clone(),
            })?;
            println!("{n} rows -> {}", output_dir.join("scaling.csv").display());
        }
        Command::InjectError { run, runs } => {
            let cfg = run.config()?;
            let delta = if cfg.delta > 0.0 { cfg.delta } else { DEFAULT_DELTA };
            let s = commands::inject_error(&cfg, delta, runs)?;
            println!(
                "{} runs, q = {}, worst deviation / (q delta) = {:.3e} -> {}",
                s.runs,
                s.oracle_queries,
                s.worst_ratio,
                cfg.output_dir.join("injection.csv").display()
            );
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::InvalidArgument(_) | Error::Domain(_) | Error::Precondition { .. } => 2,
                Error::Construction { .. } | Error::Solver { .. } => 3,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
