use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use haarshift::estimates::DEFAULT_GAMMA;
use haarshift::norm::{NormOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};
use haarshift::operators::ShiftKind;
use haarshift::WeightSpec;
use haarshift_cli::report::{fit_slopes, render_csv, render_fits, write_atomically};
use haarshift_cli::{commands, sweep, verify};

#[derive(Parser)]
#[command(name = "haarshift", version, about = "Dyadic Haar shift and paraproduct experiments")]
struct Cli {
    /// Seed for every random choice (test data, start vectors, cascade signs)
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact-identity and norm-law checks
    Verify {
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Operator norms of the resolution terms for one weight
    Norms {
        #[arg(long)]
        weight: WeightSpec,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value = "half")]
        shift: ShiftKind,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Norms across a weight family, with log-log slope fits
    Sweep {
        #[arg(long, default_value = "power")]
        family: String,
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "-0.9,-0.8,-0.7,-0.5,-0.3,0.3,0.5,0.7,0.8,0.9"
        )]
        params: Vec<f64>,
        #[arg(long, default_value_t = 12)]
        depth: u32,
        #[arg(long, default_value = "half")]
        shift: ShiftKind,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also recompute at depth - 2 and report relative differences
        #[arg(long)]
        depth_stability: bool,
    },
    /// Empirical constants of the Carleson-sum inequalities
    Battery {
        #[arg(long)]
        weight: WeightSpec,
        #[arg(long)]
        depth: u32,
    },
    /// Stopping-time generations below [0,1)
    Corona {
        #[arg(long)]
        weight: WeightSpec,
        #[arg(long)]
        depth: u32,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
    },
    /// Table of the shift kernel on averaging functions
    Kernel {
        #[arg(long)]
        depth: u32,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomically(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let seed = cli.seed;
    let opts = |tol: f64| NormOptions { tol, max_iter: DEFAULT_MAX_ITER, seed };
    match cli.command {
        Command::Verify { depth, tol } => {
            let checks = verify::run_checks(depth, seed, tol)?;
            let mut ok = true;
            for c in &checks {
                println!("{c}");
                ok &= c.passed;
            }
            let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
            if failed.is_empty() {
                println!("all {} checks passed", checks.len());
            } else {
                eprintln!("failed checks: {}", failed.join(", "));
            }
            Ok(ok)
        }
        Command::Norms { weight, depth, shift, tol, out } => {
            let (rows, warnings) = sweep::norm_block(&weight, depth, shift, opts(tol))?;
            for w in warnings {
                eprintln!("{w}");
            }
            emit(out.as_ref(), &render_csv(&rows))?;
            Ok(true)
        }
        Command::Sweep { family, params, depth, shift, tol, out, depth_stability } => {
            let (rows, warnings) = sweep::sweep_rows(&family, &params, depth, shift, opts(tol), seed)?;
            for w in warnings {
                eprintln!("{w}");
            }
            emit(out.as_ref(), &render_csv(&rows))?;
            let fits = render_fits(&fit_slopes(&rows));
            if out.is_some() {
                print!("{fits}");
            } else {
                eprint!("{fits}");
            }
            if depth_stability {
                eprint!("{}", sweep::depth_stability(&rows, &family, seed, shift, opts(tol))?);
            }
            Ok(true)
        }
        Command::Battery { weight, depth } => {
            print!("{}", commands::battery_report(&weight, depth)?);
            Ok(true)
        }
        Command::Corona { weight, depth, gamma } => {
            let (text, ok) = commands::corona_report(&weight, depth, gamma)?;
            print!("{text}");
            Ok(ok)
        }
        Command::Kernel { depth } => {
            let (text, ok) = commands::kernel_report(depth)?;
            print!("{text}");
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("haarshift") {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
