use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sks_cli::commands::{run_constants, run_converge, run_simulate, run_verify};
use sks_cli::{Config, RunError};

#[derive(Parser)]
#[command(name = "sks", version, about = "Stochastic Kuramoto-Sivashinsky simulator and estimate checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Key = value configuration file; `SKS_*` environment variables override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate paths and write norm series.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        paths: usize,
    },
    /// Run every estimate check over random paths and sweeps.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        paths: usize,
    },
    /// Strong self-convergence study on halved step sizes.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        paths: usize,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Calibrate the constants ledger.
    Constants {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn load(common: &Common) -> Result<Config, RunError> {
    Config::load(common.config.as_deref(), std::env::vars())
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Simulate { common, paths } => {
            let cfg = load(&common)?;
            let out = run_simulate(&cfg, common.seed, paths, &common.out_dir)?;
            println!(
                "simulated {paths} path(s) into {} (alpha = {:.6e})",
                common.out_dir.display(),
                out.ledger.alpha
            );
        }
        Command::Verify { common, paths } => {
            let cfg = load(&common)?;
            let out = run_verify(&cfg, common.seed, paths, &common.out_dir)?;
            for c in &out.checks {
                println!(
                    "{:<6} {:<26} {:>5}/{:<5} worst lhs {:.6e} rhs {:.6e} margin {:.6e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.passed,
                    c.samples,
                    c.worst.lhs,
                    c.worst.rhs,
                    c.worst.margin
                );
            }
            let failed = out.failed();
            if failed > 0 {
                return Err(RunError::ChecksFailed {
                    failed,
                    total: out.checks.len(),
                });
            }
        }
        Command::Converge { common, paths, levels } => {
            let cfg = load(&common)?;
            let out = run_converge(&cfg, common.seed, paths, levels, &common.out_dir)?;
            for l in &out.study.levels {
                let order = l.observed_order.map(|o| format!("{o:.4}")).unwrap_or_default();
                println!("dt {:.4e}  error {:.6e}  order {order}", l.dt, l.error_vs_finest);
            }
            println!("fitted order {:.4}", out.study.fitted_order);
        }
        Command::Constants { common, samples } => {
            let cfg = load(&common)?;
            let cal = run_constants(&cfg, common.seed, samples, &common.out_dir)?;
            let l = cal.ledger;
            println!(
                "C1 {:.6e}  C2 {:.6e}  L {:.6e}  K {:.6e}  M {:.6e}  alpha {:.6e}",
                l.c1, l.c2, l.l, l.k, l.m, l.alpha
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
