//! Command-line driver for convergence studies.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use fracflow::study::{run_study, StudyConfig, StudyReport};

#[derive(Parser)]
#[command(
    name = "fracflow",
    version,
    about = "Hybrid-dimensional Darcy flow convergence studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the study described by a JSON configuration file.
    Study {
        config: PathBuf,
        /// Replace a configuration entry, e.g. `--override xi=0.75`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Write VTK fields to the configured directory.
        #[arg(long)]
        vtk: bool,
        /// Only print errors.
        #[arg(long)]
        quiet: bool,
    },
}

fn print_table(r: &StudyReport) {
    println!(
        "{:>4} {:>8} {:>8} {:>8} {:>5} {:>9} {:>10} {:>10} {:>10} {:>10}",
        "n", "cells", "dofs", "elim", "iter", "cpu", "err_sol", "err_grad", "err_jump", "jump(-)"
    );
    for l in &r.levels {
        let cpu = l.cpu_seconds.map_or("-".to_string(), |c| format!("{c:.3}"));
        println!(
            "{:>4} {:>8} {:>8} {:>8} {:>5} {:>9} {:>10.3e} {:>10.3e} {:>10.3e} {:>10.3e}{}",
            l.n,
            l.cells,
            l.dofs,
            l.eliminated,
            l.iterations,
            cpu,
            l.errors.err_sol,
            l.errors.err_grad,
            l.errors.err_jump,
            l.errors.err_jump_minus,
            if l.converged { "" } else { "  NOT CONVERGED" }
        );
    }
    let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.2}"));
    for (i, o) in r.orders.iter().enumerate() {
        println!(
            "orders {}-{}: sol {} grad {} jump {}",
            i + 1,
            i + 2,
            f(o.sol),
            f(o.grad),
            f(o.jump)
        );
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let Command::Study {
        config,
        overrides,
        vtk,
        quiet,
    } = cli.command;
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if quiet {
        "error"
    } else {
        "info"
    }))
    .init();
    let mut cfg =
        StudyConfig::load(&config).with_context(|| format!("reading {}", config.display()))?;
    for o in &overrides {
        cfg.apply_override(o)
            .with_context(|| format!("applying override `{o}`"))?;
    }
    let report = run_study(&cfg, vtk)?;
    if !quiet {
        print_table(&report);
    }
    Ok(report.all_converged())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
