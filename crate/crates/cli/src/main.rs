//! `snep`: config-driven runs of the stochastic Cournot solver.

mod config;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use snep_core::{
    convergence_report, monte_carlo_mean, solve_all, solve_streaming, solve_vi,
    write_convergence_csv, Grid64, LadderLevel, SolverConfig64, SweepOptions,
};

use config::{Mode, RunConfig};

#[derive(Parser)]
#[command(name = "snep", version, about = "Stochastic Nash equilibria of Cournot markets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Override `run.mode`.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Override `run.out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override `run.threads`.
        #[arg(long)]
        threads: Option<usize>,
        /// Print the fully resolved config as JSON and exit.
        #[arg(long)]
        dump_config: bool,
    },
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

/// Returns `Ok(false)` when the run finished but some solves were flagged.
fn run(cli: Cli) -> anyhow::Result<bool> {
    let Command::Solve { config, mode, out, threads, dump_config } = cli.command;
    let mut cfg = RunConfig::from_path(&config)?;
    if let Some(mode) = mode {
        cfg.run.mode = mode;
    }
    if let Some(out) = out {
        cfg.run.out_dir = out;
    }
    if let Some(threads) = threads {
        cfg.run.threads = threads;
    }
    cfg.validate()?;
    if dump_config {
        println!("{}", cfg.to_json());
        return Ok(true);
    }
    fs::create_dir_all(&cfg.run.out_dir)
        .with_context(|| format!("creating {}", cfg.run.out_dir.display()))?;
    let started = Instant::now();
    let clean = match cfg.run.mode {
        Mode::Deterministic => deterministic(&cfg)?,
        Mode::Discretize => discretize(&cfg)?,
        Mode::Oracle => oracle(&cfg)?,
        Mode::Ladder => ladder(&cfg)?,
    };
    eprintln!("done in {:.2}s, output in {}", started.elapsed().as_secs_f64(), cfg.run.out_dir.display());
    Ok(clean)
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn sweep_options(cfg: &RunConfig) -> SweepOptions {
    SweepOptions {
        workers: cfg.run.threads,
        max_flagged_fraction: cfg.run.max_flagged_fraction,
    }
}

fn deterministic(cfg: &RunConfig) -> anyhow::Result<bool> {
    let instance = cfg.instance()?;
    let (scenario, bounds) = instance.mean_scenario();
    let problem = instance.vi_problem(&scenario, &bounds)?;
    let (q, report) = solve_vi(&problem, &SolverConfig64::from(cfg.solver), None)?;
    let mut out = create(&cfg.run.out_dir, "summary.csv")?;
    let header: Vec<String> = (1..=q.len()).map(|i| format!("q_{i}")).collect();
    writeln!(out, "{},residual,iterations", header.join(","))?;
    let values: Vec<String> = q.iter().map(f64::to_string).collect();
    writeln!(out, "{},{},{}", values.join(","), report.residual, report.iterations)?;
    out.flush()?;
    println!("q = {q:.4?}, residual {:.2e} after {} iterations", report.residual, report.iterations);
    if !report.converged {
        eprintln!("warning: solver stopped at max_iterations without meeting the tolerance");
    }
    Ok(report.converged)
}

fn discretize(cfg: &RunConfig) -> anyhow::Result<bool> {
    let instance = cfg.instance()?;
    let grid = Grid64::new(&instance, &cfg.grid_spec(&BTreeMap::new()))?;
    let solver = SolverConfig64::from(cfg.solver);
    let options = sweep_options(cfg);
    eprintln!("solving {} cells on {} threads", grid.cell_count(), options.workers);
    let moments = if cfg.run.write_cells {
        let solution = solve_all(&instance, &grid, &solver, &options)?;
        let mut cells = create(&cfg.run.out_dir, "cells.csv")?;
        solution.write_cells_csv(&mut cells)?;
        cells.flush()?;
        snep_core::expectation(&solution)
    } else {
        solve_streaming(&instance, &grid, &solver, &options)?.moments
    };
    let mut out = create(&cfg.run.out_dir, "summary.csv")?;
    moments.write_summary_csv(&mut out)?;
    out.flush()?;
    println!("mean = {:.4?}", moments.mean);
    if moments.flagged_cells > 0 {
        eprintln!("warning: {} cells did not converge", moments.flagged_cells);
    }
    Ok(moments.flagged_cells == 0)
}

fn oracle(cfg: &RunConfig) -> anyhow::Result<bool> {
    let instance = cfg.instance()?;
    let report = monte_carlo_mean(
        &instance,
        cfg.run.n_samples,
        cfg.run.seed,
        &SolverConfig64::from(cfg.solver),
        cfg.run.threads,
    )?;
    let mut out = create(&cfg.run.out_dir, "oracle.csv")?;
    report.write_csv(&mut out)?;
    out.flush()?;
    println!("mean = {:.4?}", report.mean);
    if report.failed_solves > 0 {
        eprintln!("warning: {} sample solves failed", report.failed_solves);
    }
    Ok(report.failed_solves == 0)
}

fn ladder(cfg: &RunConfig) -> anyhow::Result<bool> {
    let instance = cfg.instance()?;
    let solver = SolverConfig64::from(cfg.solver);
    let options = sweep_options(cfg);
    // Columns: every factor named in any level, in grid order.
    let names: Vec<String> = cfg
        .factor_names()
        .into_iter()
        .filter(|n| cfg.discretization.ladder.iter().any(|l| l.contains_key(n)))
        .collect();
    if names.is_empty() {
        bail!("ladder levels name no factors");
    }
    let mut levels = Vec::new();
    let mut flagged = 0;
    for (i, overrides) in cfg.discretization.ladder.iter().enumerate() {
        let spec = cfg.grid_spec(overrides);
        let grid = Grid64::new(&instance, &spec)?;
        let summary = solve_streaming(&instance, &grid, &solver, &options)?;
        let cells: Vec<usize> = names
            .iter()
            .map(|n| grid.partitions()[grid.roles().iter().position(|r| r.name() == *n).expect("validated factor name")].cells())
            .collect();
        eprintln!("level {i}: {} cells, mean {:.4?}", grid.cell_count(), summary.moments.mean);
        flagged += summary.moments.flagged_cells;
        levels.push(LadderLevel { cells, report: summary.moments });
    }
    let rows = convergence_report(&levels)?;
    let mut out = create(&cfg.run.out_dir, "ladder.csv")?;
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    write_convergence_csv(&rows, &refs, &mut out)?;
    out.flush()?;
    for row in &rows {
        println!("level {}: max delta {:.3e}", row.level, row.max_delta);
    }
    Ok(flagged == 0)
}
