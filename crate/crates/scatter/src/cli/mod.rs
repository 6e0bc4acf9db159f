//! Batch driver: configure a benchmark, assemble, solve, post-process and
//! write CSV tables for convergence studies, frequency sweeps and far-field
//! patterns.
//!
//! `scatter verify|converge|sweep|farfield --config <path> [--check] [--threads n] [--deterministic]`

mod commands;
mod config;
mod verify;

pub use commands::{
    build_discretization, build_problem, check_converge, check_farfield, check_sweep, cmd_converge, cmd_farfield,
    cmd_sweep, solve_case, ConvergeRow, FarFieldRow, SolvedCase, SweepRow,
};
pub use config::{AngleGrid, CheckLimits, Ini, RunConfig};
pub use verify::{
    check_bessel_wronskian, check_bgu_symmetry, check_chebyshev_row, check_conjugated_b1, check_en_recurrence,
    check_en_series_vs_cf, check_radial_coefficients, check_refinement_invariance, check_sphere_radius, cmd_verify,
    seed_from_env, CheckResult, DEFAULT_SEED,
};

use crate::error::{Result, ScatterError};
use crate::par;
use clap::{Parser, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

/// Subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Oracle and invariant suite.
    Verify,
    /// Convergence study over the configured levels.
    Converge,
    /// Target strength over the configured wave numbers.
    Sweep,
    /// Far-field pattern over the configured angle grid.
    Farfield,
}

/// Command-line arguments.
#[derive(Debug, Clone, Parser)]
#[command(name = "scatter", about = "Isogeometric infinite-element scattering benchmarks")]
pub struct Args {
    /// Command to run.
    #[arg(value_enum)]
    pub command: Command,
    /// Configuration file (required except for `verify`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Exit with a nonzero code when a configured tolerance is violated.
    #[arg(long)]
    pub check: bool,
    /// Worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Strict single-threaded, byte-stable mode (timing columns are written as zero).
    #[arg(long)]
    pub deterministic: bool,
    /// CSV destination overriding `[output] path`.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// CSV of a convergence table.
pub fn converge_csv(rows: &[ConvergeRow]) -> String {
    let mut s = String::from("mesh,n_el,n_dof,h_max,energy_rel_err,h1_rel_err,t_sys,t_sol,slope\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.mesh,
            r.n_el,
            r.n_dof,
            fmt_f64(r.h_max),
            fmt_f64(r.energy_rel_err),
            fmt_f64(r.h1_rel_err),
            fmt_f64(r.t_sys),
            fmt_f64(r.t_sol),
            fmt_opt(r.slope)
        ));
    }
    s
}

/// CSV of a frequency sweep.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("k,kR0,TS_numeric,TS_analytic,energy_rel_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.k),
            fmt_f64(r.k_r0),
            fmt_f64(r.ts_numeric),
            fmt_f64(r.ts_analytic),
            fmt_f64(r.energy_rel_err)
        ));
    }
    s
}

/// CSV of a far-field pattern.
pub fn farfield_csv(rows: &[FarFieldRow]) -> String {
    let mut s = String::from("alpha_f,abs_p0,TS,TS_analytic,rel_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.alpha_deg),
            fmt_f64(r.abs_p0),
            fmt_f64(r.ts),
            fmt_f64(r.ts_analytic),
            fmt_f64(r.rel_err)
        ));
    }
    s
}

/// CSV of a verification report.
pub fn verify_csv(checks: &[CheckResult]) -> String {
    let mut s = String::from("check,value,tolerance,passed\n");
    for c in checks {
        s.push_str(&format!("{},{},{},{}\n", c.name, fmt_f64(c.value), fmt_f64(c.tolerance), c.passed));
    }
    s
}

/// Output of one command: CSV text and tolerance violations.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    /// CSV table.
    pub csv: String,
    /// Violated tolerances.
    pub violations: Vec<String>,
}

/// Runs a command on a parsed configuration (`None` only for `verify`).
pub fn execute(command: Command, cfg: Option<&RunConfig>, deterministic: bool) -> Result<CommandOutput> {
    if command == Command::Verify {
        let checks = cmd_verify(seed_from_env());
        let violations = checks.iter().filter(|c| !c.passed).map(|c| c.line()).collect();
        return Ok(CommandOutput { csv: verify_csv(&checks), violations });
    }
    let cfg = cfg.ok_or_else(|| ScatterError::Config("--config is required for this command".into()))?;
    Ok(match command {
        Command::Converge => {
            let rows = cmd_converge(cfg, deterministic)?;
            CommandOutput { csv: converge_csv(&rows), violations: check_converge(cfg, &rows) }
        }
        Command::Sweep => {
            let rows = cmd_sweep(cfg)?;
            CommandOutput { csv: sweep_csv(&rows), violations: check_sweep(cfg, &rows) }
        }
        Command::Farfield => {
            let rows = cmd_farfield(cfg)?;
            CommandOutput { csv: farfield_csv(&rows), violations: check_farfield(cfg, &rows) }
        }
        Command::Verify => unreachable!("handled above"),
    })
}

/// Entry point of the binary; returns the process exit code.
pub fn run(args: Args) -> Result<i32> {
    if let Some(n) = args.threads {
        par::init_threads(n);
    }
    par::set_sequential(args.deterministic);
    let cfg = args.config.as_deref().map(RunConfig::load).transpose()?;
    let out = execute(args.command, cfg.as_ref(), args.deterministic)?;
    let path = args.output.clone().or_else(|| cfg.as_ref().and_then(|c| c.output.clone()));
    match path {
        Some(p) => std::fs::write(&p, &out.csv)?,
        None => std::io::stdout().write_all(out.csv.as_bytes())?,
    }
    for v in &out.violations {
        eprintln!("violation: {v}");
    }
    Ok(if args.check && !out.violations.is_empty() { 1 } else { 0 })
}
