//! `tscv`: solve delta-nabla and directional variational problems on finite
//! time scales, audit trajectories, and run the calculus identity suite.
//!
//! Exit codes: 0 success, 1 input error, 2 the solver did not converge or
//! the audited trajectory is not stationary.

mod check;
mod problem;
mod solve;

use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use tscv::identities::IdentitySuite;
use tscv::ProbeOptions;

use crate::problem::Problem;

#[derive(Debug, Parser)]
#[command(name = "tscv", version, about = "Calculus of variations on finite time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a problem file (JSON, or TOML for `.toml` files).
    Solve {
        file: PathBuf,
        /// Trajectory CSV; written to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON report with objective, certificate and convergence data.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Check the delta/nabla calculus identities on random time scales.
    Identities {
        #[arg(long, default_value_t = IdentitySuite::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = IdentitySuite::default().trials)]
        trials: usize,
    },
    /// Audit a trajectory CSV (columns `t`, `y`) against a problem file.
    Check {
        problem: PathBuf,
        trajectory: PathBuf,
        /// Seed of the perturbation probe.
        #[arg(long, default_value_t = ProbeOptions::default().seed)]
        seed: u64,
        /// Number of perturbation trials.
        #[arg(long, default_value_t = ProbeOptions::default().trials)]
        probe_trials: usize,
    },
}

const NOT_CONVERGED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve { file, out, report } => cmd_solve(&file, out, report),
        Command::Identities { seed, trials } => cmd_identities(seed, trials),
        Command::Check {
            problem,
            trajectory,
            seed,
            probe_trials,
        } => cmd_check(&problem, &trajectory, seed, probe_trials),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_solve(file: &Path, out: Option<PathBuf>, report: Option<PathBuf>) -> Result<ExitCode> {
    let problem = Problem::load(file)?;
    let sol = solve::solve(&problem)?;
    let rows = solve::table(problem.variational(), &sol.y)?;
    match &out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            solve::write_table(BufWriter::new(f), &rows)?;
        }
        None => solve::write_table(io::stdout().lock(), &rows)?,
    }
    if let Some(path) = &report {
        let json = solve::Report::new(&problem, &sol).to_json()?;
        fs::write(path, json + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    eprintln!(
        "{}: objective {}, certificate {}, {} iterations, residuals {:.3e} / {:.3e}",
        if sol.converged { "converged" } else { "not converged" },
        sol.objective,
        sol.certificate,
        sol.iterations,
        sol.residual_el1,
        sol.residual_el2,
    );
    Ok(if sol.converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

fn cmd_identities(seed: u64, trials: usize) -> Result<ExitCode> {
    if trials == 0 {
        eprintln!("warning: --trials 0 runs no trials; the suite passes vacuously");
    }
    let suite = IdentitySuite {
        seed,
        trials,
        ..IdentitySuite::default()
    };
    let report = suite.run(Default::default())?;
    let width = report.rows.iter().map(|r| r.identity.name().len()).max().unwrap_or(0);
    println!("{:<22} {:<width$} {:>11}  result", "family", "identity", "max rel err");
    for row in &report.rows {
        println!(
            "{:<22} {:<width$} {:>11.3e}  {}",
            row.identity.family().to_string(),
            row.identity.name(),
            row.max_rel_error,
            if row.passed { "pass" } else { "FAIL" }
        );
    }
    println!("{} trials, seed {seed}, tolerance {:e}", report.trials, report.tolerance);
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NOT_CONVERGED)
    })
}

fn cmd_check(problem: &Path, trajectory: &Path, seed: u64, trials: usize) -> Result<ExitCode> {
    let problem = Problem::load(problem)?;
    let rows = check::read_trajectory(trajectory)?;
    let probe = ProbeOptions {
        seed,
        trials,
        exec: problem.solver.exec,
        ..ProbeOptions::default()
    };
    let audit = check::audit(&problem, &rows, &probe)?;
    println!("residual_el1 {:.3e}", audit.residual_el1);
    println!("residual_el2 {:.3e}", audit.residual_el2);
    if let Some(r) = audit.directional_residual {
        println!("residual_directional {r:.3e}");
    }
    println!("tol {:e}", audit.tol);
    println!("certificate {}", audit.certificate);
    println!(
        "probe {} ({} of {} trials failed, worst margin {:.3e})",
        if audit.probe.passed() { "pass" } else { "fail" },
        audit.probe.failures,
        audit.probe.trials,
        audit.probe.worst_margin
    );
    if audit.stationary() {
        println!("stationary: yes");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("stationary: no");
        Ok(ExitCode::from(NOT_CONVERGED))
    }
}
