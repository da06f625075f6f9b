//! `tscv solve`: trajectory table and JSON report.

use std::io::Write;

use anyhow::{Context, Result};
use serde::Serialize;

use tscv::{GridFunction, Solution, VariationalProblem};

use crate::problem::{Model, Problem, Sampling};

pub const COLUMNS: [&str; 6] = ["t", "y", "y_delta", "y_nabla", "residual_el1", "residual_el2"];

/// One row per time-scale point; `None` where the point lies outside the
/// quantity's domain.
pub fn table(p: &VariationalProblem, y: &GridFunction) -> Result<Vec<[Option<f64>; 6]>> {
    let dy = y.delta_derivative()?;
    let ny = y.nabla_derivative()?;
    let r1 = p.el_residual_1(y)?;
    let r2 = p.el_residual_2(y)?;
    Ok(p
        .scale()
        .points()
        .iter()
        .enumerate()
        .map(|(i, &t)| [Some(t), y.at_index(i), dy.at_index(i), ny.at_index(i), r1.at_index(i), r2.at_index(i)])
        .collect())
}

pub fn write_table(out: impl Write, rows: &[[Option<f64>; 6]]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.iter().map(|c| c.map(|v| format!("{v:?}")).unwrap_or_default()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub kind: &'static str,
    pub sampling: Sampling,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    pub lagrangians: Vec<String>,
    pub objective: f64,
    pub certificate: &'static str,
    pub converged: bool,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub residual_el1: f64,
    pub residual_el2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directional_residual: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Report {
    pub fn new(problem: &Problem, sol: &Solution) -> Report {
        let (gamma1, gamma2, u, lagrangians) = match &problem.model {
            Model::DeltaNabla(p) => (
                Some(p.gamma1()),
                Some(p.gamma2()),
                None,
                p.terms().iter().map(|t| t.lagrangian.describe()).collect(),
            ),
            Model::Directional { problem: d, .. } => (None, None, Some(d.u()), vec![d.lagrangian().describe()]),
        };
        Report {
            kind: problem.kind(),
            sampling: problem.sampling.clone(),
            gamma1,
            gamma2,
            u,
            lagrangians,
            objective: sol.objective,
            certificate: sol.certificate.as_str(),
            converged: sol.converged,
            iterations: sol.iterations,
            gradient_norm: sol.gradient_norm,
            residual_el1: sol.residual_el1,
            residual_el2: sol.residual_el2,
            directional_residual: sol.directional_residual,
            tol: problem.solver.tol,
            max_iter: problem.solver.max_iter,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).context("cannot serialize report")
    }
}

pub fn solve(problem: &Problem) -> Result<Solution> {
    let sol = match &problem.model {
        Model::DeltaNabla(p) => p.solve(&problem.solver)?,
        Model::Directional { problem: d, .. } => tscv::solve_directional(d, &problem.solver)?,
    };
    Ok(sol)
}
