//! `tscv check`: audits a user-supplied trajectory.

use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use tscv::{Certificate, GridFunction, ProbeOptions, ProbeReport, Solution, TimeScale};

use crate::problem::{Model, Problem};

/// Reads the `t` and `y` columns of a trajectory CSV; other columns are
/// ignored, so `tscv solve` output can be fed back unchanged.
pub fn read_trajectory(path: &Path) -> Result<Vec<(f64, f64)>> {
    let file = File::open(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut rdr = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("{}: missing column `{name}`", path.display()))
    };
    let (ct, cy) = (column("t")?, column("y")?);
    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let record = record?;
        let cell = |c: usize, name: &str| -> Result<f64> {
            let s = record.get(c).unwrap_or("");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| anyhow!("row {}: column `{name}` is not a finite number: {s:?}", k + 1))
        };
        rows.push((cell(ct, "t")?, cell(cy, "y")?));
    }
    Ok(rows)
}

fn matches(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// The trajectory as a grid function on the problem's scale, after
/// checking its length, its points, and its boundary values.
pub fn trajectory(scale: &TimeScale, alpha: f64, beta: f64, rows: &[(f64, f64)]) -> Result<GridFunction> {
    if rows.len() != scale.len() {
        bail!("trajectory has {} rows but the time scale has {} points", rows.len(), scale.len());
    }
    for (k, (&(t, _), &p)) in rows.iter().zip(scale.points()).enumerate() {
        if !matches(t, p) {
            bail!("row {}: t = {t} does not match time-scale point {p}", k + 1);
        }
    }
    let (ya, yb) = (rows[0].1, rows[rows.len() - 1].1);
    if !matches(ya, alpha) {
        bail!("boundary mismatch at t = {}: y = {ya}, boundary.alpha = {alpha}", scale.a());
    }
    if !matches(yb, beta) {
        bail!("boundary mismatch at t = {}: y = {yb}, boundary.beta = {beta}", scale.b());
    }
    Ok(GridFunction::new(scale.clone(), rows.iter().map(|r| r.1).collect())?)
}

#[derive(Debug)]
pub struct Audit {
    pub residual_el1: f64,
    pub residual_el2: f64,
    pub directional_residual: Option<f64>,
    pub tol: f64,
    pub certificate: Certificate,
    pub probe: ProbeReport,
}

impl Audit {
    pub fn stationary(&self) -> bool {
        let worst = self
            .residual_el1
            .max(self.residual_el2)
            .max(self.directional_residual.unwrap_or(0.0));
        worst <= self.tol
    }
}

pub fn audit(problem: &Problem, rows: &[(f64, f64)], probe: &ProbeOptions) -> Result<Audit> {
    let p = problem.variational();
    let y = trajectory(p.scale(), p.alpha(), p.beta(), rows)?;
    let residual_el1 = p.el_residual_1(&y)?.max_abs();
    let residual_el2 = p.el_residual_2(&y)?.max_abs();
    let directional_residual = match &problem.model {
        Model::DeltaNabla(_) => None,
        Model::Directional { problem: d, .. } => Some(d.el_residual(&y)?.max_abs()),
    };
    let sol = Solution {
        objective: p.objective(&y)?,
        y,
        residual_el1,
        residual_el2,
        certificate: Certificate::None,
        iterations: 0,
        converged: false,
        gradient_norm: f64::NAN,
        tol: problem.solver.tol,
        directional_residual,
    };
    let certificate = p.certify(&sol, &tscv::CertifyOptions::with_exec(problem.solver.exec));
    let probe = p.local_min_probe(&sol, probe)?;
    Ok(Audit {
        residual_el1,
        residual_el2,
        directional_residual,
        tol: problem.solver.tol,
        certificate,
        probe,
    })
}
