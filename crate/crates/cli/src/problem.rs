//! Problem files: JSON, or TOML when the file name ends in `.toml`.
//!
//! ```toml
//! kind = "delta-nabla"
//! gamma1 = 1.0
//! gamma2 = 1.0
//! lagrangian_delta = "t*v^2"
//! lagrangian_nabla = "t*v^2"
//!
//! [timescale]
//! points = [1, 3, 4]
//!
//! [boundary]
//! alpha = 0
//! beta = 1
//!
//! [solver]
//! tol = 1e-10
//! max_iter = 200
//! ```

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use tscv::{
    DeltaNablaProblem, DirectionalProblem, ExprLagrangian, SharedLagrangian, SolveOptions,
    TimeScale, VariationalProblem,
};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    timescale: Option<RawTimescale>,
    kind: Option<String>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    u: Option<f64>,
    lagrangian_delta: Option<String>,
    lagrangian_nabla: Option<String>,
    lagrangian: Option<String>,
    boundary: Option<RawBoundary>,
    solver: Option<RawSolver>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimescale {
    points: Option<Vec<f64>>,
    interval: Option<RawInterval>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    a: Option<f64>,
    b: Option<f64>,
    n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundary {
    alpha: Option<f64>,
    beta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    tol: Option<f64>,
    max_iter: Option<usize>,
}

/// How the time scale was given, recorded in reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Points { n: usize },
    Interval { a: f64, b: f64, n: usize },
}

#[derive(Clone, Debug)]
pub enum Model {
    DeltaNabla(DeltaNablaProblem),
    Directional {
        problem: DirectionalProblem,
        reduced: DeltaNablaProblem,
    },
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub model: Model,
    pub sampling: Sampling,
    pub solver: SolveOptions,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem> {
        let src = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let parsed = if is_toml { Problem::from_toml(&src) } else { Problem::from_json(&src) };
        parsed.with_context(|| format!("invalid problem file {}", path.display()))
    }

    pub fn from_json(src: &str) -> Result<Problem> {
        let raw: RawProblem = serde_json::from_str(src).map_err(|e| anyhow!("{e}"))?;
        Problem::validate(raw)
    }

    pub fn from_toml(src: &str) -> Result<Problem> {
        let raw: RawProblem = toml::from_str(src).map_err(|e| anyhow!("{}", e.message()))?;
        Problem::validate(raw)
    }

    /// The problem whose Euler-Lagrange residuals and certificate apply:
    /// the problem itself, or the reduced problem of a directional one.
    pub fn variational(&self) -> &VariationalProblem {
        match &self.model {
            Model::DeltaNabla(p) => p,
            Model::Directional { reduced, .. } => reduced,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.model {
            Model::DeltaNabla(_) => "delta-nabla",
            Model::Directional { .. } => "directional",
        }
    }

    fn validate(raw: RawProblem) -> Result<Problem> {
        let (scale, sampling) = timescale(raw.timescale)?;
        let boundary = raw.boundary.ok_or_else(|| anyhow!("boundary: missing"))?;
        let alpha = finite("boundary.alpha", boundary.alpha)?;
        let beta = finite("boundary.beta", boundary.beta)?;
        let solver = solver_options(raw.solver)?;
        let kind = raw.kind.ok_or_else(|| anyhow!("kind: missing (expected \"delta-nabla\" or \"directional\")"))?;
        let model = match kind.as_str() {
            "delta-nabla" => {
                reject("u", raw.u.is_some(), &kind)?;
                let g1 = finite("gamma1", raw.gamma1)?;
                let g2 = finite("gamma2", raw.gamma2)?;
                if g1 == 0.0 && g2 == 0.0 {
                    bail!("gamma1, gamma2: cannot both be zero");
                }
                let shared = raw.lagrangian.as_deref();
                let ld = term_lagrangian("lagrangian_delta", raw.lagrangian_delta.as_deref(), shared, g1)?;
                let ln = term_lagrangian("lagrangian_nabla", raw.lagrangian_nabla.as_deref(), shared, g2)?;
                let p = DeltaNablaProblem::new(scale, g1, g2, ld, ln, alpha, beta).map_err(|e| anyhow!("timescale: {e}"))?;
                Model::DeltaNabla(p)
            }
            "directional" => {
                reject("gamma1", raw.gamma1.is_some(), &kind)?;
                reject("gamma2", raw.gamma2.is_some(), &kind)?;
                reject("lagrangian_delta", raw.lagrangian_delta.is_some(), &kind)?;
                reject("lagrangian_nabla", raw.lagrangian_nabla.is_some(), &kind)?;
                let u = finite("u", raw.u)?;
                if u == 0.0 {
                    bail!("u: must be nonzero");
                }
                let src = raw.lagrangian.ok_or_else(|| anyhow!("lagrangian: missing"))?;
                let l = lagrangian("lagrangian", &src)?;
                let problem = DirectionalProblem::new(scale, u, l, alpha, beta).map_err(|e| anyhow!("timescale: {e}"))?;
                let reduced = problem.reduced_problem().map_err(|e| anyhow!("{e}"))?;
                Model::Directional { problem, reduced }
            }
            other => bail!("kind: unknown kind \"{other}\" (expected \"delta-nabla\" or \"directional\")"),
        };
        Ok(Problem {
            model,
            sampling,
            solver,
        })
    }
}

fn finite(key: &str, value: Option<f64>) -> Result<f64> {
    match value {
        None => bail!("{key}: missing"),
        Some(v) if !v.is_finite() => bail!("{key}: must be finite, got {v}"),
        Some(v) => Ok(v),
    }
}

fn reject(key: &str, present: bool, kind: &str) -> Result<()> {
    if present {
        bail!("{key}: not allowed for kind \"{kind}\"");
    }
    Ok(())
}

fn lagrangian(key: &str, src: &str) -> Result<SharedLagrangian> {
    let l = ExprLagrangian::parse(src).map_err(|e| anyhow!("{key}: {e}"))?;
    Ok(l.shared())
}

/// A term's own Lagrangian, else the shared `lagrangian`, else zero when
/// the term carries no weight.
fn term_lagrangian(key: &str, own: Option<&str>, shared: Option<&str>, weight: f64) -> Result<SharedLagrangian> {
    match own.or(shared) {
        Some(src) => lagrangian(key, src),
        None if weight == 0.0 => lagrangian(key, "0"),
        None => bail!("{key}: missing (or give a shared `lagrangian`)"),
    }
}

fn timescale(raw: Option<RawTimescale>) -> Result<(TimeScale, Sampling)> {
    let raw = raw.ok_or_else(|| anyhow!("timescale: missing"))?;
    match (raw.points, raw.interval) {
        (Some(_), Some(_)) => bail!("timescale: give either `points` or `interval`, not both"),
        (None, None) => bail!("timescale: missing `points` or `interval`"),
        (Some(points), None) => {
            let n = points.len();
            let ts = TimeScale::new(points).map_err(|e| anyhow!("timescale.points: {e}"))?;
            Ok((ts, Sampling::Points { n }))
        }
        (None, Some(iv)) => {
            let a = finite("timescale.interval.a", iv.a)?;
            let b = finite("timescale.interval.b", iv.b)?;
            let n = iv.n.ok_or_else(|| anyhow!("timescale.interval.n: missing"))?;
            let ts = TimeScale::sampled_interval(a, b, n).map_err(|e| anyhow!("timescale.interval: {e}"))?;
            Ok((ts, Sampling::Interval { a, b, n }))
        }
    }
}

fn solver_options(raw: Option<RawSolver>) -> Result<SolveOptions> {
    let mut opts = SolveOptions::default();
    let Some(raw) = raw else {
        return Ok(opts);
    };
    if let Some(tol) = raw.tol {
        if !(tol.is_finite() && tol > 0.0) {
            bail!("solver.tol: must be positive, got {tol}");
        }
        opts.tol = tol;
    }
    if let Some(max_iter) = raw.max_iter {
        opts.max_iter = max_iter;
    }
    Ok(opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "timescale": {"points": [1, 3, 4]},
        "kind": "delta-nabla",
        "gamma1": 1, "gamma2": 1,
        "lagrangian_delta": "t*v^2", "lagrangian_nabla": "t*v^2",
        "boundary": {"alpha": 0, "beta": 1}
    }"#;

    fn error_of(src: &str) -> String {
        format!("{:#}", Problem::from_json(src).unwrap_err())
    }

    #[test]
    fn example_file_loads() {
        let p = Problem::from_json(EXAMPLE).unwrap();
        assert_eq!(p.kind(), "delta-nabla");
        assert_eq!(p.variational().scale().points(), &[1.0, 3.0, 4.0]);
        assert_eq!(p.sampling, Sampling::Points { n: 3 });
        assert_eq!(p.solver.tol, 1e-10);
    }

    #[test]
    fn toml_matches_json() {
        let src = r#"
            kind = "delta-nabla"
            gamma1 = 1
            gamma2 = 1
            lagrangian = "t*v^2"
            [timescale]
            points = [1, 3, 4]
            [boundary]
            alpha = 0
            beta = 1
            [solver]
            max_iter = 7
        "#;
        let p = Problem::from_toml(src).unwrap();
        assert_eq!(p.variational().scale().points(), &[1.0, 3.0, 4.0]);
        assert_eq!(p.solver.max_iter, 7);
        assert_eq!(p.variational().terms().len(), 2);
    }

    #[test]
    fn errors_name_the_key() {
        let missing_beta = EXAMPLE.replace(r#", "beta": 1"#, "");
        assert!(error_of(&missing_beta).contains("boundary.beta"));
        let zero = EXAMPLE.replace(r#""gamma1": 1, "gamma2": 1"#, r#""gamma1": 0, "gamma2": 0"#);
        assert!(error_of(&zero).contains("gamma1, gamma2"));
        let unsorted = EXAMPLE.replace("[1, 3, 4]", "[1, 4, 3]");
        assert!(error_of(&unsorted).contains("timescale.points"));
        let duplicate = EXAMPLE.replace("[1, 3, 4]", "[1, 3, 3, 4]");
        assert!(error_of(&duplicate).contains("timescale.points"));
        let bad_expr = EXAMPLE.replace(r#""lagrangian_nabla": "t*v^2""#, r#""lagrangian_nabla": "t*(""#);
        assert!(error_of(&bad_expr).contains("lagrangian_nabla"));
        let typo = EXAMPLE.replace("gamma2", "gama2");
        assert!(error_of(&typo).contains("gama2"));
    }

    #[test]
    fn directional_validation() {
        let base = r#"{"timescale": {"interval": {"a": 0, "b": 1, "n": 5}}, "kind": "directional",
            "u": U, "lagrangian": "v^2", "boundary": {"alpha": 0, "beta": 1}}"#;
        let p = Problem::from_json(&base.replace("U", "-1")).unwrap();
        assert_eq!(p.kind(), "directional");
        assert_eq!(p.sampling, Sampling::Interval { a: 0.0, b: 1.0, n: 5 });
        assert!(error_of(&base.replace("U", "0")).starts_with("u:"));
        let mixed = base.replace("U", "1").replace(r#""kind""#, r#""gamma1": 1, "kind""#);
        assert!(error_of(&mixed).contains("gamma1"));
    }

    #[test]
    fn weightless_term_needs_no_lagrangian() {
        let src = EXAMPLE
            .replace(r#""gamma2": 1"#, r#""gamma2": 0"#)
            .replace(r#", "lagrangian_nabla": "t*v^2""#, "");
        let p = Problem::from_json(&src).unwrap();
        assert_eq!(p.variational().terms().len(), 1);
        let src = EXAMPLE.replace(r#", "lagrangian_nabla": "t*v^2""#, "");
        assert!(error_of(&src).contains("lagrangian_nabla"));
    }
}
