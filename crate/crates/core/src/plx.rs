//! Piecewise-linear extension of grid functions, directional derivatives
//! and epigraph convexity.
//!
//! For `f : T → R` the extension `f̄ : [a, b] → R` is the function whose
//! epigraph is the convex hull `G(f)` of each gap's two epigraph rays:
//! `f̄(αs + βσ(s)) = αf(s) + βf(σ(s))` for `α + β = 1`, `α, β ≥ 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::timescale::{Domain, GridFunction, TimeScale};

/// A nonzero direction `u`; `u > 0` selects the delta side, `u < 0` the
/// nabla side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction(f64);

impl Direction {
    pub fn new(u: f64) -> Result<Self> {
        if !u.is_finite() {
            return Err(Error::InvalidProblem(format!("direction u = {u} is not finite")));
        }
        if u == 0.0 {
            return Err(Error::InvalidProblem(
                "direction u = 0 leaves nothing to extremize".into(),
            ));
        }
        Ok(Direction(u))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_forward(self) -> bool {
        self.0 > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Location {
    Point(usize),
    /// Strictly inside `(t_i, t_{i+1})`.
    Gap(usize),
}

/// The piecewise-linear function `f̄` on `[a, b]`.
#[derive(Clone, Debug)]
pub struct PLExtension {
    base: GridFunction,
}

/// Builds `f̄`. `f` must be defined on all of `T`.
pub fn extend(f: &GridFunction) -> Result<PLExtension> {
    PLExtension::new(f)
}

impl PLExtension {
    pub fn new(f: &GridFunction) -> Result<Self> {
        if f.domain() != Domain::FULL {
            return Err(Error::domain("extension needs a function on all of T"));
        }
        Ok(PLExtension { base: f.clone() })
    }

    pub fn base(&self) -> &GridFunction {
        &self.base
    }

    fn scale(&self) -> &TimeScale {
        self.base.scale()
    }

    fn locate(&self, t: f64) -> Result<Location> {
        let ts = self.scale();
        if !(t >= ts.a() && t <= ts.b()) {
            return Err(Error::domain(format!(
                "{t} is outside [{}, {}]",
                ts.a(),
                ts.b()
            )));
        }
        match ts.points().binary_search_by(|p| p.total_cmp(&t)) {
            Ok(i) => Ok(Location::Point(i)),
            Err(i) => Ok(Location::Gap(i - 1)),
        }
    }

    /// `(s index, α, β)` with `t = α·s + β·σ(s)`.
    fn weights(&self, t: f64) -> Result<(usize, f64, f64)> {
        let pts = self.scale().points();
        Ok(match self.locate(t)? {
            Location::Point(i) => (i, 1.0, 0.0),
            Location::Gap(i) => {
                let mu = pts[i + 1] - pts[i];
                let beta = (t - pts[i]) / mu;
                (i, 1.0 - beta, beta)
            }
        })
    }

    /// `f̄(t)`; exact at points of `T`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let (i, alpha, beta) = self.weights(t)?;
        let v = self.base.values();
        if beta == 0.0 {
            return Ok(v[i]);
        }
        Ok(alpha * v[i] + beta * v[i + 1])
    }

    /// `f(s) + (f(σ(s)) − f(s)) / μ(s) · (t − s)` with `t ∈ (s, σ(s))`.
    pub fn eval_right_scattered(&self, t: f64) -> Result<f64> {
        let v = self.base.values();
        Ok(match self.locate(t)? {
            Location::Point(i) => v[i],
            Location::Gap(i) => {
                let pts = self.scale().points();
                let mu = pts[i + 1] - pts[i];
                v[i] + (v[i + 1] - v[i]) / mu * (t - pts[i])
            }
        })
    }

    /// `f(s) + (f(s) − f(ρ(s))) / ν(s) · (t − s)` with `t ∈ (ρ(s), s)`.
    pub fn eval_left_scattered(&self, t: f64) -> Result<f64> {
        let v = self.base.values();
        Ok(match self.locate(t)? {
            Location::Point(i) => v[i],
            Location::Gap(i) => {
                let pts = self.scale().points();
                let s = i + 1;
                let nu = pts[s] - pts[i];
                v[s] + (v[s] - v[i]) / nu * (t - pts[s])
            }
        })
    }

    /// Membership of `(t, λ)` in `G(f) = Epi(f̄)`.
    pub fn epigraph_contains(&self, t: f64, lambda: f64) -> Result<bool> {
        Ok(lambda >= self.eval(t)?)
    }
}

/// `D f̄(t)(u) = lim_{h→0⁺} (f̄(t + hu) − f̄(t)) / h` at a point `t` of `T`,
/// in closed form: `u·f^Δ(t)` for `u > 0` and `u·f^∇(t)` for `u < 0`.
///
/// The one-sided limit only needs `t + hu ∈ [a, b]` for small `h`, so
/// `t = a` is accepted for `u > 0` and `t = b` for `u < 0`.
pub fn directional_derivative(f: &GridFunction, t: f64, u: f64) -> Result<f64> {
    let ts = f.scale();
    let i = ts.index_of(t)?;
    if u == 0.0 {
        return Ok(0.0);
    }
    if !u.is_finite() {
        return Err(Error::domain(format!("direction {u} is not finite")));
    }
    if u > 0.0 {
        if i == ts.last() {
            return Err(Error::domain(format!(
                "direction {u} leaves [a, b] at t = b = {t}"
            )));
        }
        let d = (f.expect_at(i + 1)? - f.expect_at(i)?) / ts.mu_at(i);
        Ok(u * d)
    } else {
        if i == 0 {
            return Err(Error::domain(format!(
                "direction {u} leaves [a, b] at t = a = {t}"
            )));
        }
        let d = (f.expect_at(i)? - f.expect_at(i - 1)?) / ts.nu_at(i);
        Ok(u * d)
    }
}

/// Step `h` that keeps `t + hu` strictly inside the gap adjacent to `t` on
/// the side selected by `u`.
pub fn default_quotient_step(scale: &TimeScale, t: f64, u: f64) -> Result<f64> {
    let i = scale.index_of(t)?;
    let mut gap = f64::INFINITY;
    if i < scale.last() {
        gap = gap.min(scale.mu_at(i));
    }
    if i > 0 {
        gap = gap.min(scale.nu_at(i));
    }
    if !gap.is_finite() {
        return Err(Error::domain("single-point scale has no gaps"));
    }
    Ok(gap / (8.0 * u.abs().max(1.0)))
}

/// `(f̄(t + hu) − f̄(t)) / h`, the difference quotient whose `h → 0⁺`
/// limit defines the directional derivative.
pub fn directional_quotient(f: &GridFunction, t: f64, u: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("quotient step must be positive, got {h}")));
    }
    let ext = extend(f)?;
    let x = t + h * u;
    Ok((ext.eval(x)? - ext.eval(t)?) / h)
}

/// Secant slopes are nondecreasing, i.e. `f̄` (equivalently `G(f)`, and `f`
/// on `T`) is convex. Scales with fewer than three points are convex.
pub fn is_convex(f: &GridFunction) -> bool {
    let pts = &f.scale().points()[f.indices()];
    let v = f.values();
    let slopes: Vec<f64> = (1..v.len())
        .map(|i| (v[i] - v[i - 1]) / (pts[i] - pts[i - 1]))
        .collect();
    slopes.windows(2).all(|w| w[0] <= w[1])
}

// Triples (x, y, α) to test α f̄(x) + (1 − α) f̄(y) ≥ f̄(αx + (1 − α)y):
// one straddling every interior breakpoint, then `samples` random ones.
fn probe_triples(scale: &TimeScale, samples: usize, seed: u64) -> Vec<(f64, f64, f64)> {
    let pts = scale.points();
    let mut out = Vec::with_capacity(pts.len() + samples);
    for i in 1..pts.len().saturating_sub(1) {
        let (x, y) = (pts[i - 1], pts[i + 1]);
        out.push((x, y, (y - pts[i]) / (y - x)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (scale.a(), scale.b());
    if a < b {
        for _ in 0..samples {
            let x = rng.gen_range(a..=b);
            let y = rng.gen_range(a..=b);
            out.push((x, y, rng.gen_range(0.0..=1.0)));
        }
    }
    out
}

fn slack(f: &GridFunction) -> f64 {
    1e-9 * f.max_abs().max(1.0)
}

/// Midpoint-style convexity check of `f̄` on sampled triples.
pub fn sampled_convexity(f: &GridFunction, samples: usize, seed: u64) -> Result<bool> {
    let ext = extend(f)?;
    let tol = slack(f);
    let (a, b) = (f.scale().a(), f.scale().b());
    for (x, y, al) in probe_triples(f.scale(), samples, seed) {
        let z = (al * x + (1.0 - al) * y).clamp(a, b);
        let chord = al * ext.eval(x)? + (1.0 - al) * ext.eval(y)?;
        if chord + tol < ext.eval(z)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convexity of `G(f)` probed through membership alone: convex
/// combinations of boundary points of `G(f)` (lifted by random heights)
/// must stay in `G(f)`.
pub fn epigraph_convexity(f: &GridFunction, samples: usize, seed: u64) -> Result<bool> {
    let ext = extend(f)?;
    let tol = slack(f);
    let (a, b) = (f.scale().a(), f.scale().b());
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    for (x, y, al) in probe_triples(f.scale(), samples, seed) {
        let lift_x = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) };
        let lift_y = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..1.0) };
        let p = (x, ext.eval(x)? + lift_x);
        let q = (y, ext.eval(y)? + lift_y);
        debug_assert!(ext.epigraph_contains(p.0, p.1)? && ext.epigraph_contains(q.0, q.1)?);
        let t = (al * p.0 + (1.0 - al) * q.0).clamp(a, b);
        let lambda = al * p.1 + (1.0 - al) * q.1;
        if !ext.epigraph_contains(t, lambda + tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
