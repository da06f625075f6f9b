//! Finite time scales and grid functions.
//!
//! A [`TimeScale`] is a strictly increasing, finite set of reals
//! `a = t_0 < t_1 < ... < t_N = b`. On such a set every operator of the
//! delta and nabla calculi is a finite sum or difference quotient, so all
//! the classical identities (integration by parts, conversions between the
//! two calculi, endpoint splitting) hold exactly up to floating rounding.
//!
//! Points are canonical: lookups compare against the stored values with
//! exact equality, so callers must pass points obtained from the scale
//! itself (or bit-identical literals).

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A finite time scale.
#[derive(Clone)]
pub struct TimeScale {
    points: Arc<[f64]>,
}

impl fmt::Debug for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("TimeScale").field(&&*self.points).finish()
    }
}

impl PartialEq for TimeScale {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.points, &other.points) || self.points[..] == other.points[..]
    }
}

impl TimeScale {
    /// Builds a time scale from strictly increasing finite points.
    ///
    /// A single point is accepted; every derivative and integral rejects it.
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("time scale needs at least one point".into()));
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "point {i} is not finite ({})",
                points[i]
            )));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1] <= w[0] {
                let what = if w[1] == w[0] { "duplicate" } else { "unsorted" };
                return Err(Error::InvalidInput(format!(
                    "{what} points at index {}: {} then {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(TimeScale {
            points: points.into(),
        })
    }

    /// Uniform `n`-point sampling of `[a, b]`.
    ///
    /// This stands in for a continuous interval; quantities computed on it
    /// carry an `O((b - a) / n)` modeling error against the continuum.
    pub fn sampled_interval(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "sampled interval needs n >= 2, got {n}"
            )));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInput(format!(
                "sampled interval needs finite a < b, got [{a}, {b}]"
            )));
        }
        let h = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
        points[n - 1] = b;
        TimeScale::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of points, `N + 1`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn a(&self) -> f64 {
        self.points[0]
    }

    pub fn b(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Points strictly between `a` and `b`.
    pub fn interior_len(&self) -> usize {
        self.len().saturating_sub(2)
    }

    pub(crate) fn last(&self) -> usize {
        self.points.len() - 1
    }

    /// Index of `t`, which must be one of the stored points.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.points
            .binary_search_by(|p| p.total_cmp(&t))
            .map_err(|_| Error::domain(format!("{t} is not a point of the time scale")))
    }

    pub fn sigma_index(&self, i: usize) -> usize {
        (i + 1).min(self.last())
    }

    pub fn rho_index(&self, i: usize) -> usize {
        i.saturating_sub(1)
    }

    /// Forward graininess at index `i`; zero at `b`.
    pub fn mu_at(&self, i: usize) -> f64 {
        self.points[self.sigma_index(i)] - self.points[i]
    }

    /// Backward graininess at index `i`; zero at `a`.
    pub fn nu_at(&self, i: usize) -> f64 {
        self.points[i] - self.points[self.rho_index(i)]
    }

    pub fn sigma(&self, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.points[self.sigma_index(i)])
    }

    pub fn rho(&self, t: f64) -> Result<f64> {
        let i = self.index_of(t)?;
        Ok(self.points[self.rho_index(i)])
    }

    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.mu_at(self.index_of(t)?))
    }

    pub fn nu(&self, t: f64) -> Result<f64> {
        Ok(self.nu_at(self.index_of(t)?))
    }

    /// Index range covered by `domain` on this scale.
    pub fn range(&self, domain: impl Into<Domain>) -> Range<usize> {
        let d = domain.into();
        let n = self.len();
        if n == 1 {
            // sigma(a) = a and rho(b) = b: no truncation removes anything.
            return 0..1;
        }
        let lo = d.front.min(n);
        let hi = n.saturating_sub(d.back).max(lo);
        lo..hi
    }

    /// The points of `domain` as a time scale of their own.
    pub fn restrict(&self, domain: impl Into<Domain>) -> Result<TimeScale> {
        let r = self.range(domain);
        if r.is_empty() {
            return Err(Error::domain("restriction to an empty domain"));
        }
        if r == (0..self.len()) {
            return Ok(self.clone());
        }
        TimeScale::new(self.points[r].to_vec())
    }

    pub(crate) fn require_nondegenerate(&self, op: &str) -> Result<()> {
        if self.len() < 2 {
            Err(Error::domain(format!(
                "{op} needs a time scale with a < b (got a single point)"
            )))
        } else {
            Ok(())
        }
    }
}

/// Which of the two calculi an operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Calculus {
    Delta,
    Nabla,
}

/// Named truncations of `I = [a, b] ∩ T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DomainTag {
    /// `I`
    Full,
    /// `I^κ`: drops `b`.
    Kappa,
    /// `I_κ`: drops `a`.
    KappaSub,
    /// `I^κ_κ`: drops both endpoints.
    KappaBoth,
    /// `I^{κ²}`: drops the last two points.
    KappaSquared,
    /// `I_{κ²}`: drops the first two points.
    KappaSubSquared,
}

/// A domain of the form `{t_front, ..., t_{N - back}}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    pub front: usize,
    pub back: usize,
}

impl Domain {
    pub const FULL: Domain = Domain { front: 0, back: 0 };

    pub fn new(front: usize, back: usize) -> Domain {
        Domain { front, back }
    }

    pub fn tag(&self) -> Option<DomainTag> {
        Some(match (self.front, self.back) {
            (0, 0) => DomainTag::Full,
            (0, 1) => DomainTag::Kappa,
            (1, 0) => DomainTag::KappaSub,
            (1, 1) => DomainTag::KappaBoth,
            (0, 2) => DomainTag::KappaSquared,
            (2, 0) => DomainTag::KappaSubSquared,
            _ => return None,
        })
    }

    /// Intersection of two truncations.
    pub fn intersect(&self, other: Domain) -> Domain {
        Domain::new(self.front.max(other.front), self.back.max(other.back))
    }

    pub fn contains(&self, other: Domain) -> bool {
        self.front <= other.front && self.back <= other.back
    }
}

impl From<DomainTag> for Domain {
    fn from(tag: DomainTag) -> Domain {
        match tag {
            DomainTag::Full => Domain::new(0, 0),
            DomainTag::Kappa => Domain::new(0, 1),
            DomainTag::KappaSub => Domain::new(1, 0),
            DomainTag::KappaBoth => Domain::new(1, 1),
            DomainTag::KappaSquared => Domain::new(0, 2),
            DomainTag::KappaSubSquared => Domain::new(2, 0),
        }
    }
}

/// Real values attached to the points of a domain of a time scale.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    scale: TimeScale,
    domain: Domain,
    values: Vec<f64>,
}

impl GridFunction {
    /// A function on all of `T`.
    pub fn new(scale: TimeScale, values: Vec<f64>) -> Result<Self> {
        Self::on_domain(scale, Domain::FULL, values)
    }

    pub fn on_domain(scale: TimeScale, domain: impl Into<Domain>, values: Vec<f64>) -> Result<Self> {
        let domain = domain.into();
        let expected = scale.range(domain).len();
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "value {i} is not finite ({})",
                values[i]
            )));
        }
        Ok(GridFunction {
            scale,
            domain,
            values,
        })
    }

    pub fn from_fn(scale: &TimeScale, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = scale.points().iter().map(|&t| f(t)).collect();
        Self::new(scale.clone(), values)
    }

    pub fn constant(scale: &TimeScale, c: f64) -> Result<Self> {
        Self::new(scale.clone(), vec![c; scale.len()])
    }

    // Internal constructor for values already known to be finite, or for
    // intermediate results whose finiteness is checked by the caller.
    pub(crate) fn raw(scale: TimeScale, domain: Domain, values: Vec<f64>) -> Self {
        debug_assert_eq!(scale.range(domain).len(), values.len());
        GridFunction {
            scale,
            domain,
            values,
        }
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Scale indices covered by this function.
    pub fn indices(&self) -> Range<usize> {
        self.scale.range(self.domain)
    }

    pub fn at_index(&self, i: usize) -> Option<f64> {
        let r = self.indices();
        r.contains(&i).then(|| self.values[i - r.start])
    }

    pub(crate) fn expect_at(&self, i: usize) -> Result<f64> {
        self.at_index(i).ok_or_else(|| {
            Error::domain(format!(
                "t = {} is outside the function's domain {:?}",
                self.scale.points()[i],
                self.domain
            ))
        })
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        let i = self.scale.index_of(t)?;
        self.expect_at(i)
    }

    /// `(t, f(t))` pairs over the domain.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let pts = &self.scale.points()[self.indices()];
        pts.iter().copied().zip(self.values.iter().copied())
    }

    fn same_scale(&self, other: &GridFunction) -> Result<()> {
        if self.scale != other.scale {
            return Err(Error::ScaleMismatch("functions live on different time scales".into()));
        }
        Ok(())
    }

    /// Pointwise combination on the common domain.
    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.same_scale(other)?;
        let domain = self.domain.intersect(other.domain);
        let values = self
            .scale
            .range(domain)
            .map(|i| f(self.at_index(i).unwrap(), other.at_index(i).unwrap()))
            .collect();
        GridFunction::on_domain(self.scale.clone(), domain, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        GridFunction::on_domain(
            self.scale.clone(),
            self.domain,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// `a·self + b·other` on the common domain.
    pub fn linear_combination(&self, a: f64, other: &GridFunction, b: f64) -> Result<Self> {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn restrict(&self, domain: impl Into<Domain>) -> Result<Self> {
        let domain = domain.into();
        if !self.domain.contains(domain) {
            return Err(Error::domain(format!(
                "cannot restrict {:?} to the larger domain {:?}",
                self.domain, domain
            )));
        }
        let values = self
            .scale
            .range(domain)
            .map(|i| self.at_index(i).unwrap())
            .collect();
        Ok(GridFunction::raw(self.scale.clone(), domain, values))
    }

    /// The same values viewed as a full function on the time scale formed
    /// by the domain's points.
    pub fn on_own_scale(&self) -> Result<Self> {
        let scale = self.scale.restrict(self.domain)?;
        GridFunction::new(scale, self.values.clone())
    }

    /// `f^Δ(t) = (f(σ(t)) − f(t)) / μ(t)`, defined where both `t` and
    /// `σ(t)` are in the domain and `t < b`.
    pub fn delta_derivative(&self) -> Result<Self> {
        self.scale.require_nondegenerate("delta derivative")?;
        let domain = Domain::new(self.domain.front, self.domain.back + 1);
        let values: Vec<f64> = self
            .scale
            .range(domain)
            .map(|i| {
                let j = self.scale.sigma_index(i);
                (self.at_index(j).unwrap() - self.at_index(i).unwrap()) / self.scale.mu_at(i)
            })
            .collect();
        Ok(GridFunction::raw(self.scale.clone(), domain, values))
    }

    /// `f^∇(t) = (f(t) − f(ρ(t))) / ν(t)`, defined where both `t` and
    /// `ρ(t)` are in the domain and `t > a`.
    pub fn nabla_derivative(&self) -> Result<Self> {
        self.scale.require_nondegenerate("nabla derivative")?;
        let domain = Domain::new(self.domain.front + 1, self.domain.back);
        let values: Vec<f64> = self
            .scale
            .range(domain)
            .map(|i| {
                let j = self.scale.rho_index(i);
                (self.at_index(i).unwrap() - self.at_index(j).unwrap()) / self.scale.nu_at(i)
            })
            .collect();
        Ok(GridFunction::raw(self.scale.clone(), domain, values))
    }

    /// `f^σ = f ∘ σ`.
    pub fn shift_sigma(&self) -> Self {
        let d = self.domain;
        let domain = if d.back == 0 {
            Domain::new(d.front.saturating_sub(1), 0)
        } else {
            Domain::new(d.front.saturating_sub(1), d.back + 1)
        };
        let values = self
            .scale
            .range(domain)
            .map(|i| self.at_index(self.scale.sigma_index(i)).unwrap())
            .collect();
        GridFunction::raw(self.scale.clone(), domain, values)
    }

    /// `f^ρ = f ∘ ρ`.
    pub fn shift_rho(&self) -> Self {
        let d = self.domain;
        let domain = if d.front == 0 {
            Domain::new(0, d.back.saturating_sub(1))
        } else {
            Domain::new(d.front + 1, d.back.saturating_sub(1))
        };
        let values = self
            .scale
            .range(domain)
            .map(|i| self.at_index(self.scale.rho_index(i)).unwrap())
            .collect();
        GridFunction::raw(self.scale.clone(), domain, values)
    }

    fn integral_bounds(&self, lo: f64, hi: f64, op: &str) -> Result<(usize, usize)> {
        self.scale.require_nondegenerate(op)?;
        let i = self.scale.index_of(lo)?;
        let j = self.scale.index_of(hi)?;
        if i > j {
            return Err(Error::domain(format!("{op}: lower limit {lo} exceeds upper limit {hi}")));
        }
        Ok((i, j))
    }

    /// `∫_lo^hi f Δt = Σ_{t ∈ [lo, hi) ∩ T} μ(t) f(t)`.
    pub fn delta_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        let (i, j) = self.integral_bounds(lo, hi, "delta integral")?;
        let mut acc = 0.0;
        for k in i..j {
            acc += self.scale.mu_at(k) * self.expect_at(k)?;
        }
        Ok(acc)
    }

    /// `∫_lo^hi f ∇t = Σ_{t ∈ (lo, hi] ∩ T} ν(t) f(t)`.
    pub fn nabla_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        let (i, j) = self.integral_bounds(lo, hi, "nabla integral")?;
        let mut acc = 0.0;
        for k in i + 1..=j {
            acc += self.scale.nu_at(k) * self.expect_at(k)?;
        }
        Ok(acc)
    }

    /// Delta integral over all of `[a, b]`.
    pub fn delta_total(&self) -> Result<f64> {
        self.delta_integral(self.scale.a(), self.scale.b())
    }

    /// Nabla integral over all of `[a, b]`.
    pub fn nabla_total(&self) -> Result<f64> {
        self.nabla_integral(self.scale.a(), self.scale.b())
    }

    /// `A(t) = ∫_a^t f Δτ` at every point of `T`.
    pub fn delta_antiderivative(&self) -> Result<Self> {
        self.scale.require_nondegenerate("delta antiderivative")?;
        let n = self.scale.len();
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        out.push(acc);
        for k in 0..n - 1 {
            acc += self.scale.mu_at(k) * self.expect_at(k)?;
            out.push(acc);
        }
        Ok(GridFunction::raw(self.scale.clone(), Domain::FULL, out))
    }

    /// `B(t) = ∫_a^t f ∇τ` at every point of `T`.
    pub fn nabla_antiderivative(&self) -> Result<Self> {
        self.scale.require_nondegenerate("nabla antiderivative")?;
        let n = self.scale.len();
        let mut out = Vec::with_capacity(n);
        let mut acc = 0.0;
        out.push(acc);
        for k in 1..n {
            acc += self.scale.nu_at(k) * self.expect_at(k)?;
            out.push(acc);
        }
        Ok(GridFunction::raw(self.scale.clone(), Domain::FULL, out))
    }

    /// Largest absolute value over the domain.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Subtracts the mean over the domain.
    pub fn centered(&self) -> Self {
        if self.values.is_empty() {
            return self.clone();
        }
        let mean = self.values.iter().sum::<f64>() / self.values.len() as f64;
        let values = self.values.iter().map(|v| v - mean).collect();
        GridFunction::raw(self.scale.clone(), self.domain, values)
    }
}
