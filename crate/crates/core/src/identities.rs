//! Executable checks of the classical identities of the delta and nabla
//! calculi on random finite time scales.
//!
//! Each identity is evaluated as `lhs` versus `rhs` and reported as a
//! relative error `|lhs - rhs| / M`, where `M` is the sum of the absolute
//! values of every summand that enters either side. Normalising by the
//! summand mass rather than by `|lhs|` keeps the measure meaningful when
//! the two sides cancel to something small.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::par::{try_map_indexed, Execution};
use crate::timescale::{GridFunction, TimeScale};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdentityFamily {
    UsefulFormulas,
    DerivativeConversion,
    IntegralConversion,
    IntegrationByParts,
    EndpointSplitting,
    FundamentalTheorem,
}

impl fmt::Display for IdentityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IdentityFamily::UsefulFormulas => "useful formulas",
            IdentityFamily::DerivativeConversion => "derivative conversion",
            IdentityFamily::IntegralConversion => "integral conversion",
            IdentityFamily::IntegrationByParts => "integration by parts",
            IdentityFamily::EndpointSplitting => "endpoint splitting",
            IdentityFamily::FundamentalTheorem => "fundamental theorem",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `f^σ = f + μ f^Δ` on `I^κ`
    SigmaFormula,
    /// `f^ρ = f − ν f^∇` on `I_κ`
    RhoFormula,
    /// `f^∇ = (f^Δ)^ρ` on `I_κ`
    NablaFromDelta,
    /// `f^Δ = (f^∇)^σ` on `I^κ`
    DeltaFromNabla,
    /// `∫ f Δt = ∫ f^ρ ∇t`
    DeltaToNabla,
    /// `∫ f ∇t = ∫ f^σ Δt`
    NablaToDelta,
    /// `∫ f^σ g^Δ Δt = [fg] − ∫ f^Δ g Δt`
    PartsDeltaShifted,
    /// `∫ f g^Δ Δt = [fg] − ∫ f^Δ g^σ Δt`
    PartsDelta,
    /// `∫ f^ρ g^∇ ∇t = [fg] − ∫ f^∇ g ∇t`
    PartsNablaShifted,
    /// `∫ f g^∇ ∇t = [fg] − ∫ f^∇ g^ρ ∇t`
    PartsNabla,
    /// `∫_a^b f Δt = ∫_a^{ρ(b)} f Δt + (b − ρ(b)) f^ρ(b)`
    SplitDeltaRight,
    /// `∫_a^b f Δt = (σ(a) − a) f(a) + ∫_{σ(a)}^b f Δt`
    SplitDeltaLeft,
    /// `∫_a^b f ∇t = ∫_a^{ρ(b)} f ∇t + (b − ρ(b)) f(b)`
    SplitNablaRight,
    /// `∫_a^b f ∇t = (σ(a) − a) f^σ(a) + ∫_{σ(a)}^b f ∇t`
    SplitNablaLeft,
    /// `∫_a^b f^Δ Δt = f(b) − f(a)`
    FundamentalDelta,
    /// `∫_a^b f^∇ ∇t = f(b) − f(a)`
    FundamentalNabla,
}

impl Identity {
    pub const ALL: [Identity; 16] = [
        Identity::SigmaFormula,
        Identity::RhoFormula,
        Identity::NablaFromDelta,
        Identity::DeltaFromNabla,
        Identity::DeltaToNabla,
        Identity::NablaToDelta,
        Identity::PartsDeltaShifted,
        Identity::PartsDelta,
        Identity::PartsNablaShifted,
        Identity::PartsNabla,
        Identity::SplitDeltaRight,
        Identity::SplitDeltaLeft,
        Identity::SplitNablaRight,
        Identity::SplitNablaLeft,
        Identity::FundamentalDelta,
        Identity::FundamentalNabla,
    ];

    pub fn family(self) -> IdentityFamily {
        use Identity::*;
        match self {
            SigmaFormula | RhoFormula => IdentityFamily::UsefulFormulas,
            NablaFromDelta | DeltaFromNabla => IdentityFamily::DerivativeConversion,
            DeltaToNabla | NablaToDelta => IdentityFamily::IntegralConversion,
            PartsDeltaShifted | PartsDelta | PartsNablaShifted | PartsNabla => {
                IdentityFamily::IntegrationByParts
            }
            SplitDeltaRight | SplitDeltaLeft | SplitNablaRight | SplitNablaLeft => {
                IdentityFamily::EndpointSplitting
            }
            FundamentalDelta | FundamentalNabla => IdentityFamily::FundamentalTheorem,
        }
    }

    pub fn name(self) -> &'static str {
        use Identity::*;
        match self {
            SigmaFormula => "f^sigma = f + mu f^delta",
            RhoFormula => "f^rho = f - nu f^nabla",
            NablaFromDelta => "f^nabla = (f^delta)^rho",
            DeltaFromNabla => "f^delta = (f^nabla)^sigma",
            DeltaToNabla => "int f dt_delta = int f^rho dt_nabla",
            NablaToDelta => "int f dt_nabla = int f^sigma dt_delta",
            PartsDeltaShifted => "parts: f^sigma g^delta",
            PartsDelta => "parts: f g^delta",
            PartsNablaShifted => "parts: f^rho g^nabla",
            PartsNabla => "parts: f g^nabla",
            SplitDeltaRight => "split delta at rho(b)",
            SplitDeltaLeft => "split delta at sigma(a)",
            SplitNablaRight => "split nabla at rho(b)",
            SplitNablaLeft => "split nabla at sigma(a)",
            FundamentalDelta => "int f^delta dt_delta = f(b) - f(a)",
            FundamentalNabla => "int f^nabla dt_nabla = f(b) - f(a)",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn rel(lhs: f64, rhs: f64, mass: f64) -> f64 {
    let diff = (lhs - rhs).abs();
    if diff == 0.0 {
        0.0
    } else {
        diff / mass.max(f64::MIN_POSITIVE)
    }
}

// (∫ h Δt, ∫ |h| Δt) over [a, b]
fn delta_pair(h: &GridFunction) -> Result<(f64, f64)> {
    Ok((h.delta_total()?, h.map(f64::abs)?.delta_total()?))
}

fn nabla_pair(h: &GridFunction) -> Result<(f64, f64)> {
    Ok((h.nabla_total()?, h.map(f64::abs)?.nabla_total()?))
}

fn pointwise_max(lhs: &GridFunction, rhs: &GridFunction, mass: &GridFunction) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in lhs.indices() {
        let l = lhs.expect_at(i)?;
        let r = rhs.expect_at(i)?;
        let m = mass.expect_at(i)?;
        worst = worst.max(rel(l, r, m));
    }
    Ok(worst)
}

/// Relative error of `identity` for the functions `f` and `g` (only the
/// integration-by-parts identities use `g`).
pub fn check(identity: Identity, f: &GridFunction, g: &GridFunction) -> Result<f64> {
    use Identity::*;
    let ts = f.scale();
    let (a, b) = (ts.a(), ts.b());
    let boundary = |f: &GridFunction, g: &GridFunction| -> Result<(f64, f64)> {
        let fb = f.value_at(b)? * g.value_at(b)?;
        let fa = f.value_at(a)? * g.value_at(a)?;
        Ok((fb - fa, fb.abs() + fa.abs()))
    };
    match identity {
        SigmaFormula => {
            let fd = f.delta_derivative()?;
            let mu = GridFunction::from_fn(ts, |t| ts.mu(t).unwrap_or(0.0))?;
            let step = mu.zip_with(&fd, |m, d| m * d)?;
            let rhs = f.zip_with(&step, |x, s| x + s)?;
            let lhs = f.shift_sigma().restrict(rhs.domain())?;
            let mass = f.zip_with(&step, |x, s| x.abs() + s.abs())?;
            let mass = mass.zip_with(&lhs, |m, l| m + l.abs())?;
            pointwise_max(&lhs, &rhs, &mass)
        }
        RhoFormula => {
            let fn_ = f.nabla_derivative()?;
            let nu = GridFunction::from_fn(ts, |t| ts.nu(t).unwrap_or(0.0))?;
            let step = nu.zip_with(&fn_, |m, d| m * d)?;
            let rhs = f.zip_with(&step, |x, s| x - s)?;
            let lhs = f.shift_rho().restrict(rhs.domain())?;
            let mass = f.zip_with(&step, |x, s| x.abs() + s.abs())?;
            let mass = mass.zip_with(&lhs, |m, l| m + l.abs())?;
            pointwise_max(&lhs, &rhs, &mass)
        }
        NablaFromDelta => {
            let lhs = f.nabla_derivative()?;
            let rhs = f.delta_derivative()?.shift_rho().restrict(lhs.domain())?;
            let mass = lhs.zip_with(&rhs, |x, y| x.abs() + y.abs())?;
            pointwise_max(&lhs, &rhs, &mass)
        }
        DeltaFromNabla => {
            let lhs = f.delta_derivative()?;
            let rhs = f.nabla_derivative()?.shift_sigma().restrict(lhs.domain())?;
            let mass = lhs.zip_with(&rhs, |x, y| x.abs() + y.abs())?;
            pointwise_max(&lhs, &rhs, &mass)
        }
        DeltaToNabla => {
            let (l, lm) = delta_pair(f)?;
            let (r, rm) = nabla_pair(&f.shift_rho())?;
            Ok(rel(l, r, lm + rm))
        }
        NablaToDelta => {
            let (l, lm) = nabla_pair(f)?;
            let (r, rm) = delta_pair(&f.shift_sigma())?;
            Ok(rel(l, r, lm + rm))
        }
        PartsDeltaShifted => {
            let (l, lm) = delta_pair(&f.shift_sigma().zip_with(&g.delta_derivative()?, |x, y| x * y)?)?;
            let (i, im) = delta_pair(&f.delta_derivative()?.zip_with(g, |x, y| x * y)?)?;
            let (bd, bm) = boundary(f, g)?;
            Ok(rel(l, bd - i, lm + im + bm))
        }
        PartsDelta => {
            let (l, lm) = delta_pair(&f.zip_with(&g.delta_derivative()?, |x, y| x * y)?)?;
            let (i, im) =
                delta_pair(&f.delta_derivative()?.zip_with(&g.shift_sigma(), |x, y| x * y)?)?;
            let (bd, bm) = boundary(f, g)?;
            Ok(rel(l, bd - i, lm + im + bm))
        }
        PartsNablaShifted => {
            let (l, lm) = nabla_pair(&f.shift_rho().zip_with(&g.nabla_derivative()?, |x, y| x * y)?)?;
            let (i, im) = nabla_pair(&f.nabla_derivative()?.zip_with(g, |x, y| x * y)?)?;
            let (bd, bm) = boundary(f, g)?;
            Ok(rel(l, bd - i, lm + im + bm))
        }
        PartsNabla => {
            let (l, lm) = nabla_pair(&f.zip_with(&g.nabla_derivative()?, |x, y| x * y)?)?;
            let (i, im) =
                nabla_pair(&f.nabla_derivative()?.zip_with(&g.shift_rho(), |x, y| x * y)?)?;
            let (bd, bm) = boundary(f, g)?;
            Ok(rel(l, bd - i, lm + im + bm))
        }
        SplitDeltaRight => {
            let rb = ts.rho(b)?;
            let (l, lm) = delta_pair(f)?;
            let head = f.delta_integral(a, rb)?;
            let tail = (b - rb) * f.shift_rho().value_at(b)?;
            Ok(rel(l, head + tail, 2.0 * lm))
        }
        SplitDeltaLeft => {
            let sa = ts.sigma(a)?;
            let (l, lm) = delta_pair(f)?;
            let head = (sa - a) * f.value_at(a)?;
            let tail = f.delta_integral(sa, b)?;
            Ok(rel(l, head + tail, 2.0 * lm))
        }
        SplitNablaRight => {
            let rb = ts.rho(b)?;
            let (l, lm) = nabla_pair(f)?;
            let head = f.nabla_integral(a, rb)?;
            let tail = (b - rb) * f.value_at(b)?;
            Ok(rel(l, head + tail, 2.0 * lm))
        }
        SplitNablaLeft => {
            let sa = ts.sigma(a)?;
            let (l, lm) = nabla_pair(f)?;
            let head = (sa - a) * f.shift_sigma().value_at(a)?;
            let tail = f.nabla_integral(sa, b)?;
            Ok(rel(l, head + tail, 2.0 * lm))
        }
        FundamentalDelta => {
            let (l, lm) = delta_pair(&f.delta_derivative()?)?;
            let (fa, fb) = (f.value_at(a)?, f.value_at(b)?);
            Ok(rel(l, fb - fa, lm + fa.abs() + fb.abs()))
        }
        FundamentalNabla => {
            let (l, lm) = nabla_pair(&f.nabla_derivative()?)?;
            let (fa, fb) = (f.value_at(a)?, f.value_at(b)?);
            Ok(rel(l, fb - fa, lm + fa.abs() + fb.abs()))
        }
    }
}

/// Random strictly increasing scale with `min_points..=max_points` points
/// and gaps drawn uniformly from `spacing`.
pub fn random_scale<R: Rng>(
    rng: &mut R,
    min_points: usize,
    max_points: usize,
    spacing: (f64, f64),
) -> TimeScale {
    let n = rng.gen_range(min_points..=max_points);
    let mut t = rng.gen_range(-10.0..10.0);
    let mut points = Vec::with_capacity(n);
    points.push(t);
    for _ in 1..n {
        t += rng.gen_range(spacing.0..=spacing.1);
        points.push(t);
    }
    TimeScale::new(points).expect("increasing by construction")
}

pub fn random_function<R: Rng>(rng: &mut R, scale: &TimeScale, amplitude: f64) -> GridFunction {
    let values = (0..scale.len())
        .map(|_| rng.gen_range(-amplitude..=amplitude))
        .collect();
    GridFunction::new(scale.clone(), values).expect("finite by construction")
}

/// Per-identity outcome of a suite run.
#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub identity: Identity,
    pub max_rel_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct IdentityReport {
    pub trials: usize,
    pub tolerance: f64,
    pub rows: Vec<IdentityRow>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn family_max(&self, family: IdentityFamily) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.identity.family() == family)
            .fold(0.0, |m, r| m.max(r.max_rel_error))
    }
}

/// Randomised run of every [`Identity`].
#[derive(Clone, Debug)]
pub struct IdentitySuite {
    pub trials: usize,
    pub seed: u64,
    pub min_points: usize,
    pub max_points: usize,
    pub spacing: (f64, f64),
    pub amplitude: f64,
    pub tolerance: f64,
}

impl Default for IdentitySuite {
    fn default() -> Self {
        IdentitySuite {
            trials: 200,
            seed: 0x5eed,
            min_points: 2,
            max_points: 50,
            spacing: (1e-3, 10.0),
            amplitude: 10.0,
            tolerance: 1e-12,
        }
    }
}

impl IdentitySuite {
    pub fn run(&self, exec: Execution) -> Result<IdentityReport> {
        let per_trial = try_map_indexed(exec, self.trials, |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(k as u64);
            let ts = random_scale(&mut rng, self.min_points, self.max_points, self.spacing);
            let f = random_function(&mut rng, &ts, self.amplitude);
            let g = random_function(&mut rng, &ts, self.amplitude);
            Identity::ALL
                .iter()
                .map(|&id| check(id, &f, &g))
                .collect::<Result<Vec<f64>>>()
        })?;
        let rows = Identity::ALL
            .iter()
            .enumerate()
            .map(|(j, &identity)| {
                let max_rel_error = per_trial.iter().fold(0.0_f64, |m, errs| m.max(errs[j]));
                IdentityRow {
                    identity,
                    max_rel_error,
                    passed: max_rel_error <= self.tolerance,
                }
            })
            .collect();
        Ok(IdentityReport {
            trials: self.trials,
            tolerance: self.tolerance,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_on_example_scale() {
        let ts = TimeScale::new(vec![1.0, 3.0, 4.0]).unwrap();
        let f = GridFunction::new(ts.clone(), vec![0.5, -2.0, 7.0]).unwrap();
        let g = GridFunction::new(ts, vec![3.0, 1.0, -1.0]).unwrap();
        for id in Identity::ALL {
            let e = check(id, &f, &g).unwrap();
            assert!(e <= 1e-15, "{id}: {e}");
        }
    }

    #[test]
    fn two_point_scale() {
        let ts = TimeScale::new(vec![0.0, 0.25]).unwrap();
        let f = GridFunction::new(ts.clone(), vec![1.0, 2.0]).unwrap();
        let g = GridFunction::new(ts, vec![-1.0, 4.0]).unwrap();
        for id in Identity::ALL {
            assert!(check(id, &f, &g).unwrap() <= 1e-15, "{id}");
        }
    }

    #[test]
    fn conversions_are_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let ts = random_scale(&mut rng, 2, 30, (1e-3, 10.0));
            let f = random_function(&mut rng, &ts, 5.0);
            assert_eq!(check(Identity::NablaFromDelta, &f, &f).unwrap(), 0.0);
            assert_eq!(check(Identity::DeltaFromNabla, &f, &f).unwrap(), 0.0);
            assert_eq!(check(Identity::SplitDeltaRight, &f, &f).unwrap(), 0.0);
        }
    }

    #[test]
    fn broken_identity_is_detected() {
        // Dropping the boundary term from integration by parts must show up.
        let ts = TimeScale::new(vec![0.0, 1.0, 3.0]).unwrap();
        let f = GridFunction::new(ts.clone(), vec![1.0, 2.0, 5.0]).unwrap();
        let g = GridFunction::new(ts, vec![2.0, 2.0, 3.0]).unwrap();
        let lhs = f
            .shift_sigma()
            .zip_with(&g.delta_derivative().unwrap(), |x, y| x * y)
            .unwrap()
            .delta_total()
            .unwrap();
        let wrong = -f
            .delta_derivative()
            .unwrap()
            .zip_with(&g, |x, y| x * y)
            .unwrap()
            .delta_total()
            .unwrap();
        assert!((lhs - wrong).abs() > 1.0);
    }

    #[test]
    fn suite_is_deterministic_across_execution_modes() {
        let suite = IdentitySuite {
            trials: 40,
            ..Default::default()
        };
        let a = suite.run(Execution::Sequential).unwrap();
        let b = suite.run(Execution::Parallel).unwrap();
        assert!(a.all_passed());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.max_rel_error.to_bits(), y.max_rel_error.to_bits());
        }
    }
}
