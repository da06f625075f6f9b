//! The delta-nabla problem of the calculus of variations on a finite time
//! scale:
//!
//! ```text
//! extremize  γ₁ ∫_a^b L_Δ(t, y^σ, y^Δ) Δt + γ₂ ∫_a^b L_∇(t, y^ρ, y^∇) ∇t
//! subject to y(a) = α, y(b) = β.
//! ```
//!
//! More generally a [`VariationalProblem`] is any weighted sum of delta and
//! nabla terms. On a finite scale the functional is a smooth function of the
//! interior values `y(t_1), ..., y(t_{N-1})`, so extremals are found by
//! Newton's method on the stationarity system. The two Euler-Lagrange
//! equations in integral form are evaluated as mean-subtracted residuals:
//!
//! ```text
//! EL1 on I_κ: γ₁(∂₃L_Δ[y](ρ(t)) − ∫_a^{ρ(t)} ∂₂L_Δ[y] Δτ)
//!           + γ₂(∂₃L_∇{y}(t) − ∫_a^t ∂₂L_∇{y} ∇τ)
//! EL2 on I^κ: γ₁(∂₃L_Δ[y](t) − ∫_a^t ∂₂L_Δ[y] Δτ)
//!           + γ₂(∂₃L_∇{y}(σ(t)) − ∫_a^{σ(t)} ∂₂L_∇{y} ∇τ)
//! ```
//!
//! where `[y](t) = (t, y^σ(t), y^Δ(t))` and `{y}(t) = (t, y^ρ(t), y^∇(t))`.

use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lagrangian::{Hessian2, PartialSource, SharedLagrangian};
use crate::par::{self, Execution};
use crate::timescale::{Calculus, Domain, DomainTag, GridFunction, TimeScale};

/// One weighted integral of the functional.
#[derive(Clone, Debug)]
pub struct Term {
    pub weight: f64,
    pub calculus: Calculus,
    pub lagrangian: SharedLagrangian,
}

impl Term {
    pub fn delta(weight: f64, lagrangian: SharedLagrangian) -> Self {
        Term {
            weight,
            calculus: Calculus::Delta,
            lagrangian,
        }
    }

    pub fn nabla(weight: f64, lagrangian: SharedLagrangian) -> Self {
        Term {
            weight,
            calculus: Calculus::Nabla,
            lagrangian,
        }
    }

    /// Scale indices at which the integrand is sampled.
    fn indices(&self, scale: &TimeScale) -> std::ops::Range<usize> {
        match self.calculus {
            Calculus::Delta => scale.range(DomainTag::Kappa),
            Calculus::Nabla => scale.range(DomainTag::KappaSub),
        }
    }
}

/// `(t, state slot, derivative slot)` for a term at scale index `k`.
fn slots(scale: &TimeScale, calc: Calculus, y: &[f64], k: usize) -> (f64, f64, f64) {
    let t = scale.points()[k];
    match calc {
        Calculus::Delta => (t, y[k + 1], (y[k + 1] - y[k]) / scale.mu_at(k)),
        Calculus::Nabla => (t, y[k - 1], (y[k] - y[k - 1]) / scale.nu_at(k)),
    }
}

/// A residual that must vanish at the solution besides both EL forms.
pub(crate) type ExtraResidual<'a> = dyn Fn(&GridFunction) -> Result<f64> + 'a;

// Accepted point, its gradient, and its two EL residuals.
type Step = (Vec<f64>, Vec<f64>, (f64, f64));

/// A fixed-endpoint problem built from a list of weighted terms.
#[derive(Clone, Debug)]
pub struct VariationalProblem {
    scale: TimeScale,
    terms: Vec<Term>,
    alpha: f64,
    beta: f64,
}

impl VariationalProblem {
    /// Terms with zero weight are dropped.
    pub fn new(scale: TimeScale, terms: Vec<Term>, alpha: f64, beta: f64) -> Result<Self> {
        if scale.interior_len() == 0 {
            return Err(Error::InvalidProblem(
                "the time scale needs at least one point strictly between a and b".into(),
            ));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "boundary values must be finite (alpha = {alpha}, beta = {beta})"
            )));
        }
        if let Some(t) = terms.iter().find(|t| !t.weight.is_finite()) {
            return Err(Error::InvalidProblem(format!("weight {} is not finite", t.weight)));
        }
        let terms: Vec<Term> = terms.into_iter().filter(|t| t.weight != 0.0).collect();
        if terms.is_empty() {
            return Err(Error::InvalidProblem("all weights vanish".into()));
        }
        Ok(VariationalProblem {
            scale,
            terms,
            alpha,
            beta,
        })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Full values of an admissible trajectory from its interior values.
    pub fn with_interior(&self, x: &[f64]) -> Result<GridFunction> {
        if x.len() != self.scale.interior_len() {
            return Err(Error::InvalidInput(format!(
                "expected {} interior values, got {}",
                self.scale.interior_len(),
                x.len()
            )));
        }
        GridFunction::new(self.scale.clone(), self.full(x))
    }

    fn full(&self, x: &[f64]) -> Vec<f64> {
        let mut y = Vec::with_capacity(x.len() + 2);
        y.push(self.alpha);
        y.extend_from_slice(x);
        y.push(self.beta);
        y
    }

    /// The straight line from `(a, α)` to `(b, β)`.
    pub fn linear_interpolant(&self) -> GridFunction {
        let (a, b) = (self.scale.a(), self.scale.b());
        let (al, be) = (self.alpha, self.beta);
        let values = self
            .scale
            .points()
            .iter()
            .map(|&t| al + (be - al) * (t - a) / (b - a))
            .collect();
        GridFunction::raw(self.scale.clone(), Domain::FULL, values)
    }

    fn trajectory<'a>(&self, y: &'a GridFunction) -> Result<&'a [f64]> {
        if *y.scale() != self.scale {
            return Err(Error::ScaleMismatch(
                "trajectory does not live on the problem's time scale".into(),
            ));
        }
        if y.domain() != Domain::FULL {
            return Err(Error::domain("a trajectory must be defined on all of T"));
        }
        Ok(y.values())
    }

    fn objective_raw(&self, y: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for term in &self.terms {
            let mut acc = 0.0;
            for k in term.indices(&self.scale) {
                let (t, s, v) = slots(&self.scale, term.calculus, y, k);
                let m = match term.calculus {
                    Calculus::Delta => self.scale.mu_at(k),
                    Calculus::Nabla => self.scale.nu_at(k),
                };
                acc += m * term.lagrangian.eval(t, s, v)?;
            }
            total += term.weight * acc;
        }
        Ok(total)
    }

    /// `ℒ(y) = Σ wᵢ ∫ Lᵢ`. Boundary values of `y` are used as given.
    pub fn objective(&self, y: &GridFunction) -> Result<f64> {
        self.objective_raw(self.trajectory(y)?)
    }

    /// `(∂₂L, ∂₃L)` along `y` for each term, indexed by position in the
    /// term's domain.
    fn partials(&self, y: &[f64]) -> Result<Vec<Vec<(f64, f64)>>> {
        self.terms
            .iter()
            .map(|term| {
                term.indices(&self.scale)
                    .map(|k| {
                        let (t, s, v) = slots(&self.scale, term.calculus, y, k);
                        Ok((term.lagrangian.d2(t, s, v)?, term.lagrangian.d3(t, s, v)?))
                    })
                    .collect()
            })
            .collect()
    }

    /// Values of the EL2 bracket at scale indices `0..N`.
    fn el2_table(&self, partials: &[Vec<(f64, f64)>]) -> Vec<f64> {
        let n = self.scale.last();
        let mut out = vec![0.0; n];
        for (term, p) in self.terms.iter().zip(partials) {
            let w = term.weight;
            let mut acc = 0.0;
            match term.calculus {
                Calculus::Delta => {
                    for i in 0..n {
                        out[i] += w * (p[i].1 - acc);
                        acc += self.scale.mu_at(i) * p[i].0;
                    }
                }
                Calculus::Nabla => {
                    for i in 0..n {
                        // p[j] belongs to scale index j + 1.
                        acc += self.scale.nu_at(i + 1) * p[i].0;
                        out[i] += w * (p[i].1 - acc);
                    }
                }
            }
        }
        out
    }

    /// Values of the EL1 bracket at scale indices `1..=N`.
    fn el1_table(&self, partials: &[Vec<(f64, f64)>]) -> Vec<f64> {
        let n = self.scale.last();
        let mut out = vec![0.0; n];
        for (term, p) in self.terms.iter().zip(partials) {
            let w = term.weight;
            let mut acc = 0.0;
            match term.calculus {
                Calculus::Delta => {
                    for i in 1..=n {
                        // ρ(t_i) = t_{i-1}.
                        out[i - 1] += w * (p[i - 1].1 - acc);
                        acc += self.scale.mu_at(i - 1) * p[i - 1].0;
                    }
                }
                Calculus::Nabla => {
                    for i in 1..=n {
                        acc += self.scale.nu_at(i) * p[i - 1].0;
                        out[i - 1] += w * (p[i - 1].1 - acc);
                    }
                }
            }
        }
        out
    }

    /// Mean-subtracted EL1 residual on `I_κ`.
    pub fn el_residual_1(&self, y: &GridFunction) -> Result<GridFunction> {
        let p = self.partials(self.trajectory(y)?)?;
        let values = self.el1_table(&p);
        Ok(GridFunction::raw(self.scale.clone(), DomainTag::KappaSub.into(), values).centered())
    }

    /// Mean-subtracted EL2 residual on `I^κ`.
    pub fn el_residual_2(&self, y: &GridFunction) -> Result<GridFunction> {
        let p = self.partials(self.trajectory(y)?)?;
        let values = self.el2_table(&p);
        Ok(GridFunction::raw(self.scale.clone(), DomainTag::Kappa.into(), values).centered())
    }

    fn gradient_raw(&self, y: &[f64]) -> Result<Vec<f64>> {
        let p = self.partials(y)?;
        Ok(self.gradient_from(&p))
    }

    fn gradient_from(&self, partials: &[Vec<(f64, f64)>]) -> Vec<f64> {
        let n = self.scale.last();
        let mut g = vec![0.0; n - 1];
        for (term, p) in self.terms.iter().zip(partials) {
            let w = term.weight;
            for k in 1..n {
                let gk = match term.calculus {
                    Calculus::Delta => {
                        self.scale.mu_at(k - 1) * p[k - 1].0 + p[k - 1].1 - p[k].1
                    }
                    Calculus::Nabla => {
                        // p[j] belongs to scale index j + 1.
                        p[k - 1].1 + self.scale.nu_at(k + 1) * p[k].0 - p[k].1
                    }
                };
                g[k - 1] += w * gk;
            }
        }
        g
    }

    /// `∂ℒ/∂y(t_k)` for every interior point.
    pub fn gradient(&self, y: &GridFunction) -> Result<Vec<f64>> {
        self.gradient_raw(self.trajectory(y)?)
    }

    /// The first variation
    /// `Σ wᵢ ∫ (∂₂Lᵢ η^σ + ∂₃Lᵢ η^Δ) Δt` (resp. with `η^ρ`, `η^∇` and `∇t`),
    /// assembled from grid-function operations.
    pub fn first_variation(&self, y: &GridFunction, eta: &GridFunction) -> Result<f64> {
        self.trajectory(y)?;
        self.trajectory(eta)?;
        let mut total = 0.0;
        for term in &self.terms {
            let (ys, yd, es, ed) = match term.calculus {
                Calculus::Delta => (
                    y.shift_sigma(),
                    y.delta_derivative()?,
                    eta.shift_sigma(),
                    eta.delta_derivative()?,
                ),
                Calculus::Nabla => (
                    y.shift_rho(),
                    y.nabla_derivative()?,
                    eta.shift_rho(),
                    eta.nabla_derivative()?,
                ),
            };
            let domain = yd.domain();
            let values = self
                .scale
                .range(domain)
                .map(|i| {
                    let t = self.scale.points()[i];
                    let (s, v) = (ys.at_index(i).unwrap(), yd.at_index(i).unwrap());
                    let l = &term.lagrangian;
                    Ok(l.d2(t, s, v)? * es.at_index(i).unwrap() + l.d3(t, s, v)? * ed.at_index(i).unwrap())
                })
                .collect::<Result<Vec<f64>>>()?;
            let integrand = GridFunction::on_domain(self.scale.clone(), domain, values)?;
            let integral = match term.calculus {
                Calculus::Delta => integrand.delta_total()?,
                Calculus::Nabla => integrand.nabla_total()?,
            };
            total += term.weight * integral;
        }
        Ok(total)
    }

    /// `ℒ(y + εη) − ℒ(y)`.
    pub fn perturbation_margin(&self, y: &GridFunction, eta: &GridFunction, eps: f64) -> Result<f64> {
        let base = self.objective(y)?;
        let moved = y.linear_combination(1.0, eta, eps)?;
        Ok(self.objective(&moved)? - base)
    }

    fn residual_norm(&self, partials: &[Vec<(f64, f64)>]) -> (f64, f64) {
        let n = self.scale.last();
        let center = |v: Vec<f64>| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().fold(0.0_f64, |m, x| m.max((x - mean).abs()))
        };
        debug_assert!(n >= 2);
        (center(self.el1_table(partials)), center(self.el2_table(partials)))
    }

    /// Newton's method on `∇ℒ = 0` over the interior values.
    pub fn solve(&self, opts: &SolveOptions) -> Result<Solution> {
        self.solve_checked(opts, None)
    }

    /// [`solve`](Self::solve) with an additional residual that must also fall
    /// below the tolerance before the iteration stops.
    pub(crate) fn solve_checked(
        &self,
        opts: &SolveOptions,
        extra: Option<&ExtraResidual<'_>>,
    ) -> Result<Solution> {
        let mut x: Vec<f64> = match &opts.init {
            Init::Linear => {
                let line = self.linear_interpolant();
                line.values()[1..self.scale.last()].to_vec()
            }
            Init::Given(y) => {
                let v = self.trajectory(y)?;
                v[1..v.len() - 1].to_vec()
            }
        };
        let extra_at = |x: &[f64]| -> Result<f64> {
            match extra {
                Some(f) => f(&self.with_interior(x)?),
                None => Ok(0.0),
            }
        };

        let mut iterations = 0;
        let mut converged = false;
        let (mut g, mut res) = self.newton_state(&x)?;
        loop {
            if res.0.max(res.1) <= opts.tol && extra_at(&x)? <= opts.tol {
                converged = true;
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }
            let gnorm = norm(&g);
            let newton = self
                .fd_hessian(&x, opts.exec)
                .ok()
                .and_then(|h| {
                    let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| -v));
                    h.lu().solve(&rhs)
                })
                .map(|p| p.iter().copied().collect::<Vec<f64>>())
                .filter(|p| p.iter().all(|v| v.is_finite()));
            let steepest: Vec<f64> = g.iter().map(|v| -v).collect();
            let mut accepted = None;
            for dir in newton.iter().chain(std::iter::once(&steepest)) {
                if let Some(state) = self.line_search(&x, dir, gnorm) {
                    accepted = Some(state);
                    break;
                }
            }
            let Some((nx, ng, nres)) = accepted else {
                break;
            };
            x = nx;
            g = ng;
            res = nres;
            iterations += 1;
        }

        let y = self.with_interior(&x)?;
        let objective = self.objective(&y)?;
        Ok(Solution {
            y,
            objective,
            residual_el1: res.0,
            residual_el2: res.1,
            certificate: Certificate::None,
            iterations,
            converged,
            gradient_norm: norm(&g),
            tol: opts.tol,
            directional_residual: None,
        })
    }

    fn newton_state(&self, x: &[f64]) -> Result<(Vec<f64>, (f64, f64))> {
        let y = self.full(x);
        let p = self.partials(&y)?;
        self.objective_raw(&y)?;
        Ok((self.gradient_from(&p), self.residual_norm(&p)))
    }

    /// Backtracking on `‖∇ℒ‖`. A trial point where the Lagrangian cannot be
    /// evaluated counts as a rejected step.
    fn line_search(&self, x: &[f64], dir: &[f64], gnorm: f64) -> Option<Step> {
        let mut lambda = 1.0;
        for _ in 0..40 {
            let trial: Vec<f64> = x.iter().zip(dir).map(|(a, d)| a + lambda * d).collect();
            if let Ok((g, res)) = self.newton_state(&trial) {
                if norm(&g) <= (1.0 - 1e-4 * lambda) * gnorm {
                    return Some((trial, g, res));
                }
            }
            lambda *= 0.5;
        }
        None
    }

    /// Central-difference Jacobian of the gradient, one column per interior
    /// point, symmetrized.
    fn fd_hessian(&self, x: &[f64], exec: Execution) -> Result<DMatrix<f64>> {
        let m = x.len();
        let cols = par::try_map_indexed(exec, m, |j| {
            let h = 1e-5 * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let gp = self.gradient_raw(&self.full(&xp))?;
            let gm = self.gradient_raw(&self.full(&xm))?;
            Ok::<Vec<f64>, Error>(gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        })?;
        let h = DMatrix::from_fn(m, m, |i, j| cols[j][i]);
        Ok((&h + h.transpose()) * 0.5)
    }

    /// Sampled check of joint convexity (concavity) of every Lagrangian in
    /// `(y, v)` around the trajectory.
    pub fn certify(&self, sol: &Solution, opts: &CertifyOptions) -> Certificate {
        if !(sol.residual_el1.max(sol.residual_el2) <= sol.tol) {
            return Certificate::None;
        }
        if self.terms.iter().any(|t| t.weight < 0.0) {
            return Certificate::LocalOnly;
        }
        let Ok(y) = self.trajectory(&sol.y) else {
            return Certificate::None;
        };
        let mut psd = true;
        let mut nsd = true;
        for term in &self.terms {
            let (p, n) = self.sample_term(term, y, opts);
            psd &= p;
            nsd &= n;
            if !psd && !nsd {
                return Certificate::LocalOnly;
            }
        }
        if psd {
            Certificate::GlobalMin
        } else {
            Certificate::GlobalMax
        }
    }

    /// Returns `(all sampled Hessians PSD, all NSD)` for one term.
    fn sample_term(&self, term: &Term, y: &[f64], opts: &CertifyOptions) -> (bool, bool) {
        let ks: Vec<usize> = term.indices(&self.scale).collect();
        let args: Vec<(f64, f64, f64)> = ks
            .iter()
            .map(|&k| slots(&self.scale, term.calculus, y, k))
            .collect();
        let window = |vals: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            let center = 0.5 * (lo + hi);
            let half = (0.5 * (hi - lo) * (1.0 + opts.inflate)).max(opts.min_half_width);
            (center - half, center + half)
        };
        let (ylo, yhi) = window(&mut args.iter().map(|a| a.1));
        let (vlo, vhi) = window(&mut args.iter().map(|a| a.2));
        let n = opts.grid.max(2);
        let at = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let numeric = term.lagrangian.source() == PartialSource::Numeric;
        let flags = par::map_indexed(opts.exec, ks.len(), |idx| {
            let t = args[idx].0;
            let mut psd = true;
            let mut nsd = true;
            for i in 0..n {
                for j in 0..n {
                    let (yy, vv) = (at(ylo, yhi, i), at(vlo, vhi, j));
                    let Ok(h) = term.lagrangian.hessian(t, yy, vv) else {
                        return (false, false);
                    };
                    let (lmin, lmax) = eigenvalues(&h);
                    if !(lmin.is_finite() && lmax.is_finite()) {
                        return (false, false);
                    }
                    let tol = if numeric {
                        let scale = h.iter().flatten().fold(1.0_f64, |m, v| m.max(v.abs()));
                        opts.eig_tol.max(1e-6 * scale)
                    } else {
                        opts.eig_tol
                    };
                    psd &= lmin >= -tol;
                    nsd &= lmax <= tol;
                    if !psd && !nsd {
                        return (false, false);
                    }
                }
            }
            (psd, nsd)
        });
        flags
            .into_iter()
            .fold((true, true), |(p, q), (a, b)| (p && a, q && b))
    }

    /// Random admissible perturbations of `sol.y` inside a
    /// `‖·‖_{1,∞}`-ball of radius `opts.delta`.
    pub fn local_min_probe(&self, sol: &Solution, opts: &ProbeOptions) -> Result<ProbeReport> {
        let y = sol.y.clone();
        self.trajectory(&y)?;
        let base = self.objective(&y)?;
        let m = self.scale.interior_len();
        let margins = par::map_indexed(opts.exec, opts.trials, |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let mut eta = vec![0.0; m + 2];
            for v in &mut eta[1..=m] {
                *v = rng.gen_range(-1.0..1.0);
            }
            let eta = GridFunction::raw(self.scale.clone(), Domain::FULL, eta);
            let size = norm_1_inf(&eta).unwrap_or(0.0);
            let r: f64 = rng.gen();
            let eps = if size > 0.0 { opts.delta * r / size } else { 0.0 };
            let moved = y.linear_combination(1.0, &eta, eps).ok();
            moved
                .and_then(|z| self.objective(&z).ok())
                .map_or(f64::NEG_INFINITY, |v| v - base)
        });
        let failures = margins.iter().filter(|&&m| !(m >= opts.threshold)).count();
        let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(ProbeReport {
            trials: opts.trials,
            failures,
            worst_margin: if opts.trials == 0 { 0.0 } else { worst },
        })
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvalues `(min, max)` of a symmetric 2×2 matrix.
fn eigenvalues(h: &Hessian2) -> (f64, f64) {
    let (a, b, d) = (h[0][0], 0.5 * (h[0][1] + h[1][0]), h[1][1]);
    let mean = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - r, mean + r)
}

/// `‖y‖_{1,∞} = ‖y^σ‖_∞ + ‖y^ρ‖_∞ + ‖y^Δ‖_∞ + ‖y^∇‖_∞`, each supremum taken
/// over `I^κ_κ`.
pub fn norm_1_inf(y: &GridFunction) -> Result<f64> {
    if y.domain() != Domain::FULL {
        return Err(Error::domain("the norm needs a function on all of T"));
    }
    let scale = y.scale();
    if scale.interior_len() == 0 {
        return Err(Error::domain("I^κ_κ is empty on a scale without interior points"));
    }
    let inner = scale.range(DomainTag::KappaBoth);
    let sup = |f: &GridFunction| {
        inner
            .clone()
            .map(|i| f.at_index(i).unwrap().abs())
            .fold(0.0_f64, f64::max)
    };
    Ok(sup(&y.shift_sigma()) + sup(&y.shift_rho()) + sup(&y.delta_derivative()?) + sup(&y.nabla_derivative()?))
}

/// The classic two-term problem with weights `γ₁`, `γ₂`.
#[derive(Clone, Debug)]
pub struct DeltaNablaProblem {
    problem: VariationalProblem,
    gamma1: f64,
    gamma2: f64,
}

impl DeltaNablaProblem {
    pub fn new(
        scale: TimeScale,
        gamma1: f64,
        gamma2: f64,
        l_delta: SharedLagrangian,
        l_nabla: SharedLagrangian,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if gamma1 == 0.0 && gamma2 == 0.0 {
            return Err(Error::InvalidProblem("gamma1 and gamma2 cannot both vanish".into()));
        }
        let terms = vec![Term::delta(gamma1, l_delta), Term::nabla(gamma2, l_nabla)];
        Ok(DeltaNablaProblem {
            problem: VariationalProblem::new(scale, terms, alpha, beta)?,
            gamma1,
            gamma2,
        })
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    /// Solves and attaches the certificate.
    pub fn solve(&self, opts: &SolveOptions) -> Result<Solution> {
        let mut sol = self.problem.solve(opts)?;
        sol.certificate = self.problem.certify(&sol, &CertifyOptions::with_exec(opts.exec));
        Ok(sol)
    }
}

impl Deref for DeltaNablaProblem {
    type Target = VariationalProblem;

    fn deref(&self) -> &VariationalProblem {
        &self.problem
    }
}

impl AsRef<VariationalProblem> for DeltaNablaProblem {
    fn as_ref(&self) -> &VariationalProblem {
        &self.problem
    }
}

#[derive(Clone, Debug)]
pub enum Init {
    /// Straight line between the boundary values.
    Linear,
    /// Interior values of the given trajectory; its endpoints are replaced
    /// by the boundary values.
    Given(GridFunction),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub init: Init,
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            max_iter: 200,
            init: Init::Linear,
            exec: Execution::default(),
        }
    }
}

/// Outcome of the sufficiency check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// The trajectory does not satisfy the Euler-Lagrange equations.
    None,
    GlobalMin,
    GlobalMax,
    LocalOnly,
}

impl Certificate {
    pub fn as_str(self) -> &'static str {
        match self {
            Certificate::None => "none",
            Certificate::GlobalMin => "global-min",
            Certificate::GlobalMax => "global-max",
            Certificate::LocalOnly => "local-only",
        }
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub y: GridFunction,
    pub objective: f64,
    /// Max-abs of the mean-subtracted EL1 residual over `I_κ`.
    pub residual_el1: f64,
    /// Max-abs of the mean-subtracted EL2 residual over `I^κ`.
    pub residual_el2: f64,
    pub certificate: Certificate,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    pub tol: f64,
    /// Max-abs of the directional Euler-Lagrange residual, for solutions of
    /// directional problems.
    pub directional_residual: Option<f64>,
}

impl Solution {
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.y.value_at(t)
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Samples per axis of the `(y, v)` grid.
    pub grid: usize,
    /// Relative widening of the trajectory's range.
    pub inflate: f64,
    pub min_half_width: f64,
    pub eig_tol: f64,
    pub exec: Execution,
}

impl CertifyOptions {
    pub fn with_exec(exec: Execution) -> Self {
        CertifyOptions {
            exec,
            ..Default::default()
        }
    }
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            grid: 21,
            inflate: 0.5,
            min_half_width: 0.5,
            eig_tol: 1e-9,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeOptions {
    pub trials: usize,
    pub delta: f64,
    pub seed: u64,
    /// Smallest acceptable `ℒ(ŷ + εη) − ℒ(ŷ)`.
    pub threshold: f64,
    pub exec: Execution,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            trials: 1000,
            delta: 0.1,
            seed: 7,
            threshold: -1e-12,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub trials: usize,
    pub failures: usize,
    pub worst_margin: f64,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}
