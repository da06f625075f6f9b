//! The directional problem
//!
//! ```text
//! extremize ∫_a^b L(t, (y∘ξ_u)(t), D ȳ(t)(u)) d_u t,   y(a) = α, y(b) = β,
//! ```
//!
//! where `∫ f d_u t` is `u∫f Δt` for `u ≥ 0` and `u∫f ∇t` for `u ≤ 0`, and
//! `y∘ξ_u` is `u·y^σ` or `u·y^ρ` accordingly. For `u > 0` the problem is
//! the delta problem with integrand `f(t, y, v) = u·L(t, u·y, u·v)`; for
//! `u < 0` it is the nabla problem with the same integrand.

use crate::error::{Error, Result};
use crate::lagrangian::{ScaledLagrangian, SharedLagrangian};
use crate::plx::{directional_derivative, Direction};
use crate::timescale::{Domain, DomainTag, GridFunction, TimeScale};
use crate::variational::{CertifyOptions, DeltaNablaProblem, Solution, SolveOptions};

#[derive(Clone, Debug)]
pub struct DirectionalProblem {
    scale: TimeScale,
    u: Direction,
    lagrangian: SharedLagrangian,
    alpha: f64,
    beta: f64,
}

impl DirectionalProblem {
    pub fn new(scale: TimeScale, u: f64, lagrangian: SharedLagrangian, alpha: f64, beta: f64) -> Result<Self> {
        let u = Direction::new(u)?;
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
        Ok(DirectionalProblem {
            scale,
            u,
            lagrangian,
            alpha,
            beta,
        })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn u(&self) -> f64 {
        self.u.value()
    }

    pub fn lagrangian(&self) -> &SharedLagrangian {
        &self.lagrangian
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The delta (`u > 0`) or nabla (`u < 0`) problem with integrand
    /// `u·L(t, u·y, u·v)` and unit weight.
    pub fn reduced_problem(&self) -> Result<DeltaNablaProblem> {
        let f: SharedLagrangian = std::sync::Arc::new(ScaledLagrangian::new(self.lagrangian.clone(), self.u()));
        let (g1, g2) = if self.u.is_forward() { (1.0, 0.0) } else { (0.0, 1.0) };
        DeltaNablaProblem::new(self.scale.clone(), g1, g2, f.clone(), f, self.alpha, self.beta)
    }

    fn check(&self, y: &GridFunction) -> Result<()> {
        if *y.scale() != self.scale {
            return Err(Error::ScaleMismatch(
                "trajectory does not live on the problem's time scale".into(),
            ));
        }
        if y.domain() != Domain::FULL {
            return Err(Error::domain("a trajectory must be defined on all of T"));
        }
        Ok(())
    }

    /// `(t, (y∘ξ_u)(t), D ȳ(t)(u))` at every point of `I^κ` (`u > 0`) or
    /// `I_κ` (`u < 0`).
    fn arguments(&self, y: &GridFunction) -> Result<Vec<(usize, f64, f64, f64)>> {
        let u = self.u();
        let comp = shifted_composition(y, u);
        let domain = if u > 0.0 { DomainTag::Kappa } else { DomainTag::KappaSub };
        self.scale
            .range(domain)
            .map(|i| {
                let t = self.scale.points()[i];
                Ok((i, t, comp.at_index(i).unwrap(), directional_derivative(y, t, u)?))
            })
            .collect()
    }

    /// `∫ L(t, (y∘ξ_u)(t), D ȳ(t)(u)) d_u t`.
    pub fn objective(&self, y: &GridFunction) -> Result<f64> {
        self.check(y)?;
        let u = self.u();
        let args = self.arguments(y)?;
        let values = args
            .iter()
            .map(|&(_, t, s, v)| self.lagrangian.eval(t, s, v))
            .collect::<Result<Vec<f64>>>()?;
        let domain = if u > 0.0 { DomainTag::Kappa } else { DomainTag::KappaSub };
        let integrand = GridFunction::on_domain(self.scale.clone(), domain, values)?;
        d_u_integral(&integrand, u)
    }

    /// `D ḡ(t)(u) − u·∂₂L(t, (y∘ξ_u)(t), D ȳ(t)(u))` with
    /// `g(t) = ∂₃L(t, (y∘ξ_u)(t), D ȳ(t)(u))`.
    pub fn el_residual(&self, y: &GridFunction) -> Result<DirectionalResidual> {
        self.check(y)?;
        if self.scale.len() < 3 {
            return Err(Error::domain("the directional residual needs at least three points"));
        }
        let u = self.u();
        let args = self.arguments(y)?;
        let g_values = args
            .iter()
            .map(|&(_, t, s, v)| self.lagrangian.d3(t, s, v))
            .collect::<Result<Vec<f64>>>()?;
        let d2: Vec<f64> = args
            .iter()
            .map(|&(_, t, s, v)| self.lagrangian.d2(t, s, v))
            .collect::<Result<Vec<f64>>>()?;
        let own = if u > 0.0 { DomainTag::Kappa } else { DomainTag::KappaSub };
        // ḡ lives on the points of g's own domain; D ḡ(t)(u) is taken there.
        let g = GridFunction::on_domain(self.scale.clone(), own, g_values)?.on_own_scale()?;
        let (domain, skip) = if u > 0.0 {
            (DomainTag::KappaSquared, 0)
        } else {
            (DomainTag::KappaSubSquared, 1)
        };
        let values = self
            .scale
            .range(domain)
            .enumerate()
            .map(|(j, i)| {
                let t = self.scale.points()[i];
                let dg = directional_derivative(&g, t, u)?;
                Ok(dg - u * d2[j + skip])
            })
            .collect::<Result<Vec<f64>>>()?;
        let residual = GridFunction::on_domain(self.scale.clone(), domain, values)?;
        let strict_domain = Domain::from(DomainTag::KappaSquared).intersect(DomainTag::KappaSubSquared.into());
        let strict = residual.restrict(strict_domain)?;
        Ok(DirectionalResidual { residual, strict })
    }

    /// Solves through the reduced problem; the iteration continues until the
    /// directional residual is below the tolerance as well.
    pub fn solve(&self, opts: &SolveOptions) -> Result<Solution> {
        let reduced = self.reduced_problem()?;
        let check = |y: &GridFunction| -> Result<f64> { Ok(self.el_residual(y)?.max_abs()) };
        let mut sol = reduced.solve_checked(opts, Some(&check))?;
        sol.certificate = reduced.certify(&sol, &CertifyOptions::with_exec(opts.exec));
        sol.directional_residual = Some(self.el_residual(&sol.y)?.max_abs());
        Ok(sol)
    }
}

/// Directional Euler-Lagrange residual on `I^{κ²}` (`u > 0`) or `I_{κ²}`
/// (`u < 0`), and its restriction to `I^{κ²}_{κ²}`.
#[derive(Clone, Debug)]
pub struct DirectionalResidual {
    pub residual: GridFunction,
    /// Empty on scales with fewer than five points.
    pub strict: GridFunction,
}

impl DirectionalResidual {
    pub fn max_abs(&self) -> f64 {
        self.residual.max_abs()
    }
}

/// `∫_a^b f d_u t`: `u∫f Δt` for `u ≥ 0`, `u∫f ∇t` for `u ≤ 0`.
pub fn d_u_integral(f: &GridFunction, u: f64) -> Result<f64> {
    if u == 0.0 {
        return Ok(0.0);
    }
    if u > 0.0 {
        Ok(u * f.delta_total()?)
    } else {
        Ok(u * f.nabla_total()?)
    }
}

/// `y∘ξ_u`: `u·y^σ` for `u ≥ 0`, `u·y^ρ` for `u ≤ 0`.
pub fn shifted_composition(y: &GridFunction, u: f64) -> GridFunction {
    let shifted = if u >= 0.0 { y.shift_sigma() } else { y.shift_rho() };
    let values = shifted.values().iter().map(|v| u * v).collect();
    GridFunction::raw(shifted.scale().clone(), shifted.domain(), values)
}

/// Solves a directional problem; see [`DirectionalProblem::solve`].
pub fn solve_directional(p: &DirectionalProblem, opts: &SolveOptions) -> Result<Solution> {
    p.solve(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lagrangian::ExprLagrangian;
    use crate::variational::Certificate;

    fn l(src: &str) -> SharedLagrangian {
        ExprLagrangian::parse(src).unwrap().shared()
    }

    fn ex1() -> TimeScale {
        TimeScale::new(vec![1.0, 3.0, 4.0]).unwrap()
    }

    #[test]
    fn d_u_integral_examples() {
        let ts = TimeScale::new(vec![0.0, 1.0, 2.0]).unwrap();
        let one = GridFunction::constant(&ts, 1.0).unwrap();
        assert_eq!(d_u_integral(&one, -2.0).unwrap(), -4.0);
        assert_eq!(d_u_integral(&one, 0.0).unwrap(), 0.0);
        let f = GridFunction::new(ts, vec![1.0, 2.0, 5.0]).unwrap();
        assert_eq!(d_u_integral(&f, 1.0).unwrap(), f.delta_total().unwrap());
        assert_eq!(d_u_integral(&f, -1.0).unwrap(), -f.nabla_total().unwrap());
    }

    #[test]
    fn shifted_composition_examples() {
        let y = GridFunction::new(ex1(), vec![10.0, 20.0, 30.0]).unwrap();
        assert_eq!(shifted_composition(&y, 1.0), y.shift_sigma());
        assert_eq!(shifted_composition(&y, -1.0).values(), &[-10.0, -10.0, -20.0]);
        assert!(shifted_composition(&y, 0.0).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn objective_unit_directions() {
        let y1 = 0.3;
        let y = GridFunction::new(ex1(), vec![0.0, y1, 1.0]).unwrap();
        let fwd = DirectionalProblem::new(ex1(), 1.0, l("t*v^2"), 0.0, 1.0).unwrap();
        let delta_term = y1 * y1 / 2.0 + 3.0 * (1.0 - y1) * (1.0 - y1);
        assert!((fwd.objective(&y).unwrap() - delta_term).abs() < 1e-14);
        let bwd = DirectionalProblem::new(ex1(), -1.0, l("t*v^2"), 0.0, 1.0).unwrap();
        let nabla_term = 1.5 * y1 * y1 + 4.0 * (1.0 - y1) * (1.0 - y1);
        assert!((bwd.objective(&y).unwrap() + nabla_term).abs() < 1e-14);
    }

    #[test]
    fn rejects_zero_direction() {
        assert!(matches!(
            DirectionalProblem::new(ex1(), 0.0, l("v^2"), 0.0, 1.0),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn solves_example_in_both_directions() {
        let opts = SolveOptions::default();
        let fwd = DirectionalProblem::new(ex1(), 1.0, l("t*v^2"), 0.0, 1.0).unwrap();
        let sol = fwd.solve(&opts).unwrap();
        assert!((sol.value_at(3.0).unwrap() - 6.0 / 7.0).abs() < 1e-12);
        assert!(sol.directional_residual.unwrap() <= 1e-10);
        assert_eq!(sol.certificate, Certificate::GlobalMin);

        let bwd = DirectionalProblem::new(ex1(), -1.0, l("t*v^2"), 0.0, 1.0).unwrap();
        let sol = bwd.solve(&opts).unwrap();
        assert!((sol.value_at(3.0).unwrap() - 8.0 / 11.0).abs() < 1e-12);
        assert!(sol.directional_residual.unwrap() <= 1e-10);
        assert_eq!(sol.certificate, Certificate::GlobalMax);
    }

    #[test]
    fn residual_domains() {
        let ts = TimeScale::new(vec![0.0, 1.0, 1.5, 3.0, 4.0, 6.0]).unwrap();
        let y = GridFunction::from_fn(&ts, |t| t.sin()).unwrap();
        let fwd = DirectionalProblem::new(ts.clone(), 0.5, l("t*v^2 + y^2"), 0.0, 1.0).unwrap();
        let r = fwd.el_residual(&y).unwrap();
        assert_eq!(r.residual.domain(), DomainTag::KappaSquared.into());
        assert_eq!(r.strict.values().len(), 2);
        let bwd = DirectionalProblem::new(ts, -0.5, l("t*v^2 + y^2"), 0.0, 1.0).unwrap();
        let r = bwd.el_residual(&y).unwrap();
        assert_eq!(r.residual.domain(), DomainTag::KappaSubSquared.into());
        let ex = DirectionalProblem::new(ex1(), 1.0, l("v^2"), 0.0, 1.0).unwrap();
        let r = ex.el_residual(&GridFunction::new(ex1(), vec![0.0, 0.5, 1.0]).unwrap()).unwrap();
        assert!(r.strict.values().is_empty());
    }

    #[test]
    fn straight_line_for_kinetic_lagrangian() {
        let ts = TimeScale::new(vec![0.0, 0.5, 1.7, 2.0, 3.0]).unwrap();
        let p = DirectionalProblem::new(ts, 2.0, l("v^2"), 1.0, -2.0).unwrap();
        let sol = p.solve(&SolveOptions::default()).unwrap();
        let line = p.reduced_problem().unwrap().linear_interpolant();
        for (a, b) in sol.y.values().iter().zip(line.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
