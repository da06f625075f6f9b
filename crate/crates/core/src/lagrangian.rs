//! Lagrangians `L(t, y, v)` together with their partial derivatives.
//!
//! The second slot `y` receives the shifted state (`y^σ`, `y^ρ`, or the
//! scaled composition of a directional problem) and the third slot `v` the
//! derivative. [`ExprLagrangian`] differentiates symbolically;
//! [`FnLagrangian`] wraps an arbitrary closure and falls back to central
//! differences.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{parse, Expr, Var};

/// Where the partial derivatives of a Lagrangian come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialSource {
    Analytic,
    Numeric,
}

/// Second partials in the `(y, v)` slots: `[[L_yy, L_yv], [L_yv, L_vv]]`.
pub type Hessian2 = [[f64; 2]; 2];

pub trait Lagrangian: Send + Sync + fmt::Debug {
    fn eval(&self, t: f64, y: f64, v: f64) -> Result<f64>;

    /// `∂₂L`, the derivative in the state slot.
    fn d2(&self, t: f64, y: f64, v: f64) -> Result<f64>;

    /// `∂₃L`, the derivative in the derivative slot.
    fn d3(&self, t: f64, y: f64, v: f64) -> Result<f64>;

    /// Hessian in `(y, v)`. The default takes second differences of
    /// [`eval`](Lagrangian::eval).
    fn hessian(&self, t: f64, y: f64, v: f64) -> Result<Hessian2> {
        let hy = 1e-4 * y.abs().max(1.0);
        let hv = 1e-4 * v.abs().max(1.0);
        let f = |dy: f64, dv: f64| self.eval(t, y + dy, v + dv);
        let c = f(0.0, 0.0)?;
        let yy = (f(hy, 0.0)? - 2.0 * c + f(-hy, 0.0)?) / (hy * hy);
        let vv = (f(0.0, hv)? - 2.0 * c + f(0.0, -hv)?) / (hv * hv);
        let yv = (f(hy, hv)? - f(hy, -hv)? - f(-hy, hv)? + f(-hy, -hv)?) / (4.0 * hy * hv);
        Ok([[yy, yv], [yv, vv]])
    }

    fn source(&self) -> PartialSource;

    /// Human-readable form, used in reports.
    fn describe(&self) -> String;
}

pub type SharedLagrangian = Arc<dyn Lagrangian>;

fn require_finite(value: f64, what: &str, t: f64, y: f64, v: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::eval(
            what.to_string(),
            format!("non-finite value {value} at (t, y, v) = ({t}, {y}, {v})"),
        ))
    }
}

/// A Lagrangian given by an expression, with symbolic partials.
#[derive(Clone, Debug)]
pub struct ExprLagrangian {
    expr: Expr,
    d2: Expr,
    d3: Expr,
    d22: Expr,
    d23: Expr,
    d33: Expr,
}

impl ExprLagrangian {
    pub fn new(expr: Expr) -> Self {
        let d2 = expr.differentiate(Var::Y);
        let d3 = expr.differentiate(Var::V);
        let d22 = d2.differentiate(Var::Y);
        let d23 = d2.differentiate(Var::V);
        let d33 = d3.differentiate(Var::V);
        ExprLagrangian {
            expr,
            d2,
            d3,
            d22,
            d23,
            d33,
        }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(Self::new(parse(src)?))
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn d2_expr(&self) -> &Expr {
        &self.d2
    }

    pub fn d3_expr(&self) -> &Expr {
        &self.d3
    }

    pub fn shared(self) -> SharedLagrangian {
        Arc::new(self)
    }
}

impl Lagrangian for ExprLagrangian {
    fn eval(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        self.expr.eval(t, y, v)
    }

    fn d2(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        self.d2.eval(t, y, v)
    }

    fn d3(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        self.d3.eval(t, y, v)
    }

    fn hessian(&self, t: f64, y: f64, v: f64) -> Result<Hessian2> {
        let yy = self.d22.eval(t, y, v)?;
        let yv = self.d23.eval(t, y, v)?;
        let vv = self.d33.eval(t, y, v)?;
        Ok([[yy, yv], [yv, vv]])
    }

    fn source(&self) -> PartialSource {
        PartialSource::Analytic
    }

    fn describe(&self) -> String {
        self.expr.to_string()
    }
}

type LFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// A Lagrangian given by a closure. Partials are central differences with
/// step `1e-6·max(1, |x|)`.
#[derive(Clone)]
pub struct FnLagrangian {
    name: String,
    f: Arc<LFn>,
}

impl FnLagrangian {
    pub fn new(name: impl Into<String>, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FnLagrangian {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn shared(self) -> SharedLagrangian {
        Arc::new(self)
    }
}

impl fmt::Debug for FnLagrangian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnLagrangian").field("name", &self.name).finish()
    }
}

impl Lagrangian for FnLagrangian {
    fn eval(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        require_finite((self.f)(t, y, v), &self.name, t, y, v)
    }

    fn d2(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let h = 1e-6 * y.abs().max(1.0);
        Ok((self.eval(t, y + h, v)? - self.eval(t, y - h, v)?) / (2.0 * h))
    }

    fn d3(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let h = 1e-6 * v.abs().max(1.0);
        Ok((self.eval(t, y, v + h)? - self.eval(t, y, v - h)?) / (2.0 * h))
    }

    fn source(&self) -> PartialSource {
        PartialSource::Numeric
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// `f(t, y, v) = u·L(t, u·y, u·v)`, the integrand a directional problem
/// reduces to.
#[derive(Clone, Debug)]
pub struct ScaledLagrangian {
    inner: SharedLagrangian,
    u: f64,
}

impl ScaledLagrangian {
    pub fn new(inner: SharedLagrangian, u: f64) -> Self {
        ScaledLagrangian { inner, u }
    }

    pub fn u(&self) -> f64 {
        self.u
    }
}

impl Lagrangian for ScaledLagrangian {
    fn eval(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let u = self.u;
        Ok(u * self.inner.eval(t, u * y, u * v)?)
    }

    fn d2(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let u = self.u;
        Ok(u * u * self.inner.d2(t, u * y, u * v)?)
    }

    fn d3(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let u = self.u;
        Ok(u * u * self.inner.d3(t, u * y, u * v)?)
    }

    fn hessian(&self, t: f64, y: f64, v: f64) -> Result<Hessian2> {
        let u = self.u;
        let h = self.inner.hessian(t, u * y, u * v)?;
        let c = u * u * u;
        Ok([[c * h[0][0], c * h[0][1]], [c * h[1][0], c * h[1][1]]])
    }

    fn source(&self) -> PartialSource {
        self.inner.source()
    }

    fn describe(&self) -> String {
        format!("{}*L({}*y, {}*v) with L = {}", self.u, self.u, self.u, self.inner.describe())
    }
}
