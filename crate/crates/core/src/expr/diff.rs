use super::{Expr, Func, Var};

// Smart constructors with 0/1 identities and constant folding.

fn is_const(e: &Expr, c: f64) -> bool {
    matches!(e, Expr::Const(x) if *x == c)
}

fn folded(v: f64) -> Option<Expr> {
    v.is_finite().then_some(Expr::Const(v))
}

pub(crate) fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Neg(inner) => *inner,
        a => Expr::Neg(Box::new(a)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) => b,
        _ if is_const(&b, 0.0) => a,
        (Expr::Const(x), Expr::Const(y)) => folded(x + y).unwrap_or(Expr::Add(Box::new(a), Box::new(b))),
        (_, Expr::Neg(inner)) => sub(a, (**inner).clone()),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&b, 0.0) => a,
        _ if is_const(&a, 0.0) => neg(b),
        (Expr::Const(x), Expr::Const(y)) => folded(x - y).unwrap_or(Expr::Sub(Box::new(a), Box::new(b))),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&a, 0.0) || is_const(&b, 0.0) => Expr::Const(0.0),
        _ if is_const(&a, 1.0) => b,
        _ if is_const(&b, 1.0) => a,
        _ if is_const(&a, -1.0) => neg(b),
        _ if is_const(&b, -1.0) => neg(a),
        (Expr::Const(x), Expr::Const(y)) => folded(x * y).unwrap_or(Expr::Mul(Box::new(a), Box::new(b))),
        // Pull constants to the front: c*(d*x) -> (c*d)*x, x*c -> c*x.
        (Expr::Const(x), Expr::Mul(l, r)) if matches!(**l, Expr::Const(_)) => {
            let Expr::Const(y) = **l else { unreachable!() };
            mul(Expr::Const(x * y), (**r).clone())
        }
        (_, Expr::Const(_)) => mul(b, a),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&b, 1.0) => a,
        _ if is_const(&a, 0.0) && !is_const(&b, 0.0) => Expr::Const(0.0),
        (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => {
            folded(x / y).unwrap_or(Expr::Div(Box::new(a), Box::new(b)))
        }
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_const(&b, 0.0) => Expr::Const(1.0),
        _ if is_const(&b, 1.0) => a,
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    Expr::Call(f, Box::new(a))
}

impl Expr {
    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(a.differentiate(var)),
            Expr::Add(a, b) => add(a.differentiate(var), b.differentiate(var)),
            Expr::Sub(a, b) => sub(a.differentiate(var), b.differentiate(var)),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(var), (**b).clone()),
                mul((**a).clone(), b.differentiate(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                if is_const(&db, 0.0) {
                    return div(da, (**b).clone());
                }
                div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), Expr::Const(2.0)),
                )
            }
            Expr::Pow(base, exp) => {
                let du = base.differentiate(var);
                if exp.free_of(var) {
                    // d(u^c) = c * u^(c - 1) * u'
                    let lowered = sub((**exp).clone(), Expr::Const(1.0));
                    mul(mul((**exp).clone(), pow((**base).clone(), lowered)), du)
                } else {
                    // d(u^w) = u^w * (w' log u + w u' / u)
                    let dw = exp.differentiate(var);
                    let inner = add(
                        mul(dw, call(Func::Log, (**base).clone())),
                        mul((**exp).clone(), div(du, (**base).clone())),
                    );
                    mul(self.clone(), inner)
                }
            }
            Expr::Call(f, a) => {
                let da = a.differentiate(var);
                let outer = match f {
                    Func::Sin => call(Func::Cos, (**a).clone()),
                    Func::Cos => neg(call(Func::Sin, (**a).clone())),
                    Func::Exp => self.clone(),
                    Func::Log => return div(da, (**a).clone()),
                };
                mul(outer, da)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn central(e: &Expr, var: Var, p: (f64, f64, f64)) -> f64 {
        let h = 1e-6;
        let at = |d: f64| {
            let (t, y, v) = match var {
                Var::T => (p.0 + d, p.1, p.2),
                Var::Y => (p.0, p.1 + d, p.2),
                Var::V => (p.0, p.1, p.2 + d),
            };
            e.eval(t, y, v).unwrap()
        };
        (at(h) - at(-h)) / (2.0 * h)
    }

    #[test]
    fn example_partials() {
        let l = parse("t*v^2").unwrap();
        let dv = l.differentiate(Var::V);
        let dy = l.differentiate(Var::Y);
        assert_eq!(dy, Expr::Const(0.0));
        for (t, v) in [(1.0, 0.4), (3.0, -2.0), (4.0, 0.0)] {
            assert!((dv.eval(t, 0.0, v).unwrap() - 2.0 * t * v).abs() < 1e-15);
            assert!((central(&l, Var::V, (t, 0.0, v)) - 2.0 * t * v).abs() < 1e-6);
        }
    }

    #[test]
    fn product_and_chain_rule() {
        let e = parse("sin(t)*y").unwrap();
        let d = e.differentiate(Var::T);
        let want = parse("cos(t)*y").unwrap();
        for (t, y) in [(0.1, 2.0), (1.3, -0.5)] {
            assert!((d.eval(t, y, 0.0).unwrap() - want.eval(t, y, 0.0).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn simplification_keeps_trees_small() {
        assert_eq!(parse("y^2").unwrap().differentiate(Var::Y).to_string(), "2*y");
        assert_eq!(parse("t*y").unwrap().differentiate(Var::V), Expr::Const(0.0));
        assert_eq!(parse("3*v").unwrap().differentiate(Var::V), Expr::Const(3.0));
        assert_eq!(parse("t*v^2").unwrap().differentiate(Var::V).to_string(), "t*(2*v)");
    }

    #[test]
    fn variable_exponent() {
        let e = parse("y^t").unwrap();
        let p = (1.7, 2.3, 0.0);
        for var in [Var::T, Var::Y] {
            let d = e.differentiate(var).eval(p.0, p.1, p.2).unwrap();
            assert!((d - central(&e, var, p)).abs() < 1e-6 * d.abs().max(1.0));
        }
    }

    #[test]
    fn log_and_quotient() {
        let e = parse("log(1 + y^2)/(2 + cos(v))").unwrap();
        let p = (0.0, 0.7, -1.1);
        for var in [Var::Y, Var::V] {
            let d = e.differentiate(var).eval(p.0, p.1, p.2).unwrap();
            assert!((d - central(&e, var, p)).abs() < 1e-8);
        }
    }

    #[test]
    fn log_domain_is_an_evaluation_error() {
        let d = parse("log(y)").unwrap().differentiate(Var::Y);
        assert!(d.eval(0.0, 0.0, 0.0).is_err());
    }
}
