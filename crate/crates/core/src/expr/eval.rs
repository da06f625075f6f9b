use super::{Expr, Func, Var};
use crate::error::{Error, Result};

impl Expr {
    /// Evaluates at `(t, y, v)`. Leaving an operation's domain (division by
    /// zero, `log` of a nonpositive number, a non-integer power of a
    /// nonpositive base) or producing a non-finite value is an error naming
    /// the offending subexpression.
    pub fn eval(&self, t: f64, y: f64, v: f64) -> Result<f64> {
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::Y) => y,
            Expr::Var(Var::V) => v,
            Expr::Neg(a) => -a.eval(t, y, v)?,
            Expr::Add(a, b) => a.eval(t, y, v)? + b.eval(t, y, v)?,
            Expr::Sub(a, b) => a.eval(t, y, v)? - b.eval(t, y, v)?,
            Expr::Mul(a, b) => a.eval(t, y, v)? * b.eval(t, y, v)?,
            Expr::Div(a, b) => {
                let num = a.eval(t, y, v)?;
                let den = b.eval(t, y, v)?;
                if den == 0.0 {
                    return Err(Error::eval(self.to_string(), "division by zero"));
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(t, y, v)?;
                let exp = b.eval(t, y, v)?;
                pow(base, exp).map_err(|reason| Error::eval(self.to_string(), reason))?
            }
            Expr::Call(func, a) => {
                let x = a.eval(t, y, v)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(Error::eval(
                                self.to_string(),
                                format!("log of nonpositive argument {x}"),
                            ));
                        }
                        x.ln()
                    }
                }
            }
        };
        if !value.is_finite() {
            return Err(Error::eval(self.to_string(), format!("non-finite result {value}")));
        }
        Ok(value)
    }
}

fn pow(base: f64, exp: f64) -> std::result::Result<f64, String> {
    if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        if base == 0.0 && exp < 0.0 {
            return Err("zero raised to a negative power".into());
        }
        return Ok(base.powi(exp as i32));
    }
    if base > 0.0 {
        Ok(base.powf(exp))
    } else {
        Err(format!("non-integer power {exp} of nonpositive base {base}"))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn example_term() {
        let e = parse("t*v^2").unwrap();
        let y1 = 0.25;
        assert_eq!(e.eval(3.0, 123.0, 1.0 - y1).unwrap(), 3.0 * (1.0 - y1) * (1.0 - y1));
        assert_eq!(parse("y").unwrap().eval(9.0, 5.0, 7.0).unwrap(), 5.0);
    }

    #[test]
    fn domain_errors() {
        let e = parse("1/ (t-1)").unwrap();
        match e.eval(1.0, 0.0, 0.0) {
            Err(Error::Evaluation { expr, reason }) => {
                assert_eq!(expr, "1/(t - 1)");
                assert!(reason.contains("division by zero"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse("log(y)").unwrap().eval(0.0, -1.0, 0.0).is_err());
        assert!(parse("log(y)").unwrap().eval(0.0, 0.0, 0.0).is_err());
        assert!(parse("y^-1").unwrap().eval(0.0, 0.0, 0.0).is_err());
        assert!(parse("y^0.5").unwrap().eval(0.0, -4.0, 0.0).is_err());
        assert_eq!(parse("y^0.5").unwrap().eval(0.0, 4.0, 0.0).unwrap(), 2.0);
        assert_eq!(parse("y^3").unwrap().eval(0.0, -2.0, 0.0).unwrap(), -8.0);
        assert!(parse("exp(v)").unwrap().eval(0.0, 0.0, 1000.0).is_err());
    }

    #[test]
    fn error_names_innermost_offender() {
        let e = parse("t + log(y - 2)").unwrap();
        match e.eval(0.0, 1.0, 0.0) {
            Err(Error::Evaluation { expr, .. }) => assert_eq!(expr, "log(y - 2)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bit_identical_repeats() {
        let e = parse("sin(t)*exp(y/3) - log(1 + v^2)^2").unwrap();
        let a = e.eval(0.3, -1.7, 2.2).unwrap();
        let b = e.eval(0.3, -1.7, 2.2).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
