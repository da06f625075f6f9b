//! A small expression language for Lagrangians `L(t, y, v)`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 't' | 'y' | 'v' | 'pi' | 'e'
//!         | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'log'
//! ```
//!
//! `^` binds tighter than unary minus (`-v^2` is `-(v^2)`) and is right
//! associative; the binary operators are left associative. `y` binds to the
//! state slot and `v` to the derivative slot of the Lagrangian.

mod diff;
mod eval;
mod parser;

use std::fmt;

pub use parser::parse;

/// The three Lagrangian slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    Y,
    V,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::Y => "y",
            Var::V => "v",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
        }
    }

    pub(crate) fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    /// `true` if `var` does not occur in the expression.
    pub fn free_of(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var(v) => *v != var,
            Expr::Neg(a) | Expr::Call(_, a) => a.free_of(var),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.free_of(var) && b.free_of(var),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 || c.is_sign_negative() => 3,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            Expr::Const(c) => {
                if c.is_sign_negative() {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_at(f, 3)
            }
            Expr::Add(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 2)
            }
            Expr::Sub(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" - ")?;
                b.fmt_at(f, 2)
            }
            Expr::Mul(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("*")?;
                b.fmt_at(f, 3)
            }
            Expr::Div(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str("/")?;
                b.fmt_at(f, 3)
            }
            Expr::Pow(a, b) => {
                a.fmt_at(f, 5)?;
                f.write_str("^")?;
                b.fmt_at(f, 3)
            }
            Expr::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.fmt_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_respects_precedence() {
        for (src, shown) in [
            ("t*v^2", "t*v^2"),
            ("(t*v)^2", "(t*v)^2"),
            ("-v^2", "-v^2"),
            ("(-v)^2", "(-v)^2"),
            ("y*v-sin(t)", "y*v - sin(t)"),
        ] {
            assert_eq!(parse(src).unwrap().to_string(), shown);
        }
    }

    #[test]
    fn round_trip_corpus() {
        let corpus = [
            "t*v^2",
            "y*v - sin(t)",
            "t*(y^2 + v^2)",
            "exp(-t)*v^2/2",
            "2^3^2",
            "(2^3)^2",
            "1 - (2 - 3)",
            "1/(2/3)",
            "(1/2)/3",
            "--y",
            "-(y + v)*t",
            "log(1 + y^2)*cos(v)",
            "v^-1",
            "pi*e",
            "1e-3*v^2 + 2.5e2",
            "y^(t - 1)",
        ];
        for src in corpus {
            let e = parse(src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e, again, "{src} printed as {e}");
        }
    }

    #[test]
    fn negative_constants_print_reparseably() {
        let e = Expr::Mul(Box::new(Expr::Const(-2.0)), Box::new(Expr::Var(Var::V)));
        let back = parse(&e.to_string()).unwrap();
        assert_eq!(back.eval(0.0, 0.0, 3.0).unwrap(), -6.0);
        let e = Expr::Pow(Box::new(Expr::Const(-2.0)), Box::new(Expr::Const(2.0)));
        assert_eq!(parse(&e.to_string()).unwrap().eval(0.0, 0.0, 0.0).unwrap(), 4.0);
    }

    #[test]
    fn free_of() {
        let e = parse("t*v^2").unwrap();
        assert!(e.free_of(Var::Y));
        assert!(!e.free_of(Var::V));
    }
}
