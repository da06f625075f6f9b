use super::{Expr, Func, Var};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    tok: Tok::Op(c as char),
                    offset: i,
                });
                i += 1;
            }
            b'(' | b')' => {
                out.push(Token {
                    tok: if c == b'(' { Tok::LParen } else { Tok::RParen },
                    offset: i,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // Exponent only if digits follow, so `2e` stays `2` then `e`.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, format!("malformed number `{text}`")))?;
                out.push(Token {
                    tok: Tok::Num(value),
                    offset: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(src[start..i].to_string()),
                    offset: start,
                });
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat_op('^') {
            return Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn expect_rparen(&mut self) -> Result<()> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(syntax(self.offset(), "expected `)` but input ended")),
            Some(_) => Err(syntax(self.offset(), "expected `)`")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let offset = self.offset();
        let Some(token) = self.bump() else {
            return Err(syntax(offset, "unexpected end of input"));
        };
        match token.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var(Var::T)),
                "y" => Ok(Expr::Var(Var::Y)),
                "v" => Ok(Expr::Var(Var::V)),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                "e" => Ok(Expr::Const(std::f64::consts::E)),
                _ => match Func::from_name(&name) {
                    Some(func) => {
                        if self.peek() != Some(&Tok::LParen) {
                            return Err(syntax(
                                self.offset(),
                                format!("expected `(` after `{name}`"),
                            ));
                        }
                        self.pos += 1;
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                    None => Err(Error::UnknownIdentifier {
                        name,
                        offset: token.offset,
                    }),
                },
            },
            Tok::RParen => Err(syntax(token.offset, "unexpected `)`")),
            Tok::Op(op) => Err(syntax(token.offset, format!("unexpected `{op}`"))),
        }
    }
}

/// Parses a Lagrangian expression over `t`, `y`, `v`.
pub fn parse(src: &str) -> Result<Expr> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn example_lagrangian_shape() {
        let e = parse("t*v^2").unwrap();
        assert_eq!(
            e,
            Expr::Mul(
                b(Expr::Var(Var::T)),
                b(Expr::Pow(b(Expr::Var(Var::V)), b(Expr::Const(2.0))))
            )
        );
    }

    #[test]
    fn mul_binds_tighter_than_sub() {
        let e = parse("y*v - sin(t)").unwrap();
        assert_eq!(
            e,
            Expr::Sub(
                b(Expr::Mul(b(Expr::Var(Var::Y)), b(Expr::Var(Var::V)))),
                b(Expr::Call(Func::Sin, b(Expr::Var(Var::T))))
            )
        );
    }

    #[test]
    fn associativity() {
        assert_eq!(parse("1-2-3").unwrap().eval(0.0, 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(parse("2^3^2").unwrap().eval(0.0, 0.0, 0.0).unwrap(), 512.0);
        assert_eq!(parse("-2^2").unwrap().eval(0.0, 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0, 0.0, 0.0).unwrap(), 0.5);
    }

    #[test]
    fn unclosed_paren_reports_end_offset() {
        match parse("t*(") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
        match parse("(t + y") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_offsets() {
        assert!(matches!(
            parse("t + w"),
            Err(Error::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(matches!(parse("t $ y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("t y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse("sin t"), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("1.2.3"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse("t*)"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse("1e-3").unwrap(), Expr::Const(1e-3));
        assert_eq!(parse("2.5E2").unwrap(), Expr::Const(250.0));
        assert_eq!(parse(".5").unwrap(), Expr::Const(0.5));
        // `2e` is not an exponent; the trailing `e` is a stray constant.
        assert!(parse("2e").is_err());
        assert_eq!(parse("2*e").unwrap().eval(0.0, 0.0, 0.0).unwrap(), 2.0 * std::f64::consts::E);
    }
}
