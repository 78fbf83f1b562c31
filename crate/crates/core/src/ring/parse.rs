//! Polynomial expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' ['-'] integer)?
//! atom   := integer | name | '(' expr ')'
//! ```
//!
//! Division and negative exponents are accepted only for units `c * x^r`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::context::RingContext;
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|&(_, c)| c).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((
                pos,
                Tok::Name(chars[start..i].iter().map(|&(_, c)| c).collect()),
            ));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    ctx: &'a Arc<RingContext>,
}

impl<'a> Parser<'a> {
    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |t| t.0)
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.at) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.at += 1;
            let rhs = self.term()?;
            acc = if op == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.at += 1;
            let pos = self.pos();
            let rhs = self.unary()?;
            acc = if op == '*' {
                &acc * &rhs
            } else {
                match rhs.unit_inverse() {
                    Some(inv) => &acc * &inv,
                    None => {
                        return Err(Error::Parse {
                            pos,
                            msg: "division is only by nonzero constants times powers of x".into(),
                        })
                    }
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek_op() {
            Some('-') => {
                self.at += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek_op() != Some('^') {
            return Ok(base);
        }
        self.at += 1;
        let neg = if self.peek_op() == Some('-') {
            self.at += 1;
            true
        } else {
            false
        };
        let pos = self.pos();
        let e: i64 = match self.toks.get(self.at) {
            Some((_, Tok::Int(v))) => match i64::try_from(v.clone()) {
                Ok(v) if v <= u32::MAX as i64 => v,
                _ => return self.err("exponent too large"),
            },
            _ => return self.err("expected integer exponent"),
        };
        self.at += 1;
        let e = if neg { -e } else { e };
        base.pow_signed(e).map_err(|_| Error::Parse {
            pos,
            msg: "negative exponents are only allowed on units such as x".into(),
        })
    }

    fn atom(&mut self) -> Result<Poly> {
        let pos = self.pos();
        match self.toks.get(self.at).cloned() {
            Some((_, Tok::Int(v))) => {
                self.at += 1;
                Ok(Poly::constant(self.ctx, BigRational::from_integer(v)))
            }
            Some((_, Tok::Name(name))) => {
                self.at += 1;
                if name == "x" {
                    return Ok(Poly::x_pow(self.ctx, 1));
                }
                match self.ctx.lookup(&name) {
                    Some(idx) => Ok(Poly::var(self.ctx, idx)),
                    None => Err(Error::UnknownVariable(name)),
                }
            }
            Some((_, Tok::Op('('))) => {
                self.at += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return self.err("expected `)`");
                }
                self.at += 1;
                Ok(inner)
            }
            Some(_) => Err(Error::Parse {
                pos,
                msg: "unexpected token".into(),
            }),
            None => Err(Error::Parse {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parse a polynomial expression in the given context.
pub fn parse_poly(text: &str, ctx: &Arc<RingContext>) -> Result<Poly> {
    let toks = lex(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        ctx,
    };
    let out = parser.expr()?;
    if parser.at != parser.toks.len() {
        return parser.err("trailing input");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::XOrder;

    #[test]
    fn nagata_y_component() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let p = parse_poly("y + x*(x*z - y^2)", &ctx).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.to_string(), "-x*y^2 + y + x^2*z");
    }

    #[test]
    fn zero_and_laurent_monomial() {
        let ctx = RingContext::new(1, 3, 0).unwrap();
        assert!(parse_poly("0", &ctx).unwrap().is_zero());
        let p = parse_poly("x^-2*y*z1^3", &ctx).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.x_order(), XOrder::Finite(-2));
    }

    #[test]
    fn rationals_and_division() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        let p = parse_poly("3/2*y - y^2/(2*x)", &ctx).unwrap();
        assert_eq!(p.to_string(), "-1/2*x^-1*y^2 + 3/2*y");
        assert_eq!(parse_poly(&p.to_string(), &ctx).unwrap(), p);
    }

    #[test]
    fn errors_carry_positions() {
        let ctx = RingContext::new(1, 1, 0).unwrap();
        assert!(matches!(
            parse_poly("y + (z", &ctx),
            Err(Error::Parse { pos: 6, .. })
        ));
        assert_eq!(
            parse_poly("y + w", &ctx),
            Err(Error::UnknownVariable("w".into()))
        );
        assert!(matches!(parse_poly("y^-1", &ctx), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_poly("z / y", &ctx),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_poly("y $ z", &ctx),
            Err(Error::Parse { pos: 2, .. })
        ));
    }
}
