//! Recursive-descent parser for differential-polynomial expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | ident jet? | '(' expr ')'
//! jet    := '_' letters | '_{' letters '}'
//! ```
//!
//! Division is allowed only by expressions free of jet variables.

use alloc::format;
use alloc::string::{String, ToString};

use super::coeff::{Coefficient, ParamPoly};
use super::poly::DiffPolynomial;
use super::rational::Rational;
use super::symbol::{Context, MultiIndex, SymbolKind};
use crate::error::{Error, Result};

pub fn parse(text: &str, ctx: &Context) -> Result<DiffPolynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, ctx };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err(&format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: &'a Context,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<DiffPolynomial> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<DiffPolynomial> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = self.mul_checked(&acc, &rhs, at)?;
                }
                b'/' => {
                    let at = self.pos;
                    self.pos += 1;
                    let rhs = self.unary()?;
                    let Some(c) = rhs.as_constant() else {
                        return Err(Error::Parse { pos: at, msg: "division by a non-constant expression".into() });
                    };
                    let Some(inv) = c.recip() else {
                        return Err(Error::Parse { pos: at, msg: "division by zero".into() });
                    };
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn mul_checked(&self, a: &DiffPolynomial, b: &DiffPolynomial, at: usize) -> Result<DiffPolynomial> {
        a.checked_mul(b).map_err(|v| Error::OddSquare { name: self.ctx.info(v.sym).name.clone(), pos: at })
    }

    fn unary(&mut self) -> Result<DiffPolynomial> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<DiffPolynomial> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            let at = self.pos;
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected a nonnegative integer exponent"));
            }
            let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = text.parse().map_err(|_| Error::Parse { pos: start, msg: "exponent too large".into() })?;
            let mut acc = DiffPolynomial::one();
            for _ in 0..e {
                acc = self.mul_checked(&acc, &base, at)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DiffPolynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let r = Rational::parse(text).ok_or_else(|| Error::Parse { pos: start, msg: "bad number".into() })?;
                Ok(DiffPolynomial::constant(Coefficient::Num(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.err(&format!("unexpected `{}`", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn ident(&mut self) -> Result<DiffPolynomial> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name: String = core::str::from_utf8(&self.src[start..self.pos]).unwrap().into();
        let jet = if self.src.get(self.pos) == Some(&b'_') { Some(self.jet_suffix()?) } else { None };
        if let Some(p) = self.ctx.param(&name) {
            if jet.is_some() {
                return Err(Error::Parse { pos: start, msg: format!("parameter `{name}` cannot carry a jet index") });
            }
            let c = Coefficient::from_parts(ParamPoly::param(p), ParamPoly::constant(Rational::ONE));
            return Ok(DiffPolynomial::constant(c));
        }
        let Some(id) = self.ctx.lookup(&name) else {
            return Err(Error::UndeclaredSymbol { name, pos: start });
        };
        let info = self.ctx.info(id);
        if let SymbolKind::Base(_) = info.kind {
            if jet.is_some() {
                return Err(Error::Parse {
                    pos: start,
                    msg: format!("base coordinate `{name}` cannot carry a jet index"),
                });
            }
        }
        Ok(DiffPolynomial::var(self.ctx.jet(id, jet.unwrap_or(MultiIndex::ZERO))))
    }

    fn jet_suffix(&mut self) -> Result<MultiIndex> {
        self.pos += 1;
        let braced = self.src.get(self.pos) == Some(&b'{');
        if braced {
            self.pos += 1;
        }
        let start = self.pos;
        let mut idx = MultiIndex::ZERO;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            let c = self.src[self.pos] as char;
            let Some(i) = self.ctx.base_names().iter().position(|&b| b == c) else {
                return Err(self.err(&format!("`{c}` is not a base coordinate")));
            };
            if idx.0[i] == u8::MAX {
                return Err(self.err("jet order too large"));
            }
            idx.0[i] += 1;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("empty jet index"));
        }
        if braced {
            if self.src.get(self.pos) != Some(&b'}') {
                return Err(self.err("expected `}`"));
            }
            self.pos += 1;
        }
        Ok(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::Parity;

    fn ctx() -> Context {
        let mut c = Context::new(&['x', 't']).unwrap();
        c.declare("u", Parity::Even).unwrap();
        c.declare("b1", Parity::Odd).unwrap();
        c.declare("b2", Parity::Odd).unwrap();
        c.declare_param("lambda").unwrap();
        c
    }

    #[test]
    fn two_monomials() {
        let c = ctx();
        assert_eq!(parse("u_x*u_x - 2*u*u_{xx}", &c).unwrap().len(), 2);
    }

    #[test]
    fn odd_square_rejected() {
        let c = ctx();
        assert!(matches!(parse("b1*b1", &c), Err(Error::OddSquare { pos: 2, .. })));
        assert!(matches!(parse("b1^2", &c), Err(Error::OddSquare { .. })));
        assert!(parse("b1*b2 + b2*b1", &c).unwrap().is_zero());
    }

    #[test]
    fn parameter_coefficient() {
        let c = ctx();
        let e = parse("(lambda^2-1)*u_{xt}", &c).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e.terms().next().unwrap().1.as_rational().is_none());
    }

    #[test]
    fn errors_carry_positions() {
        let c = ctx();
        assert!(matches!(parse("u + w", &c), Err(Error::UndeclaredSymbol { pos: 4, .. })));
        assert!(matches!(parse("u +* u", &c), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(parse("u_q", &c), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse("1/u", &c), Err(Error::Parse { pos: 1, .. })));
        assert!(parse("(u", &c).is_err());
        assert!(parse("", &c).is_err());
    }

    #[test]
    fn jet_spellings_agree() {
        let c = ctx();
        assert_eq!(parse("u_xt", &c).unwrap(), parse("u_{tx}", &c).unwrap());
    }

    #[test]
    fn rational_division() {
        let c = ctx();
        assert_eq!(parse("u/2 + u/2", &c).unwrap(), parse("u", &c).unwrap());
        assert!(parse("u/(lambda - lambda)", &c).is_err());
        let e = parse("u/(lambda+1)*(lambda+1)", &c).unwrap();
        assert_eq!(e, parse("u", &c).unwrap());
    }
}
