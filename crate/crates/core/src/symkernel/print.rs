//! Canonical printer. Output re-parses to the identical polynomial.

use alloc::string::String;
use core::fmt::Write;

use super::coeff::{Coefficient, ParamPoly};
use super::poly::{DiffPolynomial, Monomial};
use super::rational::Rational;
use super::symbol::{Context, JetVar, SymbolKind};

pub fn jet_var_name(v: &JetVar, ctx: &Context) -> String {
    let info = ctx.info(v.sym);
    let mut s = info.name.clone();
    if info.kind == SymbolKind::Field && !v.idx.is_zero() {
        let letters: String = v.idx.directions().into_iter().map(|i| ctx.base_names()[i]).collect();
        if letters.len() == 1 {
            s.push('_');
            s.push_str(&letters);
        } else {
            let _ = write!(s, "_{{{letters}}}");
        }
    }
    s
}

pub fn monomial_text(m: &Monomial, ctx: &Context) -> String {
    let mut parts: alloc::vec::Vec<String> = alloc::vec::Vec::new();
    for (v, e) in m.even() {
        let name = jet_var_name(v, ctx);
        if *e == 1 {
            parts.push(name);
        } else {
            parts.push(alloc::format!("{name}^{e}"));
        }
    }
    for v in m.odd() {
        parts.push(jet_var_name(v, ctx));
    }
    parts.join("*")
}

fn param_mono_text(m: &super::coeff::ParamMono, ctx: &Context) -> String {
    let parts: alloc::vec::Vec<String> = m
        .iter()
        .map(|(p, e)| {
            let n = ctx.param_name(*p);
            if *e == 1 {
                n.into()
            } else {
                alloc::format!("{n}^{e}")
            }
        })
        .collect();
    parts.join("*")
}

pub fn param_poly_text(p: &ParamPoly, ctx: &Context) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (m, c)) in p.terms().rev().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if m.is_empty() {
            let _ = write!(s, "{mag}");
        } else if mag.is_one() {
            s.push_str(&param_mono_text(m, ctx));
        } else {
            let _ = write!(s, "{mag}*{}", param_mono_text(m, ctx));
        }
    }
    s
}

/// Sign and magnitude text of a coefficient; an empty magnitude stands for 1.
fn coefficient_parts(c: &Coefficient, ctx: &Context) -> (bool, String) {
    match c {
        Coefficient::Num(r) => {
            let mag = r.abs();
            (r.is_negative(), if mag.is_one() { String::new() } else { alloc::format!("{mag}") })
        }
        Coefficient::Frac(b) => {
            let (num, den) = (&b.0, &b.1);
            if den.is_one() && num.len() == 1 {
                let (m, r) = num.terms().next().unwrap();
                let mag: Rational = r.abs();
                let pm = param_mono_text(m, ctx);
                let text = if mag.is_one() { pm } else { alloc::format!("{mag}*{pm}") };
                return (r.is_negative(), text);
            }
            let mut s = alloc::format!("({})", param_poly_text(num, ctx));
            if !den.is_one() {
                let _ = write!(s, "/({})", param_poly_text(den, ctx));
            }
            (false, s)
        }
    }
}

pub fn coefficient_text(c: &Coefficient, ctx: &Context) -> String {
    let (neg, mag) = coefficient_parts(c, ctx);
    let mag = if mag.is_empty() { String::from("1") } else { mag };
    if neg {
        alloc::format!("-{mag}")
    } else {
        mag
    }
}

pub fn to_text(e: &DiffPolynomial, ctx: &Context) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (m, c)) in e.terms().enumerate() {
        let (neg, mag) = coefficient_parts(c, ctx);
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let vars = monomial_text(m, ctx);
        match (mag.is_empty(), vars.is_empty()) {
            (true, true) => s.push('1'),
            (true, false) => s.push_str(&vars),
            (false, true) => s.push_str(&mag),
            (false, false) => {
                let _ = write!(s, "{mag}*{vars}");
            }
        }
    }
    s
}

/// Adapter implementing `Display` for a polynomial in a context.
pub struct Show<'a>(pub &'a DiffPolynomial, pub &'a Context);

impl core::fmt::Display for Show<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&to_text(self.0, self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse::parse;
    use crate::symkernel::symbol::Parity;

    fn ctx() -> Context {
        let mut c = Context::new(&['x', 't']).unwrap();
        c.declare("u", Parity::Even).unwrap();
        c.declare("b", Parity::Odd).unwrap();
        c.declare("c", Parity::Odd).unwrap();
        c.declare_param("lambda").unwrap();
        c.declare_imaginary("i").unwrap();
        c
    }

    #[test]
    fn round_trips() {
        let c = ctx();
        for text in [
            "u_x*u_x - 2*u*u_{xx}",
            "-1/2*u_{xxx} + 3*u*u_x",
            "(lambda^2-1)*u_{xt} + lambda*b*c",
            "u/(lambda+1) - 7",
            "i*u + (1+i)/(2-i)*b_t*c",
            "-lambda",
            "0",
        ] {
            let e = parse(text, &c).unwrap();
            let printed = to_text(&e, &c);
            let again = parse(&printed, &c).unwrap();
            assert_eq!(e, again, "{text} -> {printed}");
            assert_eq!(to_text(&again, &c), printed);
        }
    }

    #[test]
    fn jet_names() {
        let c = ctx();
        assert_eq!(to_text(&parse("u_x + u_{tx}", &c).unwrap(), &c), "u_x + u_{xt}");
    }
}
