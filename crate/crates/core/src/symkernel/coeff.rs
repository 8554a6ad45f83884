//! Coefficients: rational functions over Q in the declared formal parameters.
//!
//! A [`ParamPoly`] is a sparse polynomial in parameters. A [`Coefficient`] is
//! either a plain rational number (the common case, kept allocation-light) or
//! a reduced fraction of two parameter polynomials whose denominator is
//! normalized so that its greatest term has coefficient one.
//!
//! The parameter [`ParamId::IMAGINARY`] is the formal imaginary unit: products
//! rewrite `i^2 -> -1` and denominators are rationalized so they never contain
//! it.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamId(pub u16);

impl ParamId {
    pub const IMAGINARY: ParamId = ParamId(u16::MAX);
}

/// Sparse parameter monomial: sorted `(param, exponent)` pairs, exponents > 0.
pub type ParamMono = SmallVec<[(ParamId, u32); 2]>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMono, Rational>,
}

fn mono_mul(a: &ParamMono, b: &ParamMono) -> (ParamMono, bool) {
    let mut out = ParamMono::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            out.push((a[i].0, a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    // i^2 = -1
    let mut negate = false;
    if let Some(last) = out.last_mut() {
        if last.0 == ParamId::IMAGINARY && last.1 >= 2 {
            if (last.1 / 2) % 2 == 1 {
                negate = true;
            }
            last.1 %= 2;
            if last.1 == 0 {
                out.pop();
            }
        }
    }
    (out, negate)
}

impl ParamPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(ParamMono::new(), c);
        }
        ParamPoly { terms }
    }

    pub fn param(p: ParamId) -> Self {
        let mut m = ParamMono::new();
        m.push((p, 1));
        let mut terms = BTreeMap::new();
        terms.insert(m, Rational::ONE);
        ParamPoly { terms }
    }

    pub fn from_terms(iter: impl IntoIterator<Item = (ParamMono, Rational)>) -> Self {
        let mut p = ParamPoly::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: ParamMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ParamMono, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::ZERO),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Coefficient of the greatest monomial.
    pub fn leading(&self) -> Option<(&ParamMono, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn contains(&self, p: ParamId) -> bool {
        self.terms.keys().any(|m| m.iter().any(|(q, _)| *q == p))
    }

    fn params(&self) -> Vec<ParamId> {
        let mut v: Vec<ParamId> = self.terms.keys().flat_map(|m| m.iter().map(|(p, _)| *p)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn degree_in(&self, p: ParamId) -> u32 {
        self.terms.keys().map(|m| m.iter().find(|(q, _)| *q == p).map_or(0, |(_, e)| *e)).max().unwrap_or(0)
    }

    /// Splits into coefficients of `p^0, p^1, ...`.
    pub fn coeffs_in(&self, p: ParamId) -> Vec<ParamPoly> {
        let deg = self.degree_in(p) as usize;
        let mut out = alloc::vec![ParamPoly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut rest = ParamMono::new();
            let mut e = 0;
            for &(q, k) in m {
                if q == p {
                    e = k;
                } else {
                    rest.push((q, k));
                }
            }
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    fn from_coeffs_in(p: ParamId, coeffs: &[ParamPoly]) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            if e == 0 {
                out = &out + c;
                continue;
            }
            let mut pm = ParamMono::new();
            pm.push((p, e as u32));
            let shifted = ParamPoly::from_terms(core::iter::once((pm, Rational::ONE)));
            out = &out + &(&shifted * c);
        }
        out
    }

    /// Replaces the imaginary unit by its negative.
    pub fn conjugate(&self) -> ParamPoly {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let odd_i = m.iter().any(|(p, e)| *p == ParamId::IMAGINARY && e % 2 == 1);
                    (m.clone(), if odd_i { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    /// Drops every term whose degree in `p` is at least `order`.
    pub fn truncate(&self, p: ParamId, order: u32) -> ParamPoly {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.iter().find(|(q, _)| *q == p).map_or(0, |(_, e)| *e) < order)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::constant(Rational::ONE);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &ParamPoly) -> Option<ParamPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ParamPoly::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut vars = self.params();
        vars.extend(d.params());
        vars.sort();
        vars.dedup();
        let v = *vars.last().unwrap();
        if !d.contains(v) {
            // divide every coefficient in v
            let cs = self.coeffs_in(v);
            let mut q = Vec::with_capacity(cs.len());
            for c in &cs {
                q.push(c.div_exact(d)?);
            }
            return Some(ParamPoly::from_coeffs_in(v, &q));
        }
        let mut rem = self.coeffs_in(v);
        let dc = d.coeffs_in(v);
        let dd = dc.len() - 1;
        if rem.len() < dc.len() {
            return None;
        }
        let mut quot = alloc::vec![ParamPoly::zero(); rem.len() - dd];
        for top in (dd..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let qc = rem[top].div_exact(&dc[dd])?;
            for (k, dk) in dc.iter().enumerate() {
                let idx = top - dd + k;
                rem[idx] = &rem[idx] - &(&qc * dk);
            }
            quot[top - dd] = qc;
        }
        if rem.iter().any(|r| !r.is_zero()) {
            return None;
        }
        Some(ParamPoly::from_coeffs_in(v, &quot))
    }

    /// Greatest common divisor, normalized so the leading coefficient is one.
    pub fn gcd(&self, other: &ParamPoly) -> ParamPoly {
        let g = gcd_rec(self, other);
        g.monic()
    }

    pub fn monic(&self) -> ParamPoly {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => ParamPoly::zero(),
        }
    }
}

fn content_in(p: &ParamPoly, v: ParamId) -> ParamPoly {
    let mut g = ParamPoly::zero();
    for c in p.coeffs_in(v) {
        if c.is_zero() {
            continue;
        }
        g = if g.is_zero() { c.monic() } else { gcd_rec(&g, &c).monic() };
        if g.as_constant().is_some() {
            return ParamPoly::constant(Rational::ONE);
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` as polynomials in `v`.
fn prem(a: &[ParamPoly], b: &[ParamPoly]) -> Vec<ParamPoly> {
    let mut r: Vec<ParamPoly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        if r[top].is_zero() {
            r.pop();
            continue;
        }
        let lr = r[top].clone();
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (k, bk) in b.iter().enumerate() {
            let idx = top - db + k;
            r[idx] = &r[idx] - &(&lr * bk);
        }
        r.pop();
    }
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    r
}

fn gcd_rec(a: &ParamPoly, b: &ParamPoly) -> ParamPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.as_constant().is_some() || b.as_constant().is_some() {
        return ParamPoly::constant(Rational::ONE);
    }
    let mut vars = a.params();
    vars.extend(b.params());
    vars.sort();
    vars.dedup();
    let v = *vars.last().unwrap();
    match (a.contains(v), b.contains(v)) {
        (true, false) => return gcd_rec(&content_in(a, v), b),
        (false, true) => return gcd_rec(a, &content_in(b, v)),
        _ => {}
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let g_content = gcd_rec(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let (mut x, mut y) = (pa.coeffs_in(v), pb.coeffs_in(v));
    if x.len() < y.len() {
        core::mem::swap(&mut x, &mut y);
    }
    loop {
        let r = prem(&x, &y);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            // constant in v: primitive gcd is 1
            return g_content;
        }
        let rp = ParamPoly::from_coeffs_in(v, &r);
        let c = content_in(&rp, v);
        let rp = rp.div_exact(&c).expect("content divides");
        x = y;
        y = rp.coeffs_in(v);
    }
    let last = ParamPoly::from_coeffs_in(v, &y);
    let c = content_in(&last, v);
    &last.div_exact(&c).expect("content divides") * &g_content
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let (m, neg) = mono_mul(ma, mb);
                let c = ca * cb;
                out.add_term(m, if neg { -c } else { c });
            }
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        self.scale(&Rational::from_int(-1))
    }
}

/// Exact coefficient of a differential monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coefficient {
    Num(Rational),
    Frac(alloc::boxed::Box<(ParamPoly, ParamPoly)>),
}

impl Default for Coefficient {
    fn default() -> Self {
        Coefficient::Num(Rational::ZERO)
    }
}

impl From<Rational> for Coefficient {
    fn from(r: Rational) -> Self {
        Coefficient::Num(r)
    }
}

impl From<i64> for Coefficient {
    fn from(n: i64) -> Self {
        Coefficient::Num(Rational::from_int(n))
    }
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::Num(Rational::ZERO)
    }

    pub fn one() -> Self {
        Coefficient::Num(Rational::ONE)
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Coefficient::Num(Rational::new(n, d))
    }

    pub fn param(p: ParamId) -> Self {
        Coefficient::from_parts(ParamPoly::param(p), ParamPoly::constant(Rational::ONE))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Coefficient::Num(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Coefficient::Num(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Coefficient::Num(r) => Some(r),
            Coefficient::Frac(_) => None,
        }
    }

    pub fn numerator(&self) -> ParamPoly {
        match self {
            Coefficient::Num(r) => ParamPoly::constant(r.clone()),
            Coefficient::Frac(b) => b.0.clone(),
        }
    }

    pub fn denominator(&self) -> ParamPoly {
        match self {
            Coefficient::Num(_) => ParamPoly::constant(Rational::ONE),
            Coefficient::Frac(b) => b.1.clone(),
        }
    }

    /// Builds the canonical form of `num / den`. Panics if `den` is zero.
    pub fn from_parts(num: ParamPoly, den: ParamPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator in coefficient");
        let (mut num, mut den) = (num, den);
        if den.contains(ParamId::IMAGINARY) {
            let conj = den.conjugate();
            num = &num * &conj;
            den = &den * &conj;
        }
        if num.is_zero() {
            return Coefficient::zero();
        }
        if let Some(d) = den.as_constant() {
            if let Some(n) = num.as_constant() {
                return Coefficient::Num(&n / &d);
            }
            return Coefficient::Frac(alloc::boxed::Box::new((
                num.scale(&d.recip()),
                ParamPoly::constant(Rational::ONE),
            )));
        }
        let g = num.gcd(&den);
        if g.as_constant().is_none() {
            num = num.div_exact(&g).expect("gcd divides numerator");
            den = den.div_exact(&g).expect("gcd divides denominator");
        }
        let lead = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lead.recip();
        let num = num.scale(&inv);
        let den = den.scale(&inv);
        if den.is_one() {
            if let Some(n) = num.as_constant() {
                return Coefficient::Num(n);
            }
        }
        Coefficient::Frac(alloc::boxed::Box::new((num, den)))
    }

    pub fn recip(&self) -> Option<Coefficient> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Coefficient::Num(r) => Coefficient::Num(r.recip()),
            Coefficient::Frac(b) => Coefficient::from_parts(b.1.clone(), b.0.clone()),
        })
    }

    pub fn pow(&self, e: u32) -> Coefficient {
        let mut acc = Coefficient::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// True when the coefficient is a positive rational or a non-constant
    /// function whose numerator's leading coefficient is positive; used only
    /// for sign placement when printing.
    pub fn looks_negative(&self) -> bool {
        match self {
            Coefficient::Num(r) => r.is_negative(),
            Coefficient::Frac(b) => b.1.is_one() && b.0.len() == 1 && b.0.leading().unwrap().1.is_negative(),
        }
    }

    pub fn contains_param(&self, p: ParamId) -> bool {
        match self {
            Coefficient::Num(_) => false,
            Coefficient::Frac(b) => b.0.contains(p) || b.1.contains(p),
        }
    }

    /// Drops all powers `p^k` with `k >= order`. Requires a denominator free
    /// of `p`.
    pub fn truncate(&self, p: ParamId, order: u32) -> Option<Coefficient> {
        match self {
            Coefficient::Num(_) => Some(if order == 0 { Coefficient::zero() } else { self.clone() }),
            Coefficient::Frac(b) => {
                if b.1.contains(p) {
                    return None;
                }
                Some(Coefficient::from_parts(b.0.truncate(p, order), b.1.clone()))
            }
        }
    }

    /// Coefficient of `p^k` (denominator must be free of `p`).
    pub fn coefficient_of(&self, p: ParamId, k: u32) -> Option<Coefficient> {
        match self {
            Coefficient::Num(_) => Some(if k == 0 { self.clone() } else { Coefficient::zero() }),
            Coefficient::Frac(b) => {
                if b.1.contains(p) {
                    return None;
                }
                let cs = b.0.coeffs_in(p);
                let c = cs.get(k as usize).cloned().unwrap_or_default();
                Some(Coefficient::from_parts(c, b.1.clone()))
            }
        }
    }

    /// Substitutes a rational value for a parameter.
    pub fn eval_param(&self, p: ParamId, value: &Rational) -> Option<Coefficient> {
        let ev = |poly: &ParamPoly| {
            let cs = poly.coeffs_in(p);
            let mut acc = ParamPoly::zero();
            let mut pw = Rational::ONE;
            for c in cs {
                acc = &acc + &c.scale(&pw);
                pw = &pw * value;
            }
            acc
        };
        match self {
            Coefficient::Num(_) => Some(self.clone()),
            Coefficient::Frac(b) => {
                let den = ev(&b.1);
                if den.is_zero() {
                    return None;
                }
                Some(Coefficient::from_parts(ev(&b.0), den))
            }
        }
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        match (self, rhs) {
            (Coefficient::Num(a), Coefficient::Num(b)) => Coefficient::Num(a + b),
            _ => {
                let (a, b) = (self.numerator(), self.denominator());
                let (c, d) = (rhs.numerator(), rhs.denominator());
                if b == d {
                    Coefficient::from_parts(&a + &c, b)
                } else {
                    Coefficient::from_parts(&(&a * &d) + &(&c * &b), &b * &d)
                }
            }
        }
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        match (self, rhs) {
            (Coefficient::Num(a), Coefficient::Num(b)) => Coefficient::Num(a * b),
            (Coefficient::Num(a), Coefficient::Frac(f)) | (Coefficient::Frac(f), Coefficient::Num(a)) => {
                if a.is_zero() {
                    return Coefficient::zero();
                }
                Coefficient::Frac(alloc::boxed::Box::new((f.0.scale(a), f.1.clone())))
            }
            _ => {
                Coefficient::from_parts(&self.numerator() * &rhs.numerator(), &self.denominator() * &rhs.denominator())
            }
        }
    }
}

impl<'a> Div<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Coefficient) -> Coefficient {
        self * &rhs.recip().expect("division by zero coefficient")
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Num(r) => Coefficient::Num(-r.clone()),
            Coefficient::Frac(f) => Coefficient::Frac(alloc::boxed::Box::new((-&f.0, f.1.clone()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam() -> ParamPoly {
        ParamPoly::param(ParamId(0))
    }

    fn c(n: i64) -> ParamPoly {
        ParamPoly::constant(Rational::from_int(n))
    }

    #[test]
    fn fraction_reduces_by_gcd() {
        // (lambda^2 - 1) / (lambda + 1) = lambda - 1
        let num = &lam().pow(2) - &c(1);
        let den = &lam() + &c(1);
        let q = Coefficient::from_parts(num, den);
        assert_eq!(q, Coefficient::from_parts(&lam() - &c(1), c(1)));
    }

    #[test]
    fn multivariate_gcd() {
        let mu = ParamPoly::param(ParamId(1));
        let a = &(&lam() + &mu) * &(&lam() - &c(2));
        let b = &(&lam() + &mu) * &(&mu + &c(3));
        let g = a.gcd(&b);
        assert_eq!(g, (&lam() + &mu).monic());
    }

    #[test]
    fn denominator_is_normalized() {
        let a = Coefficient::from_parts(c(2), &lam().scale(&Rational::from_int(4)) + &c(2));
        let b = Coefficient::from_parts(c(1), &lam().scale(&Rational::from_int(2)) + &c(1));
        assert_eq!(a, b);
        assert!(a.denominator().leading().unwrap().1.is_one());
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let i = Coefficient::param(ParamId::IMAGINARY);
        assert_eq!(&i * &i, Coefficient::from(-1));
        // 1/i = -i
        let inv = i.recip().unwrap();
        assert_eq!(inv, -&i);
    }

    #[test]
    fn sum_of_fractions_cancels() {
        let x = Coefficient::from_parts(c(1), lam());
        let y = Coefficient::from_parts(c(-1), lam());
        assert!((&x + &y).is_zero());
    }

    #[test]
    fn truncation_and_extraction() {
        let e = ParamId(3);
        let p = &(&ParamPoly::param(e) + &c(1)).pow(3) * &c(1);
        let k = Coefficient::from_parts(p, c(1));
        let t = k.truncate(e, 2).unwrap();
        assert_eq!(t, Coefficient::from_parts(&ParamPoly::param(e).scale(&Rational::from_int(3)) + &c(1), c(1)));
        assert_eq!(k.coefficient_of(e, 2).unwrap(), Coefficient::from(3));
    }
}
