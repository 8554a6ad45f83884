//! Graded differential polynomials in canonical form.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::coeff::Coefficient;
use super::symbol::{JetVar, Parity, SymbolId};

/// Product of jet variables: even variables with exponents, then distinct odd
/// variables in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    even: SmallVec<[(JetVar, u32); 3]>,
    odd: SmallVec<[JetVar; 3]>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(v: JetVar) -> Monomial {
        let mut m = Monomial::default();
        if v.is_odd() {
            m.odd.push(v);
        } else {
            m.even.push((v, 1));
        }
        m
    }

    /// Even part only; `even` must already be sorted.
    pub fn from_even(even: &[(JetVar, u32)]) -> Monomial {
        Monomial { even: even.into(), odd: SmallVec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.even.is_empty() && self.odd.is_empty()
    }

    pub fn even(&self) -> &[(JetVar, u32)] {
        &self.even
    }

    pub fn odd(&self) -> &[JetVar] {
        &self.odd
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.odd.len() % 2 == 1)
    }

    pub fn degree(&self) -> u32 {
        self.even.iter().map(|(_, e)| *e).sum::<u32>() + self.odd.len() as u32
    }

    pub fn vars(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.even.iter().map(|(v, _)| *v).chain(self.odd.iter().copied())
    }

    pub fn exponent(&self, v: &JetVar) -> u32 {
        if v.is_odd() {
            self.odd.binary_search(v).map_or(0, |_| 1)
        } else {
            self.even.iter().find(|(w, _)| w == v).map_or(0, |(_, e)| *e)
        }
    }

    pub fn max_jet_order(&self) -> u32 {
        self.vars().map(|v| v.idx.order()).max().unwrap_or(0)
    }

    /// Product with the sign produced by sorting odd factors; `None` if an odd
    /// variable repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let mut even: SmallVec<[(JetVar, u32); 3]> = SmallVec::with_capacity(self.even.len() + other.even.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.even, &other.even);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                even.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                even.push(b[j]);
                j += 1;
            } else {
                even.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
        let mut odd: SmallVec<[JetVar; 3]> = SmallVec::with_capacity(self.odd.len() + other.odd.len());
        let (a, b) = (&self.odd, &other.odd);
        let (mut i, mut j) = (0, 0);
        let mut neg = false;
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                odd.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                // b[j] jumps over the remaining a's
                if (a.len() - i) % 2 == 1 {
                    neg = !neg;
                }
                odd.push(b[j]);
                j += 1;
            } else {
                return None;
            }
        }
        Some((Monomial { even, odd }, neg))
    }

    /// Removes one power of an even variable.
    pub fn without_even(&self, v: &JetVar) -> Monomial {
        let mut m = self.clone();
        if let Some(pos) = m.even.iter().position(|(w, _)| w == v) {
            if m.even[pos].1 == 1 {
                m.even.remove(pos);
            } else {
                m.even[pos].1 -= 1;
            }
        }
        m
    }

    /// Splits at odd position `j`: (even part with odd[..j], odd[j+1..]).
    pub fn split_odd(&self, j: usize) -> (Monomial, Monomial) {
        let left = Monomial { even: self.even.clone(), odd: self.odd[..j].iter().copied().collect() };
        let right = Monomial { even: SmallVec::new(), odd: self.odd[j + 1..].iter().copied().collect() };
        (left, right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<Monomial, Coefficient>,
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Coefficient::one())
    }

    pub fn constant(c: Coefficient) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Coefficient::from(n))
    }

    pub fn var(v: JetVar) -> Self {
        Self::term(Monomial::var(v), Coefficient::one())
    }

    pub fn term(m: Monomial, c: Coefficient) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coefficient)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Coefficient {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.terms.len() {
            0 => Some(Coefficient::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Coefficient) {
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

    pub fn add_assign(&mut self, other: &DiffPolynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &DiffPolynomial, s: &Coefficient) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, c: &Coefficient) -> DiffPolynomial {
        if c.is_zero() {
            return DiffPolynomial::zero();
        }
        DiffPolynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn scale_int(&self, n: i64) -> DiffPolynomial {
        self.scale(&Coefficient::from(n))
    }

    /// Parity if every monomial has the same parity; zero is even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.parity().is_some()
    }

    pub fn max_jet_order(&self) -> u32 {
        self.terms.keys().map(|m| m.max_jet_order()).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Every distinct variable occurring, in increasing order.
    pub fn variables(&self) -> Vec<JetVar> {
        let mut v: Vec<JetVar> = self.terms.keys().flat_map(|m| m.vars().collect::<Vec<_>>()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn symbols(&self) -> Vec<SymbolId> {
        let mut v: Vec<SymbolId> = self.variables().into_iter().map(|j| j.sym).collect();
        v.dedup();
        v
    }

    pub fn depends_on(&self, sym: SymbolId) -> bool {
        self.terms.keys().any(|m| m.vars().any(|v| v.sym == sym))
    }

    /// Product checking for repeated odd factors instead of silently dropping them.
    pub fn checked_mul(&self, other: &DiffPolynomial) -> Result<DiffPolynomial, JetVar> {
        let mut out = DiffPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                match ma.mul(mb) {
                    Some((m, neg)) => {
                        let c = ca * cb;
                        out.add_term(m, if neg { -&c } else { c });
                    }
                    None => {
                        let rep = ma.odd().iter().find(|v| mb.odd().contains(v)).copied().unwrap();
                        return Err(rep);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Coefficient) -> Coefficient) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn try_map_coefficients<E>(
        &self,
        mut f: impl FnMut(&Coefficient) -> Result<Coefficient, E>,
    ) -> Result<DiffPolynomial, E> {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> DiffPolynomial {
        let mut acc = DiffPolynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Keeps monomials selected by `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> DiffPolynomial {
        DiffPolynomial {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }
}

impl From<JetVar> for DiffPolynomial {
    fn from(v: JetVar) -> Self {
        DiffPolynomial::var(v)
    }
}

impl<'a> Add<&'a DiffPolynomial> for &'a DiffPolynomial {
    type Output = DiffPolynomial;
    fn add(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        out.add_assign(small);
        out
    }
}

impl<'a> Sub<&'a DiffPolynomial> for &'a DiffPolynomial {
    type Output = DiffPolynomial;
    fn sub(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a DiffPolynomial> for &'a DiffPolynomial {
    type Output = DiffPolynomial;
    fn mul(self, rhs: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                if let Some((m, neg)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -&c } else { c });
                }
            }
        }
        out
    }
}

impl Neg for &DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        DiffPolynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for DiffPolynomial {
            type Output = DiffPolynomial;
            fn $m(self, rhs: DiffPolynomial) -> DiffPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DiffPolynomial {
    type Output = DiffPolynomial;
    fn neg(self) -> DiffPolynomial {
        -&self
    }
}

impl core::iter::Sum for DiffPolynomial {
    fn sum<I: Iterator<Item = DiffPolynomial>>(iter: I) -> DiffPolynomial {
        let mut acc = DiffPolynomial::zero();
        for p in iter {
            acc.add_assign(&p);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::symbol::{MultiIndex, SymbolId};

    fn odd(i: u16) -> DiffPolynomial {
        DiffPolynomial::var(JetVar::new(SymbolId(i), Parity::Odd, MultiIndex::ZERO))
    }

    fn even(i: u16) -> DiffPolynomial {
        DiffPolynomial::var(JetVar::new(SymbolId(i), Parity::Even, MultiIndex::ZERO))
    }

    #[test]
    fn odd_variables_anticommute() {
        let (a, b) = (odd(1), odd(2));
        assert_eq!(&a * &b, -(&b * &a));
        assert!((&a * &a).is_zero());
        assert!((&(&a * &b) * &a).is_zero());
    }

    #[test]
    fn sign_of_three_cycle() {
        let (a, b, c) = (odd(1), odd(2), odd(3));
        let abc = &(&a * &b) * &c;
        let cab = &(&c * &a) * &b;
        let bac = &(&b * &a) * &c;
        assert_eq!(abc, cab);
        assert_eq!(abc, -bac);
    }

    #[test]
    fn even_commutes_with_odd() {
        let (u, b) = (even(0), odd(1));
        assert_eq!(&u * &b, &b * &u);
        assert_eq!((&u * &b).parity(), Some(Parity::Odd));
    }

    #[test]
    fn checked_mul_reports_square() {
        let b = odd(4);
        assert!(b.checked_mul(&b).is_err());
    }
}
