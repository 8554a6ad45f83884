//! Lie-algebra-valued horizontal forms. A component is keyed by the bitmask of
//! its strictly increasing base index set; `dx^1 ^ ... ^ dx^n` is positive.
//! Coefficients commute with every `dx^i`, whatever their ghost parity.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::symkernel::{total_derivative, Coefficient, DiffPolynomial, JetConfig};

pub type IndexSet = u16;

pub fn index_set(indices: &[usize]) -> IndexSet {
    indices.iter().fold(0, |m, &i| m | (1 << i))
}

pub fn indices(mask: IndexSet) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `dx^I ^ dx^J` relative to `dx^{I u J}`; `None` if they overlap.
pub fn wedge_sign(i: IndexSet, j: IndexSet) -> Option<bool> {
    if i & j != 0 {
        return None;
    }
    let mut inversions = 0u32;
    for b in indices(j) {
        inversions += (i >> (b + 1)).count_ones();
    }
    Some(inversions % 2 == 1)
}

/// `true` when `dx^i ^ dx^I` carries a minus sign.
fn insertion_sign(i: usize, set: IndexSet) -> bool {
    (set & ((1 << i) - 1)).count_ones() % 2 == 1
}

pub fn all_index_sets(n: usize, q: usize) -> Vec<IndexSet> {
    (0..(1u32 << n)).filter(|m| m.count_ones() as usize == q).map(|m| m as IndexSet).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GForm {
    n: usize,
    dim: usize,
    degree: usize,
    comps: BTreeMap<IndexSet, Vec<DiffPolynomial>>,
}

impl GForm {
    pub fn zero(n: usize, dim: usize, degree: usize) -> GForm {
        GForm { n, dim, degree, comps: BTreeMap::new() }
    }

    /// Zero-form with the given algebra components.
    pub fn from_vector(n: usize, v: Vec<DiffPolynomial>) -> GForm {
        let mut f = GForm::zero(n, v.len(), 0);
        f.set(0, v);
        f
    }

    /// One-form `sum_i A_i dx^i` from per-direction algebra vectors.
    pub fn one_form(n: usize, dim: usize, a: &[Vec<DiffPolynomial>]) -> Result<GForm> {
        if a.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.len() });
        }
        let mut f = GForm::zero(n, dim, 1);
        for (i, v) in a.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            f.set(1 << i, v.clone());
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn set(&mut self, mask: IndexSet, v: Vec<DiffPolynomial>) {
        debug_assert_eq!(mask.count_ones() as usize, self.degree);
        debug_assert_eq!(v.len(), self.dim);
        if v.iter().all(|p| p.is_zero()) {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, v);
        }
    }

    pub fn get(&self, mask: IndexSet) -> Option<&Vec<DiffPolynomial>> {
        self.comps.get(&mask)
    }

    /// `F^k_I`
    pub fn component(&self, k: usize, mask: IndexSet) -> DiffPolynomial {
        self.comps.get(&mask).map(|v| v[k].clone()).unwrap_or_default()
    }

    /// Algebra vector of direction `i` for a one-form.
    pub fn direction(&self, i: usize) -> Vec<DiffPolynomial> {
        self.comps.get(&(1 << i)).cloned().unwrap_or_else(|| alloc::vec![DiffPolynomial::zero(); self.dim])
    }

    pub fn components(&self) -> impl Iterator<Item = (IndexSet, &Vec<DiffPolynomial>)> {
        self.comps.iter().map(|(m, v)| (*m, v))
    }

    fn accumulate(&mut self, mask: IndexSet, v: &[DiffPolynomial], negate: bool) {
        let dim = self.dim;
        let entry = self.comps.entry(mask).or_insert_with(|| alloc::vec![DiffPolynomial::zero(); dim]);
        for (e, x) in entry.iter_mut().zip(v) {
            if negate {
                *e = &*e - x;
            } else {
                e.add_assign(x);
            }
        }
        if entry.iter().all(|p| p.is_zero()) {
            self.comps.remove(&mask);
        }
    }

    fn check_compatible(&self, other: &GForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &GForm) -> Result<GForm> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(alloc::format!(
                "cannot add forms of degrees {} and {}",
                self.degree,
                other.degree
            )));
        }
        let mut out = self.clone();
        for (m, v) in &other.comps {
            out.accumulate(*m, v, false);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GForm) -> Result<GForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GForm {
        self.map(|p| -p)
    }

    pub fn scale(&self, c: &Coefficient) -> GForm {
        self.map(|p| p.scale(c))
    }

    pub fn map(&self, mut f: impl FnMut(&DiffPolynomial) -> DiffPolynomial) -> GForm {
        let mut out = GForm::zero(self.n, self.dim, self.degree);
        for (m, v) in &self.comps {
            out.set(*m, v.iter().map(&mut f).collect());
        }
        out
    }

    pub fn try_map<E>(
        &self,
        mut f: impl FnMut(&DiffPolynomial) -> core::result::Result<DiffPolynomial, E>,
    ) -> core::result::Result<GForm, E> {
        let mut out = GForm::zero(self.n, self.dim, self.degree);
        for (m, v) in &self.comps {
            let mut w = Vec::with_capacity(v.len());
            for p in v {
                w.push(f(p)?);
            }
            out.set(*m, w);
        }
        Ok(out)
    }

    /// Every nonzero component as `(k, I, value)`.
    pub fn nonzero_entries(&self) -> Vec<(usize, IndexSet, DiffPolynomial)> {
        let mut out = Vec::new();
        for (m, v) in &self.comps {
            for (k, p) in v.iter().enumerate() {
                if !p.is_zero() {
                    out.push((k, *m, p.clone()));
                }
            }
        }
        out
    }
}

/// `[a,b]^k_{I u J} = sum sign(I,J) a^i_I c^k_ij b^j_J`
pub fn wedge_bracket(a: &GForm, b: &GForm, g: &LieAlgebra) -> Result<GForm> {
    a.check_compatible(b)?;
    if a.dim != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), got: a.dim });
    }
    let q = a.degree + b.degree;
    let mut out = GForm::zero(a.n, a.dim, q);
    if q > a.n {
        return Ok(out);
    }
    for (i, va) in &a.comps {
        for (j, vb) in &b.comps {
            let Some(neg) = wedge_sign(*i, *j) else {
                continue;
            };
            let br = g.bracket(va, vb)?;
            out.accumulate(i | j, &br, neg);
        }
    }
    Ok(out)
}

/// `d_h a = sum_i dx^i ^ D_i a`
pub fn horizontal_differential(a: &GForm, cfg: &JetConfig) -> Result<GForm> {
    let mut out = GForm::zero(a.n, a.dim, a.degree + 1);
    if a.degree >= a.n {
        return Ok(out);
    }
    for (mask, v) in &a.comps {
        for i in 0..a.n {
            if mask & (1 << i) != 0 {
                continue;
            }
            let mut d = Vec::with_capacity(v.len());
            for p in v {
                d.push(total_derivative(p, i, cfg)?);
            }
            out.accumulate(mask | (1 << i), &d, insertion_sign(i, *mask));
        }
    }
    Ok(out)
}

/// Scalar horizontal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarForm {
    n: usize,
    degree: usize,
    comps: BTreeMap<IndexSet, DiffPolynomial>,
}

impl ScalarForm {
    pub fn zero(n: usize, degree: usize) -> ScalarForm {
        ScalarForm { n, degree, comps: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, mask: IndexSet) -> DiffPolynomial {
        self.comps.get(&mask).cloned().unwrap_or_default()
    }

    pub fn add_to(&mut self, mask: IndexSet, p: &DiffPolynomial, negate: bool) {
        let e = self.comps.entry(mask).or_default();
        if negate {
            *e = &*e - p;
        } else {
            e.add_assign(p);
        }
        if e.is_zero() {
            self.comps.remove(&mask);
        }
    }

    /// Coefficient of `dx^1 ^ ... ^ dx^n`.
    pub fn top(&self) -> DiffPolynomial {
        self.component(((1u32 << self.n) - 1) as IndexSet)
    }

    pub fn components(&self) -> impl Iterator<Item = (IndexSet, &DiffPolynomial)> {
        self.comps.iter().map(|(m, p)| (*m, p))
    }
}

/// `<a_I dx^I, b_J dx^J> = <a_I, b_J> dx^I ^ dx^J`
pub fn scalar_pairing(a: &GForm, b: &GForm, g: &LieAlgebra) -> Result<ScalarForm> {
    a.check_compatible(b)?;
    g.metric().ok_or(Error::MissingMetric)?;
    let mut out = ScalarForm::zero(a.n, a.degree + b.degree);
    if a.degree + b.degree > a.n {
        return Ok(out);
    }
    for (i, va) in &a.comps {
        for (j, vb) in &b.comps {
            let Some(neg) = wedge_sign(*i, *j) else {
                continue;
            };
            out.add_to(i | j, &g.pairing(va, vb)?, neg);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{parse, Context, Parity};

    fn setup() -> (Context, LieAlgebra) {
        let mut c = Context::new(&['x', 't']).unwrap();
        c.declare("u", Parity::Even).unwrap();
        (c, LieAlgebra::so3())
    }

    #[test]
    fn signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b101, 0b010), Some(true));
        assert_eq!(wedge_sign(0b1, 0b1), None);
    }

    #[test]
    fn bracket_of_so3_one_form() {
        let (c, g) = setup();
        let u = parse("u", &c).unwrap();
        let z = DiffPolynomial::zero();
        let a = GForm::one_form(
            2,
            3,
            &[alloc::vec![u.clone(), z.clone(), z.clone()], alloc::vec![z.clone(), u.clone(), z.clone()]],
        )
        .unwrap();
        let b = wedge_bracket(&a, &a, &g).unwrap();
        assert_eq!(b.component(2, 0b11), parse("2*u^2", &c).unwrap());
        assert_eq!(b.nonzero_entries().len(), 1);
    }

    #[test]
    fn differential_of_u_dx() {
        let (c, _) = setup();
        let a = GForm::one_form(2, 1, &[alloc::vec![parse("u", &c).unwrap()], alloc::vec![DiffPolynomial::zero()]])
            .unwrap();
        let d = horizontal_differential(&a, &c.jet_config()).unwrap();
        assert_eq!(d.component(0, 0b11), parse("-u_t", &c).unwrap());
        assert!(horizontal_differential(&d, &c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn pairing_of_one_forms() {
        let (_, g) = setup();
        let e1 = g.basis_vector(0);
        let z = g.zero_vector();
        let dx = GForm::one_form(2, 3, &[e1.clone(), z.clone()]).unwrap();
        let dt = GForm::one_form(2, 3, &[z, e1]).unwrap();
        assert_eq!(scalar_pairing(&dx, &dt, &g).unwrap().component(0b11), DiffPolynomial::one());
        assert!(scalar_pairing(&dx, &dx, &g).unwrap().is_zero());
    }
}
