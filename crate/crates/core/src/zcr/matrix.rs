//! Square matrices over differential polynomials and matrix representations.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gforms::{GForm, IndexSet};
use crate::liealg::LieAlgebra;
use crate::symkernel::{total_derivative, Coefficient, DiffPolynomial, JetConfig, ParamId};

/// Optional truncation `param^k -> 0` for `k >= order`.
pub type Truncation = Option<(ParamId, u32)>;

pub fn truncate_poly(p: &DiffPolynomial, t: Truncation) -> Result<DiffPolynomial> {
    match t {
        None => Ok(p.clone()),
        Some((e, order)) => p.try_map_coefficients(|c| {
            c.truncate(e, order).ok_or_else(|| Error::Degree("truncation parameter occurs in a denominator".into()))
        }),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    r: usize,
    e: Vec<DiffPolynomial>,
}

impl Matrix {
    pub fn zero(r: usize) -> Matrix {
        Matrix { r, e: alloc::vec![DiffPolynomial::zero(); r * r] }
    }

    pub fn identity(r: usize) -> Matrix {
        let mut m = Matrix::zero(r);
        for i in 0..r {
            m.e[i * r + i] = DiffPolynomial::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<DiffPolynomial>>) -> Result<Matrix> {
        let r = rows.len();
        let mut e = Vec::with_capacity(r * r);
        for row in rows {
            if row.len() != r {
                return Err(Error::DimensionMismatch { expected: r, got: row.len() });
            }
            e.extend(row);
        }
        Ok(Matrix { r, e })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        let r = rows.len();
        let e = rows.iter().flat_map(|row| row.iter().map(|&v| DiffPolynomial::int(v))).collect();
        Matrix { r, e }
    }

    pub fn size(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> &DiffPolynomial {
        &self.e[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: DiffPolynomial) {
        self.e[i * self.r + j] = v;
    }

    pub fn entries(&self) -> &[DiffPolynomial] {
        &self.e
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(|p| p.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        *self == Matrix::identity(self.r)
    }

    fn check(&self, o: &Matrix) -> Result<()> {
        if self.r != o.r {
            return Err(Error::DimensionMismatch { expected: self.r, got: o.r });
        }
        Ok(())
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix> {
        self.check(o)?;
        Ok(Matrix { r: self.r, e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &Matrix) -> Result<Matrix> {
        self.check(o)?;
        Ok(Matrix { r: self.r, e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: &DiffPolynomial) -> Matrix {
        Matrix { r: self.r, e: self.e.iter().map(|a| c * a).collect() }
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        self.check(o)?;
        let r = self.r;
        let mut out = Matrix::zero(r);
        for i in 0..r {
            for k in 0..r {
                let a = &self.e[i * r + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let b = &o.e[k * r + j];
                    if !b.is_zero() {
                        out.e[i * r + j].add_assign(&(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_trunc(&self, o: &Matrix, t: Truncation) -> Result<Matrix> {
        self.mul(o)?.truncate(t)
    }

    pub fn commutator(&self, o: &Matrix) -> Result<Matrix> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    pub fn truncate(&self, t: Truncation) -> Result<Matrix> {
        if t.is_none() {
            return Ok(self.clone());
        }
        let mut e = Vec::with_capacity(self.e.len());
        for p in &self.e {
            e.push(truncate_poly(p, t)?);
        }
        Ok(Matrix { r: self.r, e })
    }

    pub fn map(&self, f: impl FnMut(&DiffPolynomial) -> DiffPolynomial) -> Matrix {
        Matrix { r: self.r, e: self.e.iter().map(f).collect() }
    }

    pub fn try_map(&self, mut f: impl FnMut(&DiffPolynomial) -> Result<DiffPolynomial>) -> Result<Matrix> {
        let mut e = Vec::with_capacity(self.e.len());
        for p in &self.e {
            e.push(f(p)?);
        }
        Ok(Matrix { r: self.r, e })
    }

    pub fn total_derivative(&self, i: usize, cfg: &JetConfig) -> Result<Matrix> {
        self.try_map(|p| total_derivative(p, i, cfg))
    }

    /// `exp(M)` for nilpotent `M`, as the finite sum.
    pub fn exp_nilpotent(&self) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.r);
        let mut pow = Matrix::identity(self.r);
        let mut fact = 1i64;
        for k in 1..=self.r as i64 {
            pow = pow.mul(self)?;
            if pow.is_zero() {
                return Ok(acc);
            }
            fact *= k;
            acc = acc.add(&pow.map(|p| p.scale(&Coefficient::rational(1, fact))))?;
        }
        Err(Error::SingularGauge("exponential of a non-nilpotent matrix".into()))
    }

    /// Truncated `exp(M) = sum_{k < order} M^k / k!` where `M` carries a
    /// factor of the truncation parameter.
    pub fn exp_truncated(&self, t: (ParamId, u32)) -> Result<Matrix> {
        let mut acc = Matrix::identity(self.r);
        let mut pow = Matrix::identity(self.r);
        let mut fact = 1i64;
        for k in 1..t.1 as i64 {
            pow = pow.mul_trunc(self, Some(t))?;
            fact *= k;
            acc = acc.add(&pow.map(|p| p.scale(&Coefficient::rational(1, fact))))?;
        }
        acc.truncate(Some(t))
    }
}

/// Matrix-valued horizontal form, one matrix per increasing index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixForm {
    pub n: usize,
    pub degree: usize,
    pub r: usize,
    pub comps: BTreeMap<IndexSet, Matrix>,
}

impl MatrixForm {
    pub fn direction(&self, i: usize) -> Matrix {
        self.comps.get(&(1 << i)).cloned().unwrap_or_else(|| Matrix::zero(self.r))
    }
}

/// Faithful matrix representation with a precomputed left inverse for
/// decoding matrices back into the algebra.
#[derive(Clone, Debug)]
pub struct Representation {
    pub rho: Vec<Matrix>,
    r: usize,
    /// rows: algebra index; columns: flattened matrix entry
    decode: Vec<Vec<(usize, Coefficient)>>,
}

impl Representation {
    pub fn new(g: &LieAlgebra, rho: Vec<Matrix>) -> Result<Representation> {
        let d = g.dim();
        if rho.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: rho.len() });
        }
        let r = rho.first().map_or(0, |m| m.size());
        let mut consts: Vec<Vec<Coefficient>> = Vec::with_capacity(d);
        for m in &rho {
            if m.size() != r {
                return Err(Error::DimensionMismatch { expected: r, got: m.size() });
            }
            let mut col = Vec::with_capacity(r * r);
            for p in m.entries() {
                let c =
                    p.as_constant().ok_or_else(|| Error::Representation("matrix entries must be constants".into()))?;
                col.push(c);
            }
            consts.push(col);
        }
        // homomorphism check
        for i in 0..d {
            for j in 0..d {
                let lhs = rho[i].commutator(&rho[j])?;
                let mut rhs = Matrix::zero(r);
                for k in 0..d {
                    let c = g.c(k, i, j);
                    if !c.is_zero() {
                        rhs = rhs.add(&rho[k].map(|p| p.scale(c)))?;
                    }
                }
                if lhs != rhs {
                    return Err(Error::Representation(alloc::format!(
                        "rho([e{},e{}]) differs from [rho(e{}),rho(e{})]",
                        i + 1,
                        j + 1,
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let decode = left_inverse(&consts, r * r)
            .ok_or_else(|| Error::Representation("representation is not faithful".into()))?;
        Ok(Representation { rho, r, decode })
    }

    pub fn size(&self) -> usize {
        self.r
    }

    pub fn encode(&self, v: &[DiffPolynomial]) -> Matrix {
        let mut m = Matrix::zero(self.r);
        for (k, p) in v.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            m = m.add(&self.rho[k].scale(p)).expect("sizes agree");
        }
        m
    }

    /// Algebra vector with `rho(v) = m`, if `m` lies in the image.
    pub fn decode(&self, m: &Matrix) -> Option<Vec<DiffPolynomial>> {
        let v: Vec<DiffPolynomial> = self
            .decode
            .iter()
            .map(|row| {
                let mut acc = DiffPolynomial::zero();
                for (col, c) in row {
                    acc.add_scaled(&m.entries()[*col], c);
                }
                acc
            })
            .collect();
        (self.encode(&v) == *m).then_some(v)
    }

    pub fn encode_form(&self, a: &GForm) -> MatrixForm {
        let mut comps = BTreeMap::new();
        for (mask, v) in a.components() {
            comps.insert(mask, self.encode(v));
        }
        MatrixForm { n: a.n(), degree: a.degree(), r: self.r, comps }
    }

    pub fn decode_form(&self, m: &MatrixForm) -> Option<GForm> {
        let mut f = GForm::zero(m.n, self.rho.len(), m.degree);
        for (mask, mat) in &m.comps {
            f.set(*mask, self.decode(mat)?);
        }
        Some(f)
    }
}

/// Left inverse of the `rows x d` matrix whose columns are `cols`, returned
/// sparsely as `d` rows over the `rows` entries.
fn left_inverse(cols: &[Vec<Coefficient>], rows: usize) -> Option<Vec<Vec<(usize, Coefficient)>>> {
    let d = cols.len();
    // pick d independent rows greedily by elimination on the transposed system
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<Coefficient>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in 0..rows {
        let mut v: Vec<Coefficient> = (0..d).map(|k| cols[k][row].clone()).collect();
        for (b, &p) in basis.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = &v[p] / &b[p];
                for k in 0..d {
                    v[k] = &v[k] - &(&f * &b[k]);
                }
            }
        }
        if let Some(p) = (0..d).find(|&k| !v[k].is_zero()) {
            chosen.push(row);
            basis.push(v);
            pivots.push(p);
            if chosen.len() == d {
                break;
            }
        }
    }
    if chosen.len() < d {
        return None;
    }
    let square: Vec<Coefficient> = chosen.iter().flat_map(|&row| (0..d).map(move |k| cols[k][row].clone())).collect();
    let inv = crate::liealg::inverse(&square, d)?;
    Some(
        (0..d)
            .map(|k| {
                (0..d).filter(|&a| !inv[k * d + a].is_zero()).map(|a| (chosen[a], inv[k * d + a].clone())).collect()
            })
            .collect(),
    )
}

/// The defining representation of sl(2) in the basis `H, E, F`.
pub fn sl2_defining() -> Vec<Matrix> {
    alloc::vec![
        Matrix::from_ints(&[&[1, 0], &[0, -1]]),
        Matrix::from_ints(&[&[0, 1], &[0, 0]]),
        Matrix::from_ints(&[&[0, 0], &[1, 0]]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sl2_representation_decodes() {
        let g = LieAlgebra::sl2();
        let rep = Representation::new(&g, sl2_defining()).unwrap();
        let v = alloc::vec![DiffPolynomial::int(3), DiffPolynomial::int(-1), DiffPolynomial::int(5)];
        assert_eq!(rep.decode(&rep.encode(&v)).unwrap(), v);
        assert!(rep.decode(&Matrix::identity(2)).is_none());
    }

    #[test]
    fn wrong_representation_rejected() {
        let g = LieAlgebra::so3();
        assert!(Representation::new(&g, sl2_defining()).is_err());
    }

    #[test]
    fn nilpotent_exponential() {
        let n = Matrix::from_ints(&[&[0, 2], &[0, 0]]);
        assert_eq!(n.exp_nilpotent().unwrap(), Matrix::from_ints(&[&[1, 2], &[0, 1]]));
        assert!(Matrix::from_ints(&[&[1, 0], &[0, 0]]).exp_nilpotent().is_err());
    }
}
