//! Finite-dimensional Lie algebras given by structure constants.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::symkernel::{Coefficient, DiffPolynomial};

/// Components in the chosen basis, each a differential polynomial.
pub type AlgebraVector = Vec<DiffPolynomial>;
/// Components in the dual basis.
pub type AlgebraCovector = Vec<DiffPolynomial>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub name: String,
    dim: usize,
    /// `c[(k * d + i) * d + j] = c^k_ij`
    c: Vec<Coefficient>,
    metric: Option<Vec<Coefficient>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricIssue {
    NotSymmetric { i: usize, j: usize },
    Degenerate,
    NotInvariant { i: usize, j: usize, k: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// `(k, i, j)` with `c^k_ij + c^k_ji != 0`
    pub antisymmetry: Vec<(usize, usize, usize)>,
    /// `(i, j, k, l, value)` of nonzero cyclic sums, `i < j < k`
    pub jacobi: Vec<(usize, usize, usize, usize, Coefficient)>,
    pub metric: Vec<MetricIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty() && self.metric.is_empty()
    }
}

/// Entry that disagrees with the antisymmetric completion of another one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub k: usize,
    pub i: usize,
    pub j: usize,
}

impl LieAlgebra {
    /// Raw table, no completion.
    pub fn from_table(name: &str, dim: usize, c: Vec<Coefficient>, metric: Option<Vec<Coefficient>>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim * dim, got: c.len() });
        }
        if let Some(t) = &metric {
            if t.len() != dim * dim {
                return Err(Error::DimensionMismatch { expected: dim * dim, got: t.len() });
            }
        }
        Ok(LieAlgebra { name: name.into(), dim, c, metric })
    }

    /// Builds from nonzero entries `c^k_ij`, completing `c^k_ji := -c^k_ij`.
    /// Metric entries are symmetrized likewise. Conflicting pairs are
    /// reported; the first value wins.
    pub fn from_entries(
        name: &str,
        dim: usize,
        entries: &[(usize, usize, usize, Coefficient)],
        metric: Option<&[(usize, usize, Coefficient)]>,
    ) -> Result<(Self, Vec<Conflict>)> {
        let mut c = alloc::vec![Coefficient::zero(); dim * dim * dim];
        let mut set = alloc::vec![false; dim * dim * dim];
        let mut conflicts = Vec::new();
        let at = |k: usize, i: usize, j: usize| (k * dim + i) * dim + j;
        for (k, i, j, v) in entries {
            let (k, i, j) = (*k, *i, *j);
            let bad = [k, i, j].iter().copied().find(|&x| x >= dim);
            if let Some(x) = bad {
                return Err(Error::IndexOutOfRange { index: x, n: dim });
            }
            if i == j {
                if !v.is_zero() {
                    conflicts.push(Conflict { k, i, j });
                }
                continue;
            }
            if set[at(k, i, j)] {
                if c[at(k, i, j)] != *v {
                    conflicts.push(Conflict { k, i, j });
                }
                continue;
            }
            c[at(k, i, j)] = v.clone();
            c[at(k, j, i)] = -v;
            set[at(k, i, j)] = true;
            set[at(k, j, i)] = true;
        }
        let metric = match metric {
            None => None,
            Some(es) => {
                let mut t = alloc::vec![Coefficient::zero(); dim * dim];
                let mut tset = alloc::vec![false; dim * dim];
                for (i, j, v) in es {
                    let (i, j) = (*i, *j);
                    if i >= dim || j >= dim {
                        return Err(Error::IndexOutOfRange { index: i.max(j), n: dim });
                    }
                    if tset[i * dim + j] {
                        if t[i * dim + j] != *v {
                            conflicts.push(Conflict { k: usize::MAX, i, j });
                        }
                        continue;
                    }
                    t[i * dim + j] = v.clone();
                    t[j * dim + i] = v.clone();
                    tset[i * dim + j] = true;
                    tset[j * dim + i] = true;
                }
                Some(t)
            }
        };
        Ok((LieAlgebra { name: name.into(), dim, c, metric }, conflicts))
    }

    pub fn abelian(dim: usize) -> Self {
        let metric = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| if i == j { Coefficient::one() } else { Coefficient::zero() }))
            .collect();
        LieAlgebra {
            name: alloc::format!("abelian{dim}"),
            dim,
            c: alloc::vec![Coefficient::zero(); dim * dim * dim],
            metric: Some(metric),
        }
    }

    /// `so(3)`: `c^k_ij = epsilon_ijk`, identity metric.
    pub fn so3() -> Self {
        let e = [(2, 0, 1), (0, 1, 2), (1, 2, 0)];
        let entries: Vec<_> = e.iter().map(|&(k, i, j)| (k, i, j, Coefficient::one())).collect();
        let metric: Vec<_> = (0..3).map(|i| (i, i, Coefficient::one())).collect();
        LieAlgebra::from_entries("so3", 3, &entries, Some(&metric)).unwrap().0
    }

    /// `sl(2)` in the basis `H, E, F` with the trace form.
    pub fn sl2() -> Self {
        let entries =
            [(1, 0, 1, Coefficient::from(2)), (2, 0, 2, Coefficient::from(-2)), (0, 1, 2, Coefficient::one())];
        let metric = [(0, 0, Coefficient::from(2)), (1, 2, Coefficient::one())];
        LieAlgebra::from_entries("sl2", 3, &entries, Some(&metric)).unwrap().0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self, k: usize, i: usize, j: usize) -> &Coefficient {
        &self.c[(k * self.dim + i) * self.dim + j]
    }

    pub fn set_c(&mut self, k: usize, i: usize, j: usize, v: Coefficient) {
        let d = self.dim;
        self.c[(k * d + i) * d + j] = v;
    }

    pub fn metric(&self) -> Option<&[Coefficient]> {
        self.metric.as_deref()
    }

    pub fn t(&self, i: usize, j: usize) -> Result<&Coefficient> {
        self.metric.as_ref().map(|t| &t[i * self.dim + j]).ok_or(Error::MissingMetric)
    }

    pub fn without_metric(&self) -> Self {
        LieAlgebra { metric: None, ..self.clone() }
    }

    /// Same algebra with every structure constant negated.
    pub fn negated(&self) -> Self {
        LieAlgebra { c: self.c.iter().map(|v| -v).collect(), ..self.clone() }
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    /// Nonzero structure constants `(k, i, j, c^k_ij)` in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, usize, usize, &Coefficient)> {
        let d = self.dim;
        self.c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(n, v)| (n / (d * d), (n / d) % d, n % d, v))
    }

    pub fn jacobi_sum(&self, i: usize, j: usize, k: usize, l: usize) -> Coefficient {
        let mut s = Coefficient::zero();
        for m in 0..self.dim {
            s = &s + &(self.c(m, i, j) * self.c(l, m, k));
            s = &s + &(self.c(m, j, k) * self.c(l, m, i));
            s = &s + &(self.c(m, k, i) * self.c(l, m, j));
        }
        s
    }

    pub fn validate(&self) -> ValidationReport {
        let d = self.dim;
        let mut rep = ValidationReport::default();
        for k in 0..d {
            for i in 0..d {
                for j in i..d {
                    if !(self.c(k, i, j) + self.c(k, j, i)).is_zero() {
                        rep.antisymmetry.push((k, i, j));
                    }
                }
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    for l in 0..d {
                        let s = self.jacobi_sum(i, j, k, l);
                        if !s.is_zero() {
                            rep.jacobi.push((i, j, k, l, s));
                        }
                    }
                }
            }
        }
        if let Some(t) = &self.metric {
            for i in 0..d {
                for j in i + 1..d {
                    if t[i * d + j] != t[j * d + i] {
                        rep.metric.push(MetricIssue::NotSymmetric { i, j });
                    }
                }
            }
            if determinant(t, d).is_zero() {
                rep.metric.push(MetricIssue::Degenerate);
            }
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        if !self.invariance_residual(i, j, k).is_zero() {
                            rep.metric.push(MetricIssue::NotInvariant { i, j, k });
                        }
                    }
                }
            }
        }
        rep
    }

    /// `<[e_i,e_j],e_k> - <e_i,[e_j,e_k]>`; zero without a metric.
    pub fn invariance_residual(&self, i: usize, j: usize, k: usize) -> Coefficient {
        let Some(t) = &self.metric else {
            return Coefficient::zero();
        };
        let d = self.dim;
        let mut s = Coefficient::zero();
        for m in 0..d {
            s = &s + &(self.c(m, i, j) * &t[m * d + k]);
            s = &s - &(&t[i * d + m] * self.c(m, j, k));
        }
        s
    }

    fn check_len(&self, v: &[DiffPolynomial]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn zero_vector(&self) -> AlgebraVector {
        alloc::vec![DiffPolynomial::zero(); self.dim]
    }

    pub fn basis_vector(&self, k: usize) -> AlgebraVector {
        let mut v = self.zero_vector();
        v[k] = DiffPolynomial::one();
        v
    }

    /// `[p,q]^k = p^i c^k_ij q^j` with products taken in that order.
    pub fn bracket(&self, p: &[DiffPolynomial], q: &[DiffPolynomial]) -> Result<AlgebraVector> {
        self.check_len(p)?;
        self.check_len(q)?;
        let mut out = self.zero_vector();
        let mut prods: Vec<Vec<Option<DiffPolynomial>>> = alloc::vec![alloc::vec![None; self.dim]; self.dim];
        for (k, i, j, c) in self.nonzero() {
            if p[i].is_zero() || q[j].is_zero() {
                continue;
            }
            let pq = prods[i][j].get_or_insert_with(|| &p[i] * &q[j]);
            out[k].add_scaled(pq, c);
        }
        Ok(out)
    }

    /// `sum t_ij a^i b^j`
    pub fn pairing(&self, a: &[DiffPolynomial], b: &[DiffPolynomial]) -> Result<DiffPolynomial> {
        self.check_len(a)?;
        self.check_len(b)?;
        let t = self.metric.as_ref().ok_or(Error::MissingMetric)?;
        let d = self.dim;
        let mut out = DiffPolynomial::zero();
        for i in 0..d {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..d {
                let tij = &t[i * d + j];
                if tij.is_zero() || b[j].is_zero() {
                    continue;
                }
                out.add_scaled(&(&a[i] * &b[j]), tij);
            }
        }
        Ok(out)
    }

    /// `sum w_k b^k`
    pub fn dual_pairing(&self, w: &[DiffPolynomial], b: &[DiffPolynomial]) -> Result<DiffPolynomial> {
        self.check_len(w)?;
        self.check_len(b)?;
        Ok(w.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum())
    }

    /// `(ad*_b w)_j = w_a b^i c^a_ij`, so that `<ad*_b w, p> = <w, [b,p]>`.
    pub fn coadjoint(&self, b: &[DiffPolynomial], w: &[DiffPolynomial]) -> Result<AlgebraCovector> {
        self.check_len(b)?;
        self.check_len(w)?;
        let mut out = self.zero_vector();
        for (a, i, j, c) in self.nonzero() {
            if w[a].is_zero() || b[i].is_zero() {
                continue;
            }
            out[j].add_scaled(&(&w[a] * &b[i]), c);
        }
        Ok(out)
    }

    /// Right action `(w)<-ad*_b`, defined by `<(w)<-ad*_b, q> = <w, [b,q]>`
    /// with `w` kept leftmost. In this ordering it coincides with
    /// [`LieAlgebra::coadjoint`] (relative sign +1).
    pub fn coadjoint_right(&self, w: &[DiffPolynomial], b: &[DiffPolynomial]) -> Result<AlgebraCovector> {
        self.coadjoint(b, w)
    }

    /// Metric lowering `a^i -> a^i t_ij`.
    pub fn flat(&self, a: &[DiffPolynomial]) -> Result<AlgebraCovector> {
        self.check_len(a)?;
        let t = self.metric.as_ref().ok_or(Error::MissingMetric)?;
        let d = self.dim;
        let mut out = self.zero_vector();
        for j in 0..d {
            for i in 0..d {
                out[j].add_scaled(&a[i], &t[i * d + j]);
            }
        }
        Ok(out)
    }

    /// Metric raising via the inverse metric.
    pub fn sharp(&self, w: &[DiffPolynomial]) -> Result<AlgebraVector> {
        self.check_len(w)?;
        let t = self.metric.as_ref().ok_or(Error::MissingMetric)?;
        let inv = inverse(t, self.dim).ok_or(Error::MissingMetric)?;
        let d = self.dim;
        let mut out = self.zero_vector();
        for i in 0..d {
            for j in 0..d {
                out[i].add_scaled(&w[j], &inv[i * d + j]);
            }
        }
        Ok(out)
    }
}

/// Determinant by fraction-free elimination over the coefficient field.
pub fn determinant(m: &[Coefficient], d: usize) -> Coefficient {
    let mut a = m.to_vec();
    let mut det = Coefficient::one();
    for col in 0..d {
        let Some(piv) = (col..d).find(|&r| !a[r * d + col].is_zero()) else {
            return Coefficient::zero();
        };
        if piv != col {
            for c in 0..d {
                a.swap(piv * d + c, col * d + c);
            }
            det = -&det;
        }
        let p = a[col * d + col].clone();
        det = &det * &p;
        for r in col + 1..d {
            let f = &a[r * d + col] / &p;
            if f.is_zero() {
                continue;
            }
            for c in col..d {
                let v = &a[r * d + c] - &(&f * &a[col * d + c]);
                a[r * d + c] = v;
            }
        }
    }
    det
}

pub fn inverse(m: &[Coefficient], d: usize) -> Option<Vec<Coefficient>> {
    let mut a = m.to_vec();
    let mut inv: Vec<Coefficient> =
        (0..d * d).map(|n| if n / d == n % d { Coefficient::one() } else { Coefficient::zero() }).collect();
    for col in 0..d {
        let piv = (col..d).find(|&r| !a[r * d + col].is_zero())?;
        for c in 0..d {
            a.swap(piv * d + c, col * d + c);
            inv.swap(piv * d + c, col * d + c);
        }
        let p = a[col * d + col].recip()?;
        for c in 0..d {
            a[col * d + c] = &a[col * d + c] * &p;
            inv[col * d + c] = &inv[col * d + c] * &p;
        }
        for r in 0..d {
            if r == col || a[r * d + col].is_zero() {
                continue;
            }
            let f = a[r * d + col].clone();
            for c in 0..d {
                a[r * d + c] = &a[r * d + c] - &(&f * &a[col * d + c]);
                inv[r * d + c] = &inv[r * d + c] - &(&f * &inv[col * d + c]);
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{parse, Context, Parity};

    #[test]
    fn fixtures_are_valid() {
        for a in [LieAlgebra::abelian(1), LieAlgebra::abelian(3), LieAlgebra::so3(), LieAlgebra::sl2()] {
            assert!(a.validate().is_valid(), "{}", a.name);
        }
    }

    #[test]
    fn bracket_reads_structure_constants() {
        let g = LieAlgebra::so3();
        let e3 = g.bracket(&g.basis_vector(0), &g.basis_vector(1)).unwrap();
        assert_eq!(e3, g.basis_vector(2));
    }

    #[test]
    fn changing_one_constant_keeps_jacobi_here() {
        // [e2,e3] = 2 e1 with the other so(3) brackets is still a Lie algebra
        let mut g = LieAlgebra::so3();
        g.set_c(0, 1, 2, Coefficient::from(2));
        g.set_c(0, 2, 1, Coefficient::from(-2));
        let rep = g.without_metric().validate();
        assert!(rep.is_valid());
        assert!(!g.validate().metric.is_empty());
    }

    #[test]
    fn corruption_breaks_jacobi() {
        let mut g = LieAlgebra::so3();
        g.set_c(0, 0, 1, Coefficient::one());
        g.set_c(0, 1, 0, Coefficient::from(-1));
        let rep = g.validate();
        assert!(!rep.jacobi.is_empty());
        assert!(rep.antisymmetry.is_empty());
    }

    #[test]
    fn completion_reports_conflicts() {
        let entries = [(0, 0, 1, Coefficient::one()), (0, 1, 0, Coefficient::one())];
        let (_, conflicts) = LieAlgebra::from_entries("x", 2, &entries, None).unwrap();
        assert_eq!(conflicts, alloc::vec![Conflict { k: 0, i: 1, j: 0 }]);
    }

    #[test]
    fn coadjoint_defining_identity() {
        let mut ctx = Context::new(&['x']).unwrap();
        let ps: Vec<_> = (1..=3).map(|k| ctx.declare(&alloc::format!("p{k}"), Parity::Even).unwrap()).collect();
        let p: Vec<_> = ps.iter().map(|&s| DiffPolynomial::var(ctx.var(s))).collect();
        for g in [LieAlgebra::so3(), LieAlgebra::sl2()] {
            for i in 0..3 {
                for a in 0..3 {
                    let b = g.basis_vector(i);
                    let w = g.basis_vector(a);
                    let lhs = g.dual_pairing(&g.coadjoint(&b, &w).unwrap(), &p).unwrap();
                    let rhs = g.dual_pairing(&w, &g.bracket(&b, &p).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        let _ = parse("p1", &ctx).unwrap();
    }

    #[test]
    fn metric_roundtrip() {
        let g = LieAlgebra::sl2();
        let v: Vec<_> = (1..=3).map(DiffPolynomial::int).collect();
        assert_eq!(g.sharp(&g.flat(&v).unwrap()).unwrap(), v);
        assert_eq!(determinant(g.metric().unwrap(), 3), Coefficient::from(-2));
    }
}
