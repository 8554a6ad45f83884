//! Homological evolutionary fields: the BRST field of a zero-curvature
//! geometry, its gauge transport, and classical Lie algebroids encoded by a
//! homological field on the parity-reversed bundle.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::symkernel::{
    total_derivative, total_derivative_multi, Coefficient, Context, DiffPolynomial, JetConfig, MultiIndex, Parity,
    SymbolId,
};
use crate::zcr::{apply_sections, GaugeElement, Matrix, Representation};

/// Sign in front of the structure constants in every construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignConvention {
    #[default]
    Plus,
    Minus,
}

impl SignConvention {
    pub fn apply(self, g: &LieAlgebra) -> LieAlgebra {
        match self {
            SignConvention::Plus => g.clone(),
            SignConvention::Minus => g.negated(),
        }
    }
}

/// Jet symbols of the four neighbours of a Lie algebra over an n-dimensional
/// base: connection `a{k}{mu}` (even), ghost `b{k}` (odd) and optionally the
/// antifields `as{k}{mu}` (odd) and antighosts `bs{k}` (even).
#[derive(Clone, Debug)]
pub struct GradedFieldSpace {
    pub ctx: Context,
    pub algebra: LieAlgebra,
    /// `alpha[mu][k]`
    pub alpha: Vec<Vec<SymbolId>>,
    pub b: Vec<SymbolId>,
    pub alpha_star: Option<Vec<Vec<SymbolId>>>,
    pub b_star: Option<Vec<SymbolId>>,
}

impl GradedFieldSpace {
    pub fn new(algebra: &LieAlgebra, n: usize, with_antifields: bool) -> Result<GradedFieldSpace> {
        Self::with_physical_fields(algebra, n, with_antifields, &[])
    }

    /// Also declares even physical fields (for gauges depending on them).
    pub fn with_physical_fields(
        algebra: &LieAlgebra,
        n: usize,
        with_antifields: bool,
        physical: &[&str],
    ) -> Result<GradedFieldSpace> {
        let base = Context::default_base(n);
        let mut ctx = Context::new(&base)?;
        for p in physical {
            ctx.declare(p, Parity::Even)?;
        }
        let d = algebra.dim();
        let mut alpha = Vec::new();
        for mu in &base {
            let row: Result<Vec<_>> = (1..=d).map(|k| ctx.declare(&format!("a{k}{mu}"), Parity::Even)).collect();
            alpha.push(row?);
        }
        let b: Result<Vec<_>> = (1..=d).map(|k| ctx.declare(&format!("b{k}"), Parity::Odd)).collect();
        let b = b?;
        let (mut alpha_star, mut b_star) = (None, None);
        if with_antifields {
            let mut rows = Vec::new();
            for mu in &base {
                let row: Result<Vec<_>> = (1..=d).map(|k| ctx.declare(&format!("as{k}{mu}"), Parity::Odd)).collect();
                rows.push(row?);
            }
            alpha_star = Some(rows);
            let bs: Result<Vec<_>> = (1..=d).map(|k| ctx.declare(&format!("bs{k}"), Parity::Even)).collect();
            b_star = Some(bs?);
        }
        Ok(GradedFieldSpace { ctx, algebra: algebra.clone(), alpha, b, alpha_star, b_star })
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn cfg(&self) -> JetConfig {
        self.ctx.jet_config()
    }

    pub fn p(&self, s: SymbolId) -> DiffPolynomial {
        DiffPolynomial::var(self.ctx.var(s))
    }

    pub fn alpha_vec(&self, mu: usize) -> Vec<DiffPolynomial> {
        self.alpha[mu].iter().map(|&s| self.p(s)).collect()
    }

    pub fn b_vec(&self) -> Vec<DiffPolynomial> {
        self.b.iter().map(|&s| self.p(s)).collect()
    }

    pub fn alpha_star_vec(&self, mu: usize) -> Result<Vec<DiffPolynomial>> {
        let rows = self.alpha_star.as_ref().ok_or_else(|| Error::IncompleteSetup("no antifields declared".into()))?;
        Ok(rows[mu].iter().map(|&s| self.p(s)).collect())
    }

    pub fn b_star_vec(&self) -> Result<Vec<DiffPolynomial>> {
        let bs = self.b_star.as_ref().ok_or_else(|| Error::IncompleteSetup("no antighosts declared".into()))?;
        Ok(bs.iter().map(|&s| self.p(s)).collect())
    }

    /// All graded symbols of the space (connection, ghosts, then antifields).
    pub fn graded_symbols(&self) -> Vec<SymbolId> {
        let mut v: Vec<SymbolId> = self.alpha.iter().flatten().copied().collect();
        v.extend(&self.b);
        if let Some(rows) = &self.alpha_star {
            v.extend(rows.iter().flatten());
        }
        if let Some(bs) = &self.b_star {
            v.extend(bs);
        }
        v
    }

    pub fn name(&self, s: SymbolId) -> &str {
        &self.ctx.info(s).name
    }
}

/// Graded evolutionary derivation given by its generating sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolutionaryField {
    pub parity: Parity,
    pub sections: BTreeMap<SymbolId, DiffPolynomial>,
}

impl EvolutionaryField {
    pub fn new(parity: Parity) -> EvolutionaryField {
        EvolutionaryField { parity, sections: BTreeMap::new() }
    }

    pub fn section(&self, s: SymbolId) -> DiffPolynomial {
        self.sections.get(&s).cloned().unwrap_or_default()
    }

    /// Left action on a differential polynomial by prolongation.
    pub fn apply(&self, e: &DiffPolynomial, cfg: &JetConfig) -> Result<DiffPolynomial> {
        apply_sections(e, self.parity, &self.sections, cfg)
    }

    /// Symbols whose section has the wrong parity.
    pub fn parity_violations(&self, ctx: &Context) -> Vec<SymbolId> {
        self.sections
            .iter()
            .filter(|(s, p)| {
                let want = ctx.info(**s).parity + self.parity;
                !p.is_zero() && p.parity() != Some(want)
            })
            .map(|(s, _)| *s)
            .collect()
    }

    /// `[X,Y] = X o Y - (-1)^{|X||Y|} Y o X` by its sections.
    pub fn commutator(&self, other: &EvolutionaryField, cfg: &JetConfig) -> Result<EvolutionaryField> {
        let sign_neg = !(self.parity.is_odd() && other.parity.is_odd());
        let mut keys: Vec<SymbolId> = self.sections.keys().chain(other.sections.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        let mut out = EvolutionaryField::new(self.parity + other.parity);
        for s in keys {
            let xy = self.apply(&other.section(s), cfg)?;
            let yx = other.apply(&self.section(s), cfg)?;
            let v = if sign_neg { &xy - &yx } else { &xy + &yx };
            if !v.is_zero() {
                out.sections.insert(s, v);
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.sections.values().all(|p| p.is_zero())
    }

    /// Sections of `X o X` for an odd field, i.e. half the self-commutator.
    pub fn square_residual(&self, cfg: &JetConfig) -> Result<BTreeMap<SymbolId, DiffPolynomial>> {
        let mut out = BTreeMap::new();
        for (s, p) in &self.sections {
            out.insert(*s, self.apply(p, cfg)?);
        }
        Ok(out)
    }
}

/// `Q = d^(alpha)_{[b,alpha] + d_h b} + 1/2 d^(b)_{[b,b]}`
pub fn build_brst_field(space: &GradedFieldSpace, conv: SignConvention) -> Result<EvolutionaryField> {
    let g = conv.apply(&space.algebra);
    let cfg = space.cfg();
    let bv = space.b_vec();
    let mut q = EvolutionaryField::new(Parity::Odd);
    for mu in 0..space.n() {
        let br = g.bracket(&bv, &space.alpha_vec(mu))?;
        for (k, &s) in space.alpha[mu].iter().enumerate() {
            let sec = &br[k] + &total_derivative(&bv[k], mu, &cfg)?;
            q.sections.insert(s, sec);
        }
    }
    let bb = g.bracket(&bv, &bv)?;
    for (k, &s) in space.b.iter().enumerate() {
        q.sections.insert(s, bb[k].scale(&Coefficient::rational(1, 2)));
    }
    Ok(q)
}

/// Sections of `Q^2 = 1/2 [Q,Q]` for the BRST field.
pub fn q_square_residual(space: &GradedFieldSpace, conv: SignConvention) -> Result<BTreeMap<SymbolId, DiffPolynomial>> {
    build_brst_field(space, conv)?.square_residual(&space.cfg())
}

#[derive(Clone, Debug)]
pub struct TransportReport {
    /// `alpha'[mu][k]` and `b'[k]` as functions of the old coordinates.
    pub alpha_prime: Vec<Vec<DiffPolynomial>>,
    pub b_prime: Vec<DiffPolynomial>,
    /// `Q'` in the new coordinates, with sections written in the old ones.
    pub q_prime: Vec<(String, DiffPolynomial)>,
    /// `Q(new coordinate) - Q'(new coordinate)`; zero iff `Q` is pushed to `Q'`.
    pub pushforward_residual: Vec<(String, DiffPolynomial)>,
    /// `Q'^2` on the new coordinates.
    pub q_prime_square: Vec<(String, DiffPolynomial)>,
}

impl TransportReport {
    pub fn is_zero(&self) -> bool {
        self.pushforward_residual.iter().chain(&self.q_prime_square).all(|(_, p)| p.is_zero())
    }
}

/// Transport of the BRST field along `alpha' = g alpha g^-1 + d_h g g^-1`,
/// `b' = g b g^-1`. Under the minus convention the matrices are taken in
/// `-rho`, which represents the negated bracket.
pub fn transport_q(
    space: &GradedFieldSpace,
    rep: &Representation,
    gauge: &GaugeElement,
    conv: SignConvention,
) -> Result<TransportReport> {
    let cfg = space.cfg();
    let g = conv.apply(&space.algebra);
    let t = gauge.truncation;
    let q = build_brst_field(space, conv)?;
    let conj = |m: &Matrix| -> Result<Matrix> { gauge.g.mul_trunc(m, t)?.mul_trunc(&gauge.g_inv, t) };
    let flip = |m: Matrix| match conv {
        SignConvention::Plus => m,
        SignConvention::Minus => m.map(|p| -p),
    };
    let encode = |v: &[DiffPolynomial]| flip(rep.encode(v));
    let decode = |m: Matrix| rep.decode(&flip(m));
    let not_in_image = || Error::Representation("transported coordinates leave the image of the representation".into());
    let mut alpha_prime = Vec::new();
    for mu in 0..space.n() {
        let m = conj(&encode(&space.alpha_vec(mu)))?
            .add(&gauge.g.total_derivative(mu, &cfg)?.mul_trunc(&gauge.g_inv, t)?)?;
        alpha_prime.push(decode(m).ok_or_else(not_in_image)?);
    }
    let b_prime = decode(conj(&encode(&space.b_vec()))?).ok_or_else(not_in_image)?;
    let base = space.ctx.base_names();
    let mut report = TransportReport {
        alpha_prime: alpha_prime.clone(),
        b_prime: b_prime.clone(),
        q_prime: Vec::new(),
        pushforward_residual: Vec::new(),
        q_prime_square: Vec::new(),
    };
    let trunc = |p: DiffPolynomial| crate::zcr::matrix::truncate_poly(&p, t);
    for mu in 0..space.n() {
        let br = g.bracket(&b_prime, &alpha_prime[mu])?;
        for k in 0..space.dim() {
            let name = format!("a{}{}'", k + 1, base[mu]);
            let expected = trunc(&br[k] + &total_derivative(&b_prime[k], mu, &cfg)?)?;
            let pushed = trunc(q.apply(&alpha_prime[mu][k], &cfg)?)?;
            let twice = trunc(q.apply(&pushed, &cfg)?)?;
            report.pushforward_residual.push((name.clone(), &pushed - &expected));
            report.q_prime_square.push((name.clone(), twice));
            report.q_prime.push((name, expected));
        }
    }
    let bb = g.bracket(&b_prime, &b_prime)?;
    for k in 0..space.dim() {
        let name = format!("b{}'", k + 1);
        let expected = trunc(bb[k].scale(&Coefficient::rational(1, 2)))?;
        let pushed = trunc(q.apply(&b_prime[k], &cfg)?)?;
        let twice = trunc(q.apply(&pushed, &cfg)?)?;
        report.pushforward_residual.push((name.clone(), &pushed - &expected));
        report.q_prime_square.push((name.clone(), twice));
        report.q_prime.push((name, expected));
    }
    Ok(report)
}

/// Commutator of evolutionary fields `[fX, Y]` for one dependent variable
/// split into the classical Leibniz terms and the remainder.
#[derive(Clone, Debug)]
pub struct LeibnizFailure {
    pub bracket: DiffPolynomial,
    pub classical: DiffPolynomial,
    /// `sum_{|sigma|>0} sum_{rho u tau = sigma, |rho|>0} D_rho(f) D_tau(X) dY/du_sigma`
    pub extra: DiffPolynomial,
}

fn binomial(n: u32, k: u32) -> i64 {
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

/// Evaluates both sides of the Leibniz rule for evolutionary fields with
/// generating sections `f X` and `Y` along `u`.
pub fn leibniz_failure(
    u: SymbolId,
    f: &DiffPolynomial,
    x: &DiffPolynomial,
    y: &DiffPolynomial,
    ctx: &Context,
) -> Result<LeibnizFailure> {
    let cfg = ctx.jet_config();
    let field = |s: &DiffPolynomial| {
        let mut e = EvolutionaryField::new(Parity::Even);
        e.sections.insert(u, s.clone());
        e
    };
    let fx = f * x;
    let ex = field(x);
    let ey = field(y);
    let bracket = &field(&fx).apply(y, &cfg)? - &ey.apply(&fx, &cfg)?;
    let xy = &ex.apply(y, &cfg)? - &ey.apply(x, &cfg)?;
    let classical = &(f * &xy) - &(&ey.apply(f, &cfg)? * x);
    let mut extra = DiffPolynomial::zero();
    for v in crate::symkernel::jet::jets_of(y, u) {
        let sigma = v.idx;
        if sigma.is_zero() {
            continue;
        }
        let dy = crate::symkernel::partial(y, &v, crate::symkernel::Side::Left);
        let n = cfg.n;
        // all rho <= sigma with rho != 0
        let mut rho = MultiIndex::ZERO;
        loop {
            let mut i = 0;
            while i < n {
                if rho.0[i] < sigma.0[i] {
                    rho.0[i] += 1;
                    break;
                }
                rho.0[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            let tau = sigma.checked_sub(&rho).unwrap();
            let mult: i64 = (0..n).map(|i| binomial(sigma.0[i] as u32, rho.0[i] as u32)).product();
            let term = &(&total_derivative_multi(f, &rho, &cfg)? * &total_derivative_multi(x, &tau, &cfg)?) * &dy;
            extra.add_scaled(&term, &Coefficient::from(mult));
        }
    }
    Ok(LeibnizFailure { bracket, classical, extra })
}

/// Lie algebroid over a finite-dimensional manifold with coordinates
/// `x1..xm` and parity-reversed fibre coordinates `b1..bd`.
#[derive(Clone, Debug)]
pub struct ClassicalAlgebroid {
    pub ctx: Context,
    pub xs: Vec<SymbolId>,
    pub bs: Vec<SymbolId>,
    /// `anchor[i][a] = A^a_i(x)`
    pub anchor: Vec<Vec<DiffPolynomial>>,
    /// `c[(k * d + i) * d + j] = c^k_ij(x)`
    c: Vec<DiffPolynomial>,
}

impl ClassicalAlgebroid {
    pub fn new(m: usize, d: usize) -> Result<ClassicalAlgebroid> {
        let mut ctx = Context::new(&[])?;
        let xs: Result<Vec<_>> = (1..=m).map(|a| ctx.declare(&format!("x{a}"), Parity::Even)).collect();
        let bs: Result<Vec<_>> = (1..=d).map(|k| ctx.declare(&format!("b{k}"), Parity::Odd)).collect();
        Ok(ClassicalAlgebroid {
            ctx,
            xs: xs?,
            bs: bs?,
            anchor: alloc::vec![alloc::vec![DiffPolynomial::zero(); m]; d],
            c: alloc::vec![DiffPolynomial::zero(); d * d * d],
        })
    }

    pub fn m(&self) -> usize {
        self.xs.len()
    }

    pub fn d(&self) -> usize {
        self.bs.len()
    }

    pub fn c(&self, k: usize, i: usize, j: usize) -> &DiffPolynomial {
        let d = self.d();
        &self.c[(k * d + i) * d + j]
    }

    /// Sets `c^k_ij` and `c^k_ji = -c^k_ij`.
    pub fn set_c(&mut self, k: usize, i: usize, j: usize, v: DiffPolynomial) {
        let d = self.d();
        self.c[(k * d + j) * d + i] = -&v;
        self.c[(k * d + i) * d + j] = v;
    }

    pub fn chevalley_eilenberg(g: &LieAlgebra) -> ClassicalAlgebroid {
        let mut a = ClassicalAlgebroid::new(0, g.dim()).expect("fresh context");
        for (k, i, j, v) in g.nonzero() {
            if i < j {
                a.set_c(k, i, j, DiffPolynomial::constant(v.clone()));
            }
        }
        a
    }

    pub fn de_rham(m: usize) -> ClassicalAlgebroid {
        let mut a = ClassicalAlgebroid::new(m, m).expect("fresh context");
        for i in 0..m {
            a.anchor[i][i] = DiffPolynomial::one();
        }
        a
    }

    /// Cotangent algebroid of a constant Poisson bivector: anchor
    /// `dx^i -> pi^{ia} d/dx^a` and vanishing brackets of the `dx^i`.
    pub fn poisson_constant(pi: &[Vec<Coefficient>]) -> Result<ClassicalAlgebroid> {
        let m = pi.len();
        for (i, row) in pi.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch { expected: m, got: row.len() });
            }
            for j in 0..m {
                if (&row[j] + &pi[j][i]).is_zero() {
                    continue;
                }
                return Err(Error::NonAlternating(format!("bivector entries ({i},{j}) are not antisymmetric")));
            }
        }
        let mut a = ClassicalAlgebroid::new(m, m)?;
        for i in 0..m {
            for j in 0..m {
                a.anchor[i][j] = DiffPolynomial::constant(pi[i][j].clone());
            }
        }
        Ok(a)
    }

    fn effective_c(&self, conv: SignConvention) -> Vec<DiffPolynomial> {
        match conv {
            SignConvention::Plus => self.c.clone(),
            SignConvention::Minus => self.c.iter().map(|p| -p).collect(),
        }
    }

    fn cfg(&self) -> JetConfig {
        self.ctx.jet_config()
    }

    fn bpoly(&self, i: usize) -> DiffPolynomial {
        DiffPolynomial::var(self.ctx.var(self.bs[i]))
    }

    /// `A(e_i)(f) = A^a_i df/dx^a`
    pub fn anchor_derivative(&self, i: usize, f: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (a, &x) in self.xs.iter().enumerate() {
            let coeff = &self.anchor[i][a];
            if coeff.is_zero() {
                continue;
            }
            let df = crate::symkernel::partial(f, &self.ctx.var(x), crate::symkernel::Side::Left);
            out.add_assign(&(coeff * &df));
        }
        out
    }
}

/// `Q = A^a_i b^i d/dx^a - 1/2 b^i c^k_ij b^j d/db^k`
pub fn build_classical_q(a: &ClassicalAlgebroid, conv: SignConvention) -> EvolutionaryField {
    let d = a.d();
    let c = a.effective_c(conv);
    let mut q = EvolutionaryField::new(Parity::Odd);
    for (al, &x) in a.xs.iter().enumerate() {
        let mut s = DiffPolynomial::zero();
        for i in 0..d {
            s.add_assign(&(&a.anchor[i][al] * &a.bpoly(i)));
        }
        q.sections.insert(x, s);
    }
    for (k, &bk) in a.bs.iter().enumerate() {
        let mut s = DiffPolynomial::zero();
        for i in 0..d {
            for j in 0..d {
                let cij = &c[(k * d + i) * d + j];
                if !cij.is_zero() {
                    s.add_assign(&(&(&a.bpoly(i) * cij) * &a.bpoly(j)));
                }
            }
        }
        q.sections.insert(bk, s.scale(&Coefficient::rational(-1, 2)));
    }
    q
}

/// Sections of `Q^2` on `x` and `b`.
pub fn classical_q_square(a: &ClassicalAlgebroid, conv: SignConvention) -> Result<BTreeMap<SymbolId, DiffPolynomial>> {
    build_classical_q(a, conv).square_residual(&a.cfg())
}

/// Alternating k-cochain given by its values on increasing basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub k: usize,
    pub values: BTreeMap<Vec<usize>, DiffPolynomial>,
}

impl Cochain {
    /// Normalizes arbitrary-order tuples by antisymmetry, rejecting
    /// inconsistent data.
    pub fn from_values(k: usize, d: usize, entries: &[(Vec<usize>, DiffPolynomial)]) -> Result<Cochain> {
        let mut values: BTreeMap<Vec<usize>, DiffPolynomial> = BTreeMap::new();
        for (key, v) in entries {
            if key.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: key.len() });
            }
            if let Some(&bad) = key.iter().find(|&&i| i >= d) {
                return Err(Error::IndexOutOfRange { index: bad, n: d });
            }
            let mut sorted = key.clone();
            let mut neg = false;
            // bubble sort keeps track of the permutation sign
            for a in 0..sorted.len() {
                for b in 0..sorted.len() - 1 - a {
                    if sorted[b] > sorted[b + 1] {
                        sorted.swap(b, b + 1);
                        neg = !neg;
                    }
                }
            }
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                if !v.is_zero() {
                    return Err(Error::NonAlternating(format!("nonzero value on repeated index {key:?}")));
                }
                continue;
            }
            let val = if neg { -v } else { v.clone() };
            match values.get(&sorted) {
                Some(old) if *old != val => {
                    return Err(Error::NonAlternating(format!("values for {key:?} contradict antisymmetry")));
                }
                _ => {
                    values.insert(sorted, val);
                }
            }
        }
        values.retain(|_, v| !v.is_zero());
        Ok(Cochain { k, values })
    }

    pub fn get(&self, key: &[usize]) -> DiffPolynomial {
        self.values.get(key).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }

    /// Value on an arbitrary tuple via antisymmetry.
    pub fn eval(&self, key: &[usize]) -> DiffPolynomial {
        let mut sorted = key.to_vec();
        let mut neg = false;
        for a in 0..sorted.len() {
            for b in 0..sorted.len().saturating_sub(1 + a) {
                if sorted[b] > sorted[b + 1] {
                    sorted.swap(b, b + 1);
                    neg = !neg;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return DiffPolynomial::zero();
        }
        let v = self.get(&sorted);
        if neg {
            -v
        } else {
            v
        }
    }
}

/// `f = sum_{I increasing} w_I b^{i1} ... b^{ik}`
pub fn encode_cochain(a: &ClassicalAlgebroid, w: &Cochain) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero();
    for (key, v) in &w.values {
        let mut m = v.clone();
        for &i in key {
            m = &m * &a.bpoly(i);
        }
        out.add_assign(&m);
    }
    out
}

/// Inverse of [`encode_cochain`] on b-homogeneous functions of degree k.
pub fn decode_cochain(a: &ClassicalAlgebroid, f: &DiffPolynomial, k: usize) -> Result<Cochain> {
    let mut values: BTreeMap<Vec<usize>, DiffPolynomial> = BTreeMap::new();
    for (m, c) in f.terms() {
        if m.odd().len() != k {
            return Err(Error::Degree(format!("expected b-degree {k}, found {}", m.odd().len())));
        }
        let key: Vec<usize> = m.odd().iter().map(|v| a.bs.iter().position(|&b| b == v.sym).unwrap()).collect();
        let even = crate::symkernel::Monomial::from_even(m.even());
        values.entry(key).or_default().add_term(even, c.clone());
    }
    values.retain(|_, v| !v.is_zero());
    Ok(Cochain { k, values })
}

fn increasing_tuples(d: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    rec(0, d, k, &mut cur, &mut out);
    out
}

/// Cartan formula for the algebroid differential.
pub fn cartan_differential(a: &ClassicalAlgebroid, w: &Cochain, conv: SignConvention) -> Cochain {
    let d = a.d();
    let k = w.k;
    let c = a.effective_c(conv);
    let mut values = BTreeMap::new();
    for j in increasing_tuples(d, k + 1) {
        let mut acc = DiffPolynomial::zero();
        for r in 0..=k {
            let rest: Vec<usize> = j.iter().enumerate().filter(|(q, _)| *q != r).map(|(_, &v)| v).collect();
            let term = a.anchor_derivative(j[r], &w.eval(&rest));
            if r % 2 == 0 {
                acc.add_assign(&term);
            } else {
                acc = &acc - &term;
            }
        }
        for r in 0..=k {
            for s in r + 1..=k {
                let rest: Vec<usize> =
                    j.iter().enumerate().filter(|(q, _)| *q != r && *q != s).map(|(_, &v)| v).collect();
                for l in 0..d {
                    let cl = &c[(l * d + j[r]) * d + j[s]];
                    if cl.is_zero() {
                        continue;
                    }
                    let mut args = alloc::vec![l];
                    args.extend(&rest);
                    let term = cl * &w.eval(&args);
                    if (r + s) % 2 == 0 {
                        acc.add_assign(&term);
                    } else {
                        acc = &acc - &term;
                    }
                }
            }
        }
        if !acc.is_zero() {
            values.insert(j, acc);
        }
    }
    Cochain { k: k + 1, values }
}

/// `decode(Q(encode(w))) - d_A w`
pub fn cochain_roundtrip(a: &ClassicalAlgebroid, w: &Cochain, conv: SignConvention) -> Result<Cochain> {
    if w.k > a.d() {
        return Err(Error::Degree(format!("cochain degree {} exceeds fibre dimension {}", w.k, a.d())));
    }
    let q = build_classical_q(a, conv);
    let f = encode_cochain(a, w);
    let qf = q.apply(&f, &a.cfg())?;
    let via_q = decode_cochain(a, &qf, w.k + 1)?;
    let cartan = cartan_differential(a, w, conv);
    let mut values = BTreeMap::new();
    for key in increasing_tuples(a.d(), w.k + 1) {
        let diff = &via_q.get(&key) - &cartan.get(&key);
        if !diff.is_zero() {
            values.insert(key, diff);
        }
    }
    Ok(Cochain { k: w.k + 1, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    #[test]
    fn so3_ghost_section() {
        let s = GradedFieldSpace::new(&LieAlgebra::so3(), 1, false).unwrap();
        let q = build_brst_field(&s, SignConvention::Plus).unwrap();
        assert_eq!(q.section(s.b[2]), parse("b1*b2", &s.ctx).unwrap());
        assert!(q.parity_violations(&s.ctx).is_empty());
    }

    #[test]
    fn abelian_field_has_only_derivatives() {
        let s = GradedFieldSpace::new(&LieAlgebra::abelian(2), 2, false).unwrap();
        let q = build_brst_field(&s, SignConvention::Plus).unwrap();
        assert_eq!(q.section(s.alpha[1][0]), parse("b1_t", &s.ctx).unwrap());
        assert!(q.section(s.b[0]).is_zero());
    }

    #[test]
    fn q_squares_to_zero() {
        for g in [LieAlgebra::abelian(2), LieAlgebra::so3(), LieAlgebra::sl2()] {
            for conv in [SignConvention::Plus, SignConvention::Minus] {
                let s = GradedFieldSpace::new(&g, 2, false).unwrap();
                let r = q_square_residual(&s, conv).unwrap();
                assert!(r.values().all(|p| p.is_zero()), "{}", g.name);
            }
        }
    }

    #[test]
    fn jacobi_failure_shows_up_on_connection() {
        let mut g = LieAlgebra::so3();
        g.set_c(0, 0, 1, Coefficient::one());
        g.set_c(0, 1, 0, Coefficient::from(-1));
        let s = GradedFieldSpace::new(&g, 2, false).unwrap();
        let r = q_square_residual(&s, SignConvention::Plus).unwrap();
        assert!(s.alpha.iter().flatten().any(|a| !r[a].is_zero()));
    }

    #[test]
    fn classical_examples() {
        for a in [ClassicalAlgebroid::chevalley_eilenberg(&LieAlgebra::so3()), ClassicalAlgebroid::de_rham(3)] {
            let r = classical_q_square(&a, SignConvention::Plus).unwrap();
            assert!(r.values().all(|p| p.is_zero()));
        }
    }

    #[test]
    fn cochains_match_cartan() {
        let a = ClassicalAlgebroid::chevalley_eilenberg(&LieAlgebra::so3());
        let w = Cochain::from_values(1, 3, &[(alloc::vec![0], DiffPolynomial::one())]).unwrap();
        assert!(cochain_roundtrip(&a, &w, SignConvention::Plus).unwrap().is_zero());
        let dr = ClassicalAlgebroid::de_rham(2);
        let f = parse("x1^2*x2", &dr.ctx).unwrap();
        let w0 = Cochain::from_values(0, 2, &[(alloc::vec![], f)]).unwrap();
        let dw = cartan_differential(&dr, &w0, SignConvention::Plus);
        assert_eq!(dw.get(&[0]), parse("2*x1*x2", &dr.ctx).unwrap());
        assert!(cochain_roundtrip(&dr, &w0, SignConvention::Plus).unwrap().is_zero());
    }

    #[test]
    fn non_alternating_rejected() {
        let e = [(alloc::vec![0, 1], DiffPolynomial::one()), (alloc::vec![1, 0], DiffPolynomial::one())];
        assert!(Cochain::from_values(2, 2, &e).is_err());
        assert!(Cochain::from_values(2, 2, &[(alloc::vec![1, 1], DiffPolynomial::one())]).is_err());
    }

    #[test]
    fn leibniz_extra_term() {
        let mut ctx = Context::new(&['x']).unwrap();
        let u = ctx.declare("u", Parity::Even).unwrap();
        let f = parse("u", &ctx).unwrap();
        let x = parse("u_x", &ctx).unwrap();
        let y = parse("u*u_{xx}", &ctx).unwrap();
        let lf = leibniz_failure(u, &f, &x, &y, &ctx).unwrap();
        assert_eq!(&lf.bracket - &lf.classical, lf.extra);
        assert!(!lf.extra.is_zero());
        let flat = parse("u^3", &ctx).unwrap();
        let lf0 = leibniz_failure(u, &f, &x, &flat, &ctx).unwrap();
        assert!(lf0.extra.is_zero());
        assert_eq!(lf0.bracket, lf0.classical);
    }

    #[test]
    fn transport_abelian_shift() {
        let g = LieAlgebra::abelian(1);
        let s = GradedFieldSpace::new(&g, 1, false).unwrap();
        let rep = Representation::new(&g, alloc::vec![Matrix::from_ints(&[&[0, 1], &[0, 0]])]).unwrap();
        let x = parse("x", &s.ctx).unwrap();
        let m = Matrix::from_rows(alloc::vec![
            alloc::vec![DiffPolynomial::one(), x.clone()],
            alloc::vec![DiffPolynomial::zero(), DiffPolynomial::one()],
        ])
        .unwrap();
        let gauge = GaugeElement::exp_nilpotent(&m.sub(&Matrix::identity(2)).unwrap()).unwrap();
        assert_eq!(gauge.g, m);
        let r = transport_q(&s, &rep, &gauge, SignConvention::Plus).unwrap();
        assert_eq!(r.alpha_prime[0][0], parse("a1x + 1", &s.ctx).unwrap());
        assert!(r.is_zero());
    }

    #[test]
    fn transport_sl2_nilpotent() {
        let g = LieAlgebra::sl2();
        let s = GradedFieldSpace::with_physical_fields(&g, 2, false, &["u"]).unwrap();
        let rep = Representation::new(&g, crate::zcr::matrix::sl2_defining()).unwrap();
        let e = rep.encode(&[DiffPolynomial::zero(), parse("u_x + u^2", &s.ctx).unwrap(), DiffPolynomial::zero()]);
        let gauge = GaugeElement::exp_nilpotent(&e).unwrap();
        for conv in [SignConvention::Plus, SignConvention::Minus] {
            let r = transport_q(&s, &rep, &gauge, conv).unwrap();
            assert!(r.is_zero(), "{conv:?}");
        }
    }
}
