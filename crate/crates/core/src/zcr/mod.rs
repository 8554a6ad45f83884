//! Zero-curvature representations, gauge transformations, the anchor and the
//! Bianchi, Euler-Lagrange and Noether identities.

pub mod matrix;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

pub use matrix::{Matrix, MatrixForm, Representation, Truncation};

use crate::error::{Error, Result};
use crate::gforms::{horizontal_differential, index_set, scalar_pairing, wedge_bracket, GForm};
use crate::liealg::{inverse, LieAlgebra};
use crate::symkernel::{
    derive_with, total_derivative_multi, Coefficient, Context, DiffPolynomial, JetConfig, JetVar, Parity, PdeSystem,
    SymbolId,
};

/// `F = -d_h alpha + 1/2 [alpha, alpha]`
pub fn curvature(alpha: &GForm, g: &LieAlgebra, cfg: &JetConfig) -> Result<GForm> {
    if alpha.degree() != 1 {
        return Err(Error::Degree("a connection is a one-form".into()));
    }
    if alpha.n() < 2 {
        return Err(Error::Degree("curvature needs base dimension at least 2".into()));
    }
    let dh = horizontal_differential(alpha, cfg)?;
    let br = wedge_bracket(alpha, alpha, g)?;
    dh.neg().add(&br.scale(&Coefficient::rational(1, 2)))
}

/// Curvature reduced on the equation; zero iff `alpha` is a zero-curvature
/// representation of the system.
pub fn check_zcr(alpha: &GForm, g: &LieAlgebra, sys: &PdeSystem, cfg: &JetConfig) -> Result<GForm> {
    let f = curvature(alpha, g, cfg)?;
    let mut red = sys.reducer(*cfg);
    f.try_map(|p| red.reduce(p))
}

/// An invertible matrix function together with its inverse, possibly
/// modulo powers of a formal parameter.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeElement {
    pub g: Matrix,
    pub g_inv: Matrix,
    pub truncation: Truncation,
}

impl GaugeElement {
    pub fn new(g: Matrix, g_inv: Matrix, truncation: Truncation) -> Result<GaugeElement> {
        if g.size() != g_inv.size() {
            return Err(Error::DimensionMismatch { expected: g.size(), got: g_inv.size() });
        }
        let g = g.truncate(truncation)?;
        let g_inv = g_inv.truncate(truncation)?;
        if !g.mul_trunc(&g_inv, truncation)?.is_identity() || !g_inv.mul_trunc(&g, truncation)?.is_identity() {
            return Err(Error::SingularGauge("g * g_inv is not the identity".into()));
        }
        Ok(GaugeElement { g, g_inv, truncation })
    }

    pub fn identity(r: usize) -> GaugeElement {
        GaugeElement { g: Matrix::identity(r), g_inv: Matrix::identity(r), truncation: None }
    }

    /// `exp(m)` for a nilpotent matrix.
    pub fn exp_nilpotent(m: &Matrix) -> Result<GaugeElement> {
        let neg = m.map(|p| -p);
        GaugeElement::new(m.exp_nilpotent()?, neg.exp_nilpotent()?, None)
    }

    /// `exp(eps m)` truncated at `eps^order`.
    pub fn exp_truncated(m: &Matrix, eps: crate::symkernel::ParamId, order: u32) -> Result<GaugeElement> {
        let e = DiffPolynomial::constant(Coefficient::param(eps));
        let em = m.scale(&e);
        let neg = em.map(|p| -p);
        let t = (eps, order);
        GaugeElement::new(em.exp_truncated(t)?, neg.exp_truncated(t)?, Some(t))
    }

    pub fn inverse(&self) -> GaugeElement {
        GaugeElement { g: self.g_inv.clone(), g_inv: self.g.clone(), truncation: self.truncation }
    }
}

fn merge_truncation(a: Truncation, b: Truncation) -> Result<Truncation> {
    match (a, b) {
        (None, t) | (t, None) => Ok(t),
        (Some((p, m)), Some((q, k))) if p == q => Ok(Some((p, m.min(k)))),
        _ => Err(Error::Degree("gauge elements truncate different parameters".into())),
    }
}

/// `(g2 g1, g1^-1 g2^-1)`
pub fn compose_gauges(g2: &GaugeElement, g1: &GaugeElement) -> Result<GaugeElement> {
    let t = merge_truncation(g2.truncation, g1.truncation)?;
    Ok(GaugeElement { g: g2.g.mul_trunc(&g1.g, t)?, g_inv: g1.g_inv.mul_trunc(&g2.g_inv, t)?, truncation: t })
}

/// `A_i -> g A_i g^-1 + D_i(g) g^-1` on a matrix one-form.
pub fn gauge_transform_matrix(a: &MatrixForm, gauge: &GaugeElement, cfg: &JetConfig) -> Result<MatrixForm> {
    if a.degree != 1 {
        return Err(Error::Degree("gauge action is defined on one-forms".into()));
    }
    if a.r != gauge.g.size() {
        return Err(Error::DimensionMismatch { expected: a.r, got: gauge.g.size() });
    }
    let t = gauge.truncation;
    let mut comps = BTreeMap::new();
    for i in 0..a.n {
        let ai = a.direction(i);
        let conj = gauge.g.mul_trunc(&ai, t)?.mul_trunc(&gauge.g_inv, t)?;
        let shift = gauge.g.total_derivative(i, cfg)?.mul_trunc(&gauge.g_inv, t)?;
        let m = conj.add(&shift)?;
        if !m.is_zero() {
            comps.insert(1 << i, m);
        }
    }
    Ok(MatrixForm { n: a.n, degree: 1, r: a.r, comps })
}

#[derive(Clone, Debug)]
pub struct GaugeResult {
    pub matrix: MatrixForm,
    /// `None` when the transformed connection leaves the image of the representation.
    pub form: Option<GForm>,
}

pub fn gauge_transform(
    alpha: &GForm,
    rep: &Representation,
    gauge: &GaugeElement,
    cfg: &JetConfig,
) -> Result<GaugeResult> {
    let m = gauge_transform_matrix(&rep.encode_form(alpha), gauge, cfg)?;
    let form = rep.decode_form(&m);
    Ok(GaugeResult { matrix: m, form })
}

/// Commutant `g1 g2 g1^-1 g2^-1`.
pub fn commutant(g1: &GaugeElement, g2: &GaugeElement) -> Result<GaugeElement> {
    compose_gauges(&compose_gauges(g1, g2)?, &compose_gauges(&g1.inverse(), &g2.inverse())?)
}

/// `d_h p + [p, alpha]`, optionally reduced on the equation.
pub fn anchor_apply(
    alpha: &GForm,
    p: &[DiffPolynomial],
    g: &LieAlgebra,
    cfg: &JetConfig,
    reduce: Option<&PdeSystem>,
) -> Result<GForm> {
    let p0 = GForm::from_vector(alpha.n(), p.to_vec());
    let out = horizontal_differential(&p0, cfg)?.add(&wedge_bracket(&p0, alpha, g)?)?;
    match reduce {
        None => Ok(out),
        Some(sys) => {
            let mut r = sys.reducer(*cfg);
            out.try_map(|q| r.reduce(q))
        }
    }
}

/// Mismatch between the commutator of two infinitesimal gauge flows and the
/// flow generated by `[p1,p2]`: `[p2, d p1] - [p1, d p2] + d([p1,p2])` with
/// `d = anchor_apply(alpha, .)`.
pub fn image_closure_check(
    alpha: &GForm,
    p1: &[DiffPolynomial],
    p2: &[DiffPolynomial],
    g: &LieAlgebra,
    cfg: &JetConfig,
) -> Result<GForm> {
    let n = alpha.n();
    let a1 = anchor_apply(alpha, p1, g, cfg, None)?;
    let a2 = anchor_apply(alpha, p2, g, cfg, None)?;
    let f1 = GForm::from_vector(n, p1.to_vec());
    let f2 = GForm::from_vector(n, p2.to_vec());
    let commutator = wedge_bracket(&f2, &a1, g)?.sub(&wedge_bracket(&f1, &a2, g)?)?;
    let p12 = g.bracket(p1, p2)?;
    commutator.add(&anchor_apply(alpha, &p12, g, cfg, None)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BianchiOutcome {
    /// The residual is a 3-form and the base has dimension 2.
    DegreeForcedZero,
    Residual(GForm),
}

impl BianchiOutcome {
    pub fn is_zero(&self) -> bool {
        match self {
            BianchiOutcome::DegreeForcedZero => true,
            BianchiOutcome::Residual(f) => f.is_zero(),
        }
    }
}

/// `-d_h F - [F, alpha]`, off the equation.
pub fn bianchi_residual(alpha: &GForm, g: &LieAlgebra, cfg: &JetConfig) -> Result<BianchiOutcome> {
    let f = curvature(alpha, g, cfg)?;
    if alpha.n() < 3 {
        return Ok(BianchiOutcome::DegreeForcedZero);
    }
    let r = horizontal_differential(&f, cfg)?.neg().sub(&wedge_bracket(&f, alpha, g)?)?;
    Ok(BianchiOutcome::Residual(r))
}

fn require_three(alpha: &GForm) -> Result<()> {
    if alpha.n() != 3 {
        return Err(Error::Degree(alloc::format!("the action functional needs n = 3, got {}", alpha.n())));
    }
    Ok(())
}

/// Density of `-1/2 <alpha, d_h alpha> + 1/6 <alpha, [alpha, alpha]>`.
pub fn mc_action_density(alpha: &GForm, g: &LieAlgebra, cfg: &JetConfig) -> Result<DiffPolynomial> {
    require_three(alpha)?;
    g.metric().ok_or(Error::MissingMetric)?;
    let dh = horizontal_differential(alpha, cfg)?;
    let quad = scalar_pairing(alpha, &dh, g)?.top();
    let br = wedge_bracket(alpha, alpha, g)?;
    let cubic = scalar_pairing(alpha, &br, g)?.top();
    Ok(&quad.scale(&Coefficient::rational(-1, 2)) + &cubic.scale(&Coefficient::rational(1, 6)))
}

/// Connection `a^k_i dx^i + shift` over field symbols `syms[i][k]`.
pub fn connection_form(n: usize, syms: &[Vec<SymbolId>], ctx: &Context, shift: Option<&GForm>) -> Result<GForm> {
    let dirs: Vec<Vec<DiffPolynomial>> =
        syms.iter().map(|row| row.iter().map(|&s| DiffPolynomial::var(ctx.var(s))).collect()).collect();
    let dim = dirs.first().map_or(0, |r| r.len());
    let base = GForm::one_form(n, dim, &dirs)?;
    match shift {
        Some(s) => base.add(s),
        None => Ok(base),
    }
}

/// Euler derivatives of the action density with respect to `syms[i][k]`,
/// raised by the inverse metric and placed on the complementary 2-form
/// component; equals the curvature when the action is correct.
pub fn euler_lagrange_of_action(alpha: &GForm, syms: &[Vec<SymbolId>], g: &LieAlgebra, ctx: &Context) -> Result<GForm> {
    require_three(alpha)?;
    let cfg = ctx.jet_config();
    let density = mc_action_density(alpha, g, &cfg)?;
    let d = g.dim();
    let t = g.metric().ok_or(Error::MissingMetric)?;
    let tinv = inverse(t, d).ok_or(Error::MissingMetric)?;
    let mut out = GForm::zero(3, d, 2);
    for (i, row) in syms.iter().enumerate() {
        let el: Vec<DiffPolynomial> =
            row.iter().map(|&s| crate::symkernel::euler_left(&density, s, ctx)).collect::<Result<_>>()?;
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        // dx^i ^ dx^j ^ dx^m with j < m is positive iff (i, j, m) is even
        let negate = i == 1;
        let mut comp = alloc::vec![DiffPolynomial::zero(); d];
        for k in 0..d {
            for l in 0..d {
                let c = &tinv[k * d + l];
                if !c.is_zero() {
                    comp[k].add_scaled(&el[l], c);
                }
            }
            if negate {
                comp[k] = -&comp[k];
            }
        }
        out.set(index_set(&others), comp);
    }
    Ok(out)
}

/// Apply an evolutionary field given by sections for selected symbols.
pub fn apply_sections(
    e: &DiffPolynomial,
    parity: Parity,
    sections: &BTreeMap<SymbolId, DiffPolynomial>,
    cfg: &JetConfig,
) -> Result<DiffPolynomial> {
    derive_with(e, parity, |v: &JetVar| match sections.get(&v.sym) {
        Some(s) if !v.is_base() => total_derivative_multi(s, &v.idx, cfg).map(Some),
        _ => Ok(None),
    })
}

/// Variation of the action density along the gauge field generated by
/// `anchor_apply(alpha, p)`. The result is a trivial density for a
/// Noether symmetry.
pub fn noether_residual(
    alpha: &GForm,
    syms: &[Vec<SymbolId>],
    p: &[DiffPolynomial],
    g: &LieAlgebra,
    cfg: &JetConfig,
) -> Result<DiffPolynomial> {
    require_three(alpha)?;
    let density = mc_action_density(alpha, g, cfg)?;
    let xi = anchor_apply(alpha, p, g, cfg, None)?;
    let mut sections = BTreeMap::new();
    for (i, row) in syms.iter().enumerate() {
        let v = xi.direction(i);
        for (k, &s) in row.iter().enumerate() {
            sections.insert(s, v[k].clone());
        }
    }
    apply_sections(&density, Parity::Even, &sections, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::{parse, Ranking};

    fn kdv_ctx() -> Context {
        let mut c = Context::new(&['x', 't']).unwrap();
        c.declare("u", Parity::Even).unwrap();
        c.declare_param("lambda").unwrap();
        c
    }

    fn vec3(c: &Context, s: [&str; 3]) -> Vec<DiffPolynomial> {
        s.iter().map(|t| parse(t, c).unwrap()).collect()
    }

    fn kdv_alpha(c: &Context) -> GForm {
        let ax = vec3(c, ["0", "1", "u + lambda"]);
        let at = vec3(c, ["-1/2*u_x", "u - 2*lambda", "-1/2*u_{xx} + (u + lambda)*(u - 2*lambda)"]);
        GForm::one_form(2, 3, &[ax, at]).unwrap()
    }

    #[test]
    fn abelian_transport_curvature() {
        let c = kdv_ctx();
        let g = LieAlgebra::abelian(1);
        let u = parse("u", &c).unwrap();
        let a = GForm::one_form(2, 1, &[alloc::vec![u.clone()], alloc::vec![u]]).unwrap();
        let f = curvature(&a, &g, &c.jet_config()).unwrap();
        assert_eq!(f.component(0, 0b11), parse("u_t - u_x", &c).unwrap());
        let sys = PdeSystem::parse(&[("u_t", "u_x")], &c, Ranking::default()).unwrap();
        assert!(check_zcr(&a, &g, &sys, &c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn kdv_connection() {
        let c = kdv_ctx();
        let g = LieAlgebra::sl2();
        let a = kdv_alpha(&c);
        let kdv = PdeSystem::parse(&[("u_t", "-1/2*u_{xxx} + 3*u*u_x")], &c, Ranking::default()).unwrap();
        assert!(check_zcr(&a, &g, &kdv, &c.jet_config()).unwrap().is_zero());
        let heat = PdeSystem::parse(&[("u_t", "u_{xx}")], &c, Ranking::default()).unwrap();
        assert!(!check_zcr(&a, &g, &heat, &c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn gauge_preserves_kdv_zcr() {
        let c = kdv_ctx();
        let g = LieAlgebra::sl2();
        let rep = Representation::new(&g, matrix::sl2_defining()).unwrap();
        let a = kdv_alpha(&c);
        let p = vec3(&c, ["0", "u_x + 2*u^2", "0"]);
        let gauge = GaugeElement::exp_nilpotent(&rep.encode(&p)).unwrap();
        let res = gauge_transform(&a, &rep, &gauge, &c.jet_config()).unwrap();
        let ag = res.form.expect("stays in sl(2)");
        assert_ne!(ag, a);
        let kdv = PdeSystem::parse(&[("u_t", "-1/2*u_{xxx} + 3*u*u_x")], &c, Ranking::default()).unwrap();
        assert!(check_zcr(&ag, &g, &kdv, &c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn first_order_gauge_is_anchor() {
        let mut c = kdv_ctx();
        let eps = c.declare_param("eps").unwrap();
        let g = LieAlgebra::sl2();
        let rep = Representation::new(&g, matrix::sl2_defining()).unwrap();
        let a = kdv_alpha(&c);
        let p = vec3(&c, ["u", "u_x", "1 - u^2"]);
        let pe: Vec<_> = p.iter().map(|q| q.scale(&Coefficient::param(eps))).collect();
        let gm = Matrix::identity(2).add(&rep.encode(&pe)).unwrap();
        let gi = Matrix::identity(2).sub(&rep.encode(&pe)).unwrap();
        let gauge = GaugeElement::new(gm, gi, Some((eps, 2))).unwrap();
        let ag = gauge_transform(&a, &rep, &gauge, &c.jet_config()).unwrap().form.unwrap();
        let diff = ag.sub(&a).unwrap();
        let anchor = anchor_apply(&a, &p, &g, &c.jet_config(), None).unwrap();
        let scaled = anchor.map(|q| q.scale(&Coefficient::param(eps)));
        assert_eq!(diff, scaled);
    }

    #[test]
    fn closure_on_jet_dependent_parameters() {
        let c = kdv_ctx();
        let g = LieAlgebra::so3();
        let a = GForm::one_form(2, 3, &[vec3(&c, ["u", "u_x", "0"]), vec3(&c, ["0", "u^2", "u_{xx}"])]).unwrap();
        let p1 = vec3(&c, ["u", "0", "0"]);
        let p2 = vec3(&c, ["0", "u_x", "0"]);
        assert!(image_closure_check(&a, &p1, &p2, &g, &c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn bianchi_in_two_dimensions_is_forced() {
        let c = kdv_ctx();
        assert_eq!(
            bianchi_residual(&kdv_alpha(&c), &LieAlgebra::sl2(), &c.jet_config()).unwrap(),
            BianchiOutcome::DegreeForcedZero
        );
    }
}
