//! BV sector: master action, variational Schouten bracket over the conjugate
//! pairs, its Hamiltonian field and first-order gauge flows.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebroid::{EvolutionaryField, GradedFieldSpace, SignConvention};
use crate::error::{Error, Result};
use crate::liealg::LieAlgebra;
use crate::symkernel::{
    euler, is_trivial_density, nontrivial_witnesses, total_derivative, Coefficient, DiffPolynomial, JetConfig, ParamId,
    Parity, Side, SymbolId,
};

/// Field space with all four families and the ordering of conjugate pairs
/// `(alpha^k_mu, alpha*^mu_k)` and `(b*_k, b^k)`.
#[derive(Clone, Debug)]
pub struct BVSetup {
    pub space: GradedFieldSpace,
    pub convention: SignConvention,
    /// Formal parameter of the gauge flows.
    pub eps: ParamId,
    algebra: LieAlgebra,
}

/// Density class of a local functional with respect to `dx^1 ... dx^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFunctional {
    pub density: DiffPolynomial,
    pub parity: Parity,
}

impl LocalFunctional {
    pub fn new(density: DiffPolynomial) -> Result<LocalFunctional> {
        let parity = density.parity().ok_or_else(|| Error::Parity("density mixes even and odd terms".into()))?;
        Ok(LocalFunctional { density, parity })
    }

    pub fn zero(parity: Parity) -> LocalFunctional {
        LocalFunctional { density: DiffPolynomial::zero(), parity }
    }

    pub fn add(&self, o: &LocalFunctional) -> Result<LocalFunctional> {
        if !self.density.is_zero() && !o.density.is_zero() && self.parity != o.parity {
            return Err(Error::Parity("sum of functionals of different parity".into()));
        }
        let parity = if self.density.is_zero() { o.parity } else { self.parity };
        Ok(LocalFunctional { density: &self.density + &o.density, parity })
    }

    pub fn sub(&self, o: &LocalFunctional) -> Result<LocalFunctional> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> LocalFunctional {
        LocalFunctional { density: -&self.density, parity: self.parity }
    }

    pub fn scale(&self, c: &Coefficient) -> LocalFunctional {
        LocalFunctional { density: self.density.scale(c), parity: self.parity }
    }
}

impl BVSetup {
    pub fn new(algebra: &LieAlgebra, n: usize, convention: SignConvention) -> Result<BVSetup> {
        let mut space = GradedFieldSpace::new(algebra, n, true)?;
        let eps = space.ctx.declare_param("eps")?;
        Ok(BVSetup { algebra: convention.apply(algebra), space, convention, eps })
    }

    pub fn from_space(space: GradedFieldSpace, convention: SignConvention) -> Result<BVSetup> {
        if space.alpha_star.is_none() || space.b_star.is_none() {
            return Err(Error::IncompleteSetup("antifields and antighosts are required".into()));
        }
        let mut space = space;
        let eps = match space.ctx.param("eps") {
            Some(p) => p,
            None => space.ctx.declare_param("eps")?,
        };
        Ok(BVSetup { algebra: convention.apply(&space.algebra), space, convention, eps })
    }

    /// Algebra with the sign convention applied.
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn cfg(&self) -> JetConfig {
        self.space.cfg()
    }

    /// `(q, q+)` in the fixed order.
    pub fn pairs(&self) -> Vec<(SymbolId, SymbolId)> {
        let s = &self.space;
        let star = s.alpha_star.as_ref().expect("checked at construction");
        let bs = s.b_star.as_ref().expect("checked at construction");
        let mut v = Vec::new();
        for mu in 0..s.n() {
            for k in 0..s.dim() {
                v.push((s.alpha[mu][k], star[mu][k]));
            }
        }
        for k in 0..s.dim() {
            v.push((bs[k], s.b[k]));
        }
        v
    }

    pub fn is_trivial(&self, f: &LocalFunctional) -> Result<bool> {
        is_trivial_density(&f.density, &self.space.ctx)
    }

    pub fn witnesses(&self, f: &LocalFunctional) -> Result<Vec<(SymbolId, DiffPolynomial)>> {
        nontrivial_witnesses(&f.density, &self.space.ctx)
    }
}

/// `S = <alpha*, [b,alpha] + d_h b> + 1/2 <b*, [b,b]>`
pub fn build_master_action(setup: &BVSetup) -> Result<LocalFunctional> {
    let s = &setup.space;
    let g = setup.algebra();
    let cfg = setup.cfg();
    let b = s.b_vec();
    let mut l = DiffPolynomial::zero();
    for mu in 0..s.n() {
        let br = g.bracket(&b, &s.alpha_vec(mu))?;
        let star = s.alpha_star_vec(mu)?;
        for k in 0..s.dim() {
            let v = &br[k] + &total_derivative(&b[k], mu, &cfg)?;
            l.add_assign(&(&star[k] * &v));
        }
    }
    let bb = g.bracket(&b, &b)?;
    let bs = s.b_star_vec()?;
    for k in 0..s.dim() {
        l.add_scaled(&(&bs[k] * &bb[k]), &Coefficient::rational(1, 2));
    }
    Ok(LocalFunctional { density: l, parity: Parity::Even })
}

/// `[[F,G]] = sum (dF<-/dq)(d->G/dq+) - (dF<-/dq+)(d->G/dq)`
pub fn schouten_bracket(setup: &BVSetup, f: &LocalFunctional, g: &LocalFunctional) -> Result<LocalFunctional> {
    let cfg = setup.cfg();
    let mut out = DiffPolynomial::zero();
    for (q, qd) in setup.pairs() {
        let fq = euler(&f.density, q, Side::Right, &cfg)?;
        if !fq.is_zero() {
            let gqd = euler(&g.density, qd, Side::Left, &cfg)?;
            out.add_assign(&(&fq * &gqd));
        }
        let fqd = euler(&f.density, qd, Side::Right, &cfg)?;
        if !fqd.is_zero() {
            let gq = euler(&g.density, q, Side::Left, &cfg)?;
            out = &out - &(&fqd * &gq);
        }
    }
    Ok(LocalFunctional { density: out, parity: f.parity + g.parity + Parity::Odd })
}

/// Evolutionary field `Q_S` with `Q_S(H) = [[S,H]]` modulo divergences.
pub fn hamiltonian_field_of(setup: &BVSetup, s: &LocalFunctional) -> Result<EvolutionaryField> {
    let cfg = setup.cfg();
    let mut q = EvolutionaryField::new(s.parity + Parity::Odd);
    for (a, b) in setup.pairs() {
        let da = euler(&s.density, a, Side::Right, &cfg)?;
        let db = euler(&s.density, b, Side::Right, &cfg)?;
        // the first member of each pair moves along -dS/d(partner)
        q.sections.insert(a, -&db);
        q.sections.insert(b, da);
    }
    q.sections.retain(|_, p| !p.is_zero());
    Ok(q)
}

/// The odd field written out by components:
/// `alpha: [b,alpha] + d_h b`, `alpha*: (alpha*) ad*_b`, `b: 1/2 [b,b]`,
/// `b*: -ad*_alpha(alpha*) + (alpha*) d_h + ad*_b(b*)`.
pub fn expected_qhat(setup: &BVSetup) -> Result<EvolutionaryField> {
    let s = &setup.space;
    let g = setup.algebra();
    let cfg = setup.cfg();
    let b = s.b_vec();
    let star = s.alpha_star.as_ref().ok_or_else(|| Error::IncompleteSetup("no antifields".into()))?;
    let mut q = EvolutionaryField::new(Parity::Odd);
    let mut bstar_vel = g.coadjoint(&b, &s.b_star_vec()?)?.into_iter().map(|p| -&p).collect::<Vec<_>>();
    for mu in 0..s.n() {
        let a = s.alpha_vec(mu);
        let w = s.alpha_star_vec(mu)?;
        let br = g.bracket(&b, &a)?;
        let right = g.coadjoint_right(&w, &b)?;
        let ad_alpha = g.coadjoint(&a, &w)?;
        for k in 0..s.dim() {
            q.sections.insert(s.alpha[mu][k], &br[k] + &total_derivative(&b[k], mu, &cfg)?);
            q.sections.insert(star[mu][k], right[k].clone());
            bstar_vel[k] = &(&bstar_vel[k] + &ad_alpha[k]) + &total_derivative(&w[k], mu, &cfg)?;
        }
    }
    let bb = g.bracket(&b, &b)?;
    let bs = s.b_star.as_ref().ok_or_else(|| Error::IncompleteSetup("no antighosts".into()))?;
    for k in 0..s.dim() {
        q.sections.insert(s.b[k], bb[k].scale(&Coefficient::rational(1, 2)));
        q.sections.insert(bs[k], bstar_vel[k].clone());
    }
    q.sections.retain(|_, p| !p.is_zero());
    Ok(q)
}

/// `[[S,S]]`
pub fn cme_residual(setup: &BVSetup) -> Result<LocalFunctional> {
    let s = build_master_action(setup)?;
    schouten_bracket(setup, &s, &s)
}

/// Sections of `1/2 [Q,Q]` for the Hamiltonian field of `S`.
pub fn qhat_square_residual(setup: &BVSetup) -> Result<BTreeMap<SymbolId, DiffPolynomial>> {
    let s = build_master_action(setup)?;
    hamiltonian_field_of(setup, &s)?.square_residual(&setup.cfg())
}

#[derive(Clone, Debug)]
pub struct FlowOrder {
    pub order: u32,
    pub coefficient: LocalFunctional,
    pub trivial: bool,
}

#[derive(Clone, Debug)]
pub struct GaugeFlowReport {
    pub s_eps: LocalFunctional,
    pub orders: Vec<FlowOrder>,
}

impl GaugeFlowReport {
    pub fn is_ok(&self) -> bool {
        self.orders.iter().all(|o| o.trivial)
    }
}

fn eps_coefficient(p: &DiffPolynomial, eps: ParamId, k: u32) -> Result<DiffPolynomial> {
    p.try_map_coefficients(|c| {
        c.coefficient_of(eps, k).ok_or_else(|| Error::Degree("coefficient is not polynomial in eps".into()))
    })
}

fn check_odd(f: &LocalFunctional, what: &str) -> Result<()> {
    if f.parity.is_odd() || f.density.is_zero() {
        Ok(())
    } else {
        Err(Error::Parity(alloc::format!("{what} must be odd")))
    }
}

/// `S(eps) = S + eps [[S,F]]` and the eps-expansion of `[[S(eps), S(eps)]]`
/// below `eps^order`.
pub fn gauge_flow_step(setup: &BVSetup, f: &LocalFunctional, order: u32) -> Result<GaugeFlowReport> {
    check_odd(f, "flow generator")?;
    let s = build_master_action(setup)?;
    let sf = schouten_bracket(setup, &s, f)?;
    let eps = DiffPolynomial::constant(Coefficient::param(setup.eps));
    let s_eps = LocalFunctional { density: &s.density + &(&eps * &sf.density), parity: s.parity };
    let full = schouten_bracket(setup, &s_eps, &s_eps)?;
    let mut orders = Vec::new();
    for k in 0..order {
        let c = LocalFunctional { density: eps_coefficient(&full.density, setup.eps, k)?, parity: full.parity };
        let trivial = setup.is_trivial(&c)?;
        orders.push(FlowOrder { order: k, coefficient: c, trivial });
    }
    Ok(GaugeFlowReport { s_eps, orders })
}

#[derive(Clone, Debug)]
pub struct CocycleTransportReport {
    /// order-eps part of `[[S(eps), eta + eps [[eta,F]]]]`
    pub cocycle_velocity: LocalFunctional,
    pub cocycle_ok: bool,
    /// `[[[[S,h]],F]] - [[[[S,F]],h]] - [[S,[[h,F]]]]`, when `h` is given
    pub coboundary_residual: Option<LocalFunctional>,
    pub coboundary_ok: bool,
}

/// Transport of a cocycle `eta` (and optionally of the coboundary `[[S,h]]`)
/// along the flow generated by `F`.
pub fn cocycle_transport(
    setup: &BVSetup,
    f: &LocalFunctional,
    eta: &LocalFunctional,
    h: Option<&LocalFunctional>,
) -> Result<CocycleTransportReport> {
    check_odd(f, "flow generator")?;
    let s = build_master_action(setup)?;
    if !setup.is_trivial(&schouten_bracket(setup, &s, eta)?)? {
        return Err(Error::NotACocycle);
    }
    let sf = schouten_bracket(setup, &s, f)?;
    let velocity =
        schouten_bracket(setup, &sf, eta)?.add(&schouten_bracket(setup, &s, &schouten_bracket(setup, eta, f)?)?)?;
    let cocycle_ok = setup.is_trivial(&velocity)?;
    let (coboundary_residual, coboundary_ok) = match h {
        None => (None, true),
        Some(h) => {
            let postulated = schouten_bracket(setup, &schouten_bracket(setup, &s, h)?, f)?;
            let calculated =
                schouten_bracket(setup, &sf, h)?.add(&schouten_bracket(setup, &s, &schouten_bracket(setup, h, f)?)?)?;
            let r = postulated.sub(&calculated)?;
            let ok = setup.is_trivial(&r)?;
            (Some(r), ok)
        }
    };
    Ok(CocycleTransportReport { cocycle_velocity: velocity, cocycle_ok, coboundary_residual, coboundary_ok })
}

#[derive(Clone, Debug)]
pub struct FlowCommutatorReport {
    pub residual: LocalFunctional,
    pub trivial: bool,
}

/// `[[[[S,X]],Y]] - [[[[S,Y]],X]] - [[S,[[X,Y]]]]`
pub fn flow_commutator_check(
    setup: &BVSetup,
    x: &LocalFunctional,
    y: &LocalFunctional,
) -> Result<FlowCommutatorReport> {
    check_odd(x, "X")?;
    check_odd(y, "Y")?;
    let s = build_master_action(setup)?;
    let sx = schouten_bracket(setup, &s, x)?;
    let sy = schouten_bracket(setup, &s, y)?;
    let xy = schouten_bracket(setup, x, y)?;
    let residual = schouten_bracket(setup, &sx, y)?
        .sub(&schouten_bracket(setup, &sy, x)?)?
        .sub(&schouten_bracket(setup, &s, &xy)?)?;
    let trivial = setup.is_trivial(&residual)?;
    Ok(FlowCommutatorReport { residual, trivial })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse;

    fn f(setup: &BVSetup, text: &str) -> LocalFunctional {
        LocalFunctional::new(parse(text, &setup.space.ctx).unwrap()).unwrap()
    }

    #[test]
    fn abelian_action() {
        let st = BVSetup::new(&LieAlgebra::abelian(1), 2, SignConvention::Plus).unwrap();
        let s = build_master_action(&st).unwrap();
        assert_eq!(s.density, parse("as1x*b1_x + as1t*b1_t", &st.space.ctx).unwrap());
        assert!(cme_residual(&st).unwrap().density.is_zero());
    }

    #[test]
    fn qhat_matches_component_formula() {
        for g in [LieAlgebra::abelian(2), LieAlgebra::so3(), LieAlgebra::sl2()] {
            for n in [1, 2] {
                for conv in [SignConvention::Plus, SignConvention::Minus] {
                    let st = BVSetup::new(&g, n, conv).unwrap();
                    let s = build_master_action(&st).unwrap();
                    let q = hamiltonian_field_of(&st, &s).unwrap();
                    assert_eq!(q, expected_qhat(&st).unwrap(), "{} n={n}", g.name);
                }
            }
        }
    }

    #[test]
    fn master_equation_holds() {
        for g in [LieAlgebra::so3(), LieAlgebra::sl2()] {
            for n in [1, 2] {
                let st = BVSetup::new(&g, n, SignConvention::Plus).unwrap();
                assert!(st.is_trivial(&cme_residual(&st).unwrap()).unwrap());
                assert!(qhat_square_residual(&st).unwrap().values().all(|p| p.is_zero()));
            }
        }
    }

    #[test]
    fn corruption_is_detected() {
        let mut g = LieAlgebra::so3();
        g.set_c(0, 0, 1, Coefficient::one());
        g.set_c(0, 1, 0, Coefficient::from(-1));
        let st = BVSetup::new(&g, 1, SignConvention::Plus).unwrap();
        let r = cme_residual(&st).unwrap();
        let w = st.witnesses(&r).unwrap();
        assert!(!w.is_empty());
        let bs = st.space.b_star.clone().unwrap();
        assert!(w.iter().any(|(s, _)| bs.contains(s)));
        assert!(qhat_square_residual(&st).unwrap().values().any(|p| !p.is_zero()));
    }

    #[test]
    fn hamiltonian_field_acts_as_bracket() {
        let st = BVSetup::new(&LieAlgebra::so3(), 1, SignConvention::Plus).unwrap();
        let s = build_master_action(&st).unwrap();
        let q = hamiltonian_field_of(&st, &s).unwrap();
        for h in ["a1x*a2x_x*b3", "bs1*bs2 + as3x*b1", "as1x*as2x_x", "bs3*b1*b2_x"] {
            let h = f(&st, h);
            let lhs = q.apply(&h.density, &st.cfg()).unwrap();
            let rhs = schouten_bracket(&st, &s, &h).unwrap();
            let diff = LocalFunctional { density: &lhs - &rhs.density, parity: rhs.parity };
            assert!(st.is_trivial(&diff).unwrap());
        }
    }

    #[test]
    fn bracket_without_antifields_vanishes() {
        let st = BVSetup::new(&LieAlgebra::so3(), 1, SignConvention::Plus).unwrap();
        let a = f(&st, "a1x*b2");
        let b = f(&st, "b1*b3_x*a2x");
        assert!(schouten_bracket(&st, &a, &b).unwrap().density.is_zero());
    }

    #[test]
    fn flows() {
        let st = BVSetup::new(&LieAlgebra::so3(), 1, SignConvention::Plus).unwrap();
        let fgen = f(&st, "b1*a2x*a3x_x + bs1*b2*b3*as1x");
        let rep = gauge_flow_step(&st, &fgen, 2).unwrap();
        assert!(rep.is_ok());
        assert!(gauge_flow_step(&st, &f(&st, "a1x*bs2"), 2).is_err());
        let s = build_master_action(&st).unwrap();
        let h = f(&st, "a1x*bs2_x");
        let eta = schouten_bracket(&st, &s, &h).unwrap();
        let ct = cocycle_transport(&st, &fgen, &eta, Some(&h)).unwrap();
        assert!(ct.cocycle_ok && ct.coboundary_ok);
        let x = f(&st, "b1*as2x*as3x_x");
        let y = f(&st, "b3*bs1*a2x_x");
        assert!(flow_commutator_check(&st, &x, &y).unwrap().trivial);
        assert!(flow_commutator_check(&st, &x, &x).unwrap().trivial);
    }
}
