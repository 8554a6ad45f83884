//! Total derivatives, graded partial derivatives and Euler operators.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::coeff::Coefficient;
use super::poly::{DiffPolynomial, Monomial};
use super::symbol::{Context, JetVar, MultiIndex, Parity, SymbolId, VarKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct JetConfig {
    pub n: usize,
    pub max_order: u32,
}

impl JetConfig {
    pub fn new(n: usize) -> JetConfig {
        JetConfig { n, max_order: super::symbol::DEFAULT_MAX_JET_ORDER }
    }
}

/// Side from which a graded partial derivative acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Applies the derivation of parity `p` determined by its values on variables
/// (`None` means zero), as a left derivation.
pub fn derive_with<E>(
    e: &DiffPolynomial,
    p: Parity,
    mut on_var: impl FnMut(&JetVar) -> core::result::Result<Option<DiffPolynomial>, E>,
) -> core::result::Result<DiffPolynomial, E> {
    let mut cache: BTreeMap<JetVar, Option<DiffPolynomial>> = BTreeMap::new();
    let mut out = DiffPolynomial::zero();
    for (m, c) in e.terms() {
        for &(v, k) in m.even() {
            if let Entry::Vacant(slot) = cache.entry(v) {
                slot.insert(on_var(&v)?);
            }
            let Some(xv) = cache[&v].as_ref() else {
                continue;
            };
            let rest = DiffPolynomial::term(m.without_even(&v), c * &Coefficient::from(k as i64));
            out.add_assign(&(xv * &rest));
        }
        for (j, &v) in m.odd().iter().enumerate() {
            if let Entry::Vacant(slot) = cache.entry(v) {
                slot.insert(on_var(&v)?);
            }
            let Some(xv) = cache[&v].as_ref() else {
                continue;
            };
            let (l, r) = m.split_odd(j);
            let sign = if p.is_odd() && j % 2 == 1 { -c } else { c.clone() };
            let left = DiffPolynomial::term(l, sign);
            let right = DiffPolynomial::term(r, Coefficient::one());
            out.add_assign(&(&(&left * xv) * &right));
        }
    }
    Ok(out)
}

fn check_index(cfg: &JetConfig, i: usize) -> Result<()> {
    if i >= cfg.n {
        return Err(Error::IndexOutOfRange { index: i, n: cfg.n });
    }
    Ok(())
}

/// `D_{x^i}` with `i` counted from zero.
pub fn total_derivative(e: &DiffPolynomial, i: usize, cfg: &JetConfig) -> Result<DiffPolynomial> {
    check_index(cfg, i)?;
    derive_with(e, Parity::Even, |v| match v.kind {
        VarKind::Base(j) => Ok((j as usize == i).then(DiffPolynomial::one)),
        _ => {
            let idx = v.idx.bump(i);
            if idx.order() > cfg.max_order {
                return Err(Error::JetOrderOverflow { order: idx.order(), limit: cfg.max_order });
            }
            Ok(Some(DiffPolynomial::var(v.with_idx(idx))))
        }
    })
}

/// `D_sigma` applied as a composition of total derivatives.
pub fn total_derivative_multi(e: &DiffPolynomial, sigma: &MultiIndex, cfg: &JetConfig) -> Result<DiffPolynomial> {
    let mut acc = e.clone();
    for i in sigma.directions() {
        if acc.is_zero() {
            break;
        }
        acc = total_derivative(&acc, i, cfg)?;
    }
    Ok(acc)
}

/// Graded partial derivative with respect to one jet variable.
pub fn partial(e: &DiffPolynomial, v: &JetVar, side: Side) -> DiffPolynomial {
    let mut out = DiffPolynomial::zero();
    for (m, c) in e.terms() {
        if v.is_odd() {
            let Ok(j) = m.odd().binary_search(v) else {
                continue;
            };
            let (l, r) = m.split_odd(j);
            let neg = match side {
                Side::Left => j % 2 == 1,
                Side::Right => (m.odd().len() - j - 1) % 2 == 1,
            };
            let Some((mm, s)) = l.mul(&r) else { continue };
            let coef = if neg != s { -c } else { c.clone() };
            out.add_term(mm, coef);
        } else {
            let k = m.exponent(v);
            if k == 0 {
                continue;
            }
            out.add_term(m.without_even(v), c * &Coefficient::from(k as i64));
        }
    }
    out
}

/// Multi-indices at which `sym` occurs in `e`.
pub fn jets_of(e: &DiffPolynomial, sym: SymbolId) -> Vec<JetVar> {
    e.variables().into_iter().filter(|v| v.sym == sym && !v.is_base()).collect()
}

/// `sum_sigma (-D)_sigma (d e / d sym_sigma)` with the chosen graded partial.
pub fn euler(e: &DiffPolynomial, sym: SymbolId, side: Side, cfg: &JetConfig) -> Result<DiffPolynomial> {
    let mut out = DiffPolynomial::zero();
    let jets = jets_of(e, sym);
    if jets.is_empty() {
        return Ok(out);
    }
    for v in jets {
        let d = partial(e, &v, side);
        if d.is_zero() {
            continue;
        }
        let t = total_derivative_multi(&d, &v.idx, cfg)?;
        if v.idx.order() % 2 == 1 {
            out = &out - &t;
        } else {
            out.add_assign(&t);
        }
    }
    Ok(out)
}

/// Left Euler operator with respect to a declared symbol.
pub fn euler_left(e: &DiffPolynomial, sym: SymbolId, ctx: &Context) -> Result<DiffPolynomial> {
    euler(e, sym, Side::Left, &ctx.jet_config())
}

pub fn euler_right(e: &DiffPolynomial, sym: SymbolId, ctx: &Context) -> Result<DiffPolynomial> {
    euler(e, sym, Side::Right, &ctx.jet_config())
}

/// True iff every Euler derivative vanishes. Densities may not mention base
/// coordinates explicitly.
pub fn is_trivial_density(e: &DiffPolynomial, ctx: &Context) -> Result<bool> {
    Ok(nontrivial_witnesses(e, ctx)?.is_empty())
}

/// Euler derivatives that fail to vanish, keyed by symbol.
pub fn nontrivial_witnesses(e: &DiffPolynomial, ctx: &Context) -> Result<Vec<(SymbolId, DiffPolynomial)>> {
    let vars = e.variables();
    if let Some(b) = vars.iter().find(|v| v.is_base()) {
        return Err(Error::ExplicitBaseDependence(ctx.info(b.sym).name.clone()));
    }
    let mut syms: Vec<SymbolId> = vars.iter().map(|v| v.sym).collect();
    syms.dedup();
    let mut out = Vec::new();
    for s in syms {
        let el = euler_left(e, s, ctx)?;
        if !el.is_zero() {
            out.push((s, el));
        }
    }
    Ok(out)
}

/// Replaces each field symbol in `map` by its image, prolonging to every jet
/// that occurs: `u_sigma -> D_sigma(image)`.
pub fn substitute(
    e: &DiffPolynomial,
    map: &BTreeMap<SymbolId, DiffPolynomial>,
    cfg: &JetConfig,
) -> Result<DiffPolynomial> {
    let mut images: BTreeMap<JetVar, DiffPolynomial> = BTreeMap::new();
    for v in e.variables() {
        if let Some(img) = map.get(&v.sym) {
            if v.is_base() {
                images.insert(v, img.clone());
            } else {
                images.insert(v, total_derivative_multi(img, &v.idx, cfg)?);
            }
        }
    }
    Ok(substitute_vars(e, &images))
}

/// Replaces individual jet variables (no prolongation).
pub fn substitute_vars(e: &DiffPolynomial, images: &BTreeMap<JetVar, DiffPolynomial>) -> DiffPolynomial {
    if images.is_empty() {
        return e.clone();
    }
    let mut out = DiffPolynomial::zero();
    for (m, c) in e.terms() {
        if !m.vars().any(|v| images.contains_key(&v)) {
            out.add_term(m.clone(), c.clone());
            continue;
        }
        let mut acc = DiffPolynomial::constant(c.clone());
        for &(v, k) in m.even() {
            let f = match images.get(&v) {
                Some(img) => img.clone(),
                None => DiffPolynomial::var(v),
            };
            for _ in 0..k {
                acc = &acc * &f;
            }
        }
        for &v in m.odd() {
            match images.get(&v) {
                Some(img) => acc = &acc * img,
                None => acc = &acc * &DiffPolynomial::var(v),
            }
        }
        out.add_assign(&acc);
    }
    out
}

/// Monomial constructor used by tests and samplers.
pub fn monomial_of(vars: &[JetVar]) -> DiffPolynomial {
    let mut m = DiffPolynomial::term(Monomial::one(), Coefficient::one());
    for v in vars {
        m = &m * &DiffPolynomial::var(*v);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::parse::parse;

    fn ctx() -> Context {
        let mut c = Context::new(&['x', 't']).unwrap();
        c.declare("u", Parity::Even).unwrap();
        c.declare("v", Parity::Even).unwrap();
        c.declare("b", Parity::Odd).unwrap();
        c.declare("c", Parity::Odd).unwrap();
        c
    }

    #[test]
    fn dx_of_odd_product() {
        let c = ctx();
        let e = parse("b*b_x", &c).unwrap();
        let d = total_derivative(&e, 0, &c.jet_config()).unwrap();
        assert_eq!(d, parse("b*b_{xx}", &c).unwrap());
    }

    #[test]
    fn mixed_derivatives_commute() {
        let c = ctx();
        let e = parse("u*u_x", &c).unwrap();
        let cfg = c.jet_config();
        let a = total_derivative(&total_derivative(&e, 1, &cfg).unwrap(), 0, &cfg).unwrap();
        let b = total_derivative(&total_derivative(&e, 0, &cfg).unwrap(), 1, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn base_coordinate_differentiates_to_one() {
        let c = ctx();
        let e = parse("x*u", &c).unwrap();
        let d = total_derivative(&e, 0, &c.jet_config()).unwrap();
        assert_eq!(d, parse("u + x*u_x", &c).unwrap());
    }

    #[test]
    fn jet_order_limit() {
        let mut c = ctx();
        c.max_jet_order = 2;
        let e = parse("u_{xx}", &c).unwrap();
        assert!(matches!(total_derivative(&e, 1, &c.jet_config()), Err(Error::JetOrderOverflow { .. })));
        assert!(total_derivative(&e, 2, &c.jet_config()).is_err());
    }

    #[test]
    fn textbook_euler() {
        let c = ctx();
        let u = c.lookup("u").unwrap();
        let e = parse("1/2*u_x^2", &c).unwrap();
        assert_eq!(euler_left(&e, u, &c).unwrap(), parse("-u_{xx}", &c).unwrap());
        assert!(euler_left(&parse("u_x", &c).unwrap(), u, &c).unwrap().is_zero());
    }

    #[test]
    fn left_and_right_partials_differ_by_sign() {
        let c = ctx();
        let b = c.var_by_name("b").unwrap();
        let e = parse("b*c", &c).unwrap();
        assert_eq!(partial(&e, &b, Side::Left), parse("c", &c).unwrap());
        assert_eq!(partial(&e, &b, Side::Right), parse("-c", &c).unwrap());
    }

    #[test]
    fn triviality() {
        let c = ctx();
        assert!(is_trivial_density(&parse("u*u_{xx} + u_x^2", &c).unwrap(), &c).unwrap());
        assert!(!is_trivial_density(&parse("u_x^2", &c).unwrap(), &c).unwrap());
        assert!(is_trivial_density(&parse("x*u", &c).unwrap(), &c).is_err());
    }

    #[test]
    fn odd_trivial_density() {
        let mut c = Context::new(&['x']).unwrap();
        c.declare("b", Parity::Odd).unwrap();
        c.declare("as", Parity::Odd).unwrap();
        let e = parse("b_x*as_x + b_{xx}*as", &c).unwrap();
        assert!(is_trivial_density(&e, &c).unwrap());
        let dx = total_derivative(&parse("b_x*as", &c).unwrap(), 0, &c.jet_config()).unwrap();
        assert_eq!(dx, e);
        let shifted = parse("b_x*as_x - b_{xx}*as", &c).unwrap();
        assert!(!is_trivial_density(&shifted, &c).unwrap());
    }

    #[test]
    fn substitution_prolongs() {
        let c = ctx();
        let u = c.lookup("u").unwrap();
        let mut map = BTreeMap::new();
        map.insert(u, parse("v^2", &c).unwrap());
        let e = parse("u_x + u", &c).unwrap();
        let got = substitute(&e, &map, &c.jet_config()).unwrap();
        assert_eq!(got, parse("2*v*v_x + v^2", &c).unwrap());
    }
}
