//! PDE systems in solved form and reduction to normal form on the equation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::jet::{total_derivative, JetConfig};
use super::poly::DiffPolynomial;
use super::symbol::{Context, JetVar, MultiIndex};
use crate::error::{Error, Result};

pub const DEFAULT_STEP_LIMIT: usize = 100_000;

#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: JetVar,
    pub rhs: DiffPolynomial,
}

/// Ranking on jet variables: weighted order first (if weights are given),
/// then elimination order with the last base direction most significant.
#[derive(Clone, Debug, Default)]
pub struct Ranking {
    pub weights: Option<Vec<u32>>,
}

impl Ranking {
    fn key(&self, v: &JetVar) -> (u64, [u8; super::symbol::MAX_BASE_DIM], u16) {
        let w = match &self.weights {
            Some(ws) => v.idx.0.iter().zip(ws.iter()).map(|(&k, &w)| k as u64 * w as u64).sum(),
            None => 0,
        };
        let mut rev = v.idx.0;
        rev.reverse();
        (w, rev, v.sym.0)
    }

    pub fn cmp(&self, a: &JetVar, b: &JetVar) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }
}

#[derive(Clone, Debug)]
pub struct PdeSystem {
    pub rules: Vec<Rule>,
    pub ranking: Ranking,
    pub step_limit: usize,
}

fn prolongs(v: &JetVar, lead: &JetVar) -> Option<MultiIndex> {
    if v.sym != lead.sym || v.is_base() {
        return None;
    }
    v.idx.checked_sub(&lead.idx)
}

impl PdeSystem {
    /// Validates the solved, triangular form of the rules.
    pub fn new(rules: Vec<Rule>, ranking: Ranking) -> Result<PdeSystem> {
        for (i, r) in rules.iter().enumerate() {
            if r.lhs.is_base() {
                return Err(Error::InvalidSystem(format!("rule {i}: left side is a base coordinate")));
            }
            for (j, other) in rules.iter().enumerate() {
                if i != j && (prolongs(&r.lhs, &other.lhs).is_some()) {
                    return Err(Error::InvalidSystem(format!(
                        "rule {i}: leading variable is a prolongation of rule {j}"
                    )));
                }
            }
            for v in r.rhs.variables() {
                if let Some(j) = rules.iter().position(|o| prolongs(&v, &o.lhs).is_some()) {
                    return Err(Error::InvalidSystem(format!(
                        "rule {i}: right side contains a leading variable (or its prolongation) of rule {j}"
                    )));
                }
                if !v.is_base() && ranking.cmp(&v, &r.lhs) != Ordering::Less {
                    return Err(Error::InvalidSystem(format!("rule {i}: right side is not lower in the ranking")));
                }
            }
        }
        Ok(PdeSystem { rules, ranking, step_limit: DEFAULT_STEP_LIMIT })
    }

    /// Parses rules given as `(leading jet, right-hand side)` texts.
    pub fn parse(rules: &[(&str, &str)], ctx: &Context, ranking: Ranking) -> Result<PdeSystem> {
        let mut out = Vec::new();
        for (lhs, rhs) in rules {
            let l = super::parse::parse(lhs, ctx)?;
            let lead = match l.terms().next() {
                Some((m, c)) if l.len() == 1 && c.is_one() && m.degree() == 1 => m.vars().next().unwrap(),
                _ => return Err(Error::InvalidSystem(format!("`{lhs}` is not a single jet variable"))),
            };
            out.push(Rule { lhs: lead, rhs: super::parse::parse(rhs, ctx)? });
        }
        PdeSystem::new(out, ranking)
    }

    pub fn reducer(&self, cfg: JetConfig) -> Reducer<'_> {
        Reducer { sys: self, cfg, memo: BTreeMap::new(), steps: 0 }
    }

    /// One-shot reduction.
    pub fn reduce(&self, e: &DiffPolynomial, cfg: JetConfig) -> Result<DiffPolynomial> {
        self.reducer(cfg).reduce(e)
    }
}

/// Memoizing reducer; keep one alive across many reductions against the same
/// system to reuse normal forms of jet variables.
pub struct Reducer<'a> {
    sys: &'a PdeSystem,
    cfg: JetConfig,
    memo: BTreeMap<JetVar, Option<DiffPolynomial>>,
    steps: usize,
}

impl Reducer<'_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.sys.step_limit {
            return Err(Error::ReductionLimit { steps: self.sys.step_limit });
        }
        Ok(())
    }

    /// Normal form of a single jet variable, `None` if already irreducible.
    fn normal_form(&mut self, v: &JetVar) -> Result<Option<DiffPolynomial>> {
        if let Some(nf) = self.memo.get(v) {
            return Ok(nf.clone());
        }
        self.tick()?;
        let mut found = None;
        for r in &self.sys.rules {
            if let Some(rest) = prolongs(v, &r.lhs) {
                found = Some((r.clone(), rest));
                break;
            }
        }
        let nf = match found {
            None => None,
            Some((r, rest)) if rest.is_zero() => Some(self.reduce(&r.rhs)?),
            Some((_, rest)) => {
                let i = rest.0.iter().rposition(|&k| k > 0).unwrap();
                let mut lower = v.idx;
                lower.0[i] -= 1;
                let below = self.normal_form(&v.with_idx(lower))?.expect("prolongation of a leading variable reduces");
                let d = total_derivative(&below, i, &self.cfg)?;
                Some(self.reduce(&d)?)
            }
        };
        self.memo.insert(*v, nf.clone());
        Ok(nf)
    }

    pub fn reduce(&mut self, e: &DiffPolynomial) -> Result<DiffPolynomial> {
        let mut images = BTreeMap::new();
        for v in e.variables() {
            if let Some(nf) = self.normal_form(&v)? {
                images.insert(v, nf);
            }
        }
        self.tick()?;
        Ok(super::jet::substitute_vars(e, &images))
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
        c
    }

    #[test]
    fn transport_equation() {
        let c = ctx();
        let sys = PdeSystem::parse(&[("u_t", "u_x")], &c, Ranking::default()).unwrap();
        let cfg = c.jet_config();
        assert!(sys.reduce(&parse("u_t - u_x", &c).unwrap(), cfg).unwrap().is_zero());
        assert_eq!(sys.reduce(&parse("u_{tx}", &c).unwrap(), cfg).unwrap(), parse("u_{xx}", &c).unwrap());
        assert_eq!(sys.reduce(&parse("u_{tt}*b_t", &c).unwrap(), cfg).unwrap(), parse("u_{xx}*b_t", &c).unwrap());
    }

    #[test]
    fn kdv_reduces_to_zero() {
        let c = ctx();
        let sys = PdeSystem::parse(&[("u_t", "-1/2*u_{xxx} + 3*u*u_x")], &c, Ranking::default()).unwrap();
        let e = parse("u_t + 1/2*u_{xxx} - 3*u*u_x", &c).unwrap();
        assert!(sys.reduce(&e, c.jet_config()).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_triangular() {
        let c = ctx();
        assert!(PdeSystem::parse(&[("u_t", "u_{xt}")], &c, Ranking::default()).is_err());
        assert!(PdeSystem::parse(&[("u_x", "u_t")], &c, Ranking::default()).is_err());
        assert!(PdeSystem::parse(&[("u_x + u", "u_t")], &c, Ranking::default()).is_err());
    }

    #[test]
    fn step_limit_is_reported() {
        let c = ctx();
        let mut sys = PdeSystem::parse(&[("u_t", "u_x")], &c, Ranking::default()).unwrap();
        sys.step_limit = 3;
        let e = parse("u_{tttttt}", &c).unwrap();
        assert!(matches!(sys.reduce(&e, c.jet_config()), Err(Error::ReductionLimit { .. })));
    }
}
