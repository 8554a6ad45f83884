//! Graded symbols, multi-indices and jet variables, plus the symbol table.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use super::coeff::ParamId;
use crate::error::{Error, Result};

pub const MAX_BASE_DIM: usize = 6;
pub const DEFAULT_MAX_JET_ORDER: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Parity {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn bit(self) -> u8 {
        self as u8
    }

    pub fn flip(self) -> Parity {
        Parity::from_bit(!self.is_odd())
    }
}

impl core::ops::Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() != rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.is_odd() { "odd" } else { "even" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u16);

/// Orders of differentiation along each base direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(pub [u8; MAX_BASE_DIM]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0; MAX_BASE_DIM]);

    pub fn unit(i: usize) -> MultiIndex {
        let mut m = MultiIndex::ZERO;
        m.0[i] = 1;
        m
    }

    pub fn from_slice(s: &[u8]) -> MultiIndex {
        let mut m = MultiIndex::ZERO;
        m.0[..s.len()].copy_from_slice(s);
        m
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&k| k as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn bump(&self, i: usize) -> MultiIndex {
        let mut m = *self;
        m.0[i] += 1;
        m
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(other.0.iter()) {
            *a += *b;
        }
        m
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut m = *self;
        for (a, b) in m.0.iter_mut().zip(other.0.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(m)
    }

    /// Sequence of base directions whose product of total derivatives is `D_self`.
    pub fn directions(&self) -> Vec<usize> {
        let mut v = Vec::with_capacity(self.order() as usize);
        for (i, &k) in self.0.iter().enumerate() {
            for _ in 0..k {
                v.push(i);
            }
        }
        v
    }

    /// All multi-indices of order exactly `k` in `n` directions.
    pub fn all_of_order(n: usize, k: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = [0u8; MAX_BASE_DIM];
        fn rec(i: usize, n: usize, left: u32, cur: &mut [u8; MAX_BASE_DIM], out: &mut Vec<MultiIndex>) {
            if i + 1 == n {
                cur[i] = left as u8;
                out.push(MultiIndex(*cur));
                cur[i] = 0;
                return;
            }
            for k in 0..=left {
                cur[i] = k as u8;
                rec(i + 1, n, left - k, cur, out);
            }
            cur[i] = 0;
        }
        if n == 0 {
            if k == 0 {
                out.push(MultiIndex::ZERO);
            }
            return out;
        }
        rec(0, n, k, &mut cur, &mut out);
        out
    }
}

/// What a variable is: a graded fibre coordinate or a base coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Even,
    Odd,
    Base(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVar {
    pub sym: SymbolId,
    pub kind: VarKind,
    pub idx: MultiIndex,
}

impl JetVar {
    pub fn new(sym: SymbolId, parity: Parity, idx: MultiIndex) -> JetVar {
        let kind = if parity.is_odd() { VarKind::Odd } else { VarKind::Even };
        JetVar { sym, kind, idx }
    }

    pub fn parity(&self) -> Parity {
        Parity::from_bit(self.kind == VarKind::Odd)
    }

    pub fn is_odd(&self) -> bool {
        self.kind == VarKind::Odd
    }

    pub fn is_base(&self) -> bool {
        matches!(self.kind, VarKind::Base(_))
    }

    pub fn with_idx(&self, idx: MultiIndex) -> JetVar {
        JetVar { idx, ..*self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Field,
    Base(u8),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolInfo {
    pub name: String,
    pub parity: Parity,
    pub kind: SymbolKind,
}

/// Symbol table shared by parsing, printing and the jet calculus.
#[derive(Clone, Debug)]
pub struct Context {
    base: Vec<char>,
    symbols: Vec<SymbolInfo>,
    params: Vec<String>,
    imaginary: Option<String>,
    pub max_jet_order: u32,
}

impl Context {
    /// Creates a context over base coordinates with single-letter names.
    pub fn new(base: &[char]) -> Result<Context> {
        if base.len() > MAX_BASE_DIM {
            return Err(Error::IndexOutOfRange { index: base.len(), n: MAX_BASE_DIM });
        }
        let mut ctx = Context {
            base: base.to_vec(),
            symbols: Vec::new(),
            params: Vec::new(),
            imaginary: None,
            max_jet_order: DEFAULT_MAX_JET_ORDER,
        };
        for (i, c) in base.iter().enumerate() {
            if !c.is_ascii_alphabetic() || base[..i].contains(c) {
                return Err(Error::Parse { pos: 0, msg: alloc::format!("bad base coordinate name `{c}`") });
            }
            ctx.symbols.push(SymbolInfo { name: c.to_string(), parity: Parity::Even, kind: SymbolKind::Base(i as u8) });
        }
        Ok(ctx)
    }

    /// Default base names: `x` for n = 1, `x t` for n = 2, `x y z` for n = 3,
    /// `x1..` style letters beyond that.
    pub fn default_base(n: usize) -> Vec<char> {
        match n {
            0 => Vec::new(),
            1 => alloc::vec!['x'],
            2 => alloc::vec!['x', 't'],
            3 => alloc::vec!['x', 'y', 'z'],
            _ => ['x', 'y', 'z', 'w', 'v', 's'][..n.min(MAX_BASE_DIM)].to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn base_names(&self) -> &[char] {
        &self.base
    }

    fn name_taken(&self, name: &str) -> bool {
        self.symbols.iter().any(|s| s.name == name)
            || self.params.iter().any(|p| p == name)
            || self.imaginary.as_deref() == Some(name)
    }

    fn check_ident(name: &str) -> Result<()> {
        let mut cs = name.chars();
        let ok = cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric());
        if ok {
            Ok(())
        } else {
            Err(Error::Parse { pos: 0, msg: alloc::format!("bad identifier `{name}`") })
        }
    }

    /// Declares a dependent field; returns its id. Re-declaring with the same
    /// parity returns the existing id.
    pub fn declare(&mut self, name: &str, parity: Parity) -> Result<SymbolId> {
        Self::check_ident(name)?;
        if let Some(id) = self.lookup(name) {
            let info = &self.symbols[id.0 as usize];
            if info.kind == SymbolKind::Field && info.parity == parity {
                return Ok(id);
            }
        }
        if self.name_taken(name) {
            return Err(Error::Parse { pos: 0, msg: alloc::format!("`{name}` is already declared") });
        }
        self.symbols.push(SymbolInfo { name: name.to_string(), parity, kind: SymbolKind::Field });
        Ok(SymbolId((self.symbols.len() - 1) as u16))
    }

    pub fn declare_param(&mut self, name: &str) -> Result<ParamId> {
        Self::check_ident(name)?;
        if let Some(p) = self.param(name) {
            return Ok(p);
        }
        if self.name_taken(name) {
            return Err(Error::Parse { pos: 0, msg: alloc::format!("`{name}` is already declared") });
        }
        self.params.push(name.to_string());
        Ok(ParamId((self.params.len() - 1) as u16))
    }

    /// Declares the formal imaginary unit under the given name.
    pub fn declare_imaginary(&mut self, name: &str) -> Result<ParamId> {
        Self::check_ident(name)?;
        if self.imaginary.as_deref() == Some(name) {
            return Ok(ParamId::IMAGINARY);
        }
        if self.name_taken(name) || self.imaginary.is_some() {
            return Err(Error::Parse { pos: 0, msg: alloc::format!("`{name}` is already declared") });
        }
        self.imaginary = Some(name.to_string());
        Ok(ParamId::IMAGINARY)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s.name == name).map(|i| SymbolId(i as u16))
    }

    pub fn param(&self, name: &str) -> Option<ParamId> {
        if self.imaginary.as_deref() == Some(name) {
            return Some(ParamId::IMAGINARY);
        }
        self.params.iter().position(|p| p == name).map(|i| ParamId(i as u16))
    }

    pub fn param_name(&self, p: ParamId) -> &str {
        if p == ParamId::IMAGINARY {
            return self.imaginary.as_deref().unwrap_or("i");
        }
        &self.params[p.0 as usize]
    }

    pub fn info(&self, id: SymbolId) -> &SymbolInfo {
        &self.symbols[id.0 as usize]
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &SymbolInfo)> {
        self.symbols.iter().enumerate().map(|(i, s)| (SymbolId(i as u16), s))
    }

    pub fn fields(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbols().filter(|(_, s)| s.kind == SymbolKind::Field).map(|(id, _)| id)
    }

    /// The order-zero jet variable of a declared symbol.
    pub fn var(&self, id: SymbolId) -> JetVar {
        self.jet(id, MultiIndex::ZERO)
    }

    pub fn jet(&self, id: SymbolId, idx: MultiIndex) -> JetVar {
        let info = self.info(id);
        match info.kind {
            SymbolKind::Base(i) => JetVar { sym: id, kind: VarKind::Base(i), idx: MultiIndex::ZERO },
            SymbolKind::Field => JetVar::new(id, info.parity, idx),
        }
    }

    pub fn var_by_name(&self, name: &str) -> Option<JetVar> {
        self.lookup(name).map(|id| self.var(id))
    }

    pub fn base_var(&self, i: usize) -> JetVar {
        self.var(SymbolId(i as u16))
    }

    pub fn jet_config(&self) -> super::jet::JetConfig {
        super::jet::JetConfig { n: self.n(), max_order: self.max_jet_order }
    }
}
