//! Seeded random inputs for the randomized checks.

use algebroid_core::liealg::LieAlgebra;
use algebroid_core::symkernel::{Coefficient, Context, DiffPolynomial, JetVar, MultiIndex, Parity, SymbolId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Size limits of a random polynomial.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub terms: usize,
    pub degree: u32,
    pub jet_order: u32,
}

impl Default for Shape {
    fn default() -> Shape {
        Shape { terms: 3, degree: 2, jet_order: 2 }
    }
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Nonzero integer in `[-bound, bound]`.
    pub fn nonzero_int(&mut self, bound: i64) -> i64 {
        let v = self.rng.random_range(1..=bound);
        if self.rng.random_bool(0.5) {
            -v
        } else {
            v
        }
    }

    pub fn multi_index(&mut self, n: usize, max_order: u32) -> MultiIndex {
        let mut idx = MultiIndex::ZERO;
        if n == 0 {
            return idx;
        }
        let order = self.rng.random_range(0..=max_order);
        for _ in 0..order {
            idx = idx.bump(self.below(n));
        }
        idx
    }

    pub fn jet_var(&mut self, ctx: &Context, sym: SymbolId, max_order: u32) -> JetVar {
        ctx.jet(sym, self.multi_index(ctx.n(), max_order))
    }

    pub fn monomial(&mut self, ctx: &Context, syms: &[SymbolId], shape: Shape) -> DiffPolynomial {
        let deg = self.rng.random_range(1..=shape.degree.max(1));
        let mut m = DiffPolynomial::int(self.nonzero_int(3));
        for _ in 0..deg {
            let s = syms[self.below(syms.len())];
            m = &m * &DiffPolynomial::var(self.jet_var(ctx, s, shape.jet_order));
        }
        m
    }

    /// Sum of up to `shape.terms` random monomials; may be zero.
    pub fn poly(&mut self, ctx: &Context, syms: &[SymbolId], shape: Shape) -> DiffPolynomial {
        let terms = self.rng.random_range(1..=shape.terms.max(1));
        let mut p = DiffPolynomial::zero();
        for _ in 0..terms {
            p.add_assign(&self.monomial(ctx, syms, shape));
        }
        p
    }

    /// Nonzero polynomial all of whose terms have the given parity.
    pub fn homogeneous(&mut self, ctx: &Context, syms: &[SymbolId], shape: Shape, parity: Parity) -> DiffPolynomial {
        loop {
            let mut p = DiffPolynomial::zero();
            let mut tries = 0;
            while p.len() < shape.terms && tries < 8 * shape.terms {
                tries += 1;
                let m = self.monomial(ctx, syms, shape);
                if m.parity() == Some(parity) {
                    p.add_assign(&m);
                }
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    pub fn vector(&mut self, ctx: &Context, syms: &[SymbolId], shape: Shape, dim: usize) -> Vec<DiffPolynomial> {
        (0..dim).map(|_| self.poly(ctx, syms, shape)).collect()
    }

    /// Copy of `g` with one structure constant perturbed so that Jacobi fails.
    pub fn corrupt(&mut self, g: &LieAlgebra) -> LieAlgebra {
        let d = g.dim();
        loop {
            let mut h = g.clone();
            let k = self.below(d);
            let i = self.below(d);
            let j = self.below(d);
            if i == j {
                continue;
            }
            let delta = Coefficient::from(self.nonzero_int(2));
            let v = h.c(k, i, j) + &delta;
            h.set_c(k, j, i, -&v);
            h.set_c(k, i, j, v);
            if !h.validate().jacobi.is_empty() {
                h.name = format!("{}~c{}_{}{}", g.name, k + 1, i + 1, j + 1);
                return h;
            }
        }
    }
}
