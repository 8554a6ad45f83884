//! Exact graded differential-polynomial kernel.

pub mod coeff;
pub mod jet;
pub mod parse;
pub mod pde;
pub mod poly;
pub mod print;
pub mod rational;
pub mod symbol;

pub use coeff::{Coefficient, ParamId, ParamPoly};
pub use jet::{
    derive_with, euler, euler_left, euler_right, is_trivial_density, nontrivial_witnesses, partial, substitute,
    total_derivative, total_derivative_multi, JetConfig, Side,
};
pub use parse::parse;
pub use pde::{PdeSystem, Ranking, Reducer, Rule};
pub use poly::{DiffPolynomial, Monomial};
pub use print::{to_text, Show};
pub use rational::Rational;
pub use symbol::{Context, JetVar, MultiIndex, Parity, SymbolId, SymbolKind, VarKind};
