//! Graded symbolic engine for zero-curvature representations, variational Lie
//! algebroids and the BV master equation. Everything here is exact and
//! allocation-only; IO lives in the companion CLI crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

pub mod algebroid;
pub mod bv;
pub mod error;
pub mod gforms;
pub mod liealg;
pub mod symkernel;
pub mod zcr;

pub use error::{Error, Result};
