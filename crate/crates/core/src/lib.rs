//! Phase-space (Wehrl) entropy production and flux for open spin systems.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod hypergeom;
pub mod phase_space;
pub mod rates;
pub mod scenarios;
pub mod spin;

pub use error::{Error, Result};
