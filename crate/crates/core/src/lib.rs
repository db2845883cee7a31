//! Exact p-adic arithmetic at finite precision, the special functions and
//! sequences built on it, subtract-and-shear coefficient extraction from
//! `k^(p^n)`, and deterministic digit-grid images.

pub mod analysis;
pub mod arith;
pub mod error;
pub mod grid;
pub mod padic;
pub mod record;
pub mod sequence;
pub mod shear;
pub mod verify;

pub use error::{Error, Result};
pub use padic::{valuation_and_norm, PadicApprox, PadicScalar, Valuation};
