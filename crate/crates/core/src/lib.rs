//! Exact Hahn series, generalized power series over rational exponent lattices,
//! restricted power series, and constructive truncation-closure witnesses.

pub mod closure;
pub mod dsl;
pub mod error;
pub mod gps;
pub mod hahn;
pub mod order;
pub mod rational;
pub mod rps;

pub use error::{Error, Result};
