//! Generalized power series in named variables, as expression DAGs expanded
//! grade by grade.

mod blowup;
mod classify;
mod expand;
mod expr;
mod interpret;

pub use blowup::{binomial_operator, trunc_decompose_blowup, BlowupCut, BlowupPiece, TruncDecomposition};
pub use classify::PROBE_WIDTH;
pub use expr::{
    degree, exp_of, exps_add, exps_scale, exps_string, poly_string, single, Exps, FragmentSpec, Gps, Kind, Meta,
    NormalForm, Poly,
};
pub use interpret::interpret;

#[cfg(test)]
mod tests;
