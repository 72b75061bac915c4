//! Hahn series as lazy memoized term streams.

mod family;
mod json;
mod ops;
mod product;
mod stream;

pub use family::{binomial_series, invert_unit, normal_form, pow_unit, sum_family, FamilyGen};
pub use json::{TermJson, TermListJson};
pub use ops::{
    add, agree_to_depth, eq_to_monomial, fragment, mul_monomial, neg, scalar_mul, sub, tail,
    truncate, v_truncate, Completion, Observation, SegmentSet,
};
pub use product::{mul, pow_nat};
pub use stream::{Budget, HahnSeries, Next, Term, TermSource, DEFAULT_BUDGET};
