//! Generated sets over a language of series and checks that they are closed
//! under truncation.

mod check;
mod fixtures;
mod generate;
mod language;
#[cfg(test)]
mod tests;

pub use check::{check_truncation_closed, Checker, ClosureReport, ElemWitness, Entry, Stats, Status};
pub use fixtures::{adversarial_fixture, standard_fixtures, Fixture};
pub use generate::{check_x_closed, generate, probe_points, support, ClosureConfig, ElemExpr, Element, GeneratedSet};
pub use language::{make_fb, make_fm, Flags, Instance, LanguageF};
