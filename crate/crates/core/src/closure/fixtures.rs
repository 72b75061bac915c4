use std::sync::Arc;

use super::generate::{generate, ClosureConfig, GeneratedSet};
use super::language::LanguageF;
use crate::error::Result;
use crate::hahn::HahnSeries;
use crate::order::{Monomial, MonomialGroup};
use crate::rational;

/// A named closure problem and the verdict it should get.
pub struct Fixture {
    pub name: &'static str,
    pub group: Arc<MonomialGroup>,
    pub x: Vec<(String, HahnSeries)>,
    pub language: LanguageF,
    pub expect_closed: bool,
}

impl Fixture {
    pub fn generate(&self, config: ClosureConfig) -> Result<GeneratedSet> {
        generate(&self.group, self.x.clone(), &self.language, config)
    }
}

fn series(group: &Arc<MonomialGroup>, terms: &[(&[(i64, i64)], i64)]) -> Result<HahnSeries> {
    let mut v = Vec::new();
    for (e, c) in terms {
        v.push((Monomial::from_ratios(group, e)?, rational::ratio(*c, 1)));
    }
    HahnSeries::from_terms(group, v)
}

/// `X = {t + tu, t}` over `u ≺ t`.
fn rank_two_x(group: &Arc<MonomialGroup>) -> Result<Vec<(String, HahnSeries)>> {
    Ok(vec![
        ("x0".into(), series(group, &[(&[(0, 1), (1, 1)], 1), (&[(1, 1), (1, 1)], 1)])?),
        ("x1".into(), series(group, &[(&[(0, 1), (1, 1)], 1)])?),
    ])
}

pub fn standard_fixtures() -> Result<Vec<Fixture>> {
    let t = MonomialGroup::new(&["t"])?;
    let ut = MonomialGroup::new(&["u", "t"])?;
    Ok(vec![
        Fixture {
            name: "rank_one",
            group: t.clone(),
            x: vec![],
            language: LanguageF::standard()?,
            expect_closed: true,
        },
        Fixture {
            name: "rank_two",
            group: ut.clone(),
            x: rank_two_x(&ut)?,
            language: LanguageF::standard()?,
            expect_closed: true,
        },
    ])
}

/// Standard generators without renormalized derivatives: Case 1 witnesses
/// need derivative atoms, which the oracle then refuses.
pub fn adversarial_fixture() -> Result<Fixture> {
    let ut = MonomialGroup::new(&["u", "t"])?;
    let mut language = LanguageF::standard()?;
    language.flags.renorm_derivative = false;
    Ok(Fixture {
        name: "no_derivatives",
        group: ut.clone(),
        x: rank_two_x(&ut)?,
        language,
        expect_closed: false,
    })
}
