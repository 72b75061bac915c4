use serde::{Deserialize, Serialize};

use super::ops::{Completion, Observation};
use super::stream::Term;
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<String>,
    pub coeff: String,
}

impl From<&Term> for TermJson {
    fn from(t: &Term) -> Self {
        TermJson {
            exponents: t.monomial.exponents().iter().map(rational::fmt).collect(),
            coeff: rational::fmt(&t.coeff),
        }
    }
}

/// Serialized term list; `exhausted` is true when the stream is known to end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermListJson {
    pub terms: Vec<TermJson>,
    pub exhausted: bool,
}

impl From<&Observation> for TermListJson {
    fn from(o: &Observation) -> Self {
        TermListJson {
            terms: o.terms.iter().map(TermJson::from).collect(),
            exhausted: o.completion == Completion::Ended,
        }
    }
}
