use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A finite-rank lexicographically ordered group of monomials `g_0^a_0 ... g_{n-1}^a_{n-1}`.
///
/// Generators are listed by decreasing size and are all infinitesimal, so
/// `g_0` sits in the coarsest archimedean class.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct MonomialGroup {
    names: Vec<String>,
}

impl MonomialGroup {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        if names.is_empty() {
            return Err(Error::Invalid("monomial group needs a generator".into()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Invalid(format!("duplicate generator {n}")));
            }
        }
        Ok(Arc::new(MonomialGroup { names }))
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn same(a: &Arc<Self>, b: &Arc<Self>) -> bool {
        Arc::ptr_eq(a, b) || a.names == b.names
    }

    pub fn check(a: &Arc<Self>, b: &Arc<Self>) -> Result<()> {
        if Self::same(a, b) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(a.names.join(">"), b.names.join(">")))
        }
    }
}

/// Natural valuation of a monomial: the index of its archimedean class.
/// Larger index means a finer class; the identity has class `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArchClass {
    Finite(usize),
    Infinity,
}

impl fmt::Display for ArchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArchClass::Finite(i) => write!(f, "{i}"),
            ArchClass::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone)]
pub struct Monomial {
    group: Arc<MonomialGroup>,
    exps: Vec<Rational>,
}

impl Monomial {
    pub fn identity(group: &Arc<MonomialGroup>) -> Self {
        Monomial {
            group: group.clone(),
            exps: vec![Rational::zero(); group.rank()],
        }
    }

    pub fn generator(group: &Arc<MonomialGroup>, i: usize) -> Self {
        let mut m = Self::identity(group);
        m.exps[i] = rational::int(1);
        m
    }

    pub fn new(group: &Arc<MonomialGroup>, exps: Vec<Rational>) -> Result<Self> {
        if exps.len() != group.rank() {
            return Err(Error::Invalid(format!(
                "expected {} exponents, got {}",
                group.rank(),
                exps.len()
            )));
        }
        Ok(Monomial {
            group: group.clone(),
            exps,
        })
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(group: &Arc<MonomialGroup>, exps: &[(i64, i64)]) -> Result<Self> {
        Self::new(group, exps.iter().map(|&(n, d)| rational::ratio(n, d)).collect())
    }

    pub fn group(&self) -> &Arc<MonomialGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[Rational] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert!(MonomialGroup::same(&self.group, &other.group));
        Monomial {
            group: self.group.clone(),
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            group: self.group.clone(),
            exps: self.exps.iter().map(|a| -a).collect(),
        }
    }

    pub fn pow(&self, lambda: &Rational) -> Monomial {
        Monomial {
            group: self.group.clone(),
            exps: self.exps.iter().map(|a| a * lambda).collect(),
        }
    }

    pub fn arch_class(&self) -> ArchClass {
        self.exps
            .iter()
            .position(|e| !e.is_zero())
            .map_or(ArchClass::Infinity, ArchClass::Finite)
    }

    /// `self` and `other` differ by a monomial of class strictly finer than `v`.
    pub fn asymptotic(&self, other: &Monomial, v: ArchClass) -> bool {
        match v {
            ArchClass::Infinity => self.exps == other.exps,
            ArchClass::Finite(i) => self.exps[..=i] == other.exps[..=i],
        }
    }

    pub fn cmp_checked(&self, other: &Monomial) -> Result<Ordering> {
        MonomialGroup::check(&self.group, &other.group)?;
        Ok(self.cmp(other))
    }
}

/// Order on monomials, checking that both come from the same group.
pub fn cmp_monomial(a: &Monomial, b: &Monomial) -> Result<Ordering> {
    a.cmp_checked(b)
}

pub fn arch_class(m: &Monomial) -> ArchClass {
    m.arch_class()
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    // a larger exponent of an infinitesimal generator gives a smaller monomial
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert!(MonomialGroup::same(&self.group, &other.group));
        for (a, b) in self.exps.iter().zip(&other.exps) {
            match b.cmp(a) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

pub(crate) fn fmt_power(name: &str, e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        format!("{name}^{}", rational::fmt(e))
    } else {
        format!("{name}^({})", rational::fmt(e))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .group
            .names()
            .iter()
            .zip(&self.exps)
            .filter(|(_, e)| !e.is_zero())
            .map(|(n, e)| fmt_power(n, e))
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ut() -> Arc<MonomialGroup> {
        MonomialGroup::new(&["u", "t"]).unwrap()
    }

    #[test]
    fn lex_order_examples() {
        let g = ut();
        let one = Monomial::identity(&g);
        let u = Monomial::from_ratios(&g, &[(1, 1), (0, 1)]).unwrap();
        let t = Monomial::from_ratios(&g, &[(0, 1), (1, 1)]).unwrap();
        let t_inv = Monomial::from_ratios(&g, &[(0, 1), (-1, 1)]).unwrap();
        assert_eq!(cmp_monomial(&one, &one).unwrap(), Ordering::Equal);
        assert_eq!(cmp_monomial(&u, &t).unwrap(), Ordering::Less);
        assert_eq!(cmp_monomial(&t_inv, &one).unwrap(), Ordering::Greater);
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = Monomial::identity(&ut());
        let b = Monomial::identity(&MonomialGroup::new(&["x"]).unwrap());
        assert!(matches!(cmp_monomial(&a, &b), Err(Error::GroupMismatch(..))));
    }

    #[test]
    fn classes() {
        let g = ut();
        assert_eq!(Monomial::identity(&g).arch_class(), ArchClass::Infinity);
        let m = Monomial::from_ratios(&g, &[(2, 1), (-5, 1)]).unwrap();
        assert_eq!(m.arch_class(), ArchClass::Finite(0));
        let m = Monomial::from_ratios(&g, &[(0, 1), (1, 3)]).unwrap();
        assert_eq!(m.arch_class(), ArchClass::Finite(1));
    }

    #[test]
    fn display() {
        let g = ut();
        let m = Monomial::from_ratios(&g, &[(2, 1), (-1, 2)]).unwrap();
        assert_eq!(m.to_string(), "u^2*t^(-1/2)");
        assert_eq!(Monomial::identity(&g).to_string(), "1");
    }
}
