use super::expr::{single, FragmentSpec, Gps};
use crate::error::Result;
use crate::hahn::Budget;
use crate::order::Segment;
use crate::rational::{self, Rational};

/// Which segment of a blow-up is truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlowupCut {
    /// Exponent of `z0` below `α`.
    S0(Rational),
    /// Exponent of `z1` below `n`.
    S1(u32),
}

/// One summand `z1^m k^(-m) h_m(z0)` of a truncated affine blow-up.
#[derive(Clone, Debug)]
pub struct BlowupPiece {
    pub m: u32,
    pub scale: Rational,
    pub h: Gps,
}

/// Explicit finite form of a truncated blow-up `f(z0 (z1 + k), y) | S`.
#[derive(Clone, Debug)]
pub enum TruncDecomposition {
    /// `Σ_{m<n} z1^m k^(-m) h_m`, with `h_m = binom(x∂x, m) f` at `x := k z0`.
    Pieces { z1: String, pieces: Vec<BlowupPiece> },
    /// The blow-up of `h = f | {γ_x < α}`.
    Fragment { h: Gps },
}

/// `binom(x∂x, m) f = (1/m!) Π_{j<m} (x∂x − j) f`, which scales `c x^α` by `binom(α, m)`.
pub fn binomial_operator(f: &Gps, x: &str, m: u32) -> Result<Gps> {
    if !f.vars().contains(x) {
        return Ok(if m == 0 { f.clone() } else { Gps::zero() });
    }
    let mut acc = f.clone();
    for j in 0..m {
        let d = acc.renorm_derivative(x)?;
        acc = d.sub(&acc.scale(rational::int(j as i64)));
    }
    Ok(acc.scale(rational::factorial(m).recip()))
}

/// Splits a truncation of `blowup_affine(f, x, z0, z1, k)` into an explicit sum.
pub fn trunc_decompose_blowup(
    f: &Gps,
    x: &str,
    z0: &str,
    z1: &str,
    k: &Rational,
    cut: &BlowupCut,
    budget: &Budget,
) -> Result<TruncDecomposition> {
    match cut {
        BlowupCut::S0(alpha) => {
            let seg = Segment {
                lower: std::ops::Bound::Unbounded,
                upper: std::ops::Bound::Excluded(alpha.clone()),
            };
            Ok(TruncDecomposition::Fragment {
                h: f.fragment(FragmentSpec::Var { var: x.into(), seg }),
            })
        }
        BlowupCut::S1(n) => {
            let kz0 = Gps::monomial(&[z0], single(z0, rational::int(1)), k.clone())?;
            let mut pieces = Vec::new();
            for m in 0..*n {
                let hm = binomial_operator(f, x, m)?;
                let h = hm.compose_pcomp(x, &kz0, budget)?;
                let scale = num_traits::pow(k.recip(), m as usize);
                pieces.push(BlowupPiece { m, scale, h });
            }
            Ok(TruncDecomposition::Pieces { z1: z1.into(), pieces })
        }
    }
}

impl TruncDecomposition {
    /// The series the decomposition denotes, for checking against the fragment.
    pub fn assemble(&self, x: &str, z0: &str, z1: &str, k: &Rational) -> Result<Gps> {
        match self {
            TruncDecomposition::Fragment { h } => h.blowup_affine(x, z0, z1, k.clone()),
            TruncDecomposition::Pieces { z1, pieces } => {
                let mut terms = Vec::new();
                for p in pieces {
                    let t = p
                        .h
                        .monomial_multiply(&single(z1, rational::int(p.m as i64)))?
                        .scale(p.scale.clone());
                    terms.push(t);
                }
                Ok(if terms.is_empty() { Gps::zero() } else { Gps::sum(terms) })
            }
        }
    }

    /// The fragment of the blow-up that this decomposition should equal.
    pub fn target(f: &Gps, x: &str, z0: &str, z1: &str, k: &Rational, cut: &BlowupCut) -> Result<Gps> {
        let b = f.blowup_affine(x, z0, z1, k.clone())?;
        let (var, bound) = match cut {
            BlowupCut::S0(a) => (z0, a.clone()),
            BlowupCut::S1(n) => (z1, rational::int(*n as i64)),
        };
        let seg = Segment {
            lower: std::ops::Bound::Unbounded,
            upper: std::ops::Bound::Excluded(bound),
        };
        Ok(b.fragment(FragmentSpec::Var { var: var.into(), seg }))
    }
}
