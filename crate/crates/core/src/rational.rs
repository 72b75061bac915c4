//! Exact rational helpers shared by every engine.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    Rational::from_str(s)
        .map_err(|_| Error::Invalid(format!("bad rational literal {s:?}")))
        .and_then(|r| {
            if r.denom().is_zero() {
                Err(Error::Invalid("zero denominator".into()))
            } else {
                Ok(r)
            }
        })
}

/// Canonical `p/q` (or `p` when q = 1).
pub fn fmt(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn is_natural(r: &Rational) -> bool {
    r.is_integer() && !r.is_negative()
}

/// Exact `k^e`, or an error when the result leaves the rationals.
pub fn pow(k: &Rational, e: &Rational) -> Result<Rational> {
    if e.is_zero() {
        return Ok(Rational::one());
    }
    if k.is_zero() {
        return if e.is_positive() {
            Ok(Rational::zero())
        } else {
            Err(Error::Invalid("zero raised to a non-positive power".into()))
        };
    }
    let q = e
        .denom()
        .to_u32()
        .ok_or_else(|| Error::Irrational(format!("{}^{}", fmt(k), fmt(e))))?;
    let base = if q == 1 {
        k.clone()
    } else {
        if k.is_negative() {
            return Err(Error::Irrational(format!("{}^{}", fmt(k), fmt(e))));
        }
        let n = k.numer().nth_root(q);
        let d = k.denom().nth_root(q);
        if num_traits::pow(n.clone(), q as usize) != *k.numer()
            || num_traits::pow(d.clone(), q as usize) != *k.denom()
        {
            return Err(Error::Irrational(format!("{}^{}", fmt(k), fmt(e))));
        }
        Rational::new(n, d)
    };
    let p = e.numer();
    let mag = p
        .abs()
        .to_usize()
        .ok_or_else(|| Error::Invalid("exponent too large".into()))?;
    let r = num_traits::pow(base, mag);
    Ok(if p.is_negative() { r.recip() } else { r })
}

/// Generalized binomial coefficient `(lambda choose m)`.
pub fn binom(lambda: &Rational, m: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..m {
        acc *= lambda - int(j as i64);
        acc /= int(j as i64 + 1);
    }
    acc
}

pub fn factorial(n: u32) -> Rational {
    (1..=n).fold(Rational::one(), |acc, j| acc * int(j as i64))
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn denom_u64(r: &Rational) -> u64 {
    r.denom().to_u64().unwrap_or(1)
}

/// Largest integer `<= r`.
pub fn floor_i64(r: &Rational) -> i64 {
    r.floor().to_integer().to_i64().unwrap_or(i64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_powers() {
        assert_eq!(pow(&int(4), &ratio(1, 2)).unwrap(), int(2));
        assert_eq!(pow(&int(4), &ratio(-3, 2)).unwrap(), ratio(1, 8));
        assert_eq!(pow(&ratio(9, 4), &ratio(1, 2)).unwrap(), ratio(3, 2));
        assert!(matches!(pow(&int(2), &ratio(1, 2)), Err(Error::Irrational(_))));
        assert_eq!(pow(&int(0), &int(3)).unwrap(), int(0));
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(&ratio(1, 2), 2), ratio(-1, 8));
        assert_eq!(binom(&int(-1), 3), int(-1));
        assert_eq!(binom(&int(3), 4), int(0));
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(fmt(&parse("6/4").unwrap()), "3/2");
        assert_eq!(fmt(&parse("-7").unwrap()), "-7");
        assert!(parse("1/0").is_err());
    }
}
