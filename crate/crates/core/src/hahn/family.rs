use std::sync::Arc;

use num_traits::{One, Zero};

use super::ops::{mul_monomial, scalar_mul, tail};
use super::product::mul;
use super::stream::{Budget, HahnSeries, Next, Term, TermSource};
use crate::error::{Error, Result};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};

/// A summable family presented as a sequence of groups of series.
pub trait FamilyGen {
    /// The next group, or `None` once every group has been handed out.
    fn next_group(&mut self, budget: &Budget) -> Result<Option<Vec<HahnSeries>>>;

    /// A monomial bounding every term of every group not yet handed out, or
    /// `None` if no bound is known (the next group is then opened eagerly).
    fn bound(&mut self, budget: &Budget) -> Result<Option<Monomial>>;
}

struct FamilySource<G> {
    gen: G,
    exhausted: bool,
    streams: Vec<(HahnSeries, usize)>,
}

impl<G: FamilyGen> TermSource for FamilySource<G> {
    fn next(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
        loop {
            budget.tick()?;
            let mut best: Option<Monomial> = None;
            let mut below = false;
            let mut ended = Vec::new();
            for (n, (s, i)) in self.streams.iter().enumerate() {
                match s.fetch(*i, floor, budget)? {
                    Next::Term(t) if floor.map_or(true, |f| t.monomial > *f) => {
                        if best.as_ref().map_or(true, |b| t.monomial > *b) {
                            best = Some(t.monomial);
                        }
                    }
                    Next::Term(_) | Next::Below => below = true,
                    Next::End => ended.push(n),
                }
            }
            for n in ended.into_iter().rev() {
                self.streams.swap_remove(n);
            }
            if !self.exhausted {
                let open = match self.gen.bound(budget)? {
                    None => true,
                    Some(b) => {
                        floor.map_or(true, |f| b > *f) && best.as_ref().map_or(true, |m| *m <= b)
                    }
                };
                if open {
                    match self.gen.next_group(budget)? {
                        Some(group) => self.streams.extend(group.into_iter().map(|s| (s, 0))),
                        None => self.exhausted = true,
                    }
                    continue;
                }
            }
            let Some(m) = best else {
                return Ok(if below || !self.exhausted {
                    Next::Below
                } else {
                    Next::End
                });
            };
            let mut coeff = Rational::zero();
            for (s, i) in self.streams.iter_mut() {
                if let Some(t) = s.known_term(*i) {
                    if t.monomial == m {
                        coeff += t.coeff;
                        *i += 1;
                    }
                }
            }
            if !coeff.is_zero() {
                return Ok(Next::Term(Term::new(m, coeff)));
            }
        }
    }
}

/// The sum of a summable family, emitted lazily in decreasing order.
pub fn sum_family<G: FamilyGen + 'static>(group: &Arc<MonomialGroup>, gen: G) -> HahnSeries {
    HahnSeries::from_source(
        group,
        false,
        Box::new(FamilySource {
            gen,
            exhausted: false,
            streams: Vec::new(),
        }),
    )
}

struct Binomial {
    lambda: Rational,
    k: Rational,
    /// `(λ choose m) k^(λ-m)`, updated as `m` grows.
    coeff: Rational,
    eps: HahnSeries,
    eps_pow: HahnSeries,
    lead: Option<Option<Monomial>>,
    m: u32,
}

impl Binomial {
    fn lead(&mut self, budget: &Budget) -> Result<Option<Monomial>> {
        if self.lead.is_none() {
            self.lead = Some(self.eps.leading(budget)?.map(|t| t.monomial));
        }
        Ok(self.lead.clone().flatten())
    }

    fn done(&mut self, budget: &Budget) -> Result<bool> {
        if self.m == 0 {
            return Ok(false);
        }
        if rational::is_natural(&self.lambda) && Rational::from_integer(self.m.into()) > self.lambda {
            return Ok(true);
        }
        Ok(self.lead(budget)?.is_none())
    }
}

impl FamilyGen for Binomial {
    fn next_group(&mut self, budget: &Budget) -> Result<Option<Vec<HahnSeries>>> {
        if self.done(budget)? {
            return Ok(None);
        }
        let term = scalar_mul(&self.coeff, &self.eps_pow);
        self.eps_pow = mul(&self.eps_pow, &self.eps)?;
        let m = rational::int(self.m as i64);
        self.coeff = &self.coeff * (&self.lambda - &m) / ((m + Rational::one()) * &self.k);
        self.m += 1;
        Ok(Some(vec![term]))
    }

    fn bound(&mut self, budget: &Budget) -> Result<Option<Monomial>> {
        if self.done(budget)? {
            return Ok(None);
        }
        if self.m == 0 {
            return Ok(Some(Monomial::identity(self.eps.group())));
        }
        let lead = self.lead(budget)?.expect("not done");
        Ok(Some(lead.pow(&Rational::from_integer(self.m.into()))))
    }
}

/// `(k + ε)^λ = Σ_m (λ choose m) k^(λ-m) ε^m` for infinitesimal `ε`.
pub fn binomial_series(lambda: &Rational, k: &Rational, eps: &HahnSeries) -> Result<HahnSeries> {
    if k.is_zero() {
        return Err(Error::NormalForm("binomial series needs a nonzero constant".into()));
    }
    let k_lambda = rational::pow(k, lambda)?;
    let one = HahnSeries::constant(eps.group(), Rational::one());
    Ok(sum_family(
        eps.group(),
        Binomial {
            lambda: lambda.clone(),
            k: k.clone(),
            coeff: k_lambda,
            eps: eps.clone(),
            eps_pow: one,
            lead: None,
            m: 0,
        },
    ))
}

/// Splits `f = m·(k + ε)` with `ε` infinitesimal.
pub fn normal_form(f: &HahnSeries, budget: &Budget) -> Result<(Monomial, Rational, HahnSeries)> {
    let lead = f.leading(budget)?.ok_or(Error::ZeroSeries)?;
    let eps = mul_monomial(&lead.monomial.inv(), &tail(f))?;
    Ok((lead.monomial, lead.coeff, eps))
}

/// `f^λ` for `f = m·(k + ε)`, as `m^λ (k + ε)^λ`.
pub fn pow_unit(f: &HahnSeries, lambda: &Rational, budget: &Budget) -> Result<HahnSeries> {
    let (m, k, eps) = normal_form(f, budget)?;
    let b = binomial_series(lambda, &k, &eps)?;
    mul_monomial(&m.pow(lambda), &b)
}

/// `1/f` by geometric expansion around the leading term.
pub fn invert_unit(f: &HahnSeries, budget: &Budget) -> Result<HahnSeries> {
    pow_unit(f, &Rational::from_integer((-1).into()), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hahn::ops::truncate;
    use crate::rational::{int, ratio};

    fn g() -> Arc<MonomialGroup> {
        MonomialGroup::new(&["t"]).unwrap()
    }

    fn t(g: &Arc<MonomialGroup>, e: i64) -> Monomial {
        Monomial::new(g, vec![int(e)]).unwrap()
    }

    fn poly(g: &Arc<MonomialGroup>, cs: &[(i64, Rational)]) -> HahnSeries {
        HahnSeries::from_terms(g, cs.iter().map(|(e, c)| (t(g, *e), c.clone())).collect()).unwrap()
    }

    #[test]
    fn invert_examples() {
        let g = g();
        let b = Budget::default();
        let inv = invert_unit(&poly(&g, &[(2, int(3))]), &b).unwrap();
        assert_eq!(inv.all_terms(&b).unwrap(), vec![Term::new(t(&g, -2), ratio(1, 3))]);
        let inv = invert_unit(&poly(&g, &[(0, int(1)), (1, int(-1))]), &b).unwrap();
        let got = inv.take_terms(5, &b).unwrap();
        assert!(got.iter().enumerate().all(|(i, x)| *x == Term::new(t(&g, i as i64), int(1))));
        let inv = invert_unit(&poly(&g, &[(0, int(2)), (1, int(1))]), &b).unwrap();
        let got = truncate(&inv, &t(&g, 4)).unwrap().all_terms(&b).unwrap();
        let want = poly(
            &g,
            &[(0, ratio(1, 2)), (1, ratio(-1, 4)), (2, ratio(1, 8)), (3, ratio(-1, 16))],
        );
        assert_eq!(got, want.all_terms(&b).unwrap());
        assert_eq!(invert_unit(&HahnSeries::zero(&g), &b).err(), Some(Error::ZeroSeries));
    }

    #[test]
    fn product_with_inverse_is_one() {
        let g = g();
        let b = Budget::default();
        let f = poly(&g, &[(-1, int(3)), (0, int(1)), (2, int(-5))]);
        let p = mul(&f, &invert_unit(&f, &b).unwrap()).unwrap();
        let tr = truncate(&p, &t(&g, 15)).unwrap();
        assert_eq!(tr.all_terms(&b).unwrap(), vec![Term::new(t(&g, 0), int(1))]);
    }

    #[test]
    fn square_root() {
        let g = g();
        let b = Budget::default();
        let f = poly(&g, &[(0, int(1)), (1, int(1))]);
        let r = pow_unit(&f, &ratio(1, 2), &b).unwrap();
        let sq = mul(&r, &r).unwrap();
        let tr = truncate(&sq, &t(&g, 10)).unwrap();
        assert_eq!(tr.all_terms(&b).unwrap(), f.all_terms(&b).unwrap());
    }
}
