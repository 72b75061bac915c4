use num_traits::Zero;

use super::stream::{Budget, HahnSeries, Next, Term, TermSource};
use crate::error::{Error, Result};
use crate::order::{ArchClass, Monomial, MonomialGroup, Segment};
use crate::rational::Rational;

/// A finite union of disjoint segments of the monomial group.
pub type SegmentSet = Vec<Segment<Monomial>>;

enum Step {
    Emit(Term),
    Skip,
    Stop,
}

struct MapSource<F> {
    src: HahnSeries,
    i: usize,
    shift: Option<Monomial>,
    cut: Option<Monomial>,
    f: F,
}

fn max_floor(a: Option<&Monomial>, b: Option<&Monomial>) -> Option<Monomial> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b).clone()),
        (a, b) => a.or(b).cloned(),
    }
}

impl<F: FnMut(Term) -> Step> TermSource for MapSource<F> {
    fn next(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
        let eff = max_floor(floor, self.cut.as_ref());
        let cut_binds = match (&self.cut, floor) {
            (Some(c), Some(f)) => c >= f,
            (Some(_), None) => true,
            _ => false,
        };
        let src_floor = match (&eff, &self.shift) {
            (Some(e), Some(s)) => Some(e.div(s)),
            (e, _) => e.clone(),
        };
        loop {
            budget.tick()?;
            let t = match self.src.fetch(self.i, src_floor.as_ref(), budget)? {
                Next::End => return Ok(Next::End),
                Next::Below if cut_binds => return Ok(Next::End),
                Next::Below => return Ok(Next::Below),
                Next::Term(t) => t,
            };
            let t = match &self.shift {
                Some(s) => Term::new(t.monomial.mul(s), t.coeff),
                None => t,
            };
            if let Some(c) = &self.cut {
                if t.monomial <= *c {
                    return Ok(Next::End);
                }
            }
            self.i += 1;
            match (self.f)(t) {
                Step::Emit(t) => return Ok(Next::Term(t)),
                Step::Skip => continue,
                Step::Stop => return Ok(Next::End),
            }
        }
    }
}

fn map_with<F: FnMut(Term) -> Step + 'static>(
    f: &HahnSeries,
    shift: Option<Monomial>,
    cut: Option<Monomial>,
    step: F,
) -> HahnSeries {
    HahnSeries::from_source(
        f.group(),
        f.known_finite(),
        Box::new(MapSource {
            src: f.clone(),
            i: 0,
            shift,
            cut,
            f: step,
        }),
    )
}

fn map<F: FnMut(Term) -> Step + 'static>(f: &HahnSeries, step: F) -> HahnSeries {
    map_with(f, None, None, step)
}

struct MergeSource {
    f: HahnSeries,
    g: HahnSeries,
    i: usize,
    j: usize,
    sign: Rational,
}

fn above(n: Next, floor: Option<&Monomial>) -> (Option<Term>, bool) {
    match n {
        Next::Term(t) if floor.map_or(true, |f| t.monomial > *f) => (Some(t), false),
        Next::Term(_) | Next::Below => (None, false),
        Next::End => (None, true),
    }
}

impl TermSource for MergeSource {
    fn next(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
        loop {
            budget.tick()?;
            let (a, a_end) = above(self.f.fetch(self.i, floor, budget)?, floor);
            let (b, b_end) = above(self.g.fetch(self.j, floor, budget)?, floor);
            let (m, c) = match (a, b) {
                (None, None) if a_end && b_end => return Ok(Next::End),
                (None, None) => return Ok(Next::Below),
                (Some(a), None) => {
                    self.i += 1;
                    (a.monomial, a.coeff)
                }
                (None, Some(b)) => {
                    self.j += 1;
                    (b.monomial, b.coeff * &self.sign)
                }
                (Some(a), Some(b)) => match a.monomial.cmp(&b.monomial) {
                    std::cmp::Ordering::Greater => {
                        self.i += 1;
                        (a.monomial, a.coeff)
                    }
                    std::cmp::Ordering::Less => {
                        self.j += 1;
                        (b.monomial, b.coeff * &self.sign)
                    }
                    std::cmp::Ordering::Equal => {
                        self.i += 1;
                        self.j += 1;
                        (a.monomial, a.coeff + b.coeff * &self.sign)
                    }
                },
            };
            if !c.is_zero() {
                return Ok(Next::Term(Term::new(m, c)));
            }
        }
    }
}

fn merge(f: &HahnSeries, g: &HahnSeries, sign: Rational) -> Result<HahnSeries> {
    MonomialGroup::check(f.group(), g.group())?;
    Ok(HahnSeries::from_source(
        f.group(),
        f.known_finite() && g.known_finite(),
        Box::new(MergeSource {
            f: f.clone(),
            g: g.clone(),
            i: 0,
            j: 0,
            sign,
        }),
    ))
}

pub fn add(f: &HahnSeries, g: &HahnSeries) -> Result<HahnSeries> {
    merge(f, g, Rational::from_integer(1.into()))
}

pub fn sub(f: &HahnSeries, g: &HahnSeries) -> Result<HahnSeries> {
    merge(f, g, Rational::from_integer((-1).into()))
}

pub fn neg(f: &HahnSeries) -> HahnSeries {
    scalar_mul(&Rational::from_integer((-1).into()), f)
}

pub fn scalar_mul(c: &Rational, f: &HahnSeries) -> HahnSeries {
    if c.is_zero() {
        return HahnSeries::zero(f.group());
    }
    let c = c.clone();
    map(f, move |t| Step::Emit(Term::new(t.monomial, t.coeff * &c)))
}

/// `m · f`
pub fn mul_monomial(m: &Monomial, f: &HahnSeries) -> Result<HahnSeries> {
    MonomialGroup::check(m.group(), f.group())?;
    if m.is_identity() {
        return Ok(f.clone());
    }
    Ok(map_with(f, Some(m.clone()), None, Step::Emit))
}

/// `f` without its leading term.
pub fn tail(f: &HahnSeries) -> HahnSeries {
    let mut first = true;
    map(f, move |t| {
        if std::mem::take(&mut first) {
            Step::Skip
        } else {
            Step::Emit(t)
        }
    })
}

/// `f|m`: the terms strictly above `m`.
pub fn truncate(f: &HahnSeries, m: &Monomial) -> Result<HahnSeries> {
    MonomialGroup::check(m.group(), f.group())?;
    Ok(map_with(f, None, Some(m.clone()), Step::Emit))
}

/// `f|S`: the terms whose monomial lies in one of the segments.
pub fn fragment(f: &HahnSeries, s: &SegmentSet) -> HahnSeries {
    if s.is_empty() {
        return HahnSeries::zero(f.group());
    }
    let s = s.clone();
    map(f, move |t| {
        if s.iter().any(|p| p.contains(&t.monomial)) {
            Step::Emit(t)
        } else if s.iter().all(|p| p.below_lower(&t.monomial)) {
            Step::Stop
        } else {
            Step::Skip
        }
    })
}

/// Keeps the terms whose archimedean class is strictly finer than `v`.
pub fn v_truncate(f: &HahnSeries, v: ArchClass) -> HahnSeries {
    let limit = match v {
        ArchClass::Infinity => None,
        ArchClass::Finite(i) => Some(i),
    };
    map(f, move |t| {
        let class = t.monomial.arch_class();
        let keep = match (class, limit) {
            (ArchClass::Infinity, _) => true,
            (ArchClass::Finite(c), Some(l)) => c > l,
            (ArchClass::Finite(_), None) => false,
        };
        if keep {
            return Step::Emit(t);
        }
        // a term of class <= v with positive leading exponent lies below every
        // term of class > v, so the stream has nothing more to offer
        let ArchClass::Finite(c) = class else {
            unreachable!()
        };
        if t.monomial.exponents()[c] > Rational::zero() {
            Step::Stop
        } else {
            Step::Skip
        }
    })
}

/// `f|m == g|m`, decided by enumerating both truncations.
pub fn eq_to_monomial(f: &HahnSeries, g: &HahnSeries, m: &Monomial, budget: &Budget) -> Result<bool> {
    let d = sub(&truncate(f, m)?, &truncate(g, m)?)?;
    d.is_zero(budget)
}

/// The first `depth` terms of `f` and `g` coincide (and both streams agree on
/// ending before `depth` if one does).
pub fn agree_to_depth(f: &HahnSeries, g: &HahnSeries, depth: usize, budget: &Budget) -> Result<bool> {
    MonomialGroup::check(f.group(), g.group())?;
    for i in 0..depth {
        let a = f.term(i, budget)?;
        let b = g.term(i, budget)?;
        if a != b {
            return Ok(false);
        }
        if a.is_none() {
            break;
        }
    }
    Ok(true)
}

/// How an observation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    /// The stream has no further terms.
    Ended,
    /// The requested count was reached; more terms may exist.
    Open,
    /// The budget ran out before the count was reached.
    Budget,
}

#[derive(Debug, Clone)]
pub struct Observation {
    pub terms: Vec<Term>,
    pub completion: Completion,
}

impl Observation {
    /// Observes up to `n` terms, keeping whatever arrived before the budget ran out.
    pub fn take(f: &HahnSeries, n: usize, budget: &Budget) -> Result<Observation> {
        let mut terms = Vec::new();
        for i in 0..=n {
            match f.term(i, budget) {
                Ok(Some(t)) if i < n => terms.push(t),
                Ok(Some(_)) => {
                    return Ok(Observation {
                        terms,
                        completion: Completion::Open,
                    })
                }
                Ok(None) => {
                    return Ok(Observation {
                        terms,
                        completion: Completion::Ended,
                    })
                }
                Err(Error::BudgetExhausted) => {
                    let completion = if i == n {
                        Completion::Open
                    } else {
                        Completion::Budget
                    };
                    return Ok(Observation { terms, completion });
                }
                Err(e) => return Err(e),
            }
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;
    use crate::rational::{int, ratio};

    fn t_group() -> Arc<MonomialGroup> {
        MonomialGroup::new(&["t"]).unwrap()
    }

    fn t(g: &Arc<MonomialGroup>, e: Rational) -> Monomial {
        Monomial::new(g, vec![e]).unwrap()
    }

    fn geom(g: &Arc<MonomialGroup>) -> HahnSeries {
        let g2 = g.clone();
        HahnSeries::from_fn(g, move |k| Some((t(&g2, int(k as i64)), int(1))))
    }

    fn poly(g: &Arc<MonomialGroup>, cs: &[(i64, i64)]) -> HahnSeries {
        HahnSeries::from_terms(g, cs.iter().map(|&(e, c)| (t(g, int(e)), int(c))).collect()).unwrap()
    }

    #[test]
    fn cancellation() {
        let g = t_group();
        let b = Budget::default();
        let s = add(&poly(&g, &[(0, 1), (1, 1)]), &poly(&g, &[(0, 1), (1, -1)])).unwrap();
        assert_eq!(s.all_terms(&b).unwrap(), vec![Term::new(t(&g, int(0)), int(2))]);
    }

    #[test]
    fn infinite_cancellation_runs_out_of_budget() {
        let g = t_group();
        let f = geom(&g);
        let d = sub(&f, &f).unwrap();
        let obs = Observation::take(&d, 5, &Budget::new(1000)).unwrap();
        assert!(obs.terms.is_empty());
        assert_eq!(obs.completion, Completion::Budget);
    }

    #[test]
    fn truncate_geometric() {
        let g = t_group();
        let b = Budget::default();
        let tr = truncate(&geom(&g), &t(&g, ratio(5, 2))).unwrap();
        let exps: Vec<Rational> = tr
            .all_terms(&b)
            .unwrap()
            .into_iter()
            .map(|t| t.monomial.exponents()[0].clone())
            .collect();
        assert_eq!(exps, vec![int(0), int(1), int(2)]);
    }

    #[test]
    fn fragment_examples() {
        let g = t_group();
        let b = Budget::default();
        let f = poly(&g, &[(0, 1), (1, 1), (2, 1)]);
        let seg = Segment::closed(t(&g, ratio(3, 2)), t(&g, ratio(1, 2))).unwrap();
        let fr = fragment(&f, &vec![seg]);
        assert_eq!(fr.all_terms(&b).unwrap(), vec![Term::new(t(&g, int(1)), int(1))]);
        assert!(fragment(&f, &vec![]).is_zero(&b).unwrap());
        assert!(agree_to_depth(&fragment(&f, &vec![Segment::full()]), &f, 5, &b).unwrap());
    }

    #[test]
    fn v_truncate_examples() {
        let g = MonomialGroup::new(&["u", "t"]).unwrap();
        let b = Budget::default();
        let m = |a: i64, c: i64| Monomial::from_ratios(&g, &[(a, 1), (c, 1)]).unwrap();
        let f = HahnSeries::from_terms(&g, vec![(m(1, 0), int(1)), (m(0, 1), int(1)), (m(0, 2), int(1))]).unwrap();
        let v = v_truncate(&f, ArchClass::Finite(0));
        assert_eq!(
            v.all_terms(&b).unwrap(),
            vec![Term::new(m(0, 1), int(1)), Term::new(m(0, 2), int(1))]
        );
        let f = HahnSeries::from_terms(&g, vec![(m(0, 0), int(5)), (m(0, 1), int(1))]).unwrap();
        assert_eq!(
            v_truncate(&f, ArchClass::Infinity).all_terms(&b).unwrap(),
            vec![Term::new(m(0, 0), int(5))]
        );
    }

    #[test]
    fn threshold_equality() {
        let g = t_group();
        let b = Budget::default();
        let f = geom(&g);
        let h = add(&geom(&g), &poly(&g, &[(20, 1)])).unwrap();
        assert!(eq_to_monomial(&f, &geom(&g), &t(&g, int(10)), &b).unwrap());
        assert!(eq_to_monomial(&f, &h, &t(&g, int(10)), &b).unwrap());
        assert!(!eq_to_monomial(&f, &h, &t(&g, int(30)), &b).unwrap());
    }
}
