use std::collections::{BinaryHeap, HashSet};

use num_traits::{One, Zero};

use super::stream::{Budget, HahnSeries, Next, Term, TermSource};
use crate::error::Result;
use crate::order::{Monomial, MonomialGroup};
use crate::rational::Rational;

#[derive(PartialEq, Eq)]
struct Entry {
    monomial: Monomial,
    i: usize,
    j: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.monomial
            .cmp(&other.monomial)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A frontier pair whose unknown factor has only been bounded: its product
/// is `<= bound`.
struct Pending {
    i: usize,
    j: usize,
    bound: Monomial,
    g_unknown: bool,
}

/// Cauchy product by a max-heap over index pairs: a pair enters the heap once
/// one of its predecessors `(i-1, j)` or `(i, j-1)` has been consumed.
struct ProductSource {
    f: HahnSeries,
    g: HahnSeries,
    heap: BinaryHeap<Entry>,
    pending: Vec<Pending>,
    seen: HashSet<(usize, usize)>,
    started: bool,
}

enum Probe {
    Entry(Entry),
    Below(Monomial),
    Absent,
}

impl ProductSource {
    /// Locates pair `(i, j)` when `f`'s term is known, expanding `g` only as far
    /// as needed to decide whether the product clears `floor`.
    fn probe(&self, i: usize, j: usize, floor: Option<&Monomial>, budget: &Budget) -> Result<Probe> {
        let known_f = self.f.term(i, budget)?;
        let Some(a) = known_f else {
            return Ok(Probe::Absent);
        };
        let floor_g = floor.map(|fl| fl.div(&a.monomial));
        match self.g.fetch(j, floor_g.as_ref(), budget)? {
            Next::End => Ok(Probe::Absent),
            Next::Below => Ok(Probe::Below(floor.expect("floor given").clone())),
            Next::Term(b) => Ok(Probe::Entry(Entry {
                monomial: a.monomial.mul(&b.monomial),
                i,
                j,
            })),
        }
    }

    /// Same as [`probe`](Self::probe) with the roles of the factors swapped.
    fn probe_f(&self, i: usize, j: usize, floor: Option<&Monomial>, budget: &Budget) -> Result<Probe> {
        let Some(b) = self.g.term(j, budget)? else {
            return Ok(Probe::Absent);
        };
        let floor_f = floor.map(|fl| fl.div(&b.monomial));
        match self.f.fetch(i, floor_f.as_ref(), budget)? {
            Next::End => Ok(Probe::Absent),
            Next::Below => Ok(Probe::Below(floor.expect("floor given").clone())),
            Next::Term(a) => Ok(Probe::Entry(Entry {
                monomial: a.monomial.mul(&b.monomial),
                i,
                j,
            })),
        }
    }

    fn coeff(&self, i: usize, j: usize, budget: &Budget) -> Result<Rational> {
        let a = self.f.term(i, budget)?.expect("queued pair exists");
        let b = self.g.term(j, budget)?.expect("queued pair exists");
        Ok(a.coeff * b.coeff)
    }

    /// Moves pending pairs that might clear `floor` into the heap.
    fn resolve(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<()> {
        let mut k = 0;
        while k < self.pending.len() {
            let p = &self.pending[k];
            if floor.is_some_and(|fl| p.bound <= *fl) {
                k += 1;
                continue;
            }
            let (i, j) = (p.i, p.j);
            let r = if p.g_unknown {
                self.probe(i, j, floor, budget)?
            } else {
                self.probe_f(i, j, floor, budget)?
            };
            match r {
                Probe::Entry(e) => {
                    self.pending.swap_remove(k);
                    self.heap.push(e);
                }
                Probe::Below(b) => {
                    self.pending[k].bound = b;
                    k += 1;
                }
                Probe::Absent => {
                    self.pending.swap_remove(k);
                }
            }
        }
        Ok(())
    }
}

impl TermSource for ProductSource {
    fn next(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
        if !self.started {
            match self.probe(0, 0, floor, budget)? {
                Probe::Entry(e) => self.heap.push(e),
                Probe::Below(bound) => self.pending.push(Pending {
                    i: 0,
                    j: 0,
                    bound,
                    g_unknown: true,
                }),
                Probe::Absent => {}
            }
            self.seen.insert((0, 0));
            self.started = true;
        }
        loop {
            budget.tick()?;
            self.resolve(floor, budget)?;
            let top = match self.heap.peek() {
                None if self.pending.is_empty() => return Ok(Next::End),
                None => return Ok(Next::Below),
                Some(top) if floor.is_some_and(|fl| top.monomial <= *fl) => return Ok(Next::Below),
                Some(top) => top.monomial.clone(),
            };
            let batch: Vec<(usize, usize)> = self
                .heap
                .iter()
                .filter(|e| e.monomial == top)
                .map(|e| (e.i, e.j))
                .collect();
            // gather everything before mutating, so a budget failure leaves no trace
            let mut coeff = Rational::zero();
            let mut found = Vec::new();
            for &(i, j) in &batch {
                budget.tick()?;
                coeff += self.coeff(i, j, budget)?;
                let right = (i, j + 1);
                if !self.seen.contains(&right) {
                    found.push((right, true, self.probe(i, j + 1, floor, budget)?));
                }
                let down = (i + 1, j);
                if !self.seen.contains(&down) {
                    found.push((down, false, self.probe_f(i + 1, j, floor, budget)?));
                }
            }
            for _ in 0..batch.len() {
                self.heap.pop();
            }
            for ((i, j), g_unknown, r) in found {
                if !self.seen.insert((i, j)) {
                    continue;
                }
                match r {
                    Probe::Entry(e) => self.heap.push(e),
                    Probe::Below(bound) => self.pending.push(Pending {
                        i,
                        j,
                        bound,
                        g_unknown,
                    }),
                    Probe::Absent => {}
                }
            }
            if !coeff.is_zero() {
                return Ok(Next::Term(Term::new(top, coeff)));
            }
        }
    }
}

pub fn mul(f: &HahnSeries, g: &HahnSeries) -> Result<HahnSeries> {
    MonomialGroup::check(f.group(), g.group())?;
    Ok(HahnSeries::from_source(
        f.group(),
        f.known_finite() && g.known_finite(),
        Box::new(ProductSource {
            f: f.clone(),
            g: g.clone(),
            heap: BinaryHeap::new(),
            pending: Vec::new(),
            seen: HashSet::new(),
            started: false,
        }),
    ))
}

/// `f^n` by repeated squaring.
pub fn pow_nat(f: &HahnSeries, n: u32) -> Result<HahnSeries> {
    let mut acc = HahnSeries::constant(f.group(), Rational::one());
    let mut base = f.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = mul(&acc, &base)?;
        }
        n >>= 1;
        if n > 0 {
            base = mul(&base, &base)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hahn::ops::add;
    use crate::rational::int;
    use std::sync::Arc;

    fn g() -> Arc<MonomialGroup> {
        MonomialGroup::new(&["t"]).unwrap()
    }

    fn poly(g: &Arc<MonomialGroup>, cs: &[(i64, i64)]) -> HahnSeries {
        HahnSeries::from_terms(
            g,
            cs.iter()
                .map(|&(e, c)| (Monomial::new(g, vec![int(e)]).unwrap(), int(c)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn laurent_product() {
        let g = g();
        let b = Budget::default();
        let p = mul(&poly(&g, &[(-1, 1), (0, 1), (1, 1)]), &poly(&g, &[(0, 1), (1, -1)])).unwrap();
        let want = poly(&g, &[(-1, 1), (2, -1)]);
        assert_eq!(p.all_terms(&b).unwrap(), want.all_terms(&b).unwrap());
    }

    #[test]
    fn geometric_times_one_minus_t() {
        let g = g();
        let b = Budget::default();
        let g2 = g.clone();
        let geo = HahnSeries::from_fn(&g, move |k| {
            Some((Monomial::new(&g2, vec![int(k as i64)]).unwrap(), int(1)))
        });
        let p = mul(&geo, &poly(&g, &[(0, 1), (1, -1)])).unwrap();
        // the product is 1, but the tail cancels forever; probe only the head
        assert_eq!(p.term(0, &b).unwrap(), Some(Term::new(Monomial::identity(&g), int(1))));
        let trunc = crate::hahn::truncate(&p, &Monomial::new(&g, vec![int(20)]).unwrap()).unwrap();
        assert_eq!(trunc.all_terms(&b).unwrap().len(), 1);
        let sq = pow_nat(&add(&poly(&g, &[(0, 1)]), &poly(&g, &[(1, 1)])).unwrap(), 3).unwrap();
        assert_eq!(sq.all_terms(&b).unwrap(), poly(&g, &[(0, 1), (1, 3), (2, 3), (3, 1)]).all_terms(&b).unwrap());
    }
}
