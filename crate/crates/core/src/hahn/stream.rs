use std::cell::{Cell, RefCell};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};

pub const DEFAULT_BUDGET: u64 = 100_000;

/// Counts term-expansion steps for one observation.
#[derive(Debug)]
pub struct Budget {
    limit: u64,
    used: Cell<u64>,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget {
            limit,
            used: Cell::new(0),
        }
    }

    pub fn tick(&self) -> Result<()> {
        self.ticks(1)
    }

    pub fn ticks(&self, n: u64) -> Result<()> {
        let used = self.used.get().saturating_add(n);
        if used > self.limit {
            return Err(Error::BudgetExhausted);
        }
        self.used.set(used);
        Ok(())
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_BUDGET)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Term {
    pub monomial: Monomial,
    pub coeff: Rational,
}

impl Term {
    pub fn new(monomial: Monomial, coeff: Rational) -> Self {
        Term { monomial, coeff }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomial.is_identity() {
            write!(f, "{}", rational::fmt(&self.coeff))
        } else {
            write!(f, "{} * {}", rational::fmt(&self.coeff), self.monomial)
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Outcome of asking a stream for its next term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Next {
    /// The next term; it may lie at or below the requested floor.
    Term(Term),
    End,
    /// The next term, if any, lies at or below the requested floor.
    Below,
}

/// Producer of the terms of a series in strictly decreasing monomial order.
///
/// `floor` tells the source that terms `<= floor` are of no interest, so it may
/// answer [`Next::Below`] instead of searching past cancellations.
/// A source must leave its state consistent when it returns an error, so that
/// the observation can be retried with a fresh budget.
pub trait TermSource {
    fn next(&mut self, floor: Option<&Monomial>, budget: &Budget) -> Result<Next>;
}

struct Node {
    group: Arc<MonomialGroup>,
    memo: RefCell<Vec<Term>>,
    done: Cell<bool>,
    source: RefCell<Option<Box<dyn TermSource>>>,
    finite: bool,
}

/// A Hahn series as a lazily expanded, memoized stream of terms.
#[derive(Clone)]
pub struct HahnSeries(Rc<Node>);

impl HahnSeries {
    pub fn from_source(
        group: &Arc<MonomialGroup>,
        finite: bool,
        source: Box<dyn TermSource>,
    ) -> Self {
        HahnSeries(Rc::new(Node {
            group: group.clone(),
            memo: RefCell::new(Vec::new()),
            done: Cell::new(false),
            source: RefCell::new(Some(source)),
            finite,
        }))
    }

    pub fn zero(group: &Arc<MonomialGroup>) -> Self {
        Self::from_sorted(group, Vec::new())
    }

    fn from_sorted(group: &Arc<MonomialGroup>, terms: Vec<Term>) -> Self {
        HahnSeries(Rc::new(Node {
            group: group.clone(),
            memo: RefCell::new(terms),
            done: Cell::new(true),
            source: RefCell::new(None),
            finite: true,
        }))
    }

    /// A finite series; equal monomials are merged and zero terms dropped.
    pub fn from_terms(group: &Arc<MonomialGroup>, terms: Vec<(Monomial, Rational)>) -> Result<Self> {
        let mut terms = terms;
        for (m, _) in &terms {
            MonomialGroup::check(group, m.group())?;
        }
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.monomial == m => last.coeff += c,
                _ => out.push(Term::new(m, c)),
            }
        }
        out.retain(|t| !t.coeff.is_zero());
        Ok(Self::from_sorted(group, out))
    }

    pub fn monomial(m: &Monomial) -> Self {
        Self::from_sorted(m.group(), vec![Term::new(m.clone(), rational::int(1))])
    }

    pub fn term_series(m: &Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero(m.group())
        } else {
            Self::from_sorted(m.group(), vec![Term::new(m.clone(), c)])
        }
    }

    pub fn constant(group: &Arc<MonomialGroup>, c: Rational) -> Self {
        Self::term_series(&Monomial::identity(group), c)
    }

    /// An infinite (or finite) stream given by its `i`-th term; `None` ends it.
    pub fn from_fn<F>(group: &Arc<MonomialGroup>, f: F) -> Self
    where
        F: FnMut(usize) -> Option<(Monomial, Rational)> + 'static,
    {
        struct FnSource<F> {
            f: F,
            i: usize,
        }
        impl<F: FnMut(usize) -> Option<(Monomial, Rational)>> TermSource for FnSource<F> {
            fn next(&mut self, _floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
                loop {
                    budget.tick()?;
                    let r = (self.f)(self.i);
                    self.i += 1;
                    match r {
                        None => return Ok(Next::End),
                        Some((_, c)) if c.is_zero() => continue,
                        Some((m, c)) => return Ok(Next::Term(Term::new(m, c))),
                    }
                }
            }
        }
        Self::from_source(group, false, Box::new(FnSource { f, i: 0 }))
    }

    pub fn group(&self) -> &Arc<MonomialGroup> {
        &self.0.group
    }

    /// Known to have finitely many terms.
    pub fn known_finite(&self) -> bool {
        self.0.finite || self.0.done.get()
    }

    pub fn ptr_eq(&self, other: &HahnSeries) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// The `i`-th term in decreasing order, expanding the stream as needed.
    pub fn term(&self, i: usize, budget: &Budget) -> Result<Option<Term>> {
        match self.fetch(i, None, budget)? {
            Next::Term(t) => Ok(Some(t)),
            Next::End => Ok(None),
            Next::Below => unreachable!("no floor was given"),
        }
    }

    /// Like [`term`](Self::term), but may give up with [`Next::Below`] once it
    /// knows the `i`-th term is `<= floor`.
    pub fn fetch(&self, i: usize, floor: Option<&Monomial>, budget: &Budget) -> Result<Next> {
        loop {
            if let Some(t) = self.0.memo.borrow().get(i) {
                return Ok(Next::Term(t.clone()));
            }
            if self.0.done.get() {
                return Ok(Next::End);
            }
            let mut src = self
                .0
                .source
                .try_borrow_mut()
                .map_err(|_| Error::StreamOrder("cyclic series definition".into()))?;
            let next = match src.as_mut() {
                Some(s) => {
                    budget.tick()?;
                    s.next(floor, budget)?
                }
                None => Next::End,
            };
            match next {
                Next::End => {
                    self.0.done.set(true);
                    *src = None;
                }
                Next::Below => return Ok(Next::Below),
                Next::Term(t) => {
                    let mut memo = self.0.memo.borrow_mut();
                    if let Some(last) = memo.last() {
                        if t.monomial >= last.monomial {
                            return Err(Error::StreamOrder(format!(
                                "{} emitted after {}",
                                t.monomial, last.monomial
                            )));
                        }
                    }
                    memo.push(t);
                }
            }
        }
    }

    /// The `i`-th term if it lies strictly above `floor`.
    pub fn term_above(&self, i: usize, floor: &Monomial, budget: &Budget) -> Result<Option<Term>> {
        match self.fetch(i, Some(floor), budget)? {
            Next::Term(t) if t.monomial > *floor => Ok(Some(t)),
            _ => Ok(None),
        }
    }

    pub fn take_terms(&self, n: usize, budget: &Budget) -> Result<Vec<Term>> {
        Ok(self.observe(n, budget)?.0)
    }

    /// First `n` terms and whether the stream is known to end after them.
    pub fn observe(&self, n: usize, budget: &Budget) -> Result<(Vec<Term>, bool)> {
        let mut out = Vec::new();
        for i in 0..n {
            match self.term(i, budget)? {
                Some(t) => out.push(t),
                None => return Ok((out, true)),
            }
        }
        let ended = self.term(n, budget)?.is_none();
        Ok((out, ended))
    }

    pub fn leading(&self, budget: &Budget) -> Result<Option<Term>> {
        self.term(0, budget)
    }

    pub fn is_zero(&self, budget: &Budget) -> Result<bool> {
        Ok(self.term(0, budget)?.is_none())
    }

    /// All terms; fails with budget exhaustion on infinite streams.
    pub fn all_terms(&self, budget: &Budget) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        let mut i = 0;
        while let Some(t) = self.term(i, budget)? {
            out.push(t);
            i += 1;
        }
        Ok(out)
    }

    /// Terms strictly above `m`.
    pub fn terms_above(&self, m: &Monomial, budget: &Budget) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        while let Some(t) = self.term_above(out.len(), m, budget)? {
            out.push(t);
        }
        Ok(out)
    }

    /// The `i`-th term if it has already been computed.
    pub fn known_term(&self, i: usize) -> Option<Term> {
        self.0.memo.borrow().get(i).cloned()
    }

    /// Terms already computed, without expanding.
    pub fn computed(&self) -> Vec<Term> {
        self.0.memo.borrow().clone()
    }
}

impl fmt::Debug for HahnSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let memo = self.0.memo.borrow();
        let shown: Vec<String> = memo.iter().map(|t| t.to_string()).collect();
        let tail = if self.0.done.get() { "" } else { " + ..." };
        if shown.is_empty() && self.0.done.get() {
            write!(f, "0")
        } else {
            write!(f, "{}{}", shown.join(" + "), tail)
        }
    }
}
