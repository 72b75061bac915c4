//! Restricted power series: classical power series whose coefficients are
//! Hahn series, with coefficient-wise truncations, composition, and the
//! constructive truncation decompositions.

mod from_gps;
mod tc_product;
mod witness;

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hahn::{self, sum_family, Budget, FamilyGen, HahnSeries};
use crate::order::{ArchClass, Monomial, MonomialGroup};
use crate::rational::{self, Rational};

pub use from_gps::from_gps;
pub use tc_product::{product_cuts, tc_product_assemble, tc_product_decompose, CutTriple};
pub use witness::{
    tc_composition_witness, trunc_witness, AtomTag, ClosedUnder, Provenance, Recipe, WAtom, WExpr, WKind, WitnessCtx,
    WitnessReport,
};

pub type MultiIndex = Vec<u32>;

type CoeffFn = dyn Fn(&[u32]) -> Result<HahnSeries>;

struct Node {
    vars: Vec<String>,
    group: Arc<MonomialGroup>,
    max_degree: Option<u32>,
    /// Every coefficient is supported at or below this monomial; `None` when
    /// every coefficient vanishes.
    sup: Option<Monomial>,
    coeff: Box<CoeffFn>,
    memo: RefCell<HashMap<MultiIndex, HahnSeries>>,
    label: String,
}

/// `Σ_m r_m x^m` with Hahn-series coefficients `r_m`, computed on demand.
#[derive(Clone)]
pub struct Rps(Rc<Node>);

/// A probe of `Supp_M(f)`: distinct monomials in decreasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuppProbe {
    pub monomials: Vec<Monomial>,
    /// No monomial was missed: every probed coefficient ended within the depth
    /// and every nonzero coefficient was visited.
    pub complete: bool,
}

pub fn total(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// All multi-indices of length `n` and total degree `<= d`, by degree.
pub fn indices_up_to(n: usize, d: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for k in 0..=d {
        indices_of_degree(n, k, &mut vec![], &mut out);
    }
    out
}

fn indices_of_degree(n: usize, k: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == n {
        let mut v = prefix.clone();
        v.push(k);
        out.push(v);
        return;
    }
    if n == 0 {
        if k == 0 {
            out.push(vec![]);
        }
        return;
    }
    for a in (0..=k).rev() {
        prefix.push(a);
        indices_of_degree(n, k - a, prefix, out);
        prefix.pop();
    }
}

fn max_opt(a: &Option<Monomial>, b: &Option<Monomial>) -> Option<Monomial> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y).clone()),
        (x, y) => x.clone().or_else(|| y.clone()),
    }
}

impl Rps {
    pub fn from_fn<F>(
        vars: Vec<String>,
        group: &Arc<MonomialGroup>,
        max_degree: Option<u32>,
        sup: Option<Monomial>,
        label: String,
        f: F,
    ) -> Rps
    where
        F: Fn(&[u32]) -> Result<HahnSeries> + 'static,
    {
        Rps(Rc::new(Node {
            vars,
            group: group.clone(),
            max_degree,
            sup,
            coeff: Box::new(f),
            memo: RefCell::new(HashMap::new()),
            label,
        }))
    }

    /// A series with finitely many nonzero coefficients.
    pub fn from_coeffs<S: AsRef<str>>(
        vars: &[S],
        group: &Arc<MonomialGroup>,
        coeffs: Vec<(MultiIndex, HahnSeries)>,
        budget: &Budget,
    ) -> Result<Rps> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let mut map: HashMap<MultiIndex, HahnSeries> = HashMap::new();
        let mut sup = None;
        let mut max_degree = 0;
        for (m, c) in coeffs {
            if m.len() != vars.len() {
                return Err(Error::Invalid(format!("multi-index {m:?} for {} variables", vars.len())));
            }
            MonomialGroup::check(group, c.group())?;
            let c = match map.remove(&m) {
                Some(prev) => hahn::add(&prev, &c)?,
                None => c,
            };
            map.insert(m, c);
        }
        map.retain(|_, c| !matches!(c.is_zero(budget), Ok(true)));
        for (m, c) in &map {
            let lead = c.leading(budget)?.map(|t| t.monomial);
            sup = max_opt(&sup, &lead);
            max_degree = max_degree.max(total(m));
        }
        let g = group.clone();
        let label = format!("poly[{}]", map.len());
        Ok(Rps::from_fn(vars, group, Some(max_degree), sup, label, move |m| {
            Ok(map.get(m).cloned().unwrap_or_else(|| HahnSeries::zero(&g)))
        }))
    }

    /// A series in no variables.
    pub fn constant(c: &HahnSeries, budget: &Budget) -> Result<Rps> {
        Rps::from_coeffs::<&str>(&[], c.group(), vec![(vec![], c.clone())], budget)
    }

    pub fn zero<S: AsRef<str>>(vars: &[S], group: &Arc<MonomialGroup>) -> Rps {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let g = group.clone();
        Rps::from_fn(vars, group, Some(0), None, "0".into(), move |_| Ok(HahnSeries::zero(&g)))
    }

    /// `c·m` as a series in the given variables.
    pub fn scalar<S: AsRef<str>>(vars: &[S], m: &Monomial, c: Rational) -> Rps {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let n = vars.len();
        let s = HahnSeries::term_series(m, c.clone());
        let sup = (!c.is_zero()).then(|| m.clone());
        let g = m.group().clone();
        Rps::from_fn(vars, m.group(), Some(0), sup, format!("{}*{}", rational::fmt(&c), m), move |i| {
            Ok(if i == vec![0; n].as_slice() { s.clone() } else { HahnSeries::zero(&g) })
        })
    }

    /// The coordinate `x_i`.
    pub fn var<S: AsRef<str>>(vars: &[S], group: &Arc<MonomialGroup>, i: usize) -> Result<Rps> {
        let n = vars.len();
        if i >= n {
            return Err(Error::Invalid(format!("variable index {i} out of range")));
        }
        let mut e = vec![0; n];
        e[i] = 1;
        Rps::from_coeffs(vars, group, vec![(e, HahnSeries::constant(group, Rational::one()))], &Budget::default())
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn group(&self) -> &Arc<MonomialGroup> {
        &self.0.group
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.0.max_degree
    }

    /// Upper bound for `Supp_M`, or `None` for the zero series.
    pub fn sup(&self) -> Option<&Monomial> {
        self.0.sup.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn ptr_eq(&self, other: &Rps) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// The coefficient `r_m`.
    pub fn coeff(&self, m: &[u32]) -> Result<HahnSeries> {
        if m.len() != self.0.vars.len() {
            return Err(Error::Invalid(format!(
                "multi-index of length {} for {} variables",
                m.len(),
                self.0.vars.len()
            )));
        }
        if self.0.sup.is_none() || self.0.max_degree.is_some_and(|d| total(m) > d) {
            return Ok(HahnSeries::zero(&self.0.group));
        }
        if let Some(c) = self.0.memo.borrow().get(m) {
            return Ok(c.clone());
        }
        let c = (self.0.coeff)(m)?;
        self.0.memo.borrow_mut().insert(m.to_vec(), c.clone());
        Ok(c)
    }

    /// The degree bound with vanishing top coefficients dropped. A
    /// coefficient counts as nonzero unless shown empty within a small budget.
    pub fn effective_degree(&self) -> Option<u32> {
        let d = self.0.max_degree?;
        let b = Budget::new(20_000);
        for k in (1..=d).rev() {
            for m in indices_up_to(self.vars().len(), k).into_iter().filter(|m| total(m) == k) {
                if !matches!(self.coeff(&m).and_then(|c| c.is_zero(&b)), Ok(true)) {
                    return Some(k);
                }
            }
        }
        Some(0)
    }

    /// Multi-indices up to total degree `horizon` (or the known degree bound).
    pub fn indices(&self, horizon: u32) -> Vec<MultiIndex> {
        let d = self.0.max_degree.map_or(horizon, |m| m.min(horizon));
        if self.0.sup.is_none() {
            return vec![];
        }
        indices_up_to(self.0.vars.len(), d)
    }

    /// Whether the degree bound is covered by `horizon`.
    pub fn degree_within(&self, horizon: u32) -> bool {
        self.0.sup.is_none() || self.0.max_degree.is_some_and(|d| d <= horizon)
    }

    fn check_vars(&self, other: &Rps) -> Result<()> {
        MonomialGroup::check(self.group(), other.group())?;
        if self.vars() != other.vars() {
            return Err(Error::Invalid(format!(
                "variable mismatch: {:?} vs {:?}",
                self.vars(),
                other.vars()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Rps) -> Result<Rps> {
        self.check_vars(other)?;
        let (f, g) = (self.clone(), other.clone());
        let max_degree = match (f.max_degree(), g.max_degree()) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        let sup = max_opt(&f.0.sup, &g.0.sup);
        let label = format!("({} + {})", f.label(), g.label());
        Ok(Rps::from_fn(self.vars().to_vec(), self.group(), max_degree, sup, label, move |m| {
            hahn::add(&f.coeff(m)?, &g.coeff(m)?)
        }))
    }

    pub fn scale(&self, c: &Rational) -> Rps {
        let f = self.clone();
        let c = c.clone();
        let sup = if c.is_zero() { None } else { f.0.sup.clone() };
        let label = format!("{}*{}", rational::fmt(&c), f.label());
        Rps::from_fn(self.vars().to_vec(), self.group(), self.max_degree(), sup, label, move |m| {
            Ok(hahn::scalar_mul(&c, &f.coeff(m)?))
        })
    }

    pub fn neg(&self) -> Rps {
        self.scale(&rational::int(-1))
    }

    pub fn sub(&self, other: &Rps) -> Result<Rps> {
        self.add(&other.neg())
    }

    /// `n·f`
    pub fn mul_monomial(&self, n: &Monomial) -> Result<Rps> {
        MonomialGroup::check(self.group(), n.group())?;
        let f = self.clone();
        let n = n.clone();
        let sup = f.0.sup.as_ref().map(|s| s.mul(&n));
        let label = format!("{}*{}", n, f.label());
        Ok(Rps::from_fn(self.vars().to_vec(), self.group(), self.max_degree(), sup, label, move |m| {
            hahn::mul_monomial(&n, &f.coeff(m)?)
        }))
    }

    pub fn mul(&self, other: &Rps) -> Result<Rps> {
        self.check_vars(other)?;
        let (f, g) = (self.clone(), other.clone());
        let max_degree = match (f.max_degree(), g.max_degree()) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        let sup = match (&f.0.sup, &g.0.sup) {
            (Some(a), Some(b)) => Some(a.mul(b)),
            _ => None,
        };
        let label = format!("({} * {})", f.label(), g.label());
        let group = self.group().clone();
        Ok(Rps::from_fn(self.vars().to_vec(), self.group(), max_degree, sup, label, move |n| {
            let mut acc = HahnSeries::zero(&group);
            for a in sub_indices(n) {
                if f.max_degree().is_some_and(|d| total(&a) > d) {
                    continue;
                }
                let b: Vec<u32> = n.iter().zip(&a).map(|(x, y)| x - y).collect();
                if g.max_degree().is_some_and(|d| total(&b) > d) {
                    continue;
                }
                acc = hahn::add(&acc, &hahn::mul(&f.coeff(&a)?, &g.coeff(&b)?)?)?;
            }
            Ok(acc)
        }))
    }

    pub fn pow(&self, k: u32) -> Result<Rps> {
        let mut acc = Rps::scalar(self.vars(), &Monomial::identity(self.group()), Rational::one());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `∂f/∂x_i`
    pub fn derivative(&self, i: usize) -> Result<Rps> {
        if i >= self.vars().len() {
            return Err(Error::Invalid(format!("variable index {i} out of range")));
        }
        let f = self.clone();
        let max_degree = f.max_degree().map(|d| d.saturating_sub(1));
        let label = format!("d{}({})", f.vars()[i], f.label());
        Ok(Rps::from_fn(self.vars().to_vec(), self.group(), max_degree, f.0.sup.clone(), label, move |m| {
            let mut up = m.to_vec();
            up[i] += 1;
            Ok(hahn::scalar_mul(&rational::int(up[i] as i64), &f.coeff(&up)?))
        }))
    }

    /// `f‖n`: every coefficient truncated at `n`.
    pub fn coeff_trunc(&self, n: &Monomial) -> Result<Rps> {
        MonomialGroup::check(self.group(), n.group())?;
        let f = self.clone();
        let n = n.clone();
        let sup = f.0.sup.clone().filter(|s| *s > n);
        let label = format!("{}||{}", f.label(), n);
        Ok(Rps::from_fn(self.vars().to_vec(), self.group(), self.max_degree(), sup, label, move |m| {
            hahn::truncate(&f.coeff(m)?, &n)
        }))
    }

    /// Truncation at an optional cut; `None` leaves `f` unchanged.
    pub fn coeff_trunc_opt(&self, n: Option<&Monomial>) -> Result<Rps> {
        match n {
            Some(n) => self.coeff_trunc(n),
            None => Ok(self.clone()),
        }
    }

    /// `f‖v`: every coefficient restricted to classes strictly finer than `v`.
    pub fn coeff_trunc_v(&self, v: ArchClass) -> Rps {
        let f = self.clone();
        let label = format!("{}||v{}", f.label(), v);
        Rps::from_fn(self.vars().to_vec(), self.group(), self.max_degree(), f.0.sup.clone(), label, move |m| {
            Ok(hahn::v_truncate(&f.coeff(m)?, v))
        })
    }

    /// `f(x + z)` in the variables `x ++ z`.
    pub fn taylor_shift<S: AsRef<str>>(&self, zvars: &[S]) -> Result<Rps> {
        let n = self.vars().len();
        if zvars.len() != n {
            return Err(Error::Invalid("taylor shift needs one new variable per variable".into()));
        }
        let mut vars = self.vars().to_vec();
        vars.extend(zvars.iter().map(|z| z.as_ref().to_string()));
        let f = self.clone();
        let label = format!("shift({})", f.label());
        Ok(Rps::from_fn(vars, self.group(), self.max_degree(), f.0.sup.clone(), label, move |lh| {
            let (l, h) = lh.split_at(n);
            let mut c = Rational::one();
            let mut idx = Vec::with_capacity(n);
            for (a, b) in l.iter().zip(h) {
                c *= rational::binom(&rational::int((a + b) as i64), *a);
                idx.push(a + b);
            }
            Ok(hahn::scalar_mul(&c, &f.coeff(&idx)?))
        }))
    }

    /// Leading monomial of `r_0`, if nonzero.
    pub fn constant_lead(&self, budget: &Budget) -> Result<Option<Monomial>> {
        let zero = vec![0; self.vars().len()];
        Ok(self.coeff(&zero)?.leading(budget)?.map(|t| t.monomial))
    }

    /// `Supp_M(f) <= 1` and `r_0` infinitesimal.
    pub fn is_composable(&self, budget: &Budget) -> Result<bool> {
        let one = Monomial::identity(self.group());
        if self.sup().is_some_and(|s| *s > one) {
            // the structural bound may be loose; decide from the actual support
            let probe = self.supp_probe(24, 6, budget)?;
            if !probe.complete || probe.monomials.first().is_some_and(|m| *m > one) {
                return Ok(false);
            }
        }
        Ok(self.constant_lead(budget)?.map_or(true, |m| m < one))
    }

    /// The first `depth` terms of each coefficient up to total degree `horizon`.
    pub fn supp_probe(&self, depth: usize, horizon: u32, budget: &Budget) -> Result<SuppProbe> {
        let mut set: BTreeSet<Monomial> = BTreeSet::new();
        let mut complete = self.degree_within(horizon);
        for m in self.indices(horizon) {
            let (terms, ended) = self.coeff(&m)?.observe(depth, budget)?;
            complete &= ended;
            set.extend(terms.into_iter().map(|t| t.monomial));
        }
        Ok(SuppProbe {
            monomials: set.into_iter().rev().collect(),
            complete,
        })
    }

    /// Every monomial of `Supp_M(f)` strictly above `threshold`, plus for each
    /// coefficient the first one at or below it; coefficients are scanned to
    /// at most `cap` terms each and up to total degree `horizon`.
    pub fn supp_probe_below(
        &self,
        threshold: &Monomial,
        horizon: u32,
        cap: usize,
        budget: &Budget,
    ) -> Result<SuppProbe> {
        let mut set: BTreeSet<Monomial> = BTreeSet::new();
        let mut complete = self.degree_within(horizon);
        for m in self.indices(horizon) {
            let c = self.coeff(&m)?;
            let mut i = 0;
            loop {
                if i == cap {
                    complete = false;
                    break;
                }
                match c.term(i, budget)? {
                    None => break,
                    Some(t) => {
                        let stop = t.monomial <= *threshold;
                        set.insert(t.monomial);
                        if stop {
                            break;
                        }
                    }
                }
                i += 1;
            }
        }
        Ok(SuppProbe {
            monomials: set.into_iter().rev().collect(),
            complete,
        })
    }

    /// `max Supp_M(f)` over total degrees up to `horizon`.
    pub fn supp_max(&self, horizon: u32, budget: &Budget) -> Result<Option<Monomial>> {
        let mut best = None;
        for m in self.indices(horizon) {
            let lead = self.coeff(&m)?.leading(budget)?.map(|t| t.monomial);
            best = max_opt(&best, &lead);
        }
        Ok(best)
    }

    /// A series in no variables viewed as a constant in `vars`.
    pub fn lift<S: AsRef<str>>(&self, vars: &[S]) -> Result<Rps> {
        if !self.vars().is_empty() {
            return Err(Error::Invalid("only constants can be lifted".into()));
        }
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        let f = self.clone();
        let g = self.group().clone();
        Ok(Rps::from_fn(vars, self.group(), Some(0), f.0.sup.clone(), f.label().to_string(), move |m| {
            if m.iter().all(|&x| x == 0) {
                f.coeff(&[])
            } else {
                Ok(HahnSeries::zero(&g))
            }
        }))
    }

    /// Coefficient-wise agreement to `depth` terms up to degree `horizon`.
    pub fn agree(&self, other: &Rps, depth: usize, horizon: u32, budget: &Budget) -> Result<bool> {
        self.check_vars(other)?;
        let h = match (self.max_degree(), other.max_degree()) {
            (Some(a), Some(b)) => a.max(b).min(horizon),
            _ => horizon,
        };
        for m in indices_up_to(self.vars().len(), h) {
            if !hahn::agree_to_depth(&self.coeff(&m)?, &other.coeff(&m)?, depth, budget)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Renames the variables without touching coefficients.
    pub fn with_vars<S: AsRef<str>>(&self, vars: &[S]) -> Result<Rps> {
        if vars.len() != self.vars().len() {
            return Err(Error::Invalid("renaming must keep the number of variables".into()));
        }
        let f = self.clone();
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        Ok(Rps::from_fn(vars, self.group(), self.max_degree(), f.0.sup.clone(), f.label().to_string(), move |m| {
            f.coeff(m)
        }))
    }

    /// `f(g_1, ..., g_n)` for composable `g_i` sharing their variables.
    pub fn compose(&self, gs: &[Rps], budget: &Budget) -> Result<Rps> {
        if gs.len() != self.vars().len() {
            return Err(Error::Invalid(format!(
                "{} arguments for {} variables",
                gs.len(),
                self.vars().len()
            )));
        }
        if gs.is_empty() {
            return Ok(self.clone());
        }
        for g in gs {
            gs[0].check_vars(g)?;
            MonomialGroup::check(self.group(), g.group())?;
            if !g.is_composable(budget)? {
                return Err(Error::NotComposable(g.label().to_string()));
            }
        }
        let powers = Rc::new(Powers {
            gs: gs.to_vec(),
            memo: RefCell::new(HashMap::new()),
        });
        let f = self.clone();
        let inner = gs.iter().try_fold(0, |acc, g| g.effective_degree().map(|d| acc.max(d)));
        let max_degree = match (f.max_degree(), inner) {
            (_, Some(0)) => Some(0),
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        let zvars = gs[0].vars().to_vec();
        let group = self.group().clone();
        let labels: Vec<&str> = gs.iter().map(|g| g.label()).collect();
        let label = format!("{}({})", f.label(), labels.join(", "));
        let g_leads: Rc<RefCell<Option<Option<Monomial>>>> = Rc::new(RefCell::new(None));
        let g_nc: Rc<RefCell<Option<Option<Monomial>>>> = Rc::new(RefCell::new(None));
        Ok(Rps::from_fn(zvars, self.group(), max_degree, f.0.sup.clone(), label, move |n| {
            Ok(sum_family(
                &group,
                ComposeFamily {
                    f: f.clone(),
                    powers: powers.clone(),
                    n: n.to_vec(),
                    k: 0,
                    eps: g_leads.clone(),
                    g_nc: g_nc.clone(),
                    g_deg: inner,
                },
            ))
        }))
    }
}

/// All `a <= n` componentwise.
fn sub_indices(n: &[u32]) -> Vec<MultiIndex> {
    let mut out = vec![vec![]];
    for &x in n {
        let mut next = Vec::new();
        for p in &out {
            for a in 0..=x {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

struct Powers {
    gs: Vec<Rps>,
    memo: RefCell<HashMap<MultiIndex, Rps>>,
}

impl Powers {
    /// `Π g_i^{m_i}`
    fn get(&self, m: &[u32]) -> Result<Rps> {
        if let Some(p) = self.memo.borrow().get(m) {
            return Ok(p.clone());
        }
        let p = match m.iter().rposition(|&x| x > 0) {
            None => Rps::scalar(self.gs[0].vars(), &Monomial::identity(self.gs[0].group()), Rational::one()),
            Some(j) => {
                let mut prev = m.to_vec();
                prev[j] -= 1;
                self.get(&prev)?.mul(&self.gs[j])?
            }
        };
        self.memo.borrow_mut().insert(m.to_vec(), p.clone());
        Ok(p)
    }
}

/// Groups `r_m [z^n] g^m` by `|m|`.
struct ComposeFamily {
    f: Rps,
    powers: Rc<Powers>,
    n: MultiIndex,
    k: u32,
    eps: Rc<RefCell<Option<Option<Monomial>>>>,
    g_nc: Rc<RefCell<Option<Option<Monomial>>>>,
    /// Effective degree bound of the arguments, if all are polynomial.
    g_deg: Option<u32>,
}

impl ComposeFamily {
    /// Largest leading monomial among the constant coefficients of the `g_i`.
    fn eps(&self, budget: &Budget) -> Result<Option<Monomial>> {
        if let Some(e) = self.eps.borrow().as_ref() {
            return Ok(e.clone());
        }
        let mut best: Option<Monomial> = None;
        for g in &self.powers.gs {
            best = max_opt(&best, &g.constant_lead(budget)?);
        }
        *self.eps.borrow_mut() = Some(best.clone());
        Ok(best)
    }

    /// Largest leading monomial among the nonconstant coefficients, falling
    /// back to the coefficient bound when some argument has unbounded degree.
    fn lead_nonconst(&self, budget: &Budget) -> Result<Option<Monomial>> {
        if let Some(e) = self.g_nc.borrow().as_ref() {
            return Ok(e.clone());
        }
        let mut best: Option<Monomial> = None;
        for g in &self.powers.gs {
            match g.max_degree() {
                Some(d) => {
                    for m in indices_up_to(g.vars().len(), d).into_iter().filter(|m| total(m) > 0) {
                        best = max_opt(&best, &g.coeff(&m)?.leading(budget)?.map(|t| t.monomial));
                    }
                }
                None => best = max_opt(&best, &g.sup().cloned()),
            }
        }
        *self.g_nc.borrow_mut() = Some(best.clone());
        Ok(best)
    }

    fn done(&self, budget: &Budget) -> Result<bool> {
        if self.f.sup().is_none() || self.f.max_degree().is_some_and(|d| self.k > d) {
            return Ok(true);
        }
        let j = total(&self.n);
        if j > 0 && self.lead_nonconst(budget)?.is_none() {
            return Ok(true);
        }
        Ok(self.k > j && self.eps(budget)?.is_none())
    }
}

impl FamilyGen for ComposeFamily {
    fn next_group(&mut self, budget: &Budget) -> Result<Option<Vec<HahnSeries>>> {
        if self.done(budget)? {
            return Ok(None);
        }
        let mut group = Vec::new();
        for m in indices_of(self.f.vars().len(), self.k) {
            let r = self.f.coeff(&m)?;
            if r.is_zero(budget)? {
                continue;
            }
            let p = self.powers.get(&m)?;
            group.push(hahn::mul(&r, &p.coeff(&self.n)?)?);
        }
        self.k += 1;
        Ok(Some(group))
    }

    fn bound(&mut self, budget: &Budget) -> Result<Option<Monomial>> {
        if self.done(budget)? {
            return Ok(None);
        }
        // a term of [z^n] g^m with |m| = k' >= k has j nonconstant factors
        // and k' - j constant ones, where j ranges over [fewest, |n|]
        let sup = self.f.sup().expect("nonzero").clone();
        let n = total(&self.n);
        let one = Monomial::identity(self.f.group());
        let nc = self.lead_nonconst(budget)?.unwrap_or_else(|| one.clone());
        let eps = self.eps(budget)?;
        let fewest = match self.g_deg {
            Some(d) if d > 0 => n.div_ceil(d),
            _ => n.min(1),
        };
        let mut best: Option<Monomial> = None;
        for j in fewest..=n {
            let c = self.k.max(j) - j;
            let b = match &eps {
                Some(e) => e.pow(&rational::int(c as i64)),
                None if c == 0 => one.clone(),
                None => continue,
            };
            best = max_opt(&best, &Some(b.mul(&nc.pow(&rational::int(j as i64)))));
        }
        Ok(Some(sup.mul(&best.unwrap_or(one))))
    }
}

fn indices_of(n: usize, k: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    indices_of_degree(n, k, &mut vec![], &mut out);
    out
}

impl fmt::Debug for Rps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rps[{}]({})", self.vars().join(","), self.label())
    }
}
