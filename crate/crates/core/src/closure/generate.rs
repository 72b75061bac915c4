use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed};
use serde_json::{json, Value};

use super::language::LanguageF;
use crate::error::{Error, Result};
use crate::gps::interpret;
use crate::hahn::{self, agree_to_depth, Budget, HahnSeries};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};

/// How an element of the generated set is built from earlier ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ElemExpr {
    X(usize),
    Scalar(Rational),
    Mono(Monomial),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    /// A unary generator applied to an element.
    App { gen: usize, arg: usize },
}

#[derive(Clone, Debug)]
pub struct Element {
    pub id: usize,
    pub expr: ElemExpr,
    pub value: HahnSeries,
    pub depth: usize,
}

/// Bounds on generation and checking.
#[derive(Clone, Debug)]
pub struct ClosureConfig {
    pub depth: usize,
    /// Terms compared for equality and scanned for probe points.
    pub probe_depth: usize,
    /// New elements kept per depth level, in enumeration order.
    pub max_per_level: usize,
    /// Total degree up to which restricted-series coefficients are inspected.
    pub horizon: u32,
    /// Steps allowed per element construction or per truncation check.
    pub budget: u64,
}

impl Default for ClosureConfig {
    fn default() -> Self {
        ClosureConfig {
            depth: 3,
            probe_depth: 10,
            max_per_level: 8,
            horizon: 8,
            budget: 400_000,
        }
    }
}

/// A bounded-depth slice of the algebra generated by `X`, the monomials and
/// the constants under ring operations and applications of the language.
pub struct GeneratedSet {
    pub group: Arc<MonomialGroup>,
    pub language: LanguageF,
    pub x: Vec<(String, HahnSeries)>,
    pub elements: Vec<Element>,
    pub config: ClosureConfig,
}

impl GeneratedSet {
    /// Terms compared when deciding equality. Probes come from the first
    /// `probe_depth` terms, so two extra terms separate every probed
    /// truncation from the series it was cut from.
    pub fn compare_depth(&self) -> usize {
        self.config.probe_depth + 2
    }

    /// An element agreeing with `f` to the compare depth.
    pub fn lookup(&self, f: &HahnSeries, budget: &Budget) -> Result<Option<usize>> {
        for e in &self.elements {
            if agree_to_depth(&e.value, f, self.compare_depth(), budget)? {
                return Ok(Some(e.id));
            }
        }
        Ok(None)
    }

    pub fn describe(&self, id: usize) -> String {
        match &self.elements[id].expr {
            ElemExpr::X(i) => self.x[*i].0.clone(),
            ElemExpr::Scalar(c) => rational::fmt(c),
            ElemExpr::Mono(m) => m.to_string(),
            ElemExpr::Add(a, b) => format!("({} + {})", self.describe(*a), self.describe(*b)),
            ElemExpr::Sub(a, b) => format!("({} - {})", self.describe(*a), self.describe(*b)),
            ElemExpr::Mul(a, b) => format!("{} * {}", self.describe(*a), self.describe(*b)),
            ElemExpr::App { gen, arg } => {
                format!("{}({})", self.language.generators[*gen].0, self.describe(*arg))
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "elements": self.elements.iter().map(|e| json!({
                "id": e.id,
                "depth": e.depth,
                "expr": self.describe(e.id),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Support monomials of `f` within its first `n` terms.
pub fn support(f: &HahnSeries, n: usize, budget: &Budget) -> Result<Vec<Monomial>> {
    Ok(f.observe(n, budget)?.0.into_iter().map(|t| t.monomial).collect())
}

/// Checks that every truncation of every `X` element at its probe points
/// (support monomials and their midpoints) is again in `X` or zero.
pub fn check_x_closed(x: &[(String, HahnSeries)], probe_depth: usize, budget: &Budget) -> Result<()> {
    for (name, f) in x {
        for m in probe_points(f, probe_depth, budget)? {
            let t = hahn::truncate(f, &m)?;
            if t.is_zero(budget)? {
                continue;
            }
            let mut found = false;
            for (_, g) in x {
                if agree_to_depth(g, &t, probe_depth, budget)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::Invalid(format!("X is not truncation-closed: {name} cut at {m}")));
            }
        }
    }
    Ok(())
}

/// Support monomials to the given depth plus the geometric midpoints of
/// adjacent ones.
pub fn probe_points(f: &HahnSeries, depth: usize, budget: &Budget) -> Result<Vec<Monomial>> {
    let s = support(f, depth, budget)?;
    let half = rational::ratio(1, 2);
    let mut out = Vec::new();
    for (i, m) in s.iter().enumerate() {
        out.push(m.clone());
        if let Some(n) = s.get(i + 1) {
            out.push(m.mul(n).pow(&half));
        }
    }
    Ok(out)
}

/// A valid argument for a generator: nonzero, infinitesimal, with positive
/// leading coefficient.
fn admissible_arg(f: &HahnSeries, budget: &Budget) -> Result<bool> {
    let Some(lead) = f.leading(budget)? else {
        return Ok(false);
    };
    Ok(!lead.monomial.is_identity() && lead.monomial < Monomial::identity(f.group()) && lead.coeff.is_positive())
}

/// Enumerates the generated set level by level.
pub fn generate(
    group: &Arc<MonomialGroup>,
    x: Vec<(String, HahnSeries)>,
    language: &LanguageF,
    config: ClosureConfig,
) -> Result<GeneratedSet> {
    let budget = Budget::new(config.budget);
    check_x_closed(&x, config.probe_depth, &budget)?;
    let mut set = GeneratedSet {
        group: group.clone(),
        language: language.clone(),
        x: x.clone(),
        elements: Vec::new(),
        config,
    };
    let mut level0: Vec<(ElemExpr, HahnSeries)> = Vec::new();
    for (i, (_, f)) in x.iter().enumerate() {
        level0.push((ElemExpr::X(i), f.clone()));
    }
    level0.push((ElemExpr::Scalar(Rational::one()), HahnSeries::constant(group, Rational::one())));
    for i in 0..group.rank() {
        let g = Monomial::generator(group, i);
        level0.push((ElemExpr::Mono(g.clone()), HahnSeries::monomial(&g)));
    }
    for (expr, value) in level0 {
        admit(&mut set, expr, value, 0)?;
    }
    for d in 1..=set.config.depth {
        let prev: Vec<usize> = set.elements.iter().filter(|e| e.depth == d - 1).map(|e| e.id).collect();
        let all: Vec<usize> = set.elements.iter().map(|e| e.id).collect();
        let mut cands: Vec<ElemExpr> = Vec::new();
        for &a in &prev {
            for gen in 0..language.generators.len() {
                cands.push(ElemExpr::App { gen, arg: a });
            }
        }
        for &a in &prev {
            for &b in &all {
                if set.elements[b].depth == d - 1 && b < a {
                    continue;
                }
                cands.push(ElemExpr::Mul(a, b));
                cands.push(ElemExpr::Add(a, b));
                cands.push(ElemExpr::Sub(a, b));
            }
        }
        let mut added = 0;
        for c in cands {
            if added == set.config.max_per_level {
                break;
            }
            let b = Budget::new(set.config.budget);
            match evaluate(&set, &c, &b) {
                Ok(Some(v)) => {
                    if admit(&mut set, c, v, d)? {
                        added += 1;
                    }
                }
                Ok(None) | Err(Error::BudgetExhausted) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(set)
}

fn evaluate(set: &GeneratedSet, c: &ElemExpr, budget: &Budget) -> Result<Option<HahnSeries>> {
    let val = |i: &usize| set.elements[*i].value.clone();
    Ok(Some(match c {
        ElemExpr::Add(a, b) => hahn::add(&val(a), &val(b))?,
        ElemExpr::Sub(a, b) => hahn::sub(&val(a), &val(b))?,
        ElemExpr::Mul(a, b) => hahn::mul(&val(a), &val(b))?,
        ElemExpr::App { gen, arg } => {
            let v = val(arg);
            if !admissible_arg(&v, budget)? {
                return Ok(None);
            }
            let f = &set.language.generators[*gen].1;
            let assign: BTreeMap<String, HahnSeries> = f.vars().iter().map(|x| (x.clone(), v.clone())).collect();
            interpret(f, &set.group, &assign, budget)?
        }
        _ => return Ok(None),
    }))
}

/// Adds an element unless it duplicates one already present or is zero.
fn admit(set: &mut GeneratedSet, expr: ElemExpr, value: HahnSeries, depth: usize) -> Result<bool> {
    let budget = Budget::new(set.config.budget);
    let fresh = match value.take_terms(set.config.probe_depth, &budget) {
        Ok(ts) => !ts.is_empty() && set.lookup(&value, &budget)?.is_none(),
        Err(Error::BudgetExhausted) => false,
        Err(e) => return Err(e),
    };
    if !fresh {
        return Ok(false);
    }
    let id = set.elements.len();
    set.elements.push(Element { id, expr, value, depth });
    Ok(true)
}
