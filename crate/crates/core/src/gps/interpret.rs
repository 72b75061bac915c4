use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use num_traits::Signed;

use super::expr::{degree, Gps, Poly};
use crate::error::{Error, Result};
use crate::hahn::{mul, normal_form, pow_unit, sum_family, Budget, FamilyGen, HahnSeries};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};

#[derive(Clone)]
enum Value {
    Zero,
    Normal { m: Monomial, series: HahnSeries },
}

struct Interp {
    f: Gps,
    group: Arc<MonomialGroup>,
    values: BTreeMap<String, Value>,
    powers: HashMap<(String, Rational), HahnSeries>,
    low_mono: Monomial,
    lowdeg: Rational,
    step: Rational,
    last: Option<Rational>,
    j: i64,
    /// Expansion up to a total degree, split by degree.
    window: Option<(Rational, Rc<BTreeMap<Rational, Poly>>)>,
    dead: bool,
}

impl Interp {
    fn grade(&self) -> Rational {
        &self.lowdeg + &self.step * rational::int(self.j)
    }

    fn finished(&self) -> bool {
        self.dead || self.last.as_ref().is_some_and(|l| self.grade() > *l)
    }

    fn power(&mut self, v: &str, e: &Rational, budget: &Budget) -> Result<HahnSeries> {
        let key = (v.to_string(), e.clone());
        if let Some(s) = self.powers.get(&key) {
            return Ok(s.clone());
        }
        let s = match &self.values[v] {
            Value::Zero => HahnSeries::zero(&self.group),
            Value::Normal { series, .. } => pow_unit(series, e, budget)?,
        };
        self.powers.insert(key, s.clone());
        Ok(s)
    }
}

impl FamilyGen for Interp {
    fn next_group(&mut self, budget: &Budget) -> Result<Option<Vec<HahnSeries>>> {
        if self.finished() {
            return Ok(None);
        }
        let d = self.grade();
        let fresh = match &self.window {
            Some((top, _)) => *top < d,
            None => true,
        };
        if fresh {
            let span = self
                .window
                .as_ref()
                .map_or(self.step.clone(), |(top, _)| (top - &self.lowdeg) * rational::int(2));
            let top = (&self.lowdeg + span).max(d.clone());
            let p = self.f.expand(&top, budget)?;
            let mut by_degree: BTreeMap<Rational, Poly> = BTreeMap::new();
            for (e, c) in p.iter() {
                by_degree.entry(degree(e)).or_default().insert(e.clone(), c.clone());
            }
            self.window = Some((top, Rc::new(by_degree)));
        }
        let window = self.window.as_ref().expect("window").1.clone();
        let mut group = Vec::new();
        for (e, c) in window.get(&d).into_iter().flatten() {
            let mut acc = HahnSeries::constant(&self.group, c.clone());
            for (v, a) in e {
                let p = self.power(v, a, budget)?;
                acc = mul(&acc, &p)?;
            }
            group.push(acc);
        }
        self.j += 1;
        Ok(Some(group))
    }

    fn bound(&mut self, _budget: &Budget) -> Result<Option<Monomial>> {
        if self.finished() {
            return Ok(None);
        }
        let s = self.grade() - &self.lowdeg;
        let best = self
            .values
            .values()
            .filter_map(|v| match v {
                Value::Normal { m, .. } => Some(m.pow(&s)),
                Value::Zero => None,
            })
            .max();
        Ok(best.map(|b| self.low_mono.mul(&b)))
    }
}

/// Evaluates `f` at Hahn-series points given per variable.
///
/// Non-classical variables need values `m(k + ε)` with `m < 1` and `k > 0`;
/// classical ones accept any infinitesimal value, zero included.
pub fn interpret(
    f: &Gps,
    group: &Arc<MonomialGroup>,
    assignment: &BTreeMap<String, HahnSeries>,
    budget: &Budget,
) -> Result<HahnSeries> {
    let meta = f.meta();
    let one = Monomial::identity(group);
    let mut values = BTreeMap::new();
    for v in &meta.vars {
        let s = assignment.get(v).ok_or_else(|| Error::UnknownVariable(v.clone()))?;
        MonomialGroup::check(group, s.group())?;
        let classical = meta.classical.contains(v);
        let val = match s.leading(budget)? {
            None if classical => Value::Zero,
            None => return Err(Error::NormalForm(format!("{v} is assigned zero"))),
            Some(_) => {
                let (m, k, _) = normal_form(s, budget)?;
                if m >= one {
                    return Err(Error::NormalForm(format!("value of {v} is not infinitesimal")));
                }
                if !classical && !k.is_positive() {
                    return Err(Error::NormalForm(format!("value of {v} is not positive")));
                }
                Value::Normal { m, series: s.clone() }
            }
        };
        values.insert(v.clone(), val);
    }
    let mut low_mono = one.clone();
    let mut dead = false;
    for (v, val) in &values {
        match val {
            Value::Zero => dead |= meta.low_of(v).is_positive(),
            Value::Normal { m, .. } => {
                low_mono = low_mono.mul(&m.pow(&meta.low_of(v)));
            }
        }
    }
    let any_normal = values.values().any(|v| matches!(v, Value::Normal { .. }));
    let last = if any_normal {
        meta.max_degree.clone()
    } else {
        Some(meta.low_degree())
    };
    let gen = Interp {
        f: f.clone(),
        group: group.clone(),
        values,
        powers: HashMap::new(),
        low_mono,
        lowdeg: meta.low_degree(),
        step: meta.step(),
        last,
        j: 0,
        window: None,
        dead,
    };
    Ok(sum_family(group, gen))
}
