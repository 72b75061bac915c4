use std::rc::Rc;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::{total, Rps};
use crate::error::{Error, Result};
use crate::gps::{degree, exp_of, Gps, Poly};
use crate::hahn::{sum_family, Budget, FamilyGen, HahnSeries};
use crate::order::{Monomial, MonomialGroup};
use crate::rational::{self, Rational};

/// A point `x = m·(a + ε)` for one variable.
#[derive(Clone)]
struct Point {
    var: String,
    a: Rational,
    m: Monomial,
}

/// `f(m_1(a_1 + ε_1), ..., m_n(a_n + ε_n), y)` as a series in the `ε_i`
/// followed by the remaining classical variables `y` (sorted).
///
/// Each `points` entry is `(x, a, m)` with `a > 0` and `m < 1`.
pub fn from_gps(
    f: &Gps,
    group: &Arc<MonomialGroup>,
    points: &[(String, Rational, Monomial)],
) -> Result<Rps> {
    let one = Monomial::identity(group);
    let mut pts = Vec::new();
    for (v, a, m) in points {
        MonomialGroup::check(group, m.group())?;
        if !a.is_positive() {
            return Err(Error::NormalForm(format!("{v}: constant {} is not positive", rational::fmt(a))));
        }
        if *m >= one {
            return Err(Error::NormalForm(format!("{v}: monomial {m} is not infinitesimal")));
        }
        pts.push(Point { var: v.clone(), a: a.clone(), m: m.clone() });
    }
    let meta = f.meta();
    let mut ys = Vec::new();
    for v in &meta.vars {
        if pts.iter().any(|p| &p.var == v) {
            continue;
        }
        if !meta.classical.contains(v) {
            return Err(Error::NotClassical(format!("{v} has no point and is not classical")));
        }
        ys.push(v.clone());
    }
    let mut low_mono = one.clone();
    let mut low_x = Rational::zero();
    for p in &pts {
        let l = meta.low_of(&p.var);
        low_mono = low_mono.mul(&p.m.pow(&l));
        low_x += l;
    }
    let all_classical = pts.iter().all(|p| meta.classical.contains(&p.var) || !meta.vars.contains(&p.var));
    let max_degree = match (&meta.max_degree, all_classical) {
        (Some(d), true) => Some(rational::floor_i64(d).max(0) as u32),
        _ => None,
    };
    let mut vars: Vec<String> = pts.iter().map(|p| format!("e_{}", p.var)).collect();
    vars.extend(ys.iter().cloned());
    let shared = Rc::new(Shared {
        f: f.clone(),
        group: group.clone(),
        pts,
        ys,
        low_mono: low_mono.clone(),
        low_x,
    });
    let label = format!("{:?}@point", f);
    let g = group.clone();
    Ok(Rps::from_fn(vars, group, max_degree, Some(low_mono), label, move |idx| {
        Ok(sum_family(
            &g,
            Grades {
                s: shared.clone(),
                idx: idx.to_vec(),
                j: 0,
                window: None,
            },
        ))
    }))
}

struct Shared {
    f: Gps,
    group: Arc<MonomialGroup>,
    pts: Vec<Point>,
    ys: Vec<String>,
    low_mono: Monomial,
    low_x: Rational,
}

/// Contributions to one coefficient, grouped by total degree of `f`.
struct Grades {
    s: Rc<Shared>,
    idx: Vec<u32>,
    j: i64,
    window: Option<(Rational, Rc<Poly>)>,
}

impl Grades {
    fn beta_degree(&self) -> Rational {
        rational::int(total(&self.idx[self.s.pts.len()..]) as i64)
    }

    fn grade(&self) -> Rational {
        let m = self.s.f.meta();
        m.low_degree() + m.step() * rational::int(self.j)
    }

    fn finished(&self) -> bool {
        let d = self.grade();
        if self.s.pts.is_empty() {
            return d > self.beta_degree();
        }
        self.s.f.meta().max_degree.as_ref().is_some_and(|l| d > *l)
    }
}

impl FamilyGen for Grades {
    fn next_group(&mut self, budget: &Budget) -> Result<Option<Vec<HahnSeries>>> {
        if self.finished() {
            return Ok(None);
        }
        let d = self.grade();
        let s = self.s.clone();
        let meta = s.f.meta();
        if self.window.as_ref().map_or(true, |(top, _)| *top < d) {
            let low = meta.low_degree();
            let span = self
                .window
                .as_ref()
                .map_or(meta.step(), |(top, _)| (top - &low) * rational::int(2));
            let top = (low + span).max(d.clone());
            let p = s.f.expand(&top, budget)?;
            self.window = Some((top, p));
        }
        let poly = self.window.as_ref().expect("window").1.clone();
        let (ms, betas) = self.idx.split_at(s.pts.len());
        let mut group = Vec::new();
        'terms: for (e, c) in poly.iter().filter(|(e, _)| degree(e) == d) {
            budget.tick()?;
            for (y, b) in s.ys.iter().zip(betas) {
                if exp_of(e, y) != rational::int(*b as i64) {
                    continue 'terms;
                }
            }
            let mut k = c.clone();
            let mut mono = Monomial::identity(&s.group);
            for (p, &m) in s.pts.iter().zip(ms) {
                let alpha = exp_of(e, &p.var);
                let b = rational::binom(&alpha, m);
                if b.is_zero() {
                    continue 'terms;
                }
                k *= b * rational::pow(&p.a, &(&alpha - rational::int(m as i64)))?;
                mono = mono.mul(&p.m.pow(&alpha));
            }
            group.push(HahnSeries::term_series(&mono, k));
        }
        self.j += 1;
        Ok(Some(group))
    }

    fn bound(&mut self, _budget: &Budget) -> Result<Option<Monomial>> {
        if self.finished() {
            return Ok(None);
        }
        let excess = (self.grade() - self.beta_degree() - &self.s.low_x).max(Rational::zero());
        let best = self.s.pts.iter().map(|p| p.m.pow(&excess)).max();
        Ok(Some(match best {
            Some(b) => self.s.low_mono.mul(&b),
            None => self.s.low_mono.clone(),
        }))
    }
}
