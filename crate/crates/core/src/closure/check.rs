use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};

use super::generate::{probe_points, ElemExpr, GeneratedSet};
use crate::error::{Error, Result};
use crate::hahn::{self, agree_to_depth, normal_form, Budget, HahnSeries};
use crate::order::{ArchClass, Monomial};
use crate::rational::{self, Rational};
use crate::rps::{
    from_gps, product_cuts, tc_composition_witness, AtomTag, Provenance, Recipe, Rps, WAtom, WitnessCtx,
};

/// A truncation expressed inside the generated set.
#[derive(Clone, Debug)]
pub struct ElemWitness {
    pub json: Value,
    pub value: HahnSeries,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Witnessed,
    Failed,
    Budget,
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub element_id: usize,
    pub element: String,
    pub probe: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub probe_depth: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub elements: usize,
    pub probes: usize,
    pub witnessed: usize,
    pub failed: usize,
    pub budget: usize,
    pub by_lookup: usize,
    pub structural: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub entries: Vec<Entry>,
    pub stats: Stats,
    pub probe_depth: usize,
}

impl ClosureReport {
    pub fn all_witnessed(&self) -> bool {
        self.stats.failed == 0 && self.stats.budget == 0
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

type Outcome = std::result::Result<ElemWitness, String>;

/// Builds truncation witnesses for elements of a generated set.
pub struct Checker<'a> {
    set: &'a GeneratedSet,
    budget: &'a Budget,
    memo: RefCell<HashMap<(usize, String), Outcome>>,
    max_level: usize,
}

/// The `B` side of an application: `ε = arg/m − k`, or the raw argument when
/// the variable is classical and no point is used.
#[derive(Clone)]
struct BInfo {
    arg: usize,
    point: Option<(Rational, Monomial)>,
    value: HahnSeries,
}

struct Oracle<'c, 'a> {
    checker: &'c Checker<'a>,
    b: HashMap<String, BInfo>,
    level: usize,
}

impl<'a> Checker<'a> {
    pub fn new(set: &'a GeneratedSet, budget: &'a Budget) -> Self {
        Checker {
            set,
            budget,
            memo: RefCell::new(HashMap::new()),
            max_level: 10,
        }
    }

    fn depth(&self) -> usize {
        self.set.config.probe_depth
    }

    fn element(&self, id: usize) -> ElemWitness {
        ElemWitness {
            json: json!({"kind": "element", "id": id, "expr": self.set.describe(id)}),
            value: self.set.elements[id].value.clone(),
        }
    }

    fn zero(&self) -> ElemWitness {
        ElemWitness {
            json: json!({"kind": "zero"}),
            value: HahnSeries::zero(&self.set.group),
        }
    }

    /// `e|m` for `m = None` is `e` itself.
    fn witness_opt(&self, id: usize, m: Option<&Monomial>, level: usize) -> Result<Outcome> {
        match m {
            None => Ok(Ok(self.element(id))),
            Some(m) => self.witness(id, m, level),
        }
    }

    /// A witness that `e_id|m` lies in the generated set: a lookup when the
    /// truncation already occurs, otherwise one built from the structure of `e`.
    pub fn witness(&self, id: usize, m: &Monomial, level: usize) -> Result<Outcome> {
        let key = (id, m.to_string());
        if let Some(o) = self.memo.borrow().get(&key) {
            return Ok(o.clone());
        }
        let out = self.witness_uncached(id, m, level)?;
        self.memo.borrow_mut().insert(key, out.clone());
        Ok(out)
    }

    fn witness_uncached(&self, id: usize, m: &Monomial, level: usize) -> Result<Outcome> {
        if level > self.max_level {
            return Err(Error::RecursionLimit(format!("element {id} at {m}")));
        }
        let e = &self.set.elements[id];
        let target = hahn::truncate(&e.value, m)?;
        if target.is_zero(self.budget)? {
            return Ok(Ok(self.zero()));
        }
        if let Some(j) = self.set.lookup(&target, self.budget)? {
            return Ok(Ok(self.element(j)));
        }
        let one = Monomial::identity(&self.set.group);
        Ok(match &e.expr {
            ElemExpr::X(i) => Err(format!("X element {} cut at {m} is not in X", self.set.x[*i].0)),
            ElemExpr::Scalar(c) => Ok(if one > *m {
                ElemWitness {
                    json: json!({"kind": "scalar", "value": rational::fmt(c)}),
                    value: e.value.clone(),
                }
            } else {
                self.zero()
            }),
            ElemExpr::Mono(n) => Ok(if n > m { self.element(id) } else { self.zero() }),
            ElemExpr::Add(a, b) | ElemExpr::Sub(a, b) => {
                let wa = match self.witness(*a, m, level + 1)? {
                    Ok(w) => w,
                    Err(r) => return Ok(Err(r)),
                };
                let wb = match self.witness(*b, m, level + 1)? {
                    Ok(w) => w,
                    Err(r) => return Ok(Err(r)),
                };
                let sub = matches!(e.expr, ElemExpr::Sub(..));
                let value = if sub { hahn::sub(&wa.value, &wb.value)? } else { hahn::add(&wa.value, &wb.value)? };
                Ok(ElemWitness {
                    json: json!({"kind": if sub { "difference" } else { "sum" }, "children": [wa.json, wb.json]}),
                    value,
                })
            }
            ElemExpr::Mul(a, b) => self.product(*a, *b, m, level)?,
            ElemExpr::App { gen, arg } => self.application(*gen, *arg, m, level)?,
        })
    }

    /// `(ab)|m = Σ_j a|n_j · (b|p_{j+1} − b|p_j)`
    fn product(&self, a: usize, b: usize, m: &Monomial, level: usize) -> Result<Outcome> {
        let va = Rps::constant(&self.set.elements[a].value, self.budget)?;
        let vb = Rps::constant(&self.set.elements[b].value, self.budget)?;
        let h = self.set.config.horizon;
        let (Some(ma), Some(mb)) = (va.supp_max(h, self.budget)?, vb.supp_max(h, self.budget)?) else {
            return Ok(Ok(self.zero()));
        };
        let cap = 4 * self.depth();
        let r = va.supp_probe_below(&m.div(&mb), h, cap, self.budget)?.monomials;
        let s = vb.supp_probe_below(&m.div(&ma), h, cap, self.budget)?.monomials;
        let mut parts = Vec::new();
        let mut value = HahnSeries::zero(&self.set.group);
        for c in product_cuts(&r, &s, m)? {
            let left = self.witness_opt(a, c.n.as_ref(), level + 1)?;
            let hi = self.witness_opt(b, c.p_next.as_ref(), level + 1)?;
            let lo = self.witness(b, &c.p, level + 1)?;
            let (left, hi, lo) = match (left, hi, lo) {
                (Ok(x), Ok(y), Ok(z)) => (x, y, z),
                (Err(r), _, _) | (_, Err(r), _) | (_, _, Err(r)) => return Ok(Err(r)),
            };
            value = hahn::add(&value, &hahn::mul(&left.value, &hahn::sub(&hi.value, &lo.value)?)?)?;
            parts.push(json!({
                "kind": "product",
                "children": [left.json, {"kind": "difference", "children": [hi.json, lo.json]}],
            }));
        }
        Ok(Ok(ElemWitness {
            json: json!({"kind": "sum", "children": parts}),
            value,
        }))
    }

    /// `f(arg)|m` through the restricted series `f_{am}` composed with `ε`.
    fn application(&self, gen: usize, arg: usize, m: &Monomial, level: usize) -> Result<Outcome> {
        let (name, f) = &self.set.language.generators[gen];
        let va = self.set.elements[arg].value.clone();
        let x = f.vars().iter().next().cloned().ok_or_else(|| Error::Invalid(format!("{name} has no variable")))?;
        let (mu, k, eps) = normal_form(&va, self.budget)?;
        let classical = f.meta().classical.contains(&x);
        let (points, info) = if k.is_positive() {
            (
                vec![(x.clone(), k.clone(), mu.clone())],
                BInfo {
                    arg,
                    point: Some((k.clone(), mu.clone())),
                    value: eps,
                },
            )
        } else if classical {
            (vec![], BInfo { arg, point: None, value: va.clone() })
        } else {
            return Ok(Err(format!("argument of {name} has non-positive leading coefficient")));
        };
        let fa = from_gps(f, &self.set.group, &points)?;
        let bname = format!("eps{arg}");
        let g = Rps::constant(&info.value, self.budget)?;
        let atoms_f = WAtom::new(AtomTag::A, &format!("{name}@{arg}"), fa);
        let atoms_g = WAtom::new(AtomTag::B, &bname, g);
        let mut ctx = WitnessCtx::new::<&str>(&self.set.group, &[], self.budget);
        ctx.depth = self.depth();
        ctx.horizon = self.set.config.horizon;
        let oracle = Oracle {
            checker: self,
            b: [(bname, info)].into(),
            level,
        };
        let report = match tc_composition_witness(&ctx, &atoms_f, &[atoms_g], m, &oracle) {
            Ok(r) => r,
            Err(Error::RecursionLimit(s)) => return Ok(Err(format!("recursion limit: {s}"))),
            Err(e) => return Err(e),
        };
        if !report.refused.is_empty() {
            let r = &report.refused;
            let more = if r.len() > 2 { format!(" and {} more", r.len() - 2) } else { String::new() };
            return Ok(Err(format!("oracle refused {}{more}", r[..r.len().min(2)].join(", "))));
        }
        if !report.value_ok {
            return Ok(Err("composition witness does not match".into()));
        }
        let value = report.witness.value(&ctx)?.coeff(&[])?;
        Ok(Ok(ElemWitness {
            json: json!({"kind": "composition", "generator": name, "arg": arg, "witness": report.witness.to_json()}),
            value,
        }))
    }

    /// Witnesses `e|m` and checks the result against direct truncation.
    pub fn check(&self, id: usize, m: &Monomial) -> Entry {
        let e = &self.set.elements[id];
        let mut entry = Entry {
            element_id: id,
            element: self.set.describe(id),
            probe: m.to_string(),
            status: Status::Failed,
            method: None,
            witness: None,
            reason: None,
            probe_depth: self.depth(),
        };
        let res = self.witness(id, m, 0).and_then(|o| match o {
            Ok(w) => {
                let target = hahn::truncate(&e.value, m)?;
                let ok = agree_to_depth(&w.value, &target, self.set.compare_depth(), self.budget)?;
                Ok(if ok { Ok(w) } else { Err("witness value differs from the truncation".to_string()) })
            }
            Err(r) => Ok(Err(r)),
        });
        match res {
            Ok(Ok(w)) => {
                let lookup = matches!(w.json.get("kind").and_then(Value::as_str), Some("element" | "zero"));
                entry.status = Status::Witnessed;
                entry.method = Some(if lookup { "lookup" } else { "structural" }.into());
                entry.witness = Some(w.json);
            }
            Ok(Err(r)) => entry.reason = Some(r),
            Err(Error::BudgetExhausted) => entry.status = Status::Budget,
            Err(e) => entry.reason = Some(e.to_string()),
        }
        entry
    }
}

impl Oracle<'_, '_> {
    /// Whether `h|cut` lies in the generated set, `h` being what `recipe` denotes.
    fn b_cut(&self, recipe: &Recipe, cut: Option<&Monomial>) -> Result<bool> {
        let budget = self.checker.budget;
        Ok(match recipe {
            Recipe::Base(n) => {
                let Some(info) = self.b.get(n) else {
                    return Ok(false);
                };
                let Some(c) = cut else {
                    return Ok(true);
                };
                let one = Monomial::identity(c.group());
                match &info.point {
                    // ε is infinitesimal, so ε|c = 0 for c >= 1
                    Some(_) if *c >= one => true,
                    Some((_, mu)) => self.checker.witness(info.arg, &c.mul(mu), self.level + 1)?.is_ok(),
                    None => self.checker.witness(info.arg, c, self.level + 1)?.is_ok(),
                }
            }
            Recipe::Trunc(r, n) => {
                let c = match cut {
                    Some(c) => c.max(n).clone(),
                    None => n.clone(),
                };
                self.b_cut(r, Some(&c))?
            }
            Recipe::TruncV(r, v) => {
                let h = self.eval(r)?;
                match v_cut(&h, *v, 4 * self.checker.depth(), budget)? {
                    None => self.b_cut(r, cut)?,
                    Some(n) => {
                        let c = match cut {
                            Some(c) => c.max(&n).clone(),
                            None => n,
                        };
                        self.b_cut(r, Some(&c))?
                    }
                }
            }
            Recipe::Sub(a, b) => self.b_cut(a, cut)? && self.b_cut(b, cut)?,
            Recipe::Scale(_, r) => self.b_cut(r, cut)?,
            Recipe::MulMono(mu, r) => self.b_cut(r, cut.map(|c| c.div(mu)).as_ref())?,
            Recipe::Deriv(..) => false,
        })
    }

    fn eval(&self, recipe: &Recipe) -> Result<HahnSeries> {
        Ok(match recipe {
            Recipe::Base(n) => self
                .b
                .get(n)
                .map(|i| i.value.clone())
                .ok_or_else(|| Error::Oracle(format!("unknown atom {n}")))?,
            Recipe::Trunc(r, n) => hahn::truncate(&self.eval(r)?, n)?,
            Recipe::TruncV(r, v) => hahn::v_truncate(&self.eval(r)?, *v),
            Recipe::Sub(a, b) => hahn::sub(&self.eval(a)?, &self.eval(b)?)?,
            Recipe::Scale(c, r) => hahn::scalar_mul(c, &self.eval(r)?),
            Recipe::MulMono(m, r) => hahn::mul_monomial(m, &self.eval(r)?)?,
            Recipe::Deriv(..) => return Err(Error::Oracle("derivative of an argument".into())),
        })
    }
}

/// For infinitesimal `h`, `h‖v = h|n` where `n` is the first support monomial
/// of class `<= v`; `None` when there is none within `cap` terms.
fn v_cut(h: &HahnSeries, v: ArchClass, cap: usize, budget: &Budget) -> Result<Option<Monomial>> {
    for i in 0..cap {
        let Some(t) = h.term(i, budget)? else {
            return Ok(None);
        };
        if !t.monomial.is_identity() && t.monomial.arch_class() <= v {
            return Ok(Some(t.monomial));
        }
    }
    Ok(None)
}

impl Provenance for Oracle<'_, '_> {
    fn admits(&self, tag: AtomTag, recipe: &Recipe) -> bool {
        let fl = &self.checker.set.language.flags;
        match tag {
            AtomTag::A => a_admits(fl, recipe),
            AtomTag::B => self.b_cut(recipe, None).unwrap_or(false),
        }
    }
}

/// Instantiated language members are closed under whatever the flags grant.
fn a_admits(fl: &super::language::Flags, recipe: &Recipe) -> bool {
    match recipe {
        Recipe::Base(_) => true,
        Recipe::Trunc(r, _) | Recipe::TruncV(r, _) => fl.partial_truncation && a_admits(fl, r),
        Recipe::Deriv(r, _) => fl.renorm_derivative && a_admits(fl, r),
        Recipe::MulMono(_, r) | Recipe::Scale(_, r) => fl.ring && a_admits(fl, r),
        Recipe::Sub(a, b) => fl.ring && a_admits(fl, a) && a_admits(fl, b),
    }
}

/// Tries every element at every probe point; with `probes = None` the probe
/// points are each element's support monomials and their midpoints.
pub fn check_truncation_closed(set: &GeneratedSet, probes: Option<&[Monomial]>) -> Result<ClosureReport> {
    let mut entries = Vec::new();
    let mut stats = Stats {
        elements: set.elements.len(),
        ..Stats::default()
    };
    for e in &set.elements {
        let budget = Budget::new(set.config.budget);
        let points = match probes {
            Some(p) => p.to_vec(),
            None => match probe_points(&e.value, set.config.probe_depth, &budget) {
                Ok(p) => p,
                Err(Error::BudgetExhausted) => vec![],
                Err(err) => return Err(err),
            },
        };
        for m in points {
            let budget = Budget::new(set.config.budget);
            let checker = Checker::new(set, &budget);
            let entry = checker.check(e.id, &m);
            stats.probes += 1;
            match entry.status {
                Status::Witnessed => {
                    stats.witnessed += 1;
                    if entry.method.as_deref() == Some("lookup") {
                        stats.by_lookup += 1;
                    } else {
                        stats.structural += 1;
                    }
                }
                Status::Failed => stats.failed += 1,
                Status::Budget => stats.budget += 1,
            }
            entries.push(entry);
        }
    }
    Ok(ClosureReport {
        entries,
        stats,
        probe_depth: set.config.probe_depth,
    })
}
