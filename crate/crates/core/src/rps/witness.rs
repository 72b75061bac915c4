//! Witness expressions for truncations of compositions.

use std::cell::{Cell, OnceCell};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::tc_product::product_cuts;
use super::{indices_up_to, MultiIndex, Rps, SuppProbe};
use crate::error::{Error, Result};
use crate::hahn::Budget;
use crate::order::{ArchClass, Monomial, MonomialGroup};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomTag {
    /// The outer algebra (series in `x`).
    A,
    /// Composable arguments (series in `y`).
    B,
}

/// How an atom was obtained from named base elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Base(String),
    Trunc(Box<Recipe>, Monomial),
    TruncV(Box<Recipe>, ArchClass),
    Deriv(Box<Recipe>, usize),
    MulMono(Monomial, Box<Recipe>),
    Scale(Rational, Box<Recipe>),
    Sub(Box<Recipe>, Box<Recipe>),
}

impl Recipe {
    pub fn base(name: &str) -> Recipe {
        Recipe::Base(name.to_string())
    }

    /// The named base elements this recipe starts from.
    pub fn bases(&self) -> Vec<&str> {
        match self {
            Recipe::Base(n) => vec![n.as_str()],
            Recipe::Trunc(r, _) | Recipe::TruncV(r, _) | Recipe::Deriv(r, _) => r.bases(),
            Recipe::MulMono(_, r) | Recipe::Scale(_, r) => r.bases(),
            Recipe::Sub(a, b) => {
                let mut v = a.bases();
                v.extend(b.bases());
                v
            }
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Base(n) => write!(f, "{n}"),
            Recipe::Trunc(r, m) => write!(f, "trunc({r}, {m})"),
            Recipe::TruncV(r, v) => write!(f, "vtrunc({r}, {v})"),
            Recipe::Deriv(r, i) => write!(f, "d{i}({r})"),
            Recipe::MulMono(m, r) => write!(f, "{m}*{r}"),
            Recipe::Scale(c, r) => write!(f, "{}*{r}", rational::fmt(c)),
            Recipe::Sub(a, b) => write!(f, "({a} - {b})"),
        }
    }
}

/// A leaf of a witness: a tagged element together with its value.
#[derive(Clone, Debug)]
pub struct WAtom {
    pub tag: AtomTag,
    pub recipe: Recipe,
    pub value: Rps,
}

impl WAtom {
    pub fn new(tag: AtomTag, name: &str, value: Rps) -> WAtom {
        WAtom {
            tag,
            recipe: Recipe::base(name),
            value,
        }
    }

    fn derived(&self, recipe: Recipe, value: Rps) -> WAtom {
        WAtom {
            tag: self.tag,
            recipe,
            value,
        }
    }

    pub fn trunc(&self, m: &Monomial) -> Result<WAtom> {
        Ok(self.derived(
            Recipe::Trunc(Box::new(self.recipe.clone()), m.clone()),
            self.value.coeff_trunc(m)?,
        ))
    }

    pub fn trunc_opt(&self, m: Option<&Monomial>) -> Result<WAtom> {
        match m {
            Some(m) => self.trunc(m),
            None => Ok(self.clone()),
        }
    }

    pub fn trunc_v(&self, v: ArchClass) -> WAtom {
        self.derived(
            Recipe::TruncV(Box::new(self.recipe.clone()), v),
            self.value.coeff_trunc_v(v),
        )
    }

    pub fn deriv(&self, i: usize) -> Result<WAtom> {
        Ok(self.derived(
            Recipe::Deriv(Box::new(self.recipe.clone()), i),
            self.value.derivative(i)?,
        ))
    }

    pub fn mul_mono(&self, m: &Monomial) -> Result<WAtom> {
        Ok(self.derived(
            Recipe::MulMono(m.clone(), Box::new(self.recipe.clone())),
            self.value.mul_monomial(m)?,
        ))
    }

    pub fn scale(&self, c: &Rational) -> WAtom {
        self.derived(
            Recipe::Scale(c.clone(), Box::new(self.recipe.clone())),
            self.value.scale(c),
        )
    }

    pub fn sub(&self, other: &WAtom) -> Result<WAtom> {
        Ok(self.derived(
            Recipe::Sub(Box::new(self.recipe.clone()), Box::new(other.recipe.clone())),
            self.value.sub(&other.value)?,
        ))
    }

    fn json(&self) -> Value {
        json!({
            "kind": "atom",
            "tag": format!("{:?}", self.tag),
            "recipe": self.recipe.to_string(),
        })
    }
}

/// Decides whether a recipe yields an element of the tagged set.
pub trait Provenance {
    fn admits(&self, tag: AtomTag, recipe: &Recipe) -> bool;
}

/// Membership by construction: named bases closed under the listed operations.
/// Both sets are taken to be closed under scaling, subtraction and
/// multiplication by monomials.
#[derive(Clone, Debug, Default)]
pub struct ClosedUnder {
    pub a_bases: BTreeSet<String>,
    pub b_bases: BTreeSet<String>,
    pub truncations: bool,
    pub derivatives: bool,
}

impl ClosedUnder {
    pub fn new<S: AsRef<str>>(a: &[S], b: &[S]) -> ClosedUnder {
        ClosedUnder {
            a_bases: a.iter().map(|s| s.as_ref().to_string()).collect(),
            b_bases: b.iter().map(|s| s.as_ref().to_string()).collect(),
            truncations: true,
            derivatives: true,
        }
    }
}

impl Provenance for ClosedUnder {
    fn admits(&self, tag: AtomTag, recipe: &Recipe) -> bool {
        match recipe {
            Recipe::Base(n) => match tag {
                AtomTag::A => self.a_bases.contains(n),
                AtomTag::B => self.b_bases.contains(n),
            },
            Recipe::Trunc(r, _) | Recipe::TruncV(r, _) => self.truncations && self.admits(tag, r),
            Recipe::Deriv(r, _) => tag == AtomTag::A && self.derivatives && self.admits(tag, r),
            Recipe::MulMono(_, r) | Recipe::Scale(_, r) => self.admits(tag, r),
            Recipe::Sub(a, b) => self.admits(tag, a) && self.admits(tag, b),
        }
    }
}

#[derive(Clone, Debug)]
pub enum WKind {
    Atom(WAtom),
    Scalar(Rational),
    Mono(Monomial),
    Sum(Vec<WExpr>),
    Prod(WExpr, WExpr),
    Scale(Rational, WExpr),
    MonoScale(Monomial, WExpr),
    Compose(WAtom, Vec<WAtom>),
}

struct WNode {
    kind: WKind,
    value: OnceCell<Rps>,
}

/// An element of the algebra generated by `A ∘ B`, `B`, constants and monomials.
#[derive(Clone)]
pub struct WExpr(Rc<WNode>);

impl fmt::Debug for WExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl WExpr {
    fn wrap(kind: WKind) -> WExpr {
        WExpr(Rc::new(WNode {
            kind,
            value: OnceCell::new(),
        }))
    }

    pub fn kind(&self) -> &WKind {
        &self.0.kind
    }

    pub fn atom(a: WAtom) -> WExpr {
        WExpr::wrap(WKind::Atom(a))
    }

    pub fn scalar(c: Rational) -> WExpr {
        WExpr::wrap(WKind::Scalar(c))
    }

    pub fn zero() -> WExpr {
        WExpr::scalar(Rational::zero())
    }

    pub fn mono(m: Monomial) -> WExpr {
        WExpr::wrap(WKind::Mono(m))
    }

    pub fn is_zero(&self) -> bool {
        match self.kind() {
            WKind::Scalar(c) => c.is_zero(),
            WKind::Sum(xs) => xs.is_empty(),
            _ => false,
        }
    }

    pub fn sum(items: Vec<WExpr>) -> WExpr {
        let mut out = Vec::new();
        for e in items {
            match e.kind() {
                _ if e.is_zero() => {}
                WKind::Sum(xs) => out.extend(xs.iter().cloned()),
                _ => out.push(e),
            }
        }
        match out.len() {
            0 => WExpr::zero(),
            1 => out.pop().expect("one item"),
            _ => WExpr::wrap(WKind::Sum(out)),
        }
    }

    pub fn prod(a: WExpr, b: WExpr) -> WExpr {
        if a.is_zero() || b.is_zero() {
            return WExpr::zero();
        }
        let is_one = |e: &WExpr| matches!(e.kind(), WKind::Scalar(c) if c.is_one());
        if is_one(&a) {
            return b;
        }
        if is_one(&b) {
            return a;
        }
        WExpr::wrap(WKind::Prod(a, b))
    }

    pub fn scale(c: Rational, e: WExpr) -> WExpr {
        if c.is_zero() || e.is_zero() {
            return WExpr::zero();
        }
        if c.is_one() {
            return e;
        }
        WExpr::wrap(WKind::Scale(c, e))
    }

    pub fn mono_scale(m: Monomial, e: WExpr) -> WExpr {
        if e.is_zero() {
            return e;
        }
        if m.is_identity() {
            return e;
        }
        WExpr::wrap(WKind::MonoScale(m, e))
    }

    pub fn compose(f: WAtom, gs: Vec<WAtom>) -> WExpr {
        WExpr::wrap(WKind::Compose(f, gs))
    }

    /// The series this expression denotes, in the context's variables.
    pub fn value(&self, ctx: &WitnessCtx) -> Result<Rps> {
        if let Some(v) = self.0.value.get() {
            return Ok(v.clone());
        }
        let one = Monomial::identity(&ctx.group);
        let v = match self.kind() {
            WKind::Atom(a) => a.value.clone(),
            WKind::Scalar(c) => Rps::scalar(&ctx.yvars, &one, c.clone()),
            WKind::Mono(m) => Rps::scalar(&ctx.yvars, m, Rational::one()),
            WKind::Sum(xs) => {
                let mut acc = Rps::zero(&ctx.yvars, &ctx.group);
                for x in xs {
                    acc = acc.add(&x.value(ctx)?)?;
                }
                acc
            }
            WKind::Prod(a, b) => a.value(ctx)?.mul(&b.value(ctx)?)?,
            WKind::Scale(c, e) => e.value(ctx)?.scale(c),
            WKind::MonoScale(m, e) => e.value(ctx)?.mul_monomial(m)?,
            WKind::Compose(f, gs) => compose_value(ctx, f, gs)?,
        };
        let _ = self.0.value.set(v.clone());
        Ok(v)
    }

    /// Every atom in the tree, with compositions contributing their `A` atom
    /// and their `B` arguments.
    pub fn atoms(&self) -> Vec<WAtom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<WAtom>) {
        match self.kind() {
            WKind::Atom(a) => out.push(a.clone()),
            WKind::Scalar(_) | WKind::Mono(_) => {}
            WKind::Sum(xs) => xs.iter().for_each(|x| x.collect_atoms(out)),
            WKind::Prod(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            WKind::Scale(_, e) | WKind::MonoScale(_, e) => e.collect_atoms(out),
            WKind::Compose(f, gs) => {
                out.push(f.clone());
                out.extend(gs.iter().cloned());
            }
        }
    }

    /// Number of nodes, atoms included.
    pub fn size(&self) -> usize {
        1 + match self.kind() {
            WKind::Atom(_) | WKind::Scalar(_) | WKind::Mono(_) => 0,
            WKind::Sum(xs) => xs.iter().map(WExpr::size).sum(),
            WKind::Prod(a, b) => a.size() + b.size(),
            WKind::Scale(_, e) | WKind::MonoScale(_, e) => e.size(),
            WKind::Compose(_, gs) => 1 + gs.len(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self.kind() {
            WKind::Atom(a) => a.json(),
            WKind::Scalar(c) => json!({"kind": "scalar", "value": rational::fmt(c)}),
            WKind::Mono(m) => json!({"kind": "monomial", "value": m.to_string()}),
            WKind::Sum(xs) => json!({
                "kind": "sum",
                "children": xs.iter().map(WExpr::to_json).collect::<Vec<_>>(),
            }),
            WKind::Prod(a, b) => json!({"kind": "product", "children": [a.to_json(), b.to_json()]}),
            WKind::Scale(c, e) => json!({"kind": "scale", "factor": rational::fmt(c), "child": e.to_json()}),
            WKind::MonoScale(m, e) => {
                json!({"kind": "monomial_scale", "monomial": m.to_string(), "child": e.to_json()})
            }
            WKind::Compose(f, gs) => json!({
                "kind": "compose",
                "f": f.json(),
                "args": gs.iter().map(WAtom::json).collect::<Vec<_>>(),
            }),
        }
    }
}

fn compose_value(ctx: &WitnessCtx, f: &WAtom, gs: &[WAtom]) -> Result<Rps> {
    if gs.is_empty() {
        return f.value.lift(&ctx.yvars);
    }
    let gv: Vec<Rps> = gs.iter().map(|g| g.value.clone()).collect();
    f.value.compose(&gv, ctx.budget)
}

/// Shared settings for building and checking witnesses.
pub struct WitnessCtx<'a> {
    pub group: Arc<MonomialGroup>,
    /// Variables of the `B` arguments.
    pub yvars: Vec<String>,
    pub budget: &'a Budget,
    /// Terms compared per coefficient when checking a witness.
    pub depth: usize,
    /// Total degree up to which coefficients are inspected.
    pub horizon: u32,
    /// Terms scanned per coefficient while locating cut points.
    pub scan: usize,
    pub max_recursion: usize,
    /// Case 1 (Taylor) and Case 2 (split) steps taken so far.
    pub cases: Cell<(usize, usize)>,
}

impl<'a> WitnessCtx<'a> {
    pub fn new<S: AsRef<str>>(group: &Arc<MonomialGroup>, yvars: &[S], budget: &'a Budget) -> Self {
        WitnessCtx {
            group: group.clone(),
            yvars: yvars.iter().map(|v| v.as_ref().to_string()).collect(),
            budget,
            depth: 12,
            horizon: 6,
            scan: 64,
            max_recursion: 32,
            cases: Cell::new((0, 0)),
        }
    }

    fn probe_below(&self, f: &Rps, threshold: &Monomial) -> Result<SuppProbe> {
        f.supp_probe_below(threshold, self.horizon, self.scan, self.budget)
    }

    fn one(&self) -> Monomial {
        Monomial::identity(&self.group)
    }
}

/// A witness for `f(g)‖m` together with its verification.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub witness: WExpr,
    /// The witness agrees with `f(g)‖m` to the context's depth and horizon.
    pub value_ok: bool,
    /// Atoms refused by the provenance oracle.
    pub refused: Vec<String>,
    /// Case 1 and Case 2 steps taken while building this witness.
    pub cases: (usize, usize),
}

impl WitnessReport {
    pub fn ok(&self) -> bool {
        self.value_ok && self.refused.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value_ok": self.value_ok,
            "refused": self.refused,
            "cases": [self.cases.0, self.cases.1],
            "size": self.witness.size(),
            "witness": self.witness.to_json(),
        })
    }
}

/// Builds a witness for `f(g)‖m` and checks it against direct
/// composition and truncation, and its atoms against `prov`.
pub fn tc_composition_witness(
    ctx: &WitnessCtx,
    f: &WAtom,
    gs: &[WAtom],
    m: &Monomial,
    prov: &dyn Provenance,
) -> Result<WitnessReport> {
    MonomialGroup::check(&ctx.group, m.group())?;
    if gs.len() != f.value.vars().len() {
        return Err(Error::Invalid(format!(
            "{} arguments for {} variables",
            gs.len(),
            f.value.vars().len()
        )));
    }
    for g in gs {
        if g.value.vars() != ctx.yvars.as_slice() {
            return Err(Error::Invalid(format!("argument {} is not in {:?}", g.recipe, ctx.yvars)));
        }
        if g.value.max_degree().is_none() {
            return Err(Error::InfiniteSupport(format!(
                "argument {} needs a finite degree in {:?}",
                g.recipe, ctx.yvars
            )));
        }
    }
    let before = ctx.cases.get();
    let w = build(ctx, f, gs, m, 0)?;
    let after = ctx.cases.get();
    let target = compose_value(ctx, f, gs)?.coeff_trunc(m)?;
    let value_ok = w.value(ctx)?.agree(&target, ctx.depth, ctx.horizon, ctx.budget)?;
    let mut refused = Vec::new();
    for a in w.atoms() {
        let composable = a.tag == AtomTag::A || a.value.is_composable(ctx.budget)?;
        if !prov.admits(a.tag, &a.recipe) || !composable {
            let s = format!("{:?}:{}", a.tag, a.recipe);
            if !refused.contains(&s) {
                refused.push(s);
            }
        }
    }
    Ok(WitnessReport {
        witness: w,
        value_ok,
        refused,
        cases: (after.0 - before.0, after.1 - before.1),
    })
}

/// A witness for `e‖m`.
pub fn trunc_witness(ctx: &WitnessCtx, e: &WExpr, m: &Monomial, level: usize) -> Result<WExpr> {
    if level > ctx.max_recursion {
        return Err(Error::RecursionLimit(format!("truncation at {m}")));
    }
    Ok(match e.kind() {
        WKind::Atom(a) => WExpr::atom(a.trunc(m)?),
        WKind::Scalar(c) => {
            if ctx.one() > *m {
                WExpr::scalar(c.clone())
            } else {
                WExpr::zero()
            }
        }
        WKind::Mono(n) => {
            if n > m {
                e.clone()
            } else {
                WExpr::zero()
            }
        }
        WKind::Sum(xs) => WExpr::sum(
            xs.iter()
                .map(|x| trunc_witness(ctx, x, m, level + 1))
                .collect::<Result<_>>()?,
        ),
        WKind::Scale(c, x) => WExpr::scale(c.clone(), trunc_witness(ctx, x, m, level + 1)?),
        WKind::MonoScale(n, x) => WExpr::mono_scale(n.clone(), trunc_witness(ctx, x, &m.div(n), level + 1)?),
        WKind::Prod(a, b) => product(ctx, a, b, m, level)?,
        WKind::Compose(f, gs) => build(ctx, f, gs, m, level + 1)?,
    })
}

fn trunc_opt(ctx: &WitnessCtx, e: &WExpr, m: Option<&Monomial>, level: usize) -> Result<WExpr> {
    match m {
        Some(m) => trunc_witness(ctx, e, m, level),
        None => Ok(e.clone()),
    }
}

/// `(ab)‖m = Σ_j a‖n_j · (b‖p_{j+1} − b‖p_j)`
fn product(ctx: &WitnessCtx, a: &WExpr, b: &WExpr, m: &Monomial, level: usize) -> Result<WExpr> {
    let (fa, fb) = (a.value(ctx)?, b.value(ctx)?);
    let (Some(ma), Some(mb)) = (fa.supp_max(ctx.horizon, ctx.budget)?, fb.supp_max(ctx.horizon, ctx.budget)?) else {
        return Ok(WExpr::zero());
    };
    let r = ctx.probe_below(&fa, &m.div(&mb))?.monomials;
    let s = ctx.probe_below(&fb, &m.div(&ma))?.monomials;
    let mut terms = Vec::new();
    for c in product_cuts(&r, &s, m)? {
        let left = trunc_opt(ctx, a, c.n.as_ref(), level + 1)?;
        let hi = trunc_opt(ctx, b, c.p_next.as_ref(), level + 1)?;
        let lo = trunc_witness(ctx, b, &c.p, level + 1)?;
        let right = WExpr::sum(vec![hi, WExpr::scale(rational::int(-1), lo)]);
        terms.push(WExpr::prod(left, right));
    }
    Ok(WExpr::sum(terms))
}

/// `class(s) <= v` for a non-identity `s`.
fn coarse(s: &Monomial, v: ArchClass) -> bool {
    !s.is_identity() && s.arch_class() <= v
}

/// The witness construction for `f(g)‖m`, following the two cases of the
/// classical argument after normalizing `max Supp f <= 1`.
fn build(ctx: &WitnessCtx, f: &WAtom, gs: &[WAtom], m: &Monomial, level: usize) -> Result<WExpr> {
    if level > ctx.max_recursion {
        return Err(Error::RecursionLimit(format!("composition truncated at {m}")));
    }
    let one = ctx.one();
    let Some(top) = f.value.supp_max(ctx.horizon, ctx.budget)? else {
        return Ok(WExpr::zero());
    };
    if top > one {
        let inner = build(ctx, &f.mul_mono(&top.inv())?, gs, &m.div(&top), level + 1)?;
        return Ok(WExpr::mono_scale(top, inner));
    }
    if *m >= one {
        return Ok(WExpr::zero());
    }
    let v = m.arch_class();
    let mut gmax: Option<Monomial> = None;
    let mut coarse_max: Option<Monomial> = None;
    for g in gs {
        // only the largest coarse element matters, so stop at the first one
        let p = g.value.supp_probe(ctx.scan, ctx.horizon, ctx.budget)?;
        for s in &p.monomials {
            if !s.is_identity() && gmax.as_ref().map_or(true, |x| s > x) {
                gmax = Some(s.clone());
            }
            if coarse(s, v) {
                if coarse_max.as_ref().map_or(true, |x| s > x) {
                    coarse_max = Some(s.clone());
                }
                break;
            }
        }
    }
    if gmax.is_none() {
        return Ok(WExpr::compose(f.trunc(m)?, gs.to_vec()));
    }
    let (c1, c2) = ctx.cases.get();
    match coarse_max {
        Some(d) => {
            ctx.cases.set((c1 + 1, c2));
            taylor_case(ctx, f, gs, m, v, &d, level)
        }
        None => {
            ctx.cases.set((c1, c2 + 1));
            split_case(ctx, f, gs, m, v, level)
        }
    }
}

/// Some argument has support of class `<= v`: expand around `g‖v` to the
/// order beyond which every term lies below `m`.
fn taylor_case(
    ctx: &WitnessCtx,
    f: &WAtom,
    gs: &[WAtom],
    m: &Monomial,
    v: ArchClass,
    d: &Monomial,
    level: usize,
) -> Result<WExpr> {
    let mut order = 1u32;
    while d.pow(&rational::int(order as i64)) >= *m {
        order += 1;
        if order > 64 {
            return Err(Error::RecursionLimit(format!("Taylor order for {d} against {m}")));
        }
    }
    let gv: Vec<WAtom> = gs.iter().map(|g| g.trunc_v(v)).collect();
    let diff: Vec<WAtom> = gs.iter().zip(&gv).map(|(g, h)| g.sub(h)).collect::<Result<_>>()?;
    let mut terms = Vec::new();
    for h in indices_up_to(gs.len(), order - 1) {
        let mut fh = f.clone();
        let mut fact = Rational::one();
        for (i, &k) in h.iter().enumerate() {
            for _ in 0..k {
                fh = fh.deriv(i)?;
            }
            fact *= rational::factorial(k);
        }
        if !fact.is_one() {
            fh = fh.scale(&fact.recip());
        }
        let mut term = WExpr::compose(fh, gv.clone());
        for (i, &k) in h.iter().enumerate() {
            for _ in 0..k {
                term = WExpr::prod(WExpr::atom(diff[i].clone()), term);
            }
        }
        terms.push(trunc_witness(ctx, &term, m, level + 1)?);
    }
    Ok(WExpr::sum(terms))
}

/// Every argument is supported in classes finer than `v`: cut `f` at the
/// largest monomial `p` that can reach `m`, and recurse on both parts.
fn split_case(
    ctx: &WitnessCtx,
    f: &WAtom,
    gs: &[WAtom],
    m: &Monomial,
    v: ArchClass,
    level: usize,
) -> Result<WExpr> {
    let ArchClass::Finite(vi) = v else {
        unreachable!("m < 1 has a finite class")
    };
    let mut powers: HashMap<MultiIndex, Rps> = HashMap::new();
    let mut p: Option<Monomial> = None;
    for idx in f.value.indices(ctx.horizon) {
        let c = f.value.coeff(&idx)?;
        let mut found = None;
        for i in 0..ctx.scan {
            let Some(t) = c.term(i, ctx.budget)? else {
                break;
            };
            let n = t.monomial;
            if n.arch_class() == v {
                let gm = power(ctx, gs, &idx, &mut powers)?;
                let limit = m.div(&n);
                let probe = ctx.probe_below(&gm, &limit)?;
                if probe.monomials.iter().any(|s| *s <= limit) {
                    found = Some(n);
                    break;
                }
            } else if let ArchClass::Finite(c) = n.arch_class() {
                if c < vi && n.exponents()[c] > Rational::zero() {
                    found = Some(n);
                    break;
                }
            }
        }
        if let Some(n) = found {
            if p.as_ref().map_or(true, |q| n > *q) {
                p = Some(n);
            }
        }
    }
    let Some(p) = p else {
        return Ok(WExpr::compose(f.clone(), gs.to_vec()));
    };
    let head = f.trunc(&p)?;
    if p.arch_class() != v {
        return Ok(WExpr::compose(head, gs.to_vec()));
    }
    let part1 = build(ctx, &head, gs, m, level + 1)?;
    let f1 = f.sub(&head)?.mul_mono(&p.inv())?;
    let part2 = build(ctx, &f1, gs, &m.div(&p), level + 1)?;
    Ok(WExpr::sum(vec![part1, WExpr::mono_scale(p, part2)]))
}

fn power(ctx: &WitnessCtx, gs: &[WAtom], idx: &[u32], memo: &mut HashMap<MultiIndex, Rps>) -> Result<Rps> {
    if let Some(p) = memo.get(idx) {
        return Ok(p.clone());
    }
    let p = match idx.iter().rposition(|&x| x > 0) {
        None => Rps::scalar(&ctx.yvars, &ctx.one(), Rational::one()),
        Some(j) => {
            let mut prev = idx.to_vec();
            prev[j] -= 1;
            power(ctx, gs, &prev, memo)?.mul(&gs[j].value)?
        }
    };
    memo.insert(idx.to_vec(), p.clone());
    Ok(p)
}
