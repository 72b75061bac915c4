use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::rc::Rc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::order::{Monomial, Segment};
use crate::rational::{self, Rational};

/// Exponent vector keyed by variable name; zero entries are omitted.
pub type Exps = BTreeMap<String, Rational>;

/// A finite generalized polynomial.
pub type Poly = BTreeMap<Exps, Rational>;

pub fn degree(e: &Exps) -> Rational {
    e.values().fold(Rational::zero(), |a, b| a + b)
}

pub fn exps_add(a: &Exps, b: &Exps) -> Exps {
    let mut out = a.clone();
    for (v, e) in b {
        let s = out.get(v).cloned().unwrap_or_else(Rational::zero) + e;
        if s.is_zero() {
            out.remove(v);
        } else {
            out.insert(v.clone(), s);
        }
    }
    out
}

pub fn exps_scale(a: &Exps, c: &Rational) -> Exps {
    if c.is_zero() {
        return Exps::new();
    }
    a.iter().map(|(v, e)| (v.clone(), e * c)).collect()
}

pub fn exp_of(e: &Exps, v: &str) -> Rational {
    e.get(v).cloned().unwrap_or_else(Rational::zero)
}

pub fn single(v: &str, e: Rational) -> Exps {
    let mut m = Exps::new();
    if !e.is_zero() {
        m.insert(v.to_string(), e);
    }
    m
}

pub(crate) fn poly_add_term(p: &mut Poly, e: Exps, c: Rational) {
    if c.is_zero() {
        return;
    }
    let s = p.get(&e).cloned().unwrap_or_else(Rational::zero) + c;
    if s.is_zero() {
        p.remove(&e);
    } else {
        p.insert(e, s);
    }
}

/// Which part of the support a fragment keeps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentSpec {
    Full,
    Empty,
    /// Exponent of one variable lies in a segment of the rationals.
    Var { var: String, seg: Segment<Rational> },
    /// Total degree lies in a segment.
    Degree(Segment<Rational>),
    /// `m^γ > above`, where `m` assigns a monomial to some variables and the
    /// remaining variables do not contribute.
    MonomialCut {
        assign: BTreeMap<String, Monomial>,
        above: Monomial,
    },
    All(Vec<FragmentSpec>),
}

impl FragmentSpec {
    pub fn contains(&self, e: &Exps) -> bool {
        match self {
            FragmentSpec::Full => true,
            FragmentSpec::Empty => false,
            FragmentSpec::Var { var, seg } => seg.contains(&exp_of(e, var)),
            FragmentSpec::Degree(seg) => seg.contains(&degree(e)),
            FragmentSpec::MonomialCut { assign, above } => {
                let mut m = Monomial::identity(above.group());
                for (v, mono) in assign {
                    m = m.mul(&mono.pow(&exp_of(e, v)));
                }
                m > *above
            }
            FragmentSpec::All(specs) => specs.iter().all(|s| s.contains(e)),
        }
    }

    pub fn key(&self) -> String {
        fn seg(s: &Segment<Rational>) -> String {
            use std::ops::Bound::*;
            let lo = match &s.lower {
                Included(a) => format!("[{}", rational::fmt(a)),
                Excluded(a) => format!("({}", rational::fmt(a)),
                Unbounded => "(-inf".into(),
            };
            let hi = match &s.upper {
                Included(a) => format!("{}]", rational::fmt(a)),
                Excluded(a) => format!("{})", rational::fmt(a)),
                Unbounded => "inf)".into(),
            };
            format!("{lo},{hi}")
        }
        match self {
            FragmentSpec::Full => "full".into(),
            FragmentSpec::Empty => "empty".into(),
            FragmentSpec::Var { var, seg: s } => format!("{var}:{}", seg(s)),
            FragmentSpec::Degree(s) => format!("deg:{}", seg(s)),
            FragmentSpec::MonomialCut { assign, above } => {
                let a: Vec<String> = assign.iter().map(|(v, m)| format!("{v}={m}")).collect();
                format!("cut[{}]>{}", a.join(","), above)
            }
            FragmentSpec::All(v) => {
                let parts: Vec<String> = v.iter().map(|s| s.key()).collect();
                format!("all[{}]", parts.join(";"))
            }
        }
    }
}

/// Leading data of a p-composable (or just normal) series `z^γ (k + h)`.
#[derive(Clone, Debug)]
pub struct NormalForm {
    pub gamma: Exps,
    pub k: Rational,
    pub h: Gps,
}

#[derive(Clone)]
pub enum Kind {
    Finite(Poly),
    Geometric(String),
    Binomial(Rational, String),
    Sum(Vec<Gps>),
    Product(Gps, Gps),
    Scale(Rational, Gps),
    Reindex(Gps, BTreeMap<String, String>),
    Derivative(Gps, String),
    RenormDerivative(Gps, String),
    Fragment(Gps, FragmentSpec),
    BlowupAffine {
        f: Gps,
        x: String,
        z0: String,
        z1: String,
        k: Rational,
    },
    BlowupMult {
        f: Gps,
        x: String,
        z0: String,
        z1: String,
    },
    ComposePcomp {
        f: Gps,
        x: String,
        g: Gps,
        nf: NormalForm,
    },
    ComposeClassical {
        f: Gps,
        y: String,
        g: Gps,
        delta: Rational,
    },
    MonomialDivide(Gps, Exps),
    MonomialMultiply(Gps, Exps),
}

/// Structural facts about the denoted series, derived bottom-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub vars: BTreeSet<String>,
    /// Variables known to carry only natural exponents.
    pub classical: BTreeSet<String>,
    /// Lower bound on the exponent of each variable.
    pub low: BTreeMap<String, Rational>,
    /// All exponents lie in `(1/denom)Z`.
    pub denom: u64,
    /// Upper bound on total degree when the support is known to be finite.
    pub max_degree: Option<Rational>,
}

impl Meta {
    pub fn low_of(&self, v: &str) -> Rational {
        self.low.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn low_degree(&self) -> Rational {
        self.low.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn step(&self) -> Rational {
        rational::ratio(1, self.denom as i64)
    }
}

pub(crate) struct Node {
    pub(crate) kind: Kind,
    pub(crate) meta: Meta,
    pub(crate) cache: RefCell<Option<(Rational, Rc<Poly>)>>,
}

/// A generalized power series as an immutable expression DAG.
#[derive(Clone)]
pub struct Gps(pub(crate) Rc<Node>);

fn check_name(v: &str) -> Result<()> {
    let ok = !v.is_empty()
        && v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("bad variable name {v:?}")))
    }
}

fn merge_low(a: &BTreeMap<String, Rational>, b: &BTreeMap<String, Rational>, vars: &BTreeSet<String>, add: bool) -> BTreeMap<String, Rational> {
    vars.iter()
        .map(|v| {
            let x = a.get(v).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(v).cloned().unwrap_or_else(Rational::zero);
            let r = if add { x + y } else { x.min(y) };
            (v.clone(), r)
        })
        .collect()
}

fn classical_union(children: &[&Meta], vars: &BTreeSet<String>) -> BTreeSet<String> {
    vars.iter()
        .filter(|v| children.iter().all(|m| !m.vars.contains(*v) || m.classical.contains(*v)))
        .cloned()
        .collect()
}

fn exps_denom(e: &Exps) -> u64 {
    e.values().fold(1, |acc, r| rational::lcm(acc, rational::denom_u64(r)))
}

impl Gps {
    fn make(kind: Kind, meta: Meta) -> Gps {
        Gps(Rc::new(Node {
            kind,
            meta,
            cache: RefCell::new(None),
        }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    pub fn meta(&self) -> &Meta {
        &self.0.meta
    }

    pub fn vars(&self) -> &BTreeSet<String> {
        &self.0.meta.vars
    }

    pub fn ptr_eq(&self, other: &Gps) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// A finite series over the declared variables (which must cover the terms).
    pub fn finite<S: AsRef<str>>(vars: &[S], terms: Poly) -> Result<Gps> {
        let mut vs: BTreeSet<String> = BTreeSet::new();
        for v in vars {
            check_name(v.as_ref())?;
            vs.insert(v.as_ref().to_string());
        }
        let mut poly = Poly::new();
        for (e, c) in terms {
            for v in e.keys() {
                if !vs.contains(v) {
                    return Err(Error::UnknownVariable(v.clone()));
                }
            }
            let e: Exps = e.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            poly_add_term(&mut poly, e, c);
        }
        let low = vs
            .iter()
            .map(|v| {
                let m = poly
                    .keys()
                    .map(|e| exp_of(e, v))
                    .min()
                    .unwrap_or_else(Rational::zero);
                (v.clone(), m)
            })
            .collect();
        let classical = vs
            .iter()
            .filter(|v| poly.keys().all(|e| rational::is_natural(&exp_of(e, v))))
            .cloned()
            .collect();
        let denom = poly.keys().fold(1, |acc, e| rational::lcm(acc, exps_denom(e)));
        let max_degree = Some(poly.keys().map(degree).max().unwrap_or_else(Rational::zero));
        Ok(Gps::make(
            Kind::Finite(poly),
            Meta {
                vars: vs,
                classical,
                low,
                denom,
                max_degree,
            },
        ))
    }

    pub fn constant(c: Rational) -> Gps {
        let mut p = Poly::new();
        poly_add_term(&mut p, Exps::new(), c);
        Gps::finite::<&str>(&[], p).expect("constant")
    }

    pub fn zero() -> Gps {
        Gps::constant(Rational::zero())
    }

    /// `c x^e`
    pub fn monomial(vars: &[&str], e: Exps, c: Rational) -> Result<Gps> {
        let mut p = Poly::new();
        poly_add_term(&mut p, e, c);
        Gps::finite(vars, p)
    }

    /// The coordinate projection `x`.
    pub fn var(x: &str) -> Result<Gps> {
        Gps::monomial(&[x], single(x, rational::int(1)), rational::int(1))
    }

    /// `Σ_k x^k`
    pub fn geometric(x: &str) -> Result<Gps> {
        check_name(x)?;
        Ok(Gps::make(
            Kind::Geometric(x.into()),
            Meta {
                vars: [x.to_string()].into(),
                classical: [x.to_string()].into(),
                low: [(x.to_string(), Rational::zero())].into(),
                denom: 1,
                max_degree: None,
            },
        ))
    }

    /// `Σ_m (λ choose m) x^m`
    pub fn binomial(lambda: Rational, x: &str) -> Result<Gps> {
        check_name(x)?;
        let max_degree = rational::is_natural(&lambda).then(|| lambda.clone());
        Ok(Gps::make(
            Kind::Binomial(lambda, x.into()),
            Meta {
                vars: [x.to_string()].into(),
                classical: [x.to_string()].into(),
                low: [(x.to_string(), Rational::zero())].into(),
                denom: 1,
                max_degree,
            },
        ))
    }

    pub fn sum(children: Vec<Gps>) -> Gps {
        if children.len() == 1 {
            return children.into_iter().next().unwrap();
        }
        let vars: BTreeSet<String> = children.iter().flat_map(|c| c.vars().iter().cloned()).collect();
        let metas: Vec<&Meta> = children.iter().map(|c| c.meta()).collect();
        let classical = classical_union(&metas, &vars);
        let mut low = BTreeMap::new();
        for v in &vars {
            let m = metas.iter().map(|m| m.low_of(v)).min().unwrap_or_else(Rational::zero);
            low.insert(v.clone(), m);
        }
        let denom = metas.iter().fold(1, |a, m| rational::lcm(a, m.denom));
        let max_degree = metas
            .iter()
            .map(|m| m.max_degree.clone())
            .try_fold(Rational::zero(), |a, d| d.map(|d| a.max(d)));
        Gps::make(
            Kind::Sum(children),
            Meta {
                vars,
                classical,
                low,
                denom,
                max_degree,
            },
        )
    }

    pub fn add(&self, other: &Gps) -> Gps {
        Gps::sum(vec![self.clone(), other.clone()])
    }

    pub fn sub(&self, other: &Gps) -> Gps {
        Gps::sum(vec![self.clone(), other.scale(rational::int(-1))])
    }

    pub fn mul(&self, other: &Gps) -> Gps {
        let (a, b) = (self.meta(), other.meta());
        let vars: BTreeSet<String> = a.vars.union(&b.vars).cloned().collect();
        let classical = classical_union(&[a, b], &vars);
        let low = merge_low(&a.low, &b.low, &vars, true);
        let max_degree = match (&a.max_degree, &b.max_degree) {
            (Some(x), Some(y)) => Some(x + y),
            _ => None,
        };
        Gps::make(
            Kind::Product(self.clone(), other.clone()),
            Meta {
                vars,
                classical,
                low,
                denom: rational::lcm(a.denom, b.denom),
                max_degree,
            },
        )
    }

    pub fn scale(&self, c: Rational) -> Gps {
        let meta = self.meta().clone();
        Gps::make(Kind::Scale(c, self.clone()), meta)
    }

    pub fn neg(&self) -> Gps {
        self.scale(rational::int(-1))
    }

    /// Renames variables through `sigma`; unmapped variables stay put.
    pub fn reindex(&self, sigma: &BTreeMap<String, String>) -> Result<Gps> {
        for t in sigma.values() {
            check_name(t)?;
        }
        let m = self.meta();
        let target = |v: &String| sigma.get(v).cloned().unwrap_or_else(|| v.clone());
        let vars: BTreeSet<String> = m.vars.iter().map(target).collect();
        let mut low: BTreeMap<String, Rational> = BTreeMap::new();
        for v in &m.vars {
            *low.entry(target(v)).or_insert_with(Rational::zero) += m.low_of(v);
        }
        let classical = vars
            .iter()
            .filter(|t| m.vars.iter().filter(|v| target(v) == **t).all(|v| m.classical.contains(v)))
            .cloned()
            .collect();
        let sigma: BTreeMap<String, String> = sigma
            .iter()
            .filter(|(a, b)| a != b && m.vars.contains(*a))
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        if sigma.is_empty() {
            return Ok(self.clone());
        }
        Ok(Gps::make(
            Kind::Reindex(self.clone(), sigma),
            Meta {
                vars,
                classical,
                low,
                denom: m.denom,
                max_degree: m.max_degree.clone(),
            },
        ))
    }

    /// Formal derivative `∂_x`.
    pub fn derivative(&self, x: &str) -> Result<Gps> {
        let m = self.meta();
        if !m.vars.contains(x) {
            return Err(Error::UnknownVariable(x.into()));
        }
        let mut meta = m.clone();
        let lx = m.low_of(x);
        let nl = if m.classical.contains(x) {
            (lx - rational::int(1)).max(Rational::zero())
        } else if lx.is_zero() {
            m.step() - rational::int(1)
        } else {
            lx - rational::int(1)
        };
        meta.low.insert(x.into(), nl);
        meta.max_degree = m.max_degree.clone();
        Ok(Gps::make(Kind::Derivative(self.clone(), x.into()), meta))
    }

    /// Renormalized derivative `x ∂_x`.
    pub fn renorm_derivative(&self, x: &str) -> Result<Gps> {
        if !self.vars().contains(x) {
            return Err(Error::UnknownVariable(x.into()));
        }
        Ok(Gps::make(
            Kind::RenormDerivative(self.clone(), x.into()),
            self.meta().clone(),
        ))
    }

    pub fn fragment(&self, spec: FragmentSpec) -> Gps {
        let mut meta = self.meta().clone();
        if let FragmentSpec::Degree(seg) = &spec {
            if let std::ops::Bound::Included(d) | std::ops::Bound::Excluded(d) = &seg.upper {
                meta.max_degree = Some(meta.max_degree.map_or(d.clone(), |m| m.min(d.clone())));
            }
        }
        if let FragmentSpec::Var { var, seg } = &spec {
            if let std::ops::Bound::Included(d) | std::ops::Bound::Excluded(d) = &seg.lower {
                if meta.vars.contains(var) {
                    let l = meta.low_of(var).max(d.clone());
                    meta.low.insert(var.clone(), l);
                }
            }
        }
        Gps::make(Kind::Fragment(self.clone(), spec), meta)
    }

    /// `f(z0 (z1 + k), y)`
    pub fn blowup_affine(&self, x: &str, z0: &str, z1: &str, k: Rational) -> Result<Gps> {
        if !k.is_positive() {
            return Err(Error::Invalid("affine blow-up needs k > 0".into()));
        }
        check_name(z0)?;
        check_name(z1)?;
        let m = self.meta();
        if !m.vars.contains(x) {
            return Ok(self.clone());
        }
        let mut rest = m.clone();
        rest.vars.remove(x);
        rest.low.remove(x);
        rest.classical.remove(x);
        let mut vars = rest.vars.clone();
        vars.insert(z0.into());
        vars.insert(z1.into());
        let mut low = rest.low.clone();
        *low.entry(z0.into()).or_insert_with(Rational::zero) += m.low_of(x);
        low.entry(z1.into()).or_insert_with(Rational::zero);
        let x_classical = m.classical.contains(x);
        let mut classical: BTreeSet<String> = rest
            .classical
            .iter()
            .filter(|v| **v != z0 || x_classical)
            .cloned()
            .collect();
        let z0_plain = !rest.vars.contains(z0) || rest.classical.contains(z0);
        if x_classical && z0_plain {
            classical.insert(z0.into());
        }
        let z1_plain = !rest.vars.contains(z1) || rest.classical.contains(z1);
        if z1_plain && (z1 != z0 || x_classical) {
            classical.insert(z1.into());
        }
        let max_degree = match (&m.max_degree, x_classical) {
            (Some(d), true) => Some(d * rational::int(2)),
            _ => None,
        };
        Ok(Gps::make(
            Kind::BlowupAffine {
                f: self.clone(),
                x: x.into(),
                z0: z0.into(),
                z1: z1.into(),
                k,
            },
            Meta {
                vars,
                classical,
                low,
                denom: m.denom,
                max_degree,
            },
        ))
    }

    /// `f(z0 z1, y)`
    pub fn blowup_mult(&self, x: &str, z0: &str, z1: &str) -> Result<Gps> {
        check_name(z0)?;
        check_name(z1)?;
        let m = self.meta();
        if !m.vars.contains(x) {
            return Ok(self.clone());
        }
        let mut rest = m.clone();
        rest.vars.remove(x);
        rest.low.remove(x);
        rest.classical.remove(x);
        let mut vars = rest.vars.clone();
        vars.insert(z0.into());
        vars.insert(z1.into());
        let mut low = rest.low.clone();
        *low.entry(z0.into()).or_insert_with(Rational::zero) += m.low_of(x);
        *low.entry(z1.into()).or_insert_with(Rational::zero) += m.low_of(x);
        let x_classical = m.classical.contains(x);
        let mut classical = rest.classical.clone();
        for z in [z0, z1] {
            let plain = !rest.vars.contains(z) || rest.classical.contains(z);
            if x_classical && plain {
                classical.insert(z.into());
            } else {
                classical.remove(z);
            }
        }
        let max_degree = m.max_degree.as_ref().filter(|_| !m.low_of(x).is_negative()).map(|d| d * rational::int(2));
        Ok(Gps::make(
            Kind::BlowupMult {
                f: self.clone(),
                x: x.into(),
                z0: z0.into(),
                z1: z1.into(),
            },
            Meta {
                vars,
                classical,
                low,
                denom: m.denom,
                max_degree,
            },
        ))
    }

    /// `x^α`-shift of the support; fails on expansion if some term is not divisible.
    pub fn monomial_divide(&self, alpha: &Exps) -> Result<Gps> {
        let m = self.meta();
        for v in alpha.keys() {
            if !m.vars.contains(v) {
                return Err(Error::UnknownVariable(v.clone()));
            }
        }
        let mut meta = m.clone();
        for (v, a) in alpha {
            let l = (m.low_of(v) - a).max(Rational::zero());
            meta.low.insert(v.clone(), l);
            if !rational::is_natural(a) {
                meta.classical.remove(v);
            }
        }
        meta.denom = rational::lcm(m.denom, exps_denom(alpha));
        meta.max_degree = m.max_degree.as_ref().map(|d| d - degree(alpha));
        Ok(Gps::make(Kind::MonomialDivide(self.clone(), alpha.clone()), meta))
    }

    pub fn monomial_multiply(&self, alpha: &Exps) -> Result<Gps> {
        let m = self.meta();
        let mut meta = m.clone();
        for (v, a) in alpha {
            check_name(v)?;
            meta.vars.insert(v.clone());
            let l = m.low_of(v) + a;
            meta.low.insert(v.clone(), l);
            let nat = rational::is_natural(a);
            if !nat {
                meta.classical.remove(v);
            } else if !m.vars.contains(v) {
                meta.classical.insert(v.clone());
            }
        }
        meta.denom = rational::lcm(m.denom, exps_denom(alpha));
        meta.max_degree = m.max_degree.as_ref().map(|d| d + degree(alpha));
        Ok(Gps::make(Kind::MonomialMultiply(self.clone(), alpha.clone()), meta))
    }

    pub(crate) fn compose_pcomp_node(f: &Gps, x: &str, g: &Gps, nf: NormalForm) -> Gps {
        let fm = f.meta();
        let gm = g.meta();
        let mut vars = fm.vars.clone();
        vars.remove(x);
        let mut low: BTreeMap<String, Rational> = fm.low.clone();
        low.remove(x);
        let lx = fm.low_of(x);
        for v in &gm.vars {
            let add = &lx * exp_of(&nf.gamma, v);
            *low.entry(v.clone()).or_insert_with(Rational::zero) += add;
            vars.insert(v.clone());
        }
        let x_classical = fm.classical.contains(x);
        let classical = vars
            .iter()
            .filter(|v| {
                let from_f = !fm.vars.contains(*v) || fm.classical.contains(*v) || *v == x;
                let from_g = !gm.vars.contains(*v) || (x_classical && gm.classical.contains(*v));
                from_f && from_g
            })
            .cloned()
            .collect();
        let denom = fm.denom * gm.denom;
        // natural powers of a polynomial stay polynomial
        let max_degree = match (&fm.max_degree, &gm.max_degree) {
            (Some(a), Some(b)) if x_classical => Some(a * b.clone().max(rational::int(1))),
            _ => None,
        };
        Gps::make(
            Kind::ComposePcomp {
                f: f.clone(),
                x: x.into(),
                g: g.clone(),
                nf,
            },
            Meta {
                vars,
                classical,
                low,
                denom,
                max_degree,
            },
        )
    }

    pub(crate) fn compose_classical_node(f: &Gps, y: &str, g: &Gps, delta: Rational) -> Gps {
        let fm = f.meta();
        let gm = g.meta();
        let mut vars = fm.vars.clone();
        vars.remove(y);
        let mut low = fm.low.clone();
        low.remove(y);
        for v in &gm.vars {
            low.entry(v.clone()).or_insert_with(Rational::zero);
            vars.insert(v.clone());
        }
        let classical = vars
            .iter()
            .filter(|v| {
                (!fm.vars.contains(*v) || fm.classical.contains(*v))
                    && (!gm.vars.contains(*v) || gm.classical.contains(*v))
            })
            .cloned()
            .collect();
        let max_degree = match (&fm.max_degree, &gm.max_degree) {
            (Some(a), Some(b)) if fm.classical.contains(y) => Some(a * b.clone().max(rational::int(1))),
            _ => None,
        };
        Gps::make(
            Kind::ComposeClassical {
                f: f.clone(),
                y: y.into(),
                g: g.clone(),
                delta,
            },
            Meta {
                vars,
                classical,
                low,
                denom: rational::lcm(fm.denom, gm.denom),
                max_degree,
            },
        )
    }

    /// Canonical structural key; equal keys denote equal series.
    pub fn key(&self) -> String {
        let mut out = String::new();
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut String) {
        use std::fmt::Write;
        match self.kind() {
            Kind::Finite(p) => {
                let vars: Vec<&str> = self.vars().iter().map(String::as_str).collect();
                let _ = write!(out, "(poly [{}] {})", vars.join(","), poly_string(p));
            }
            Kind::Geometric(x) => {
                let _ = write!(out, "(geom {x})");
            }
            Kind::Binomial(l, x) => {
                let _ = write!(out, "(binom {} {x})", rational::fmt(l));
            }
            Kind::Sum(cs) => {
                out.push_str("(sum");
                for c in cs {
                    out.push(' ');
                    c.write_key(out);
                }
                out.push(')');
            }
            Kind::Product(a, b) => {
                out.push_str("(mul ");
                a.write_key(out);
                out.push(' ');
                b.write_key(out);
                out.push(')');
            }
            Kind::Scale(c, a) => {
                let _ = write!(out, "(scale {} ", rational::fmt(c));
                a.write_key(out);
                out.push(')');
            }
            Kind::Reindex(a, s) => {
                out.push_str("(reindex ");
                a.write_key(out);
                let m: Vec<String> = s.iter().map(|(a, b)| format!("{a}->{b}")).collect();
                let _ = write!(out, " {})", m.join(","));
            }
            Kind::Derivative(a, x) => {
                out.push_str("(d ");
                a.write_key(out);
                let _ = write!(out, " {x})");
            }
            Kind::RenormDerivative(a, x) => {
                out.push_str("(xd ");
                a.write_key(out);
                let _ = write!(out, " {x})");
            }
            Kind::Fragment(a, s) => {
                out.push_str("(frag ");
                a.write_key(out);
                let _ = write!(out, " {})", s.key());
            }
            Kind::BlowupAffine { f, x, z0, z1, k } => {
                out.push_str("(blowA ");
                f.write_key(out);
                let _ = write!(out, " {x} {z0} {z1} {})", rational::fmt(k));
            }
            Kind::BlowupMult { f, x, z0, z1 } => {
                out.push_str("(blowM ");
                f.write_key(out);
                let _ = write!(out, " {x} {z0} {z1})");
            }
            Kind::ComposePcomp { f, x, g, .. } => {
                out.push_str("(comp ");
                f.write_key(out);
                let _ = write!(out, " {x} ");
                g.write_key(out);
                out.push(')');
            }
            Kind::ComposeClassical { f, y, g, .. } => {
                out.push_str("(compc ");
                f.write_key(out);
                let _ = write!(out, " {y} ");
                g.write_key(out);
                out.push(')');
            }
            Kind::MonomialDivide(a, e) => {
                out.push_str("(mdiv ");
                a.write_key(out);
                let _ = write!(out, " {})", exps_string(e));
            }
            Kind::MonomialMultiply(a, e) => {
                out.push_str("(mmul ");
                a.write_key(out);
                let _ = write!(out, " {})", exps_string(e));
            }
        }
    }
}

pub fn exps_string(e: &Exps) -> String {
    if e.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = e
        .iter()
        .map(|(v, x)| crate::order::fmt_power(v, x))
        .collect();
    parts.join("*")
}

pub fn poly_string(p: &Poly) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut terms: Vec<(&Exps, &Rational)> = p.iter().collect();
    terms.sort_by(|a, b| degree(a.0).cmp(&degree(b.0)).then_with(|| a.0.cmp(b.0)));
    let parts: Vec<String> = terms
        .iter()
        .map(|(e, c)| {
            if e.is_empty() {
                rational::fmt(c)
            } else {
                format!("{} * {}", rational::fmt(c), exps_string(e))
            }
        })
        .collect();
    parts.join(" + ")
}

impl fmt::Debug for Gps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())
    }
}
