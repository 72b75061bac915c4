use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Bound;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::ast::*;
use super::lexer::Pos;
use crate::closure::{adversarial_fixture, check_truncation_closed, standard_fixtures, ClosureConfig};
use crate::error::{Error, Result};
use crate::gps::{self, interpret, FragmentSpec, Gps, Kind};
use crate::hahn::{self, Budget, Completion, HahnSeries, Observation, DEFAULT_BUDGET};
use crate::order::{ArchClass, Monomial, MonomialGroup, Segment};
use crate::rational::{self, Rational};

/// Settings shared by every command of a run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Steps allowed per command.
    pub budget: u64,
    /// Terms shown when a `show` gives no depth.
    pub depth: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            budget: DEFAULT_BUDGET,
            depth: 10,
            seed: 0,
        }
    }
}

/// The outcome of one command.
#[derive(Clone, Debug)]
pub struct OutputRecord {
    pub command: String,
    pub ok: bool,
    pub lines: Vec<String>,
    pub payload: Value,
    pub steps: u64,
}

impl OutputRecord {
    pub fn text(&self) -> String {
        let mut s = format!("> {}\n", self.command);
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "ok": self.ok,
            "result": self.payload,
            "steps": self.steps,
        })
    }
}

#[derive(Clone)]
enum Val {
    Num(Rational),
    Hahn(HahnSeries),
    Gps(Gps),
}

impl Val {
    fn kind(&self) -> &'static str {
        match self {
            Val::Num(_) => "number",
            Val::Hahn(_) => "Hahn series",
            Val::Gps(_) => "generalized power series",
        }
    }
}

/// Interpreter state carried across statements.
pub struct Session {
    pub config: RunConfig,
    group: Option<Arc<MonomialGroup>>,
    vars: BTreeSet<String>,
    lets: HashMap<String, Val>,
}

fn at(pos: Pos, e: Error) -> Error {
    match e {
        Error::BudgetExhausted | Error::Parse { .. } => e,
        e => Error::Parse {
            line: pos.line,
            col: pos.col,
            msg: e.to_string(),
        },
    }
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.into(),
    })
}

impl Session {
    pub fn new(config: RunConfig) -> Session {
        Session {
            config,
            group: None,
            vars: BTreeSet::new(),
            lets: HashMap::new(),
        }
    }

    pub fn run(&mut self, program: &Program) -> Vec<OutputRecord> {
        program.stmts.iter().map(|s| self.exec(s)).collect()
    }

    pub fn exec(&mut self, stmt: &Stmt) -> OutputRecord {
        let budget = Budget::new(self.config.budget);
        let mut rec = OutputRecord {
            command: stmt.to_string(),
            ok: true,
            lines: vec![],
            payload: Value::Null,
            steps: 0,
        };
        match self.exec_inner(stmt, &budget) {
            Ok((lines, payload)) => {
                rec.lines = lines;
                rec.payload = payload;
            }
            Err(e) => {
                rec.ok = false;
                let msg = match e {
                    Error::BudgetExhausted => format!("{}: budget exhausted", stmt.pos),
                    e => e.to_string(),
                };
                rec.lines = vec![format!("error: {msg}")];
                rec.payload = json!({ "error": msg });
            }
        }
        rec.steps = budget.used();
        rec
    }

    fn group(&self, pos: Pos) -> Result<&Arc<MonomialGroup>> {
        match &self.group {
            Some(g) => Ok(g),
            None => err(pos, "no group declared"),
        }
    }

    fn exec_inner(&mut self, stmt: &Stmt, budget: &Budget) -> Result<(Vec<String>, Value)> {
        let pos = stmt.pos;
        match &stmt.kind {
            StmtKind::Group(gs) => {
                self.group = Some(MonomialGroup::new(gs).map_err(|e| at(pos, e))?);
                self.lets.clear();
                Ok((vec![], Value::Null))
            }
            StmtKind::Var(vs) => {
                for v in vs {
                    if self.group.as_ref().is_some_and(|g| g.index_of(v).is_some()) {
                        return err(pos, format!("`{v}` is a group generator"));
                    }
                    self.vars.insert(v.clone());
                }
                Ok((vec![], Value::Null))
            }
            StmtKind::Let(n, e) => {
                let v = self.eval(e, budget)?;
                self.lets.insert(n.clone(), v);
                Ok((vec![], Value::Null))
            }
            StmtKind::Show(e, d) => {
                let depth = d.unwrap_or(self.config.depth);
                match self.eval(e, budget)? {
                    Val::Num(c) => Ok((vec![rational::fmt(&c)], json!({ "number": rational::fmt(&c) }))),
                    Val::Hahn(f) => Ok(show_hahn(&f, depth, budget)),
                    Val::Gps(f) => show_gps(&f, depth, budget).map_err(|e| at(pos, e)),
                }
            }
            StmtKind::ClosureCheck {
                fixture,
                without,
                depth,
                probe,
            } => self.closure_check(pos, fixture, without, *depth, *probe),
            StmtKind::Selftest(n) => self.selftest(*n, budget),
        }
    }

    fn closure_check(
        &self,
        pos: Pos,
        name: &str,
        without: &[String],
        depth: Option<usize>,
        probe: Option<usize>,
    ) -> Result<(Vec<String>, Value)> {
        let mut all = standard_fixtures()?;
        all.push(adversarial_fixture()?);
        let Some(mut fx) = all.into_iter().find(|f| f.name == name) else {
            return err(pos, format!("unknown fixture `{name}`"));
        };
        for w in without {
            if !fx.language.flags.set(w, false) {
                return err(pos, format!("unknown flag `{w}`"));
            }
        }
        let mut config = ClosureConfig::default();
        if let Some(d) = depth {
            config.depth = d;
        }
        if let Some(p) = probe {
            config.probe_depth = p;
        }
        let set = fx.generate(config).map_err(|e| at(pos, e))?;
        let rep = check_truncation_closed(&set, None).map_err(|e| at(pos, e))?;
        let s = &rep.stats;
        let mut lines = vec![
            format!("fixture {} flags {}", fx.name, fx.language.flags.names().join(",")),
            format!(
                "elements {} probes {} witnessed {} failed {} budget {}",
                s.elements, s.probes, s.witnessed, s.failed, s.budget
            ),
        ];
        for e in rep.entries.iter().filter(|e| e.reason.is_some()) {
            lines.push(format!("failed {} at {}: {}", e.element, e.probe, e.reason.as_deref().unwrap_or("")));
        }
        let mut payload = rep.to_json();
        payload["fixture"] = json!(fx.name);
        payload["elements"] = set.to_json()["elements"].clone();
        Ok((lines, payload))
    }

    /// Ring laws on random finite series, seeded by the run's seed.
    fn selftest(&self, n: usize, budget: &Budget) -> Result<(Vec<String>, Value)> {
        let group = match &self.group {
            Some(g) => g.clone(),
            None => MonomialGroup::new(&["u", "t"])?,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut failures = Vec::new();
        for i in 0..n {
            let [a, b, c] = [0; 3].map(|_| random_series(&group, &mut rng));
            let laws = ring_law_failures(&a, &b, &c, budget)?;
            failures.extend(laws.into_iter().map(|l| format!("instance {i}: {l}")));
        }
        let mut lines = vec![format!(
            "{n} instances, seed {}: {}",
            self.config.seed,
            if failures.is_empty() { "ok" } else { "FAILED" }
        )];
        lines.extend(failures.iter().cloned());
        Ok((lines, json!({"instances": n, "seed": self.config.seed, "failures": failures})))
    }

    fn eval(&self, e: &Expr, budget: &Budget) -> Result<Val> {
        let pos = e.pos;
        Ok(match &e.kind {
            ExprKind::Num(c) => Val::Num(c.clone()),
            ExprKind::Name(n) => self.name(pos, n)?,
            ExprKind::Neg(a) => match self.eval(a, budget)? {
                Val::Num(c) => Val::Num(-c),
                Val::Hahn(f) => Val::Hahn(hahn::neg(&f)),
                Val::Gps(f) => Val::Gps(f.neg()),
            },
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) | ExprKind::Mul(a, b) => {
                let (x, y) = (self.eval(a, budget)?, self.eval(b, budget)?);
                self.binary(pos, &e.kind, x, y).map_err(|e| at(pos, e))?
            }
            ExprKind::Pow(a, k) => self.pow(pos, a, k, budget).map_err(|e| at(pos, e))?,
            ExprKind::Binom(l, a) => {
                let l = l.clone();
                self.family(pos, a, budget, move |x| Gps::binomial(l.clone(), x))?
            }
            ExprKind::Call(name, args) => self.call(pos, name, args, budget).map_err(|e| at(pos, e))?,
        })
    }

    fn name(&self, pos: Pos, n: &str) -> Result<Val> {
        if let Some(v) = self.lets.get(n) {
            return Ok(v.clone());
        }
        if self.vars.contains(n) {
            return Ok(Val::Gps(Gps::var(n)?));
        }
        if let Some(g) = &self.group {
            if let Some(i) = g.index_of(n) {
                return Ok(Val::Hahn(HahnSeries::monomial(&Monomial::generator(g, i))));
            }
        }
        err(pos, format!("unbound name `{n}`"))
    }

    fn to_hahn(&self, pos: Pos, v: Val) -> Result<HahnSeries> {
        match v {
            Val::Num(c) => Ok(HahnSeries::constant(self.group(pos)?, c)),
            Val::Hahn(f) => Ok(f),
            Val::Gps(_) => err(pos, "expected a Hahn series, found a generalized power series"),
        }
    }

    fn to_gps(&self, pos: Pos, v: Val) -> Result<Gps> {
        match v {
            Val::Num(c) => Ok(Gps::constant(c)),
            Val::Gps(f) => Ok(f),
            Val::Hahn(_) => err(pos, "expected a generalized power series, found a Hahn series"),
        }
    }

    fn binary(&self, pos: Pos, op: &ExprKind, x: Val, y: Val) -> Result<Val> {
        use ExprKind::*;
        Ok(match (x, y) {
            (Val::Num(a), Val::Num(b)) => Val::Num(match op {
                Add(..) => a + b,
                Sub(..) => a - b,
                _ => a * b,
            }),
            (x @ Val::Gps(_), y) | (x, y @ Val::Gps(_)) => {
                let (a, b) = (self.to_gps(pos, x)?, self.to_gps(pos, y)?);
                Val::Gps(match op {
                    Add(..) => a.add(&b),
                    Sub(..) => a.sub(&b),
                    _ => a.mul(&b),
                })
            }
            (x, y) => {
                let (a, b) = (self.to_hahn(pos, x)?, self.to_hahn(pos, y)?);
                Val::Hahn(match op {
                    Add(..) => hahn::add(&a, &b)?,
                    Sub(..) => hahn::sub(&a, &b)?,
                    _ => hahn::mul(&a, &b)?,
                })
            }
        })
    }

    fn pow(&self, pos: Pos, a: &Expr, k: &Rational, budget: &Budget) -> Result<Val> {
        let natural = k.is_integer() && !k.is_negative();
        Ok(match self.eval(a, budget)? {
            Val::Num(c) => Val::Num(rational::pow(&c, k)?),
            Val::Hahn(f) if natural => Val::Hahn(hahn::pow_nat(&f, small(pos, k)?)?),
            Val::Hahn(f) => Val::Hahn(hahn::pow_unit(&f, k, budget)?),
            Val::Gps(f) => {
                if let Some(x) = bare_var(&f) {
                    Val::Gps(Gps::monomial(&[x.as_str()], gps::single(&x, k.clone()), Rational::one())?)
                } else if natural {
                    let mut acc = Gps::constant(Rational::one());
                    for _ in 0..small(pos, k)? {
                        acc = acc.mul(&f);
                    }
                    Val::Gps(acc)
                } else {
                    return err(pos, "only variables take non-natural powers");
                }
            }
        })
    }

    /// `geom(·)` or `binom(λ)(·)`: the family in a variable, or its value at a
    /// Hahn series.
    fn family(&self, pos: Pos, a: &Expr, budget: &Budget, make: impl Fn(&str) -> Result<Gps>) -> Result<Val> {
        match self.eval(a, budget)? {
            Val::Gps(g) => match bare_var(&g) {
                Some(x) => Ok(Val::Gps(make(&x).map_err(|e| at(pos, e))?)),
                None => err(pos, "the argument must be a variable or a Hahn series"),
            },
            v => {
                let h = self.to_hahn(a.pos, v)?;
                let f = make("x")?;
                let assign = BTreeMap::from([("x".to_string(), h)]);
                Ok(Val::Hahn(interpret(&f, self.group(pos)?, &assign, budget).map_err(|e| at(pos, e))?))
            }
        }
    }

    fn arg_expr<'e>(&self, pos: Pos, args: &'e [Arg], i: usize) -> Result<&'e Expr> {
        match args.get(i) {
            Some(Arg::Expr(e)) => Ok(e),
            Some(a) => err(pos, format!("argument {} must be an expression, found `{a}`", i + 1)),
            None => err(pos, format!("missing argument {}", i + 1)),
        }
    }

    fn arg_name(&self, pos: Pos, args: &[Arg], i: usize) -> Result<String> {
        match &self.arg_expr(pos, args, i)?.kind {
            ExprKind::Name(n) => Ok(n.clone()),
            _ => err(pos, format!("argument {} must be a name", i + 1)),
        }
    }

    fn arity(&self, pos: Pos, name: &str, args: &[Arg], n: usize) -> Result<()> {
        if args.len() != n {
            return err(pos, format!("{name} takes {n} arguments, found {}", args.len()));
        }
        Ok(())
    }

    fn hahn_arg(&self, pos: Pos, args: &[Arg], i: usize, budget: &Budget) -> Result<HahnSeries> {
        let e = self.arg_expr(pos, args, i)?;
        let v = self.eval(e, budget)?;
        self.to_hahn(e.pos, v)
    }

    fn gps_arg(&self, pos: Pos, args: &[Arg], i: usize, budget: &Budget) -> Result<Gps> {
        let e = self.arg_expr(pos, args, i)?;
        let v = self.eval(e, budget)?;
        self.to_gps(e.pos, v)
    }

    fn monomial(&self, e: &Expr, budget: &Budget) -> Result<Monomial> {
        let v = self.eval(e, budget)?;
        let f = self.to_hahn(e.pos, v)?;
        let ts = f.take_terms(2, budget)?;
        match ts.as_slice() {
            [t] if t.coeff.is_one() => Ok(t.monomial.clone()),
            _ => err(e.pos, "expected a monomial"),
        }
    }

    fn rational_arg(&self, pos: Pos, args: &[Arg], i: usize, budget: &Budget) -> Result<Rational> {
        match self.eval(self.arg_expr(pos, args, i)?, budget)? {
            Val::Num(c) => Ok(c),
            v => err(pos, format!("argument {} must be a number, found a {}", i + 1, v.kind())),
        }
    }

    fn call(&self, pos: Pos, name: &str, args: &[Arg], budget: &Budget) -> Result<Val> {
        match name {
            "geom" => {
                self.arity(pos, name, args, 1)?;
                self.family(pos, self.arg_expr(pos, args, 0)?, budget, Gps::geometric)
            }
            "inv" => {
                self.arity(pos, name, args, 1)?;
                match self.eval(self.arg_expr(pos, args, 0)?, budget)? {
                    Val::Num(c) if c.is_zero() => Err(Error::ZeroSeries),
                    Val::Num(c) => Ok(Val::Num(c.recip())),
                    v => {
                        let f = self.to_hahn(pos, v)?;
                        Ok(Val::Hahn(hahn::invert_unit(&f, budget)?))
                    }
                }
            }
            "trunc" => {
                self.arity(pos, name, args, 2)?;
                let f = self.hahn_arg(pos, args, 0, budget)?;
                let m = self.monomial(self.arg_expr(pos, args, 1)?, budget)?;
                Ok(Val::Hahn(hahn::truncate(&f, &m)?))
            }
            "vtrunc" => {
                self.arity(pos, name, args, 2)?;
                let f = self.hahn_arg(pos, args, 0, budget)?;
                let v = self.arg_name(pos, args, 1)?;
                let class = if v == "inf" {
                    ArchClass::Infinity
                } else {
                    match self.group(pos)?.index_of(&v) {
                        Some(i) => ArchClass::Finite(i),
                        None => return err(pos, format!("`{v}` is not a generator")),
                    }
                };
                Ok(Val::Hahn(hahn::v_truncate(&f, class)))
            }
            "frag" => self.frag(pos, args, budget),
            "D" | "xD" => {
                self.arity(pos, name, args, 2)?;
                let f = self.gps_arg(pos, args, 0, budget)?;
                let x = self.arg_name(pos, args, 1)?;
                Ok(Val::Gps(if name == "D" { f.derivative(&x)? } else { f.renorm_derivative(&x)? }))
            }
            "blowA" | "blowM" => {
                self.arity(pos, name, args, if name == "blowA" { 4 } else { 3 })?;
                let f = self.gps_arg(pos, args, 0, budget)?;
                let (x, z0) = match &args[1] {
                    Arg::Map(x, Expr { kind: ExprKind::Name(z0), .. }) => (x.clone(), z0.clone()),
                    _ => return err(pos, "argument 2 must be `x -> z0`"),
                };
                let z1 = self.arg_name(pos, args, 2)?;
                Ok(Val::Gps(if name == "blowA" {
                    let k = self.rational_arg(pos, args, 3, budget)?;
                    f.blowup_affine(&x, &z0, &z1, k)?
                } else {
                    f.blowup_mult(&x, &z0, &z1)?
                }))
            }
            "comp" => {
                self.arity(pos, name, args, 2)?;
                let f = self.gps_arg(pos, args, 0, budget)?;
                let Arg::Map(x, ge) = &args[1] else {
                    return err(pos, "argument 2 must be `x -> g`");
                };
                let gv = self.eval(ge, budget)?;
                let g = self.to_gps(ge.pos, gv)?;
                let classical = f.meta().classical.contains(x) && g.is_infinitesimal(budget)?;
                Ok(Val::Gps(if classical {
                    f.compose_classical(x, &g, budget)?
                } else {
                    f.compose_pcomp(x, &g, budget)?
                }))
            }
            "interp" => {
                let f = self.gps_arg(pos, args, 0, budget)?;
                let mut assign = BTreeMap::new();
                for a in &args[1..] {
                    let Arg::Map(x, e) = a else {
                        return err(pos, format!("expected `x -> value`, found `{a}`"));
                    };
                    let v = self.eval(e, budget)?;
                    assign.insert(x.clone(), self.to_hahn(e.pos, v)?);
                }
                Ok(Val::Hahn(interpret(&f, self.group(pos)?, &assign, budget)?))
            }
            _ => err(pos, format!("unknown function `{name}`")),
        }
    }

    fn frag(&self, pos: Pos, args: &[Arg], budget: &Budget) -> Result<Val> {
        let base = self.eval(self.arg_expr(pos, args, 0)?, budget)?;
        match base {
            Val::Gps(f) => {
                let mut specs = Vec::new();
                for a in &args[1..] {
                    let Arg::In(x, iv) = a else {
                        return err(pos, format!("expected `x in [a, b[`, found `{a}`"));
                    };
                    let bound = |e: &Option<Expr>, closed: bool| -> Result<Bound<Rational>> {
                        let Some(e) = e else {
                            return Ok(Bound::Unbounded);
                        };
                        let c = match self.eval(e, budget)? {
                            Val::Num(c) => c,
                            _ => return err(e.pos, "fragment bounds on exponents are numbers"),
                        };
                        Ok(if closed { Bound::Included(c) } else { Bound::Excluded(c) })
                    };
                    let seg = Segment::new(bound(&iv.lo, iv.lo_closed)?, bound(&iv.hi, iv.hi_closed)?)?;
                    specs.push(if x == "deg" {
                        FragmentSpec::Degree(seg)
                    } else {
                        FragmentSpec::Var { var: x.clone(), seg }
                    });
                }
                let spec = if specs.len() == 1 { specs.remove(0) } else { FragmentSpec::All(specs) };
                Ok(Val::Gps(f.fragment(spec)))
            }
            v => {
                let f = self.to_hahn(pos, v)?;
                let mut segs = Vec::new();
                for a in &args[1..] {
                    let Arg::Interval(iv) = a else {
                        return err(pos, format!("expected a monomial interval, found `{a}`"));
                    };
                    let bound = |e: &Option<Expr>, closed: bool| -> Result<Bound<Monomial>> {
                        let Some(e) = e else {
                            return Ok(Bound::Unbounded);
                        };
                        let m = self.monomial(e, budget)?;
                        Ok(if closed { Bound::Included(m) } else { Bound::Excluded(m) })
                    };
                    segs.push(Segment::new(bound(&iv.lo, iv.lo_closed)?, bound(&iv.hi, iv.hi_closed)?)?);
                }
                Ok(Val::Hahn(hahn::fragment(&f, &segs)))
            }
        }
    }
}

fn small(pos: Pos, k: &Rational) -> Result<u32> {
    u32::try_from(k.to_integer()).or_else(|_| err(pos, "exponent too large"))
}

/// `Some(x)` when `f` is the variable `x` itself.
fn bare_var(f: &Gps) -> Option<String> {
    let Kind::Finite(p) = f.kind() else {
        return None;
    };
    let (e, c) = p.iter().next()?;
    if p.len() != 1 || !c.is_one() || e.len() != 1 {
        return None;
    }
    let (x, k) = e.iter().next()?;
    k.is_one().then(|| x.clone())
}

fn show_hahn(f: &HahnSeries, depth: usize, budget: &Budget) -> (Vec<String>, Value) {
    let obs = match Observation::take(f, depth, budget) {
        Ok(o) => o,
        Err(e) => return (vec![format!("error: {e}")], json!({ "error": e.to_string() })),
    };
    let mut lines: Vec<String> = obs.terms.iter().map(|t| t.to_string()).collect();
    if obs.terms.is_empty() && obs.completion == Completion::Ended {
        lines.push("0".into());
    }
    lines.push(
        match obs.completion {
            Completion::Ended => "(exhausted)",
            Completion::Open => "(more terms may follow)",
            Completion::Budget => "(budget exhausted)",
        }
        .into(),
    );
    (lines, json!(hahn::TermListJson::from(&obs)))
}

fn show_gps(f: &Gps, depth: usize, budget: &Budget) -> Result<(Vec<String>, Value)> {
    let p = f.expand(&Rational::from_integer(depth.into()), budget)?;
    let mut grades: BTreeMap<Rational, gps::Poly> = BTreeMap::new();
    for (e, c) in p.iter() {
        grades.entry(gps::degree(e)).or_default().insert(e.clone(), c.clone());
    }
    let mut lines = Vec::new();
    let mut js = Vec::new();
    for (d, q) in &grades {
        lines.push(format!("[{}] {}", rational::fmt(d), gps::poly_string(q)));
        js.push(json!({
            "degree": rational::fmt(d),
            "terms": q.iter().map(|(e, c)| json!({
                "exponents": e.iter().map(|(v, x)| (v.clone(), rational::fmt(x))).collect::<BTreeMap<_, _>>(),
                "coeff": rational::fmt(c),
            })).collect::<Vec<_>>(),
        }));
    }
    if lines.is_empty() {
        lines.push("0".into());
    }
    lines.push(format!("(total degree <= {depth})"));
    Ok((lines, json!({ "grades": js, "max_degree": depth })))
}

/// A random finite series with at most 12 terms and small exponents.
pub fn random_series<R: Rng>(group: &Arc<MonomialGroup>, rng: &mut R) -> HahnSeries {
    let n = rng.gen_range(0..=12);
    let mut terms = Vec::new();
    for _ in 0..n {
        let exps = (0..group.rank())
            .map(|_| rational::ratio(rng.gen_range(-4..=8), rng.gen_range(1..=3)))
            .collect();
        let c = rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4));
        terms.push((Monomial::new(group, exps).expect("rank matches"), c));
    }
    HahnSeries::from_terms(group, terms).expect("finite series")
}

fn same(f: &HahnSeries, g: &HahnSeries, budget: &Budget) -> Result<bool> {
    Ok(f.all_terms(budget)? == g.all_terms(budget)?)
}

/// Names of the ring laws that fail on `(a, b, c)`.
pub fn ring_law_failures(a: &HahnSeries, b: &HahnSeries, c: &HahnSeries, budget: &Budget) -> Result<Vec<String>> {
    use hahn::{add, mul};
    let one = HahnSeries::constant(a.group(), Rational::one());
    let zero = HahnSeries::zero(a.group());
    let checks = [
        ("add-assoc", add(&add(a, b)?, c)?, add(a, &add(b, c)?)?),
        ("add-comm", add(a, b)?, add(b, a)?),
        ("mul-assoc", mul(&mul(a, b)?, c)?, mul(a, &mul(b, c)?)?),
        ("mul-comm", mul(a, b)?, mul(b, a)?),
        ("distrib", mul(a, &add(b, c)?)?, add(&mul(a, b)?, &mul(a, c)?)?),
        ("add-unit", add(a, &zero)?, a.clone()),
        ("mul-unit", mul(a, &one)?, a.clone()),
        ("add-inverse", add(a, &hahn::neg(a))?, zero.clone()),
    ];
    let mut out = Vec::new();
    for (name, l, r) in checks {
        if !same(&l, &r, budget)? {
            out.push(name.to_string());
        }
    }
    Ok(out)
}
