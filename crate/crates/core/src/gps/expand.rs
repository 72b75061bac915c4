use std::rc::Rc;

use num_traits::{One, Signed, Zero};

use super::expr::{degree, exp_of, exps_add, exps_scale, poly_add_term, single, Exps, Gps, Kind, Poly};
use crate::error::{Error, Result};
use crate::hahn::Budget;
use crate::rational::{self, Rational};

fn filter_degree(p: &Poly, d: &Rational) -> Poly {
    p.iter()
        .filter(|(e, _)| degree(e) <= *d)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect()
}

/// Product of two polynomials keeping only terms of degree `<= t`.
pub(crate) fn poly_mul_trunc(a: &Poly, b: &Poly, t: &Rational, budget: &Budget) -> Result<Poly> {
    let mut out = Poly::new();
    for (ea, ca) in a {
        let da = degree(ea);
        if da > *t {
            continue;
        }
        for (eb, cb) in b {
            budget.tick()?;
            if &da + degree(eb) > *t {
                continue;
            }
            poly_add_term(&mut out, exps_add(ea, eb), ca * cb);
        }
    }
    Ok(out)
}

fn one_poly() -> Poly {
    let mut p = Poly::new();
    p.insert(Exps::new(), Rational::one());
    p
}

/// Powers `p^0, p^1, ...` truncated at degree `t`, built on demand.
struct Powers<'a> {
    base: &'a Poly,
    t: Rational,
    pows: Vec<Poly>,
}

impl<'a> Powers<'a> {
    fn new(base: &'a Poly, t: Rational) -> Self {
        Powers {
            base,
            t,
            pows: vec![one_poly()],
        }
    }

    fn get(&mut self, m: usize, budget: &Budget) -> Result<&Poly> {
        while self.pows.len() <= m {
            let next = poly_mul_trunc(self.pows.last().unwrap(), self.base, &self.t, budget)?;
            self.pows.push(next);
        }
        Ok(&self.pows[m])
    }
}

/// Coefficients `(α choose m)·k^(α−m)` of `z1^m` in `(z1 + k)^α`, for
/// `m = 0..=m_max`, by the ratio of consecutive terms.
fn affine_coeffs(alpha: &Rational, m_max: u32, k: &Rational) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(m_max as usize + 1);
    let mut c = rational::pow(k, alpha)?;
    for m in 0..=m_max {
        out.push(c.clone());
        if c.is_zero() {
            break;
        }
        let mm = rational::int(m as i64);
        c = c * (alpha - &mm) / ((mm + rational::int(1)) * k);
    }
    out.resize(m_max as usize + 1, Rational::zero());
    Ok(out)
}

impl Gps {
    /// Every term of total degree `<= d`.
    pub fn expand(&self, d: &Rational, budget: &Budget) -> Result<Rc<Poly>> {
        if let Some((cd, p)) = self.0.cache.borrow().as_ref() {
            if cd == d {
                return Ok(p.clone());
            }
            if d < cd {
                return Ok(Rc::new(filter_degree(p, d)));
            }
        }
        let p = Rc::new(self.compute(d, budget)?);
        *self.0.cache.borrow_mut() = Some((d.clone(), p.clone()));
        Ok(p)
    }

    /// The coefficient of `x^γ`.
    pub fn coeff(&self, gamma: &Exps, budget: &Budget) -> Result<Rational> {
        for v in gamma.keys() {
            if !self.vars().contains(v) {
                return Ok(Rational::zero());
            }
        }
        let p = self.expand(&degree(gamma), budget)?;
        Ok(p.get(gamma).cloned().unwrap_or_else(Rational::zero))
    }

    fn compute(&self, d: &Rational, budget: &Budget) -> Result<Poly> {
        budget.tick()?;
        let mut out = Poly::new();
        if *d < self.meta().low_degree() {
            return Ok(out);
        }
        match self.kind() {
            Kind::Finite(p) => out = filter_degree(p, d),
            Kind::Geometric(x) => {
                for k in 0..=rational::floor_i64(d) {
                    budget.tick()?;
                    out.insert(single(x, rational::int(k)), Rational::one());
                }
            }
            Kind::Binomial(l, x) => {
                for m in 0..=rational::floor_i64(d) {
                    budget.tick()?;
                    poly_add_term(&mut out, single(x, rational::int(m)), rational::binom(l, m as u32));
                }
            }
            Kind::Sum(cs) => {
                for c in cs {
                    for (e, k) in c.expand(d, budget)?.iter() {
                        budget.tick()?;
                        poly_add_term(&mut out, e.clone(), k.clone());
                    }
                }
            }
            Kind::Product(f, g) => {
                let fp = f.expand(&(d - g.meta().low_degree()), budget)?;
                let gp = g.expand(&(d - f.meta().low_degree()), budget)?;
                out = poly_mul_trunc(&fp, &gp, d, budget)?;
            }
            Kind::Scale(c, f) => {
                if !c.is_zero() {
                    for (e, k) in f.expand(d, budget)?.iter() {
                        out.insert(e.clone(), k * c);
                    }
                }
            }
            Kind::Reindex(f, sigma) => {
                for (e, k) in f.expand(d, budget)?.iter() {
                    budget.tick()?;
                    let mut ne = Exps::new();
                    for (v, a) in e {
                        let t = sigma.get(v).unwrap_or(v);
                        ne = exps_add(&ne, &single(t, a.clone()));
                    }
                    poly_add_term(&mut out, ne, k.clone());
                }
            }
            Kind::Derivative(f, x) => {
                for (e, k) in f.expand(&(d + rational::int(1)), budget)?.iter() {
                    let a = exp_of(e, x);
                    if a.is_zero() {
                        continue;
                    }
                    let ne = exps_add(e, &single(x, rational::int(-1)));
                    if degree(&ne) <= *d {
                        poly_add_term(&mut out, ne, k * a);
                    }
                }
            }
            Kind::RenormDerivative(f, x) => {
                for (e, k) in f.expand(d, budget)?.iter() {
                    poly_add_term(&mut out, e.clone(), k * exp_of(e, x));
                }
            }
            Kind::Fragment(f, spec) => {
                for (e, k) in f.expand(d, budget)?.iter() {
                    if spec.contains(e) {
                        out.insert(e.clone(), k.clone());
                    }
                }
            }
            Kind::BlowupAffine { f, x, z0, z1, k } => {
                for (e, c) in f.expand(d, budget)?.iter() {
                    let alpha = exp_of(e, x);
                    let mut rest = e.clone();
                    rest.remove(x);
                    let base = exps_add(&rest, &single(z0, alpha.clone()));
                    let room = rational::floor_i64(&(d - degree(e)));
                    if room < 0 {
                        continue;
                    }
                    for (m, coeff) in affine_coeffs(&alpha, room as u32, k)?.into_iter().enumerate() {
                        budget.tick()?;
                        if coeff.is_zero() {
                            continue;
                        }
                        let ne = exps_add(&base, &single(z1, rational::int(m as i64)));
                        poly_add_term(&mut out, ne, c * coeff);
                    }
                }
            }
            Kind::BlowupMult { f, x, z0, z1 } => {
                let lx = f.meta().low_of(x);
                let df = d - lx.min(Rational::zero());
                for (e, c) in f.expand(&df, budget)?.iter() {
                    let alpha = exp_of(e, x);
                    let mut rest = e.clone();
                    rest.remove(x);
                    let ne = exps_add(&exps_add(&rest, &single(z0, alpha.clone())), &single(z1, alpha));
                    if degree(&ne) <= *d {
                        poly_add_term(&mut out, ne, c.clone());
                    }
                }
            }
            Kind::ComposePcomp { f, x, nf, g } => {
                let c = degree(&nf.gamma);
                let delta = g.meta().step();
                out = self.compose_expand(f, x, &c, &c, &delta, d, budget, |alpha, m| {
                    affine_coeffs(alpha, m, &nf.k)
                }, &nf.gamma, &nf.h)?;
            }
            Kind::ComposeClassical { f, y, g, delta } => {
                out = self.compose_expand(f, y, &Rational::zero(), delta, delta, d, budget, |alpha, m| {
                    Ok((0..=m)
                        .map(|j| if rational::int(j as i64) == *alpha { Rational::one() } else { Rational::zero() })
                        .collect())
                }, &Exps::new(), g)?;
            }
            Kind::MonomialDivide(f, alpha) => {
                for (e, k) in f.expand(&(d + degree(alpha)), budget)?.iter() {
                    let ne = exps_add(e, &exps_scale(alpha, &rational::int(-1)));
                    if alpha.keys().any(|v| exp_of(&ne, v).is_negative()) {
                        return Err(Error::Divisibility(format!(
                            "{} does not divide {}",
                            super::expr::exps_string(alpha),
                            super::expr::exps_string(e)
                        )));
                    }
                    out.insert(ne, k.clone());
                }
            }
            Kind::MonomialMultiply(f, alpha) => {
                for (e, k) in f.expand(&(d - degree(alpha)), budget)?.iter() {
                    out.insert(exps_add(e, alpha), k.clone());
                }
            }
        }
        Ok(out)
    }

    /// Shared expansion of `f(x := z^γ·(k + h))`: each term `c x^α y^β` becomes
    /// `c z^(αγ) y^β Σ_m coeff(α, m) h^m`, where `h` has degree at least `delta`
    /// and `z^γ` has degree `c_deg`; each unit of `α` adds at least `growth`
    /// to the degree of the image. Classical substitution is the case
    /// `γ = 0`, `coeff(α, m) = [m = α]`, with `h = g` and `growth = delta`.
    #[allow(clippy::too_many_arguments)]
    fn compose_expand<F>(
        &self,
        f: &Gps,
        x: &str,
        c_deg: &Rational,
        growth: &Rational,
        delta: &Rational,
        d: &Rational,
        budget: &Budget,
        coeff: F,
        gamma: &Exps,
        h: &Gps,
    ) -> Result<Poly>
    where
        F: Fn(&Rational, u32) -> Result<Vec<Rational>>,
    {
        let fm = f.meta();
        let lx = fm.low_of(x);
        let low_rest = fm.low_degree() - &lx;
        let mut out = Poly::new();
        let a_max = (d - &low_rest) / growth;
        if a_max < lx {
            return Ok(out);
        }
        let one = rational::int(1);
        let slack = |a: &Rational| a * (&one - growth);
        let df = d + slack(&lx).max(slack(&a_max));
        let fp = f.expand(&df, budget)?;
        let mut items = Vec::new();
        let mut min_base: Option<Rational> = None;
        for (e, c) in fp.iter() {
            let alpha = exp_of(e, x);
            let mut rest = e.clone();
            rest.remove(x);
            let base_deg = &alpha * c_deg + degree(&rest);
            if base_deg > *d {
                continue;
            }
            if min_base.as_ref().map_or(true, |m| base_deg < *m) {
                min_base = Some(base_deg.clone());
            }
            items.push((alpha, rest, c.clone(), base_deg));
        }
        let Some(min_base) = min_base else {
            return Ok(out);
        };
        let t = d - &min_base;
        let hp = h.expand(&t, budget)?;
        let mut powers = Powers::new(&hp, t);
        for (alpha, rest, c, base_deg) in items {
            let shift = exps_add(&rest, &exps_scale(gamma, &alpha));
            let room = d - &base_deg;
            let m_max = rational::floor_i64(&(room / delta));
            if m_max < 0 {
                continue;
            }
            let ks = coeff(&alpha, m_max as u32)?;
            for (m, k) in ks.iter().enumerate() {
                budget.tick()?;
                if k.is_zero() {
                    continue;
                }
                let hm = powers.get(m, budget)?;
                budget.ticks(hm.len() as u64)?;
                for (e, hc) in hm {
                    let ne = exps_add(&shift, e);
                    if degree(&ne) <= *d {
                        poly_add_term(&mut out, ne, &c * k * hc);
                    }
                }
            }
        }
        Ok(out)
    }
}
