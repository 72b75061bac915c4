use num_traits::{Signed, Zero};

use super::expr::{degree, exp_of, Exps, Gps, NormalForm, Poly};
use crate::error::{Error, Result};
use crate::hahn::Budget;
use crate::rational::{self, Rational};

/// How far above the structural lower degree the grade scans look.
pub const PROBE_WIDTH: i64 = 8;

impl Gps {
    /// Terms in the window `[low, low + w]` for a doubling `w`, stopping at the
    /// first nonempty window; `None` if the whole probe width is empty.
    fn first_window(&self, budget: &Budget) -> Result<Option<Poly>> {
        let low = self.meta().low_degree();
        let mut w = self.meta().step();
        let cap = rational::int(PROBE_WIDTH);
        loop {
            let top = &low + &w;
            let p = self.expand(&top, budget)?;
            if !p.is_empty() {
                return Ok(Some((*p).clone()));
            }
            if self.meta().max_degree.as_ref().is_some_and(|m| *m <= top) || w >= cap {
                return Ok(None);
            }
            w = (&w * rational::int(2)).min(cap.clone());
        }
    }

    /// Least total degree of the support, scanning up to the probe width.
    pub fn min_degree(&self, budget: &Budget) -> Result<Option<Rational>> {
        Ok(self
            .first_window(budget)?
            .and_then(|p| p.keys().map(degree).min()))
    }

    /// The terms of least total degree.
    pub fn leading_grade(&self, budget: &Budget) -> Result<Poly> {
        let Some(p) = self.first_window(budget)? else {
            return Ok(Poly::new());
        };
        let d = p.keys().map(degree).min().expect("nonempty");
        Ok(p.into_iter().filter(|(e, _)| degree(e) == d).collect())
    }

    fn probe_top(&self, budget: &Budget) -> Result<Rational> {
        let base = self.min_degree(budget)?.unwrap_or_else(|| self.meta().low_degree());
        Ok(base + rational::int(PROBE_WIDTH))
    }

    /// Support `>= 0`: structural when the lower bounds allow, else probed.
    pub fn is_non_singular(&self, budget: &Budget) -> Result<bool> {
        if self.meta().low.values().all(|l| !l.is_negative()) {
            return Ok(true);
        }
        let top = self.probe_top(budget)?;
        let p = self.expand(&top, budget)?;
        Ok(p.keys().all(|e| e.values().all(|x| !x.is_negative())))
    }

    pub fn is_infinitesimal(&self, budget: &Budget) -> Result<bool> {
        Ok(self.is_non_singular(budget)? && self.coeff(&Exps::new(), budget)?.is_zero())
    }

    /// Splits `f = x^γ (k + h)` with `h` non-singular and infinitesimal.
    pub fn normal_form(&self, budget: &Budget) -> Result<NormalForm> {
        let lead = self.leading_grade(budget)?;
        if lead.is_empty() {
            return Err(Error::NormalForm("series is zero up to the probe width".into()));
        }
        if lead.len() > 1 {
            return Err(Error::NormalForm(format!(
                "{} support points share the least degree",
                lead.len()
            )));
        }
        let (gamma, k) = lead.into_iter().next().expect("one term");
        let vars: Vec<&str> = self.vars().iter().map(String::as_str).collect();
        let lead_term = Gps::monomial(&vars, gamma.clone(), k.clone())?;
        let h = self.sub(&lead_term).monomial_divide(&gamma)?;
        let top = self.probe_top(budget)? - degree(&gamma);
        match h.expand(&top, budget) {
            Ok(_) => {}
            Err(Error::Divisibility(msg)) => {
                return Err(Error::NormalForm(format!("no unique minimal support point: {msg}")))
            }
            Err(e) => return Err(e),
        }
        Ok(NormalForm { gamma, k, h })
    }

    pub fn is_normal(&self, budget: &Budget) -> Result<bool> {
        swallow(self.normal_form(budget))
    }

    /// Normal with `γ > 0` and `k > 0`.
    pub fn p_composable_form(&self, budget: &Budget) -> Result<NormalForm> {
        let nf = self
            .normal_form(budget)
            .map_err(|e| Error::NotPComposable(e.to_string()))?;
        if nf.gamma.is_empty() || nf.gamma.values().any(|x| x.is_negative()) {
            return Err(Error::NotPComposable(format!(
                "leading exponent {} is not positive",
                super::expr::exps_string(&nf.gamma)
            )));
        }
        if !nf.k.is_positive() {
            return Err(Error::NotPComposable(format!(
                "leading coefficient {} is not positive",
                rational::fmt(&nf.k)
            )));
        }
        Ok(nf)
    }

    pub fn is_p_composable(&self, budget: &Budget) -> Result<bool> {
        swallow(self.p_composable_form(budget))
    }

    /// `f(x := g)` for p-composable `g`.
    pub fn compose_pcomp(&self, x: &str, g: &Gps, budget: &Budget) -> Result<Gps> {
        let nf = g.p_composable_form(budget)?;
        if !self.vars().contains(x) {
            return Ok(self.clone());
        }
        Ok(Gps::compose_pcomp_node(self, x, g, nf))
    }

    /// `f(y := g)` for classical `y` and infinitesimal `g`.
    pub fn compose_classical(&self, y: &str, g: &Gps, budget: &Budget) -> Result<Gps> {
        if !self.vars().contains(y) {
            return Ok(self.clone());
        }
        if !self.meta().classical.contains(y) {
            return Err(Error::NotClassical(y.into()));
        }
        if !g.is_infinitesimal(budget)? {
            return Err(Error::NotInfinitesimal(format!("{g:?}")));
        }
        let step = g.meta().step();
        let delta = g.min_degree(budget)?.map_or(step.clone(), |d| d.max(step));
        Ok(Gps::compose_classical_node(self, y, g, delta))
    }

    /// Whether `x^α` divides every probed support point.
    pub fn divisible_by(&self, alpha: &Exps, budget: &Budget) -> Result<bool> {
        let top = self.probe_top(budget)?;
        let p = self.expand(&top, budget)?;
        Ok(p.keys().all(|e| alpha.iter().all(|(v, a)| exp_of(e, v) >= *a)))
    }
}

fn swallow<T>(r: Result<T>) -> Result<bool> {
    match r {
        Ok(_) => Ok(true),
        Err(Error::BudgetExhausted) => Err(Error::BudgetExhausted),
        Err(_) => Ok(false),
    }
}
