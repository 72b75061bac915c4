use crate::error::Result;
use crate::hahn::Budget;
use crate::order::{product_segmentation, Monomial, Segment};

use super::Rps;

/// One summand `f‖n · (g‖p_next − g‖p)` of a truncated product.
///
/// `None` stands for "no truncation".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutTriple {
    pub n: Option<Monomial>,
    pub p_next: Option<Monomial>,
    pub p: Monomial,
}

/// The element right after `last` in the decreasing chain `s`.
fn below(s: &[Monomial], last: &Monomial) -> Option<Monomial> {
    let i = s.iter().position(|x| x == last)?;
    s.get(i + 1).cloned()
}

/// Cut points from two probed supports (decreasing) for `(fg)‖m`.
pub fn product_cuts(r: &[Monomial], s: &[Monomial], m: &Monomial) -> Result<Vec<CutTriple>> {
    let blocks = product_segmentation(r, s, &Segment::above(m.clone()))?;
    Ok(blocks
        .into_iter()
        .map(|b| {
            let u_last = b.u.last().expect("nonempty block");
            let t_last = b.t.last().expect("nonempty block");
            CutTriple {
                n: below(r, u_last),
                p_next: below(s, t_last),
                p: b.t[0].clone(),
            }
        })
        .collect())
}

/// Cut points for `(fg)‖m`. Each support is scanned until its terms fall
/// below what the other factor could lift past `m`; coefficients are read up
/// to total degree `horizon`, at most `cap` terms each.
pub fn tc_product_decompose(
    f: &Rps,
    g: &Rps,
    m: &Monomial,
    horizon: u32,
    cap: usize,
    budget: &Budget,
) -> Result<Vec<CutTriple>> {
    let (Some(mf), Some(mg)) = (f.supp_max(horizon, budget)?, g.supp_max(horizon, budget)?) else {
        return Ok(vec![]);
    };
    let r = f.supp_probe_below(&m.div(&mg), horizon, cap, budget)?.monomials;
    let s = g.supp_probe_below(&m.div(&mf), horizon, cap, budget)?.monomials;
    product_cuts(&r, &s, m)
}

/// `Σ_j f‖n_j · (g‖p_{j+1} − g‖p_j)`
pub fn tc_product_assemble(f: &Rps, g: &Rps, cuts: &[CutTriple]) -> Result<Rps> {
    let mut acc = Rps::zero(f.vars(), f.group());
    for c in cuts {
        let a = f.coeff_trunc_opt(c.n.as_ref())?;
        let b = g.coeff_trunc_opt(c.p_next.as_ref())?.sub(&g.coeff_trunc(&c.p)?)?;
        acc = acc.add(&a.mul(&b)?)?;
    }
    Ok(acc)
}
