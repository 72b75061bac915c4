//! Restricted power series over Hahn coefficients: products, coefficient
//! truncation and composition with an infinitesimal argument.

use hahnforge::hahn::{Budget, HahnSeries};
use hahnforge::order::{Monomial, MonomialGroup};
use hahnforge::rational::int;
use hahnforge::rps::Rps;

fn main() -> hahnforge::Result<()> {
    let g = MonomialGroup::new(&["u", "t"])?;
    let b = Budget::default();
    let t = Monomial::new(&g, vec![int(0), int(1)])?;
    let u = Monomial::new(&g, vec![int(1), int(0)])?;
    let one = Monomial::identity(&g);
    let c = |m: &Monomial| HahnSeries::monomial(m);

    // f(x) = 1 + t x + u x^2
    let f = Rps::from_coeffs(&["x"], &g, vec![(vec![0], c(&one)), (vec![1], c(&t)), (vec![2], c(&u))], &b)?;
    let sq = f.mul(&f)?;
    for d in 0..=4 {
        println!("[x^{d}] f^2 = {:?}", sq.coeff(&[d])?.all_terms(&b)?);
    }
    let cut = f.coeff_trunc(&t)?;
    println!("coefficients of f above t: degree {:?}", cut.effective_degree());

    // f(t + y)
    let g0 = Rps::from_coeffs(&["y"], &g, vec![(vec![0], c(&t)), (vec![1], c(&one))], &b)?;
    let comp = f.compose(&[g0], &b)?;
    for d in 0..=2 {
        println!("[y^{d}] f(t + y) = {:?}", comp.coeff(&[d])?.take_terms(4, &b)?);
    }
    Ok(())
}
