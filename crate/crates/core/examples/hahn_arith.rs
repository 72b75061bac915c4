//! Ring operations on Hahn series in two generators, `u > t`.

use hahnforge::hahn::{self, invert_unit, pow_unit, Budget, HahnSeries};
use hahnforge::order::{Monomial, MonomialGroup};
use hahnforge::rational::{int, ratio};

fn main() -> hahnforge::Result<()> {
    let g = MonomialGroup::new(&["u", "t"])?;
    let b = Budget::default();
    let t = Monomial::new(&g, vec![int(0), int(1)])?;
    let u = Monomial::new(&g, vec![int(1), int(0)])?;
    let one = Monomial::identity(&g);

    // f = 1 - t + u^-1 t^(1/2)
    let f = HahnSeries::from_terms(
        &g,
        vec![(one.clone(), int(1)), (t.clone(), int(-1)), (u.inv().mul(&t.pow(&ratio(1, 2))), int(1))],
    )?;
    println!("f          = {:?}", f.all_terms(&b)?);

    let sq = hahn::mul(&f, &f)?;
    println!("f^2        = {:?}", sq.all_terms(&b)?);

    let inv = invert_unit(&f, &b)?;
    println!("1/f        = {:?}", inv.take_terms(6, &b)?);

    let root = pow_unit(&f, &ratio(1, 2), &b)?;
    println!("sqrt(f)    = {:?}", root.take_terms(6, &b)?);

    let check = hahn::truncate(&hahn::mul(&f, &inv)?, &t.pow(&int(3)))?;
    println!("f/f above t^3 = {:?}", check.all_terms(&b)?);
    Ok(())
}
