//! Generalized power series: composition, blow-ups and interpretation.
//! `1/(1 - z - z^2)` comes out with Fibonacci coefficients.

use std::collections::BTreeMap;

use hahnforge::gps::{interpret, poly_string, single, Gps};
use hahnforge::hahn::{Budget, HahnSeries};
use hahnforge::order::{Monomial, MonomialGroup};
use hahnforge::rational::{int, ratio};

fn main() -> hahnforge::Result<()> {
    let b = Budget::default();
    let zz = Gps::var("z")?.mul(&Gps::binomial(int(1), "z")?);
    let fib = Gps::geometric("x")?.compose_pcomp("x", &zz, &b)?;
    let cs: Vec<String> = (0..12)
        .map(|n| fib.coeff(&single("z", int(n)), &b).map(|c| c.to_string()))
        .collect::<hahnforge::Result<_>>()?;
    println!("geom(z + z^2): {}", cs.join(", "));

    // x -> z0 (2 + z1)
    let bl = Gps::geometric("x")?.blowup_affine("x", "z0", "z1", int(2))?;
    println!("blow-up to degree 2: {}", poly_string(&*bl.expand(&int(2), &b)?));

    // Evaluate sqrt(1 + x) at x = t/4.
    let g = MonomialGroup::new(&["t"])?;
    let x = HahnSeries::term_series(&Monomial::new(&g, vec![int(1)])?, ratio(1, 4));
    let at = BTreeMap::from([("x".to_string(), x)]);
    let v = interpret(&Gps::binomial(ratio(1, 2), "x")?, &g, &at, &b)?;
    println!("sqrt(1 + t/4) = {:?}", v.take_terms(5, &b)?);
    Ok(())
}
