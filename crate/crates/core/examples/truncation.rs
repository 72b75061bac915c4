//! Truncations `f‖m` and archimedean truncations `f‖v`.

use hahnforge::hahn::{self, v_truncate, Budget, HahnSeries};
use hahnforge::order::{ArchClass, Monomial, MonomialGroup};
use hahnforge::rational::int;

fn main() -> hahnforge::Result<()> {
    let g = MonomialGroup::new(&["u", "t"])?;
    let b = Budget::default();
    let m = |a: i64, c: i64| Monomial::new(&g, vec![int(a), int(c)]);
    let one = Monomial::identity(&g);

    // 1/(1 - t - u)
    let f = hahn::invert_unit(
        &HahnSeries::from_terms(&g, vec![(one, int(1)), (m(0, 1)?, int(-1)), (m(1, 0)?, int(-1))])?,
        &b,
    )?;
    println!("f           = {:?}", f.take_terms(8, &b)?);

    let cut = m(0, 3)?;
    println!("f || {cut}   = {:?}", hahn::truncate(&f, &cut)?.all_terms(&b)?);

    // v = 0 drops every term involving u; v = 1 drops t as well.
    for v in [ArchClass::Finite(0), ArchClass::Finite(1)] {
        println!("f || v={v}  = {:?}", v_truncate(&f, v).take_terms(5, &b)?);
    }
    Ok(())
}
