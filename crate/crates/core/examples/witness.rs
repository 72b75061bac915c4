//! A truncation witness for a composite `f(g)‖m`, built from truncations of
//! `f` and `g` alone.

use hahnforge::hahn::{Budget, HahnSeries};
use hahnforge::order::{Monomial, MonomialGroup};
use hahnforge::rational::int;
use hahnforge::rps::{tc_composition_witness, AtomTag, ClosedUnder, Rps, WAtom, WitnessCtx};

fn main() -> hahnforge::Result<()> {
    let g = MonomialGroup::new(&["u", "t"])?;
    let b = Budget::new(2_000_000);
    let t = Monomial::new(&g, vec![int(0), int(1)])?;
    let u = Monomial::new(&g, vec![int(1), int(0)])?;

    // f = Σ t^n x^n, g = t + u y
    let step = t.clone();
    let f = Rps::from_fn(vec!["x".into()], &g, None, Some(Monomial::identity(&g)), "geom".into(), move |m| {
        Ok(HahnSeries::monomial(&step.pow(&int(m[0] as i64))))
    });
    let gy = Rps::from_coeffs(
        &["y"],
        &g,
        vec![(vec![0], HahnSeries::monomial(&t)), (vec![1], HahnSeries::monomial(&u))],
        &b,
    )?;

    let ctx = WitnessCtx::new(&g, &["y"], &b);
    let prov = ClosedUnder::new(&["f"], &["g0"]);
    let m = u.mul(&t);
    let r = tc_composition_witness(
        &ctx,
        &WAtom::new(AtomTag::A, "f", f),
        &[WAtom::new(AtomTag::B, "g0", gy)],
        &m,
        &prov,
    )?;
    println!("f(g) || {m}");
    println!("  witness : {:?}", r.witness);
    println!("  agrees  : {}", r.value_ok);
    println!("  cases   : {} of case 1, {} of case 2", r.cases.0, r.cases.1);
    Ok(())
}
