use std::collections::BTreeMap;
use std::sync::Arc;

use super::*;
use crate::error::Error;
use crate::hahn::{truncate, Budget, HahnSeries, Term};
use crate::order::{Monomial, MonomialGroup, Segment};
use crate::rational::{int, ratio, Rational};

fn ex(pairs: &[(&str, Rational)]) -> Exps {
    pairs.iter().fold(Exps::new(), |acc, (v, e)| exps_add(&acc, &single(v, e.clone())))
}

fn mono(v: &str, e: Rational) -> Gps {
    Gps::monomial(&[v], single(v, e), int(1)).unwrap()
}

fn coeffs(f: &Gps, v: &str, n: i64) -> Vec<Rational> {
    let b = Budget::default();
    (0..=n).map(|k| f.coeff(&single(v, int(k)), &b).unwrap()).collect()
}

#[test]
fn coeff_examples() {
    let b = Budget::default();
    assert_eq!(Gps::geometric("x").unwrap().coeff(&single("x", int(7)), &b).unwrap(), int(1));
    let bin = Gps::binomial(ratio(1, 2), "x").unwrap();
    assert_eq!(bin.coeff(&single("x", int(2)), &b).unwrap(), ratio(-1, 8));
    let shifted = mono("x", ratio(1, 2)).mul(&Gps::geometric("x").unwrap());
    assert_eq!(shifted.coeff(&single("x", ratio(3, 2)), &b).unwrap(), int(1));
    assert_eq!(shifted.coeff(&single("x", int(1)), &b).unwrap(), int(0));
}

#[test]
fn derivatives() {
    let b = Budget::default();
    let r = mono("x", ratio(1, 2)).renorm_derivative("x").unwrap();
    assert_eq!(*r.expand(&int(5), &b).unwrap(), [(single("x", ratio(1, 2)), ratio(1, 2))].into());
    let d = Gps::geometric("x").unwrap().derivative("x").unwrap();
    assert_eq!(coeffs(&d, "x", 5), (1..=6).map(int).collect::<Vec<_>>());
    let c = Gps::finite(&["x"], [(Exps::new(), int(3))].into()).unwrap();
    assert!(c.renorm_derivative("x").unwrap().expand(&int(4), &b).unwrap().is_empty());
}

#[test]
fn reindex_examples() {
    let b = Budget::default();
    let xy = Gps::monomial(&["x", "y"], ex(&[("x", int(1)), ("y", int(1))]), int(1)).unwrap();
    let s: BTreeMap<String, String> = [("x".into(), "z".into()), ("y".into(), "z".into())].into();
    assert_eq!(*xy.reindex(&s).unwrap().expand(&int(4), &b).unwrap(), [(single("z", int(2)), int(1))].into());
    let gg = Gps::geometric("x").unwrap().mul(&Gps::geometric("y").unwrap());
    let r = gg.reindex(&s).unwrap();
    assert_eq!(coeffs(&r, "z", 6), (1..=7).map(int).collect::<Vec<_>>());
    assert!(xy.reindex(&BTreeMap::new()).unwrap().ptr_eq(&xy));
}

#[test]
fn fragments() {
    let b = Budget::default();
    let g = Gps::geometric("x").unwrap();
    let seg = Segment { lower: std::ops::Bound::Unbounded, upper: std::ops::Bound::Excluded(int(2)) };
    let fr = g.fragment(FragmentSpec::Var { var: "x".into(), seg });
    let want: Poly = [(Exps::new(), int(1)), (single("x", int(1)), int(1))].into();
    assert_eq!(*fr.expand(&int(10), &b).unwrap(), want);
    assert_eq!(coeffs(&g.fragment(FragmentSpec::Full), "x", 4), coeffs(&g, "x", 4));
    assert!(g.fragment(FragmentSpec::Empty).expand(&int(10), &b).unwrap().is_empty());
}

#[test]
fn affine_blowup() {
    let b = Budget::default();
    let f = mono("x", ratio(1, 2)).blowup_affine("x", "z0", "z1", int(4)).unwrap();
    let h = ratio(1, 2);
    let c = |m: i64| f.coeff(&ex(&[("z0", h.clone()), ("z1", int(m))]), &b).unwrap();
    assert_eq!((c(0), c(1), c(2)), (int(2), ratio(1, 4), ratio(-1, 64)));
    assert!(f.meta().classical.contains("z1"));
    let lin = Gps::var("x").unwrap().blowup_affine("x", "z0", "z1", int(1)).unwrap();
    let want: Poly = [(single("z0", int(1)), int(1)), (ex(&[("z0", int(1)), ("z1", int(1))]), int(1))].into();
    assert_eq!(*lin.expand(&int(6), &b).unwrap(), want);
    assert!(matches!(Gps::var("x").unwrap().blowup_affine("x", "a", "b", int(0)), Err(Error::Invalid(_))));
    let bad = mono("x", ratio(1, 2)).blowup_affine("x", "z0", "z1", int(2)).unwrap();
    assert!(matches!(bad.expand(&int(2), &b), Err(Error::Irrational(_))));
}

#[test]
fn mult_blowup() {
    let b = Budget::default();
    let f = mono("x", ratio(3, 2)).blowup_mult("x", "z0", "z1").unwrap();
    let want: Poly = [(ex(&[("z0", ratio(3, 2)), ("z1", ratio(3, 2))]), int(1))].into();
    assert_eq!(*f.expand(&int(5), &b).unwrap(), want);
    let g = Gps::geometric("x").unwrap().blowup_mult("x", "z0", "z1").unwrap();
    let p = g.expand(&int(6), &b).unwrap();
    assert_eq!(p.len(), 4);
    assert!(p.keys().all(|e| exp_of(e, "z0") == exp_of(e, "z1")));
}

fn fib(n: usize) -> Vec<Rational> {
    let mut v = vec![int(1), int(1)];
    while v.len() < n {
        let k = v.len();
        v.push(&v[k - 1] + &v[k - 2]);
    }
    v.truncate(n);
    v
}

#[test]
fn fibonacci_compositions() {
    let b = Budget::default();
    let g = Gps::var("z").unwrap().mul(&Gps::binomial(int(1), "z").unwrap());
    let geo = Gps::geometric("x").unwrap();
    let p = geo.compose_pcomp("x", &g, &b).unwrap();
    assert_eq!(coeffs(&p, "z", 20), fib(21));
    let geo_y = Gps::geometric("y").unwrap();
    let q = geo_y.compose_classical("y", &g, &b).unwrap();
    assert_eq!(coeffs(&q, "z", 20), fib(21));
    let r = geo_y.compose_classical("y", &Gps::var("z").unwrap(), &b).unwrap();
    assert_eq!(coeffs(&r, "z", 8), vec![int(1); 9]);
}

#[test]
fn pcomp_examples() {
    let b = Budget::default();
    let g = Gps::monomial(&["z"], single("z", int(2)), int(4)).unwrap();
    let r = mono("x", ratio(1, 2)).compose_pcomp("x", &g, &b).unwrap();
    assert_eq!(*r.expand(&int(6), &b).unwrap(), [(single("z", int(1)), int(2))].into());
    let g2 = Gps::var("z").unwrap().add(&mono("z", ratio(3, 2)));
    let id = Gps::var("x").unwrap().compose_pcomp("x", &g2, &b).unwrap();
    assert_eq!(id.expand(&int(4), &b).unwrap(), g2.expand(&int(4), &b).unwrap());
    let not = Gps::var("z").unwrap().scale(int(-1));
    assert!(matches!(Gps::var("x").unwrap().compose_pcomp("x", &not, &b), Err(Error::NotPComposable(_))));
    let tie = Gps::var("z").unwrap().add(&Gps::var("w").unwrap());
    assert!(matches!(Gps::var("x").unwrap().compose_pcomp("x", &tie, &b), Err(Error::NotPComposable(_))));
    assert!(matches!(
        mono("y", ratio(1, 2)).compose_classical("y", &Gps::var("z").unwrap(), &b),
        Err(Error::NotClassical(_))
    ));
    assert!(matches!(
        Gps::geometric("y").unwrap().compose_classical("y", &Gps::binomial(int(1), "z").unwrap(), &b),
        Err(Error::NotInfinitesimal(_))
    ));
}

#[test]
fn monomial_division() {
    let b = Budget::default();
    let f = mono("x", ratio(3, 2)).add(&mono("x", int(2)));
    let d = f.monomial_divide(&single("x", ratio(1, 2))).unwrap();
    let want: Poly = [(single("x", int(1)), int(1)), (single("x", ratio(3, 2)), int(1))].into();
    assert_eq!(*d.expand(&int(5), &b).unwrap(), want);
    let g = Gps::geometric("x").unwrap().sub(&Gps::constant(int(1)));
    let s = g.monomial_divide(&single("x", int(1))).unwrap();
    assert_eq!(coeffs(&s, "x", 6), vec![int(1); 7]);
    let one = Gps::finite(&["x"], [(Exps::new(), int(1))].into()).unwrap();
    let e = one.monomial_divide(&single("x", ratio(1, 2))).unwrap();
    assert!(matches!(e.expand(&int(2), &b), Err(Error::Divisibility(_))));
}

fn tgroup() -> Arc<MonomialGroup> {
    MonomialGroup::new(&["t"]).unwrap()
}

fn tm(g: &Arc<MonomialGroup>, e: Rational) -> Monomial {
    Monomial::new(g, vec![e]).unwrap()
}

fn hs(g: &Arc<MonomialGroup>, terms: &[(Rational, Rational)]) -> HahnSeries {
    HahnSeries::from_terms(g, terms.iter().map(|(e, c)| (tm(g, e.clone()), c.clone())).collect()).unwrap()
}

#[test]
fn interpret_examples() {
    let b = Budget::default();
    let g = tgroup();
    let sqrt = mono("x", ratio(1, 2));
    let a: BTreeMap<String, HahnSeries> = [("x".into(), hs(&g, &[(int(2), int(9))]))].into();
    let r = interpret(&sqrt, &g, &a, &b).unwrap();
    assert_eq!(r.all_terms(&b).unwrap(), vec![Term::new(tm(&g, int(1)), int(3))]);

    let a: BTreeMap<String, HahnSeries> = [("x".into(), hs(&g, &[(int(1), int(1)), (int(2), int(1))]))].into();
    let r = interpret(&sqrt, &g, &a, &b).unwrap();
    let got = r.take_terms(4, &b).unwrap();
    let want = [ratio(1, 2), ratio(3, 2), ratio(5, 2), ratio(7, 2)]
        .into_iter()
        .zip([int(1), ratio(1, 2), ratio(-1, 8), ratio(1, 16)])
        .map(|(e, c)| Term::new(tm(&g, e), c))
        .collect::<Vec<_>>();
    assert_eq!(got, want);

    let a: BTreeMap<String, HahnSeries> = [("x".into(), hs(&g, &[(int(1), int(1))]))].into();
    let r = interpret(&Gps::geometric("x").unwrap(), &g, &a, &b).unwrap();
    let got = r.take_terms(6, &b).unwrap();
    assert!(got.iter().enumerate().all(|(i, t)| *t == Term::new(tm(&g, int(i as i64)), int(1))));

    let neg: BTreeMap<String, HahnSeries> = [("x".into(), hs(&g, &[(int(1), int(-1))]))].into();
    assert!(matches!(interpret(&sqrt, &g, &neg, &b), Err(Error::NormalForm(_))));
    // a classical variable takes a negative value
    let r = interpret(&Gps::geometric("x").unwrap(), &g, &neg, &b).unwrap();
    let tr = truncate(&r, &tm(&g, int(3))).unwrap().all_terms(&b).unwrap();
    assert_eq!(tr.len(), 3);
    assert_eq!(tr[1].coeff, int(-1));
}

#[test]
fn interpret_finite_terminates() {
    let b = Budget::default();
    let g = tgroup();
    let f = Gps::var("x").unwrap().add(&Gps::constant(int(2)));
    let a: BTreeMap<String, HahnSeries> = [("x".into(), hs(&g, &[(int(1), int(1))]))].into();
    let r = interpret(&f, &g, &a, &b).unwrap();
    assert_eq!(r.all_terms(&b).unwrap().len(), 2);
}

#[test]
fn blowup_decomposition() {
    let b = Budget::default();
    let geo = Gps::geometric("x").unwrap();
    let k = int(1);
    let cut = BlowupCut::S1(2);
    let dec = trunc_decompose_blowup(&geo, "x", "z0", "z1", &k, &cut, &b).unwrap();
    let TruncDecomposition::Pieces { pieces, .. } = &dec else { panic!() };
    assert_eq!(pieces.len(), 2);
    assert_eq!((pieces[0].m, pieces[1].m), (0, 1));
    assert_eq!(coeffs(&pieces[1].h, "z0", 5), (0..=5).map(int).collect::<Vec<_>>());
    let lhs = dec.assemble("x", "z0", "z1", &k).unwrap();
    let rhs = TruncDecomposition::target(&geo, "x", "z0", "z1", &k, &cut).unwrap();
    assert_eq!(lhs.expand(&int(8), &b).unwrap(), rhs.expand(&int(8), &b).unwrap());

    let none = trunc_decompose_blowup(&geo, "x", "z0", "z1", &k, &BlowupCut::S1(0), &b).unwrap();
    assert!(none.assemble("x", "z0", "z1", &k).unwrap().expand(&int(5), &b).unwrap().is_empty());

    let sq = mono("x", ratio(1, 2));
    let cut = BlowupCut::S0(int(1));
    let k = int(4);
    let dec = trunc_decompose_blowup(&sq, "x", "z0", "z1", &k, &cut, &b).unwrap();
    let lhs = dec.assemble("x", "z0", "z1", &k).unwrap();
    let rhs = TruncDecomposition::target(&sq, "x", "z0", "z1", &k, &cut).unwrap();
    assert_eq!(lhs.expand(&int(8), &b).unwrap(), rhs.expand(&int(8), &b).unwrap());
    assert!(!rhs.expand(&int(8), &b).unwrap().is_empty());
}

#[test]
fn l0_equals_l1() {
    let b = Budget::default();
    let f = Gps::geometric("y").unwrap().mul(&Gps::binomial(ratio(1, 3), "y").unwrap());
    let g = Gps::var("z").unwrap().scale(int(2)).add(&mono("z", ratio(3, 2)));
    let l0 = f.compose_pcomp("y", &g, &b).unwrap();
    let l1 = f.compose_classical("y", &g, &b).unwrap();
    assert_eq!(l0.expand(&int(10), &b).unwrap(), l1.expand(&int(10), &b).unwrap());
}
