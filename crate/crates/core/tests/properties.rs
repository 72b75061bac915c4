//! Property tests for series arithmetic and truncation.

use std::sync::Arc;

use hahnforge::hahn::{self, invert_unit, v_truncate, Budget, HahnSeries, Term};
use hahnforge::order::{ArchClass, Monomial, MonomialGroup};
use hahnforge::rational::{ratio, Rational};
use proptest::prelude::*;

fn group() -> Arc<MonomialGroup> {
    MonomialGroup::new(&["u", "t"]).unwrap()
}

type Raw = Vec<((i64, i64), (i64, i64))>;

fn raw(le_one: bool) -> impl Strategy<Value = Raw> {
    let lo: i64 = if le_one { 0 } else { -4 };
    prop::collection::vec(((-3i64..=3, lo..=6), (-6i64..=6, 1i64..=3)), 0..6).prop_map(move |v| {
        v.into_iter()
            .map(|((a, c), k)| if le_one && a < 0 { ((-a, c), k) } else { ((a, c), k) })
            .collect()
    })
}

fn build(g: &Arc<MonomialGroup>, r: &Raw) -> HahnSeries {
    let terms = r
        .iter()
        .map(|((a, c), (n, d))| (Monomial::new(g, vec![ratio(*a, 1), ratio(*c, 2)]).unwrap(), ratio(*n, *d)))
        .collect();
    HahnSeries::from_terms(g, terms).unwrap()
}

fn terms(f: &HahnSeries) -> Vec<Term> {
    f.all_terms(&Budget::new(u64::MAX)).unwrap()
}

proptest! {
    #[test]
    fn product_commutes_and_distributes(a in raw(false), b in raw(false), c in raw(false)) {
        let g = group();
        let (x, y, z) = (build(&g, &a), build(&g, &b), build(&g, &c));
        prop_assert_eq!(terms(&hahn::mul(&x, &y).unwrap()), terms(&hahn::mul(&y, &x).unwrap()));
        let lhs = hahn::mul(&x, &hahn::add(&y, &z).unwrap()).unwrap();
        let rhs = hahn::add(&hahn::mul(&x, &y).unwrap(), &hahn::mul(&x, &z).unwrap()).unwrap();
        prop_assert_eq!(terms(&lhs), terms(&rhs));
    }

    #[test]
    fn product_associates(a in raw(false), b in raw(false), c in raw(false)) {
        let g = group();
        let (x, y, z) = (build(&g, &a), build(&g, &b), build(&g, &c));
        let lhs = hahn::mul(&hahn::mul(&x, &y).unwrap(), &z).unwrap();
        let rhs = hahn::mul(&x, &hahn::mul(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(terms(&lhs), terms(&rhs));
    }

    #[test]
    fn truncation_is_additive_and_idempotent(a in raw(false), b in raw(false), e in (-3i64..=3, -4i64..=6)) {
        let g = group();
        let (x, y) = (build(&g, &a), build(&g, &b));
        let m = Monomial::new(&g, vec![ratio(e.0, 1), ratio(e.1, 2)]).unwrap();
        let tr = |f: &HahnSeries| hahn::truncate(f, &m).unwrap();
        prop_assert_eq!(terms(&tr(&hahn::add(&x, &y).unwrap())), terms(&hahn::add(&tr(&x), &tr(&y)).unwrap()));
        prop_assert_eq!(terms(&tr(&tr(&x))), terms(&tr(&x)));
        prop_assert!(terms(&tr(&x)).iter().all(|t| t.monomial > m));
    }

    #[test]
    fn v_truncation_is_multiplicative(a in raw(true), b in raw(true), v in 0usize..2) {
        let g = group();
        let (x, y) = (build(&g, &a), build(&g, &b));
        let v = ArchClass::Finite(v);
        let lhs = v_truncate(&hahn::mul(&x, &y).unwrap(), v);
        let rhs = hahn::mul(&v_truncate(&x, v), &v_truncate(&y, v)).unwrap();
        prop_assert_eq!(terms(&lhs), terms(&rhs));
    }

    #[test]
    fn inverse_times_series_is_one(a in raw(false)) {
        let g = group();
        let x = build(&g, &a);
        let b = Budget::new(2_000_000);
        prop_assume!(!x.is_zero(&b).unwrap());
        let p = hahn::mul(&x, &invert_unit(&x, &b).unwrap()).unwrap();
        let cut = Monomial::new(&g, vec![ratio(0, 1), ratio(3, 1)]).unwrap();
        let above = hahn::truncate(&p, &cut).unwrap().all_terms(&b).unwrap();
        prop_assert_eq!(above, vec![Term::new(Monomial::identity(&g), Rational::from_integer(1.into()))]);
    }
}
