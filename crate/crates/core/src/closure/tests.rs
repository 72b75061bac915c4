use super::*;
use crate::hahn::Budget;

#[test]
fn fixtures_generate_and_close() {
    for fx in standard_fixtures().unwrap() {
        let set = fx.generate(ClosureConfig::default()).unwrap();
        assert!(set.elements.len() > 3, "{}", fx.name);
        let rep = check_truncation_closed(&set, None).unwrap();
        for e in rep.entries.iter().filter(|e| e.status != Status::Witnessed) {
            eprintln!("{}: {} at {}: {:?} {:?}", fx.name, e.element, e.probe, e.status, e.reason);
        }
        eprintln!("{}: {:?}", fx.name, rep.stats);
        assert!(rep.all_witnessed(), "{}", fx.name);
    }
}

#[test]
fn adversarial_fixture_fails() {
    let fx = adversarial_fixture().unwrap();
    let set = fx.generate(ClosureConfig::default()).unwrap();
    let rep = check_truncation_closed(&set, None).unwrap();
    eprintln!("{:?}", rep.stats);
    assert!(rep.stats.failed > 0);
}

#[test]
fn non_closed_x_is_rejected() {
    let g = crate::order::MonomialGroup::new(&["t"]).unwrap();
    let one = crate::hahn::HahnSeries::constant(&g, crate::rational::ratio(1, 1));
    let t = crate::hahn::HahnSeries::monomial(&crate::order::Monomial::generator(&g, 0));
    let x = vec![("x".to_string(), crate::hahn::add(&one, &t).unwrap())];
    assert!(check_x_closed(&x, 5, &Budget::new(10_000)).is_err());
}

#[test]
fn language_membership() {
    let f = LanguageF::standard().unwrap();
    let g = crate::gps::Gps::geometric("x").unwrap();
    assert!(f.contains(&g));
    assert!(f.fine());
}


#[test]
fn adversarial_failures_are_refusals() {
    let fx = adversarial_fixture().unwrap();
    let set = fx.generate(ClosureConfig::default()).unwrap();
    let rep = check_truncation_closed(&set, None).unwrap();
    let failed: Vec<_> = rep.entries.iter().filter(|e| e.status == Status::Failed).collect();
    assert!(!failed.is_empty());
    for e in failed {
        assert!(e.reason.as_deref().unwrap().contains("refused"), "{:?}", e.reason);
    }
}
