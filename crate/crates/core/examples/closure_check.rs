//! Truncation-closure check over generated fixture sets.

use hahnforge::closure::{adversarial_fixture, check_truncation_closed, standard_fixtures, ClosureConfig};

fn main() -> hahnforge::Result<()> {
    let mut fixtures = standard_fixtures()?;
    fixtures.push(adversarial_fixture()?);
    for fx in fixtures {
        let set = fx.generate(ClosureConfig::default())?;
        let rep = check_truncation_closed(&set, None)?;
        let s = &rep.stats;
        println!(
            "{:<16} elements {:>4}  probes {:>4}  witnessed {:>4}  failed {:>3}  budget {:>3}",
            fx.name, s.elements, s.probes, s.witnessed, s.failed, s.budget
        );
    }
    Ok(())
}
