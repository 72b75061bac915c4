//! Running a script in the series language.

use hahnforge::dsl::{run_source, RunConfig};

const SCRIPT: &str = "
group u > t;
var x;
let f = geom(x);
show interp(f, x -> t*(1/2 + u)) depth 6;
show trunc(inv(1 - t), t^(5/2));
show comp(geom(x), x -> x + x^2) depth 8;
";

fn main() -> hahnforge::Result<()> {
    for rec in run_source(SCRIPT, RunConfig::default())? {
        print!("{}", rec.text());
    }
    Ok(())
}
