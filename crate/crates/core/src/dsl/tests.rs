use super::*;

fn out(src: &str) -> Vec<String> {
    run_source(src, RunConfig::default())
        .unwrap()
        .into_iter()
        .flat_map(|r| r.lines)
        .collect()
}

#[test]
fn truncated_geometric() {
    assert_eq!(
        out("group t; show trunc(inv(1 - t), t^(5/2)) depth 10;"),
        ["1", "1 * t^1", "1 * t^2", "(exhausted)"]
    );
}

#[test]
fn empty_program() {
    assert!(run_source("", RunConfig::default()).unwrap().is_empty());
    assert!(run_source("  # nothing\n", RunConfig::default()).unwrap().is_empty());
}

#[test]
fn unbound_name_has_location() {
    let recs = run_source("group t;\nshow t + y;", RunConfig::default()).unwrap();
    assert!(!recs[1].ok);
    assert_eq!(recs[1].lines, ["error: 2:10: unbound name `y`"]);
}

#[test]
fn syntax_error_has_location() {
    let e = parse("group t;\nshow (t + ;").unwrap_err();
    assert_eq!(e.to_string(), "2:11: expected an expression, found `;`");
}

#[test]
fn interp_monomial() {
    assert_eq!(out("group t; var x; show interp(x^(1/2), x -> t^2*(9+0));"), ["3 * t^1", "(exhausted)"]);
}

#[test]
fn fibonacci() {
    let lines = out("var x, z; show comp(geom(x), x -> z + z^2) depth 6;");
    assert_eq!(lines[6], "[6] 13 * z^6");
}

#[test]
fn print_parse_fixpoint() {
    let srcs = [
        "group u > t; var x; let f = geom(x) - 3/2*x^(1/2); show interp(f, x -> t*(1/2 + u)) depth 4;",
        "show -(-t)^2 - (a - b) * -c + d^(-1/3) depth 3;",
        "show frag(f, [t^3, t[, ]_, t^5]) ; show frag(g, x in [0, 2[, deg in ]1, _]);",
        "show blowA(binom(-1/2)(x), x -> z0, z1, 3/2) depth 2; closure-check rank_two without renorm, partial depth 2 probe 4; selftest 3;",
    ];
    for s in srcs {
        let once = canonical(s).unwrap_or_else(|e| panic!("{s}: {e}"));
        let twice = canonical(&once).unwrap();
        assert_eq!(once, twice, "{s}");
    }
}

#[test]
fn type_errors_continue() {
    let recs = run_source("group t; var x; show t + x; show t;", RunConfig::default()).unwrap();
    assert!(!recs[2].ok);
    assert!(recs[3].ok);
}
