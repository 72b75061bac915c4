//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS or FAIL line; the process fails if any criterion does.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use hahnforge::closure::{adversarial_fixture, check_truncation_closed, standard_fixtures, ClosureConfig};
use hahnforge::dsl::{self, check_corpus, random_series, ring_law_failures, RunConfig};
use hahnforge::gps::{single, Gps};
use hahnforge::hahn::{self, agree_to_depth, v_truncate, Budget, HahnSeries};
use hahnforge::order::{
    basic_segmentation, product_segmentation, segmentation_for_sum, ArchClass, Monomial, MonomialGroup, Segment,
    Segmentation,
};
use hahnforge::rational::{int, ratio, Rational};
use hahnforge::rps::{
    product_cuts, tc_composition_witness, tc_product_assemble, tc_product_decompose, AtomTag, ClosedUnder, Rps,
    WAtom, WitnessCtx,
};
use hahnforge::Result;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::ops::Bound;

type Outcome = std::result::Result<String, String>;

fn grp(names: &[&str]) -> Arc<MonomialGroup> {
    MonomialGroup::new(names).unwrap()
}

fn mono(g: &Arc<MonomialGroup>, e: &[i64]) -> Monomial {
    Monomial::new(g, e.iter().map(|x| int(*x)).collect()).unwrap()
}

fn rand_mono(g: &Arc<MonomialGroup>, rng: &mut ChaCha8Rng) -> Monomial {
    let e = (0..g.rank())
        .map(|_| if rng.gen_bool(0.4) { int(0) } else { ratio(rng.gen_range(-4..=6), rng.gen_range(1..=2)) })
        .collect();
    Monomial::new(g, e).unwrap()
}

/// A monomial `<= 1`.
fn small_mono(g: &Arc<MonomialGroup>, rng: &mut ChaCha8Rng) -> Monomial {
    let m = rand_mono(g, rng);
    if m > Monomial::identity(g) {
        m.inv()
    } else {
        m
    }
}

fn rand_coeff(rng: &mut ChaCha8Rng) -> Rational {
    let mut c = int(0);
    while c.is_zero() {
        c = ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3));
    }
    c
}

fn series_from(g: &Arc<MonomialGroup>, ms: Vec<Monomial>, rng: &mut ChaCha8Rng) -> HahnSeries {
    HahnSeries::from_terms(g, ms.into_iter().map(|m| (m, rand_coeff(rng))).collect()).unwrap()
}

fn rand_series(g: &Arc<MonomialGroup>, rng: &mut ChaCha8Rng, max: usize, le_one: bool) -> HahnSeries {
    let n = rng.gen_range(0..=max);
    let ms = (0..n).map(|_| if le_one { small_mono(g, rng) } else { rand_mono(g, rng) }).collect();
    series_from(g, ms, rng)
}

fn same(f: &HahnSeries, g: &HahnSeries, b: &Budget) -> Result<bool> {
    Ok(f.all_terms(b)? == g.all_terms(b)?)
}

fn support(f: &HahnSeries, b: &Budget) -> Vec<Monomial> {
    f.all_terms(b).unwrap().into_iter().map(|t| t.monomial).collect()
}

fn restrict(f: &HahnSeries, keep: &[Monomial], b: &Budget) -> HahnSeries {
    let terms = f
        .all_terms(b)
        .unwrap()
        .into_iter()
        .filter(|t| keep.contains(&t.monomial))
        .map(|t| (t.monomial, t.coeff))
        .collect();
    HahnSeries::from_terms(f.group(), terms).unwrap()
}

fn trunc_opt(f: &HahnSeries, m: Option<&Monomial>) -> HahnSeries {
    match m {
        Some(m) => hahn::truncate(f, m).unwrap(),
        None => f.clone(),
    }
}

// 1
fn ring_laws() -> Outcome {
    let groups = [grp(&["t"]), grp(&["u", "t"])];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let b = Budget::new(u64::MAX);
    for i in 0..1000 {
        let g = &groups[rng.gen_range(0..2)];
        let (x, y, z) = (random_series(g, &mut rng), random_series(g, &mut rng), random_series(g, &mut rng));
        let bad = ring_law_failures(&x, &y, &z, &b).map_err(|e| e.to_string())?;
        if !bad.is_empty() {
            return Err(format!("instance {i}: {}", bad.join(", ")));
        }
    }
    Ok("1000 triples".into())
}

// 2
fn product_truncation() -> Outcome {
    let g = grp(&["u", "t"]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = Budget::new(u64::MAX);
    let mut blocks_seen = 0;
    for i in 0..500 {
        let f = rand_series(&g, &mut rng, 8, false);
        let h = rand_series(&g, &mut rng, 8, false);
        let (r, s) = (support(&f, &b), support(&h, &b));
        let m = if !r.is_empty() && !s.is_empty() && rng.gen_bool(0.5) {
            r[rng.gen_range(0..r.len())].mul(&s[rng.gen_range(0..s.len())])
        } else {
            rand_mono(&g, &mut rng)
        };
        let blocks = product_segmentation(&r, &s, &Segment::above(m.clone())).map_err(|e| e.to_string())?;
        blocks_seen += blocks.len();
        let mut covered = BTreeSet::new();
        for bl in &blocks {
            for a in &bl.u {
                for c in &bl.t {
                    if !covered.insert((a.clone(), c.clone())) {
                        return Err(format!("instance {i}: boxes overlap"));
                    }
                }
            }
        }
        let want: BTreeSet<_> = r
            .iter()
            .flat_map(|a| s.iter().filter(|c| a.mul(c) > m).map(move |c| (a.clone(), c.clone())))
            .collect();
        if covered != want {
            return Err(format!("instance {i}: boxes do not cover the pairs above {m}"));
        }
        let target = hahn::truncate(&hahn::mul(&f, &h).unwrap(), &m).unwrap();
        let mut acc = HahnSeries::zero(&g);
        for bl in &blocks {
            acc = hahn::add(&acc, &hahn::mul(&restrict(&f, &bl.u, &b), &restrict(&h, &bl.t, &b)).unwrap()).unwrap();
        }
        if !same(&acc, &target, &b).unwrap() {
            return Err(format!("instance {i}: block sum differs from (fg)||{m}"));
        }
        let mut acc = HahnSeries::zero(&g);
        for c in product_cuts(&r, &s, &m).unwrap() {
            let right = hahn::sub(&trunc_opt(&h, c.p_next.as_ref()), &hahn::truncate(&h, &c.p).unwrap()).unwrap();
            acc = hahn::add(&acc, &hahn::mul(&trunc_opt(&f, c.n.as_ref()), &right).unwrap()).unwrap();
        }
        if !same(&acc, &target, &b).unwrap() {
            return Err(format!("instance {i}: cut sum differs from (fg)||{m}"));
        }
    }
    Ok(format!("500 instances, {blocks_seen} blocks"))
}

fn rand_rps(
    g: &Arc<MonomialGroup>,
    var: &str,
    deg: u32,
    rng: &mut ChaCha8Rng,
    mut coeff: impl FnMut(u32, &mut ChaCha8Rng) -> HahnSeries,
) -> Rps {
    let b = Budget::default();
    let cs = (0..=deg).map(|d| (vec![d], coeff(d, rng))).collect();
    Rps::from_coeffs(&[var], g, cs, &b).unwrap()
}

// 3
fn v_truncation() -> Outcome {
    let g = grp(&["w", "u", "t"]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = Budget::new(u64::MAX);
    let one = Monomial::identity(&g);
    for i in 0..500 {
        let v = ArchClass::Finite(rng.gen_range(0..3));
        let f = rand_series(&g, &mut rng, 6, true);
        let h = rand_series(&g, &mut rng, 6, true);
        let lhs = v_truncate(&hahn::mul(&f, &h).unwrap(), v);
        let rhs = hahn::mul(&v_truncate(&f, v), &v_truncate(&h, v)).unwrap();
        if !same(&lhs, &rhs, &b).unwrap() {
            return Err(format!("instance {i}: (fg)||v differs at v = {v}"));
        }
        let fx = rand_rps(&g, "x", rng.gen_range(0..=3), &mut rng, |_, r| rand_series(&g, r, 3, true));
        let gy = rand_rps(&g, "y", rng.gen_range(0..=2), &mut rng, |d, r| {
            let c = rand_series(&g, r, 3, true);
            if d == 0 {
                // strictly infinitesimal constant term
                hahn::sub(&c, &restrict(&c, &[one.clone()], &b)).unwrap()
            } else {
                c
            }
        });
        let lhs = fx.compose(&[gy.clone()], &b).unwrap().coeff_trunc_v(v);
        let rhs = fx.coeff_trunc_v(v).compose(&[gy.coeff_trunc_v(v)], &b).unwrap();
        if !lhs.agree(&rhs, 1000, 6, &b).unwrap() {
            return Err(format!("instance {i}: f(g)||v differs at v = {v}"));
        }
    }
    Ok("500 multiplicative, 500 compositional".into())
}

// 4
fn tc_product() -> Outcome {
    let g = grp(&["u", "t"]);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = Budget::new(u64::MAX);
    let mut cuts_seen = 0;
    for i in 0..500 {
        let mut pair = Vec::new();
        for _ in 0..2 {
            let pool: Vec<Monomial> = (0..rng.gen_range(1..=6)).map(|_| rand_mono(&g, &mut rng)).collect();
            pair.push(rand_rps(&g, "x", rng.gen_range(0..=2), &mut rng, |_, r| {
                let ms = pool.iter().filter(|_| r.gen_bool(0.6)).cloned().collect();
                series_from(&g, ms, r)
            }));
        }
        let (f, h) = (&pair[0], &pair[1]);
        let m = rand_mono(&g, &mut rng);
        let cuts = tc_product_decompose(f, h, &m, 4, 64, &b).map_err(|e| e.to_string())?;
        cuts_seen += cuts.len();
        let got = tc_product_assemble(f, h, &cuts).unwrap();
        let want = f.mul(h).unwrap().coeff_trunc(&m).unwrap();
        if !got.agree(&want, 1000, 4, &b).unwrap() {
            return Err(format!("instance {i}: assembled product differs at {m}"));
        }
    }
    Ok(format!("500 pairs, {cuts_seen} cut triples"))
}

/// `Σ_n step^n x^n`
fn geometric_rps(g: &Arc<MonomialGroup>, step: &Monomial) -> Rps {
    let step = step.clone();
    Rps::from_fn(vec!["x".into()], g, None, Some(Monomial::identity(g)), "geom".into(), move |m| {
        Ok(HahnSeries::monomial(&step.pow(&int(m[0] as i64))))
    })
}

// 5
fn tc_composition() -> Outcome {
    let g = grp(&["u", "t"]);
    let b0 = Budget::default();
    let t = mono(&g, &[0, 1]);
    let u = mono(&g, &[1, 0]);
    let one = Monomial::identity(&g);
    let hs = |ts: &[(Monomial, i64)]| {
        HahnSeries::from_terms(&g, ts.iter().map(|(m, c)| (m.clone(), int(*c))).collect()).unwrap()
    };
    let poly = Rps::from_coeffs(
        &["x"],
        &g,
        vec![(vec![0], hs(&[(one.clone(), 1)])), (vec![1], hs(&[(one.clone(), 2)])), (vec![3], hs(&[(t.clone(), 1)]))],
        &b0,
    )
    .unwrap();
    let fs = [
        ("geom(t)", geometric_rps(&g, &t)),
        ("geom(1)", geometric_rps(&g, &one)),
        ("1+2x+tx^3", poly),
    ];
    let gs = [
        ("u", Rps::from_coeffs(&["y"], &g, vec![(vec![0], hs(&[(u.clone(), 1)]))], &b0).unwrap()),
        (
            "y+t+u/t",
            Rps::from_coeffs(
                &["y"],
                &g,
                vec![(vec![0], hs(&[(t.clone(), 1), (u.div(&t), 1)])), (vec![1], hs(&[(one.clone(), 1)]))],
                &b0,
            )
            .unwrap(),
        ),
        (
            "t+uy",
            Rps::from_coeffs(&["y"], &g, vec![(vec![0], hs(&[(t.clone(), 1)])), (vec![1], hs(&[(u.clone(), 1)]))], &b0)
                .unwrap(),
        ),
        (
            "t+ty",
            Rps::from_coeffs(&["y"], &g, vec![(vec![0], hs(&[(t.clone(), 1)])), (vec![1], hs(&[(t.clone(), 1)]))], &b0)
                .unwrap(),
        ),
    ];
    let ms = [t.pow(&int(3)), u.clone(), u.mul(&t), u.mul(&t.pow(&int(-2))), u.pow(&int(2))];
    let prov = ClosedUnder::new(&["f"], &["g0"]);
    let (mut case1, mut case2, mut mixed, mut n) = (0, 0, 0, 0);
    for (fname, f) in &fs {
        for (gname, gv) in &gs {
            for m in &ms {
                let b = Budget::new(2_000_000);
                let ctx = WitnessCtx::new(&g, &["y"], &b);
                assert_eq!(ctx.depth, 12);
                let fa = WAtom::new(AtomTag::A, "f", f.clone());
                let ga = WAtom::new(AtomTag::B, "g0", gv.clone());
                let r = tc_composition_witness(&ctx, &fa, &[ga], m, &prov)
                    .map_err(|e| format!("{fname}({gname})||{m}: {e}"))?;
                if !r.value_ok {
                    return Err(format!("{fname}({gname})||{m}: value differs at depth 12"));
                }
                if !r.refused.is_empty() {
                    return Err(format!("{fname}({gname})||{m}: refused {:?}", r.refused));
                }
                n += 1;
                match r.cases {
                    (a, 0) if a > 0 => case1 += 1,
                    (0, c) if c > 0 => case2 += 1,
                    (a, c) if a > 0 && c > 0 => mixed += 1,
                    _ => {}
                }
            }
        }
    }
    let detail = format!("{n} triples: {case1} case 1, {case2} case 2, {mixed} mixed");
    if n < 20 || case1 == 0 || case2 == 0 || mixed == 0 {
        return Err(detail);
    }
    Ok(detail)
}

// 6
fn closure_fixtures() -> Outcome {
    let cfg = ClosureConfig::default();
    if cfg.depth != 3 || cfg.probe_depth != 10 {
        return Err("default config is not depth 3 / probe 10".into());
    }
    let mut parts = Vec::new();
    for fx in standard_fixtures().map_err(|e| e.to_string())? {
        let set = fx.generate(cfg.clone()).map_err(|e| e.to_string())?;
        let rep = check_truncation_closed(&set, None).map_err(|e| e.to_string())?;
        if !rep.all_witnessed() {
            return Err(format!("{}: {} of {} witnessed", fx.name, rep.stats.witnessed, rep.stats.probes));
        }
        parts.push(format!("{} {}/{}", fx.name, rep.stats.witnessed, rep.stats.probes));
    }
    let fx = adversarial_fixture().map_err(|e| e.to_string())?;
    let set = fx.generate(cfg).map_err(|e| e.to_string())?;
    let rep = check_truncation_closed(&set, None).map_err(|e| e.to_string())?;
    if rep.stats.failed == 0 {
        return Err(format!("{}: no failures", fx.name));
    }
    parts.push(format!("{} failed {}", fx.name, rep.stats.failed));
    Ok(parts.join(", "))
}

fn exps_eq(f: &Gps, h: &Gps, depth: i64, b: &Budget) -> Result<bool> {
    Ok(f.expand(&int(depth), b)? == h.expand(&int(depth), b)?)
}

/// Nonzero through degree 12; cancelling sums like `2 geom - 2 geom` would
/// make every evaluation search forever for a first term.
fn visibly_nonzero(f: &Gps) -> bool {
    f.expand(&int(12), &Budget::new(100_000)).is_ok_and(|p| !p.is_empty())
}

/// A random nonzero series in `x` from geometric, binomial and polynomial
/// pieces. `classical` keeps every exponent natural.
fn rand_gps(x: &str, classical: bool, rng: &mut ChaCha8Rng) -> Gps {
    loop {
        let f = rand_gps_raw(x, classical, rng);
        if visibly_nonzero(&f) {
            return f;
        }
    }
}

fn rand_gps_raw(x: &str, classical: bool, rng: &mut ChaCha8Rng) -> Gps {
    let piece = |rng: &mut ChaCha8Rng| -> Gps {
        match rng.gen_range(0..4) {
            0 => Gps::geometric(x).unwrap(),
            1 => {
                let l = [ratio(1, 2), int(-1), ratio(1, 3), int(2), ratio(-3, 2)][rng.gen_range(0..5)].clone();
                Gps::binomial(l, x).unwrap()
            }
            2 => Gps::constant(rand_coeff(rng)),
            _ => {
                let e = if classical { int(rng.gen_range(1..=3)) } else { ratio(rng.gen_range(1..=5), 2) };
                Gps::monomial(&[x], single(x, e), rand_coeff(rng)).unwrap()
            }
        }
    };
    let mut f = Gps::constant(int(0));
    for _ in 0..rng.gen_range(1..=3) {
        let mut p = piece(rng);
        if rng.gen_bool(0.4) {
            p = p.mul(&piece(rng));
        }
        f = f.add(&p.scale(rand_coeff(rng)));
    }
    f
}

/// `c z^γ (1 + ...)` with `c > 0`, a finite p-composable series in `z` with
/// at least two terms. A lone monomial evaluated at a point makes exact
/// powers whose expansions cancel past some term, and a lazy sum cannot
/// certify such a gap.
fn rand_pcomposable(z: &str, rng: &mut ChaCha8Rng) -> Gps {
    let lead = ratio(rng.gen_range(1..=4), rng.gen_range(1..=2));
    let c = square(rng);
    let mut g = Gps::monomial(&[z], single(z, lead.clone()), c).unwrap();
    for _ in 0..rng.gen_range(1..=2) {
        let e = &lead + ratio(rng.gen_range(1..=4), 2);
        g = g.add(&Gps::monomial(&[z], single(z, e), rand_coeff(rng)).unwrap());
    }
    g
}

/// Positive squares, so half-integer powers stay rational.
fn square(rng: &mut ChaCha8Rng) -> Rational {
    [int(1), int(4), ratio(1, 4), ratio(9, 4)][rng.gen_range(0..4)].clone()
}

/// A positive infinitesimal in normal form: `t^e (c + o(1))` with `c` a
/// fourth power.
fn rand_point(g: &Arc<MonomialGroup>, rng: &mut ChaCha8Rng) -> HahnSeries {
    let e = ratio(rng.gen_range(1..=4), rng.gen_range(1..=2));
    let lead = Monomial::new(g, vec![int(0), e.clone()]).unwrap();
    let c = [int(1), int(16), ratio(1, 16)][rng.gen_range(0..3)].clone();
    let mut terms = vec![(lead, c)];
    for _ in 0..rng.gen_range(0..=2) {
        let f = &e + ratio(rng.gen_range(1..=3), 2);
        terms.push((Monomial::new(g, vec![int(0), f]).unwrap(), rand_coeff(rng)));
    }
    if rng.gen_bool(0.3) {
        terms.push((Monomial::new(g, vec![int(1), int(rng.gen_range(-2..=2))]).unwrap(), rand_coeff(rng)));
    }
    HahnSeries::from_terms(g, terms).unwrap()
}

fn assign(pairs: &[(&str, &HahnSeries)]) -> BTreeMap<String, HahnSeries> {
    pairs.iter().map(|(k, v)| (k.to_string(), (*v).clone())).collect()
}

// 7
fn coherence() -> Outcome {
    let g = grp(&["u", "t"]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    const N: usize = 100;
    const DEPTH: usize = 10;
    let fresh = || Budget::new(300_000);
    let interp = |f: &Gps, a: &BTreeMap<String, HahnSeries>, b: &Budget| hahnforge::gps::interpret(f, &g, a, b);
    let agree = |x: &HahnSeries, y: &HahnSeries, b: &Budget| agree_to_depth(x, y, DEPTH, b);
    let tag = |what: &'static str, i: usize| move |e: hahnforge::Error| format!("{what} {i}: {e}");
    for i in 0..N {
        let b = fresh();
        let f = rand_gps("y", true, &mut rng);
        let h = rand_pcomposable("z", &mut rng);
        let l0 = f.compose_pcomp("y", &h, &b).map_err(tag("l0", i))?;
        let l1 = f.compose_classical("y", &h, &b).map_err(tag("l1", i))?;
        if !exps_eq(&l0, &l1, DEPTH as i64, &b).map_err(tag("l0 = l1", i))? {
            return Err(format!("l0 != l1 on instance {i}"));
        }
    }
    for i in 0..N {
        let b = fresh();
        let f = rand_gps("x", false, &mut rng);
        let k = square(&mut rng);
        let a = rand_point(&g, &mut rng);
        let c = rand_point(&g, &mut rng);
        let e = tag("blow-up", i);
        let bl = f.blowup_affine("x", "z0", "z1", k.clone()).map_err(&e)?;
        let lhs = interp(&bl, &assign(&[("z0", &a), ("z1", &c)]), &b).map_err(&e)?;
        let x = hahn::mul(&a, &hahn::add(&c, &HahnSeries::constant(&g, k)).map_err(&e)?).map_err(&e)?;
        let rhs = interp(&f, &assign(&[("x", &x)]), &b).map_err(&e)?;
        if !agree(&lhs, &rhs, &b).map_err(&e)? {
            return Err(format!("blow-up evaluation differs on instance {i}"));
        }
    }
    for i in 0..N {
        let b = fresh();
        let f = rand_gps("x", false, &mut rng);
        let mut h = rand_gps("x", false, &mut rng);
        while !visibly_nonzero(&f.add(&h)) {
            h = rand_gps("x", false, &mut rng);
        }
        let a = rand_point(&g, &mut rng);
        let at = assign(&[("x", &a)]);
        let e = tag("interpret", i);
        let (vf, vh) = (interp(&f, &at, &b).map_err(&e)?, interp(&h, &at, &b).map_err(&e)?);
        let prod = interp(&f.mul(&h), &at, &b).map_err(&e)?;
        let sum = interp(&f.add(&h), &at, &b).map_err(&e)?;
        if !agree(&prod, &hahn::mul(&vf, &vh).map_err(&e)?, &b).map_err(&e)? {
            return Err(format!("interpretation of a product differs on instance {i}"));
        }
        if !agree(&sum, &hahn::add(&vf, &vh).map_err(&e)?, &b).map_err(&e)? {
            return Err(format!("interpretation of a sum differs on instance {i}"));
        }
    }
    for i in 0..N {
        let b = fresh();
        let f = rand_gps("x", false, &mut rng);
        let h = rand_pcomposable("z", &mut rng);
        let a = rand_point(&g, &mut rng);
        let e = tag("compose", i);
        let comp = f.compose_pcomp("x", &h, &b).map_err(&e)?;
        let lhs = interp(&comp, &assign(&[("z", &a)]), &b).map_err(&e)?;
        let hv = interp(&h, &assign(&[("z", &a)]), &b).map_err(&e)?;
        let rhs = interp(&f, &assign(&[("x", &hv)]), &b).map_err(&e)?;
        if !agree(&lhs, &rhs, &b).map_err(&e)? {
            return Err(format!("composition then evaluation differs on instance {i}"));
        }
    }
    Ok(format!("{N} instances per property, depth {DEPTH}"))
}

// 8
fn fibonacci() -> Outcome {
    let b = Budget::default();
    let zz = Gps::var("z").unwrap().mul(&Gps::binomial(int(1), "z").unwrap());
    let p = Gps::geometric("x").unwrap().compose_pcomp("x", &zz, &b).map_err(|e| e.to_string())?;
    let (mut a, mut c) = (int(1), int(1));
    for n in 0..=20 {
        let got = p.coeff(&single("z", int(n)), &b).map_err(|e| e.to_string())?;
        if got != a {
            return Err(format!("coefficient {n} is {got}, expected {a}"));
        }
        let next = &a + &c;
        a = std::mem::replace(&mut c, next);
    }
    Ok("coefficients 0..=20".into())
}

/// Every box of blocks lies inside or outside `inside`, and each
/// segmentation splits its chain into consecutive runs.
fn boxes_uniform<T: Ord + Clone>(
    chains: &[Vec<T>],
    segs: &[Segmentation<T>],
    inside: impl Fn(&[T]) -> bool,
) -> bool {
    let parts: Vec<Vec<Vec<T>>> = chains.iter().zip(segs).map(|(c, s)| s.partition(c)).collect();
    for (c, p) in chains.iter().zip(&parts) {
        let mut sorted = c.clone();
        sorted.sort();
        sorted.dedup();
        if p.concat() != sorted {
            return false;
        }
    }
    let mut idx = vec![0usize; parts.len()];
    loop {
        let blocks: Vec<&Vec<T>> = idx.iter().zip(&parts).map(|(i, p)| &p[*i]).collect();
        let mut verdict = None;
        let mut tuple = vec![0usize; blocks.len()];
        loop {
            let pt: Vec<T> = tuple.iter().zip(&blocks).map(|(j, bl)| bl[*j].clone()).collect();
            let v = inside(&pt);
            if *verdict.get_or_insert(v) != v {
                return false;
            }
            if !bump(&mut tuple, |k| blocks[k].len()) {
                break;
            }
        }
        if !bump(&mut idx, |k| parts[k].len()) {
            return true;
        }
    }
}

fn bump(v: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for k in 0..v.len() {
        v[k] += 1;
        if v[k] < len(k) {
            return true;
        }
        v[k] = 0;
    }
    false
}

fn all_antichains(points: &[Vec<i64>]) -> Vec<Vec<Vec<i64>>> {
    fn le(a: &[i64], b: &[i64]) -> bool {
        a.iter().zip(b).all(|(x, y)| x <= y)
    }
    fn go(points: &[Vec<i64>], i: usize, cur: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
        if i == points.len() {
            out.push(cur.clone());
            return;
        }
        go(points, i + 1, cur, out);
        let p = &points[i];
        if cur.iter().all(|q| !le(q, p) && !le(p, q)) {
            cur.push(p.clone());
            go(points, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(points, 0, &mut Vec::new(), &mut out);
    out
}

fn grid(sizes: &[i64]) -> Vec<Vec<i64>> {
    sizes.iter().fold(vec![vec![]], |acc, &n| {
        acc.into_iter()
            .flat_map(|p| {
                (0..n).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect()
    })
}

// 9
fn segmentations() -> Outcome {
    let mut shapes: Vec<Vec<i64>> = Vec::new();
    for a in 1..=6 {
        shapes.push(vec![a]);
        for c in 1..=6 {
            shapes.push(vec![a, c]);
        }
    }
    for a in 1..=3 {
        for c in 1..=3 {
            for d in 1..=3 {
                shapes.push(vec![a, c, d]);
            }
        }
    }
    let mut basic = 0;
    for shape in &shapes {
        let chains: Vec<Vec<i64>> = shape.iter().map(|n| (0..*n).collect()).collect();
        for gens in all_antichains(&grid(shape)) {
            let segs = basic_segmentation(&chains, &gens).map_err(|e| e.to_string())?;
            let up = |p: &[i64]| gens.iter().any(|g| g.iter().zip(p).all(|(a, b)| a <= b));
            if !boxes_uniform(&chains, &segs, up) {
                return Err(format!("basic segmentation fails for {shape:?} with generators {gens:?}"));
            }
            basic += 1;
        }
    }
    let universe = [ratio(1, 2), int(1), ratio(3, 2), int(2), int(3)];
    let subsets: Vec<Vec<Rational>> = (1u32..32)
        .filter(|s| s.count_ones() <= 4)
        .map(|s| (0..5).filter(|i| s >> i & 1 == 1).map(|i| universe[i].clone()).collect())
        .collect();
    let cuts = [int(1), ratio(3, 2), int(2), ratio(5, 2), int(4), int(6)];
    let mut targets = vec![Segment::<Rational>::full()];
    let bounds = |c: &Rational| [Bound::Included(c.clone()), Bound::Excluded(c.clone())];
    for c in &cuts {
        for lo in bounds(c) {
            targets.push(Segment::new(lo.clone(), Bound::Unbounded).unwrap());
            for d in cuts.iter().filter(|d| *d >= c) {
                for hi in bounds(d) {
                    if let Ok(s) = Segment::new(lo.clone(), hi) {
                        targets.push(s);
                    }
                }
            }
        }
    }
    let mut sums = 0;
    let mut families: Vec<Vec<Vec<Rational>>> = subsets.iter().map(|s| vec![s.clone()]).collect();
    for a in &subsets {
        for c in &subsets {
            families.push(vec![a.clone(), c.clone()]);
        }
    }
    for sets in &families {
        for target in &targets {
            let segs = segmentation_for_sum(sets, target).map_err(|e| e.to_string())?;
            let inside = |p: &[Rational]| target.contains(&p.iter().fold(Rational::zero(), |x, y| x + y));
            if !boxes_uniform(sets, &segs, inside) {
                return Err(format!("sum segmentation fails for {sets:?}"));
            }
            sums += 1;
        }
    }
    Ok(format!("{basic} antichain instances, {sums} sum instances"))
}

// 10
fn cli_and_goldens() -> Outcome {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let cfg = RunConfig::default();
    for json in [false, true] {
        for r in check_corpus(&dir, &cfg, json, false).map_err(|e| e.to_string())? {
            if !r.ok {
                return Err(format!("{} ({}): {}", r.name, if json { "json" } else { "text" }, r.message));
            }
        }
    }
    let exe = env!("CARGO_BIN_EXE_hahnforge");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "hf"))
        .collect();
    files.sort();
    for f in &files {
        let src = std::fs::read_to_string(f).unwrap();
        let once = dsl::canonical(&src).map_err(|e| e.to_string())?;
        if dsl::canonical(&once).map_err(|e| e.to_string())? != once {
            return Err(format!("{}: printing is not a fixpoint", f.display()));
        }
        for (flag, ext) in [(None, "out"), (Some("--json"), "json")] {
            let run = || {
                let mut c = Command::new(exe);
                c.env_remove("HAHNFORGE_BUDGET");
                c.args(flag).arg("run").arg(f);
                c.output().unwrap().stdout
            };
            let (a, c) = (run(), run());
            if a != c {
                return Err(format!("{}: two runs differ", f.display()));
            }
            if a != std::fs::read(f.with_extension(ext)).unwrap() {
                return Err(format!("{}: binary output differs from .{ext} golden", f.display()));
            }
        }
    }
    Ok(format!("{} programs, text and json", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 10] = [
        ("1 ring laws", ring_laws, Some(10)),
        ("2 product truncation", product_truncation, Some(10)),
        ("3 v-truncation homomorphism", v_truncation, Some(10)),
        ("4 tc_product", tc_product, Some(30)),
        ("5 tc_composition witness", tc_composition, Some(60)),
        ("6 closure fixtures", closure_fixtures, Some(300)),
        ("7 coherence", coherence, Some(60)),
        ("8 fibonacci", fibonacci, None),
        ("9 segmentations", segmentations, None),
        ("10 cli determinism and goldens", cli_and_goldens, None),
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run, limit) in criteria {
        if !only.is_empty() && !only.iter().any(|o| name.contains(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let res = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let res = match (res, limit) {
            (Ok(_), Some(l)) if took > Duration::from_secs(l) => Err(format!("took {took:.1?}, limit {l}s")),
            (r, _) => r,
        };
        match res {
            Ok(d) => println!("PASS criterion {name}: {d} [{took:.2?}]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name}: {d} [{took:.2?}]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
