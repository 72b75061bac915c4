//! Product segmentations: the pairs of a product support above a cut,
//! grouped into boxes.

use hahnforge::order::{product_segmentation, segmentation_for_sum, Monomial, MonomialGroup, Segment};
use std::ops::Bound;

use hahnforge::rational::{self, int, ratio, Rational};

fn main() -> hahnforge::Result<()> {
    let g = MonomialGroup::new(&["t"])?;
    let t = |e: i64| Monomial::new(&g, vec![int(e)]);
    let r = vec![t(-1)?, t(0)?, t(2)?];
    let s = vec![t(0)?, t(1)?, t(3)?];
    let cut = t(2)?;

    println!("supports {r:?} x {s:?}, pairs with product > {cut}:");
    for block in product_segmentation(&r, &s, &Segment::above(cut))? {
        println!("  {:?} x {:?}", block.u, block.t);
    }

    let sets = vec![vec![ratio(1, 2), int(1), int(2)], vec![int(1), ratio(3, 2)]];
    let target = Segment::closed(int(2), int(3))?;
    println!("sums landing in [2, 3]:");
    for seg in segmentation_for_sum(&sets, &target)? {
        let blocks: Vec<String> = seg.blocks.iter().map(show).collect();
        println!("  {}", blocks.join(" "));
    }
    Ok(())
}

fn show(s: &Segment<Rational>) -> String {
    let lo = match &s.lower {
        Bound::Included(x) => format!("[{}", rational::fmt(x)),
        Bound::Excluded(x) => format!("]{}", rational::fmt(x)),
        Bound::Unbounded => "]-inf".into(),
    };
    let hi = match &s.upper {
        Bound::Included(x) => format!("{}]", rational::fmt(x)),
        Bound::Excluded(x) => format!("{}[", rational::fmt(x)),
        Bound::Unbounded => "+inf[".into(),
    };
    format!("{lo}, {hi}")
}
