//! Finite well-partial-order combinatorics: minimal generators of upper sets,
//! segmentations refining upper sets, and fibers of the sum map.

use std::cmp::Reverse;
use std::ops::Bound;

use num_traits::{Signed, Zero};

use super::monomial::Monomial;
use super::segment::{Segment, Segmentation};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn dominates<T: Ord>(a: &[T], b: &[T]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// Minimal elements of a finite set of points under the product order.
pub fn minimal_in_product<T: Ord + Clone>(points: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let mut out: Vec<Vec<T>> = pts
        .iter()
        .filter(|p| !pts.iter().any(|q| q != *p && dominates(p, q)))
        .cloned()
        .collect();
    out.sort();
    out
}

/// Minimal generators of the upper set spanned by `points` in `Q^n` (Dickson).
pub fn minimal_elements(points: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    minimal_in_product(points)
}

pub fn is_antichain<T: Ord>(points: &[Vec<T>]) -> bool {
    points.iter().enumerate().all(|(i, p)| {
        points
            .iter()
            .enumerate()
            .all(|(j, q)| i == j || !dominates(p, q))
    })
}

/// Segmentations of finite chains such that every box of blocks lies inside or
/// outside the upper set generated by the antichain `generators`.
///
/// Blocks start at the minimum of each chain and at every projection of a generator.
pub fn basic_segmentation<T: Ord + Clone>(
    chains: &[Vec<T>],
    generators: &[Vec<T>],
) -> Result<Vec<Segmentation<T>>> {
    if generators.iter().any(|g| g.len() != chains.len()) {
        return Err(Error::Invalid("generator arity differs from chain count".into()));
    }
    if !is_antichain(generators) {
        return Err(Error::NotAntichain);
    }
    Ok(chains
        .iter()
        .enumerate()
        .map(|(j, chain)| {
            let mut cuts: Vec<T> = chain.iter().min().into_iter().cloned().collect();
            cuts.extend(generators.iter().map(|g| g[j].clone()));
            cuts.sort();
            cuts.dedup();
            Segmentation::from_cuts(&cuts)
        })
        .collect())
}

fn tuples<T: Clone>(sets: &[Vec<T>]) -> Vec<Vec<T>> {
    sets.iter().fold(vec![vec![]], |acc, s| {
        acc.iter()
            .flat_map(|prefix| {
                s.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect()
    })
}

/// Segmentations of the finite positive sets `sets` whose product refines the
/// partition generated by the tuples whose sum lands in `target`.
pub fn segmentation_for_sum(
    sets: &[Vec<Rational>],
    target: &Segment<Rational>,
) -> Result<Vec<Segmentation<Rational>>> {
    if sets.iter().flatten().any(|x| !x.is_positive()) {
        return Err(Error::Invalid("sum segmentation needs positive elements".into()));
    }
    let all = tuples(sets);
    let sum = |t: &Vec<Rational>| t.iter().fold(Rational::zero(), |a, b| a + b);
    // both {sum clears the lower bound} and {sum exceeds the upper bound} are upper sets
    let reach_lower: Vec<Vec<Rational>> = all
        .iter()
        .filter(|t| !target.below_lower(&sum(t)))
        .cloned()
        .collect();
    let past_upper: Vec<Vec<Rational>> = all
        .iter()
        .filter(|t| !target.below_upper(&sum(t)))
        .cloned()
        .collect();
    let mut gens = minimal_in_product(&reach_lower);
    gens.extend(minimal_in_product(&past_upper));
    let chains: Vec<Vec<Rational>> = sets.to_vec();
    Ok(chains
        .iter()
        .enumerate()
        .map(|(j, chain)| {
            let mut cuts: Vec<Rational> = chain.iter().min().into_iter().cloned().collect();
            cuts.extend(gens.iter().map(|g| g[j].clone()));
            cuts.sort();
            cuts.dedup();
            Segmentation::from_cuts(&cuts)
        })
        .collect())
}

/// One piece `U_i × T_i` of a product decomposition: `u` is a final segment of
/// the first support, `t` a segment of the second, both listed in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBlock {
    pub u: Vec<Monomial>,
    pub t: Vec<Monomial>,
}

/// Decomposes `{(a, b) ∈ s0 × s1 : a·b ∈ upper}` into disjoint boxes `U_i × T_i`.
///
/// `upper` must be a final segment of the monomial group.
pub fn product_segmentation(
    s0: &[Monomial],
    s1: &[Monomial],
    upper: &Segment<Monomial>,
) -> Result<Vec<ProductBlock>> {
    if upper.upper != Bound::Unbounded {
        return Err(Error::Invalid("product segmentation needs a final segment".into()));
    }
    if s0.is_empty() || s1.is_empty() {
        return Ok(vec![]);
    }
    let c0: Vec<Reverse<Monomial>> = s0.iter().cloned().map(Reverse).collect();
    let c1: Vec<Reverse<Monomial>> = s1.iter().cloned().map(Reverse).collect();
    let inside = |a: &Monomial, b: &Monomial| upper.contains(&a.mul(b));
    // the complement of `upper` pulled back to the reversed chains is an upper set there
    let outside: Vec<Vec<Reverse<Monomial>>> = tuples(&[c0.clone(), c1.clone()])
        .into_iter()
        .filter(|p| !inside(&p[0].0, &p[1].0))
        .collect();
    let gens = minimal_in_product(&outside);
    let segs = basic_segmentation(&[c0.clone(), c1.clone()], &gens)?;
    let blocks0 = segs[0].partition(&c0);
    let blocks1 = segs[1].partition(&c1);
    let mut out = Vec::new();
    for tb in &blocks1 {
        let mut u: Vec<Monomial> = Vec::new();
        for rb in &blocks0 {
            if rb.iter().all(|a| tb.iter().all(|b| inside(&a.0, &b.0))) {
                u.extend(rb.iter().map(|r| r.0.clone()));
            }
        }
        if !u.is_empty() {
            out.push(ProductBlock {
                u,
                t: tb.iter().map(|r| r.0.clone()).collect(),
            });
        }
    }
    Ok(out)
}

/// All ordered tuples over the positive set `s` summing to exactly `gamma`.
pub fn neumann_fibers(s: &[Rational], gamma: &Rational) -> Result<Vec<Vec<Rational>>> {
    if s.iter().any(|x| !x.is_positive()) {
        return Err(Error::Invalid("fibers need positive elements".into()));
    }
    let mut set = s.to_vec();
    set.sort();
    set.dedup();
    let mut out = Vec::new();
    if gamma.is_negative() {
        return Ok(out);
    }
    fn go(
        set: &[Rational],
        rest: &Rational,
        prefix: &mut Vec<Rational>,
        out: &mut Vec<Vec<Rational>>,
    ) {
        if rest.is_zero() {
            out.push(prefix.clone());
            return;
        }
        for x in set {
            if x > rest {
                break;
            }
            prefix.push(x.clone());
            go(set, &(rest - x), prefix, out);
            prefix.pop();
        }
    }
    go(&set, gamma, &mut Vec::new(), &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MonomialGroup;
    use crate::rational::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn minimal_examples() {
        assert!(minimal_elements(&[]).is_empty());
        assert_eq!(
            minimal_elements(&[v(&[1, 2]), v(&[2, 1]), v(&[2, 2])]),
            vec![v(&[1, 2]), v(&[2, 1])]
        );
        assert_eq!(minimal_elements(&[v(&[0, 0]), v(&[5, 5])]), vec![v(&[0, 0])]);
    }

    #[test]
    fn basic_segmentation_examples() {
        let chain = vec![0, 1, 2];
        let chains = vec![chain.clone(), chain.clone()];
        let s = basic_segmentation(&chains, &[vec![1, 1]]).unwrap();
        assert_eq!(s[0].partition(&chain), vec![vec![0], vec![1, 2]]);
        assert_eq!(s[1].partition(&chain), vec![vec![0], vec![1, 2]]);
        let s = basic_segmentation(&chains, &[]).unwrap();
        assert_eq!(s[0].partition(&chain), vec![vec![0, 1, 2]]);
        let s = basic_segmentation(&chains, &[vec![0, 2], vec![2, 0]]).unwrap();
        assert_eq!(s[0].partition(&chain), vec![vec![0, 1], vec![2]]);
        assert_eq!(s[1].partition(&chain), vec![vec![0, 1], vec![2]]);
        assert_eq!(
            basic_segmentation(&chains, &[vec![0, 0], vec![1, 1]]),
            Err(Error::NotAntichain)
        );
    }

    #[test]
    fn product_segmentation_examples() {
        let g = MonomialGroup::new(&["t"]).unwrap();
        let t = |e: i64| Monomial::new(&g, vec![int(e)]).unwrap();
        let upper = Segment::above(t(2));
        let blocks = product_segmentation(&[t(0)], &[t(0), t(1), t(3)], &upper).unwrap();
        assert_eq!(
            blocks,
            vec![ProductBlock {
                u: vec![t(0)],
                t: vec![t(0), t(1)]
            }]
        );
        let blocks = product_segmentation(&[t(0), t(2)], &[t(0), t(2)], &upper).unwrap();
        assert_eq!(
            blocks,
            vec![ProductBlock {
                u: vec![t(0)],
                t: vec![t(0)]
            }]
        );
        assert!(product_segmentation(&[], &[t(0)], &upper).unwrap().is_empty());
    }

    #[test]
    fn fibers_examples() {
        let f = neumann_fibers(&v(&[1, 2]), &int(4)).unwrap();
        assert_eq!(
            f,
            vec![v(&[1, 1, 1, 1]), v(&[1, 1, 2]), v(&[1, 2, 1]), v(&[2, 1, 1]), v(&[2, 2])]
        );
        assert_eq!(neumann_fibers(&v(&[1]), &int(0)).unwrap(), vec![Vec::<Rational>::new()]);
        assert!(neumann_fibers(&v(&[2]), &int(3)).unwrap().is_empty());
        assert!(neumann_fibers(&v(&[2]), &int(-1)).unwrap().is_empty());
    }
}
