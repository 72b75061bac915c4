use std::ops::Bound;

use crate::error::{Error, Result};

/// An order-convex subset of a totally ordered set, given by its endpoints.
/// `Bound::Unbounded` on the lower side is −∞, on the upper side +∞.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment<T> {
    pub lower: Bound<T>,
    pub upper: Bound<T>,
}

impl<T: Ord + Clone> Segment<T> {
    pub fn new(lower: Bound<T>, upper: Bound<T>) -> Result<Self> {
        let s = Segment { lower, upper };
        if s.is_empty_interval() {
            Err(Error::Invalid("empty segment".into()))
        } else {
            Ok(s)
        }
    }

    pub fn full() -> Self {
        Segment {
            lower: Bound::Unbounded,
            upper: Bound::Unbounded,
        }
    }

    pub fn closed(lo: T, hi: T) -> Result<Self> {
        Self::new(Bound::Included(lo), Bound::Included(hi))
    }

    /// `[lo, +∞)`
    pub fn from(lo: T) -> Self {
        Segment {
            lower: Bound::Included(lo),
            upper: Bound::Unbounded,
        }
    }

    /// `(lo, +∞)`
    pub fn above(lo: T) -> Self {
        Segment {
            lower: Bound::Excluded(lo),
            upper: Bound::Unbounded,
        }
    }

    fn is_empty_interval(&self) -> bool {
        match (&self.lower, &self.upper) {
            (Bound::Included(a), Bound::Included(b)) => a > b,
            (Bound::Included(a), Bound::Excluded(b))
            | (Bound::Excluded(a), Bound::Included(b))
            | (Bound::Excluded(a), Bound::Excluded(b)) => a >= b,
            _ => false,
        }
    }

    pub fn contains(&self, x: &T) -> bool {
        let lo = match &self.lower {
            Bound::Included(a) => x >= a,
            Bound::Excluded(a) => x > a,
            Bound::Unbounded => true,
        };
        lo && self.below_upper(x)
    }

    pub fn below_upper(&self, x: &T) -> bool {
        match &self.upper {
            Bound::Included(b) => x <= b,
            Bound::Excluded(b) => x < b,
            Bound::Unbounded => true,
        }
    }

    /// Every element `< x` lies below the segment.
    pub fn below_lower(&self, x: &T) -> bool {
        match &self.lower {
            Bound::Included(a) => x < a,
            Bound::Excluded(a) => x <= a,
            Bound::Unbounded => false,
        }
    }
}

/// A finite partition of a chain into increasing segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmentation<T> {
    pub blocks: Vec<Segment<T>>,
}

impl<T: Ord + Clone> Segmentation<T> {
    /// Blocks `[c_0, c_1), [c_1, c_2), ..., [c_k, +∞)` from sorted distinct cut points.
    pub fn from_cuts(cuts: &[T]) -> Self {
        let blocks = cuts
            .iter()
            .enumerate()
            .map(|(i, c)| Segment {
                lower: Bound::Included(c.clone()),
                upper: cuts
                    .get(i + 1)
                    .map_or(Bound::Unbounded, |n| Bound::Excluded(n.clone())),
            })
            .collect();
        Segmentation { blocks }
    }

    /// The blocks restricted to a finite chain, dropping empty ones.
    pub fn partition(&self, chain: &[T]) -> Vec<Vec<T>> {
        let mut sorted = chain.to_vec();
        sorted.sort();
        sorted.dedup();
        self.blocks
            .iter()
            .map(|b| sorted.iter().filter(|x| b.contains(x)).cloned().collect::<Vec<_>>())
            .filter(|b| !b.is_empty())
            .collect()
    }

    pub fn block_of(&self, x: &T) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_membership() {
        let s = Segment::closed(1, 3).unwrap();
        assert!(s.contains(&1) && s.contains(&3) && !s.contains(&4));
        assert!(Segment::new(Bound::Excluded(2), Bound::Excluded(2)).is_err());
        assert!(Segment::closed(2, 2).is_ok());
        assert!(Segment::<i32>::full().contains(&-100));
    }

    #[test]
    fn cuts_partition() {
        let s = Segmentation::from_cuts(&[0, 1]);
        assert_eq!(s.partition(&[0, 1, 2]), vec![vec![0], vec![1, 2]]);
    }
}
