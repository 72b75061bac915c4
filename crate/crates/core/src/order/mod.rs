//! Ordered monomial groups, archimedean classes and segmentation combinatorics.

mod combinat;
mod monomial;
mod segment;

pub use combinat::{
    basic_segmentation, is_antichain, minimal_elements, minimal_in_product, neumann_fibers,
    product_segmentation, segmentation_for_sum, ProductBlock,
};
pub use monomial::{arch_class, cmp_monomial, ArchClass, Monomial, MonomialGroup};
pub(crate) use monomial::fmt_power;
pub use segment::{Segment, Segmentation};
