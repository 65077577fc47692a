//! Exact structure classification for bivariate polynomials over the
//! rationals, together with desk-scale measurements of expansion,
//! regularity, character sums and point counts over prime fields.

pub mod charsum;
pub mod classify;
pub mod count;
pub mod expansion;
pub mod field;
pub mod par;
pub mod poly;
pub mod regularity;

pub use classify::{classify, StructureReport, Verdict};
pub use field::{FieldElem, PrimeField};
pub use poly::{RatFunc, RatPoly, UniPoly};
