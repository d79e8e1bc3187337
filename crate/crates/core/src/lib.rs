// Negated comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod functionals;
pub mod geometry;
pub mod quadrature;
pub mod rearrange;
pub mod regime;
pub mod sphere;
pub mod variation;

pub use error::{Error, Result};
