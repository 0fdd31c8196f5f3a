#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN.

pub mod eigen;
pub mod error;
pub mod field;
pub mod geometry;
pub mod massfunc;
pub mod par;
pub mod quad;
pub mod quasimode;
pub mod scaling;
pub mod separable;
pub mod sparse;
pub mod straighten;

pub use error::{Error, Result};
