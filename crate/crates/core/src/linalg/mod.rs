//! Small dense and iterative linear algebra helpers.

pub mod cg;
pub mod mat2;

pub use cg::{conjugate_gradient, CgError, CgOutcome};
pub use mat2::Mat2;
