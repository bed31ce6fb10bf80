//! Gauss factorization in `SL(2, C)`, path-ordered exponentials of
//! holomorphic connections, the Liouville generator built from them, and
//! residuals of Toda systems for arbitrary Cartan matrices.

mod cartan;
mod gauss;
mod liouville;

use thiserror::Error;

use crate::connection::ConnectionError;
use crate::field::FieldError;

pub use cartan::{toda_residual, CartanMatrix};
pub use gauss::{gauss_decompose, pexp, pexp_with, GaussFactors};
pub use liouville::{liouville_from_holomorphic, HoloConnectionData, TodaReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TodaError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error("gauss decomposition fails: pivot U22 = {pivot} vanishes")]
    DecompositionFails { pivot: f64 },
    #[error("gauss decomposition fails inside the grid at {points} point(s), first at ({x}, {y})")]
    Region { points: usize, x: f64, y: f64 },
    #[error("step size underflow at path parameter {at}")]
    StepUnderflow { at: f64 },
    #[error("{0}")]
    InvalidInput(String),
}
