//! Grids, sampled fields, Wirtinger stencils and quadrature.

mod csv;
mod grid;
mod interp;
pub mod ops;
mod quad_diff;
mod values;

use thiserror::Error;

pub use csv::{read_field_csv, write_complex_csv, write_scalar_csv, FieldData};
pub use grid::{BoundaryKind, Grid2D};
pub use interp::interpolate;
pub use ops::{d_z, d_zbar, integrate, laplace_zzbar, partial, Axis};
pub use quad_diff::{eval_quad_diff, QuadraticDifferential};
pub use values::{ComplexField, Field, FieldValue, ScalarField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("grid needs at least 4 points per axis, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },
    #[error("grid spacing must be positive and finite (hx={hx}, hy={hy})")]
    BadSpacing { hx: f64, hy: f64 },
    #[error("field has {got} values, grid expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dirichlet field has no boundary values")]
    MissingBoundary,
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("only a constant quadratic differential is admissible on a periodic grid")]
    Representation,
    #[error("point ({x}, {y}) lies outside the chart")]
    OutsideChart { x: f64, y: f64 },
    #[error("csv: {0}")]
    Csv(String),
}

impl From<std::io::Error> for FieldError {
    fn from(e: std::io::Error) -> Self {
        FieldError::Csv(e.to_string())
    }
}
