//! Spectral-parameter families of flat `sl(2)` connections built from a
//! solution `(phi, t)`, their structural checks, and parallel transport.

pub(crate) mod checks;
mod family;
mod normal_form;
mod sampler;
mod transport;

use thiserror::Error;

use crate::field::FieldError;

pub use checks::{
    curvature, curvature_sup, degeneracy_check, lambda_flatness_sweep, reality_check,
    su11_check, DegeneracyReport, FlatnessSample, FlatnessSweep,
};
pub use family::{
    build_family, local_coefficients, local_coefficients_real, FamilyTag, LambdaConnectionFamily,
    LaurentPoint,
};
pub use normal_form::{extract_normal_form, GenericGaugeData, NormalForm};
pub use sampler::{AnalyticSampler, ConnectionSampler, DiagonalGauge, GridSampler};
pub use transport::{
    developing_map, monodromy, monodromy_with, MonodromyOptions, MonodromyReport,
    MonodromyResult,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("spectral parameter must be nonzero")]
    LambdaZero,
    #[error("transport refinement did not reach {tol:e} (last change {change:e} with {steps} steps)")]
    NoConvergence { tol: f64, change: f64, steps: usize },
    #[error("step size underflow at path parameter {at}")]
    StepUnderflow { at: f64 },
    #[error("gauge precondition violated: {0}")]
    GaugePrecondition(String),
    #[error("{0}")]
    InvalidInput(String),
}
