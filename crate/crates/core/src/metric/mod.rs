//! Three-dimensional metrics over a chart `(x, y)` times a normal coordinate
//! `l`, built either directly from `(phi, t)` or from a flat connection, and
//! finite-difference certificates for their geometry.

mod curvature;
mod sampler;
mod surface;

use thiserror::Error;

use crate::connection::ConnectionError;
use crate::field::FieldError;

pub use curvature::{
    calibrate_scale, curvature_identity_defect, curvature_identity_defect_with, geodesic_defect,
    CurvatureProbe, DerivativeScheme,
};
pub use sampler::{
    metric_direct, metric_from_connection, Conformal, ConnectionMetric, DirectMetric, FermiMetric,
    FnMetric, MetricConvention, MetricSampler, Orientation, PotentialSource, Provenance, Signature,
    WarpedFlatMetric,
};
pub use surface::{
    boundary_one_form, fundamental_forms, fundamental_forms_on, gauss_curvature_2d,
    second_form_matrix, surface_metric, symplectic_form, FormField, FundamentalForms,
};

pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Sym2 = nalgebra::Matrix2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Connection(#[from] ConnectionError),
    #[error("metric is degenerate at {at:?} (det = {det:e})")]
    Degenerate { at: Vec<f64>, det: f64 },
    #[error("connection metric is indefinite under both signs at {at:?}")]
    ConstructionMismatch { at: Vec<f64> },
    #[error("{0}")]
    InvalidInput(String),
}
