//! Elliptic solver for `1/2 d dbar phi = e^phi + s |t|^2 e^-phi` on periodic
//! and Dirichlet grids, plus the a-priori checks that go with it.

mod checks;
mod equation;
mod newton;
mod strip;

use thiserror::Error;

use crate::field::FieldError;

pub use checks::{
    gauss_bonnet_bound, gauss_bonnet_verdict, inequality_check, isolation_check, obstruction_check, Feasibility,
    GaussBonnet, InequalityVerdict, IsolationReport,
};
pub use equation::{
    default_initial_guess, linearized_operator, residual, EquationVariant, LinearizedOperator,
};
pub use newton::{newton_solve, NewtonOptions, SolveReport, SolveStatus, SolveSummary};
pub use strip::{strip_ode_oracle, StripProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("phi is not finite at grid index {index}")]
    Domain { index: usize },
    #[error("no solution can exist: {0}")]
    Obstruction(String),
    #[error("newton did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("linearized operator is singular or indefinite: {0}")]
    SingularJacobian(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shooting failed: {0}")]
    Shooting(String),
}
