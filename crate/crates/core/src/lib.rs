//! Numerical laboratory for the cosh-Gordon and sinh-Gordon equations, their
//! flat spectral-parameter families of connections, and the constant-curvature
//! three-dimensional metrics built from them.
//!
//! Conventions used throughout:
//! * `d/dz = (d/dx - i d/dy)/2`, hence `d/dz d/dzbar = (d_xx + d_yy)/4`;
//! * the cosh/sinh/Liouville residual is `r = 1/2 d dbar phi - e^phi - s |t|^2 e^-phi`;
//! * parallel transport solves `dg = g A`, so loop products multiply new
//!   segment factors on the right.

pub mod connection;
pub mod field;
pub mod linalg;
pub mod metric;
pub mod ode;
pub mod pde;
pub mod toda;

pub use num_complex::Complex64;
