use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexField, FieldError, Grid2D};

/// Holomorphic quadratic differential `t dz^2`, stored by its coefficient in
/// the grid chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadraticDifferential {
    Constant(Complex64),
    /// Coefficients in ascending powers of `z`.
    Polynomial(Vec<Complex64>),
}

impl QuadraticDifferential {
    pub fn zero() -> Self {
        Self::Constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::Constant(c)
    }

    pub fn real(c: f64) -> Self {
        Self::Constant(Complex64::new(c, 0.0))
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::Polynomial(coeffs)
    }

    /// Degree after trimming zero leading coefficients (0 for constants).
    pub fn degree(&self) -> usize {
        match self {
            Self::Constant(_) => 0,
            Self::Polynomial(c) => c
                .iter()
                .rposition(|a| *a != Complex64::new(0.0, 0.0))
                .unwrap_or(0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Constant(c) => *c == Complex64::new(0.0, 0.0),
            Self::Polynomial(c) => c.iter().all(|a| *a == Complex64::new(0.0, 0.0)),
        }
    }

    /// The constant value, if the differential is constant.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            Self::Constant(c) => Some(*c),
            Self::Polynomial(c) if self.degree() == 0 => {
                Some(c.first().copied().unwrap_or_default())
            }
            Self::Polynomial(_) => None,
        }
    }

    #[inline]
    pub fn at(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Constant(c) => *c,
            Self::Polynomial(c) => c
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a),
        }
    }

    /// Only constants are doubly periodic.
    pub fn check_admissible(&self, grid: &Grid2D) -> Result<(), FieldError> {
        if grid.is_periodic() && self.degree() > 0 {
            Err(FieldError::Representation)
        } else {
            Ok(())
        }
    }

    pub fn eval_on(&self, grid: &Grid2D) -> Result<ComplexField, FieldError> {
        self.check_admissible(grid)?;
        Ok(ComplexField::from_fn(*grid, |x, y| {
            self.at(Complex64::new(x, y))
        }))
    }
}

/// Pointwise values of `t` on `grid`.
pub fn eval_quad_diff(t: &QuadraticDifferential, grid: &Grid2D) -> Result<ComplexField, FieldError> {
    t.eval_on(grid)
}
