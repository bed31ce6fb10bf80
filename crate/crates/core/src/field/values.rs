use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{FieldError, Grid2D};

/// Sample types a field can carry.
pub trait FieldValue:
    Copy
    + Send
    + Sync
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
    + Into<Complex64>
    + 'static
{
    fn magnitude(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl FieldValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// One sample per grid point, row-major.
///
/// On Dirichlet grids a field is *closed* once its outer ring holds boundary
/// values; differential operators refuse open fields.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    grid: Grid2D,
    values: Vec<T>,
    closed: bool,
}

pub type ScalarField = Field<f64>;
pub type ComplexField = Field<Complex64>;

impl<T: FieldValue> Field<T> {
    pub fn from_values(grid: Grid2D, values: Vec<T>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            closed: true,
        })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> T + Sync) -> Self {
        let values = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (x, y) = grid.coords(k);
                f(x, y)
            })
            .collect();
        Self {
            grid,
            values,
            closed: true,
        }
    }

    pub fn constant(grid: Grid2D, c: T) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
            closed: true,
        }
    }

    /// A Dirichlet field whose boundary ring is not yet prescribed.
    ///
    /// `interior` holds one value per interior point in row-major order. On a
    /// periodic grid every point is interior and the field is closed.
    pub fn interior_only(grid: Grid2D, interior: Vec<T>) -> Result<Self, FieldError> {
        let idx = grid.interior_indices();
        if interior.len() != idx.len() {
            return Err(FieldError::LengthMismatch {
                expected: idx.len(),
                got: interior.len(),
            });
        }
        let mut values = vec![T::default(); grid.len()];
        for (k, v) in idx.into_iter().zip(interior) {
            values[k] = v;
        }
        Ok(Self {
            grid,
            values,
            closed: grid.is_periodic(),
        })
    }

    /// Fill the boundary ring from `f` and mark the field closed.
    pub fn with_boundary(mut self, f: impl Fn(f64, f64) -> T) -> Self {
        for k in 0..self.grid.len() {
            if self.grid.is_boundary(k) {
                let (x, y) = self.grid.coords(k);
                self.values[k] = f(x, y);
            }
        }
        self.closed = true;
        self
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[self.grid.idx(i, j)]
    }

    pub fn ensure_closed(&self) -> Result<(), FieldError> {
        if self.closed {
            Ok(())
        } else {
            Err(FieldError::MissingBoundary)
        }
    }

    pub fn ensure_same_grid<U>(&self, other: &Field<U>) -> Result<(), FieldError> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(FieldError::GridMismatch)
        }
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U + Sync) -> Field<U> {
        Field {
            grid: self.grid,
            values: self.values.par_iter().map(|&v| f(v)).collect(),
            closed: self.closed,
        }
    }

    pub fn zip_map<U: FieldValue, V: FieldValue>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V + Sync,
    ) -> Result<Field<V>, FieldError> {
        self.ensure_same_grid(other)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .par_iter()
                .zip(other.values.par_iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
            closed: self.closed && other.closed,
        })
    }

    pub fn to_complex(&self) -> ComplexField {
        self.map(|v| v.into())
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite_value())
    }

    /// Max magnitude over every point.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.magnitude()))
    }

    /// Max magnitude over unknown points (excludes a Dirichlet ring).
    pub fn sup_norm_interior(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&k| !self.grid.is_boundary(k))
            .fold(0.0, |m, k| m.max(self.values[k].magnitude()))
    }
}

impl ScalarField {
    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

impl ComplexField {
    pub fn real_part(&self) -> ScalarField {
        self.map(|c| c.re)
    }
    pub fn conj(&self) -> ComplexField {
        self.map(|c| c.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_only_needs_closure_on_dirichlet() {
        let g = Grid2D::rectangle(5, 5, (0.0, 0.0), (1.0, 1.0)).unwrap();
        let f = ScalarField::interior_only(g, vec![1.0; 9]).unwrap();
        assert_eq!(f.ensure_closed(), Err(FieldError::MissingBoundary));
        let f = f.with_boundary(|x, _| x);
        assert!(f.is_closed());
        assert_eq!(f.get(4, 2), 1.0);
        assert_eq!(f.get(2, 2), 1.0);
    }

    #[test]
    fn length_mismatch_is_reported() {
        let g = Grid2D::unit_torus(4).unwrap();
        assert!(matches!(
            ScalarField::from_values(g, vec![0.0; 3]),
            Err(FieldError::LengthMismatch { expected: 16, got: 3 })
        ));
    }
}
