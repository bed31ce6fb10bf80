use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FieldError;

/// How the outermost layer of a grid is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    /// Index `nx` is identified with index 0 (and likewise in y).
    Periodic,
    /// The outer ring of points carries prescribed values.
    Dirichlet,
}

impl BoundaryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::Dirichlet => "dirichlet",
        }
    }
}

/// Uniform rectangular grid carrying the chart coordinate `z = x + iy`.
///
/// Point `(i, j)` sits at `(x0 + i*hx, y0 + j*hy)` and is stored at row-major
/// index `j*nx + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    x0: f64,
    y0: f64,
    boundary: BoundaryKind,
}

impl Grid2D {
    pub fn new(
        nx: usize,
        ny: usize,
        hx: f64,
        hy: f64,
        origin: (f64, f64),
        boundary: BoundaryKind,
    ) -> Result<Self, FieldError> {
        if nx < 4 || ny < 4 {
            return Err(FieldError::GridTooSmall { nx, ny });
        }
        if !(hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite()) {
            return Err(FieldError::BadSpacing { hx, hy });
        }
        if !(origin.0.is_finite() && origin.1.is_finite()) {
            return Err(FieldError::BadSpacing { hx, hy });
        }
        Ok(Self {
            nx,
            ny,
            hx,
            hy,
            x0: origin.0,
            y0: origin.1,
            boundary,
        })
    }

    /// Periodic grid on `[0, lx) x [0, ly)`.
    pub fn periodic(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, FieldError> {
        Self::new(
            nx,
            ny,
            lx / nx as f64,
            ly / ny as f64,
            (0.0, 0.0),
            BoundaryKind::Periodic,
        )
    }

    /// Unit torus with `n` points per axis.
    pub fn unit_torus(n: usize) -> Result<Self, FieldError> {
        Self::periodic(n, n, 1.0, 1.0)
    }

    /// Dirichlet grid whose corner points are `lo` and `hi`.
    pub fn rectangle(
        nx: usize,
        ny: usize,
        lo: (f64, f64),
        hi: (f64, f64),
    ) -> Result<Self, FieldError> {
        let hx = (hi.0 - lo.0) / (nx.max(2) - 1) as f64;
        let hy = (hi.1 - lo.1) / (ny.max(2) - 1) as f64;
        Self::new(nx, ny, hx, hy, lo, BoundaryKind::Dirichlet)
    }

    /// Dirichlet square inscribed in the disk `|z| <= radius` (corners on the circle).
    pub fn disk_inscribed(n: usize, radius: f64) -> Result<Self, FieldError> {
        let half = radius / std::f64::consts::SQRT_2;
        Self::rectangle(n, n, (-half, -half), (half, half))
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }
    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }
    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }
    pub fn is_periodic(&self) -> bool {
        self.boundary == BoundaryKind::Periodic
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    #[inline]
    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = self.ij(k);
        (self.x(i), self.y(j))
    }

    #[inline]
    pub fn z(&self, k: usize) -> Complex64 {
        let (x, y) = self.coords(k);
        Complex64::new(x, y)
    }

    /// True for points of the prescribed outer ring of a Dirichlet grid.
    #[inline]
    pub fn is_boundary(&self, k: usize) -> bool {
        if self.is_periodic() {
            return false;
        }
        let (i, j) = self.ij(k);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Indices of the unknowns: every point on a torus, the interior otherwise.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| !self.is_boundary(k)).collect()
    }

    /// Side lengths of the covered region.
    pub fn extent(&self) -> (f64, f64) {
        match self.boundary {
            BoundaryKind::Periodic => (self.nx as f64 * self.hx, self.ny as f64 * self.hy),
            BoundaryKind::Dirichlet => (
                (self.nx - 1) as f64 * self.hx,
                (self.ny - 1) as f64 * self.hy,
            ),
        }
    }

    pub fn area(&self) -> f64 {
        let (lx, ly) = self.extent();
        lx * ly
    }

    /// Whether `(x, y)` is inside the chart. Periodic charts contain every point.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if self.is_periodic() {
            return x.is_finite() && y.is_finite();
        }
        let (lx, ly) = self.extent();
        let eps = 1e-12 * (lx + ly);
        x >= self.x0 - eps && x <= self.x0 + lx + eps && y >= self.y0 - eps && y <= self.y0 + ly + eps
    }

    /// Same point layout with a different boundary treatment.
    pub fn with_boundary(&self, boundary: BoundaryKind) -> Self {
        Self { boundary, ..*self }
    }
}
