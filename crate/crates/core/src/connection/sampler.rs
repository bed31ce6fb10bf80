use num_complex::Complex64;

use crate::field::{interpolate, QuadraticDifferential, ScalarField};

use super::family::{local_coefficients_real, FamilyTag, LaurentPoint};
use super::ConnectionError;

/// Off-grid access to a family's Laurent coefficients.
pub trait ConnectionSampler: Sync {
    fn tag(&self) -> FamilyTag;

    fn coefficients(&self, x: f64, y: f64) -> Result<LaurentPoint, ConnectionError>;

    /// Periods of the chart when it is a torus.
    fn period(&self) -> Option<(f64, f64)> {
        None
    }
}

/// Coefficients from a bicubic interpolant of grid data for `phi`.
#[derive(Clone, Debug)]
pub struct GridSampler {
    phi: ScalarField,
    t: QuadraticDifferential,
    tag: FamilyTag,
}

impl GridSampler {
    pub fn new(phi: ScalarField, t: QuadraticDifferential, tag: FamilyTag) -> Result<Self, ConnectionError> {
        phi.ensure_closed()?;
        t.check_admissible(phi.grid())?;
        Ok(Self { phi, t, tag })
    }

    pub fn phi(&self) -> &ScalarField {
        &self.phi
    }
}

impl ConnectionSampler for GridSampler {
    fn tag(&self) -> FamilyTag {
        self.tag
    }

    fn coefficients(&self, x: f64, y: f64) -> Result<LaurentPoint, ConnectionError> {
        let (p, px, py) = interpolate(&self.phi, x, y)?;
        let dphi = Complex64::new(0.5 * px, -0.5 * py);
        Ok(local_coefficients_real(self.tag, p, dphi, self.t.at(Complex64::new(x, y))))
    }

    fn period(&self) -> Option<(f64, f64)> {
        let g = self.phi.grid();
        g.is_periodic().then(|| g.extent())
    }
}

/// Coefficients from a closed-form `phi`: the closure returns `(phi, d phi)`.
pub struct AnalyticSampler<F> {
    tag: FamilyTag,
    t: QuadraticDifferential,
    f: F,
}

impl<F> AnalyticSampler<F>
where
    F: Fn(f64, f64) -> (f64, Complex64) + Sync,
{
    pub fn new(tag: FamilyTag, t: QuadraticDifferential, f: F) -> Self {
        Self { tag, t, f }
    }
}

impl<F> ConnectionSampler for AnalyticSampler<F>
where
    F: Fn(f64, f64) -> (f64, Complex64) + Sync,
{
    fn tag(&self) -> FamilyTag {
        self.tag
    }

    fn coefficients(&self, x: f64, y: f64) -> Result<LaurentPoint, ConnectionError> {
        let (p, dp) = (self.f)(x, y);
        Ok(local_coefficients_real(self.tag, p, dp, self.t.at(Complex64::new(x, y))))
    }
}

impl<S: ConnectionSampler + ?Sized> ConnectionSampler for &S {
    fn tag(&self) -> FamilyTag {
        (**self).tag()
    }
    fn coefficients(&self, x: f64, y: f64) -> Result<LaurentPoint, ConnectionError> {
        (**self).coefficients(x, y)
    }
    fn period(&self) -> Option<(f64, f64)> {
        (**self).period()
    }
}

/// Constant diagonal gauge `A -> h^-1 A h`, `h = diag(e^{i psi}, e^{-i psi})`.
pub struct DiagonalGauge<S> {
    pub inner: S,
    pub psi: f64,
}

impl<S: ConnectionSampler> ConnectionSampler for DiagonalGauge<S> {
    fn tag(&self) -> FamilyTag {
        self.inner.tag()
    }

    fn coefficients(&self, x: f64, y: f64) -> Result<LaurentPoint, ConnectionError> {
        let p = self.inner.coefficients(x, y)?;
        let e = Complex64::from_polar(1.0, self.psi);
        let o = Complex64::new(0.0, 0.0);
        let h = crate::linalg::mat2::mat2(e, o, o, e.conj());
        let hi = crate::linalg::mat2::mat2(e.conj(), o, o, e);
        let conj = |m: &crate::linalg::Mat2| hi * m * h;
        Ok(LaurentPoint {
            z: [conj(&p.z[0]), conj(&p.z[1]), conj(&p.z[2])],
            zbar: [conj(&p.zbar[0]), conj(&p.zbar[1]), conj(&p.zbar[2])],
        })
    }

    fn period(&self) -> Option<(f64, f64)> {
        self.inner.period()
    }
}
