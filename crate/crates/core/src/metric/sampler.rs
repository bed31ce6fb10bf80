use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connection::ConnectionSampler;
use crate::field::{interpolate, QuadraticDifferential, ScalarField};
use crate::linalg::mat2::{det, mat2, Mat2};
use crate::pde::EquationVariant;

use super::{Mat3, MetricError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Riemannian,
    Lorentzian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    DirectCosh,
    DirectSinh,
    FromConnection,
    ClosedForm,
}

/// A symmetric bilinear form on `(x, y, l)` coordinates.
pub trait MetricSampler: Sync {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError>;

    fn signature(&self) -> Signature;

    fn provenance(&self) -> Provenance;
}

/// Sign of the `cosh l sinh l (t dz^2 + c.c.)` cross term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// `+ cosh l sinh l (t dz^2 + c.c.)`.
    AsPrinted,
    /// The same metric after `l -> -l`.
    Reflected,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::AsPrinted => 1.0,
            Orientation::Reflected => -1.0,
        }
    }
}

/// Global normalization of the `(x, y)` block and the cross-term orientation.
///
/// With `scale = 4` the direct metrics have curvature `-1` for solutions of
/// `1/2 d dbar phi = e^phi +- |t|^2 e^-phi`; `scale = 1` is the bare formula.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricConvention {
    pub scale: f64,
    pub orientation: Orientation,
}

impl MetricConvention {
    pub fn bare() -> Self {
        Self {
            scale: 1.0,
            orientation: Orientation::AsPrinted,
        }
    }

    pub fn with_scale(scale: f64, orientation: Orientation) -> Self {
        Self { scale, orientation }
    }
}

/// `(x, y)` matrix of the quadratic form `t dz^2 + conj(t) dzbar^2`.
pub fn quad_form(t: Complex64) -> [[f64; 2]; 2] {
    [[2.0 * t.re, -2.0 * t.im], [-2.0 * t.im, -2.0 * t.re]]
}

/// Where `phi` and `t` come from for a direct metric.
pub trait PotentialSource: Sync {
    fn phi(&self, x: f64, y: f64) -> Result<f64, MetricError>;
    fn t(&self, x: f64, y: f64) -> Complex64;
}

/// Grid data with bicubic interpolation off the nodes.
impl PotentialSource for (ScalarField, QuadraticDifferential) {
    fn phi(&self, x: f64, y: f64) -> Result<f64, MetricError> {
        Ok(interpolate(&self.0, x, y)?.0)
    }
    fn t(&self, x: f64, y: f64) -> Complex64 {
        self.1.at(Complex64::new(x, y))
    }
}

/// A closed-form `phi`.
pub struct Conformal<F> {
    pub phi: F,
    pub t: QuadraticDifferential,
}

impl<F: Fn(f64, f64) -> f64 + Sync> PotentialSource for Conformal<F> {
    fn phi(&self, x: f64, y: f64) -> Result<f64, MetricError> {
        Ok((self.phi)(x, y))
    }
    fn t(&self, x: f64, y: f64) -> Complex64 {
        self.t.at(Complex64::new(x, y))
    }
}

/// The metric written down directly from `rho = e^phi` and `t`:
/// cosh: `dl^2 + k[(rho cosh^2 l + |t|^2/rho sinh^2 l)|dz|^2 + o cosh l sinh l (t dz^2 + c.c.)]`,
/// sinh: `-dl^2 + k[(rho cos^2 l + |t|^2/rho sin^2 l)|dz|^2 + o cos l sin l (t dz^2 + c.c.)]`,
/// with `k` the scale and `o` the orientation sign.
pub struct DirectMetric<P> {
    source: P,
    variant: EquationVariant,
    convention: MetricConvention,
}

pub fn metric_direct<P: PotentialSource>(
    source: P,
    variant: EquationVariant,
    convention: MetricConvention,
) -> DirectMetric<P> {
    DirectMetric {
        source,
        variant,
        convention,
    }
}

impl<P> DirectMetric<P> {
    pub fn convention(&self) -> MetricConvention {
        self.convention
    }
}

impl<P: PotentialSource> MetricSampler for DirectMetric<P> {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        let [x, y, l] = p;
        let rho = self.source.phi(x, y)?.exp();
        let t = self.source.t(x, y);
        let (c, s, ll) = match self.variant {
            EquationVariant::Sinh => (l.cos(), l.sin(), -1.0),
            _ => (l.cosh(), l.sinh(), 1.0),
        };
        let k = self.convention.scale;
        let diag = k * (rho * c * c + t.norm_sqr() / rho * s * s);
        let q = quad_form(t);
        let cross = k * self.convention.orientation.sign() * c * s;
        let mut m = Mat3::zeros();
        m[(0, 0)] = diag + cross * q[0][0];
        m[(1, 1)] = diag + cross * q[1][1];
        m[(0, 1)] = cross * q[0][1];
        m[(1, 0)] = m[(0, 1)];
        m[(2, 2)] = ll;
        Ok(m)
    }

    fn signature(&self) -> Signature {
        match self.variant {
            EquationVariant::Sinh => Signature::Lorentzian,
            _ => Signature::Riemannian,
        }
    }

    fn provenance(&self) -> Provenance {
        match self.variant {
            EquationVariant::Sinh => Provenance::DirectSinh,
            _ => Provenance::DirectCosh,
        }
    }
}

/// Metric induced by a flat connection at `lambda = 1`: for a tangent vector
/// `v = (vx, vy, vl)`,
/// `N(v) = L^-1 A(v) L + vl diag(1, -1) + A(v)^+`, `L = diag(e^l, e^-l)`,
/// and `G(v, v) = sign * det N(v)`, polarized to a bilinear form.
pub struct ConnectionMetric<S> {
    sampler: S,
    sign: Option<f64>,
}

pub fn metric_from_connection<S: ConnectionSampler>(sampler: S, sign: Option<f64>) -> ConnectionMetric<S> {
    ConnectionMetric { sampler, sign }
}

impl<S: ConnectionSampler> ConnectionMetric<S> {
    fn raw(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        let [x, y, l] = p;
        let coeff = self.sampler.coefficients(x, y)?;
        let one = Complex64::new(1.0, 0.0);
        let o = Complex64::new(0.0, 0.0);
        let (el, eli) = (Complex64::new(l.exp(), 0.0), Complex64::new((-l).exp(), 0.0));
        let n = |v: [f64; 3]| -> Mat2 {
            let a = coeff.along(one, v[0], v[1]);
            let lam = mat2(el, o, o, eli);
            let lam_inv = mat2(eli, o, o, el);
            lam_inv * a * lam + mat2(one, o, o, -one) * Complex64::new(v[2], 0.0) + a.adjoint()
        };
        // det N is a real quadratic form in v; polarize.
        let q = |v: [f64; 3]| det(&n(v)).re;
        let e = |i: usize| {
            let mut v = [0.0; 3];
            v[i] = 1.0;
            v
        };
        let mut m = Mat3::zeros();
        for i in 0..3 {
            m[(i, i)] = q(e(i));
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                let mut v = e(i);
                v[j] = 1.0;
                let b = 0.5 * (q(v) - m[(i, i)] - m[(j, j)]);
                m[(i, j)] = b;
                m[(j, i)] = b;
            }
        }
        Ok(m)
    }
}

fn positive_definite(m: &Mat3) -> bool {
    m.cholesky().is_some()
}

impl<S: ConnectionSampler> MetricSampler for ConnectionMetric<S> {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        let m = self.raw(p)?;
        match self.sign {
            Some(s) => Ok(m * s),
            None => {
                if positive_definite(&(-m)) {
                    Ok(-m)
                } else if positive_definite(&m) {
                    Ok(m)
                } else {
                    Err(MetricError::ConstructionMismatch { at: p.to_vec() })
                }
            }
        }
    }

    fn signature(&self) -> Signature {
        Signature::Riemannian
    }

    fn provenance(&self) -> Provenance {
        Provenance::FromConnection
    }
}

/// `dl^2 + cosh^2 l (dx^2 + dy^2)`: a warped product over a flat plane.
/// Planes containing `d/dl` have curvature `-1`, but the `(x, y)` plane has
/// `-tanh^2 l`, so this is not hyperbolic space.
#[derive(Clone, Copy, Debug, Default)]
pub struct WarpedFlatMetric;

impl MetricSampler for WarpedFlatMetric {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        let c2 = p[2].cosh().powi(2);
        Ok(Mat3::from_diagonal(&nalgebra::Vector3::new(c2, c2, 1.0)))
    }
    fn signature(&self) -> Signature {
        Signature::Riemannian
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

/// `dl^2 + cosh^2 l * 4 (dx^2 + dy^2) / (1 - x^2 - y^2)^2`: hyperbolic space
/// in Fermi coordinates about a totally geodesic plane (Poincare disk chart).
#[derive(Clone, Copy, Debug, Default)]
pub struct FermiMetric;

impl MetricSampler for FermiMetric {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        let r2 = p[0] * p[0] + p[1] * p[1];
        if r2 >= 1.0 {
            return Err(crate::field::FieldError::OutsideChart { x: p[0], y: p[1] }.into());
        }
        let w = p[2].cosh().powi(2) * 4.0 / (1.0 - r2).powi(2);
        Ok(Mat3::from_diagonal(&nalgebra::Vector3::new(w, w, 1.0)))
    }
    fn signature(&self) -> Signature {
        Signature::Riemannian
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}

/// Any closure as a metric.
pub struct FnMetric<F> {
    pub f: F,
    pub signature: Signature,
}

impl<F: Fn([f64; 3]) -> Mat3 + Sync> MetricSampler for FnMetric<F> {
    fn metric(&self, p: [f64; 3]) -> Result<Mat3, MetricError> {
        Ok((self.f)(p))
    }
    fn signature(&self) -> Signature {
        self.signature
    }
    fn provenance(&self) -> Provenance {
        Provenance::ClosedForm
    }
}
