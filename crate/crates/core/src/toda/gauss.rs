use num_complex::Complex64;

use crate::linalg::mat2::{identity, mat2, max_abs, Mat2};

use super::TodaError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussFactors {
    /// Upper triangular.
    pub plus: Mat2,
    /// Lower triangular with unit diagonal.
    pub minus: Mat2,
}

/// `U = U_+ U_-` with `U_-` lower unipotent; for `det U = 1`,
/// `U_+ = [[1/U22, U12], [0, U22]]` and `U_- = [[1, 0], [U21/U22, 1]]`.
pub fn gauss_decompose(u: &Mat2) -> Result<GaussFactors, TodaError> {
    let p = u[(1, 1)];
    let scale = max_abs(u).max(1.0);
    if !(p.norm() > 1e-14 * scale) {
        return Err(TodaError::DecompositionFails { pivot: p.norm() });
    }
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let minus = mat2(one, o, u[(1, 0)] / p, one);
    // Solve for U_+ = U U_-^{-1} so the product reproduces U even if det U
    // drifts from 1 by rounding.
    let minus_inv = mat2(one, o, -u[(1, 0)] / p, one);
    let plus = u * minus_inv;
    Ok(GaussFactors {
        plus: mat2(plus[(0, 0)], plus[(0, 1)], o, plus[(1, 1)]),
        minus,
    })
}

fn rk4(f: &dyn Fn(f64) -> Mat2, g: &Mat2, s: f64, h: f64) -> Mat2 {
    let c = |x: f64| Complex64::new(x, 0.0);
    let (a0, am, a1) = (f(s), f(s + 0.5 * h), f(s + h));
    let k1 = a0 * g;
    let k2 = am * (g + k1 * c(0.5 * h));
    let k3 = am * (g + k2 * c(0.5 * h));
    let k4 = a1 * (g + k3 * c(h));
    g + (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(h / 6.0)
}

/// Solves `dg/ds = F(s) g`, `g(0) = 1`, on `[0, 1]` by RK4 with step doubling.
pub(crate) fn left_transport(f: &dyn Fn(f64) -> Mat2, tol: f64) -> Result<Mat2, TodaError> {
    let mut g = identity();
    let mut s = 0.0;
    let mut h: f64 = 0.05;
    while s < 1.0 {
        h = h.min(1.0 - s);
        let full = rk4(f, &g, s, h);
        let half = rk4(f, &g, s, 0.5 * h);
        let two = rk4(f, &half, s + 0.5 * h, 0.5 * h);
        let err = max_abs(&(two - full)) / 15.0;
        let scale = max_abs(&g).max(1.0);
        if err <= tol * scale {
            g = two + (two - full) / Complex64::new(15.0, 0.0);
            s += h;
        }
        let factor = if err > 0.0 {
            (0.9 * (tol * scale / err).powf(0.2)).clamp(0.2, 4.0)
        } else {
            4.0
        };
        h *= factor;
        if h < 1e-14 {
            return Err(TodaError::StepUnderflow { at: s });
        }
    }
    Ok(g)
}

/// `g(z_end)` for `dg = A(z) g dz` along the segment from 0, where `a` maps a
/// point to the `dz` coefficient.
pub fn pexp_with(a: &dyn Fn(Complex64) -> Mat2, z_end: Complex64, tol: f64) -> Result<Mat2, TodaError> {
    left_transport(&|s| a(z_end * s) * z_end, tol)
}

/// [`pexp_with`] for holomorphic data, local error target `1e-12`.
pub fn pexp(a0: &super::HoloConnectionData, z_end: Complex64) -> Result<Mat2, TodaError> {
    pexp_with(&|z| a0.matrix(z), z_end, 1e-12)
}
