use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::checks::matrix_derivatives;
use crate::field::{laplace_zzbar, Grid2D, ScalarField};
use crate::linalg::mat2::{commutator, det, gen_e, gen_f, gen_h, inverse, max_abs, Mat2};

use super::gauss::{gauss_decompose, pexp_with};
use super::TodaError;

/// Holomorphic `sl(2)` connection `A0 = (a(z) E + b(z) H) dz` with polynomial
/// coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHolo", into = "RawHolo")]
pub struct HoloConnectionData {
    a: Vec<Complex64>,
    b: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct RawHolo {
    a: Vec<[f64; 2]>,
    #[serde(default)]
    b: Vec<[f64; 2]>,
}

impl TryFrom<RawHolo> for HoloConnectionData {
    type Error = TodaError;
    fn try_from(r: RawHolo) -> Result<Self, TodaError> {
        let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|p| Complex64::new(p[0], p[1])).collect();
        Self::new(conv(r.a), conv(r.b))
    }
}

impl From<HoloConnectionData> for RawHolo {
    fn from(h: HoloConnectionData) -> Self {
        let conv = |v: Vec<Complex64>| v.into_iter().map(|c| [c.re, c.im]).collect();
        RawHolo { a: conv(h.a), b: conv(h.b) }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

impl HoloConnectionData {
    pub fn new(a: Vec<Complex64>, b: Vec<Complex64>) -> Result<Self, TodaError> {
        if a.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(TodaError::InvalidInput("a(z) must not vanish identically".into()));
        }
        if a.iter().chain(&b).any(|c| !c.is_finite()) {
            return Err(TodaError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { a, b })
    }

    /// Unchecked constructor; `a` may vanish (used for `pexp` on pure Cartan data).
    pub fn raw(a: Vec<Complex64>, b: Vec<Complex64>) -> Self {
        Self { a, b }
    }

    pub fn a(&self, z: Complex64) -> Complex64 {
        horner(&self.a, z)
    }

    pub fn b(&self, z: Complex64) -> Complex64 {
        horner(&self.b, z)
    }

    pub fn has_cartan_part(&self) -> bool {
        self.b.iter().any(|c| *c != Complex64::new(0.0, 0.0))
    }

    /// The `dz` coefficient `a E + b H`.
    pub fn matrix(&self, z: Complex64) -> Mat2 {
        gen_e() * self.a(z) + gen_h() * self.b(z)
    }

    /// `conj(a) F + conj(b) H`, the generator of `g*`.
    pub fn adjoint(&self, z: Complex64) -> Mat2 {
        gen_f() * self.a(z).conj() + gen_h() * self.b(z).conj()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TodaReport {
    /// Sup of `1/2 d dbar phi - e^phi` from exact derivatives of the transports.
    pub residual_semi_analytic: f64,
    /// Same residual with the 5-point Laplacian, off the ring.
    pub residual_fd: f64,
    /// Sup of the `dz ^ dzbar` curvature of `A = dG G^-1`, off the ring.
    pub flatness_fd: f64,
    pub det_defect: f64,
    /// Sup of `|P - |a|^2| / |a|^2` with `P = -det[u,u'] det[v,v']` the
    /// prefactor that makes `P / Delta^2` solve the complexified equation.
    pub prefactor_discrepancy: f64,
    /// Modulus of the complexified residual of `ln P - 2 ln Delta`.
    pub corrected_residual: f64,
    /// Sup of `|Im Delta| / |Delta|`; `Delta` is real only when `b = 0`, and
    /// `phi` is read off `ln |Delta|`.
    pub delta_imag: f64,
}

struct PointData {
    phi: f64,
    big_g: Mat2,
    residual: f64,
    corrected: f64,
    delta_imag: f64,
    discrepancy: f64,
    det_defect: f64,
}

fn dot(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

fn point(a0: &HoloConnectionData, z: Complex64, tol: f64) -> Result<Option<PointData>, TodaError> {
    let g = pexp_with(&|w| a0.matrix(w), z, tol)?;
    // g* runs in the zbar plane: at zbar = w its generator is adjoint(conj(w))
    let gs = pexp_with(&|w| a0.adjoint(w.conj()), z.conj(), tol)?;
    let det_defect = (det(&g) - 1.0).norm().max((det(&gs) - 1.0).norm());
    let gi = inverse(&g);
    let m = gi * gs;
    let Ok(factors) = gauss_decompose(&m) else {
        return Ok(None);
    };
    let delta = m[(0, 0)];
    // the principal log must stay continuous across the region
    if !(delta.re > 0.0) {
        return Ok(None);
    }
    let a = a0.a(z);
    let a2 = a.norm_sqr();
    let phi = a2.ln() - 2.0 * delta.norm().ln();

    let am = a0.matrix(z);
    let u = [gi[(0, 0)], gi[(0, 1)]];
    let um = -(mat_row(&u) * am);
    let up = [um[(0, 0)], um[(0, 1)]];
    let v = [gs[(0, 0)], gs[(1, 0)]];
    let vm = a0.adjoint(z) * nalgebra::Vector2::new(v[0], v[1]);
    let vp = [vm[0], vm[1]];
    let mixed = delta * dot(&up, &vp) - dot(&up, &v) * dot(&u, &vp);
    // d dbar ln|Delta| = Re d dbar ln Delta
    let residual = -(mixed / (delta * delta)).re - a2 / delta.norm_sqr();
    let pref = -(u[0] * up[1] - u[1] * up[0]) * (v[0] * vp[1] - v[1] * vp[0]);
    let corrected = (-(mixed + pref) / (delta * delta)).norm();
    let discrepancy = if a2 > 0.0 { (pref - a2).norm() / a2 } else { f64::INFINITY };
    Ok(Some(PointData {
        phi,
        big_g: factors.minus * g,
        residual,
        corrected,
        delta_imag: delta.im.abs() / delta.norm(),
        discrepancy,
        det_defect,
    }))
}

fn mat_row(u: &[Complex64; 2]) -> nalgebra::RowVector2<Complex64> {
    nalgebra::RowVector2::new(u[0], u[1])
}

/// `phi = ln|a|^2 - 2 ln|Delta|` with `Delta = M_11`, `M = g^-1 g*`, where
/// `dg = A0 g` and `dg* = conj(A0)^T g*` start at the identity at the origin.
///
/// Exact when `b = 0`. Otherwise `Delta` leaves the real axis, so `ln|Delta|`
/// no longer solves Liouville; the gap is reported rather than corrected.
pub fn liouville_from_holomorphic(
    a0: &HoloConnectionData,
    grid: &Grid2D,
) -> Result<(ScalarField, TodaReport), TodaError> {
    let tol = 1e-12;
    let data: Vec<Option<PointData>> = (0..grid.len())
        .into_par_iter()
        .map(|k| point(a0, grid.z(k), tol))
        .collect::<Result<_, _>>()?;
    let failed: Vec<usize> = (0..grid.len()).filter(|&k| data[k].is_none()).collect();
    if let Some(&k) = failed.first() {
        let (x, y) = grid.coords(k);
        return Err(TodaError::Region { points: failed.len(), x, y });
    }
    let data: Vec<PointData> = data.into_iter().map(Option::unwrap).collect();

    let phi = ScalarField::from_values(*grid, data.iter().map(|d| d.phi).collect())?;
    let lap = laplace_zzbar(&phi)?;
    let off_ring = |k: &usize| grid.is_periodic() || !grid.is_boundary(*k);
    let residual_fd = (0..grid.len())
        .filter(off_ring)
        .map(|k| (0.5 * lap.values()[k] - phi.values()[k].exp()).abs())
        .fold(0.0, f64::max);

    let big: Vec<Mat2> = data.iter().map(|d| d.big_g).collect();
    let (dz, dzb) = matrix_derivatives(grid, &big)?;
    let az: Vec<Mat2> = (0..grid.len()).map(|k| dz[k] * inverse(&big[k])).collect();
    let azb: Vec<Mat2> = (0..grid.len()).map(|k| dzb[k] * inverse(&big[k])).collect();
    let (d_azb, _) = matrix_derivatives(grid, &azb)?;
    let (_, dbar_az) = matrix_derivatives(grid, &az)?;
    let flatness_fd = (0..grid.len())
        .filter(off_ring)
        .map(|k| max_abs(&(d_azb[k] - dbar_az[k] - commutator(&az[k], &azb[k]))))
        .fold(0.0, f64::max);

    let sup = |f: fn(&PointData) -> f64| data.iter().map(f).fold(0.0, f64::max);
    let report = TodaReport {
        residual_semi_analytic: sup(|d| d.residual.abs()),
        residual_fd,
        flatness_fd,
        det_defect: sup(|d| d.det_defect),
        prefactor_discrepancy: sup(|d| d.discrepancy),
        corrected_residual: sup(|d| d.corrected),
        delta_imag: sup(|d| d.delta_imag),
    };
    Ok((phi, report))
}
