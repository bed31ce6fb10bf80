use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{d_z, d_zbar, laplace_zzbar, ComplexField, ScalarField};

use super::ConnectionError;

/// A connection in the gauge where the nilpotent part is `a E dz` and the
/// `E` coefficient of `dz` vanishes:
/// `(a E + h H + f F) dz + (-conj(a) F - conj(h) H + f E) dzbar`,
/// with `f` real and positive.
#[derive(Clone, Debug)]
pub struct GenericGaugeData {
    pub a: ComplexField,
    pub f: ComplexField,
    pub h: ComplexField,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    pub t: ComplexField,
    pub phi: ScalarField,
    /// Sup over the unknowns of `|d_zbar t|`.
    pub holomorphy_defect: f64,
    /// Sup over the unknowns of the cosh-Gordon residual of `phi` with this `t`.
    pub residual_sup: f64,
    /// Sup-norms of the five reduced flatness equations.
    pub reduced: ReducedDefects,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedDefects {
    /// `dbar a - 2 conj(h) a`
    pub a_bar: f64,
    /// `d conj(a) - 2 h conj(a)`
    pub a_conj: f64,
    /// `dbar f + 2 conj(h) f`
    pub f_bar: f64,
    /// `d conj(f) + 2 h conj(f)`
    pub f_conj: f64,
    /// `d conj(h) + dbar h + |a|^2 + |f|^2`
    pub h: f64,
}

fn sup_interior(f: &ComplexField) -> f64 {
    let g = f.grid();
    f.values()
        .iter()
        .enumerate()
        .filter(|(k, _)| !g.is_boundary(*k))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max)
}

/// Reads off `t = a f` and `phi = 2 ln f` from a connection in the gauge of
/// [`GenericGaugeData`], checking holomorphy of `t`, the cosh-Gordon equation
/// for `phi`, and the reduced flatness equations along the way.
pub fn extract_normal_form(data: &GenericGaugeData) -> Result<NormalForm, ConnectionError> {
    let GenericGaugeData { a, f, h } = data;
    a.ensure_same_grid(f)?;
    a.ensure_same_grid(h)?;
    let grid = *a.grid();
    for (k, v) in f.values().iter().enumerate() {
        let tol = 1e-12 * v.norm().max(1.0);
        if !(v.re > 0.0) || v.im.abs() > tol {
            let (x, y) = grid.coords(k);
            return Err(ConnectionError::GaugePrecondition(format!(
                "f must be real and positive, found {v} at ({x}, {y})"
            )));
        }
    }
    let t = a.zip_map(f, |x, y| x * y)?;
    let phi = f.map(|v| 2.0 * v.re.ln());

    let holomorphy_defect = sup_interior(&d_zbar(&t)?);
    let lap = laplace_zzbar(&phi)?;
    let res = ComplexField::from_values(
        grid,
        (0..grid.len())
            .map(|k| {
                let p = phi.values()[k];
                Complex64::new(0.5 * lap.values()[k] - p.exp() - t.values()[k].norm_sqr() * (-p).exp(), 0.0)
            })
            .collect(),
    )?;
    let residual_sup = sup_interior(&res);

    let (ac, fc, hc) = (a.conj(), f.conj(), h.conj());
    let two = Complex64::new(2.0, 0.0);
    let combine = |lhs: ComplexField, rhs: &dyn Fn(usize) -> Complex64| -> Result<f64, ConnectionError> {
        let v = (0..grid.len()).map(|k| lhs.values()[k] - rhs(k)).collect();
        Ok(sup_interior(&ComplexField::from_values(grid, v)?))
    };
    let reduced = ReducedDefects {
        a_bar: combine(d_zbar(a)?, &|k| two * hc.values()[k] * a.values()[k])?,
        a_conj: combine(d_z(&ac)?, &|k| two * h.values()[k] * ac.values()[k])?,
        f_bar: combine(d_zbar(f)?, &|k| -two * hc.values()[k] * f.values()[k])?,
        f_conj: combine(d_z(&fc)?, &|k| -two * h.values()[k] * fc.values()[k])?,
        h: {
            let (dh, dbh) = (d_z(&hc)?, d_zbar(h)?);
            let sum = dh.zip_map(&dbh, |x, y| x + y)?;
            combine(sum, &|k| {
                -Complex64::new(a.values()[k].norm_sqr() + f.values()[k].norm_sqr(), 0.0)
            })?
        }
    };
    Ok(NormalForm {
        t,
        phi,
        holomorphy_defect,
        residual_sup,
        reduced,
    })
}
