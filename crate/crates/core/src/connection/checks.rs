use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{d_z, d_zbar, ComplexField, Grid2D};
use crate::linalg::mat2::{commutator, det, gen_h, max_abs, pseudo_adjoint, Mat2};

use super::family::{LambdaConnectionFamily, LaurentPoint};
use super::ConnectionError;

/// `d_z` and `d_zbar` of a matrix-valued grid function, entrywise.
pub(crate) fn matrix_derivatives(grid: &Grid2D, m: &[Mat2]) -> Result<(Vec<Mat2>, Vec<Mat2>), ConnectionError> {
    let mut dz = vec![Mat2::zeros(); grid.len()];
    let mut dzb = vec![Mat2::zeros(); grid.len()];
    for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        let f = ComplexField::from_values(*grid, m.iter().map(|a| a[(r, c)]).collect())?;
        let (a, b) = (d_z(&f)?, d_zbar(&f)?);
        for k in 0..grid.len() {
            dz[k][(r, c)] = a.values()[k];
            dzb[k][(r, c)] = b.values()[k];
        }
    }
    Ok((dz, dzb))
}

fn check_lambda(lambda: Complex64) -> Result<(), ConnectionError> {
    if lambda == Complex64::new(0.0, 0.0) || !lambda.is_finite() {
        Err(ConnectionError::LambdaZero)
    } else {
        Ok(())
    }
}

/// Coefficient of `dz ^ dzbar` in the curvature,
/// `d_z A_zbar - d_zbar A_z + [A_z, A_zbar]`, at every grid point.
pub fn curvature(f: &LambdaConnectionFamily, lambda: Complex64) -> Result<Vec<Mat2>, ConnectionError> {
    check_lambda(lambda)?;
    let vals = f.eval(lambda)?;
    let az: Vec<Mat2> = vals.iter().map(|v| v.0).collect();
    let azb: Vec<Mat2> = vals.iter().map(|v| v.1).collect();
    let (_, dbar_az) = matrix_derivatives(f.grid(), &az)?;
    let (d_azb, _) = matrix_derivatives(f.grid(), &azb)?;
    Ok((0..az.len())
        .into_par_iter()
        .map(|k| d_azb[k] - dbar_az[k] + commutator(&az[k], &azb[k]))
        .collect())
}

/// Largest entry of a matrix field over the unknowns (every point of a
/// torus, interior points of a Dirichlet grid).
pub fn curvature_sup(grid: &Grid2D, m: &[Mat2]) -> f64 {
    m.iter()
        .enumerate()
        .filter(|(k, _)| !grid.is_boundary(*k))
        .map(|(_, a)| max_abs(a))
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatnessSample {
    pub lambda: [f64; 2],
    pub sup: f64,
}

/// Curvature at sample values of `lambda` together with its Laurent
/// coefficients `lambda^-2 .. lambda^2`.
#[derive(Clone, Debug)]
pub struct FlatnessSweep {
    pub samples: Vec<FlatnessSample>,
    /// Sup-norm over the unknowns of the coefficients of `lambda^k`, `k = -2..=2`.
    pub coefficient_sup: [f64; 5],
    /// The coefficient fields themselves, same order.
    pub coefficients: [Vec<Mat2>; 5],
}

pub fn lambda_flatness_sweep(
    f: &LambdaConnectionFamily,
    lambdas: &[Complex64],
) -> Result<FlatnessSweep, ConnectionError> {
    let grid = *f.grid();
    let mut samples = Vec::with_capacity(lambdas.len());
    for &l in lambdas {
        let c = curvature(f, l)?;
        samples.push(FlatnessSample {
            lambda: [l.re, l.im],
            sup: curvature_sup(&grid, &c),
        });
    }
    let pts = f.points();
    let mut derivs = Vec::with_capacity(3);
    for j in 0..3 {
        let z: Vec<Mat2> = pts.iter().map(|p| p.z[j]).collect();
        let zb: Vec<Mat2> = pts.iter().map(|p| p.zbar[j]).collect();
        let (_, dbar_z) = matrix_derivatives(&grid, &z)?;
        let (d_zb, _) = matrix_derivatives(&grid, &zb)?;
        derivs.push((dbar_z, d_zb));
    }
    let coefficients: [Vec<Mat2>; 5] = std::array::from_fn(|slot| {
        let k = slot as isize - 2;
        (0..grid.len())
            .into_par_iter()
            .map(|p| {
                let mut m = Mat2::zeros();
                if (-1..=1).contains(&k) {
                    let j = (k + 1) as usize;
                    m += derivs[j].1[p] - derivs[j].0[p];
                }
                for i in 0..3isize {
                    let jj = k - (i - 1) + 1;
                    if (0..3).contains(&jj) {
                        m += commutator(&pts[p].z[i as usize], &pts[p].zbar[jj as usize]);
                    }
                }
                m
            })
            .collect()
    });
    let coefficient_sup = std::array::from_fn(|s| curvature_sup(&grid, &coefficients[s]));
    Ok(FlatnessSweep {
        samples,
        coefficient_sup,
        coefficients,
    })
}

fn reality_defect_at(p: &LaurentPoint, lambda: Complex64, mu: Complex64) -> f64 {
    let (az, azb) = p.eval(lambda);
    let (az_mu, azb_mu) = p.eval(mu);
    max_abs(&(pseudo_adjoint(&az_mu) + azb)).max(max_abs(&(pseudo_adjoint(&azb_mu) + az)))
}

/// Largest violation of `C A_z(mu)^+ C = -A_zbar(lambda)` (and the same with
/// the roles swapped), `C = diag(1, -1)`, `mu` the family's involution of
/// `lambda`.
pub fn reality_check(f: &LambdaConnectionFamily, lambda: Complex64) -> Result<f64, ConnectionError> {
    check_lambda(lambda)?;
    let mu = f.tag().involution(lambda);
    Ok(f
        .points()
        .par_iter()
        .map(|p| reality_defect_at(p, lambda, mu))
        .reduce(|| 0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// Largest `|det|` of the `lambda^{+-1}` coefficients.
    pub max_det: f64,
    /// Largest entry of `[Phi_x, Phi_y]` for the nilpotent part `Phi`.
    pub commutator: f64,
}

/// Determinants of the off-diagonal-in-`lambda` coefficients and the
/// commutator of their real components.
pub fn degeneracy_check(f: &LambdaConnectionFamily) -> DegeneracyReport {
    f.points()
        .par_iter()
        .map(|p| {
            let mut md = 0.0f64;
            for m in [&p.z[0], &p.z[2], &p.zbar[0], &p.zbar[2]] {
                md = md.max(det(m).norm());
            }
            // Phi = lambda^-1 part and lambda part separately as 1-forms.
            let mut cm = 0.0f64;
            for (a, b) in [(p.z[0], p.zbar[0]), (p.z[2], p.zbar[2])] {
                let phi_x = a + b;
                let phi_y = (a - b) * Complex64::i();
                cm = cm.max(max_abs(&commutator(&phi_x, &phi_y)));
            }
            DegeneracyReport {
                max_det: md,
                commutator: cm,
            }
        })
        .reduce(
            || DegeneracyReport {
                max_det: 0.0,
                commutator: 0.0,
            },
            |a, b| DegeneracyReport {
                max_det: a.max_det.max(b.max_det),
                commutator: a.commutator.max(b.commutator),
            },
        )
}

/// Largest `|A^+ J + J A|` over the real components `A_x = A_z + A_zbar`,
/// `A_y = i (A_z - A_zbar)` at `lambda`, `J = diag(1, -1)`.
pub fn su11_check(f: &LambdaConnectionFamily, lambda: Complex64) -> Result<f64, ConnectionError> {
    check_lambda(lambda)?;
    let j = gen_h();
    Ok(f
        .points()
        .par_iter()
        .map(|p| {
            let (az, azb) = p.eval(lambda);
            let ax = az + azb;
            let ay = (az - azb) * Complex64::i();
            let d = |a: &Mat2| max_abs(&(a.adjoint() * j + j * a));
            d(&ax).max(d(&ay))
        })
        .reduce(|| 0.0, f64::max))
}
