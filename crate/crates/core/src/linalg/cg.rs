//! Jacobi-preconditioned conjugate gradients for symmetric positive definite
//! operators given matrix-free.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CgError {
    #[error("operator is not positive definite along a search direction (p.Ap = {0})")]
    Breakdown(f64),
    #[error("conjugate gradients stalled after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve `A x = b` starting from the contents of `x`.
///
/// Stops when `||b - A x||_2 <= tol * ||b||_2` or `||b - A x||_2 <= abs_tol`.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64], &mut [f64]),
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome, CgError> {
    let n = b.len();
    let mut ap = vec![0.0; n];
    apply(x, &mut ap);
    let mut r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
    let precond = |r: &[f64], z: &mut [f64]| {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(diag) {
            *zi = if *di != 0.0 { ri / di } else { *ri };
        }
    };
    let bnorm = dot(b, b).sqrt();
    let target = (tol * bnorm).max(abs_tol);
    let mut rnorm = dot(&r, &r).sqrt();
    if rnorm <= target {
        return Ok(CgOutcome {
            iterations: 0,
            residual: rnorm,
        });
    }
    let mut z = vec![0.0; n];
    precond(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(CgError::Breakdown(pap));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rnorm = dot(&r, &r).sqrt();
        if rnorm <= target {
            return Ok(CgOutcome {
                iterations: it,
                residual: rnorm,
            });
        }
        precond(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(CgError::NoConvergence {
        iterations: max_iter,
        residual: rnorm,
    })
}
