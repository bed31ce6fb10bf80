use serde::{Deserialize, Serialize};

use crate::field::{QuadraticDifferential, ScalarField};
use crate::linalg::{conjugate_gradient, CgError};

use super::checks::{inequality_check, isolation_check, obstruction_check, Feasibility};
use super::equation::{linearized_with, residual_with, EquationVariant};
use super::PdeError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Target for the sup-norm of the residual over the unknowns.
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest step fraction tried by the backtracking line search.
    pub damping_floor: f64,
    /// Also compute the lowest eigenvalue of the negated linearization.
    pub compute_eigen: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            damping_floor: 1e-4,
            compute_eigen: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    NoConvergence,
    Obstruction,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub phi: ScalarField,
    pub status: SolveStatus,
    pub residual_sup: f64,
    pub iterations: usize,
    pub obstruction: bool,
    pub inequality_ok: bool,
    pub eigen_min: Option<f64>,
    /// Residual sup-norm before each step and after the last one.
    pub history: Vec<f64>,
}

/// The JSON face of a [`SolveReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub status: SolveStatus,
    pub iterations: usize,
    pub residual_sup: f64,
    pub eigen_min: Option<f64>,
    pub inequality_ok: bool,
    pub obstruction: bool,
}

impl SolveReport {
    pub fn summary(&self) -> SolveSummary {
        SolveSummary {
            status: self.status,
            iterations: self.iterations,
            residual_sup: self.residual_sup,
            eigen_min: self.eigen_min,
            inequality_ok: self.inequality_ok,
            obstruction: self.obstruction,
        }
    }
}

fn sup_over(r: &ScalarField, mask: &[bool]) -> f64 {
    r.values()
        .iter()
        .zip(mask)
        .filter(|(_, &u)| u)
        .map(|(v, _)| v.abs())
        .fold(0.0, f64::max)
}

/// Damped Newton iteration for the residual of `v`, holding the boundary
/// ring of a Dirichlet `phi0` fixed.
///
/// Linear systems `-J delta = r` are solved by preconditioned conjugate
/// gradients with a forcing term proportional to the current residual, and
/// each step is halved until the sup-norm of the residual decreases.
pub fn newton_solve(
    phi0: &ScalarField,
    t: &QuadraticDifferential,
    v: EquationVariant,
    opts: &NewtonOptions,
) -> Result<SolveReport, PdeError> {
    phi0.ensure_closed()?;
    if let Some(k) = phi0.values().iter().position(|p| !p.is_finite()) {
        return Err(PdeError::Domain { index: k });
    }
    let grid = *phi0.grid();
    if let Feasibility::Infeasible { reason } = obstruction_check(t, &grid, v) {
        return Err(PdeError::Obstruction(reason));
    }
    let t2 = v.t_abs2(t, &grid)?;
    let s = v.sign();
    let mask: Vec<bool> = (0..grid.len()).map(|k| !grid.is_boundary(k)).collect();
    let n = grid.len();

    let mut phi = phi0.clone();
    let mut r = residual_with(&phi, &t2, s)?;
    let mut norm = sup_over(&r, &mask);
    let mut history = vec![norm];
    let mut iterations = 0;
    while norm > opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let op = linearized_with(&phi, &t2, s);
        let diag = op.negated_diagonal(0.0);
        let rhs: Vec<f64> = r
            .values()
            .iter()
            .zip(&mask)
            .map(|(&x, &u)| if u { x } else { 0.0 })
            .collect();
        let mut delta = vec![0.0; n];
        let forcing = (0.1 * norm).clamp(1e-13, 1e-2);
        conjugate_gradient(
            |x, y| op.apply_negated_shifted(x, y, 0.0),
            &diag,
            &rhs,
            &mut delta,
            forcing,
            1e-3 * opts.tol,
            10 * n + 100,
        )
        .map_err(|e| match e {
            CgError::Breakdown(_) => PdeError::SingularJacobian(e.to_string()),
            CgError::NoConvergence { .. } => PdeError::SingularJacobian(e.to_string()),
        })?;

        let mut alpha = 1.0;
        loop {
            let mut trial = phi.clone();
            for ((p, d), &u) in trial.values_mut().iter_mut().zip(&delta).zip(&mask) {
                if u {
                    *p += alpha * d;
                }
            }
            let finite = trial.values().iter().all(|p| p.is_finite());
            let tr = if finite { residual_with(&trial, &t2, s).ok() } else { None };
            let tn = tr.as_ref().map(|f| sup_over(f, &mask)).unwrap_or(f64::INFINITY);
            let accept = tn.is_finite() && tn <= (1.0 - 1e-4 * alpha) * norm;
            if accept || alpha * 0.5 < opts.damping_floor {
                if let (Some(tr), true) = (tr, tn.is_finite()) {
                    phi = trial;
                    r = tr;
                    norm = tn;
                }
                break;
            }
            alpha *= 0.5;
        }
        history.push(norm);
    }

    if norm > opts.tol || !norm.is_finite() {
        return Err(PdeError::NoConvergence {
            iterations,
            residual: norm,
        });
    }
    let inequality_ok = inequality_check(&phi, t)?.holds();
    let eigen_min = if opts.compute_eigen {
        Some(isolation_check(&phi, t, v)?.eigen_min)
    } else {
        None
    };
    Ok(SolveReport {
        phi,
        status: SolveStatus::Converged,
        residual_sup: norm,
        iterations,
        obstruction: false,
        inequality_ok,
        eigen_min,
        history,
    })
}
