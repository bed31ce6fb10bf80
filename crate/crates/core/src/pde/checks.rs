use serde::{Deserialize, Serialize};

use crate::field::{integrate, Grid2D, QuadraticDifferential, ScalarField};
use crate::linalg::conjugate_gradient;

use super::equation::{linearized_operator, EquationVariant};
use super::PdeError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Infeasible { reason: String },
    NotApplicable,
}

impl Feasibility {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, Feasibility::Infeasible { .. })
    }
}

/// A-priori solvability on a torus.
///
/// Integrating the equation over a closed surface kills the Laplacian, so the
/// integral of `e^phi + s |t|^2 e^-phi` must vanish. For cosh and Liouville the
/// integrand is positive, so no periodic solution exists. For sinh the two
/// terms must balance, which is impossible when `t` vanishes identically.
pub fn obstruction_check(
    t: &QuadraticDifferential,
    grid: &Grid2D,
    v: EquationVariant,
) -> Feasibility {
    if !grid.is_periodic() {
        return Feasibility::NotApplicable;
    }
    match v {
        EquationVariant::Cosh => Feasibility::Infeasible {
            reason: "on a closed surface the integral of 1/2 d dbar phi vanishes, but e^phi + |t|^2 e^-phi > 0".into(),
        },
        EquationVariant::Liouville => Feasibility::Infeasible {
            reason: "on a closed surface the integral of 1/2 d dbar phi vanishes, but e^phi > 0".into(),
        },
        EquationVariant::Sinh => {
            if t.is_zero() {
                Feasibility::Infeasible {
                    reason: "with t = 0 the equation reduces to Liouville, whose right side is positive".into(),
                }
            } else {
                Feasibility::Feasible
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum InequalityVerdict {
    Holds { min_margin: f64 },
    Fails { points: Vec<usize>, min_margin: f64 },
}

impl InequalityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, InequalityVerdict::Holds { .. })
    }
}

/// Checks `phi > ln|t|` pointwise (trivially true where `t = 0`).
pub fn inequality_check(
    phi: &ScalarField,
    t: &QuadraticDifferential,
) -> Result<InequalityVerdict, PdeError> {
    let tv = t.eval_on(phi.grid())?;
    let mut points = Vec::new();
    let mut min_margin = f64::INFINITY;
    for (k, (&p, c)) in phi.values().iter().zip(tv.values()).enumerate() {
        let a = c.norm();
        if a == 0.0 {
            continue;
        }
        let m = p - a.ln();
        min_margin = min_margin.min(m);
        if !(m > 0.0) {
            points.push(k);
        }
    }
    Ok(if points.is_empty() {
        InequalityVerdict::Holds { min_margin }
    } else {
        InequalityVerdict::Fails { points, min_margin }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    /// Smallest eigenvalue of minus the linearization.
    pub eigen_min: f64,
    pub isolated: bool,
    pub iterations: usize,
}

/// Smallest eigenvalue of `-J` by shifted inverse iteration; the solution is
/// isolated when it is strictly positive.
pub fn isolation_check(
    phi: &ScalarField,
    t: &QuadraticDifferential,
    v: EquationVariant,
) -> Result<IsolationReport, PdeError> {
    let op = linearized_operator(phi, t, v)?;
    let mask = op.unknown_mask().to_vec();
    let n = mask.len();
    let cmin = op
        .coefficient()
        .iter()
        .zip(&mask)
        .filter(|(_, &u)| u)
        .map(|(&c, _)| c)
        .fold(f64::INFINITY, f64::min);
    let shift = (-cmin).max(0.0) + 1.0;
    let diag = op.negated_diagonal(shift);
    let norm = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt();

    let mut x: Vec<f64> = mask.iter().map(|&u| if u { 1.0 } else { 0.0 }).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|a| *a /= nx);
    let mut ax = vec![0.0; n];
    let mut mu_prev = f64::NAN;
    let mut mu = f64::NAN;
    let max_iter = 500;
    for it in 1..=max_iter {
        let mut w = x.clone();
        conjugate_gradient(
            |p, out| op.apply_negated_shifted(p, out, shift),
            &diag,
            &x,
            &mut w,
            1e-13,
            1e-300,
            20 * n,
        )
        .map_err(|e| PdeError::SingularJacobian(e.to_string()))?;
        let nw = norm(&w);
        if !(nw > 0.0) || !nw.is_finite() {
            return Err(PdeError::SingularJacobian("inverse iteration collapsed".into()));
        }
        x = w.into_iter().map(|a| a / nw).collect();
        op.apply_negated_shifted(&x, &mut ax, shift);
        mu = x.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>();
        if (mu - mu_prev).abs() <= 1e-13 * mu.abs().max(1.0) {
            let eigen_min = mu - shift;
            return Ok(IsolationReport {
                eigen_min,
                isolated: eigen_min > 0.0,
                iterations: it,
            });
        }
        mu_prev = mu;
    }
    let eigen_min = mu - shift;
    Ok(IsolationReport {
        eigen_min,
        isolated: eigen_min > 0.0,
        iterations: max_iter,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GaussBonnet {
    Satisfiable { margin: f64 },
    Violated { margin: f64 },
}

impl GaussBonnet {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, GaussBonnet::Satisfiable { .. })
    }
}

/// Necessary condition `-pi chi >= int |t|` for a cosh metric on a closed
/// surface of Euler characteristic `chi`, with `int |t|` over the grid.
pub fn gauss_bonnet_bound(
    chi: i32,
    t: &QuadraticDifferential,
    grid: &Grid2D,
) -> Result<GaussBonnet, PdeError> {
    let abs_t = t.eval_on(grid)?.map(|c| c.norm());
    Ok(gauss_bonnet_verdict(chi, integrate(&abs_t, None)))
}

/// Same comparison given `int |t|` directly.
pub fn gauss_bonnet_verdict(chi: i32, integral_abs_t: f64) -> GaussBonnet {
    let lhs = -std::f64::consts::PI * chi as f64;
    let margin = lhs - integral_abs_t;
    if margin >= -1e-12 * lhs.abs().max(integral_abs_t).max(1.0) {
        GaussBonnet::Satisfiable { margin }
    } else {
        GaussBonnet::Violated { margin }
    }
}
