use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{laplace_zzbar, Grid2D, QuadraticDifferential, ScalarField};

use super::PdeError;

/// Which member of the family `1/2 d dbar phi = e^phi + s |t|^2 e^-phi` to solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationVariant {
    #[serde(alias = "cosh-gordon", alias = "coshgordon")]
    Cosh,
    #[serde(alias = "sinh-gordon", alias = "sinhgordon")]
    Sinh,
    Liouville,
}

impl EquationVariant {
    /// Sign `s` in front of the `|t|^2 e^-phi` term.
    pub fn sign(self) -> f64 {
        match self {
            EquationVariant::Cosh => 1.0,
            EquationVariant::Sinh => -1.0,
            EquationVariant::Liouville => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EquationVariant::Cosh => "cosh",
            EquationVariant::Sinh => "sinh",
            EquationVariant::Liouville => "liouville",
        }
    }

    /// `|t|^2` at each grid point (identically zero for Liouville).
    pub(crate) fn t_abs2(self, t: &QuadraticDifferential, grid: &Grid2D) -> Result<Vec<f64>, PdeError> {
        if self == EquationVariant::Liouville {
            return Ok(vec![0.0; grid.len()]);
        }
        let tv = t.eval_on(grid)?;
        Ok(tv.values().iter().map(|c| c.norm_sqr()).collect())
    }
}

fn check_finite(phi: &ScalarField) -> Result<(), PdeError> {
    match phi.values().iter().position(|v| !v.is_finite()) {
        Some(k) => Err(PdeError::Domain { index: k }),
        None => Ok(()),
    }
}

/// Pointwise `1/2 d dbar phi - e^phi - s |t|^2 e^-phi`.
pub fn residual(
    phi: &ScalarField,
    t: &QuadraticDifferential,
    v: EquationVariant,
) -> Result<ScalarField, PdeError> {
    check_finite(phi)?;
    let t2 = v.t_abs2(t, phi.grid())?;
    residual_with(phi, &t2, v.sign())
}

pub(crate) fn residual_with(phi: &ScalarField, t2: &[f64], s: f64) -> Result<ScalarField, PdeError> {
    let lap = laplace_zzbar(phi)?;
    let vals = lap
        .values()
        .par_iter()
        .zip(phi.values().par_iter())
        .zip(t2.par_iter())
        .map(|((&l, &p), &tt)| 0.5 * l - p.exp() - s * tt * (-p).exp())
        .collect();
    Ok(ScalarField::from_values(*phi.grid(), vals)?)
}

/// Frechet derivative of [`residual`] at `phi`:
/// `J d = 1/2 d dbar d - (e^phi - s |t|^2 e^-phi) d`, acting on the unknowns
/// (every point of a torus, interior points of a Dirichlet grid).
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    grid: Grid2D,
    coeff: Vec<f64>,
    unknown: Vec<bool>,
}

impl LinearizedOperator {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    /// Zeroth-order coefficient `e^phi - s |t|^2 e^-phi`.
    pub fn coefficient(&self) -> &[f64] {
        &self.coeff
    }

    pub fn is_unknown(&self, k: usize) -> bool {
        self.unknown[k]
    }

    pub fn unknown_mask(&self) -> &[bool] {
        &self.unknown
    }

    fn stencil_weights(&self) -> (f64, f64) {
        (
            0.125 / (self.grid.hx() * self.grid.hx()),
            0.125 / (self.grid.hy() * self.grid.hy()),
        )
    }

    /// `y = (-J + shift) x` on unknowns; zero elsewhere. Entries of `x` off the
    /// unknown set are treated as zero.
    pub fn apply_negated_shifted(&self, x: &[f64], y: &mut [f64], shift: f64) {
        let g = self.grid;
        let (wx, wy) = self.stencil_weights();
        let (nx, ny) = (g.nx() as isize, g.ny() as isize);
        let unknown = &self.unknown;
        let at = |i: isize, j: isize| -> f64 {
            let ii = i.rem_euclid(nx) as usize;
            let jj = j.rem_euclid(ny) as usize;
            let k = g.idx(ii, jj);
            if unknown[k] {
                x[k]
            } else {
                0.0
            }
        };
        y.par_iter_mut().enumerate().for_each(|(k, out)| {
            if !unknown[k] {
                *out = 0.0;
                return;
            }
            let (i, j) = g.ij(k);
            let (i, j) = (i as isize, j as isize);
            let c = x[k];
            let lap = wx * (at(i + 1, j) + at(i - 1, j) - 2.0 * c)
                + wy * (at(i, j + 1) + at(i, j - 1) - 2.0 * c);
            *out = -lap + (self.coeff[k] + shift) * c;
        });
    }

    /// `y = J x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_negated_shifted(x, y, 0.0);
        y.iter_mut().for_each(|v| *v = -*v);
    }

    /// Diagonal of `-J + shift` (Jacobi preconditioner).
    pub fn negated_diagonal(&self, shift: f64) -> Vec<f64> {
        let (wx, wy) = self.stencil_weights();
        self.coeff
            .iter()
            .zip(&self.unknown)
            .map(|(&c, &u)| if u { 2.0 * (wx + wy) + c + shift } else { 1.0 })
            .collect()
    }

    /// Dense matrix of `J` over the unknowns (small grids only).
    pub fn to_dense(&self) -> (Vec<usize>, Vec<Vec<f64>>) {
        let idx: Vec<usize> = (0..self.grid.len()).filter(|&k| self.unknown[k]).collect();
        let n = self.grid.len();
        let mut cols = Vec::with_capacity(idx.len());
        let mut e = vec![0.0; n];
        let mut y = vec![0.0; n];
        for &k in &idx {
            e[k] = 1.0;
            self.apply(&e, &mut y);
            e[k] = 0.0;
            cols.push(idx.iter().map(|&r| y[r]).collect::<Vec<_>>());
        }
        // cols[c][r] -> rows
        let m = idx.len();
        let dense = (0..m).map(|r| (0..m).map(|c| cols[c][r]).collect()).collect();
        (idx, dense)
    }
}

pub fn linearized_operator(
    phi: &ScalarField,
    t: &QuadraticDifferential,
    v: EquationVariant,
) -> Result<LinearizedOperator, PdeError> {
    check_finite(phi)?;
    let t2 = v.t_abs2(t, phi.grid())?;
    Ok(linearized_with(phi, &t2, v.sign()))
}

pub(crate) fn linearized_with(phi: &ScalarField, t2: &[f64], s: f64) -> LinearizedOperator {
    let grid = *phi.grid();
    let coeff = phi
        .values()
        .iter()
        .zip(t2)
        .map(|(&p, &tt)| p.exp() - s * tt * (-p).exp())
        .collect();
    LinearizedOperator {
        grid,
        coeff,
        unknown: (0..grid.len()).map(|k| !grid.is_boundary(k)).collect(),
    }
}

/// Default starting point `ln max(|t|, 0.1)` on the unknowns; the boundary
/// ring of a Dirichlet grid comes from `boundary`.
pub fn default_initial_guess(
    grid: &Grid2D,
    t: &QuadraticDifferential,
    boundary: Option<&dyn Fn(f64, f64) -> f64>,
) -> Result<ScalarField, PdeError> {
    t.check_admissible(grid)?;
    let interior: Vec<f64> = grid
        .interior_indices()
        .into_iter()
        .map(|k| t.at(grid.z(k)).norm().max(0.1).ln())
        .collect();
    let f = ScalarField::interior_only(*grid, interior)?;
    Ok(match boundary {
        Some(b) => f.with_boundary(b),
        None => f,
    })
}
