use serde::{Deserialize, Serialize};

use crate::field::{laplace_zzbar, ScalarField};

use super::TodaError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct CartanMatrix {
    entries: Vec<Vec<i64>>,
}

impl CartanMatrix {
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, TodaError> {
        let r = entries.len();
        if r == 0 || entries.iter().any(|row| row.len() != r) {
            return Err(TodaError::InvalidInput("cartan matrix must be square and nonempty".into()));
        }
        if (0..r).any(|i| entries[i][i] != 2) {
            return Err(TodaError::InvalidInput("cartan matrix needs 2 on the diagonal".into()));
        }
        Ok(Self { entries })
    }

    /// `[2]`: the Liouville case.
    pub fn a1() -> Self {
        Self { entries: vec![vec![2]] }
    }

    /// `[[2, -2], [-2, 2]]`: the affine case giving sinh-Gordon.
    pub fn affine_a1() -> Self {
        Self {
            entries: vec![vec![2, -2], vec![-2, 2]],
        }
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }
}

impl TryFrom<Vec<Vec<i64>>> for CartanMatrix {
    type Error = TodaError;
    fn try_from(v: Vec<Vec<i64>>) -> Result<Self, TodaError> {
        Self::new(v)
    }
}

impl From<CartanMatrix> for Vec<Vec<i64>> {
    fn from(c: CartanMatrix) -> Self {
        c.entries
    }
}

/// `r_a = d dbar phi_a - sum_b C_ab e^{phi_b}` for each field.
pub fn toda_residual(phis: &[ScalarField], c: &CartanMatrix) -> Result<Vec<ScalarField>, TodaError> {
    if phis.len() != c.rank() {
        return Err(TodaError::InvalidInput(format!(
            "{} fields for a rank {} cartan matrix",
            phis.len(),
            c.rank()
        )));
    }
    for p in phis {
        phis[0].ensure_same_grid(p)?;
    }
    let grid = *phis[0].grid();
    let exps: Vec<Vec<f64>> = phis.iter().map(|p| p.values().iter().map(|v| v.exp()).collect()).collect();
    phis.iter()
        .enumerate()
        .map(|(a, p)| {
            let lap = laplace_zzbar(p)?;
            let vals = (0..grid.len())
                .map(|k| {
                    let s: f64 = (0..c.rank()).map(|b| c.get(a, b) as f64 * exps[b][k]).sum();
                    lap.values()[k] - s
                })
                .collect();
            Ok(ScalarField::from_values(grid, vals)?)
        })
        .collect()
}
