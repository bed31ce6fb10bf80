use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{d_z, Grid2D, QuadraticDifferential, ScalarField};
use crate::linalg::mat2::{mat2, zero, Mat2};

use super::ConnectionError;

/// Which family a set of Laurent coefficients belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyTag {
    /// Pseudo-unitary family over a cosh-Gordon solution.
    Cosh,
    /// First sinh-Gordon family; `su(1,1)` valued at `lambda = 1`.
    Sg1,
    /// Second sinh-Gordon family, the first one at `-lambda`.
    Sg2,
    /// Hand-assembled coefficients.
    Custom,
}

impl FamilyTag {
    /// Anti-holomorphic involution of the spectral plane under which the
    /// family is real: `lambda -> -1/conj(lambda)` for cosh, `1/conj(lambda)`
    /// for the sinh families.
    pub fn involution(self, lambda: Complex64) -> Complex64 {
        let inv = 1.0 / lambda.conj();
        match self {
            FamilyTag::Sg1 | FamilyTag::Sg2 => inv,
            FamilyTag::Cosh | FamilyTag::Custom => -inv,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Cosh => "cosh",
            FamilyTag::Sg1 => "sg1",
            FamilyTag::Sg2 => "sg2",
            FamilyTag::Custom => "custom",
        }
    }
}

/// Laurent coefficients at one point: `A_z(lambda) = sum_k z[k+1] lambda^k`
/// and likewise for `A_zbar`, `k = -1, 0, 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaurentPoint {
    pub z: [Mat2; 3],
    pub zbar: [Mat2; 3],
}

impl Default for LaurentPoint {
    fn default() -> Self {
        Self {
            z: [zero(); 3],
            zbar: [zero(); 3],
        }
    }
}

impl LaurentPoint {
    /// `(A_z(lambda), A_zbar(lambda))`.
    pub fn eval(&self, lambda: Complex64) -> (Mat2, Mat2) {
        let li = 1.0 / lambda;
        let ev = |c: &[Mat2; 3]| c[0] * li + c[1] + c[2] * lambda;
        (ev(&self.z), ev(&self.zbar))
    }

    /// Connection applied to a real tangent vector `(dx, dy)`.
    pub fn along(&self, lambda: Complex64, dx: f64, dy: f64) -> Mat2 {
        let (az, azb) = self.eval(lambda);
        let dz = Complex64::new(dx, dy);
        az * dz + azb * dz.conj()
    }
}

/// Coefficients from possibly complexified data: `phi`, `d phi`, `dbar phi`
/// and the values of `t` and of its conjugate partner.
pub fn local_coefficients(
    tag: FamilyTag,
    phi: Complex64,
    d_phi: Complex64,
    dbar_phi: Complex64,
    t: Complex64,
    t_bar: Complex64,
) -> LaurentPoint {
    let o = Complex64::new(0.0, 0.0);
    let ep = (phi * 0.5).exp();
    let em = (-phi * 0.5).exp();
    let q = d_phi * 0.25;
    let qb = dbar_phi * 0.25;
    let i = Complex64::i();
    let (up, low) = match tag {
        FamilyTag::Cosh | FamilyTag::Custom => (t * em, -t_bar * em),
        FamilyTag::Sg1 => (-i * t * em, i * t_bar * em),
        FamilyTag::Sg2 => (i * t * em, -i * t_bar * em),
    };
    LaurentPoint {
        z: [zero(), mat2(-q, o, ep, q), mat2(o, up, o, o)],
        zbar: [mat2(o, o, low, o), mat2(qb, ep, o, -qb), zero()],
    }
}

/// Coefficients for real `phi` with complex gradient `d phi`.
pub fn local_coefficients_real(tag: FamilyTag, phi: f64, d_phi: Complex64, t: Complex64) -> LaurentPoint {
    local_coefficients(tag, Complex64::new(phi, 0.0), d_phi, d_phi.conj(), t, t.conj())
}

#[derive(Clone, Debug)]
pub struct LambdaConnectionFamily {
    grid: Grid2D,
    tag: FamilyTag,
    points: Vec<LaurentPoint>,
    source: Option<(ScalarField, QuadraticDifferential)>,
}

impl LambdaConnectionFamily {
    pub fn from_points(grid: Grid2D, tag: FamilyTag, points: Vec<LaurentPoint>) -> Result<Self, ConnectionError> {
        if points.len() != grid.len() {
            return Err(crate::field::FieldError::LengthMismatch {
                expected: grid.len(),
                got: points.len(),
            }
            .into());
        }
        Ok(Self {
            grid,
            tag,
            points,
            source: None,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn points(&self) -> &[LaurentPoint] {
        &self.points
    }

    /// The `(phi, t)` the family was built from, if any.
    pub fn source(&self) -> Option<(&ScalarField, &QuadraticDifferential)> {
        self.source.as_ref().map(|(p, t)| (p, t))
    }

    /// `(A_z(lambda), A_zbar(lambda))` at every grid point.
    pub fn eval(&self, lambda: Complex64) -> Result<Vec<(Mat2, Mat2)>, ConnectionError> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(ConnectionError::LambdaZero);
        }
        Ok(self.points.par_iter().map(|p| p.eval(lambda)).collect())
    }
}

/// Builds the family over `(phi, t)`; `d phi` comes from the grid stencils
/// unless `gradient` supplies it.
pub fn build_family(
    phi: &ScalarField,
    t: &QuadraticDifferential,
    tag: FamilyTag,
    gradient: Option<&crate::field::ComplexField>,
) -> Result<LambdaConnectionFamily, ConnectionError> {
    let grid = *phi.grid();
    let tv = t.eval_on(&grid)?;
    let owned;
    let dphi = match gradient {
        Some(g) => {
            phi.ensure_same_grid(g)?;
            g
        }
        None => {
            owned = d_z(phi)?;
            &owned
        }
    };
    let points = (0..grid.len())
        .into_par_iter()
        .map(|k| local_coefficients_real(tag, phi.values()[k], dphi.values()[k], tv.values()[k]))
        .collect();
    Ok(LambdaConnectionFamily {
        grid,
        tag,
        points,
        source: Some((phi.clone(), t.clone())),
    })
}
