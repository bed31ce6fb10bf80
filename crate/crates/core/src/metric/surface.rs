use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{ops::quadrature_weight, Grid2D};

use super::sampler::{quad_form, MetricSampler, PotentialSource};
use super::{MetricError, Sym2};

/// First and second fundamental forms of the slice `l = 0` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub g: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
}

impl FundamentalForms {
    pub fn g(&self) -> Sym2 {
        Sym2::new(self.g[0][0], self.g[0][1], self.g[1][0], self.g[1][1])
    }
    pub fn b(&self) -> Sym2 {
        Sym2::new(self.b[0][0], self.b[0][1], self.b[1][0], self.b[1][1])
    }
    /// `g^ij b_ji`; zero for a minimal slice.
    pub fn mean_curvature_trace(&self) -> f64 {
        self.g().try_inverse().map(|gi| (gi * self.b()).trace()).unwrap_or(f64::NAN)
    }
}

fn block(m: &super::Mat3) -> Sym2 {
    Sym2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

fn to_arr(m: &Sym2) -> [[f64; 2]; 2] {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

/// `g = G|_{l=0}` on `(x, y)` and `b = d/dl G|_{l=0}` by a central difference
/// of step `hl`.
pub fn fundamental_forms(m: &dyn MetricSampler, x: f64, y: f64, hl: f64) -> Result<FundamentalForms, MetricError> {
    let g = block(&m.metric([x, y, 0.0])?);
    let b = (block(&m.metric([x, y, hl])?) - block(&m.metric([x, y, -hl])?)) / (2.0 * hl);
    Ok(FundamentalForms {
        g: to_arr(&g),
        b: to_arr(&b),
    })
}

/// `(x, y)` matrix of `t dz^2 + conj(t) dzbar^2`.
pub fn second_form_matrix(t: Complex64) -> Sym2 {
    let q = quad_form(t);
    Sym2::new(q[0][0], q[0][1], q[1][0], q[1][1])
}

/// Fundamental forms at every node of a grid.
#[derive(Clone, Debug)]
pub struct FormField {
    pub grid: Grid2D,
    pub g: Vec<Sym2>,
    pub b: Vec<Sym2>,
}

pub fn fundamental_forms_on(m: &dyn MetricSampler, grid: &Grid2D, hl: f64) -> Result<FormField, MetricError> {
    let mut g = Vec::with_capacity(grid.len());
    let mut b = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (x, y) = grid.coords(k);
        let f = fundamental_forms(m, x, y, hl)?;
        g.push(f.g());
        b.push(f.b());
    }
    Ok(FormField { grid: *grid, g, b })
}

/// `theta(dg, db) = int (g^ij db_ij + b^ij dg_ij) sqrt(det g) dx dy`, indices
/// raised with `g`.
pub fn boundary_one_form(forms: &FormField, dg: &[Sym2], db: &[Sym2]) -> Result<f64, MetricError> {
    let n = forms.grid.len();
    if dg.len() != n || db.len() != n || forms.g.len() != n || forms.b.len() != n {
        return Err(MetricError::InvalidInput("variation fields do not match the grid".into()));
    }
    let mut total = 0.0;
    for k in 0..n {
        let g = forms.g[k];
        let gi = g.try_inverse().ok_or_else(|| MetricError::Degenerate {
            at: vec![forms.grid.coords(k).0, forms.grid.coords(k).1],
            det: g.determinant(),
        })?;
        let b_up = gi * forms.b[k] * gi;
        let integrand = (gi * db[k]).trace() + (b_up * dg[k]).trace();
        total += integrand * g.determinant().abs().sqrt() * quadrature_weight(&forms.grid, k);
    }
    Ok(total)
}

/// `omega_12 = d_1 theta_2 - d_2 theta_1` for the pull-back of the boundary
/// one-form to a two-parameter family of forms, all derivatives by central
/// differences of step `h`.
pub fn symplectic_form(
    family: &dyn Fn(f64, f64) -> Result<FormField, MetricError>,
    s: (f64, f64),
    h: f64,
) -> Result<f64, MetricError> {
    let theta = |s1: f64, s2: f64, dir: usize| -> Result<f64, MetricError> {
        let base = family(s1, s2)?;
        let (p, m) = if dir == 0 {
            (family(s1 + h, s2)?, family(s1 - h, s2)?)
        } else {
            (family(s1, s2 + h)?, family(s1, s2 - h)?)
        };
        let dg: Vec<Sym2> = p.g.iter().zip(&m.g).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let db: Vec<Sym2> = p.b.iter().zip(&m.b).map(|(a, b)| (a - b) / (2.0 * h)).collect();
        boundary_one_form(&base, &dg, &db)
    };
    let d1_theta2 = (theta(s.0 + h, s.1, 1)? - theta(s.0 - h, s.1, 1)?) / (2.0 * h);
    let d2_theta1 = (theta(s.0, s.1 + h, 0)? - theta(s.0, s.1 - h, 0)?) / (2.0 * h);
    Ok(d1_theta2 - d2_theta1)
}

type Sampler2<'a> = dyn Fn(f64, f64) -> Result<Sym2, MetricError> + 'a;

/// Gaussian curvature of a 2-D metric `E dx^2 + 2F dx dy + G dy^2` by the
/// Brioschi formula, derivatives by central differences of step `h`.
pub fn gauss_curvature_2d(g2: &Sampler2<'_>, points: &[(f64, f64)], h: f64) -> Result<Vec<f64>, MetricError> {
    points
        .iter()
        .map(|&(x, y)| {
            let at = |dx: f64, dy: f64| g2(x + dx, y + dy);
            let c = at(0.0, 0.0)?;
            let (e, f, g) = (c[(0, 0)], c[(0, 1)], c[(1, 1)]);
            let det = e * g - f * f;
            if !(det.abs() > 1e-10 * (e * e + g * g + 2.0 * f * f)) {
                return Err(MetricError::Degenerate { at: vec![x, y], det });
            }
            let (xp, xm, yp, ym) = (at(h, 0.0)?, at(-h, 0.0)?, at(0.0, h)?, at(0.0, -h)?);
            let (pp, pm, mp, mm) = (at(h, h)?, at(h, -h)?, at(-h, h)?, at(-h, -h)?);
            let du = |a: usize, b: usize| (xp[(a, b)] - xm[(a, b)]) / (2.0 * h);
            let dv = |a: usize, b: usize| (yp[(a, b)] - ym[(a, b)]) / (2.0 * h);
            let duu = |a: usize, b: usize| (xp[(a, b)] - 2.0 * c[(a, b)] + xm[(a, b)]) / (h * h);
            let dvv = |a: usize, b: usize| (yp[(a, b)] - 2.0 * c[(a, b)] + ym[(a, b)]) / (h * h);
            let duv = |a: usize, b: usize| (pp[(a, b)] - pm[(a, b)] - mp[(a, b)] + mm[(a, b)]) / (4.0 * h * h);
            let (eu, ev, fu, fv, gu, gv) = (du(0, 0), dv(0, 0), du(0, 1), dv(0, 1), du(1, 1), dv(1, 1));
            let m1 = nalgebra::Matrix3::new(
                -0.5 * dvv(0, 0) + duv(0, 1) - 0.5 * duu(1, 1),
                0.5 * eu,
                fu - 0.5 * ev,
                fv - 0.5 * gu,
                e,
                f,
                0.5 * gv,
                f,
                g,
            );
            let m2 = nalgebra::Matrix3::new(0.0, 0.5 * ev, 0.5 * gu, 0.5 * ev, e, f, 0.5 * gu, f, g);
            Ok((m1.determinant() - m2.determinant()) / (det * det))
        })
        .collect()
}

/// `k [(rho + |t|^2/rho) |dz|^2 + t dz^2 + conj(t) dzbar^2]`, the surface
/// metric attached to a sinh-Gordon solution; degenerate where `rho = |t|`.
pub fn surface_metric<P: PotentialSource>(
    source: &P,
    scale: f64,
) -> impl Fn(f64, f64) -> Result<Sym2, MetricError> + '_ {
    move |x, y| {
        let rho = source.phi(x, y)?.exp();
        let t = source.t(x, y);
        let d = rho + t.norm_sqr() / rho;
        Ok((Sym2::identity() * d + second_form_matrix(t)) * scale)
    }
}
