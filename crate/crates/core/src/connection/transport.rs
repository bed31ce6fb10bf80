use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::mat2::{det, expm, identity, max_abs, Mat2};

use super::sampler::ConnectionSampler;
use super::ConnectionError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MonodromyOptions {
    /// Target for the estimated error of the returned product.
    pub tol: f64,
    /// Steps per unit length on the first pass.
    pub initial_density: f64,
    pub max_steps: usize,
}

impl Default for MonodromyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            initial_density: 64.0,
            max_steps: 1 << 22,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonodromyResult {
    pub matrix: Mat2,
    pub loop_vertices: Vec<(f64, f64)>,
    pub lambda: Complex64,
    pub steps: usize,
    /// Richardson estimate of the error of `matrix`.
    pub error: f64,
    pub det_defect: f64,
}

/// JSON form of a [`MonodromyResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    #[serde(rename = "loop")]
    pub loop_vertices: Vec<[f64; 2]>,
    pub lambda: [f64; 2],
    /// Row-major entries as `[re, im]`.
    pub matrix: [[f64; 2]; 4],
    pub det_defect: f64,
    pub steps: usize,
}

impl MonodromyResult {
    pub fn report(&self) -> MonodromyReport {
        let m = &self.matrix;
        let e = |r: usize, c: usize| [m[(r, c)].re, m[(r, c)].im];
        MonodromyReport {
            loop_vertices: self.loop_vertices.iter().map(|&(x, y)| [x, y]).collect(),
            lambda: [self.lambda.re, self.lambda.im],
            matrix: [e(0, 0), e(0, 1), e(1, 0), e(1, 1)],
            det_defect: self.det_defect,
            steps: self.steps,
        }
    }
}

/// Appends the first vertex unless the polyline already closes, possibly up
/// to a lattice translation of a torus chart.
fn closed(vertices: &[(f64, f64)], period: Option<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut v = vertices.to_vec();
    if let (Some(&a), Some(&b)) = (v.first(), v.last()) {
        let wraps = |d: f64, p: f64| {
            let r = d / p;
            (r - r.round()).abs() * p < 1e-12
        };
        let same = match period {
            Some((px, py)) => wraps(b.0 - a.0, px) && wraps(b.1 - a.1, py),
            None => a == b,
        };
        if !same {
            v.push(a);
        }
    }
    v
}

/// Midpoint product along a polyline with about `density` steps per unit
/// length. Factors are appended on the right, matching `dg = g A`.
fn midpoint_product(
    s: &dyn ConnectionSampler,
    lambda: Complex64,
    path: &[(f64, f64)],
    density: f64,
) -> Result<(Mat2, usize), ConnectionError> {
    let mut m = identity();
    let mut steps = 0;
    for w in path.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        let len = (x1 - x0).hypot(y1 - y0);
        if len == 0.0 {
            continue;
        }
        let n = ((len * density).ceil() as usize).max(1);
        let (dx, dy) = ((x1 - x0) / n as f64, (y1 - y0) / n as f64);
        for k in 0..n {
            let f = (k as f64 + 0.5) / n as f64;
            let p = s.coefficients(x0 + f * (x1 - x0), y0 + f * (y1 - y0))?;
            m *= expm(&p.along(lambda, dx, dy));
        }
        steps += n;
    }
    Ok((m, steps))
}

/// Holonomy of the family at `lambda` around a closed polyline (closed
/// automatically if the last vertex differs from the first, modulo the
/// periods of a torus chart).
///
/// The step density doubles until the Richardson estimate of the error of the
/// finest midpoint product drops below the tolerance; that product is
/// returned, so it stays in the group up to rounding.
pub fn monodromy_with(
    s: &dyn ConnectionSampler,
    lambda: Complex64,
    vertices: &[(f64, f64)],
    opts: &MonodromyOptions,
) -> Result<MonodromyResult, ConnectionError> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(ConnectionError::LambdaZero);
    }
    let path = closed(vertices, s.period());
    let total: f64 = path.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).sum();
    let finish = |matrix: Mat2, steps, error| MonodromyResult {
        det_defect: (det(&matrix) - 1.0).norm(),
        matrix,
        loop_vertices: vertices.to_vec(),
        lambda,
        steps,
        error,
    };
    if total == 0.0 {
        return Ok(finish(identity(), 0, 0.0));
    }
    let mut density = opts.initial_density.max(1.0 / total);
    let (mut prev, _) = midpoint_product(s, lambda, &path, density)?;
    loop {
        density *= 2.0;
        let (cur, steps) = midpoint_product(s, lambda, &path, density)?;
        let error = max_abs(&(cur - prev)) / 3.0;
        if error <= opts.tol {
            return Ok(finish(cur, steps, error));
        }
        if steps * 2 > opts.max_steps {
            return Err(ConnectionError::NoConvergence {
                tol: opts.tol,
                change: error,
                steps,
            });
        }
        prev = cur;
    }
}

pub fn monodromy(
    s: &dyn ConnectionSampler,
    lambda: Complex64,
    vertices: &[(f64, f64)],
) -> Result<MonodromyResult, ConnectionError> {
    monodromy_with(s, lambda, vertices, &MonodromyOptions::default())
}

fn rk4_step(
    s: &dyn ConnectionSampler,
    lambda: Complex64,
    g: &Mat2,
    p0: (f64, f64),
    d: (f64, f64),
    t: f64,
    h: f64,
) -> Result<Mat2, ConnectionError> {
    let a = |tt: f64| -> Result<Mat2, ConnectionError> {
        let c = s.coefficients(p0.0 + tt * d.0, p0.1 + tt * d.1)?;
        Ok(c.along(lambda, d.0, d.1))
    };
    let (a0, am, a1) = (a(t)?, a(t + 0.5 * h)?, a(t + h)?);
    let k1 = g * a0;
    let k2 = (g + k1 * Complex64::new(0.5 * h, 0.0)) * am;
    let k3 = (g + k2 * Complex64::new(0.5 * h, 0.0)) * am;
    let k4 = (g + k3 * Complex64::new(h, 0.0)) * a1;
    let two = Complex64::new(2.0, 0.0);
    Ok(g + (k1 + k2 * two + k3 * two + k4) * Complex64::new(h / 6.0, 0.0))
}

/// Solves `dg = g A(lambda)` along a polyline from `g = 1` at its first
/// vertex, with classical RK4 and step doubling for error control.
pub fn developing_map(
    s: &dyn ConnectionSampler,
    lambda: Complex64,
    path: &[(f64, f64)],
    tol: f64,
) -> Result<Mat2, ConnectionError> {
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(ConnectionError::LambdaZero);
    }
    let mut g = identity();
    let mut travelled = 0.0;
    for w in path.windows(2) {
        let d = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        if d.0 == 0.0 && d.1 == 0.0 {
            continue;
        }
        let len = d.0.hypot(d.1);
        // parameter runs over [0, 1] on each segment
        let mut t = 0.0;
        let mut h: f64 = (0.05 / len).min(1.0);
        while t < 1.0 {
            h = h.min(1.0 - t);
            let full = rk4_step(s, lambda, &g, w[0], d, t, h)?;
            let half = rk4_step(s, lambda, &g, w[0], d, t, 0.5 * h)?;
            let two = rk4_step(s, lambda, &half, w[0], d, t + 0.5 * h, 0.5 * h)?;
            let err = max_abs(&(two - full)) / 15.0;
            let scale = max_abs(&g).max(1.0);
            if err <= tol * scale {
                g = two + (two - full) / Complex64::new(15.0, 0.0);
                t += h;
            }
            let factor = if err > 0.0 {
                (0.9 * (tol * scale / err).powf(0.2)).clamp(0.2, 4.0)
            } else {
                4.0
            };
            h *= factor;
            if h * len < 1e-13 {
                return Err(ConnectionError::StepUnderflow { at: travelled + t * len });
            }
        }
        travelled += len;
    }
    Ok(g)
}
