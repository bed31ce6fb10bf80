use crate::ode::{integrate, OdeError, Tolerance};
use num_complex::Complex64;

use super::equation::EquationVariant;
use super::PdeError;

/// A `y`-independent solution `phi(x)` of
/// `phi'' = 8 (e^phi + s |t|^2 e^-phi)`, stored by its initial data and
/// evaluated by integrating from `x0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StripProfile {
    pub t: Complex64,
    pub variant: EquationVariant,
    pub x0: f64,
    pub phi0: f64,
    pub slope0: f64,
}

impl StripProfile {
    fn rhs(&self) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
        let s = self.variant.sign();
        let t2 = self.t.norm_sqr();
        move |_x, y| {
            let (e, ie) = (y[0].exp(), (-y[0]).exp());
            [y[1], 8.0 * (e + s * t2 * ie), y[3], 8.0 * (e - s * t2 * ie) * y[2]]
        }
    }

    fn tolerance() -> Tolerance {
        Tolerance {
            rtol: 1e-13,
            atol: 1e-13,
            ..Tolerance::default()
        }
    }

    fn run(&self, x: f64, slope: f64) -> Result<[f64; 4], OdeError> {
        integrate(self.rhs(), self.x0, [self.phi0, slope, 0.0, 1.0], x, Self::tolerance())
    }

    /// `(phi(x), phi'(x))`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64), PdeError> {
        let y = self.run(x, self.slope0).map_err(|e| PdeError::Shooting(e.to_string()))?;
        Ok((y[0], y[1]))
    }

    /// Solves the two-point problem `phi(x0) = a`, `phi(x1) = b` by Newton
    /// shooting on the initial slope, the sensitivity coming from the
    /// variational equation.
    pub fn solve(
        t: Complex64,
        variant: EquationVariant,
        x_range: (f64, f64),
        boundary: (f64, f64),
    ) -> Result<Self, PdeError> {
        let t2 = t.norm_sqr();
        if variant != EquationVariant::Liouville && !(t2 > 0.0) {
            return Err(PdeError::InvalidInput("strip oracle needs |t| > 0".into()));
        }
        let (x0, x1) = x_range;
        let len = x1 - x0;
        if !(len > 0.0) {
            return Err(PdeError::InvalidInput("empty x-range".into()));
        }
        let (a, b) = boundary;
        let s = variant.sign();
        let mut prof = StripProfile {
            t,
            variant,
            x0,
            phi0: a,
            slope0: 0.0,
        };
        let mid = 0.5 * (a + b);
        let curvature = 8.0 * (mid.exp() + s * t2 * (-mid).exp());
        let mut slope = (b - a) / len - 0.5 * curvature * len;
        let target = 1e-12 * b.abs().max(1.0);
        let mut miss = f64::INFINITY;
        for _ in 0..200 {
            let end = prof.run(x1, slope).map_err(|e| PdeError::Shooting(e.to_string()))?;
            miss = end[0] - b;
            if miss.abs() <= target {
                prof.slope0 = slope;
                return Ok(prof);
            }
            if !(end[2].abs() > 0.0) {
                return Err(PdeError::Shooting("vanishing sensitivity".into()));
            }
            let mut step = -miss / end[2];
            // halve steps that overshoot into blow-up or do not improve
            while step.abs() >= 1e-14 {
                match prof.run(x1, slope + step) {
                    Ok(e) if (e[0] - b).abs() < miss.abs() => break,
                    _ => step *= 0.5,
                }
            }
            slope += step;
        }
        Err(PdeError::Shooting(format!("endpoint mismatch {miss:e}")))
    }
}

/// Profile of the `y`-independent solution on `[x0, x1]` with
/// `phi(x0) = a`, `phi(x1) = b`, sampled at `resolution` equally spaced
/// points including both ends.
pub fn strip_ode_oracle(
    t_const: Complex64,
    v: EquationVariant,
    x_range: (f64, f64),
    boundary: (f64, f64),
    resolution: usize,
) -> Result<Vec<f64>, PdeError> {
    if resolution < 2 {
        return Err(PdeError::InvalidInput("resolution must be at least 2".into()));
    }
    let prof = StripProfile::solve(t_const, v, x_range, boundary)?;
    let (x0, x1) = x_range;
    let tol = StripProfile::tolerance();
    let mut out = Vec::with_capacity(resolution);
    let mut y = [prof.phi0, prof.slope0, 0.0, 1.0];
    let mut x = x0;
    out.push(prof.phi0);
    for k in 1..resolution {
        let xn = x0 + (x1 - x0) * k as f64 / (resolution - 1) as f64;
        y = integrate(prof.rhs(), x, y, xn, tol).map_err(|e| PdeError::Shooting(e.to_string()))?;
        x = xn;
        out.push(y[0]);
    }
    Ok(out)
}
