use serde::{Deserialize, Serialize};

use super::sampler::{MetricSampler, Provenance};
use super::{Mat3, MetricError};

/// Central differences with step `h`, refined `levels - 1` times by halving
/// and combined by Richardson extrapolation (errors even in `h`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeScheme {
    pub h: f64,
    pub levels: usize,
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        Self { h: 1e-3, levels: 3 }
    }
}

/// One line of a curvature probe report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProbe {
    pub point: [f64; 3],
    pub provenance: Provenance,
    pub defect: f64,
    pub richardson_levels: usize,
}

type Jet = (Mat3, [Mat3; 3], [[Mat3; 3]; 3]);

fn shifted(p: [f64; 3], moves: &[(usize, f64)]) -> [f64; 3] {
    let mut q = p;
    for &(i, d) in moves {
        q[i] += d;
    }
    q
}

fn raw_jet(m: &dyn MetricSampler, p: [f64; 3], h: f64) -> Result<Jet, MetricError> {
    let g = m.metric(p)?;
    let mut d1 = [Mat3::zeros(); 3];
    let mut d2 = [[Mat3::zeros(); 3]; 3];
    let mut plus = [Mat3::zeros(); 3];
    let mut minus = [Mat3::zeros(); 3];
    for i in 0..3 {
        plus[i] = m.metric(shifted(p, &[(i, h)]))?;
        minus[i] = m.metric(shifted(p, &[(i, -h)]))?;
        d1[i] = (plus[i] - minus[i]) / (2.0 * h);
        d2[i][i] = (plus[i] - g * 2.0 + minus[i]) / (h * h);
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let pp = m.metric(shifted(p, &[(i, h), (j, h)]))?;
            let pm = m.metric(shifted(p, &[(i, h), (j, -h)]))?;
            let mp = m.metric(shifted(p, &[(i, -h), (j, h)]))?;
            let mm = m.metric(shifted(p, &[(i, -h), (j, -h)]))?;
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            d2[i][j] = v;
            d2[j][i] = v;
        }
    }
    Ok((g, d1, d2))
}

fn combine(a: &Jet, b: &Jet, factor: f64) -> Jet {
    // (factor * fine - coarse) / (factor - 1)
    let c = |f: &Mat3, cc: &Mat3| (f * factor - cc) / (factor - 1.0);
    let mut d1 = [Mat3::zeros(); 3];
    let mut d2 = [[Mat3::zeros(); 3]; 3];
    for i in 0..3 {
        d1[i] = c(&b.1[i], &a.1[i]);
        for j in 0..3 {
            d2[i][j] = c(&b.2[i][j], &a.2[i][j]);
        }
    }
    (b.0, d1, d2)
}

/// Metric with first and second partials at `p`.
pub(crate) fn metric_jet(
    m: &dyn MetricSampler,
    p: [f64; 3],
    scheme: DerivativeScheme,
) -> Result<Jet, MetricError> {
    let levels = scheme.levels.max(1);
    let mut table: Vec<Jet> = (0..levels)
        .map(|k| raw_jet(m, p, scheme.h / f64::powi(2.0, k as i32)))
        .collect::<Result<_, _>>()?;
    let mut factor = 4.0;
    while table.len() > 1 {
        table = table.windows(2).map(|w| combine(&w[0], &w[1], factor)).collect();
        factor *= 4.0;
    }
    Ok(table.pop().unwrap())
}

fn inverse_checked(g: &Mat3, p: [f64; 3]) -> Result<Mat3, MetricError> {
    let d = g.determinant();
    let scale = g.abs().max().powi(3).max(f64::MIN_POSITIVE);
    if !(d.abs() > 1e-12 * scale) {
        return Err(MetricError::Degenerate { at: p.to_vec(), det: d });
    }
    g.try_inverse().ok_or(MetricError::Degenerate { at: p.to_vec(), det: d })
}

/// Christoffel symbols `gamma[n][k][l] = Gamma^n_{kl}`.
fn christoffel(g_inv: &Mat3, d1: &[Mat3; 3]) -> [[[f64; 3]; 3]; 3] {
    let mut out = [[[0.0; 3]; 3]; 3];
    for n in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let mut s = 0.0;
                for r in 0..3 {
                    s += g_inv[(n, r)] * (d1[l][(r, k)] + d1[k][(r, l)] - d1[r][(k, l)]);
                }
                out[n][k][l] = 0.5 * s;
            }
        }
    }
    out
}

/// Largest `|R_iklm - kappa (g_il g_km - g_im g_kl)|` at `p`, with
/// `R_iklm = 1/2 (g_im,kl + g_kl,im - g_il,km - g_km,il)
///           + g_np (Gamma^n_kl Gamma^p_im - Gamma^n_km Gamma^p_il)`,
/// for which the round sphere has `kappa = +1`.
pub fn curvature_identity_defect_with(
    m: &dyn MetricSampler,
    p: [f64; 3],
    kappa: f64,
    scheme: DerivativeScheme,
) -> Result<CurvatureProbe, MetricError> {
    let (g, d1, d2) = metric_jet(m, p, scheme)?;
    let g_inv = inverse_checked(&g, p)?;
    let gam = christoffel(&g_inv, &d1);
    let dd = |a: usize, b: usize, c: usize, d: usize| d2[c][d][(a, b)];
    let mut defect = 0.0f64;
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                for mm in 0..3 {
                    let mut r = 0.5 * (dd(i, mm, k, l) + dd(k, l, i, mm) - dd(i, l, k, mm) - dd(k, mm, i, l));
                    for n in 0..3 {
                        for q in 0..3 {
                            r += g[(n, q)] * (gam[n][k][l] * gam[q][i][mm] - gam[n][k][mm] * gam[q][i][l]);
                        }
                    }
                    let model = kappa * (g[(i, l)] * g[(k, mm)] - g[(i, mm)] * g[(k, l)]);
                    defect = defect.max((r - model).abs());
                }
            }
        }
    }
    Ok(CurvatureProbe {
        point: p,
        provenance: m.provenance(),
        defect,
        richardson_levels: scheme.levels.max(1),
    })
}

/// [`curvature_identity_defect_with`] for `kappa = -1`, three Richardson levels
/// starting at step `h`.
pub fn curvature_identity_defect(m: &dyn MetricSampler, p: [f64; 3], h: f64) -> Result<f64, MetricError> {
    Ok(curvature_identity_defect_with(m, p, -1.0, DerivativeScheme { h, levels: 3 })?.defect)
}

/// Largest `|Gamma^k_ll|` along the normal lines `l -> (x0, y0, l)`; these
/// are geodesics exactly when it vanishes.
pub fn geodesic_defect(
    m: &dyn MetricSampler,
    z0: (f64, f64),
    l_samples: &[f64],
    scheme: DerivativeScheme,
) -> Result<f64, MetricError> {
    let mut worst = 0.0f64;
    for &l in l_samples {
        let p = [z0.0, z0.1, l];
        let (g, d1, _) = metric_jet(m, p, scheme)?;
        let g_inv = inverse_checked(&g, p)?;
        let gam = christoffel(&g_inv, &d1);
        for row in &gam {
            worst = worst.max(row[2][2].abs());
        }
    }
    Ok(worst)
}

/// Calibration of the `(x, y)` scale: the raw Gaussian curvature of
/// `e^phi |dz|^2` for `phi = -2 ln(1 - |z|^2)` (an exact solution with `t = 0`)
/// at the given points. Returns `(scale, spread)` where `scale = -mean K` and
/// `spread` is the largest deviation from the mean.
pub fn calibrate_scale(points: &[(f64, f64)], h: f64) -> Result<(f64, f64), MetricError> {
    let g2 = |x: f64, y: f64| -> Result<super::Sym2, MetricError> {
        let rho = (1.0 - x * x - y * y).powi(-2);
        Ok(super::Sym2::new(rho, 0.0, 0.0, rho))
    };
    let k = super::surface::gauss_curvature_2d(&g2, points, h)?;
    let mean = k.iter().sum::<f64>() / k.len() as f64;
    let spread = k.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    Ok((-mean, spread))
}
