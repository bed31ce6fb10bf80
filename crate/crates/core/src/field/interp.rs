use super::{Field, FieldError, FieldValue, Grid2D};

/// Cubic Lagrange weights (value, first derivative) for nodes 0..4 at offset `s`.
fn lagrange4(s: f64) -> ([f64; 4], [f64; 4]) {
    let nodes = [0.0, 1.0, 2.0, 3.0];
    let mut w = [0.0; 4];
    let mut dw = [0.0; 4];
    for a in 0..4 {
        let mut denom = 1.0;
        for b in 0..4 {
            if b != a {
                denom *= nodes[a] - nodes[b];
            }
        }
        let mut prod = 1.0;
        for b in 0..4 {
            if b != a {
                prod *= s - nodes[b];
            }
        }
        w[a] = prod / denom;
        let mut dsum = 0.0;
        for c in 0..4 {
            if c == a {
                continue;
            }
            let mut p = 1.0;
            for b in 0..4 {
                if b != a && b != c {
                    p *= s - nodes[b];
                }
            }
            dsum += p;
        }
        dw[a] = dsum / denom;
    }
    (w, dw)
}

/// Locate the 4-point stencil along one axis; returns indices and the offset
/// of `pos` (in grid units) relative to the first stencil node.
fn stencil(pos: f64, n: usize, periodic: bool) -> ([usize; 4], f64) {
    let cell = pos.floor();
    if periodic {
        let base = cell as i64 - 1;
        let idx = std::array::from_fn(|a| (base + a as i64).rem_euclid(n as i64) as usize);
        (idx, pos - base as f64)
    } else {
        let base = (cell as i64 - 1).clamp(0, n as i64 - 4) as usize;
        (std::array::from_fn(|a| base + a), pos - base as f64)
    }
}

/// Bicubic (4x4 tensor Lagrange) interpolation of a field at an arbitrary
/// chart point. Returns the value and the x/y derivatives of the interpolant.
pub fn interpolate<T: FieldValue>(f: &Field<T>, x: f64, y: f64) -> Result<(T, T, T), FieldError> {
    let g: &Grid2D = f.grid();
    if !g.contains(x, y) {
        return Err(FieldError::OutsideChart { x, y });
    }
    let (x0, y0) = g.origin();
    let (ix, sx) = stencil((x - x0) / g.hx(), g.nx(), g.is_periodic());
    let (iy, sy) = stencil((y - y0) / g.hy(), g.ny(), g.is_periodic());
    let (wx, dwx) = lagrange4(sx);
    let (wy, dwy) = lagrange4(sy);
    let mut v = T::default();
    let mut vx = T::default();
    let mut vy = T::default();
    for b in 0..4 {
        for a in 0..4 {
            let s = f.get(ix[a], iy[b]);
            v = v + s * (wx[a] * wy[b]);
            vx = vx + s * (dwx[a] * wy[b]);
            vy = vy + s * (wx[a] * dwy[b]);
        }
    }
    Ok((v, vx * (1.0 / g.hx()), vy * (1.0 / g.hy())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ScalarField;

    #[test]
    fn reproduces_cubics_exactly() {
        let g = Grid2D::rectangle(9, 8, (-1.0, 0.0), (1.0, 1.5)).unwrap();
        let p = |x: f64, y: f64| 1.0 + x - 2.0 * y + x * x * y - 0.5 * y * y * y + x * x * x;
        let f = ScalarField::from_fn(g, p);
        for &(x, y) in &[(0.13, 0.77), (-0.99, 0.01), (0.999, 1.49), (0.0, 0.75)] {
            let (v, vx, vy) = interpolate(&f, x, y).unwrap();
            assert!((v - p(x, y)).abs() < 1e-12);
            assert!((vx - (1.0 + 2.0 * x * y + 3.0 * x * x)).abs() < 1e-10);
            assert!((vy - (-2.0 + x * x - 1.5 * y * y)).abs() < 1e-10);
        }
        assert!(interpolate(&f, 1.2, 0.5).is_err());
    }

    #[test]
    fn periodic_wraps() {
        let g = Grid2D::unit_torus(32).unwrap();
        let tau = std::f64::consts::TAU;
        let f = ScalarField::from_fn(g, |x, y| (tau * x).sin() * (tau * y).cos());
        let (v, _, _) = interpolate(&f, 0.99, 1.3).unwrap();
        let exact = (tau * 0.99).sin() * (tau * 1.3).cos();
        assert!((v - exact).abs() < 1e-4);
    }
}
