//! 2x2 complex matrices: sl(2) generators and a closed-form exponential.

use nalgebra::Matrix2;
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn mat2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> Mat2 {
    Mat2::new(a, b, cc, d)
}

pub fn zero() -> Mat2 {
    Mat2::zeros()
}

pub fn identity() -> Mat2 {
    Mat2::identity()
}

/// Raising generator `[[0,1],[0,0]]`.
pub fn gen_e() -> Mat2 {
    mat2(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))
}

/// Lowering generator `[[0,0],[1,0]]`.
pub fn gen_f() -> Mat2 {
    mat2(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0))
}

/// Cartan generator `diag(1,-1)`; also the pseudo-Hermitian form `C = J`.
pub fn gen_h() -> Mat2 {
    mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0))
}

#[inline]
pub fn det(m: &Mat2) -> Complex64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

#[inline]
pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

/// Largest entry modulus.
#[inline]
pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.norm()))
}

#[inline]
pub fn inverse(m: &Mat2) -> Mat2 {
    let d = det(m);
    mat2(m[(1, 1)] / d, -m[(0, 1)] / d, -m[(1, 0)] / d, m[(0, 0)] / d)
}

/// Pseudo-Hermitian conjugate `C m^+ C` with `C = diag(1,-1)`.
#[inline]
pub fn pseudo_adjoint(m: &Mat2) -> Mat2 {
    let a = m.adjoint();
    mat2(a[(0, 0)], -a[(0, 1)], -a[(1, 0)], a[(1, 1)])
}

/// `sinh(d)/d` with a series near zero.
fn sinhc(d: Complex64) -> Complex64 {
    if d.norm() < 1e-4 {
        let d2 = d * d;
        c(1.0, 0.0) + d2 / 6.0 + d2 * d2 / 120.0
    } else {
        d.sinh() / d
    }
}

/// Matrix exponential via `Y^2 = -det(Y) I` for the trace-free part `Y`.
pub fn expm(m: &Mat2) -> Mat2 {
    let mu = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let y = m - identity() * mu;
    let d = (-det(&y)).sqrt();
    (identity() * d.cosh() + y * sinhc(d)) * mu.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_exp(m: &Mat2) -> Mat2 {
        let mut term = identity();
        let mut acc = identity();
        for k in 1..60 {
            term = term * m / c(k as f64, 0.0);
            acc += term;
        }
        acc
    }

    #[test]
    fn generators_bracket_relations() {
        let (e, f, h) = (gen_e(), gen_f(), gen_h());
        assert_eq!(commutator(&e, &f), h);
        assert_eq!(commutator(&h, &e), e * c(2.0, 0.0));
        assert_eq!(commutator(&h, &f), f * c(-2.0, 0.0));
    }

    #[test]
    fn expm_matches_series() {
        let cases = [
            mat2(c(0.3, 0.1), c(-1.2, 0.5), c(0.7, -0.2), c(-0.1, 0.4)),
            gen_e() * c(2.5, 0.0),
            mat2(c(1e-7, 0.0), c(2e-7, 1e-7), c(0.0, 0.0), c(-1e-7, 0.0)),
            zero(),
        ];
        for m in cases {
            let diff = expm(&m) - series_exp(&m);
            assert!(max_abs(&diff) < 1e-13, "{m}");
        }
    }

    #[test]
    fn trace_free_exponential_has_unit_determinant() {
        let m = mat2(c(0.4, -0.3), c(1.1, 0.2), c(-0.6, 0.9), c(-0.4, 0.3));
        assert!((det(&expm(&m)) - c(1.0, 0.0)).norm() < 1e-14);
    }
}
