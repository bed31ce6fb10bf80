use coshlab_core::connection::*;
use coshlab_core::field::{Grid2D, QuadraticDifferential};
use coshlab_core::metric::*;
use coshlab_core::pde::{EquationVariant, StripProfile};
use coshlab_core::Complex64;
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn liouville(x: f64, y: f64) -> f64 {
    -2.0 * (1.0 - x * x - y * y).ln()
}

fn random_points(n: usize, seed: u64, r: f64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-1.0..1.0)])
        .collect()
}

/// `phi(x)` from a shooting solution, as a potential source.
struct Strip(StripProfile);
impl PotentialSource for Strip {
    fn phi(&self, x: f64, _y: f64) -> Result<f64, MetricError> {
        Ok(self.0.eval(x).unwrap().0)
    }
    fn t(&self, _x: f64, _y: f64) -> Complex64 {
        self.0.t
    }
}

fn liouville_source() -> Conformal<fn(f64, f64) -> f64> {
    Conformal {
        phi: liouville as fn(f64, f64) -> f64,
        t: QuadraticDifferential::zero(),
    }
}

const CAL: MetricConvention = MetricConvention {
    scale: 4.0,
    orientation: Orientation::AsPrinted,
};

#[test]
fn direct_examples() {
    let zero = Conformal { phi: |_x: f64, _y: f64| 0.0, t: QuadraticDifferential::zero() };
    let m = metric_direct(zero, EquationVariant::Cosh, MetricConvention::bare());
    assert_eq!(m.metric([0.1, 0.2, 0.0]).unwrap(), Mat3::identity());
    let c1 = 1f64.cosh().powi(2);
    let g = m.metric([0.1, 0.2, 1.0]).unwrap();
    assert!((g - Mat3::from_diagonal(&Vector3::new(c1, c1, 1.0))).abs().max() < 1e-15);
    let zero = Conformal { phi: |_x: f64, _y: f64| 0.0, t: QuadraticDifferential::zero() };
    let s = metric_direct(zero, EquationVariant::Sinh, MetricConvention::bare());
    assert_eq!(s.metric([0.0, 0.0, 0.0]).unwrap(), Mat3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0)));
    assert_eq!(s.signature(), Signature::Lorentzian);
}

#[test]
fn riemann_sign_convention_on_model_spaces() {
    for kappa in [1.0, -1.0] {
        let m = FnMetric {
            f: move |p: [f64; 3]| {
                let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                Mat3::identity() * (4.0 / (1.0 + kappa * r2).powi(2))
            },
            signature: Signature::Riemannian,
        };
        let scheme = DerivativeScheme::default();
        let d = curvature_identity_defect_with(&m, [0.1, -0.2, 0.15], kappa, scheme).unwrap();
        assert!(d.defect < 1e-6, "kappa {kappa}: {}", d.defect);
        let wrong = curvature_identity_defect_with(&m, [0.1, -0.2, 0.15], -kappa, scheme).unwrap();
        assert!(wrong.defect > 1.0);
    }
    let flat = FnMetric { f: |_p: [f64; 3]| Mat3::identity(), signature: Signature::Riemannian };
    let s = DerivativeScheme::default();
    assert_eq!(curvature_identity_defect_with(&flat, [0.0; 3], 0.0, s).unwrap().defect, 0.0);
    assert!(curvature_identity_defect(&flat, [0.0; 3], 1e-3).unwrap() >= 1.0);
}

#[test]
fn fermi_metric_is_hyperbolic_and_normal_lines_are_geodesics() {
    assert!(curvature_identity_defect(&FermiMetric, [0.0, 0.0, 0.3], 1e-3).unwrap() <= 1e-5);
    assert!(curvature_identity_defect(&FermiMetric, [0.3, -0.4, -0.9], 1e-3).unwrap() <= 1e-5);
    // over a flat plane the tangential sectional curvature is -tanh^2 l,
    // leaving a defect of exactly cosh^2 l
    for l in [0.0, 0.3, 1.0] {
        let d = curvature_identity_defect(&WarpedFlatMetric, [0.0, 0.0, l], 1e-3).unwrap();
        assert!((d - l.cosh().powi(2)).abs() < 1e-6);
    }
    let ls0: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
    assert!(geodesic_defect(&WarpedFlatMetric, (0.2, 0.1), &ls0, DerivativeScheme::default()).unwrap() <= 1e-6);
    let ls: Vec<f64> = (0..11).map(|k| -1.0 + 0.2 * k as f64).collect();
    assert!(geodesic_defect(&FermiMetric, (0.2, 0.1), &ls, DerivativeScheme::default()).unwrap() <= 1e-6);
    let bent = FnMetric {
        f: |p: [f64; 3]| {
            let c2 = p[2].cosh().powi(2);
            Mat3::from_diagonal(&Vector3::new(c2, c2, 1.0 + 0.1 * p[0]))
        },
        signature: Signature::Riemannian,
    };
    assert!(geodesic_defect(&bent, (0.2, 0.1), &ls, DerivativeScheme::default()).unwrap() > 1e-2);
}

#[test]
fn calibration_recovers_four() {
    let (scale, spread) = calibrate_scale(&[(0.0, 0.0), (0.3, -0.2), (-0.4, 0.4)], 1e-3).unwrap();
    assert!((scale - 4.0).abs() < 1e-5 && spread < 1e-5, "{scale} {spread}");
}

#[test]
fn liouville_cosh_metric_has_curvature_minus_one() {
    for o in [Orientation::AsPrinted, Orientation::Reflected] {
        let m = metric_direct(liouville_source(), EquationVariant::Cosh, MetricConvention::with_scale(4.0, o));
        for p in random_points(10, 1, 0.45) {
            let d = curvature_identity_defect(&m, p, 1e-3).unwrap();
            assert!(d <= 1e-4, "{p:?}: {d}");
        }
    }
    // the bare scale is not hyperbolic
    let bare = metric_direct(liouville_source(), EquationVariant::Cosh, MetricConvention::bare());
    assert!(curvature_identity_defect(&bare, [0.1, 0.1, 0.2], 1e-3).unwrap() > 1e-1);
}

#[test]
fn strip_cosh_metric_has_curvature_minus_one() {
    let t = c(0.6, 0.3);
    let prof = StripProfile::solve(t, EquationVariant::Cosh, (0.0, 0.4), (0.2, -0.1)).unwrap();
    let m = metric_direct(Strip(prof), EquationVariant::Cosh, CAL);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let p = [rng.gen_range(0.05..0.35), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let d = curvature_identity_defect(&m, p, 1e-2).unwrap();
        assert!(d <= 1e-3, "{p:?}: {d}");
    }
    // printed sign of the |t|^2 sinh^2 l term is not hyperbolic
    let printed = FnMetric {
        f: move |p: [f64; 3]| {
            let rho = prof.eval(p[0]).unwrap().0.exp();
            let (ch, sh) = (p[2].cosh(), p[2].sinh());
            let d = 4.0 * (rho * ch * ch - t.norm_sqr() / rho * sh * sh);
            let q = second_form_matrix(t) * (4.0 * ch * sh);
            let mut g = Mat3::zeros();
            g[(0, 0)] = d + q[(0, 0)];
            g[(1, 1)] = d + q[(1, 1)];
            g[(0, 1)] = q[(0, 1)];
            g[(1, 0)] = q[(1, 0)];
            g[(2, 2)] = 1.0;
            g
        },
        signature: Signature::Riemannian,
    };
    assert!(curvature_identity_defect(&printed, [0.2, 0.0, 0.5], 1e-2).unwrap() > 1e-2);
}

#[test]
fn sinh_lorentzian_metric_from_constant_solution() {
    let tc = c(0.8, -0.6) * 1.5;
    let src = Conformal { phi: move |_x: f64, _y: f64| tc.norm().ln(), t: QuadraticDifferential::constant(tc) };
    let m = metric_direct(src, EquationVariant::Sinh, CAL);
    for p in random_points(20, 7, 0.5) {
        let near = ((p[2].abs() - std::f64::consts::FRAC_PI_4).abs()) < 0.05;
        match curvature_identity_defect(&m, p, 1e-3) {
            Ok(d) => assert!(near || d <= 1e-4, "{p:?}: {d}"),
            Err(e) => assert!(near, "{p:?}: {e}"),
        }
    }
    assert!(matches!(
        curvature_identity_defect(&m, [0.0, 0.0, std::f64::consts::FRAC_PI_4], 1e-3),
        Err(MetricError::Degenerate { .. })
    ));
}

#[test]
fn connection_metric_matches_reflected_direct_metric() {
    let zero = AnalyticSampler::new(FamilyTag::Custom, QuadraticDifferential::zero(), |_x, _y| {
        (f64::NEG_INFINITY, c(0.0, 0.0))
    });
    let _ = zero;
    // A = 0 gives dl^2 with the negative sign
    struct Zero;
    impl ConnectionSampler for Zero {
        fn tag(&self) -> FamilyTag {
            FamilyTag::Custom
        }
        fn coefficients(&self, _x: f64, _y: f64) -> Result<LaurentPoint, ConnectionError> {
            Ok(LaurentPoint::default())
        }
    }
    let g = metric_from_connection(Zero, Some(-1.0)).metric([0.3, 0.1, 0.7]).unwrap();
    assert!((g - Mat3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0))).abs().max() < 1e-15);

    // arbitrary (non-solution) data: the identity is pointwise algebra
    let phi = |x: f64, y: f64| 0.3 * x - 0.2 * y * y + 0.1;
    let dphi = |_x: f64, y: f64| c(0.15, 0.2 * y);
    let tq = QuadraticDifferential::polynomial(vec![c(0.4, -0.3), c(0.1, 0.2)]);
    let conn = AnalyticSampler::new(FamilyTag::Cosh, tq.clone(), move |x, y| (phi(x, y), dphi(x, y)));
    let from_conn = metric_from_connection(&conn, None);
    let direct = metric_direct(
        Conformal { phi, t: tq.clone() },
        EquationVariant::Cosh,
        MetricConvention::with_scale(4.0, Orientation::Reflected),
    );
    let printed = metric_direct(Conformal { phi, t: tq }, EquationVariant::Cosh, CAL);
    for p in random_points(20, 3, 0.6) {
        let a = from_conn.metric(p).unwrap();
        let b = direct.metric(p).unwrap();
        assert!((a - b).abs().max() <= 1e-8 * b.abs().max(), "{p:?}\n{a}\n{b}");
        let flipped = printed.metric([p[0], p[1], -p[2]]).unwrap();
        assert!((a - flipped).abs().max() <= 1e-8 * b.abs().max());
        let gauged = metric_from_connection(DiagonalGauge { inner: &conn, psi: 0.83 }, None);
        assert!((gauged.metric(p).unwrap() - a).abs().max() <= 1e-12 * a.abs().max());
    }
}

#[test]
fn fundamental_form_examples() {
    let zero = Conformal { phi: |_x: f64, _y: f64| 0.0, t: QuadraticDifferential::zero() };
    let m = metric_direct(zero, EquationVariant::Cosh, MetricConvention::bare());
    let f = fundamental_forms(&m, 0.1, 0.1, 1e-4).unwrap();
    assert_eq!(f.g, [[1.0, 0.0], [0.0, 1.0]]);
    assert!(f.b.iter().flatten().all(|v| v.abs() < 1e-12));

    let one = Conformal { phi: |_x: f64, _y: f64| 0.0, t: QuadraticDifferential::real(1.0) };
    let m = metric_direct(one, EquationVariant::Cosh, MetricConvention::bare());
    let f = fundamental_forms(&m, 0.1, 0.1, 1e-4).unwrap();
    assert!((f.b[0][0] - 2.0).abs() < 1e-7 && (f.b[1][1] + 2.0).abs() < 1e-7 && f.b[0][1].abs() < 1e-12);

    let tq = QuadraticDifferential::polynomial(vec![c(0.4, -0.3), c(0.1, 0.2)]);
    let m = metric_direct(Conformal { phi: liouville, t: tq.clone() }, EquationVariant::Cosh, CAL);
    for (x, y) in [(0.0, 0.0), (0.3, -0.2), (-0.4, 0.1)] {
        let f = fundamental_forms(&m, x, y, 1e-4).unwrap();
        assert!(f.mean_curvature_trace().abs() <= 1e-8);
        let expect = second_form_matrix(tq.at(c(x, y))) * 4.0;
        assert!((f.b() - expect).abs().max() < 1e-6);
    }
}

#[test]
fn surface_curvature_cases() {
    let src = liouville_source();
    let g2 = surface_metric(&src, 4.0);
    let k = gauss_curvature_2d(&g2, &[(0.0, 0.0), (0.2, 0.3)], 1e-3).unwrap();
    assert!(k.iter().all(|v| (v + 1.0).abs() < 1e-5), "{k:?}");

    let flat = |_x: f64, _y: f64| -> Result<Sym2, MetricError> { Ok(Sym2::identity()) };
    assert_eq!(gauss_curvature_2d(&flat, &[(0.0, 0.0)], 1e-3).unwrap(), vec![0.0]);

    let tc = c(0.3, 0.4);
    let cst = Conformal { phi: move |_x: f64, _y: f64| tc.norm().ln(), t: QuadraticDifferential::constant(tc) };
    let g2 = surface_metric(&cst, 4.0);
    assert!(matches!(gauss_curvature_2d(&g2, &[(0.0, 0.0)], 1e-3), Err(MetricError::Degenerate { .. })));

    // a genuine non-constant sinh solution with rho > |t|
    let t = c(0.5, 0.2);
    let prof = StripProfile::solve(t, EquationVariant::Sinh, (0.0, 0.4), (0.6, 0.3)).unwrap();
    let s = Strip(prof);
    let g2 = surface_metric(&s, 4.0);
    let k = gauss_curvature_2d(&g2, &[(0.1, 0.0), (0.2, 0.5), (0.3, -0.7)], 1e-3).unwrap();
    assert!(k.iter().all(|v| (v + 1.0).abs() < 1e-4), "{k:?}");
}

#[test]
fn boundary_one_form_examples() {
    let grid = Grid2D::rectangle(9, 9, (0.0, 0.0), (1.0, 0.5)).unwrap();
    let n = grid.len();
    let id = Sym2::identity();
    let b = Sym2::new(2.0, 0.0, 0.0, -2.0);
    let flat = FormField { grid, g: vec![id; n], b: vec![Sym2::zeros(); n] };
    let dg = vec![Sym2::new(0.3, 0.1, 0.1, -0.7); n];
    assert_eq!(boundary_one_form(&flat, &dg, &vec![Sym2::zeros(); n]).unwrap(), 0.0);

    let bent = FormField { grid, g: vec![id; n], b: vec![b; n] };
    let eps = 1e-3;
    let theta = boundary_one_form(&bent, &vec![Sym2::zeros(); n], &vec![id * eps; n]).unwrap();
    assert!((theta - 2.0 * eps * 0.5).abs() < 1e-15);

    let db1 = vec![Sym2::new(0.1, 0.2, 0.2, 0.3); n];
    let db2 = vec![Sym2::new(-0.4, 0.0, 0.0, 0.9); n];
    let dg2 = vec![Sym2::new(0.5, -0.1, -0.1, 0.2); n];
    let sum: Vec<Sym2> = db1.iter().zip(&db2).map(|(a, b)| a + b).collect();
    let a = boundary_one_form(&bent, &dg2, &db1).unwrap() + boundary_one_form(&bent, &vec![Sym2::zeros(); n], &db2).unwrap();
    let b2 = boundary_one_form(&bent, &dg2, &sum).unwrap();
    assert!((a - b2).abs() < 1e-14);

    // g = (1 + s1) I, b = s2 B: omega = -tr(B) Area / (1 + s1)
    let bb = Sym2::new(1.5, 0.2, 0.2, 0.5);
    let fam = move |s1: f64, s2: f64| -> Result<FormField, MetricError> {
        Ok(FormField { grid, g: vec![id * (1.0 + s1); n], b: vec![bb * s2; n] })
    };
    let w = symplectic_form(&fam, (0.2, 0.3), 1e-4).unwrap();
    assert!((w + 2.0 * 0.5 / 1.2).abs() < 1e-6, "{w}");
}
