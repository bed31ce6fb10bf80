use approx::assert_abs_diff_eq;
use coshlab_core::field::{Grid2D, QuadraticDifferential, ScalarField};
use coshlab_core::linalg::mat2::{c, identity, mat2, max_abs, Mat2};
use coshlab_core::pde::{default_initial_guess, newton_solve, EquationVariant, NewtonOptions};
use coshlab_core::toda::*;
use coshlab_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn liouville_exact(x: f64, y: f64) -> f64 {
    -2.0 * (1.0 - x * x - y * y).ln()
}

fn nilpotent() -> HoloConnectionData {
    HoloConnectionData::new(vec![c(1.0, 0.0)], vec![]).unwrap()
}

#[test]
fn gauss_examples() {
    let f = gauss_decompose(&identity()).unwrap();
    assert_eq!((f.plus, f.minus), (identity(), identity()));

    let u = mat2(c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0));
    let f = gauss_decompose(&u).unwrap();
    assert!(max_abs(&(f.plus - mat2(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)))) < 1e-15);
    assert!(max_abs(&(f.minus - mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)))) < 1e-15);

    let w = mat2(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0));
    assert!(matches!(gauss_decompose(&w), Err(TodaError::DecompositionFails { .. })));
}

fn random_sl2(rng: &mut ChaCha8Rng) -> Mat2 {
    let mut r = || c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let (a, b, cc) = (r(), r(), r());
    let d = (c(1.0, 0.0) + b * cc) / a;
    mat2(a, b, cc, d)
}

#[test]
fn gauss_round_trip_and_cartan_ambiguity() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let u = random_sl2(&mut rng);
        let f = gauss_decompose(&u).unwrap();
        assert!(max_abs(&(f.plus * f.minus - u)) <= 1e-14 * max_abs(&u).max(1.0));
        assert_eq!(f.minus[(0, 0)], c(1.0, 0.0));
        assert_eq!(f.minus[(1, 1)], c(1.0, 0.0));
        assert_eq!(f.plus[(1, 0)], c(0.0, 0.0));
        // any other split (U+ K^-1, K U-) has the same leading minor
        let k = rng.gen_range(0.2..3.0);
        let kk = mat2(c(k, 0.3), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0) / c(k, 0.3));
        let kinv = mat2(c(1.0, 0.0) / c(k, 0.3), c(0.0, 0.0), c(0.0, 0.0), c(k, 0.3));
        let other = (f.plus * kinv) * (kk * f.minus);
        assert!((other[(0, 0)] - u[(0, 0)]).norm() < 1e-13 * max_abs(&u).max(1.0));
    }
}

#[test]
fn pexp_closed_forms() {
    let z = c(0.3, -0.4);
    let zero = HoloConnectionData::raw(vec![], vec![]);
    assert!(max_abs(&(pexp(&zero, z).unwrap() - identity())) < 1e-15);

    let g = pexp(&nilpotent(), z).unwrap();
    assert!(max_abs(&(g - mat2(c(1.0, 0.0), z, c(0.0, 0.0), c(1.0, 0.0)))) < 1e-12);

    let beta = c(0.7, 0.2);
    let diag = HoloConnectionData::raw(vec![], vec![beta]);
    let g = pexp(&diag, z).unwrap();
    let want = mat2((beta * z).exp(), c(0.0, 0.0), c(0.0, 0.0), (-beta * z).exp());
    assert!(max_abs(&(g - want)) < 1e-11);

    let poly = HoloConnectionData::new(vec![c(1.0, 0.5), c(-0.3, 0.2), c(0.1, 0.0)], vec![c(0.2, 0.0), c(0.0, 0.4)])
        .unwrap();
    for w in [c(0.5, 0.5), c(-0.8, 0.1), c(0.0, -0.9)] {
        let g = pexp(&poly, w).unwrap();
        let d = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
        assert!((d - 1.0).norm() < 1e-12);
    }
}

#[test]
fn pexp_homotopy_spot_check() {
    // going 0 -> w1 -> z along two segments agrees with the straight segment
    let poly = HoloConnectionData::new(vec![c(1.0, 0.0), c(0.0, 0.5)], vec![c(0.3, -0.1), c(0.2, 0.0)]).unwrap();
    let (w1, z) = (c(0.6, 0.0), c(0.2, 0.7));
    let first = pexp(&poly, w1).unwrap();
    let second = pexp_with(&|w| poly.matrix(w1 + w), z - w1, 1e-12).unwrap();
    let direct = pexp(&poly, z).unwrap();
    assert!(max_abs(&(second * first - direct)) < 1e-10);
}

#[test]
fn nilpotent_data_gives_exact_liouville() {
    let grid = Grid2D::disk_inscribed(65, 0.9).unwrap();
    let (phi, rep) = liouville_from_holomorphic(&nilpotent(), &grid).unwrap();
    for k in 0..grid.len() {
        let (x, y) = grid.coords(k);
        assert_abs_diff_eq!(phi.values()[k], liouville_exact(x, y), epsilon = 1e-10);
    }
    assert!(rep.residual_semi_analytic <= 1e-10, "{rep:?}");
    assert!(rep.prefactor_discrepancy < 1e-12);
    assert!(rep.det_defect < 1e-12);
}

#[test]
fn dressed_frame_is_flat_to_second_order() {
    // for a = 1 the dressed frame is quadratic in z, zbar and differences are
    // exact, so the order is measured on non-polynomial data
    let data = HoloConnectionData::new(vec![c(1.0, 0.0), c(0.2, 0.0)], vec![]).unwrap();
    let flat = |n| {
        let grid = Grid2D::disk_inscribed(n, 0.7).unwrap();
        liouville_from_holomorphic(&data, &grid).unwrap().1.flatness_fd
    };
    let (a, b) = (flat(65), flat(129));
    let order = (a / b).log2();
    assert!(order > 1.8, "flatness {a:e} -> {b:e}, order {order}");
}

#[test]
fn polynomial_data_solves_liouville() {
    let data = HoloConnectionData::new(vec![c(1.0, 0.0), c(0.2, 0.0)], vec![]).unwrap();
    let grid = Grid2D::disk_inscribed(129, 0.9).unwrap();
    let (_, rep) = liouville_from_holomorphic(&data, &grid).unwrap();
    assert!(rep.residual_semi_analytic <= 1e-6, "{rep:?}");

    let fd = |n| {
        let grid = Grid2D::disk_inscribed(n, 0.6).unwrap();
        liouville_from_holomorphic(&data, &grid).unwrap().1.residual_fd
    };
    let (a, b) = (fd(65), fd(129));
    assert!((a / b).log2() > 1.8, "fd residual {a:e} -> {b:e}");
}

#[test]
fn cartan_part_makes_minor_complex() {
    // with b != 0 the minor leaves the real axis: the complexified formula
    // still holds identically, but ln|Delta| does not solve Liouville
    let data = HoloConnectionData::new(vec![c(1.0, 0.0)], vec![c(0.3, 0.0)]).unwrap();
    let grid = Grid2D::disk_inscribed(33, 0.4).unwrap();
    let (_, rep) = liouville_from_holomorphic(&data, &grid).unwrap();
    assert!(rep.prefactor_discrepancy < 1e-12, "{rep:?}");
    assert!(rep.residual_semi_analytic > 1e-3, "{rep:?}");
    assert!(rep.corrected_residual < 1e-9, "{rep:?}");
    assert!(rep.delta_imag > 1e-3, "{rep:?}");

    let grid = Grid2D::disk_inscribed(33, 0.9).unwrap();
    let (_, rep) = liouville_from_holomorphic(&nilpotent(), &grid).unwrap();
    assert!(rep.delta_imag < 1e-14);
}

#[test]
fn region_error_reports_locus() {
    let grid = Grid2D::rectangle(17, 17, (-1.2, -1.2), (1.2, 1.2)).unwrap();
    match liouville_from_holomorphic(&nilpotent(), &grid) {
        Err(TodaError::Region { points, .. }) => assert!(points > 0),
        other => panic!("expected region error, got {other:?}"),
    }
}

#[test]
fn matches_dirichlet_liouville_solve() {
    let grid = Grid2D::disk_inscribed(65, 0.7).unwrap();
    let (phi, _) = liouville_from_holomorphic(&nilpotent(), &grid).unwrap();
    let t = QuadraticDifferential::zero();
    let guess = default_initial_guess(&grid, &t, Some(&liouville_exact)).unwrap();
    let opts = NewtonOptions {
        compute_eigen: false,
        ..Default::default()
    };
    let rep = newton_solve(&guess, &t, EquationVariant::Liouville, &opts).unwrap();
    let diff = (0..grid.len())
        .map(|k| (rep.phi.values()[k] - phi.values()[k]).abs())
        .fold(0.0, f64::max);
    // discretization budget of the 65^2 solve
    assert!(diff < 1e-3, "{diff:e}");
}

#[test]
fn toda_residual_examples() {
    let grid = Grid2D::disk_inscribed(129, 0.7).unwrap();
    let phi = ScalarField::from_fn(grid, liouville_exact);
    let r = toda_residual(&[phi.clone()], &CartanMatrix::a1()).unwrap();
    let coarse = ScalarField::from_fn(Grid2D::disk_inscribed(65, 0.7).unwrap(), liouville_exact);
    let rc = toda_residual(&[coarse], &CartanMatrix::a1()).unwrap();
    let (a, b) = (rc[0].sup_norm_interior(), r[0].sup_norm_interior());
    assert!(b < 1e-2 && (a / b).log2() > 1.8, "{a:e} -> {b:e}");

    let zero = ScalarField::constant(grid, 0.0);
    let r = toda_residual(&[zero], &CartanMatrix::a1()).unwrap();
    assert!(r[0].values().iter().all(|v| (v + 2.0).abs() < 1e-12));

    // affine case: phi_2 = -phi turns both equations into d dbar phi = 2 e^phi - 2 e^-phi
    let s = ScalarField::from_fn(grid, |x, y| 0.3 * (2.0 * x).sin() * y.cosh());
    let neg = s.map(|v| -v);
    let r = toda_residual(&[s.clone(), neg], &CartanMatrix::affine_a1()).unwrap();
    let lap = coshlab_core::field::laplace_zzbar(&s).unwrap();
    for k in 0..grid.len() {
        let p = s.values()[k];
        let want = lap.values()[k] - 2.0 * p.exp() + 2.0 * (-p).exp();
        assert_abs_diff_eq!(r[0].values()[k], want, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1].values()[k], -want, epsilon = 1e-12);
    }

    assert!(toda_residual(&[s], &CartanMatrix::affine_a1()).is_err());
    assert!(CartanMatrix::new(vec![vec![2, -1], vec![-1, 1]]).is_err());
}

#[test]
fn holo_data_json_round_trip() {
    let json = r#"{"a": [[1.0, 0.0], [0.2, 0.0]], "b": []}"#;
    let d: HoloConnectionData = serde_json::from_str(json).unwrap();
    assert_eq!(d.a(Complex64::new(1.0, 0.0)), c(1.2, 0.0));
    let back: HoloConnectionData = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
    assert!(serde_json::from_str::<HoloConnectionData>(r#"{"a": [[0.0, 0.0]]}"#).is_err());
}
