use coshlab_core::field::{integrate, Grid2D, QuadraticDifferential, ScalarField};
use coshlab_core::pde::*;
use coshlab_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn liouville_exact(x: f64, y: f64) -> f64 {
    -2.0 * (1.0 - x * x - y * y).ln()
}

fn perturbed_zero(grid: Grid2D, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..grid.len()).map(|_| rng.gen_range(-0.3..0.3)).collect();
    ScalarField::from_values(grid, vals).unwrap()
}

fn disk_error(n: usize) -> f64 {
    let grid = Grid2D::disk_inscribed(n, 0.7).unwrap();
    let t = QuadraticDifferential::zero();
    let phi0 = default_initial_guess(&grid, &t, Some(&liouville_exact)).unwrap();
    let opts = NewtonOptions {
        compute_eigen: false,
        ..Default::default()
    };
    let rep = newton_solve(&phi0, &t, EquationVariant::Cosh, &opts).unwrap();
    assert_eq!(rep.status, SolveStatus::Converged);
    grid.interior_indices()
        .into_iter()
        .map(|k| {
            let (x, y) = grid.coords(k);
            (rep.phi.values()[k] - liouville_exact(x, y)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn liouville_residual_is_second_order() {
    let sup = |n: usize| {
        let grid = Grid2D::disk_inscribed(n, 0.7).unwrap();
        let phi = ScalarField::from_fn(grid, liouville_exact);
        residual(&phi, &QuadraticDifferential::zero(), EquationVariant::Cosh)
            .unwrap()
            .sup_norm_interior()
    };
    let (a, b) = (sup(65), sup(129));
    assert!(a / b > 3.5 && a / b < 4.5, "ratio {}", a / b);
}

#[test]
fn residual_trivial_cases() {
    let grid = Grid2D::unit_torus(16).unwrap();
    let c = Complex64::new(0.3, -0.4);
    let phi = ScalarField::constant(grid, c.norm().ln());
    let r = residual(&phi, &QuadraticDifferential::constant(c), EquationVariant::Sinh).unwrap();
    assert!(r.sup_norm() < 1e-15);
    let r = residual(&ScalarField::constant(grid, 0.0), &QuadraticDifferential::zero(), EquationVariant::Cosh)
        .unwrap();
    assert!(r.values().iter().all(|&v| (v + 1.0).abs() < 1e-15));
    let bad = ScalarField::constant(grid, f64::NAN);
    assert!(matches!(
        residual(&bad, &QuadraticDifferential::zero(), EquationVariant::Cosh),
        Err(PdeError::Domain { .. })
    ));
}

#[test]
fn linearization_matches_finite_differences() {
    let grid = Grid2D::unit_torus(24).unwrap();
    let t = QuadraticDifferential::constant(Complex64::new(0.7, 0.2));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let phi = perturbed_zero(grid, 3);
    for v in [EquationVariant::Cosh, EquationVariant::Sinh] {
        let op = linearized_operator(&phi, &t, v).unwrap();
        let r0 = residual(&phi, &t, v).unwrap();
        for _ in 0..20 {
            let d: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut jd = vec![0.0; grid.len()];
            op.apply(&d, &mut jd);
            let eps = 1e-6;
            let shifted = ScalarField::from_values(
                grid,
                phi.values().iter().zip(&d).map(|(p, q)| p + eps * q).collect(),
            )
            .unwrap();
            let r1 = residual(&shifted, &t, v).unwrap();
            let err = r1
                .values()
                .iter()
                .zip(r0.values())
                .zip(&jd)
                .map(|((a, b), j)| ((a - b) / eps - j).abs())
                .fold(0.0, f64::max);
            let scale = jd.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            assert!(err < 1e-5 * scale, "err {err} scale {scale}");
        }
        // symmetric on the torus
        let (_, a) = {
            let small = Grid2D::unit_torus(6).unwrap();
            let p = perturbed_zero(small, 5);
            linearized_operator(&p, &t, v).unwrap().to_dense()
        };
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert!((a[i][j] - a[j][i]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sinh_constant_solution_from_perturbation() {
    let grid = Grid2D::unit_torus(64).unwrap();
    for (seed, c) in [
        Complex64::new(0.5, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::from_polar(2.0, std::f64::consts::PI / 3.0),
    ]
    .into_iter()
    .enumerate()
    {
        let t = QuadraticDifferential::constant(c);
        let rep = newton_solve(&perturbed_zero(grid, seed as u64), &t, EquationVariant::Sinh, &Default::default())
            .unwrap();
        assert!(rep.iterations <= 12, "iterations {}", rep.iterations);
        assert!(rep.residual_sup <= 1e-10);
        let target = c.norm().ln();
        assert!(rep.phi.values().iter().all(|p| (p - target).abs() < 1e-9));
        let e = rep.eigen_min.unwrap();
        assert!((e - 2.0 * c.norm()).abs() < 1e-6, "eigen {e}");
        assert!(!rep.inequality_ok);
    }
}

#[test]
fn newton_converges_quadratically() {
    let grid = Grid2D::unit_torus(32).unwrap();
    let t = QuadraticDifferential::real(1.0);
    let opts = NewtonOptions { tol: 1e-13, compute_eigen: false, ..Default::default() };
    let rep = newton_solve(&perturbed_zero(grid, 9), &t, EquationVariant::Sinh, &opts).unwrap();
    let h = &rep.history;
    let mut checked = 0;
    for w in h.windows(2) {
        if w[0] < 1e-2 && w[1] > 1e-12 {
            assert!(w[1] <= 50.0 * w[0] * w[0], "{:?}", h);
            checked += 1;
        }
    }
    assert!(checked >= 1, "{:?}", h);
}

#[test]
fn cosh_on_torus_is_obstructed() {
    let grid = Grid2D::unit_torus(16).unwrap();
    for c in [0.0, 0.5, 2.0] {
        let t = QuadraticDifferential::real(c);
        assert!(obstruction_check(&t, &grid, EquationVariant::Cosh).is_infeasible());
        let err = newton_solve(&ScalarField::constant(grid, 0.0), &t, EquationVariant::Cosh, &Default::default());
        assert!(matches!(err, Err(PdeError::Obstruction(_))));
        // summation by parts: the integrated residual is minus a positive integral
        let phi = perturbed_zero(grid, 1);
        let r = residual(&phi, &t, EquationVariant::Cosh).unwrap();
        let pos = phi.map(|p| p.exp() + c * c * (-p).exp());
        assert!((integrate(&r, None) + integrate(&pos, None)).abs() < 1e-12);
    }
    assert_eq!(
        obstruction_check(&QuadraticDifferential::real(1.0), &grid, EquationVariant::Sinh),
        Feasibility::Feasible
    );
    let disk = Grid2D::disk_inscribed(16, 0.7).unwrap();
    assert_eq!(
        obstruction_check(&QuadraticDifferential::real(1.0), &disk, EquationVariant::Cosh),
        Feasibility::NotApplicable
    );
}

#[test]
fn inequality_examples() {
    let grid = Grid2D::unit_torus(8).unwrap();
    let t = QuadraticDifferential::real(0.5);
    assert!(inequality_check(&ScalarField::constant(grid, 0.0), &t).unwrap().holds());
    match inequality_check(&ScalarField::constant(grid, 0.5f64.ln()), &t).unwrap() {
        InequalityVerdict::Fails { points, .. } => assert_eq!(points.len(), grid.len()),
        v => panic!("{v:?}"),
    }
    let disk = Grid2D::disk_inscribed(16, 0.7).unwrap();
    let phi = ScalarField::from_fn(disk, liouville_exact);
    assert!(inequality_check(&phi, &QuadraticDifferential::zero()).unwrap().holds());
}

#[test]
fn isolation_of_liouville_disk_solution() {
    let disk = Grid2D::disk_inscribed(33, 0.7).unwrap();
    let phi = ScalarField::from_fn(disk, liouville_exact);
    let rep = isolation_check(&phi, &QuadraticDifferential::zero(), EquationVariant::Cosh).unwrap();
    assert!(rep.isolated);
    assert!(rep.eigen_min >= phi.min_value().exp() - 1e-9);
}

#[test]
fn gauss_bonnet_examples() {
    let grid = Grid2D::unit_torus(8).unwrap();
    assert!(gauss_bonnet_bound(0, &QuadraticDifferential::zero(), &grid).unwrap().is_satisfiable());
    assert!(!gauss_bonnet_bound(0, &QuadraticDifferential::real(1.0), &grid).unwrap().is_satisfiable());
    assert!(gauss_bonnet_verdict(-2, 5.0).is_satisfiable());
}

#[test]
fn strip_profile_symmetry_and_small_interval() {
    let p = strip_ode_oracle(Complex64::new(1.0, 0.0), EquationVariant::Cosh, (0.0, 0.4), (0.3, 0.3), 41).unwrap();
    for k in 0..41 {
        assert!((p[k] - p[40 - k]).abs() < 1e-10);
    }
    // small L: phi'' ~ 16 constant, so phi ~ 8 x (x - L)
    let l = 1e-2;
    let p = strip_ode_oracle(Complex64::new(1.0, 0.0), EquationVariant::Cosh, (0.0, l), (0.0, 0.0), 11).unwrap();
    for (k, v) in p.iter().enumerate() {
        let x = l * k as f64 / 10.0;
        let lin = 8.0 * x * (x - l);
        assert!((v - lin).abs() < 1e-3 * l * l, "{v} {lin}");
    }
}

#[test]
fn strip_newton_matches_profile() {
    let c = Complex64::new(0.6, 0.8);
    let errs: Vec<f64> = [17usize, 33]
        .iter()
        .map(|&n| {
            let grid = Grid2D::rectangle(n, n, (0.0, 0.0), (0.5, 0.5)).unwrap();
            let prof = strip_ode_oracle(c, EquationVariant::Cosh, (0.0, 0.5), (0.2, -0.1), n).unwrap();
            let t = QuadraticDifferential::constant(c);
            let bd = |x: f64, _y: f64| prof[(x / 0.5 * (n - 1) as f64).round() as usize];
            let phi0 = default_initial_guess(&grid, &t, Some(&bd)).unwrap();
            let rep = newton_solve(&phi0, &t, EquationVariant::Cosh, &Default::default()).unwrap();
            (0..grid.len())
                .map(|k| (rep.phi.values()[k] - prof[grid.ij(k).0]).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(errs[0] / errs[1] > 3.0, "{errs:?}");
}

#[test]
fn disk_liouville_error_and_order() {
    let e1 = disk_error(33);
    let e2 = disk_error(65);
    assert!(e2 < 1e-3);
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.3, "order {order}");
}
