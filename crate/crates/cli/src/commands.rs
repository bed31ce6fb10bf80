use std::f64::consts::{FRAC_PI_4, PI};
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use coshlab_core::connection::{
    build_family, degeneracy_check, developing_map, lambda_flatness_sweep, monodromy_with, reality_check,
    su11_check, FamilyTag, GridSampler, MonodromyOptions, MonodromyReport,
};
use coshlab_core::field::{
    interpolate, read_field_csv, write_scalar_csv, Grid2D, QuadraticDifferential, ScalarField,
};
use coshlab_core::linalg::mat2::{gen_h, max_abs};
use coshlab_core::metric::{
    curvature_identity_defect_with, fundamental_forms, gauss_curvature_2d, geodesic_defect, metric_direct,
    second_form_matrix, surface_metric, CurvatureProbe, DerivativeScheme, MetricConvention, MetricError,
    Orientation, Sym2,
};
use coshlab_core::pde::{
    default_initial_guess, newton_solve, obstruction_check, EquationVariant, Feasibility, PdeError,
    SolveSummary,
};
use coshlab_core::toda::{liouville_from_holomorphic, toda_residual, TodaReport};
use coshlab_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::config::{complex, BoundarySpec, RunConfig, TodaMode};
use crate::report::{write_jsonl, write_report, write_with};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("missing solution file {0}")]
    MissingSolution(PathBuf),
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 64,
            _ => 1,
        }
    }
}

/// Exit code, the files written (relative to the output directory) and a
/// one-line summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub code: i32,
    pub files: Vec<String>,
    pub summary: String,
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn rel(name: &str) -> String {
    name.to_string()
}

fn write_field(cfg: &RunConfig, name: &str, f: &ScalarField) -> Result<(), CliError> {
    write_with(&cfg.output.join(name), |w| write_scalar_csv(f, w).map_err(|e| e.to_string()))
}

fn read_solution(path: &Path) -> Result<ScalarField, CliError> {
    let file = File::open(path).map_err(|_| CliError::MissingSolution(path.to_path_buf()))?;
    read_field_csv(BufReader::new(file))
        .and_then(|d| d.into_scalar())
        .map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn solution_paths(cfg: &RunConfig) -> Vec<PathBuf> {
    if cfg.checks.solutions.is_empty() {
        vec![cfg.output.join("phi.csv")]
    } else {
        cfg.checks.solutions.clone()
    }
}

fn family_tags(v: EquationVariant) -> Vec<FamilyTag> {
    match v {
        EquationVariant::Sinh => vec![FamilyTag::Sg1, FamilyTag::Sg2],
        _ => vec![FamilyTag::Cosh],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct GridInfo {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    origin: [f64; 2],
    boundary: &'static str,
}

impl GridInfo {
    fn of(g: &Grid2D) -> Self {
        Self {
            nx: g.nx(),
            ny: g.ny(),
            hx: g.hx(),
            hy: g.hy(),
            origin: [g.origin().0, g.origin().1],
            boundary: g.boundary().as_str(),
        }
    }
}

// ---------------------------------------------------------------- solve

#[derive(Clone, Debug, PartialEq, Serialize)]
struct SolveResult {
    status: &'static str,
    variant: &'static str,
    grid: GridInfo,
    feasibility: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<SolveSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    history: Vec<f64>,
    /// Sup over the grid of `|phi + 2 ln(1 - |z|^2)|` when the boundary data
    /// come from that solution.
    #[serde(skip_serializing_if = "Option::is_none")]
    liouville_oracle_error: Option<f64>,
}

fn initial_guess(cfg: &RunConfig, grid: &Grid2D) -> Result<ScalarField, CliError> {
    let bf = |x: f64, y: f64| cfg.boundary_value(x, y);
    let boundary: Option<&dyn Fn(f64, f64) -> f64> = if cfg.is_periodic() { None } else { Some(&bf) };
    let mut phi = default_initial_guess(grid, &cfg.equation.t, boundary).map_err(fail)?;
    let amp = cfg.initial_guess.perturbation;
    if amp > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let periodic = grid.is_periodic();
        for (k, v) in phi.values_mut().iter_mut().enumerate() {
            if periodic || !grid.is_boundary(k) {
                *v += rng.gen_range(-amp..=amp);
            }
        }
    }
    Ok(phi)
}

fn feasibility_text(f: &Feasibility) -> String {
    match f {
        Feasibility::Feasible => "feasible".into(),
        Feasibility::NotApplicable => "not applicable (bounded domain)".into(),
        Feasibility::Infeasible { reason } => format!("infeasible: {reason}"),
    }
}

/// Solves the configured equation; writes `phi.csv` (on success) and
/// `solve.json`. Exit 0 on convergence, 2 on an obstruction, 1 otherwise.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let grid = cfg.grid()?;
    let t = &cfg.equation.t;
    let v = cfg.equation.variant;
    let feas = obstruction_check(t, &grid, v);
    let phi0 = initial_guess(cfg, &grid)?;
    let mut result = SolveResult {
        status: "converged",
        variant: v.name(),
        grid: GridInfo::of(&grid),
        feasibility: feasibility_text(&feas),
        message: None,
        summary: None,
        history: Vec::new(),
        liouville_oracle_error: None,
    };
    let mut files = Vec::new();
    let (code, summary) = match newton_solve(&phi0, t, v, &cfg.solver) {
        Ok(rep) => {
            write_field(cfg, "phi.csv", &rep.phi)?;
            files.push(rel("phi.csv"));
            if matches!(cfg.equation.boundary, Some(BoundarySpec::LiouvilleExact)) {
                let err = (0..grid.len())
                    .map(|k| {
                        let (x, y) = grid.coords(k);
                        (rep.phi.values()[k] + 2.0 * (1.0 - x * x - y * y).ln()).abs()
                    })
                    .fold(0.0, f64::max);
                result.liouville_oracle_error = Some(err);
            }
            let s = rep.summary();
            let line = format!(
                "{} after {} iterations, residual {:e}",
                if rep.status == coshlab_core::pde::SolveStatus::Converged { "converged" } else { "stopped" },
                s.iterations,
                s.residual_sup
            );
            let code = if rep.status == coshlab_core::pde::SolveStatus::Converged { 0 } else { 1 };
            if code != 0 {
                result.status = "no_convergence";
            }
            result.history = rep.history.clone();
            result.summary = Some(s);
            (code, line)
        }
        Err(PdeError::Obstruction(reason)) => {
            result.status = "obstruction";
            let msg = format!("obstruction: {reason}");
            result.message = Some(msg.clone());
            (2, msg)
        }
        Err(e @ PdeError::NoConvergence { .. }) => {
            result.status = "no_convergence";
            result.message = Some(e.to_string());
            (1, e.to_string())
        }
        Err(e) => {
            result.status = "failed";
            result.message = Some(e.to_string());
            (1, e.to_string())
        }
    };
    write_report(cfg, "solve", "solve.json", &result)?;
    files.push(rel("solve.json"));
    Ok(Outcome { code, files, summary })
}

// ---------------------------------------------------------------- verify

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check cannot be evaluated because the geometry degenerates there;
    /// expected for some solutions and not counted as a failure.
    Degenerate,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn bound(name: impl Into<String>, value: f64, tol: f64, detail: Option<String>) -> Self {
        Self {
            name: name.into(),
            status: if value <= tol { CheckStatus::Pass } else { CheckStatus::Fail },
            value,
            tolerance: Some(tol),
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
struct VerifyResult {
    variant: &'static str,
    grids: Vec<GridInfo>,
    passed: bool,
    checks: Vec<Check>,
}

fn probe_points(grid: &Grid2D, rng: &mut ChaCha8Rng, n: usize, l_max: f64, avoid_l: Option<f64>) -> Vec<[f64; 3]> {
    let (lx, ly) = grid.extent();
    let (x0, y0) = grid.origin();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = [
            x0 + lx * rng.gen_range(0.15..0.85),
            y0 + ly * rng.gen_range(0.15..0.85),
            rng.gen_range(-l_max..=l_max),
        ];
        if avoid_l.is_some_and(|a| (p[2].abs() - a).abs() < 0.05) {
            continue;
        }
        out.push(p);
    }
    out
}

fn random_lambdas(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(0.0..2.0 * PI)))
        .collect()
}

fn metric_variant(v: EquationVariant) -> EquationVariant {
    match v {
        EquationVariant::Sinh => EquationVariant::Sinh,
        _ => EquationVariant::Cosh,
    }
}

pub const ORIENTATION: Orientation = Orientation::Reflected;

fn convention() -> MetricConvention {
    MetricConvention::with_scale(4.0, ORIENTATION)
}

fn flatness_checks(
    cfg: &RunConfig,
    fields: &[ScalarField],
    t: &QuadraticDifferential,
    checks: &mut Vec<Check>,
) -> Result<(), CliError> {
    let lambdas: Vec<Complex64> = cfg.checks.flatness_lambdas.iter().map(|&l| complex(l)).collect();
    let tol = &cfg.checks.tolerances;
    for tag in family_tags(cfg.equation.variant) {
        let mut sweeps = Vec::new();
        for phi in fields {
            let fam = build_family(phi, t, tag, None).map_err(fail)?;
            sweeps.push(lambda_flatness_sweep(&fam, &lambdas).map_err(fail)?);
        }
        let fine = sweeps.last().expect("at least one solution");
        let worst = fine.samples.iter().map(|s| s.sup).fold(0.0, f64::max);
        let outer = fine.coefficient_sup[0].max(fine.coefficient_sup[4]);
        let lam0 = fine.coefficient_sup[2];
        let mut c = Check::bound(
            format!("flatness/{}", tag.name()),
            worst,
            tol.flatness,
            Some(format!("lambda^0 coefficient sup {lam0:e}, lambda^-2/lambda^2 sup {outer:e}")),
        );
        if outer > 1e-14 {
            c.status = CheckStatus::Fail;
        }
        checks.push(c);
        if sweeps.len() >= 2 {
            let coarse = &sweeps[sweeps.len() - 2];
            let hc = fields[fields.len() - 2].grid().hx();
            let hf = fields[fields.len() - 1].grid().hx();
            let mut min_order = f64::INFINITY;
            let mut orders = Vec::new();
            for (a, b) in coarse.samples.iter().zip(&fine.samples) {
                // both at roundoff: nothing to measure
                if a.sup < 1e-12 && b.sup < 1e-12 {
                    orders.push("exact".to_string());
                    continue;
                }
                let o = (a.sup / b.sup).ln() / (hc / hf).ln();
                min_order = min_order.min(o);
                orders.push(format!("{o:.3}"));
            }
            let value = if min_order.is_finite() { min_order } else { f64::NAN };
            checks.push(Check {
                name: format!("flatness-order/{}", tag.name()),
                status: if !min_order.is_finite() || min_order >= tol.flatness_order {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                value,
                tolerance: Some(tol.flatness_order),
                detail: Some(format!("orders per lambda: {}", orders.join(", "))),
            });
        }
    }
    Ok(())
}

fn surface_check(cfg: &RunConfig, phi: &ScalarField, t: &QuadraticDifferential, points: &[(f64, f64)]) -> Check {
    let tol = cfg.checks.tolerances.surface_curvature;
    let h = 2.0 * phi.grid().hx();
    let src = (phi.clone(), t.clone());
    match cfg.equation.variant {
        EquationVariant::Sinh => {
            let g2 = surface_metric(&src, 4.0);
            match gauss_curvature_2d(&g2, points, h) {
                Ok(k) => {
                    let d = k.iter().map(|v| (v + 1.0).abs()).fold(0.0, f64::max);
                    Check::bound("surface-curvature", d, tol, Some("|K + 1| of the sinh surface metric".into()))
                }
                Err(MetricError::Degenerate { at, det }) => Check {
                    name: "surface-curvature".into(),
                    status: CheckStatus::Degenerate,
                    value: det,
                    tolerance: None,
                    detail: Some(format!("surface metric degenerate at {at:?} (rho = |t|); expected for the constant solution")),
                },
                Err(e) => Check {
                    name: "surface-curvature".into(),
                    status: CheckStatus::Fail,
                    value: f64::NAN,
                    tolerance: Some(tol),
                    detail: Some(e.to_string()),
                },
            }
        }
        _ => {
            let g2 = |x: f64, y: f64| -> Result<Sym2, MetricError> {
                let p = interpolate(phi, x, y)?.0;
                Ok(Sym2::identity() * (4.0 * p.exp()))
            };
            match gauss_curvature_2d(&g2, points, h) {
                Ok(k) => {
                    let mut d = 0.0f64;
                    for (kv, &(x, y)) in k.iter().zip(points) {
                        let p = interpolate(phi, x, y).map(|r| r.0).unwrap_or(f64::NAN);
                        let want = -1.0 - t.at(Complex64::new(x, y)).norm_sqr() * (-2.0 * p).exp();
                        d = d.max((kv - want).abs());
                    }
                    Check::bound(
                        "surface-curvature",
                        d,
                        tol,
                        Some("|K - (-1 - |t|^2 e^-2phi)| of 4 e^phi |dz|^2".into()),
                    )
                }
                Err(e) => Check {
                    name: "surface-curvature".into(),
                    status: CheckStatus::Fail,
                    value: f64::NAN,
                    tolerance: Some(tol),
                    detail: Some(e.to_string()),
                },
            }
        }
    }
}

/// Runs the identity suite on stored solutions and writes `verify.json` and
/// `probes.jsonl` (one curvature probe per line). Exit 1 if any check fails.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let paths = solution_paths(cfg);
    let fields: Vec<ScalarField> = paths.iter().map(|p| read_solution(p)).collect::<Result<_, _>>()?;
    let phi = fields.last().expect("nonempty").clone();
    let grid = *phi.grid();
    let t = cfg.equation.t.clone();
    let v = cfg.equation.variant;
    let tol = cfg.checks.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();

    flatness_checks(cfg, &fields, &t, &mut checks)?;

    let lambdas = random_lambdas(&mut rng, cfg.checks.reality_samples);
    for tag in family_tags(v) {
        let fam = build_family(&phi, &t, tag, None).map_err(fail)?;
        let mut worst = 0.0f64;
        for &l in &lambdas {
            worst = worst.max(reality_check(&fam, l).map_err(fail)?);
        }
        checks.push(Check::bound(format!("reality/{}", tag.name()), worst, tol.reality, None));
        if tag != FamilyTag::Cosh {
            let d = su11_check(&fam, Complex64::new(1.0, 0.0)).map_err(fail)?;
            checks.push(Check::bound(format!("su11/{}", tag.name()), d, tol.su11, Some("lambda = 1".into())));
        }
        let deg = degeneracy_check(&fam);
        checks.push(Check {
            name: format!("degeneracy/{}", tag.name()),
            status: CheckStatus::Info,
            value: deg.max_det,
            tolerance: None,
            detail: Some(format!("commutator {:e}", deg.commutator)),
        });
    }

    let avoid = (v == EquationVariant::Sinh).then_some(FRAC_PI_4);
    let points = probe_points(&grid, &mut rng, cfg.checks.curvature_points, cfg.checks.l_max, avoid);
    let m = metric_direct((phi.clone(), t.clone()), metric_variant(v), convention());
    let scheme = DerivativeScheme { h: 2.0 * grid.hx(), levels: 3 };
    let mut probes: Vec<CurvatureProbe> = Vec::new();
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for &p in &points {
        match curvature_identity_defect_with(&m, p, -1.0, scheme) {
            Ok(pr) => {
                worst = worst.max(pr.defect);
                probes.push(pr);
            }
            Err(MetricError::Degenerate { .. }) => skipped += 1,
            Err(e) => return Err(fail(e)),
        }
    }
    checks.push(Check::bound(
        "curvature-identity",
        worst,
        tol.curvature,
        Some(format!("{} probes, {skipped} skipped as degenerate", probes.len())),
    ));

    let mut trace = 0.0f64;
    let mut second = 0.0f64;
    for p in &points {
        let f = fundamental_forms(&m, p[0], p[1], 1e-4).map_err(fail)?;
        trace = trace.max(f.mean_curvature_trace().abs());
        let want = second_form_matrix(t.at(Complex64::new(p[0], p[1]))) * (4.0 * ORIENTATION.sign());
        second = second.max((f.b() - want).abs().max() / want.abs().max().max(1.0));
    }
    checks.push(Check::bound("mean-curvature-trace", trace, tol.mean_curvature, None));
    checks.push(Check::bound(
        "second-fundamental-form",
        second,
        tol.second_form,
        Some("b against 4 (t dz^2 + c.c.) with the orientation sign".into()),
    ));

    let ls: Vec<f64> = if v == EquationVariant::Sinh {
        vec![-0.6, -0.3, 0.0, 0.3, 0.6]
    } else {
        (0..=8).map(|i| cfg.checks.l_max * (i as f64 / 4.0 - 1.0)).collect()
    };
    let mut geo = 0.0f64;
    for p in points.iter().take(3) {
        geo = geo.max(geodesic_defect(&m, (p[0], p[1]), &ls, DerivativeScheme::default()).map_err(fail)?);
    }
    checks.push(Check::bound("normal-geodesics", geo, tol.geodesic, None));

    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    checks.push(surface_check(cfg, &phi, &t, &xy));

    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    let result = VerifyResult {
        variant: v.name(),
        grids: fields.iter().map(|f| GridInfo::of(f.grid())).collect(),
        passed,
        checks,
    };
    write_jsonl(&cfg.output.join("probes.jsonl"), &probes)?;
    write_report(cfg, "verify", "verify.json", &result)?;
    let failed: Vec<&str> = result
        .checks
        .iter()
        .filter(|c| c.status == CheckStatus::Fail)
        .map(|c| c.name.as_str())
        .collect();
    let summary = if passed {
        format!("{} checks passed", result.checks.len())
    } else {
        format!("failed: {}", failed.join(", "))
    };
    Ok(Outcome {
        code: if passed { 0 } else { 1 },
        files: vec![rel("verify.json"), rel("probes.jsonl")],
        summary,
    })
}

// ---------------------------------------------------------------- monodromy

#[derive(Clone, Debug, PartialEq, Serialize)]
struct MonodromyRow {
    family: &'static str,
    #[serde(flatten)]
    report: MonodromyReport,
    error_estimate: f64,
    /// `|M^+ J M - J|` for the families valued in `su(1,1)` at real lambda.
    #[serde(skip_serializing_if = "Option::is_none")]
    pseudo_unitary_defect: Option<f64>,
}

fn default_loops(grid: &Grid2D) -> Vec<Vec<(f64, f64)>> {
    let (lx, ly) = grid.extent();
    let (x0, y0) = grid.origin();
    if grid.is_periodic() {
        vec![
            vec![(x0, y0 + 0.5 * ly), (x0 + lx, y0 + 0.5 * ly)],
            vec![(x0 + 0.5 * lx, y0), (x0 + 0.5 * lx, y0 + ly)],
        ]
    } else {
        let (cx, cy) = (x0 + 0.5 * lx, y0 + 0.5 * ly);
        let (a, b) = (0.3 * lx, 0.3 * ly);
        vec![vec![(cx - a, cy - b), (cx + a, cy - b), (cx + a, cy + b), (cx - a, cy + b)]]
    }
}

fn developing_mesh(cfg: &RunConfig, s: &GridSampler, spec: &crate::config::DevelopingSpec) -> Result<(), CliError> {
    let grid = *s.phi().grid();
    let lambda = complex(spec.lambda);
    let (ci, cj) = (grid.nx() / 2, grid.ny() / 2);
    let base = grid.coords(grid.idx(ci, cj));
    let mut rows = Vec::new();
    for j in (0..grid.ny()).step_by(spec.stride) {
        for i in (0..grid.nx()).step_by(spec.stride) {
            let p = grid.coords(grid.idx(i, j));
            let g = developing_map(s, lambda, &[base, p], spec.tol).map_err(fail)?;
            let h = g * g.adjoint();
            let x0 = 0.5 * (h[(0, 0)].re + h[(1, 1)].re);
            let x = [h[(0, 1)].re, h[(0, 1)].im, 0.5 * (h[(0, 0)].re - h[(1, 1)].re)];
            let ball = x.map(|c| c / (1.0 + x0));
            rows.push(format!(
                "{i},{j},{},{},{},{},{},{},{},{},{}",
                p.0,
                p.1,
                h[(0, 0)].re,
                h[(0, 1)].re,
                h[(0, 1)].im,
                h[(1, 1)].re,
                ball[0],
                ball[1],
                ball[2]
            ));
        }
    }
    write_with(&cfg.output.join("developing_map.csv"), |w| {
        let mut go = || -> std::io::Result<()> {
            writeln!(w, "# base=({},{}) lambda=({},{}) H = g g^+, ball = (Re H12, Im H12, (H11-H22)/2) / (1 + tr H / 2)", base.0, base.1, lambda.re, lambda.im)?;
            writeln!(w, "i,j,x,y,h11,h12_re,h12_im,h22,ball_x,ball_y,ball_z")?;
            for r in &rows {
                writeln!(w, "{r}")?;
            }
            Ok(())
        };
        go().map_err(|e| e.to_string())
    })
}

/// Holonomies of the solution's families around the configured loops
/// (`monodromy.jsonl`, one loop/lambda/family per line, plus
/// `monodromy.json`), and optionally the developing-map mesh.
pub fn cmd_monodromy(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let path = solution_paths(cfg).pop().expect("nonempty");
    let phi = read_solution(&path)?;
    let grid = *phi.grid();
    let loops: Vec<Vec<(f64, f64)>> = if cfg.checks.monodromy_loops.is_empty() {
        default_loops(&grid)
    } else {
        cfg.checks.monodromy_loops.iter().map(|l| l.iter().map(|p| (p[0], p[1])).collect()).collect()
    };
    let opts = MonodromyOptions::default();
    let j = gen_h();
    let mut rows = Vec::new();
    let mut files = vec![rel("monodromy.jsonl"), rel("monodromy.json")];
    let mut first_sampler = None;
    for tag in family_tags(cfg.equation.variant) {
        let s = GridSampler::new(phi.clone(), cfg.equation.t.clone(), tag).map_err(fail)?;
        for lp in &loops {
            for &l in &cfg.checks.monodromy_lambdas {
                let lambda = complex(l);
                let r = monodromy_with(&s, lambda, lp, &opts).map_err(fail)?;
                let pu = (tag != FamilyTag::Cosh && lambda.im == 0.0)
                    .then(|| max_abs(&(r.matrix.adjoint() * j * r.matrix - j)));
                rows.push(MonodromyRow {
                    family: tag.name(),
                    report: r.report(),
                    error_estimate: r.error,
                    pseudo_unitary_defect: pu,
                });
            }
        }
        first_sampler.get_or_insert(s);
    }
    if let (Some(spec), Some(s)) = (&cfg.checks.developing_map, &first_sampler) {
        developing_mesh(cfg, s, spec)?;
        files.push(rel("developing_map.csv"));
    }
    write_jsonl(&cfg.output.join("monodromy.jsonl"), &rows)?;
    write_report(cfg, "monodromy", "monodromy.json", &rows)?;
    Ok(Outcome {
        code: 0,
        files,
        summary: format!("{} holonomies", rows.len()),
    })
}

// ---------------------------------------------------------------- toda

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
enum TodaResult {
    Liouville {
        grid: GridInfo,
        report: TodaReport,
    },
    Residual {
        fields: Vec<String>,
        residual_sup: Vec<f64>,
    },
}

/// Liouville field from holomorphic data (`toda_phi.csv`) or Toda residuals
/// of supplied fields (`toda_residual_<k>.csv`), with `toda.json`.
pub fn cmd_toda(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.toda.as_ref().ok_or_else(|| CliError::Config("config has no toda section".into()))?;
    let mut files = Vec::new();
    let (result, summary) = match spec.mode {
        TodaMode::Liouville => {
            let data = spec.data.as_ref().expect("validated");
            let grid = cfg.grid()?;
            let (phi, report) = liouville_from_holomorphic(data, &grid).map_err(fail)?;
            write_field(cfg, "toda_phi.csv", &phi)?;
            files.push(rel("toda_phi.csv"));
            let line = format!("liouville residual {:e} (semi-analytic)", report.residual_semi_analytic);
            (TodaResult::Liouville { grid: GridInfo::of(&grid), report }, line)
        }
        TodaMode::Residual => {
            let cartan = spec.cartan.as_ref().expect("validated");
            let fields: Vec<ScalarField> = spec.fields.iter().map(|p| read_solution(p)).collect::<Result<_, _>>()?;
            let res = toda_residual(&fields, cartan).map_err(fail)?;
            let mut sups = Vec::new();
            for (k, r) in res.iter().enumerate() {
                let name = format!("toda_residual_{k}.csv");
                write_field(cfg, &name, r)?;
                files.push(name);
                sups.push(r.sup_norm_interior());
            }
            let line = format!("{} residual fields", res.len());
            (
                TodaResult::Residual {
                    fields: spec.fields.iter().map(|p| p.display().to_string()).collect(),
                    residual_sup: sups,
                },
                line,
            )
        }
    };
    write_report(cfg, "toda", "toda.json", &result)?;
    files.push(rel("toda.json"));
    Ok(Outcome { code: 0, files, summary })
}

// ---------------------------------------------------------------- report

#[derive(Clone, Debug, PartialEq, Serialize)]
struct Stage {
    command: &'static str,
    #[serde(flatten)]
    outcome: Outcome,
}

fn stage(command: &'static str, r: Result<Outcome, CliError>) -> Stage {
    let outcome = r.unwrap_or_else(|e| Outcome {
        code: e.exit_code(),
        files: Vec::new(),
        summary: e.to_string(),
    });
    Stage { command, outcome }
}

/// `solve`, then `verify`, `monodromy` and `toda` as configured, with an
/// index in `report.json`. An obstruction stops after `solve` with exit 2;
/// otherwise the exit code is the largest of the stages.
pub fn cmd_report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut stages = vec![stage("solve", cmd_solve(cfg))];
    let solved = stages[0].outcome.code == 0;
    if solved {
        stages.push(stage("verify", cmd_verify(cfg)));
        if !cfg.checks.monodromy_loops.is_empty() || cfg.checks.developing_map.is_some() {
            stages.push(stage("monodromy", cmd_monodromy(cfg)));
        }
    }
    if cfg.toda.is_some() && stages[0].outcome.code != 2 {
        stages.push(stage("toda", cmd_toda(cfg)));
    }
    let code = if stages[0].outcome.code == 2 {
        2
    } else {
        stages.iter().map(|s| s.outcome.code).max().unwrap_or(0)
    };
    write_report(cfg, "report", "report.json", &stages)?;
    let summary = stages
        .iter()
        .map(|s| format!("{}: {}", s.command, s.outcome.summary))
        .collect::<Vec<_>>()
        .join("; ");
    let mut files: Vec<String> = stages.iter().flat_map(|s| s.outcome.files.clone()).collect();
    files.push(rel("report.json"));
    Ok(Outcome { code, files, summary })
}
