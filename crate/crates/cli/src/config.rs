use std::path::{Path, PathBuf};

use coshlab_core::field::{BoundaryKind, Grid2D, QuadraticDifferential};
use coshlab_core::pde::{EquationVariant, NewtonOptions};
use coshlab_core::toda::{CartanMatrix, HoloConnectionData};
use coshlab_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::commands::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Torus,
    Rectangle,
    DiskInscribed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    /// Side lengths for a torus or rectangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<[f64; 2]>,
    /// Lower-left corner of a rectangle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub resolution: usize,
}

/// Dirichlet data on the ring of a bounded domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BoundarySpec {
    /// `-2 ln(1 - |z|^2)`.
    LiouvilleExact,
    Constant { value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub variant: EquationVariant,
    #[serde(default = "QuadraticDifferential::zero")]
    pub t: QuadraticDifferential,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialGuess {
    /// Amplitude of a seeded uniform perturbation added to the default guess.
    pub perturbation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub flatness: f64,
    pub flatness_order: f64,
    pub reality: f64,
    pub su11: f64,
    pub curvature: f64,
    pub mean_curvature: f64,
    pub second_form: f64,
    pub geodesic: f64,
    pub surface_curvature: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            flatness: 1e-2,
            flatness_order: 1.7,
            reality: 1e-12,
            su11: 1e-12,
            curvature: 5e-2,
            mean_curvature: 1e-8,
            second_form: 1e-5,
            geodesic: 1e-6,
            surface_curvature: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DevelopingSpec {
    /// Every `stride`-th grid node in each direction.
    pub stride: usize,
    pub lambda: [f64; 2],
    pub tol: f64,
}

impl Default for DevelopingSpec {
    fn default() -> Self {
        Self {
            stride: 8,
            lambda: [1.0, 0.0],
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSpec {
    pub flatness_lambdas: Vec<[f64; 2]>,
    pub reality_samples: usize,
    pub curvature_points: usize,
    /// Probe points satisfy `|l| <= l_max`.
    pub l_max: f64,
    pub monodromy_loops: Vec<Vec<[f64; 2]>>,
    pub monodromy_lambdas: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub developing_map: Option<DevelopingSpec>,
    /// Solution files for `verify` and `monodromy`; two files of the same
    /// domain at different resolutions add measured convergence orders.
    pub solutions: Vec<PathBuf>,
    pub tolerances: Tolerances,
}

impl Default for ChecksSpec {
    fn default() -> Self {
        Self {
            flatness_lambdas: vec![[1.0, 0.0], [0.5, 0.0], [2.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            reality_samples: 10,
            curvature_points: 20,
            l_max: 1.0,
            monodromy_loops: Vec::new(),
            monodromy_lambdas: vec![[1.0, 0.0]],
            developing_map: None,
            solutions: Vec::new(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TodaMode {
    /// Build `phi` from holomorphic data on the run's domain.
    #[default]
    Liouville,
    /// Evaluate the Toda residual of supplied fields.
    Residual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TodaSpec {
    #[serde(default)]
    pub mode: TodaMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<HoloConnectionData>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<CartanMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fields: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    pub equation: EquationSpec,
    #[serde(default)]
    pub solver: NewtonOptions,
    #[serde(default)]
    pub initial_guess: InitialGuess,
    #[serde(default)]
    pub checks: ChecksSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toda: Option<TodaSpec>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn parse_config(text: &str, ov: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    if let Some(o) = &ov.out {
        cfg.output = o.clone();
    }
    if let Some(n) = ov.resolution {
        cfg.domain.resolution = n;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, ov: &Overrides) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
    parse_config(&text, ov)
}

fn nonzero(list: &[[f64; 2]], what: &str) -> Result<(), CliError> {
    for l in list {
        if !(l[0].is_finite() && l[1].is_finite()) || (l[0] == 0.0 && l[1] == 0.0) {
            return Err(bad(format!("{what} must be finite and nonzero, got {l:?}")));
        }
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let d = &self.domain;
        if d.resolution < 17 {
            return Err(bad(format!("resolution must be at least 17, got {}", d.resolution)));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match d.kind {
            DomainKind::Torus | DomainKind::Rectangle => {
                let l = d.lengths.ok_or_else(|| bad("domain.lengths is required"))?;
                if !(positive(l[0]) && positive(l[1])) {
                    return Err(bad("domain.lengths must be positive"));
                }
            }
            DomainKind::DiskInscribed => {
                if !d.radius.is_some_and(positive) {
                    return Err(bad("domain.radius must be positive"));
                }
            }
        }
        if d.kind != DomainKind::Torus && self.equation.boundary.is_none() {
            return Err(bad("bounded domains need equation.boundary"));
        }
        if d.kind == DomainKind::Torus && self.equation.t.as_constant().is_none() {
            return Err(bad("only a constant t is admissible on a torus"));
        }
        nonzero(&self.checks.flatness_lambdas, "flatness lambda")?;
        nonzero(&self.checks.monodromy_lambdas, "monodromy lambda")?;
        if let Some(dm) = &self.checks.developing_map {
            nonzero(&[dm.lambda], "developing-map lambda")?;
            if dm.stride == 0 {
                return Err(bad("developing_map.stride must be positive"));
            }
        }
        if !(self.checks.l_max.is_finite() && self.checks.l_max > 0.0) {
            return Err(bad("checks.l_max must be positive"));
        }
        if let Some(t) = &self.toda {
            match t.mode {
                TodaMode::Liouville if t.data.is_none() => return Err(bad("toda.data is required")),
                TodaMode::Residual if t.fields.is_empty() || t.cartan.is_none() => {
                    return Err(bad("toda residual mode needs fields and a cartan matrix"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D, CliError> {
        let d = &self.domain;
        let n = d.resolution;
        let g = match d.kind {
            DomainKind::Torus => {
                let l = d.lengths.unwrap_or([1.0, 1.0]);
                Grid2D::periodic(n, n, l[0], l[1])
            }
            DomainKind::Rectangle => {
                let l = d.lengths.unwrap_or([1.0, 1.0]);
                let o = d.origin.unwrap_or([0.0, 0.0]);
                Grid2D::rectangle(n, n, (o[0], o[1]), (o[0] + l[0], o[1] + l[1]))
            }
            DomainKind::DiskInscribed => Grid2D::disk_inscribed(n, d.radius.unwrap_or(1.0)),
        };
        g.map_err(|e| bad(e.to_string()))
    }

    pub fn is_periodic(&self) -> bool {
        self.domain.kind == DomainKind::Torus
    }

    pub fn boundary_value(&self, x: f64, y: f64) -> f64 {
        match &self.equation.boundary {
            Some(BoundarySpec::LiouvilleExact) => -2.0 * (1.0 - x * x - y * y).ln(),
            Some(BoundarySpec::Constant { value }) => *value,
            None => 0.0,
        }
    }

    pub fn boundary_kind(&self) -> BoundaryKind {
        if self.is_periodic() {
            BoundaryKind::Periodic
        } else {
            BoundaryKind::Dirichlet
        }
    }
}

pub(crate) fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}
