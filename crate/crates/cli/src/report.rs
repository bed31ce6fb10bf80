//! Report files. Everything written here is a pure function of the run
//! configuration: no timestamps, no absolute paths, stable key order.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::commands::CliError;
use crate::config::RunConfig;

/// Embedded in every report so numbers can be audited against their
/// conventions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub wirtinger: &'static str,
    pub residual: &'static str,
    pub transport: &'static str,
    pub metric_sign: &'static str,
    pub metric_orientation: &'static str,
    pub calibration_constant: f64,
    pub curvature_identity: &'static str,
}

impl Conventions {
    pub fn current() -> Self {
        Self {
            wirtinger: "d/dz = (d/dx - i d/dy)/2, d/dz d/dzbar = (d_xx + d_yy)/4",
            residual: "1/2 d dbar phi - e^phi - s |t|^2 e^-phi, s = +1 cosh, -1 sinh, 0 liouville",
            transport: "dg = g A; loop factors multiply on the right in traversal order",
            metric_sign: "cosh: +dl^2 (riemannian); sinh: -dl^2 (lorentzian)",
            metric_orientation: "reflected: cross term -4 cosh l sinh l (t dz^2 + c.c.)",
            calibration_constant: 4.0,
            curvature_identity: "R_iklm = kappa (g_il g_km - g_im g_kl), kappa = -1",
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    conventions: Conventions,
    config: &'a RunConfig,
    result: &'a T,
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io(dir, e))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    Ok(BufWriter::new(fs::File::create(path).map_err(|e| io(path, e))?))
}

/// Pretty JSON report with the convention block and the configuration echoed.
pub fn write_report<T: Serialize>(cfg: &RunConfig, command: &str, name: &str, result: &T) -> Result<PathBuf, CliError> {
    let path = cfg.output.join(name);
    let env = Envelope {
        command,
        conventions: Conventions::current(),
        config: cfg,
        result,
    };
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &env).map_err(|e| io(&path, e))?;
    writeln!(w).map_err(|e| io(&path, e))?;
    w.flush().map_err(|e| io(&path, e))?;
    Ok(path)
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = create(path)?;
    for r in rows {
        serde_json::to_writer(&mut w, r).map_err(|e| io(path, e))?;
        writeln!(w).map_err(|e| io(path, e))?;
    }
    w.flush().map_err(|e| io(path, e))
}

pub fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), String>) -> Result<(), CliError> {
    let mut w = create(path)?;
    f(&mut w).map_err(|e| io(path, e))?;
    w.flush().map_err(|e| io(path, e))
}
