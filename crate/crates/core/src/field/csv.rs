//! Plain-text field exchange.
//!
//! ```text
//! # nx=<int> ny=<int> hx=<float> hy=<float> boundary=<periodic|dirichlet>
//! i,j,x,y,re[,im]
//! ```
//!
//! Rows are written in row-major order. Floats use the shortest
//! representation that round-trips exactly.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{BoundaryKind, ComplexField, Field, FieldError, FieldValue, Grid2D, ScalarField};

/// A field read back from CSV; the presence of an `im` column decides the kind.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldData {
    Scalar(ScalarField),
    Complex(ComplexField),
}

impl FieldData {
    pub fn into_scalar(self) -> Result<ScalarField, FieldError> {
        match self {
            FieldData::Scalar(f) => Ok(f),
            FieldData::Complex(_) => Err(FieldError::Csv("expected a real field".into())),
        }
    }
    pub fn into_complex(self) -> ComplexField {
        match self {
            FieldData::Scalar(f) => f.to_complex(),
            FieldData::Complex(f) => f,
        }
    }
}

fn header(grid: &Grid2D) -> String {
    format!(
        "# nx={} ny={} hx={} hy={} boundary={}",
        grid.nx(),
        grid.ny(),
        grid.hx(),
        grid.hy(),
        grid.boundary().as_str()
    )
}

fn write_rows<T: FieldValue, W: Write>(
    f: &Field<T>,
    mut w: W,
    fmt: impl Fn(T) -> String,
) -> Result<(), FieldError> {
    let grid = f.grid();
    writeln!(w, "{}", header(grid))?;
    for (k, &v) in f.values().iter().enumerate() {
        let (i, j) = grid.ij(k);
        let (x, y) = grid.coords(k);
        writeln!(w, "{i},{j},{x},{y},{}", fmt(v))?;
    }
    Ok(())
}

pub fn write_scalar_csv<W: Write>(f: &ScalarField, w: W) -> Result<(), FieldError> {
    write_rows(f, w, |v| format!("{v}"))
}

pub fn write_complex_csv<W: Write>(f: &ComplexField, w: W) -> Result<(), FieldError> {
    write_rows(f, w, |v| format!("{},{}", v.re, v.im))
}

fn parse_header(line: &str) -> Result<(usize, usize, f64, f64, BoundaryKind), FieldError> {
    let bad = || FieldError::Csv(format!("malformed header: {line}"));
    let body = line.strip_prefix('#').ok_or_else(bad)?;
    let (mut nx, mut ny, mut hx, mut hy, mut bd) = (None, None, None, None, None);
    for tok in body.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(bad)?;
        match key {
            "nx" => nx = val.parse().ok(),
            "ny" => ny = val.parse().ok(),
            "hx" => hx = val.parse().ok(),
            "hy" => hy = val.parse().ok(),
            "boundary" => {
                bd = match val {
                    "periodic" => Some(BoundaryKind::Periodic),
                    "dirichlet" => Some(BoundaryKind::Dirichlet),
                    _ => None,
                }
            }
            _ => return Err(bad()),
        }
    }
    Ok((
        nx.ok_or_else(bad)?,
        ny.ok_or_else(bad)?,
        hx.ok_or_else(bad)?,
        hy.ok_or_else(bad)?,
        bd.ok_or_else(bad)?,
    ))
}

/// Parse a field CSV. The grid origin is taken from the `(0, 0)` row.
pub fn read_field_csv<R: BufRead>(r: R) -> Result<FieldData, FieldError> {
    let mut lines = r.lines();
    let head = lines
        .next()
        .ok_or_else(|| FieldError::Csv("empty input".into()))??;
    let (nx, ny, hx, hy, bd) = parse_header(head.trim())?;
    let n = nx * ny;
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let mut ncols = None;
    let mut seen = vec![false; n];
    let mut origin = None;
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || FieldError::Csv(format!("row {}: {line}", lineno + 2));
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 && cols.len() != 6 {
            return Err(bad());
        }
        if *ncols.get_or_insert(cols.len()) != cols.len() {
            return Err(FieldError::Csv("inconsistent column count".into()));
        }
        let i: usize = cols[0].trim().parse().map_err(|_| bad())?;
        let j: usize = cols[1].trim().parse().map_err(|_| bad())?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        if i >= nx || j >= ny {
            return Err(bad());
        }
        let k = j * nx + i;
        if i == 0 && j == 0 {
            origin = Some((num(cols[2])?, num(cols[3])?));
        }
        re[k] = num(cols[4])?;
        if cols.len() == 6 {
            im[k] = num(cols[5])?;
        }
        seen[k] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(FieldError::Csv("missing rows".into()));
    }
    let origin = origin.ok_or_else(|| FieldError::Csv("missing origin row".into()))?;
    let grid = Grid2D::new(nx, ny, hx, hy, origin, bd)?;
    Ok(match ncols {
        Some(5) => FieldData::Scalar(ScalarField::from_values(grid, re)?),
        _ => FieldData::Complex(ComplexField::from_values(
            grid,
            re.into_iter()
                .zip(im)
                .map(|(a, b)| Complex64::new(a, b))
                .collect(),
        )?),
    })
}
