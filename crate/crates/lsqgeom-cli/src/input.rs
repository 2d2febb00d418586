//! Input parsing: headerless numeric CSV and the compact descriptor
//! strings for penalties, planar bodies, width targets, and kernels.
//! Every error message names the flag or file that caused it.

use lsqgeom::geometry::{ConvexBody2D, CosineKernel, CovarianceKernel, SquaredExponentialKernel};
use lsqgeom::model::{PenaltySpec, SignConstraint};
use ndarray::{Array1, Array2};
use std::path::Path;

fn read_to_string(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn parse_float(tok: &str, path: &Path, line: usize) -> Result<f64, String> {
    tok.trim().parse::<f64>().map_err(|_| {
        format!(
            "{} line {}: not a decimal number: {:?}",
            path.display(),
            line,
            tok.trim()
        )
    })
}

/// Single-column CSV: one decimal float per line.
pub fn read_vector(path: &Path) -> Result<Array1<f64>, String> {
    let text = read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line.contains(',') {
            return Err(format!(
                "{} line {}: expected a single column, found a comma",
                path.display(),
                i + 1
            ));
        }
        out.push(parse_float(line, path, i + 1)?);
    }
    if out.is_empty() {
        return Err(format!("{}: no rows", path.display()));
    }
    Ok(Array1::from_vec(out))
}

/// Row-major CSV: one row per line, comma-separated decimal floats.
pub fn read_matrix(path: &Path) -> Result<Array2<f64>, String> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, String> = line
            .split(',')
            .map(|tok| parse_float(tok, path, i + 1))
            .collect();
        let row = row?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(format!(
                    "{} line {}: {} columns, expected {}",
                    path.display(),
                    i + 1,
                    row.len(),
                    first.len()
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format!("{}: no rows", path.display()));
    }
    let (n, p) = (rows.len(), rows[0].len());
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((n, p), flat).expect("shape checked above"))
}

fn bad_penalty(s: &str, why: &str) -> String {
    format!("--penalty {s:?}: {why} (accepted: l1 | l1=DIM | box=R1,R2,... | balls=LO-HI:R;LO-HI:R;... | cone=+,-,0,...)")
}

/// Penalty descriptor. `dim` is the dimension implied by the data when
/// there is data; descriptors that carry their own dimension must agree
/// with it.
pub fn parse_penalty(s: &str, dim: Option<usize>) -> Result<PenaltySpec, String> {
    let check_dim = |got: usize| -> Result<usize, String> {
        match dim {
            Some(d) if d != got => Err(bad_penalty(
                s,
                &format!("describes {got} coordinates but the design has {d}"),
            )),
            _ => Ok(got),
        }
    };
    if s == "l1" {
        let d = dim.ok_or_else(|| bad_penalty(s, "no data to take the dimension from; use l1=DIM"))?;
        return PenaltySpec::l1(d).map_err(|e| bad_penalty(s, &e.to_string()));
    }
    let (kind, body) = s
        .split_once('=')
        .ok_or_else(|| bad_penalty(s, "unrecognized form"))?;
    match kind {
        "l1" => {
            let d: usize = body
                .parse()
                .map_err(|_| bad_penalty(s, "dimension must be a positive integer"))?;
            PenaltySpec::l1(check_dim(d)?).map_err(|e| bad_penalty(s, &e.to_string()))
        }
        "box" => {
            let radii: Result<Vec<f64>, _> = body.split(',').map(str::parse::<f64>).collect();
            let radii = radii.map_err(|_| bad_penalty(s, "radii must be decimal numbers"))?;
            check_dim(radii.len())?;
            PenaltySpec::boxed(radii).map_err(|e| bad_penalty(s, &e.to_string()))
        }
        "balls" => {
            let mut groups = Vec::new();
            let mut radii = Vec::new();
            for part in body.split(';') {
                let (range, r) = part
                    .split_once(':')
                    .ok_or_else(|| bad_penalty(s, "each group needs LO-HI:R"))?;
                let (lo, hi) = range
                    .split_once('-')
                    .ok_or_else(|| bad_penalty(s, "group range needs LO-HI"))?;
                let lo: usize = lo
                    .parse()
                    .map_err(|_| bad_penalty(s, "group bounds must be integers"))?;
                let hi: usize = hi
                    .parse()
                    .map_err(|_| bad_penalty(s, "group bounds must be integers"))?;
                if hi < lo {
                    return Err(bad_penalty(s, "group range is empty"));
                }
                groups.push((lo..=hi).collect::<Vec<usize>>());
                radii.push(
                    r.parse::<f64>()
                        .map_err(|_| bad_penalty(s, "radius must be a decimal number"))?,
                );
            }
            check_dim(groups.iter().map(Vec::len).sum())?;
            PenaltySpec::product_l2_balls(groups, radii).map_err(|e| bad_penalty(s, &e.to_string()))
        }
        "cone" => {
            let signs: Result<Vec<SignConstraint>, String> = body
                .split(',')
                .map(|t| match t.trim() {
                    "+" => Ok(SignConstraint::NonNegative),
                    "-" => Ok(SignConstraint::NonPositive),
                    "0" => Ok(SignConstraint::Free),
                    other => Err(bad_penalty(s, &format!("unknown sign {other:?}"))),
                })
                .collect();
            let signs = signs?;
            check_dim(signs.len())?;
            PenaltySpec::orthant_cone(signs).map_err(|e| bad_penalty(s, &e.to_string()))
        }
        _ => Err(bad_penalty(s, "unrecognized form")),
    }
}

fn bad_body(flag: &str, s: &str, why: &str) -> String {
    format!("{flag} {s:?}: {why} (accepted: square | disk:R | polygon:X,Y;X,Y;...)")
}

pub fn parse_body(flag: &str, s: &str) -> Result<ConvexBody2D, String> {
    if s == "square" {
        return Ok(ConvexBody2D::unit_square());
    }
    if let Some(r) = s.strip_prefix("disk:") {
        let r: f64 = r
            .parse()
            .map_err(|_| bad_body(flag, s, "radius must be a decimal number"))?;
        return ConvexBody2D::disk(r).map_err(|e| bad_body(flag, s, &e.to_string()));
    }
    if let Some(pts) = s.strip_prefix("polygon:") {
        let mut vertices = Vec::new();
        for pair in pts.split(';') {
            let (x, y) = pair
                .split_once(',')
                .ok_or_else(|| bad_body(flag, s, "each vertex needs X,Y"))?;
            let x: f64 = x
                .parse()
                .map_err(|_| bad_body(flag, s, "vertex coordinates must be decimal numbers"))?;
            let y: f64 = y
                .parse()
                .map_err(|_| bad_body(flag, s, "vertex coordinates must be decimal numbers"))?;
            vertices.push([x, y]);
        }
        return ConvexBody2D::polygon(vertices).map_err(|e| bad_body(flag, s, &e.to_string()));
    }
    Err(bad_body(flag, s, "unrecognized form"))
}

pub fn parse_signs(s: &str) -> Result<Vec<SignConstraint>, String> {
    s.split(',')
        .map(|t| match t.trim() {
            "+" => Ok(SignConstraint::NonNegative),
            "-" => Ok(SignConstraint::NonPositive),
            "0" => Ok(SignConstraint::Free),
            other => Err(format!(
                "--signs: unknown sign {other:?} (use + - 0, comma-separated)"
            )),
        })
        .collect()
}

pub enum KernelChoice {
    Cosine(CosineKernel),
    SquaredExponential(SquaredExponentialKernel),
}

impl KernelChoice {
    pub fn name(&self) -> String {
        match self {
            KernelChoice::Cosine(_) => "cosine".into(),
            KernelChoice::SquaredExponential(k) => format!("sqexp:{}", k.length_scale),
        }
    }
}

impl CovarianceKernel for KernelChoice {
    fn cov(&self, s: f64, t: f64) -> f64 {
        match self {
            KernelChoice::Cosine(k) => k.cov(s, t),
            KernelChoice::SquaredExponential(k) => k.cov(s, t),
        }
    }
    fn dcov_ds(&self, s: f64, t: f64) -> f64 {
        match self {
            KernelChoice::Cosine(k) => k.dcov_ds(s, t),
            KernelChoice::SquaredExponential(k) => k.dcov_ds(s, t),
        }
    }
    fn d2cov_dsdt(&self, s: f64, t: f64) -> f64 {
        match self {
            KernelChoice::Cosine(k) => k.d2cov_dsdt(s, t),
            KernelChoice::SquaredExponential(k) => k.d2cov_dsdt(s, t),
        }
    }
}

pub fn parse_kernel(s: &str) -> Result<KernelChoice, String> {
    if s == "cosine" {
        return Ok(KernelChoice::Cosine(CosineKernel));
    }
    if let Some(ell) = s.strip_prefix("sqexp:") {
        let ell: f64 = ell
            .parse()
            .map_err(|_| format!("--kernel {s:?}: length scale must be a decimal number"))?;
        return SquaredExponentialKernel::new(ell)
            .map(KernelChoice::SquaredExponential)
            .map_err(|e| format!("--kernel {s:?}: {e}"));
    }
    Err(format!(
        "--kernel {s:?}: unrecognized (accepted: cosine | sqexp:LENGTH_SCALE)"
    ))
}

/// `LO,HI,COUNT` for --grid.
pub fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--grid {s:?}: expected LO,HI,COUNT"));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| format!("--grid {s:?}: LO must be a decimal number"))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| format!("--grid {s:?}: HI must be a decimal number"))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| format!("--grid {s:?}: COUNT must be a positive integer"))?;
    Ok((lo, hi, count))
}

pub fn parse_radii(flag: &str, s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("{flag} {s:?}: radii must be decimal numbers"))
        })
        .collect()
}
