//! Tube volumes around convex planar bodies, and intrinsic volumes
//! recovered from them.
//!
//! The area of the r-tube around a convex body `A` in the plane is the
//! finite polynomial `|A_r| = L_2 + 2 r L_1 + pi r^2 L_0`: fitting that
//! polynomial over several radii recovers `(L_0, L_1, L_2)`, which can
//! be compared against area and half-perimeter computed directly.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{IntrinsicVolumeEstimate, IvMethod};
use crate::linalg::{cholesky_solve, sym_eigen};
use crate::rng::{par_samples, SampleStream};

#[derive(Debug, Clone)]
pub enum ConvexBody2D {
    /// Convex polygon, vertices in counterclockwise order.
    Polygon { vertices: Vec<[f64; 2]> },
    /// Disk of the given radius centered at the origin.
    Disk { radius: f64 },
}

impl ConvexBody2D {
    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(
                "polygon needs at least three vertices".into(),
            ));
        }
        if vertices.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "polygon vertices" });
        }
        let n = vertices.len();
        // convexity + orientation: every cross product nonnegative, at
        // least some strictly positive area
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross < -1e-12 {
                return Err(Error::InvalidInput(format!(
                    "vertices are not in convex counterclockwise position (turn at vertex {})",
                    (i + 1) % n
                )));
            }
        }
        let body = ConvexBody2D::Polygon { vertices };
        if body.area() <= 1e-12 {
            return Err(Error::InvalidInput("polygon is degenerate (zero area)".into()));
        }
        Ok(body)
    }

    pub fn disk(radius: f64) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "disk radius must be finite and positive, got {radius}"
            )));
        }
        Ok(ConvexBody2D::Disk { radius })
    }

    pub fn unit_square() -> Self {
        ConvexBody2D::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            ConvexBody2D::Disk { radius } => std::f64::consts::PI * radius * radius,
            ConvexBody2D::Polygon { vertices } => {
                let n = vertices.len();
                let mut s = 0.0;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    s += a[0] * b[1] - b[0] * a[1];
                }
                0.5 * s
            }
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self {
            ConvexBody2D::Disk { radius } => std::f64::consts::TAU * radius,
            ConvexBody2D::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % n];
                        ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
                    })
                    .sum()
            }
        }
    }

    /// Distance from a point to the body (0 inside).
    pub fn distance(&self, pt: [f64; 2]) -> f64 {
        match self {
            ConvexBody2D::Disk { radius } => {
                let r = (pt[0] * pt[0] + pt[1] * pt[1]).sqrt();
                (r - radius).max(0.0)
            }
            ConvexBody2D::Polygon { vertices } => {
                let n = vertices.len();
                let mut inside = true;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let cross = (b[0] - a[0]) * (pt[1] - a[1]) - (b[1] - a[1]) * (pt[0] - a[0]);
                    if cross < 0.0 {
                        inside = false;
                        break;
                    }
                }
                if inside {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for i in 0..n {
                    best = best.min(segment_distance(vertices[i], vertices[(i + 1) % n], pt));
                }
                best
            }
        }
    }

    /// Support function `h(v) = sup_{x in A} x.v`.
    pub fn support(&self, v: [f64; 2]) -> f64 {
        match self {
            ConvexBody2D::Disk { radius } => radius * (v[0] * v[0] + v[1] * v[1]).sqrt(),
            ConvexBody2D::Polygon { vertices } => vertices
                .iter()
                .map(|x| x[0] * v[0] + x[1] * v[1])
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        match self {
            ConvexBody2D::Disk { radius } => ([-radius, -radius], [*radius, *radius]),
            ConvexBody2D::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for d in 0..2 {
                        lo[d] = lo[d].min(v[d]);
                        hi[d] = hi[d].max(v[d]);
                    }
                }
                (lo, hi)
            }
        }
    }
}

fn segment_distance(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq <= 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct TubeVolume {
    pub volume: f64,
    pub std_error: f64,
}

/// Monte Carlo area of the r-tube: rejection sampling over the bounding
/// box of the tube.
pub fn tube_volume_mc(
    body: &ConvexBody2D,
    r: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<TubeVolume> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidInput(format!(
            "tube radius must be finite and nonnegative, got {r}"
        )));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidInput("mc_samples must be at least 1".into()));
    }
    let stream = SampleStream::new(seed, "tube-volume");
    Ok(tube_volume_on_stream(body, r, mc_samples, &stream))
}

fn tube_volume_on_stream(
    body: &ConvexBody2D,
    r: f64,
    mc_samples: u64,
    stream: &SampleStream,
) -> TubeVolume {
    let (lo, hi) = body.bounding_box();
    let lo = [lo[0] - r, lo[1] - r];
    let hi = [hi[0] + r, hi[1] + r];
    let box_area = (hi[0] - lo[0]) * (hi[1] - lo[1]);
    let hits = par_samples(stream, mc_samples, |_, rng| {
        let x = lo[0] + (hi[0] - lo[0]) * rng.random::<f64>();
        let y = lo[1] + (hi[1] - lo[1]) * rng.random::<f64>();
        u64::from(body.distance([x, y]) <= r)
    });
    let n = mc_samples as f64;
    let p = hits.iter().sum::<u64>() as f64 / n;
    TubeVolume {
        volume: box_area * p,
        std_error: box_area * (p * (1.0 - p) / n).sqrt(),
    }
}

/// Estimate tube areas at several radii and fit the quadratic
/// `V(r) = L_2 + 2 r L_1 + pi r^2 L_0` by weighted least squares.
/// Returns `(L_0, L_1, L_2)` with standard errors propagated from the
/// per-radius Monte Carlo noise.
pub fn steiner_fit(
    body: &ConvexBody2D,
    radii: &[f64],
    mc_samples: u64,
    seed: u64,
) -> Result<IntrinsicVolumeEstimate> {
    let mut distinct: Vec<f64> = Vec::new();
    for &r in radii {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidInput(format!(
                "tube radius must be finite and nonnegative, got {r}"
            )));
        }
        if !distinct.iter().any(|&d| (d - r).abs() <= 1e-9) {
            distinct.push(r);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least three distinct radii to identify three coefficients, got {}",
            distinct.len()
        )));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidInput("mc_samples must be at least 1".into()));
    }
    let root = SampleStream::new(seed, "steiner-fit");
    let mut volumes = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let stream = root.substream(&format!("radius-{i}"));
        volumes.push(tube_volume_on_stream(body, r, mc_samples, &stream));
    }
    // weighted normal equations for coefficients ordered (L_2, L_1, L_0)
    let vbar = volumes.iter().map(|v| v.volume.abs()).fold(1.0, f64::max);
    let mut ata = Array2::<f64>::zeros((3, 3));
    let mut atv = Array1::<f64>::zeros(3);
    for (tv, &r) in volumes.iter().zip(radii.iter()) {
        let row = [1.0, 2.0 * r, std::f64::consts::PI * r * r];
        let var = tv.std_error * tv.std_error;
        let w = 1.0 / var.max(1e-12 * vbar * vbar);
        for a in 0..3 {
            for b in 0..3 {
                ata[[a, b]] += w * row[a] * row[b];
            }
            atv[a] += w * row[a] * tv.volume;
        }
    }
    let eig = sym_eigen(&ata);
    if eig.min_value() <= 1e-10 * eig.max_value() {
        return Err(Error::InvalidInput(
            "radii are too close together; the quadratic fit is ill conditioned".into(),
        ));
    }
    let coef = cholesky_solve(&ata, &atv).ok_or(Error::Singular {
        what: "Steiner fit normal equations",
    })?;
    // covariance of the weighted LS estimate is (A^T W A)^{-1}
    let mut cov_diag = [0.0f64; 3];
    for (j, slot) in cov_diag.iter_mut().enumerate() {
        let mut e = Array1::<f64>::zeros(3);
        e[j] = 1.0;
        let col = cholesky_solve(&ata, &e).ok_or(Error::Singular {
            what: "Steiner fit normal equations",
        })?;
        *slot = col[j];
    }
    Ok(IntrinsicVolumeEstimate {
        values: vec![coef[2], coef[1], coef[0]],
        std_errors: vec![
            cov_diag[2].max(0.0).sqrt(),
            cov_diag[1].max(0.0).sqrt(),
            cov_diag[0].max(0.0).sqrt(),
        ],
        method: IvMethod::SteinerFit,
    })
}

/// For 2D bodies the intrinsic volumes are available directly:
/// `L_0 = 1`, `L_1 = perimeter / 2`, `L_2 = area`.
pub fn exact_intrinsic_volumes_2d(body: &ConvexBody2D) -> IntrinsicVolumeEstimate {
    IntrinsicVolumeEstimate {
        values: vec![1.0, 0.5 * body.perimeter(), body.area()],
        std_errors: vec![0.0; 3],
        method: IvMethod::Exact2D,
    }
}
