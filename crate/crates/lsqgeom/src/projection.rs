//! Metric projection onto scaled penalty sets, and the proximal map of
//! the penalty obtained from it through the Moreau decomposition
//! `prox_{t h_K}(v) = v - proj_{t K}(v)`.

use ndarray::Array1;

use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::model::{PenaltyKind, PenaltySpec, SignConstraint};

/// A coordinate within this distance of a bound counts as sitting on it
/// when the face dimension is read off.
pub const FACE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub point: Array1<f64>,
    pub distance: f64,
    /// Dimension of the lowest-dimensional face of `t K` containing the
    /// projected point; `None` for sets with curved boundary.
    pub face_dimension: Option<usize>,
}

fn check_input(v: &Array1<f64>, k: &PenaltySpec, t: f64) -> Result<()> {
    if v.len() != k.dimension() {
        return Err(Error::DimensionMismatch {
            what: "projection argument",
            expected: k.dimension(),
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite {
            what: "projection argument",
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!(
            "projection scale must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// Euclidean projection of `v` onto `t K`. `t = 0` collapses every `K`
/// to the origin.
pub fn project_scaled(v: &Array1<f64>, k: &PenaltySpec, t: f64) -> Result<ProjectionResult> {
    check_input(v, k, t)?;
    if t == 0.0 {
        // 0 * K = {0} for every K, cones included
        let point = Array1::zeros(v.len());
        return Ok(ProjectionResult {
            distance: norm2(v),
            face_dimension: k.is_polyhedral().then_some(0),
            point,
        });
    }
    match k.kind() {
        PenaltyKind::Box { radii } => {
            let point = Array1::from_iter(
                v.iter()
                    .zip(radii.iter())
                    .map(|(&x, &r)| x.clamp(-t * r, t * r)),
            );
            let face = point
                .iter()
                .zip(radii.iter())
                .filter(|(&p, &r)| t * r - p.abs() > FACE_TOL)
                .count();
            let distance = norm2(&(v - &point));
            Ok(ProjectionResult {
                point,
                distance,
                face_dimension: Some(face),
            })
        }
        PenaltyKind::ProductL2Balls { groups, radii } => {
            let mut point = v.clone();
            for (group, &r) in groups.iter().zip(radii.iter()) {
                let ss: f64 = group.iter().map(|&i| v[i] * v[i]).sum();
                let norm = ss.sqrt();
                if norm > t * r {
                    let scale = t * r / norm;
                    for &i in group {
                        point[i] *= scale;
                    }
                }
            }
            let distance = norm2(&(v - &point));
            Ok(ProjectionResult {
                point,
                distance,
                face_dimension: None,
            })
        }
        PenaltyKind::OrthantCone { signs } => {
            // cones are scale invariant; any t > 0 projects the same way
            let point = Array1::from_iter(v.iter().zip(signs.iter()).map(|(&x, s)| match s {
                SignConstraint::NonPositive => x.min(0.0),
                SignConstraint::NonNegative => x.max(0.0),
                SignConstraint::Free => x,
            }));
            let face = point
                .iter()
                .zip(signs.iter())
                .filter(|(&p, s)| matches!(s, SignConstraint::Free) || p.abs() > FACE_TOL)
                .count();
            let distance = norm2(&(v - &point));
            Ok(ProjectionResult {
                point,
                distance,
                face_dimension: Some(face),
            })
        }
    }
}

/// `prox_{t h_K}(v) = v - proj_{t K}(v)`. For a box this is per-coordinate
/// soft thresholding; for ball products, group shrinkage; for a cone, the
/// projection onto the polar cone.
pub fn prox_penalty(v: &Array1<f64>, k: &PenaltySpec, t: f64) -> Result<Array1<f64>> {
    let proj = project_scaled(v, k, t)?;
    Ok(v - &proj.point)
}

/// Distance from `v` to `t K`: zero means membership (up to roundoff).
pub fn membership_check(v: &Array1<f64>, k: &PenaltySpec, t: f64) -> Result<f64> {
    Ok(project_scaled(v, k, t)?.distance)
}
