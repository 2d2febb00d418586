//! Gaussian width: `L_1(A) = sqrt(2 pi) E h_A(g)` for standard normal
//! `g`. The scaling is pinned by the classical values — a unit segment
//! has width 1 and the unit disk has width pi — and matches the Steiner
//! coefficient of the same body, which is what the tube fit checks.

use crate::error::{Error, Result};
use crate::geometry::tube::ConvexBody2D;
use crate::model::{support_function, PenaltySpec};
use crate::rng::{mc_moments, normal_vector, par_samples, SampleStream};

#[derive(Debug, Clone)]
pub enum WidthTarget {
    /// A bounded penalty set in its ambient dimension.
    Penalty(PenaltySpec),
    /// A planar body.
    Body(ConvexBody2D),
    /// An interval `[lo, hi]` on the line (possibly a single point).
    Interval { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct WidthEstimate {
    /// `E h(g)` and its standard error
    pub mean_support: f64,
    pub mean_support_se: f64,
    /// `sqrt(2 pi) E h(g)` and its standard error
    pub l1: f64,
    pub l1_std_error: f64,
    pub mc_samples: u64,
}

/// Monte Carlo Gaussian width of the target set.
pub fn gaussian_width(target: &WidthTarget, mc_samples: u64, seed: u64) -> Result<WidthEstimate> {
    if mc_samples == 0 {
        return Err(Error::InvalidInput("mc_samples must be at least 1".into()));
    }
    let stream = SampleStream::new(seed, "gaussian-width");
    let vals: Vec<f64> = match target {
        WidthTarget::Penalty(k) => {
            if k.is_cone() {
                return Err(Error::Unbounded(
                    "cone penalty sets have infinite Gaussian width".into(),
                ));
            }
            let d = k.dimension();
            par_samples(&stream, mc_samples, |_, rng| {
                let g = normal_vector(rng, d);
                support_function(&g, k).expect("finite sample, matching dimension")
            })
        }
        WidthTarget::Body(body) => par_samples(&stream, mc_samples, |_, rng| {
            let g = normal_vector(rng, 2);
            body.support([g[0], g[1]])
        }),
        WidthTarget::Interval { lo, hi } => {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::InvalidInput(format!(
                    "interval [{lo}, {hi}] must be finite with lo <= hi"
                )));
            }
            let (lo, hi) = (*lo, *hi);
            par_samples(&stream, mc_samples, |_, rng| {
                let g = normal_vector(rng, 1)[0];
                (lo * g).max(hi * g)
            })
        }
    };
    let m = mc_moments(&vals);
    let scale = std::f64::consts::TAU.sqrt();
    Ok(WidthEstimate {
        mean_support: m.mean,
        mean_support_se: m.std_error,
        l1: scale * m.mean,
        l1_std_error: scale * m.std_error,
        mc_samples,
    })
}
