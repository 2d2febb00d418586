//! Critical radius of a unit-variance smooth Gaussian process on an
//! interval, through the second-moment ratio of the doubly-conditioned
//! field.
//!
//! For a unit-variance process with covariance `C` and second spectral
//! moment `lambda_2(x) = d2C/ds dt (x,x)`, conditioning `f(y)` on
//! `(f(x), f'(x))` leaves variance `1 - C^2 - C_1^2 / lambda_2` (where
//! `C_1 = dC/ds (x,y)`; `f(x)` and `f'(x)` are uncorrelated at unit
//! variance). The normalized field `f^x(y)` divides by `1 - C(x,y)`, and
//! the supremum of its second moment over well-separated pairs is the
//! squared cotangent of the critical radius:
//! `r_c = pi/2 - atan( sup^(1/2) )`.

use crate::error::{Error, Result};

pub trait CovarianceKernel {
    fn cov(&self, s: f64, t: f64) -> f64;
    /// partial derivative in the first argument
    fn dcov_ds(&self, s: f64, t: f64) -> f64;
    /// mixed second partial
    fn d2cov_dsdt(&self, s: f64, t: f64) -> f64;
}

/// `C(s, t) = cos(s - t)`: the unit-speed great circle. Its critical
/// radius is exactly pi/2.
#[derive(Debug, Clone, Copy)]
pub struct CosineKernel;

impl CovarianceKernel for CosineKernel {
    fn cov(&self, s: f64, t: f64) -> f64 {
        (s - t).cos()
    }
    fn dcov_ds(&self, s: f64, t: f64) -> f64 {
        -(s - t).sin()
    }
    fn d2cov_dsdt(&self, s: f64, t: f64) -> f64 {
        (s - t).cos()
    }
}

/// `C(s, t) = exp(-(s-t)^2 / (2 l^2))`.
#[derive(Debug, Clone, Copy)]
pub struct SquaredExponentialKernel {
    pub length_scale: f64,
}

impl SquaredExponentialKernel {
    pub fn new(length_scale: f64) -> Result<Self> {
        if !length_scale.is_finite() || length_scale <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "length scale must be finite and positive, got {length_scale}"
            )));
        }
        Ok(SquaredExponentialKernel { length_scale })
    }
}

impl CovarianceKernel for SquaredExponentialKernel {
    fn cov(&self, s: f64, t: f64) -> f64 {
        let d = (s - t) / self.length_scale;
        (-0.5 * d * d).exp()
    }
    fn dcov_ds(&self, s: f64, t: f64) -> f64 {
        let l2 = self.length_scale * self.length_scale;
        -((s - t) / l2) * self.cov(s, t)
    }
    fn d2cov_dsdt(&self, s: f64, t: f64) -> f64 {
        let l2 = self.length_scale * self.length_scale;
        let d2 = (s - t) * (s - t);
        (1.0 / l2 - d2 / (l2 * l2)) * self.cov(s, t)
    }
}

/// `E[(f^x(y))^2] = (1 - C^2 - C_1^2 / lambda_2) / (1 - C)^2` for one
/// ordered pair. Errors on perfectly correlated pairs and on kernels
/// without a positive second spectral moment.
pub fn conditional_ratio<K: CovarianceKernel>(kernel: &K, x: f64, y: f64) -> Result<f64> {
    let c = kernel.cov(x, y);
    let c1 = kernel.dcov_ds(x, y);
    let lam2 = kernel.d2cov_dsdt(x, x);
    if lam2.is_nan() || lam2 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "second spectral moment at x = {x} is {lam2}; need > 0"
        )));
    }
    let denom = 1.0 - c;
    if denom.abs() <= 1e-12 {
        return Err(Error::InvalidInput(format!(
            "pair ({x}, {y}) is perfectly correlated; the normalized field is undefined"
        )));
    }
    let num = 1.0 - c * c - c1 * c1 / lam2;
    // three-term cancellation: when the conditional variance is exactly
    // zero (processes linear in (f(x), f'(x))) the computed value is pure
    // roundoff; snap anything within a few ulps of the summand scale to 0
    // so the ratio (and the radius) come out exact there
    let scale = 1.0 + c * c + (c1 * c1 / lam2).abs();
    let num = if num.abs() <= 16.0 * f64::EPSILON * scale {
        0.0
    } else {
        num
    };
    Ok(num.max(0.0) / (denom * denom))
}

#[derive(Debug, Clone, Copy)]
pub struct CriticalRadiusEstimate {
    /// supremum of the conditional second-moment ratio over admissible pairs
    pub cot_sq: f64,
    /// `pi/2 - atan(sqrt(cot_sq))`
    pub r_c: f64,
    /// pair attaining the supremum
    pub argmax: (f64, f64),
    /// number of ordered pairs examined
    pub pairs: usize,
}

/// Evaluate the ratio over all ordered grid pairs at separation at least
/// `delta` and convert the supremum to a critical radius.
pub fn critical_radius_process<K: CovarianceKernel>(
    kernel: &K,
    grid: &[f64],
    delta: f64,
) -> Result<CriticalRadiusEstimate> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "grid points" });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "separation delta must be finite and positive, got {delta}"
        )));
    }
    // the process must be unit variance for the closed-form conditioning
    for &x in grid {
        let v = kernel.cov(x, x);
        if (v - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "kernel is not unit variance at x = {x}: C(x,x) = {v}"
            )));
        }
    }
    for w in grid.windows(2) {
        let asym = (kernel.cov(w[0], w[1]) - kernel.cov(w[1], w[0])).abs();
        if asym > 1e-8 {
            return Err(Error::InvalidInput(format!(
                "kernel is not symmetric near ({}, {})",
                w[0], w[1]
            )));
        }
    }
    let min_sep = delta * (1.0 - 1e-12);
    let mut best = -1.0f64;
    let mut argmax = (grid[0], grid[0]);
    let mut pairs = 0usize;
    for &x in grid {
        for &y in grid {
            if (x - y).abs() < min_sep {
                continue;
            }
            let ratio = conditional_ratio(kernel, x, y)?;
            pairs += 1;
            if ratio > best {
                best = ratio;
                argmax = (x, y);
            }
        }
    }
    if pairs == 0 {
        return Err(Error::InvalidInput(format!(
            "no grid pairs at separation >= {delta}; shrink delta or widen the grid"
        )));
    }
    let cot_sq = best.max(0.0);
    Ok(CriticalRadiusEstimate {
        cot_sq,
        r_c: std::f64::consts::FRAC_PI_2 - cot_sq.sqrt().atan(),
        argmax,
        pairs,
    })
}

/// Evenly spaced grid over `[a, b]` with the given number of points.
pub fn uniform_grid(a: f64, b: f64, count: usize) -> Result<Vec<f64>> {
    if !a.is_finite() || !b.is_finite() || b <= a {
        return Err(Error::InvalidInput(format!(
            "need finite endpoints with a < b, got [{a}, {b}]"
        )));
    }
    if count < 2 {
        return Err(Error::InvalidInput("grid needs at least two points".into()));
    }
    let step = (b - a) / (count - 1) as f64;
    Ok((0..count).map(|i| a + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn cosine_kernel_critical_radius_is_half_pi() {
        let grid = uniform_grid(0.0, 0.9 * PI, 41).unwrap();
        let delta = 2.0 * (grid[1] - grid[0]);
        let est = critical_radius_process(&CosineKernel, &grid, delta).unwrap();
        assert!(est.cot_sq.abs() < 1e-10, "cot_sq = {}", est.cot_sq);
        assert!((est.r_c - FRAC_PI_2).abs() < 1e-8);
    }

    #[test]
    fn sq_exp_ratio_matches_closed_form() {
        let kernel = SquaredExponentialKernel::new(1.0).unwrap();
        for &d in &[0.4, 1.0, 2.0] {
            let got = conditional_ratio(&kernel, 0.0, d).unwrap();
            let c = (-0.5 * d * d).exp();
            let expect = (1.0 - (1.0 + d * d) * c * c) / (1.0 - c).powi(2);
            assert!((got - expect).abs() < 1e-12, "d = {d}: {got} vs {expect}");
        }
    }

    #[test]
    fn sq_exp_radius_is_positive_and_below_half_pi() {
        let kernel = SquaredExponentialKernel::new(1.0).unwrap();
        let grid = uniform_grid(0.0, 4.0, 81).unwrap();
        let delta = 2.0 * (grid[1] - grid[0]);
        let est = critical_radius_process(&kernel, &grid, delta).unwrap();
        assert!(est.cot_sq > 0.0);
        assert!(est.r_c > 0.0 && est.r_c < FRAC_PI_2);
    }

    #[test]
    fn non_unit_variance_rejected() {
        struct Scaled;
        impl CovarianceKernel for Scaled {
            fn cov(&self, s: f64, t: f64) -> f64 {
                2.0 * (s - t).cos()
            }
            fn dcov_ds(&self, s: f64, t: f64) -> f64 {
                -2.0 * (s - t).sin()
            }
            fn d2cov_dsdt(&self, s: f64, t: f64) -> f64 {
                2.0 * (s - t).cos()
            }
        }
        let grid = uniform_grid(0.0, 1.0, 5).unwrap();
        assert!(critical_radius_process(&Scaled, &grid, 0.5).is_err());
    }

    #[test]
    fn perfect_correlation_rejected() {
        // cosine kernel over a full period: the pair (0, 2 pi) repeats
        let grid = vec![0.0, PI, 2.0 * PI];
        assert!(critical_radius_process(&CosineKernel, &grid, 1.0).is_err());
    }
}
