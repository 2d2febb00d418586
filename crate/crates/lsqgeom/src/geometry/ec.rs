//! Euler characteristic densities of the standard normal, and the tail
//! series built from them.
//!
//! `rho_0(u)` is the normal upper tail; for `j >= 1`,
//! `rho_j(u) = (2 pi)^{-(j+1)/2} H_{j-1}(u) exp(-u^2/2)` with the
//! probabilists' Hermite polynomials. They satisfy
//! `rho_j' = -sqrt(2 pi) rho_{j+1}`, which is what makes them the right
//! basis for tube and chi-bar tails.

use ndarray::Array2;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Probabilists' Hermite polynomial `H_j(u)`:
/// `H_0 = 1, H_1 = u, H_{j+1} = u H_j - j H_{j-1}`.
pub fn hermite(j: usize, u: f64) -> f64 {
    match j {
        0 => 1.0,
        1 => u,
        _ => {
            let mut hm = 1.0; // H_0
            let mut h = u; // H_1
            for k in 1..j {
                let next = u * h - k as f64 * hm;
                hm = h;
                h = next;
            }
            h
        }
    }
}

/// `P(N(0,1) > u)`.
pub fn normal_upper_tail(u: f64) -> f64 {
    0.5 * erfc(u / std::f64::consts::SQRT_2)
}

/// Euler characteristic density `rho_j(u)`.
pub fn ec_density(j: usize, u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::NonFinite { what: "ec_density argument" });
    }
    if j == 0 {
        return Ok(normal_upper_tail(u));
    }
    let tau = std::f64::consts::TAU; // 2 pi
    let scale = tau.powf(-((j as f64 + 1.0) / 2.0));
    Ok(scale * hermite(j - 1, u) * (-0.5 * u * u).exp())
}

/// Truncated tail series `sum_m l[m] rho_m(u)` — the Euler characteristic
/// approximation to `P(sup > u)` given coefficients `l`.
pub fn sup_tail_approx(l: &[f64], u: f64) -> Result<f64> {
    if l.is_empty() {
        return Err(Error::InvalidInput("coefficient list is empty".into()));
    }
    if l.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "sup_tail_approx coefficients",
        });
    }
    let mut total = 0.0;
    for (m, &lm) in l.iter().enumerate() {
        total += lm * ec_density(m, u)?;
    }
    Ok(total)
}

/// `P(chibar^2 > u^2) = sum_j v_j P(chi^2_j > u^2)` for mixture weights
/// `v_0..v_d` (the `j = 0` atom never exceeds a positive level).
pub fn chi_bar_tail(weights: &[f64], u: f64) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidInput("weight list is empty".into()));
    }
    if weights.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(Error::InvalidInput(
            "mixture weights must be finite and nonnegative".into(),
        ));
    }
    if !u.is_finite() || u < 0.0 {
        return Err(Error::InvalidInput(format!(
            "threshold must be finite and nonnegative, got {u}"
        )));
    }
    let mut total = 0.0;
    for (j, &vj) in weights.iter().enumerate() {
        if j == 0 || vj == 0.0 {
            continue;
        }
        total += vj * chi_sq_upper_tail(j, u * u);
    }
    Ok(total)
}

/// `P(chi^2_j > x)` via the regularized incomplete gamma function.
pub fn chi_sq_upper_tail(j: usize, x: f64) -> f64 {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(j as f64)
        .expect("degrees of freedom >= 1")
        .sf(x)
}

/// Coefficients `a[j][m]` of the exact finite expansion
/// `P(chi_j > u) = sum_m a[j][m] rho_m(u)`, for `j, m <= d`. Row 0 is
/// zero; row `j` is supported on `m = j-1, j-3, ...`.
///
/// They come from expanding the chi density's power `u^{j-1}` in Hermite
/// polynomials and integrating each term:
/// `a[j][m] = (2 pi)^{(m+1)/2} (j-1)! / (2^{j/2-1} Gamma(j/2) 2^k k! m!)`
/// with `k = (j-1-m)/2`.
pub fn chi_tail_ec_coeffs(d: usize) -> Array2<f64> {
    let mut a = Array2::zeros((d + 1, d + 1));
    let tau = std::f64::consts::TAU;
    for j in 1..=d {
        let jf = j as f64;
        let norm = 2.0f64.powf(jf / 2.0 - 1.0) * gamma(jf / 2.0);
        let mut m = j - 1;
        loop {
            let k = (j - 1 - m) / 2;
            let coeff = tau.powf((m as f64 + 1.0) / 2.0) * factorial(j - 1)
                / (norm * 2.0f64.powi(k as i32) * factorial(k) * factorial(m));
            a[[j, m]] = coeff;
            if m < 2 {
                break;
            }
            m -= 2;
        }
    }
    a
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Convert conic intrinsic-volume weights `v_0..v_d` of a cone in R^d to
/// the tail-series coefficients of its spherical cross-section:
/// `L_m = sum_j v_j a[j][m]`, so that
/// `P(||proj_C(g)|| > u) = sum_m L_m rho_m(u)` exactly.
pub fn conic_to_spherical(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.len() < 2 {
        return Err(Error::InvalidInput(
            "need weights v_0..v_d with d >= 1".into(),
        ));
    }
    let d = weights.len() - 1;
    let a = chi_tail_ec_coeffs(d);
    let mut l = vec![0.0; d];
    for (m, lm) in l.iter_mut().enumerate() {
        for (j, &vj) in weights.iter().enumerate() {
            *lm += vj * a[[j, m]];
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hermite_small_cases() {
        let u = 1.3;
        assert_eq!(hermite(0, u), 1.0);
        assert_eq!(hermite(1, u), u);
        assert!((hermite(2, u) - (u * u - 1.0)).abs() < 1e-14);
        assert!((hermite(3, u) - (u * u * u - 3.0 * u)).abs() < 1e-14);
        assert!((hermite(4, u) - (u.powi(4) - 6.0 * u * u + 3.0)).abs() < 1e-13);
    }

    #[test]
    fn ec_density_values() {
        // rho_0(0) = 1/2; rho_1(u) = e^{-u^2/2}/(2 pi)
        assert!((ec_density(0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let u = 0.7;
        let r1 = ec_density(1, u).unwrap();
        assert!((r1 - (-0.5 * u * u).exp() / (2.0 * PI)).abs() < 1e-15);
        // rho_2(0) = 0 since H_1(0) = 0
        assert!(ec_density(2, 0.0).unwrap().abs() < 1e-18);
    }

    #[test]
    fn derivative_identity_rho() {
        // rho_j'(u) = -sqrt(2 pi) rho_{j+1}(u), Richardson central difference
        let h = 0.03;
        for j in 0..5usize {
            for &u in &[0.3, 1.0, 2.2] {
                let d1 = (ec_density(j, u + h).unwrap() - ec_density(j, u - h).unwrap())
                    / (2.0 * h);
                let d2 = (ec_density(j, u + h / 2.0).unwrap()
                    - ec_density(j, u - h / 2.0).unwrap())
                    / h;
                let extrap = (4.0 * d2 - d1) / 3.0;
                let target = -(2.0 * PI).sqrt() * ec_density(j + 1, u).unwrap();
                assert!(
                    (extrap - target).abs() < 1e-6,
                    "j={j} u={u}: {extrap} vs {target}"
                );
            }
        }
    }

    #[test]
    fn chi_conversion_known_coefficients() {
        let a = chi_tail_ec_coeffs(4);
        assert!((a[[1, 0]] - 2.0).abs() < 1e-12);
        assert!((a[[2, 1]] - 2.0 * PI).abs() < 1e-12);
        assert!((a[[3, 0]] - 2.0).abs() < 1e-12);
        assert!((a[[3, 2]] - 4.0 * PI).abs() < 1e-12);
        assert_eq!(a[[0, 0]], 0.0);
        assert_eq!(a[[2, 0]], 0.0); // even j has no m=0 term
    }

    #[test]
    fn chi_tail_expansion_matches_gamma_tail() {
        // P(chi_3 > 1) through the rho series vs the chi-squared tail
        let a = chi_tail_ec_coeffs(3);
        for &u in &[0.5, 1.0, 1.7, 2.5] {
            for j in 1..=3usize {
                let direct = chi_sq_upper_tail(j, u * u);
                let mut series = 0.0;
                for m in 0..=3 {
                    series += a[[j, m]] * ec_density(m, u).unwrap();
                }
                // the gamma route is good to ~1e-11; the series route to
                // machine precision
                assert!(
                    (direct - series).abs() < 1e-9,
                    "j={j} u={u}: {direct} vs {series}"
                );
            }
        }
    }

    #[test]
    fn chi_bar_tail_mixture() {
        // half-line weights (1/2, 1/2): P = 1/2 P(chi2_1 > u^2) = Phi-bar(u)
        let t = chi_bar_tail(&[0.5, 0.5], 1.1).unwrap();
        assert!((t - normal_upper_tail(1.1)).abs() < 1e-9);
    }

    #[test]
    fn orthant_spherical_coefficients() {
        let l2 = conic_to_spherical(&[0.25, 0.5, 0.25]).unwrap();
        assert!((l2[0] - 1.0).abs() < 1e-12);
        assert!((l2[1] - PI / 2.0).abs() < 1e-12);
        let l3 = conic_to_spherical(&[0.125, 0.375, 0.375, 0.125]).unwrap();
        assert!((l3[0] - 1.0).abs() < 1e-12);
        assert!((l3[1] - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!((l3[2] - PI / 2.0).abs() < 1e-12);
    }
}
