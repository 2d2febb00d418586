//! Convex-geometry quantities behind the estimator's behavior: Euler
//! characteristic densities and tail series, conic intrinsic volumes,
//! Gaussian widths, tube volumes with Steiner fits, and critical radii
//! of unit-variance Gaussian processes.

pub mod conic;
pub mod critical;
pub mod ec;
pub mod tube;
pub mod width;

pub use conic::{
    conic_intrinsic_volumes, exact_orthant_weights, mean_chi_bar, sup_mc_validate, ConeDescriptor,
    SupValidation,
};
pub use critical::{
    conditional_ratio, critical_radius_process, uniform_grid, CosineKernel, CovarianceKernel,
    CriticalRadiusEstimate, SquaredExponentialKernel,
};
pub use ec::{
    chi_bar_tail, chi_tail_ec_coeffs, conic_to_spherical, ec_density, hermite, normal_upper_tail,
    sup_tail_approx,
};
pub use tube::{
    exact_intrinsic_volumes_2d, steiner_fit, tube_volume_mc, ConvexBody2D, TubeVolume,
};
pub use width::{gaussian_width, WidthEstimate, WidthTarget};

/// Intrinsic-volume style output shared by the conic Monte Carlo, the
/// Steiner tube fit, and the exact 2D formulas.
#[derive(Debug, Clone)]
pub struct IntrinsicVolumeEstimate {
    /// index j holds the j-th value (conic weight v_j, or Euclidean
    /// intrinsic volume L_j)
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub method: IvMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IvMethod {
    ConicMc,
    SteinerFit,
    Exact2D,
}
