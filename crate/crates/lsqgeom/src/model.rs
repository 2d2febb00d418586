//! Problem data and penalty descriptors.
//!
//! A penalty is the support function `h_K(b) = sup_{u in K} u.b` of a
//! closed convex set `K` containing the origin. Bounded choices of `K`
//! give norms (weighted l1 for a box, group norms for a product of
//! balls); cones give hard sign constraints, where the support function
//! is the indicator of the polar cone.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Per-coordinate constraint for a cone-shaped `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConstraint {
    /// coordinate of K restricted to `u <= 0`
    NonPositive,
    /// coordinate of K restricted to `u >= 0`
    NonNegative,
    /// coordinate of K unrestricted
    Free,
}

#[derive(Debug, Clone)]
pub enum PenaltyKind {
    /// `K = {u : |u_i| <= r_i}`; support function is the weighted l1 norm.
    Box { radii: Vec<f64> },
    /// `K = prod_g r_g B_2` over a partition of coordinates into groups;
    /// support function is the weighted sum of group norms.
    ProductL2Balls {
        groups: Vec<Vec<usize>>,
        radii: Vec<f64>,
    },
    /// `K` an orthant-type cone; support function is 0 on the polar cone
    /// and +infinity outside it.
    OrthantCone { signs: Vec<SignConstraint> },
}

/// A validated penalty set descriptor in a fixed ambient dimension.
#[derive(Debug, Clone)]
pub struct PenaltySpec {
    kind: PenaltyKind,
    dimension: usize,
}

impl PenaltySpec {
    pub fn boxed(radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidPenalty("box needs at least one radius".into()));
        }
        for (i, &r) in radii.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidPenalty(format!(
                    "box radius {i} must be finite and positive, got {r}"
                )));
            }
        }
        let dimension = radii.len();
        Ok(PenaltySpec {
            kind: PenaltyKind::Box { radii },
            dimension,
        })
    }

    /// Uniform box of radius 1: the plain l1 penalty.
    pub fn l1(dimension: usize) -> Result<Self> {
        Self::boxed(vec![1.0; dimension])
    }

    pub fn product_l2_balls(groups: Vec<Vec<usize>>, radii: Vec<f64>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidPenalty("need at least one group".into()));
        }
        if groups.len() != radii.len() {
            return Err(Error::InvalidPenalty(format!(
                "{} groups but {} radii",
                groups.len(),
                radii.len()
            )));
        }
        for (g, &r) in radii.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidPenalty(format!(
                    "group radius {g} must be finite and positive, got {r}"
                )));
            }
        }
        let mut seen: Vec<bool> = Vec::new();
        let mut dimension = 0usize;
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::InvalidPenalty(format!("group {g} is empty")));
            }
            for &idx in group {
                if idx >= seen.len() {
                    seen.resize(idx + 1, false);
                }
                if seen[idx] {
                    return Err(Error::InvalidPenalty(format!(
                        "coordinate {idx} appears in more than one group"
                    )));
                }
                seen[idx] = true;
                dimension = dimension.max(idx + 1);
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidPenalty(
                "groups must partition 0..p with no gaps".into(),
            ));
        }
        Ok(PenaltySpec {
            kind: PenaltyKind::ProductL2Balls { groups, radii },
            dimension,
        })
    }

    pub fn orthant_cone(signs: Vec<SignConstraint>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidPenalty("cone needs at least one coordinate".into()));
        }
        let dimension = signs.len();
        Ok(PenaltySpec {
            kind: PenaltyKind::OrthantCone { signs },
            dimension,
        })
    }

    pub fn kind(&self) -> &PenaltyKind {
        &self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_cone(&self) -> bool {
        matches!(self.kind, PenaltyKind::OrthantCone { .. })
    }

    pub fn is_bounded(&self) -> bool {
        !self.is_cone()
    }

    /// Boxes and orthant cones have faces of every intermediate dimension;
    /// ball products do not (their boundary is smooth within each group).
    pub fn is_polyhedral(&self) -> bool {
        matches!(
            self.kind,
            PenaltyKind::Box { .. } | PenaltyKind::OrthantCone { .. }
        )
    }
}

fn check_vector(v: &Array1<f64>, k: &PenaltySpec, what: &'static str) -> Result<()> {
    if v.len() != k.dimension() {
        return Err(Error::DimensionMismatch {
            what,
            expected: k.dimension(),
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { what });
    }
    Ok(())
}

/// `h_K(beta) = sup_{u in K} u.beta`. Returns `f64::INFINITY` when `K` is
/// a cone and `beta` lies outside its polar.
pub fn support_function(beta: &Array1<f64>, k: &PenaltySpec) -> Result<f64> {
    check_vector(beta, k, "support_function argument")?;
    match k.kind() {
        PenaltyKind::Box { radii } => Ok(beta
            .iter()
            .zip(radii.iter())
            .map(|(&b, &r)| r * b.abs())
            .sum()),
        PenaltyKind::ProductL2Balls { groups, radii } => {
            let mut total = 0.0;
            for (group, &r) in groups.iter().zip(radii.iter()) {
                let ss: f64 = group.iter().map(|&i| beta[i] * beta[i]).sum();
                total += r * ss.sqrt();
            }
            Ok(total)
        }
        PenaltyKind::OrthantCone { signs } => {
            // sup over the cone is 0 exactly when beta is in the polar cone
            // (each constrained coordinate has the opposite sign, each free
            // coordinate is zero) and +infinity otherwise.
            let in_polar = beta.iter().zip(signs.iter()).all(|(&b, s)| match s {
                SignConstraint::NonPositive => b >= 0.0,
                SignConstraint::NonNegative => b <= 0.0,
                SignConstraint::Free => b == 0.0,
            });
            Ok(if in_polar { 0.0 } else { f64::INFINITY })
        }
    }
}

/// Support function of the polar set, `h_{K^o}(v)`, which coincides with
/// the gauge of `K` itself: the smallest `t >= 0` with `v in t K`. This is
/// the dual-feasibility scale — `u in lambda K` iff `polar_gauge(u) <= lambda`.
/// For a cone it is 0 on the cone and +infinity off it.
pub fn polar_gauge(v: &Array1<f64>, k: &PenaltySpec) -> Result<f64> {
    check_vector(v, k, "polar_gauge argument")?;
    match k.kind() {
        PenaltyKind::Box { radii } => Ok(v
            .iter()
            .zip(radii.iter())
            .fold(0.0f64, |acc, (&x, &r)| acc.max(x.abs() / r))),
        PenaltyKind::ProductL2Balls { groups, radii } => {
            let mut best = 0.0f64;
            for (group, &r) in groups.iter().zip(radii.iter()) {
                let ss: f64 = group.iter().map(|&i| v[i] * v[i]).sum();
                best = best.max(ss.sqrt() / r);
            }
            Ok(best)
        }
        PenaltyKind::OrthantCone { signs } => {
            let inside = v.iter().zip(signs.iter()).all(|(&x, s)| match s {
                SignConstraint::NonPositive => x <= 0.0,
                SignConstraint::NonNegative => x >= 0.0,
                SignConstraint::Free => true,
            });
            Ok(if inside { 0.0 } else { f64::INFINITY })
        }
    }
}

/// Observed data `(y, X)` with an optional known noise level.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    y: Array1<f64>,
    x: Array2<f64>,
    sigma: Option<f64>,
}

impl RegressionProblem {
    pub fn new(y: Array1<f64>, x: Array2<f64>, sigma: Option<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                what: "design rows vs response length",
                expected: y.len(),
                got: x.nrows(),
            });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::InvalidInput("design matrix must be nonempty".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "response y" });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "design X" });
        }
        if let Some(s) = sigma {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "sigma must be finite and nonnegative, got {s}"
                )));
            }
        }
        Ok(RegressionProblem { y, x, sigma })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn design(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }
}

/// `1/2 ||y - X beta||^2 + lambda h_K(beta)`; infinite outside the
/// penalty's domain (cone case). `lambda = 0` drops the penalty term.
pub fn objective_value(
    problem: &RegressionProblem,
    k: &PenaltySpec,
    lambda: f64,
    beta: &Array1<f64>,
) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    if beta.len() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "objective_value beta",
            expected: problem.p(),
            got: beta.len(),
        });
    }
    if k.dimension() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "objective_value penalty dimension",
            expected: problem.p(),
            got: k.dimension(),
        });
    }
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "objective_value beta",
        });
    }
    let r = problem.y() - &problem.design().dot(beta);
    let fit = 0.5 * r.dot(&r);
    if lambda == 0.0 {
        return Ok(fit);
    }
    let h = support_function(beta, k)?;
    Ok(fit + lambda * h)
}

/// How a solve run finished.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIterReached,
}

/// Output of the proximal solver: the primal estimate, the dual vector
/// `u = X^T (y - X beta)`, the fit, and convergence diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub beta_hat: Array1<f64>,
    pub u_hat: Array1<f64>,
    pub mu_hat: Array1<f64>,
    pub lambda: f64,
    pub objective: f64,
    pub duality_gap: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub objective_trace: Vec<f64>,
}
