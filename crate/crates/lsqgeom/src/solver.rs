//! Proximal gradient solver for `1/2 ||y - X b||^2 + lambda h_K(b)`,
//! with certified stopping via a feasible dual point.
//!
//! The dual, over vectors `u` in `lambda K` intersected with row(X), is
//! `D(u) = 1/2 ||y||^2 - 1/2 (u - w)^T (X^T X)^+ (u - w)` with `w = X^T y`.
//! Rather than evaluate that pseudoinverse every iteration, bounded
//! penalties use the residual form: any residual `r` with `X^T r` in
//! `lambda K` gives the lower bound `r.y - 1/2 ||r||^2`, and the running
//! iterate's residual can always be scaled into feasibility. The gap
//! computed this way is an upper bound for the row-space gap, so stopping
//! on it is safe.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg::{lu_factor, norm2, operator_norm, sym_eigen, SymEigen};
use crate::model::{
    objective_value, polar_gauge, support_function, PenaltySpec, RegressionProblem, Solution,
    SolveStatus,
};
use crate::projection::{membership_check, project_scaled, prox_penalty};
use crate::rng::{mc_moments, normal_vector, par_samples, SampleStream};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Constant step size; the caller owns making it small enough.
    Fixed(f64),
    /// `1 / ||X||_op^2` from power iteration.
    InverseSpectral,
    /// Start at 1.0, shrink by the given factor until the local
    /// quadratic upper bound holds.
    Backtracking { shrink: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub step_rule: StepRule,
    pub accelerated: bool,
    /// Stop when the duality gap drops to this level.
    pub tol_gap: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step_rule: StepRule::InverseSpectral,
            accelerated: true,
            tol_gap: 1e-8,
            max_iter: 100_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let StepRule::Fixed(a) = self.step_rule {
            if !a.is_finite() || a <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "fixed step size must be finite and positive, got {a}"
                )));
            }
        }
        if let StepRule::Backtracking { shrink } = self.step_rule {
            if !(shrink > 0.0 && shrink < 1.0) {
                return Err(Error::InvalidInput(format!(
                    "backtracking shrink factor must lie in (0,1), got {shrink}"
                )));
            }
        }
        if !self.tol_gap.is_finite() || self.tol_gap <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "tol_gap must be finite and positive, got {}",
                self.tol_gap
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// `u = X^T (y - X beta)`: the (unnormalized) dual vector attached to a
/// primal point. At an optimum it lies in `lambda * dh_K(beta)`.
pub fn dual_vector(problem: &RegressionProblem, beta: &Array1<f64>) -> Result<Array1<f64>> {
    if beta.len() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "dual_vector beta",
            expected: problem.p(),
            got: beta.len(),
        });
    }
    if beta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "dual_vector beta",
        });
    }
    let r = problem.y() - &problem.design().dot(beta);
    Ok(problem.design().t().dot(&r))
}

struct GapEngine<'a> {
    problem: &'a RegressionProblem,
    k: &'a PenaltySpec,
    lambda: f64,
    w: Array1<f64>,
    y_half_sq: f64,
    /// eigen of X^T X, only materialized when the residual route is
    /// unavailable (cone penalties, or lambda = 0)
    g_eigen: Option<SymEigen>,
    /// optimal dual value for lambda = 0, where u = 0 is the only
    /// feasible dual vector
    dual_const: Option<f64>,
}

impl<'a> GapEngine<'a> {
    fn new(problem: &'a RegressionProblem, k: &'a PenaltySpec, lambda: f64) -> Self {
        let x = problem.design();
        let w = x.t().dot(problem.y());
        let y_half_sq = 0.5 * problem.y().dot(problem.y());
        let needs_eigen = lambda == 0.0 || k.is_cone();
        let g_eigen = needs_eigen.then(|| sym_eigen(&x.t().dot(x)));
        let dual_const = (lambda == 0.0)
            .then(|| y_half_sq - 0.5 * g_eigen.as_ref().unwrap().pinv_quadform(&w, 1e-12));
        GapEngine {
            problem,
            k,
            lambda,
            w,
            y_half_sq,
            g_eigen,
            dual_const,
        }
    }

    /// (gap bound, dual feasibility residual) for the current primal
    /// point. The bound is the computed primal-dual difference clamped
    /// at zero plus a floating-point resolution term: near the optimum
    /// the raw difference is the cancellation of two large numbers and
    /// can dip below zero (impossible in exact arithmetic), so the raw
    /// value must not be allowed to certify tolerances it cannot
    /// measure.
    fn gap(&self, r: &Array1<f64>, u: &Array1<f64>, primal: f64) -> (f64, f64) {
        let (dual, feas) = if self.lambda == 0.0 {
            (self.dual_const.unwrap(), 0.0)
        } else if self.k.is_bounded() {
            // scale the residual until X^T r is dual feasible
            let gauge = polar_gauge(u, self.k).expect("dimensions checked at entry");
            let s = (gauge / self.lambda).max(1.0);
            let rf = r / s;
            (rf.dot(self.problem.y()) - 0.5 * rf.dot(&rf), 0.0)
        } else {
            // cone: project u onto lambda K = K, then onto row(X)
            let eig = self.g_eigen.as_ref().unwrap();
            let uf = project_scaled(u, self.k, self.lambda)
                .expect("dimensions checked at entry")
                .point;
            let urow = eig.project_range(&uf, 1e-12);
            let feas = norm2(&(&uf - &urow));
            let diff = &urow - &self.w;
            (
                self.y_half_sq - 0.5 * eig.pinv_quadform(&diff, 1e-12),
                feas,
            )
        };
        let resolution = 8.0 * f64::EPSILON * (1.0 + primal.abs() + dual.abs());
        ((primal - dual).max(0.0) + resolution, feas)
    }
}

fn kkt_residual(
    k: &PenaltySpec,
    lambda: f64,
    beta: &Array1<f64>,
    u: &Array1<f64>,
) -> Result<f64> {
    // u must lie in lambda K, and touch the supporting hyperplane:
    // u . beta = lambda h_K(beta)
    let dist = membership_check(u, k, lambda)?;
    let h = if lambda == 0.0 {
        0.0
    } else {
        support_function(beta, k)?
    };
    let comp = if h.is_finite() {
        (u.dot(beta) - lambda * h).abs()
    } else {
        f64::INFINITY
    };
    Ok(dist.max(comp))
}

/// Minimize `1/2 ||y - X b||^2 + lambda h_K(b)` by (optionally
/// accelerated) proximal gradient from `b = 0`, stopping when a feasible
/// dual point certifies the duality gap below `config.tol_gap`.
///
/// Never silently returns a non-optimal point: if the iteration budget
/// runs out first, the best iterate comes back with status
/// `MaxIterReached`.
pub fn solve(
    problem: &RegressionProblem,
    k: &PenaltySpec,
    lambda: f64,
    config: &SolverConfig,
) -> Result<Solution> {
    config.validate()?;
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::InvalidInput(format!(
            "lambda must be finite and nonnegative, got {lambda}"
        )));
    }
    if k.dimension() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "solve penalty dimension",
            expected: problem.p(),
            got: k.dimension(),
        });
    }
    let x = problem.design();
    let y = problem.y();
    let p = problem.p();
    let engine = GapEngine::new(problem, k, lambda);
    let feas_tol = |u: &Array1<f64>| 1e-8 * (1.0 + norm2(u));

    let mut alpha = match config.step_rule {
        StepRule::Fixed(a) => a,
        StepRule::InverseSpectral => {
            let s = operator_norm(x);
            if s <= f64::MIN_POSITIVE {
                1.0
            } else {
                1.0 / (s * s)
            }
        }
        StepRule::Backtracking { .. } => 1.0,
    };

    let smooth = |b: &Array1<f64>| {
        let r = y - &x.dot(b);
        0.5 * r.dot(&r)
    };

    let mut beta: Array1<f64> = Array1::zeros(p);
    let mut z = beta.clone();
    let mut t_mom = 1.0f64;
    let mut trace: Vec<f64> = Vec::new();
    let mut best_obj = f64::INFINITY;
    let mut best_beta = beta.clone();

    for iter in 1..=config.max_iter {
        let grad_z = x.t().dot(&x.dot(&z)) - &engine.w;
        let mut cand;
        loop {
            cand = prox_penalty(&(&z - &(alpha * &grad_z)), k, lambda * alpha)?;
            if let StepRule::Backtracking { shrink } = config.step_rule {
                let diff = &cand - &z;
                let bound =
                    smooth(&z) + grad_z.dot(&diff) + diff.dot(&diff) / (2.0 * alpha);
                if smooth(&cand) > bound + 1e-12 * bound.abs().max(1.0) {
                    alpha *= shrink;
                    if alpha < 1e-18 {
                        return Err(Error::NotConverged {
                            what: "backtracking line search",
                        });
                    }
                    continue;
                }
            }
            break;
        }
        if cand.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "solver iterate (step size too large?)",
            });
        }
        let r = y - &x.dot(&cand);
        let u = x.t().dot(&r);
        let obj = objective_value(problem, k, lambda, &cand)?;
        trace.push(obj);
        // prefer the most recent iterate among objective ties (within
        // fp resolution): once the objective stops resolving, later
        // iterates keep contracting toward the optimum even though the
        // recorded value cannot show it
        let tie_band = 8.0 * f64::EPSILON * (1.0 + best_obj.abs());
        if obj <= best_obj + tie_band {
            if obj < best_obj {
                best_obj = obj;
            }
            best_beta = cand.clone();
        }
        let (gap, feas) = engine.gap(&r, &u, obj);
        if gap <= config.tol_gap && feas <= feas_tol(&u) {
            let kkt = kkt_residual(k, lambda, &cand, &u)?;
            return Ok(Solution {
                mu_hat: x.dot(&cand),
                beta_hat: cand,
                u_hat: u,
                lambda,
                objective: obj,
                duality_gap: gap,
                kkt_residual: kkt,
                iterations: iter,
                status: SolveStatus::Converged,
                objective_trace: trace,
            });
        }
        if config.accelerated {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
            let momentum = (t_mom - 1.0) / t_next;
            z = &cand + &(momentum * &(&cand - &beta));
            t_mom = t_next;
        } else {
            z = cand.clone();
        }
        beta = cand;
    }

    // budget exhausted: report the best visited point honestly
    let r = y - &x.dot(&best_beta);
    let u = x.t().dot(&r);
    let (gap, _feas) = engine.gap(&r, &u, best_obj);
    let kkt = kkt_residual(k, lambda, &best_beta, &u)?;
    Ok(Solution {
        mu_hat: x.dot(&best_beta),
        beta_hat: best_beta,
        u_hat: u,
        lambda,
        objective: best_obj,
        duality_gap: gap,
        kkt_residual: kkt,
        iterations: config.max_iter,
        status: SolveStatus::MaxIterReached,
        objective_trace: trace,
    })
}

/// Duality gap for an explicit primal/dual pair. The dual point must be
/// (numerically) feasible: inside `lambda K` and inside row(X).
pub fn duality_gap(
    problem: &RegressionProblem,
    k: &PenaltySpec,
    lambda: f64,
    beta: &Array1<f64>,
    u: &Array1<f64>,
) -> Result<f64> {
    if u.len() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "duality_gap dual vector",
            expected: problem.p(),
            got: u.len(),
        });
    }
    if u.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "duality_gap dual vector",
        });
    }
    let feas_tol = 1e-6 * (1.0 + norm2(u));
    let dist = membership_check(u, k, lambda)?;
    if dist > feas_tol {
        return Err(Error::InfeasibleDual(format!(
            "u lies {dist:.3e} outside lambda*K"
        )));
    }
    let x = problem.design();
    let eig = sym_eigen(&x.t().dot(x));
    let urow = eig.project_range(u, 1e-12);
    let off = norm2(&(u - &urow));
    if off > feas_tol {
        return Err(Error::InfeasibleDual(format!(
            "u has a component of size {off:.3e} outside row(X)"
        )));
    }
    let primal = objective_value(problem, k, lambda, beta)?;
    let w = x.t().dot(problem.y());
    let diff = &urow - &w;
    let dual = 0.5 * problem.y().dot(problem.y()) - 0.5 * eig.pinv_quadform(&diff, 1e-12);
    Ok(primal - dual)
}

/// Check a solution against the residual-space form of the problem: for
/// square invertible `X`, the optimal fit is `y` minus the projection of
/// `y` onto `lambda * X^{-T} K`. Returns the discrepancy norm.
pub fn residual_form_check(
    problem: &RegressionProblem,
    k: &PenaltySpec,
    lambda: f64,
    solution: &Solution,
) -> Result<f64> {
    let n = problem.n();
    if n != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "residual_form_check (square design required)",
            expected: n,
            got: problem.p(),
        });
    }
    let x = problem.design();
    let y = problem.y();
    if lambda == 0.0 {
        // projection target is {0}: the check fit is y itself
        return Ok(norm2(&(&solution.mu_hat - y)));
    }
    let lu = lu_factor(x)?;
    // Minimize q(u) = 1/2 || y - X^{-T} u ||^2 over u in lambda K; the
    // projection of y onto lambda X^{-T} K is then X^{-T} u*.
    let eig = sym_eigen(&x.t().dot(x));
    let alpha = eig.min_value();
    if alpha <= f64::MIN_POSITIVE {
        return Err(Error::Singular { what: "design matrix" });
    }
    let grad_and_q = |u: &Array1<f64>| {
        let r = y - &lu.solve_transpose(u);
        let q = 0.5 * r.dot(&r);
        let grad = -lu.solve(&r);
        (grad, q)
    };
    let tol = 1e-11 * (1.0 + norm2(y));
    let mut u: Array1<f64> = Array1::zeros(n);
    let mut z = u.clone();
    let mut t_mom = 1.0f64;
    let (_, mut q_u) = grad_and_q(&u);
    let mut converged = false;
    for it in 0..500_000 {
        let (grad_z, _) = grad_and_q(&z);
        let mut u_next = project_scaled(&(&z - &(alpha * &grad_z)), k, lambda)?.point;
        let (_, mut q_next) = grad_and_q(&u_next);
        if q_next > q_u {
            // momentum overshoot: restart from the last good point
            z = u.clone();
            t_mom = 1.0;
            let (grad_r, _) = grad_and_q(&z);
            u_next = project_scaled(&(&z - &(alpha * &grad_r)), k, lambda)?.point;
            q_next = grad_and_q(&u_next).1;
        }
        let step = norm2(&(&u_next - &u));
        if step <= tol || it % 8 == 7 {
            let (grad_n, _) = grad_and_q(&u_next);
            let refl = project_scaled(&(&u_next - &(alpha * &grad_n)), k, lambda)?.point;
            if norm2(&(&refl - &u_next)) <= tol {
                u = u_next;
                converged = true;
                break;
            }
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_mom * t_mom).sqrt());
        let momentum = (t_mom - 1.0) / t_next;
        z = &u_next + &(momentum * &(&u_next - &u));
        t_mom = t_next;
        u = u_next;
        q_u = q_next;
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "residual-form projection subproblem",
        });
    }
    let r_hat = lu.solve_transpose(&u);
    let mu_check = y - &r_hat;
    Ok(norm2(&(&solution.mu_hat - &mu_check)))
}

/// Two-line bound on the unpenalized least squares error: whenever
/// `y = X beta0 + eps` and `X^T X` is well conditioned,
/// `||betahat_LS - beta0|| <= 2 ||X^T eps|| / lambda_min(X^T X)`.
pub fn classical_error_certificate(
    problem: &RegressionProblem,
    beta0: &Array1<f64>,
    eps: &Array1<f64>,
) -> Result<f64> {
    if beta0.len() != problem.p() {
        return Err(Error::DimensionMismatch {
            what: "classical_error_certificate beta0",
            expected: problem.p(),
            got: beta0.len(),
        });
    }
    if eps.len() != problem.n() {
        return Err(Error::DimensionMismatch {
            what: "classical_error_certificate eps",
            expected: problem.n(),
            got: eps.len(),
        });
    }
    let x = problem.design();
    let eig = sym_eigen(&x.t().dot(x));
    let lam_min = eig.min_value();
    if lam_min <= 1e-12 {
        return Err(Error::Singular {
            what: "X^T X (minimum eigenvalue <= 1e-12)",
        });
    }
    Ok(2.0 * norm2(&x.t().dot(eps)) / lam_min)
}

#[derive(Debug, Clone, Copy)]
pub struct LambdaRecommendation {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo estimate of `C1 * sigma * E gauge_K(X^T g)` for standard
/// normal `g` — a penalty level that dominates the noise term with high
/// probability. Errors for penalties whose gauge is infinite on sign
/// violations (cones), since no finite scale exists there.
pub fn lambda_recommendation(
    x: &Array2<f64>,
    k: &PenaltySpec,
    sigma: f64,
    c1: f64,
    mc_samples: u64,
    seed: u64,
) -> Result<LambdaRecommendation> {
    if k.dimension() != x.ncols() {
        return Err(Error::DimensionMismatch {
            what: "lambda_recommendation penalty dimension",
            expected: x.ncols(),
            got: k.dimension(),
        });
    }
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::InvalidInput(format!(
            "sigma must be finite and nonnegative, got {sigma}"
        )));
    }
    if !c1.is_finite() || c1 <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "c1 must be finite and positive, got {c1}"
        )));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidInput("mc_samples must be at least 1".into()));
    }
    if sigma == 0.0 {
        return Ok(LambdaRecommendation {
            value: 0.0,
            std_error: 0.0,
        });
    }
    let n = x.nrows();
    let stream = SampleStream::new(seed, "lambda-recommendation");
    let vals = par_samples(&stream, mc_samples, |_, rng| {
        let g = normal_vector(rng, n);
        polar_gauge(&x.t().dot(&g), k).expect("dimension checked")
    });
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Unbounded(
            "gauge of X^T g is infinite with positive probability; no finite penalty scale exists for this K".into(),
        ));
    }
    let m = mc_moments(&vals);
    Ok(LambdaRecommendation {
        value: c1 * sigma * m.mean,
        std_error: c1 * sigma * m.std_error,
    })
}
