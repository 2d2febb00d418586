//! Piecewise-linear l1 solution paths computed by homotopy in the
//! penalty level, and the covariance test for significance of entering
//! variables along the path.
//!
//! On each interval between knots the active coefficients solve
//! `(X_A^T X_A) beta_A = X_A^T y - lambda s_A`, so `beta_A(lambda)` is
//! affine. Knots occur where an inactive correlation reaches the
//! boundary `|X_j^T r| = lambda` (entry) or an active coefficient
//! crosses zero (drop).

use ndarray::{Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::rng::{mc_moments, normal_vector, SampleStream};

/// Candidate events closer together than this (relative) are treated as
/// tied; the lowest column index wins and the tie is recorded.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathEvent {
    Add(usize),
    Drop(usize),
}

/// One affine piece of the path: `beta(lambda) = intercept + lambda * slope`
/// for `lambda` in `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct PathSegment {
    pub upper: f64,
    pub lower: f64,
    pub intercept: Array1<f64>,
    pub slope: Array1<f64>,
}

#[derive(Debug, Clone)]
pub struct TieNote {
    /// knot index (0-based) at which the tie occurred
    pub step: usize,
    pub lambda: f64,
    pub candidates: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LassoPath {
    p: usize,
    knots: Vec<f64>,
    events: Vec<PathEvent>,
    /// active set after the event at each knot, ascending column order
    active_after: Vec<Vec<usize>>,
    /// equicorrelation signs aligned with `active_after`
    signs_after: Vec<Vec<f64>>,
    segments: Vec<PathSegment>,
    ties: Vec<TieNote>,
    complete: bool,
}

impl LassoPath {
    pub fn p(&self) -> usize {
        self.p
    }

    /// Knot values, nonincreasing. Equal adjacent knots only occur for
    /// tied events, which are also listed in `ties`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn events(&self) -> &[PathEvent] {
        &self.events
    }

    pub fn active_sets(&self) -> &[Vec<usize>] {
        &self.active_after
    }

    pub fn signs(&self) -> &[Vec<f64>] {
        &self.signs_after
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn ties(&self) -> &[TieNote] {
        &self.ties
    }

    /// Whether the path reaches lambda = 0; false when `max_steps`
    /// truncated it.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Active set on the open interval just above the knot with this
    /// 0-based index (so: before the event at that knot fires).
    pub fn active_before_knot(&self, idx: usize) -> &[usize] {
        if idx == 0 {
            &[]
        } else {
            &self.active_after[idx - 1]
        }
    }

    /// Evaluate the solution at any covered penalty level.
    pub fn beta_at(&self, lambda: f64) -> Result<Array1<f64>> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidInput(format!(
                "lambda must be finite and nonnegative, got {lambda}"
            )));
        }
        if self.knots.is_empty() || lambda >= self.knots[0] {
            return Ok(Array1::zeros(self.p));
        }
        for seg in &self.segments {
            if lambda >= seg.lower && lambda <= seg.upper {
                return Ok(&seg.intercept + &(lambda * &seg.slope));
            }
        }
        Err(Error::InvalidInput(format!(
            "path truncated above lambda = {lambda} (increase max_steps)"
        )))
    }
}

/// Homotopy in lambda for `min 1/2 ||y - X b||^2 + lambda ||b||_1`,
/// recording at most `max_steps` knots. Handles drops; tied events are
/// resolved to the lowest column index and recorded.
pub fn lasso_path(x: &Array2<f64>, y: &Array1<f64>, max_steps: usize) -> Result<LassoPath> {
    let n = x.nrows();
    let p = x.ncols();
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            what: "lasso_path response",
            expected: n,
            got: y.len(),
        });
    }
    if max_steps == 0 {
        return Err(Error::InvalidInput("max_steps must be at least 1".into()));
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "lasso_path data" });
    }
    for j in 0..p {
        let col = x.index_axis(Axis(1), j);
        if col.dot(&col) <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "design column {j} is identically zero"
            )));
        }
    }

    let mut path = LassoPath {
        p,
        knots: Vec::new(),
        events: Vec::new(),
        active_after: Vec::new(),
        signs_after: Vec::new(),
        segments: Vec::new(),
        ties: Vec::new(),
        complete: false,
    };

    let c0 = x.t().dot(y);
    let lambda1 = c0.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if lambda1 == 0.0 {
        // response orthogonal to every column: beta = 0 for all lambda
        path.complete = true;
        return Ok(path);
    }
    let tie_band = TIE_TOL * (1.0 + lambda1);
    let first_ties: Vec<usize> = (0..p)
        .filter(|&j| lambda1 - c0[j].abs() <= tie_band)
        .collect();
    let j1 = first_ties[0];
    if first_ties.len() > 1 {
        path.ties.push(TieNote {
            step: 0,
            lambda: lambda1,
            candidates: first_ties.clone(),
        });
    }
    let mut active: Vec<usize> = vec![j1];
    let mut signs: Vec<f64> = vec![c0[j1].signum()];
    path.knots.push(lambda1);
    path.events.push(PathEvent::Add(j1));
    path.active_after.push(active.clone());
    path.signs_after.push(signs.clone());

    let mut lambda_cur = lambda1;
    // after a drop, the dropped column sits exactly on the boundary; it may
    // not re-enter until lambda moves strictly below the drop level
    let mut blocked: Vec<usize> = Vec::new();

    while path.knots.len() < max_steps {
        let xa = x.select(Axis(1), &active);
        let gram = xa.t().dot(&xa);
        let sa = Array1::from_vec(signs.clone());
        let a_coef = cholesky_solve(&gram, &xa.t().dot(y)).ok_or(Error::RankDeficient {
            step: path.knots.len(),
        })?;
        let b_coef = cholesky_solve(&gram, &sa).ok_or(Error::RankDeficient {
            step: path.knots.len(),
        })?;

        // residual(lambda) = (y - X_A a) + lambda X_A b
        let r_const = y - &xa.dot(&a_coef);
        let r_lin = xa.dot(&b_coef);

        #[derive(Clone, Copy)]
        struct Candidate {
            lambda: f64,
            column: usize,
            event_is_drop: bool,
            sign: f64,
        }
        let mut cands: Vec<Candidate> = Vec::new();

        let drop_band = TIE_TOL * (1.0 + lambda_cur);
        for (idx, &j) in active.iter().enumerate() {
            if b_coef[idx].abs() > 0.0 {
                let lam = a_coef[idx] / b_coef[idx];
                // a coefficient always touches zero at its own entry knot;
                // only genuine later crossings count
                if lam > 0.0 && lam < lambda_cur - drop_band {
                    cands.push(Candidate {
                        lambda: lam,
                        column: j,
                        event_is_drop: true,
                        sign: 0.0,
                    });
                }
            }
        }
        for j in 0..p {
            if active.contains(&j) {
                continue;
            }
            // entry at the current knot is allowed (simultaneous adds),
            // except for a column that just dropped here: its same-sign
            // crossing sits exactly at the drop level and must not fire
            // again, but a strictly lower (sign-flipped) re-entry is a
            // genuine event
            let upper_allowed = if blocked.contains(&j) {
                lambda_cur - drop_band
            } else {
                lambda_cur + drop_band
            };
            let col = x.index_axis(Axis(1), j);
            let u = col.dot(&r_const);
            let v = col.dot(&r_lin);
            // entry where u + lambda v = +/- lambda
            for (denom, sign) in [(1.0 - v, 1.0), (-1.0 - v, -1.0)] {
                if denom.abs() > 1e-14 {
                    let lam = u / denom;
                    if lam > 0.0 && lam <= upper_allowed {
                        cands.push(Candidate {
                            lambda: lam.min(lambda_cur),
                            column: j,
                            event_is_drop: false,
                            sign,
                        });
                    }
                }
            }
        }

        if cands.is_empty() {
            // no further events: this piece runs all the way to 0
            path.segments.push(make_segment(
                lambda_cur, 0.0, p, &active, &a_coef, &b_coef,
            ));
            path.complete = true;
            break;
        }
        let best_lambda = cands.iter().map(|c| c.lambda).fold(f64::NEG_INFINITY, f64::max);
        let next_band = TIE_TOL * (1.0 + best_lambda);
        let mut tied: Vec<&Candidate> = cands
            .iter()
            .filter(|c| best_lambda - c.lambda <= next_band)
            .collect();
        tied.sort_by_key(|c| c.column);
        let chosen = *tied[0];
        if tied.len() > 1 {
            path.ties.push(TieNote {
                step: path.knots.len(),
                lambda: chosen.lambda,
                candidates: tied.iter().map(|c| c.column).collect(),
            });
        }

        path.segments.push(make_segment(
            lambda_cur,
            chosen.lambda,
            p,
            &active,
            &a_coef,
            &b_coef,
        ));
        path.knots.push(chosen.lambda);
        if chosen.lambda < lambda_cur - drop_band {
            // strictly below the previous knot: boundary blocks are stale
            blocked.clear();
        }
        if chosen.event_is_drop {
            let pos = active.iter().position(|&j| j == chosen.column).unwrap();
            active.remove(pos);
            signs.remove(pos);
            path.events.push(PathEvent::Drop(chosen.column));
            blocked.push(chosen.column);
        } else {
            // keep ascending column order so refits are reproducible
            let pos = active.partition_point(|&j| j < chosen.column);
            active.insert(pos, chosen.column);
            signs.insert(pos, chosen.sign);
            path.events.push(PathEvent::Add(chosen.column));
        }
        path.active_after.push(active.clone());
        path.signs_after.push(signs.clone());
        lambda_cur = chosen.lambda;
    }
    Ok(path)
}

fn make_segment(
    upper: f64,
    lower: f64,
    p: usize,
    active: &[usize],
    a_coef: &Array1<f64>,
    b_coef: &Array1<f64>,
) -> PathSegment {
    let mut intercept = Array1::zeros(p);
    let mut slope = Array1::zeros(p);
    for (idx, &j) in active.iter().enumerate() {
        intercept[j] = a_coef[idx];
        slope[j] = -b_coef[idx];
    }
    PathSegment {
        upper,
        lower,
        intercept,
        slope,
    }
}

#[derive(Debug, Clone)]
pub struct CovTestResult {
    /// 1-based index of the tested knot
    pub k: usize,
    pub t_value: f64,
    pub p_value: f64,
    pub sigma_sq: f64,
    pub lambda_k: f64,
    pub lambda_next: f64,
    /// active set just before the tested knot
    pub active_before: Vec<usize>,
}

/// Covariance test at the `k`-th knot (1-based): the drop in covariance
/// between the full path fit at `lambda_{k+1}` and the fit that re-runs
/// the path on only the variables active just before the k-th knot,
/// scaled by the noise variance. Under the null that those variables
/// already capture the signal, this is asymptotically Exp(1).
pub fn covariance_statistic(
    path: &LassoPath,
    x: &Array2<f64>,
    y: &Array1<f64>,
    k: usize,
    sigma_sq: f64,
) -> Result<CovTestResult> {
    if !sigma_sq.is_finite() || sigma_sq <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sigma_sq must be finite and positive, got {sigma_sq}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("knot index k is 1-based".into()));
    }
    if path.knots().is_empty() {
        return Err(Error::EmptyPath);
    }
    if path.knots().len() < k + 1 {
        return Err(Error::StepBeyondPath {
            k,
            knots: path.knots().len(),
        });
    }
    if x.ncols() != path.p() || y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            what: "covariance_statistic data vs path",
            expected: path.p(),
            got: x.ncols(),
        });
    }
    let lambda_k = path.knots()[k - 1];
    let lambda_next = path.knots()[k];
    let beta_full = path.beta_at(lambda_next)?;
    let g_full = y.dot(&x.dot(&beta_full));
    let active_before: Vec<usize> = path.active_before_knot(k - 1).to_vec();
    let g_refit = if active_before.is_empty() {
        0.0
    } else {
        let xa = x.select(Axis(1), &active_before);
        let sub = lasso_path(&xa, y, 1000)?;
        let beta_sub = sub.beta_at(lambda_next)?;
        y.dot(&xa.dot(&beta_sub))
    };
    let t_value = (g_full - g_refit) / sigma_sq;
    Ok(CovTestResult {
        k,
        t_value,
        p_value: (-t_value).exp(),
        sigma_sq,
        lambda_k,
        lambda_next,
        active_before,
    })
}

/// Kolmogorov-Smirnov distance between a sample and the standard
/// exponential distribution.
pub fn ks_distance_exp1(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &t) in sorted.iter().enumerate() {
        let f = 1.0 - (-t.max(0.0)).exp();
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i as f64 + 1.0) / n - f).abs());
    }
    d
}

#[derive(Debug, Clone)]
pub struct NullCalibration {
    pub t_values: Vec<f64>,
    pub ks_distance: f64,
    pub mean: f64,
    pub std_error: f64,
    /// draws that produced too few knots (or a degenerate refit) and
    /// were redrawn at a fresh stream index
    pub degenerate_draws: usize,
}

/// Distribution of the covariance statistic at knot `k` under the global
/// null `y = sigma * g`: simulate, compute the statistic, and compare
/// with Exp(1).
pub fn null_calibration(
    x: &Array2<f64>,
    sigma: f64,
    reps: usize,
    seed: u64,
    k: usize,
) -> Result<NullCalibration> {
    if reps < 100 {
        return Err(Error::InvalidInput(format!(
            "need at least 100 replications for calibration, got {reps}"
        )));
    }
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "sigma must be finite and positive, got {sigma}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidInput("knot index k is 1-based".into()));
    }
    let n = x.nrows();
    let stream = SampleStream::new(seed, "covtest-null");
    let sigma_sq = sigma * sigma;
    let mut t_values = Vec::with_capacity(reps);
    let mut degenerate = 0usize;
    for i in 0..reps as u64 {
        let mut done = false;
        for attempt in 0..64u64 {
            let mut rng = stream.rng((attempt << 32) | i);
            let y = sigma * &normal_vector(&mut rng, n);
            let t = lasso_path(x, &y, k + 1)
                .and_then(|path| covariance_statistic(&path, x, &y, k, sigma_sq));
            match t {
                Ok(res) => {
                    t_values.push(res.t_value);
                    done = true;
                    break;
                }
                Err(_) => degenerate += 1,
            }
        }
        if !done {
            return Err(Error::InvalidInput(format!(
                "replication {i}: no non-degenerate draw in 64 attempts (is k too large for this design?)"
            )));
        }
    }
    let m = mc_moments(&t_values);
    Ok(NullCalibration {
        ks_distance: ks_distance_exp1(&t_values),
        mean: m.mean,
        std_error: m.std_error,
        t_values,
        degenerate_draws: degenerate,
    })
}
