//! One function per subcommand. Each returns the `results` object for
//! the output document, a list of warnings, and the exit code (0, or 3
//! when an iterative routine ran out of budget but still has an iterate
//! worth reporting). Validation problems surface as `Err(String)` and
//! become exit code 2 upstream.

use crate::args;
use crate::input;
use lsqgeom::geometry::{
    conic_intrinsic_volumes, critical_radius_process, ec_density, exact_orthant_weights,
    gaussian_width, mean_chi_bar, steiner_fit, sup_mc_validate, tube_volume_mc, uniform_grid,
    ConeDescriptor, WidthTarget,
};
use lsqgeom::model::{RegressionProblem, SolveStatus};
use lsqgeom::path::{covariance_statistic, lasso_path, LassoPath, PathEvent};
use lsqgeom::risk::{dof_polyhedral, sure_risk, DofMethod};
use lsqgeom::solver::{solve, SolverConfig};
use serde_json::{json, Value};

pub struct Done {
    pub results: Value,
    pub warnings: Vec<String>,
    pub exit: i32,
}

fn ok(results: Value) -> Result<Done, String> {
    Ok(Done {
        results,
        warnings: Vec::new(),
        exit: 0,
    })
}

fn status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIterReached => "max_iter_reached",
    }
}

fn vec_json(v: &ndarray::Array1<f64>) -> Value {
    Value::from(v.to_vec())
}

fn check_lambda(lambda: f64) -> Result<(), String> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(format!(
            "--lambda must be finite and nonnegative, got {lambda}"
        ));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<(), String> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(format!("--sigma must be finite and positive, got {sigma}"));
    }
    Ok(())
}

fn problem_from(
    x_path: &std::path::Path,
    y_path: &std::path::Path,
    sigma: Option<f64>,
) -> Result<(RegressionProblem, ndarray::Array2<f64>, ndarray::Array1<f64>), String> {
    let x = input::read_matrix(x_path)?;
    let y = input::read_vector(y_path)?;
    if y.len() != x.nrows() {
        return Err(format!(
            "--y {} has {} rows but --x {} has {}",
            y_path.display(),
            y.len(),
            x_path.display(),
            x.nrows()
        ));
    }
    let problem = RegressionProblem::new(y.clone(), x.clone(), sigma)
        .map_err(|e| format!("inputs rejected: {e}"))?;
    Ok((problem, x, y))
}

pub fn solve_cmd(a: &args::SolveArgs) -> Result<Done, String> {
    check_lambda(a.lambda)?;
    if let Some(s) = a.sigma {
        check_sigma(s)?;
    }
    let (problem, x, _y) = problem_from(&a.x, &a.y, a.sigma)?;
    let k = input::parse_penalty(&a.penalty, Some(x.ncols()))?;
    let mut config = SolverConfig::default();
    if let Some(t) = a.tol_gap {
        if !t.is_finite() || t <= 0.0 {
            return Err(format!("--tol-gap must be finite and positive, got {t}"));
        }
        config.tol_gap = t;
    }
    if let Some(m) = a.max_iter {
        if m == 0 {
            return Err("--max-iter must be at least 1".into());
        }
        config.max_iter = m;
    }
    config.accelerated = !a.plain;
    let sol = solve(&problem, &k, a.lambda, &config).map_err(|e| format!("solve failed: {e}"))?;
    let results = json!({
        "beta": vec_json(&sol.beta_hat),
        "mu": vec_json(&sol.mu_hat),
        "dual": vec_json(&sol.u_hat),
        "lambda": sol.lambda,
        "objective": sol.objective,
        "duality_gap": sol.duality_gap,
        "kkt_residual": sol.kkt_residual,
        "iterations": sol.iterations,
        "status": status_str(sol.status),
    });
    let mut warnings = Vec::new();
    let exit = if sol.status == SolveStatus::Converged {
        0
    } else {
        warnings.push(format!(
            "iteration budget {} exhausted before the duality gap reached {:.3e}; best iterate reported",
            config.max_iter, config.tol_gap
        ));
        3
    };
    Ok(Done {
        results,
        warnings,
        exit,
    })
}

fn path_json(path: &LassoPath) -> Result<Value, String> {
    let events: Vec<Value> = path
        .knots()
        .iter()
        .zip(path.events().iter())
        .map(|(&lambda, ev)| match ev {
            PathEvent::Add(j) => json!({"lambda": lambda, "kind": "add", "column": j}),
            PathEvent::Drop(j) => json!({"lambda": lambda, "kind": "drop", "column": j}),
        })
        .collect();
    let mut knot_betas = Vec::with_capacity(path.knots().len());
    for &lambda in path.knots() {
        let b = path
            .beta_at(lambda)
            .map_err(|e| format!("path evaluation failed: {e}"))?;
        knot_betas.push(b.to_vec());
    }
    let ties: Vec<Value> = path
        .ties()
        .iter()
        .map(|t| json!({"step": t.step, "lambda": t.lambda, "candidates": t.candidates}))
        .collect();
    Ok(json!({
        "knots": path.knots(),
        "events": events,
        "active_sets": path.active_sets(),
        "knot_betas": knot_betas,
        "complete": path.is_complete(),
        "ties": ties,
    }))
}

pub fn path_cmd(a: &args::PathArgs) -> Result<Done, String> {
    if a.max_steps == 0 {
        return Err("--max-steps must be at least 1".into());
    }
    let (_problem, x, y) = problem_from(&a.x, &a.y, None)?;
    let path = lasso_path(&x, &y, a.max_steps).map_err(|e| format!("path failed: {e}"))?;
    let mut warnings = Vec::new();
    let exit = if path.is_complete() {
        0
    } else {
        warnings.push(format!(
            "step budget {} exhausted before the path reached lambda = 0; partial path reported",
            a.max_steps
        ));
        3
    };
    Ok(Done {
        results: path_json(&path)?,
        warnings,
        exit,
    })
}

pub fn covtest_cmd(a: &args::CovtestArgs) -> Result<Done, String> {
    check_sigma(a.sigma)?;
    if a.k == 0 {
        return Err("--k is 1-based; it must be at least 1".into());
    }
    let (_problem, x, y) = problem_from(&a.x, &a.y, Some(a.sigma))?;
    let path = lasso_path(&x, &y, a.k + 1).map_err(|e| format!("path failed: {e}"))?;
    let res = covariance_statistic(&path, &x, &y, a.k, a.sigma * a.sigma)
        .map_err(|e| format!("covariance statistic failed: {e}"))?;
    ok(json!({
        "k": res.k,
        "t_value": res.t_value,
        "p_value": res.p_value,
        "sigma_sq": res.sigma_sq,
        "lambda_k": res.lambda_k,
        "lambda_next": res.lambda_next,
        "active_before": res.active_before,
    }))
}

pub fn dof_cmd(a: &args::DofArgs) -> Result<Done, String> {
    check_lambda(a.lambda)?;
    if let Some(s) = a.sigma {
        check_sigma(s)?;
    }
    let (problem, x, y) = problem_from(&a.x, &a.y, a.sigma)?;
    let k = input::parse_penalty(&a.penalty, Some(x.ncols()))?;
    let sol = solve(
        &problem,
        &k,
        a.lambda,
        &SolverConfig {
            tol_gap: 1e-10,
            ..Default::default()
        },
    )
    .map_err(|e| format!("solve failed: {e}"))?;
    let est =
        dof_polyhedral(&problem, &k, a.lambda, &sol).map_err(|e| format!("dof failed: {e}"))?;
    let method = match est.method {
        DofMethod::PolyhedralRank => "polyhedral_rank",
        DofMethod::FiniteDifference => "finite_difference",
        DofMethod::MonteCarloCov => "monte_carlo_cov",
    };
    let mut results = json!({
        "dof": est.dof,
        "method": method,
        "tangent_dim": est.detail,
        "generic": est.generic,
        "lambda": a.lambda,
        "status": status_str(sol.status),
    });
    if let Some(sigma) = a.sigma {
        let sure = sure_risk(&y, &sol.mu_hat, est.dof, sigma * sigma)
            .map_err(|e| format!("sure failed: {e}"))?;
        results["sure"] = json!(sure);
    }
    let mut warnings = Vec::new();
    if !est.generic {
        warnings.push(
            "solution sits near a stratum boundary (an inactive dual coordinate within 1e-6 of its bound); the rank formula may not be locally exact".into(),
        );
    }
    Ok(Done {
        results,
        warnings,
        exit: 0,
    })
}

fn parse_width_target(s: &str) -> Result<WidthTarget, String> {
    if let Some(rest) = s.strip_prefix("interval:") {
        let (lo, hi) = rest
            .split_once(',')
            .ok_or_else(|| format!("--target {s:?}: interval needs LO,HI"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| format!("--target {s:?}: LO must be a decimal number"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| format!("--target {s:?}: HI must be a decimal number"))?;
        return Ok(WidthTarget::Interval { lo, hi });
    }
    if let Some(rest) = s.strip_prefix("penalty:") {
        let k = input::parse_penalty(rest, None)?;
        return Ok(WidthTarget::Penalty(k));
    }
    // remaining forms are planar bodies
    input::parse_body("--target", s).map(WidthTarget::Body)
}

pub fn width_cmd(a: &args::WidthArgs) -> Result<Done, String> {
    let target = parse_width_target(&a.target)?;
    let est = gaussian_width(&target, a.mc_samples, a.seed)
        .map_err(|e| format!("width estimate failed: {e}"))?;
    ok(json!({
        "target": a.target,
        "mean_support": est.mean_support,
        "mean_support_se": est.mean_support_se,
        "l1": est.l1,
        "l1_std_error": est.l1_std_error,
        "mc_samples": est.mc_samples,
    }))
}

pub fn tube_cmd(a: &args::TubeArgs) -> Result<Done, String> {
    let body = input::parse_body("--body", &a.body)?;
    match (&a.radius, &a.fit_radii) {
        (Some(r), None) => {
            if !r.is_finite() || *r < 0.0 {
                return Err(format!("--radius must be finite and nonnegative, got {r}"));
            }
            let est = tube_volume_mc(&body, *r, a.mc_samples, a.seed)
                .map_err(|e| format!("tube volume failed: {e}"))?;
            ok(json!({
                "body": a.body,
                "radius": r,
                "volume": est.volume,
                "std_error": est.std_error,
                "mc_samples": a.mc_samples,
            }))
        }
        (None, Some(list)) => {
            let radii = input::parse_radii("--fit-radii", list)?;
            let est = steiner_fit(&body, &radii, a.mc_samples, a.seed)
                .map_err(|e| format!("tube fit failed: {e}"))?;
            ok(json!({
                "body": a.body,
                "fit_radii": radii,
                "intrinsic_volumes": est.values,
                "std_errors": est.std_errors,
                "mc_samples": a.mc_samples,
            }))
        }
        _ => Err("tube needs exactly one of --radius or --fit-radii".into()),
    }
}

pub fn cone_cmd(a: &args::ConeArgs) -> Result<Done, String> {
    let signs = input::parse_signs(&a.signs)?;
    let exact = exact_orthant_weights(&signs);
    let mean = mean_chi_bar(&exact).map_err(|e| format!("cone weights failed: {e}"))?;
    let mc = conic_intrinsic_volumes(
        &ConeDescriptor::Orthant {
            signs: signs.clone(),
        },
        a.mc_samples,
        a.seed,
    )
    .map_err(|e| format!("cone sampling failed: {e}"))?;
    let mut results = json!({
        "signs": a.signs,
        "dimension": signs.len(),
        "exact_weights": exact,
        "mean_chi_bar": mean,
        "mc_weights": mc.values,
        "mc_std_errors": mc.std_errors,
        "mc_samples": a.mc_samples,
    });
    if let Some(u) = a.u {
        if !u.is_finite() || u <= 0.0 {
            return Err(format!("--u must be finite and positive, got {u}"));
        }
        let v = sup_mc_validate(&signs, u, a.mc_samples, a.seed)
            .map_err(|e| format!("tail validation failed: {e}"))?;
        results["sup_tail"] = json!({
            "u": u,
            "empirical": v.empirical,
            "std_error": v.std_error,
            "series": v.series,
            "gap": v.gap,
        });
    }
    Ok(Done {
        results,
        warnings: Vec::new(),
        exit: 0,
    })
}

pub fn ecdensity_cmd(a: &args::EcdensityArgs) -> Result<Done, String> {
    if !a.u.is_finite() {
        return Err(format!("--u must be finite, got {}", a.u));
    }
    let value = ec_density(a.j, a.u).map_err(|e| format!("density evaluation failed: {e}"))?;
    ok(json!({
        "j": a.j,
        "u": a.u,
        "value": value,
    }))
}

pub fn critradius_cmd(a: &args::CritradiusArgs) -> Result<Done, String> {
    let kernel = input::parse_kernel(&a.kernel)?;
    let (lo, hi, count) = input::parse_grid(&a.grid)?;
    let grid = uniform_grid(lo, hi, count).map_err(|e| format!("--grid rejected: {e}"))?;
    let delta = match a.delta {
        Some(d) => {
            if !d.is_finite() || d <= 0.0 {
                return Err(format!("--delta must be finite and positive, got {d}"));
            }
            d
        }
        None => 2.0 * (grid[1] - grid[0]),
    };
    let est = critical_radius_process(&kernel, &grid, delta)
        .map_err(|e| format!("critical radius failed: {e}"))?;
    ok(json!({
        "kernel": kernel.name(),
        "grid": {"lo": lo, "hi": hi, "count": count},
        "delta": delta,
        "cot_sq": est.cot_sq,
        "r_c": est.r_c,
        "argmax": [est.argmax.0, est.argmax.1],
        "pairs": est.pairs,
    }))
}
