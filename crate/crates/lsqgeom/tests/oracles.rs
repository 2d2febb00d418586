//! Independent-oracle checks: every result that matters is recomputed
//! here by a second route that shares no code with the implementation
//! under test — dense grid searches, finite-difference stencils, direct
//! covariance inversion, order-statistic simulation — and the two
//! answers are compared at tolerances derived from the oracle's own
//! resolution.

use lsqgeom::geometry::{
    conditional_ratio, critical_radius_process, exact_orthant_weights, hermite, mean_chi_bar,
    steiner_fit, tube_volume_mc, uniform_grid, ConvexBody2D, SquaredExponentialKernel,
};
use lsqgeom::linalg::{lstsq, norm2, sym_eigen};
use lsqgeom::model::{
    objective_value, support_function, PenaltySpec, RegressionProblem, SignConstraint,
};
use lsqgeom::path::{covariance_statistic, lasso_path, null_calibration};
use lsqgeom::projection::{membership_check, project_scaled, prox_penalty};
use lsqgeom::risk::{divergence_fd, dof_polyhedral};
use lsqgeom::rng::{normal_vector, SampleStream};
use lsqgeom::solver::{
    classical_error_certificate, lambda_recommendation, residual_form_check, solve, SolverConfig,
};
use lsqgeom::model::SolveStatus;
use ndarray::{Array1, Array2};
use rand::Rng;

fn tight() -> SolverConfig {
    SolverConfig {
        tol_gap: 1e-12,
        ..Default::default()
    }
}

fn gaussian_matrix(stream: &SampleStream, index: u64, n: usize, p: usize) -> Array2<f64> {
    let mut rng = stream.rng(index);
    let data: Vec<f64> = (0..n * p).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let mut x = Array2::from_shape_vec((n, p), data).unwrap();
    // keep columns away from degeneracy
    for j in 0..p {
        let nrm = norm2(&x.column(j).to_owned());
        if nrm < 0.5 {
            for i in 0..n {
                x[[i, j]] += 1.0;
            }
        }
    }
    x
}

// ---------------------------------------------------------------------
// projection and prox against dense grid search

/// Cartesian grid covering the relevant part of `t K`. Box and cone
/// grids are constructed inside the set; ball grids get a hand-rolled
/// per-group radial clamp, deliberately sharing no code with the
/// projection being tested.
fn feasible_grid(k: &PenaltySpec, t: f64, v: &Array1<f64>, m: usize) -> Vec<Array1<f64>> {
    let d = k.dimension();
    let bound = v.iter().fold(1.0f64, |a, &x| a.max(x.abs())) + 1.0;
    let axes: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let (lo, hi) = match k.kind() {
                lsqgeom::model::PenaltyKind::Box { radii } => (-t * radii[i], t * radii[i]),
                lsqgeom::model::PenaltyKind::OrthantCone { signs } => match signs[i] {
                    SignConstraint::NonNegative => (0.0, bound),
                    SignConstraint::NonPositive => (-bound, 0.0),
                    SignConstraint::Free => (-bound, bound),
                },
                lsqgeom::model::PenaltyKind::ProductL2Balls { .. } => (-bound, bound),
            };
            (0..m)
                .map(|s| lo + (hi - lo) * s as f64 / (m - 1) as f64)
                .collect()
        })
        .collect();
    let mut pts = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let mut u = Array1::from_vec((0..d).map(|i| axes[i][idx[i]]).collect::<Vec<f64>>());
        if let lsqgeom::model::PenaltyKind::ProductL2Balls { groups, radii } = k.kind() {
            for (group, &r) in groups.iter().zip(radii.iter()) {
                let nrm: f64 = group.iter().map(|&i| u[i] * u[i]).sum::<f64>().sqrt();
                if nrm > t * r {
                    let scale = t * r / nrm;
                    for &i in group {
                        u[i] *= scale;
                    }
                }
            }
        }
        pts.push(u);
        let mut carry = 0;
        while carry < d {
            idx[carry] += 1;
            if idx[carry] < m {
                break;
            }
            idx[carry] = 0;
            carry += 1;
        }
        if carry == d {
            break;
        }
    }
    pts
}

#[test]
fn projection_agrees_with_grid_search_low_dim() {
    let cases: Vec<(PenaltySpec, f64, Vec<f64>)> = vec![
        (PenaltySpec::boxed(vec![1.0]).unwrap(), 1.0, vec![2.3]),
        (
            PenaltySpec::boxed(vec![0.5, 2.0]).unwrap(),
            1.5,
            vec![2.0, -0.7],
        ),
        (
            PenaltySpec::boxed(vec![1.0, 1.0, 1.0]).unwrap(),
            1.0,
            vec![2.0, -0.5, 0.2],
        ),
        (
            PenaltySpec::product_l2_balls(vec![vec![0, 1]], vec![1.0]).unwrap(),
            2.0,
            vec![3.0, 4.0],
        ),
        (
            PenaltySpec::product_l2_balls(vec![vec![0], vec![1, 2]], vec![0.5, 1.5]).unwrap(),
            1.0,
            vec![-1.0, 2.0, 2.0],
        ),
        (
            PenaltySpec::orthant_cone(vec![
                SignConstraint::NonNegative,
                SignConstraint::NonPositive,
            ])
            .unwrap(),
            1.0,
            vec![-1.5, 2.0],
        ),
        (
            PenaltySpec::orthant_cone(vec![
                SignConstraint::NonNegative,
                SignConstraint::Free,
                SignConstraint::NonPositive,
            ])
            .unwrap(),
            1.0,
            vec![1.0, -0.8, 2.5],
        ),
    ];
    for (k, t, vv) in cases {
        let v = Array1::from_vec(vv);
        let d = k.dimension();
        let m = match d {
            1 => 2001,
            2 => 161,
            _ => 41,
        };
        let res = project_scaled(&v, &k, t).unwrap();
        let f_proj = {
            let diff = &v - &res.point;
            0.5 * diff.dot(&diff)
        };
        let mut f_grid = f64::INFINITY;
        for axis_pts in feasible_grid(&k, t, &v, m) {
            let diff = &v - &axis_pts;
            f_grid = f_grid.min(0.5 * diff.dot(&diff));
        }
        // grid spacing bound: widest axis interval / (m - 1), times sqrt(d)
        let span = 2.0 * (v.iter().fold(1.0f64, |a, &x| a.max(x.abs())) + 1.0);
        let delta = span / (m - 1) as f64 * (d as f64).sqrt();
        // the projection can never lose to a feasible point...
        assert!(
            f_grid >= f_proj - 1e-9,
            "grid beat the projection: {f_grid} < {f_proj} for {k:?}"
        );
        // ...and the grid gets within its own resolution of the optimum
        let slack = 2.0 * res.distance * delta + delta * delta + 1e-9;
        assert!(
            f_grid - f_proj <= slack,
            "grid only reached {f_grid} vs {f_proj} (slack {slack}) for {k:?}"
        );
    }
}

#[test]
fn prox_scalar_matches_grid_minimization() {
    // argmin_b 1/2 (2 - b)^2 + 0.5 |b| over a fine 1-d grid
    let k = PenaltySpec::l1(1).unwrap();
    let v = Array1::from_vec(vec![2.0]);
    let got = prox_penalty(&v, &k, 0.5).unwrap()[0];
    let mut best = (f64::INFINITY, f64::NAN);
    let m = 400_001;
    for s in 0..m {
        let b = -3.0 + 6.0 * s as f64 / (m - 1) as f64;
        let obj = 0.5 * (2.0 - b) * (2.0 - b) + 0.5 * b.abs();
        if obj < best.0 {
            best = (obj, b);
        }
    }
    assert!((got - 1.5).abs() < 1e-12);
    assert!((best.1 - got).abs() < 2e-5, "grid argmin {} vs {got}", best.1);
}

#[test]
fn solver_agrees_with_grid_search_dim2() {
    let x = ndarray::array![[1.0, 0.4], [0.3, 1.2], [0.5, -0.6]];
    let y = ndarray::array![1.5, -0.8, 0.9];
    let problem = RegressionProblem::new(y, x.clone(), None).unwrap();
    let k = PenaltySpec::l1(2).unwrap();
    let lambda = 0.6;
    let sol = solve(&problem, &k, lambda, &tight()).unwrap();
    assert_eq!(sol.status, SolveStatus::Converged);
    let m = 801;
    let b_span = 3.0;
    let mut best = (f64::INFINITY, Array1::zeros(2));
    for s0 in 0..m {
        for s1 in 0..m {
            let b = Array1::from_vec(vec![
                -b_span + 2.0 * b_span * s0 as f64 / (m - 1) as f64,
                -b_span + 2.0 * b_span * s1 as f64 / (m - 1) as f64,
            ]);
            let obj = objective_value(&problem, &k, lambda, &b).unwrap();
            if obj < best.0 {
                best = (obj, b);
            }
        }
    }
    assert!(sol.objective <= best.0 + 1e-9);
    // the nearest grid node to the optimum costs at most the l1 slope
    // times h/sqrt(2) plus the quadratic curvature term, and strong
    // convexity converts that objective slack into a distance bound
    let eig = sym_eigen(&x.t().dot(&x));
    let h = 2.0 * b_span / (m - 1) as f64;
    assert!(
        best.0 - sol.objective <= 2.0 * lambda * h + eig.max_value() * h * h,
        "grid best {} vs solver objective {}",
        best.0,
        sol.objective
    );
    let radius =
        ((4.0 * lambda * h + 2.0 * eig.max_value() * h * h) / eig.min_value()).sqrt();
    let diff = &best.1 - &sol.beta_hat;
    assert!(
        norm2(&diff) <= radius + 1e-9,
        "grid argmin {:?} vs solver {:?} (radius {radius})",
        best.1,
        sol.beta_hat
    );
}

// ---------------------------------------------------------------------
// solver internals: dual feasibility, residual form, acceleration

#[test]
fn dual_vector_feasible_at_convergence_all_kinds() {
    let stream = SampleStream::new(41, "oracle-dual-feas");
    for (case, k) in [
        PenaltySpec::boxed(vec![1.0, 0.7, 1.3, 1.0]).unwrap(),
        PenaltySpec::product_l2_balls(vec![vec![0, 1], vec![2, 3]], vec![1.0, 0.8]).unwrap(),
        PenaltySpec::orthant_cone(vec![
            SignConstraint::NonNegative,
            SignConstraint::NonPositive,
            SignConstraint::Free,
            SignConstraint::NonNegative,
        ])
        .unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let x = gaussian_matrix(&stream, case as u64, 6, 4);
        let mut rng = stream.rng(100 + case as u64);
        let y = normal_vector(&mut rng, 6);
        let problem = RegressionProblem::new(y, x, None).unwrap();
        let sol = solve(&problem, &k, 0.8, &tight()).unwrap();
        assert_eq!(sol.status, SolveStatus::Converged, "case {case}");
        let dist = membership_check(&sol.u_hat, &k, 0.8).unwrap();
        assert!(dist <= 1e-6, "case {case}: dual sits {dist:.2e} outside");
    }
}

#[test]
fn residual_form_identity_design_all_kinds() {
    let y = ndarray::array![1.2, -0.4, 2.0, 0.3];
    let x = Array2::eye(4);
    for k in [
        PenaltySpec::boxed(vec![1.0, 1.0, 1.0, 1.0]).unwrap(),
        PenaltySpec::product_l2_balls(vec![vec![0, 1, 2, 3]], vec![1.0]).unwrap(),
        PenaltySpec::orthant_cone(vec![SignConstraint::NonPositive; 4]).unwrap(),
    ] {
        let problem = RegressionProblem::new(y.clone(), x.clone(), None).unwrap();
        let sol = solve(&problem, &k, 1.0, &tight()).unwrap();
        let resid = residual_form_check(&problem, &k, 1.0, &sol).unwrap();
        assert!(resid <= 1e-8, "identity-design residual {resid:.2e} for {k:?}");
    }
}

#[test]
fn residual_form_diagonal_design() {
    let x = ndarray::array![[1.0, 0.0], [0.0, 2.0]];
    let y = ndarray::array![3.0, 3.0];
    let problem = RegressionProblem::new(y, x, None).unwrap();
    let k = PenaltySpec::l1(2).unwrap();
    let sol = solve(&problem, &k, 1.0, &tight()).unwrap();
    let resid = residual_form_check(&problem, &k, 1.0, &sol).unwrap();
    assert!(resid <= 1e-6, "diagonal-design residual {resid:.2e}");
}

#[test]
fn acceleration_consistency_on_wide_design() {
    let stream = SampleStream::new(77, "oracle-accel");
    let mut rng = stream.rng(0);
    let n = 200;
    let p = 500;
    let data: Vec<f64> = (0..n * p).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
    let mut x = Array2::from_shape_vec((n, p), data).unwrap();
    // shared row component correlates every pair of columns, which is
    // what makes momentum actually pay off
    let common = normal_vector(&mut stream.rng(2), n);
    for j in 0..p {
        for i in 0..n {
            x[[i, j]] += 0.5 * common[i];
        }
    }
    let beta0 = {
        let mut b = Array1::zeros(p);
        b[3] = 2.0;
        b[40] = -1.5;
        b[200] = 1.0;
        b
    };
    let noise = normal_vector(&mut stream.rng(1), n);
    let y = x.dot(&beta0) + 0.5 * &noise;
    let problem = RegressionProblem::new(y.clone(), x.clone(), None).unwrap();
    let k = PenaltySpec::l1(p).unwrap();
    let lam_max = x.t().dot(&y).iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let lambda = 0.02 * lam_max;
    // tolerance chosen inside the sublinear phase, where momentum's
    // advantage is structural rather than a lucky tail effect
    let accel = solve(
        &problem,
        &k,
        lambda,
        &SolverConfig {
            tol_gap: 1e-8,
            max_iter: 150_000,
            ..Default::default()
        },
    )
    .unwrap();
    let plain = solve(
        &problem,
        &k,
        lambda,
        &SolverConfig {
            accelerated: false,
            tol_gap: 1e-8,
            max_iter: 150_000,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(accel.status, SolveStatus::Converged);
    assert_eq!(plain.status, SolveStatus::Converged);
    let max_diff = accel
        .beta_hat
        .iter()
        .zip(plain.beta_hat.iter())
        .fold(0.0f64, |a, (&u, &v)| a.max((u - v).abs()));
    assert!(max_diff < 1e-6, "accelerated vs plain differ by {max_diff:.2e}");
    assert!(
        accel.iterations < plain.iterations,
        "acceleration took {} iterations, plain {}",
        accel.iterations,
        plain.iterations
    );
}

#[test]
fn classical_bound_dominates_actual_error() {
    let stream = SampleStream::new(300, "oracle-classical");
    for trial in 0..1000u64 {
        let x = gaussian_matrix(&stream, trial, 50, 10);
        let mut rng = stream.rng(10_000 + trial);
        let beta0 = normal_vector(&mut rng, 10);
        let eps = normal_vector(&mut rng, 50);
        let y = x.dot(&beta0) + &eps;
        let problem = RegressionProblem::new(y.clone(), x.clone(), None).unwrap();
        let bound = classical_error_certificate(&problem, &beta0, &eps).unwrap();
        let actual = norm2(&(&lstsq(&x, &y) - &beta0));
        assert!(
            bound >= actual,
            "trial {trial}: bound {bound} < actual {actual}"
        );
    }
}

#[test]
fn lambda_recommendation_matches_half_normal_mean() {
    // n = p = 1, unit box: E |g| = sqrt(2/pi)
    let x = Array2::eye(1);
    let k = PenaltySpec::l1(1).unwrap();
    let rec = lambda_recommendation(&x, &k, 1.5, 2.0, 400_000, 5).unwrap();
    let expect = 2.0 * 1.5 * (2.0 / std::f64::consts::PI).sqrt();
    assert!(
        (rec.value - expect).abs() < 4.0 * rec.std_error,
        "{} vs {expect} (se {})",
        rec.value,
        rec.std_error
    );
}

// ---------------------------------------------------------------------
// path inference against closed forms and direct simulation

#[test]
fn path_matches_solver_along_random_design() {
    let stream = SampleStream::new(88, "oracle-path-vs-solver");
    let x = gaussian_matrix(&stream, 0, 30, 10);
    let y = normal_vector(&mut stream.rng(1), 30);
    let problem = RegressionProblem::new(y.clone(), x.clone(), None).unwrap();
    let k = PenaltySpec::l1(10).unwrap();
    let path = lasso_path(&x, &y, 200).unwrap();
    assert!(path.is_complete());
    let lam1 = path.knots()[0];
    let mut rng = stream.rng(2);
    for _ in 0..20 {
        let lam = lam1 * (0.02 + 0.96 * rng.random::<f64>());
        let b_path = path.beta_at(lam).unwrap();
        let b_solve = solve(&problem, &k, lam, &tight()).unwrap().beta_hat;
        let diff = (&b_path - &b_solve)
            .iter()
            .fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(diff < 1e-6, "path vs solver differ by {diff:.2e} at {lam}");
    }
}

#[test]
fn covstat_matches_knot_form_orthogonal_all_k() {
    let stream = SampleStream::new(99, "oracle-covstat-knot");
    for trial in 0..20u64 {
        let n = 8;
        let y = normal_vector(&mut stream.rng(trial), n);
        let x = Array2::eye(n);
        let path = lasso_path(&x, &y, n + 1).unwrap();
        let sigma_sq = 0.7;
        for k in 1..path.knots().len() {
            let res = covariance_statistic(&path, &x, &y, k, sigma_sq).unwrap();
            let lam_k = path.knots()[k - 1];
            let lam_next = path.knots()[k];
            let knot_form = lam_k * (lam_k - lam_next) / sigma_sq;
            assert!(
                (res.t_value - knot_form).abs() < 1e-8 * (1.0 + knot_form),
                "trial {trial} k {k}: {} vs knot form {knot_form}",
                res.t_value
            );
            assert!((res.p_value - (-res.t_value).exp()).abs() < 1e-12);
        }
    }
}

fn two_sample_ks(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

#[test]
fn null_calibration_matches_order_statistic_oracle() {
    // two orthogonal coordinates: T_1 = l1 (l1 - l2) where l1 >= l2 are
    // the order statistics of two absolute standard normals
    let x = Array2::eye(2);
    let cal = null_calibration(&x, 1.0, 10_000, 123, 1).unwrap();
    let stream = SampleStream::new(321, "oracle-order-stat");
    let mut direct = Vec::with_capacity(1_000_000);
    for i in 0..1_000_000u64 {
        let g = normal_vector(&mut stream.rng(i), 2);
        let (a, b) = (g[0].abs(), g[1].abs());
        let (l1, l2) = if a >= b { (a, b) } else { (b, a) };
        direct.push(l1 * (l1 - l2));
    }
    let mut cal_t = cal.t_values.clone();
    let d = two_sample_ks(&mut cal_t, &mut direct);
    assert!(d < 0.02, "KS distance to order-statistic oracle: {d}");
}

// ---------------------------------------------------------------------
// degrees of freedom: rank formula vs finite differences

#[test]
fn dof_rank_matches_divergence_orthogonal() {
    let n = 6;
    let y = ndarray::array![2.3, -0.4, 1.7, 0.1, -2.8, 0.9];
    let x = Array2::eye(n);
    let problem = RegressionProblem::new(y.clone(), x.clone(), Some(1.0)).unwrap();
    let k = PenaltySpec::l1(n).unwrap();
    let lambda = 1.0;
    let sol = solve(&problem, &k, lambda, &tight()).unwrap();
    let est = dof_polyhedral(&problem, &k, lambda, &sol).unwrap();
    assert!(est.generic);
    // independent fit map: the homotopy path evaluated at the same level
    let fit = |yy: &Array1<f64>| {
        let path = lasso_path(&x, yy, 50)?;
        Ok(x.dot(&path.beta_at(lambda)?))
    };
    let div = divergence_fd(fit, &y, 1e-5).unwrap();
    assert!(
        (est.dof - div).abs() < 1e-4,
        "rank dof {} vs divergence {div}",
        est.dof
    );
}

// ---------------------------------------------------------------------
// geometry: Hermite stencils, chi-bar means, Steiner consistency,
// critical radius conditioning

/// j-th derivative of f at u by a central stencil with two Richardson
/// refinements (error O(h^6)).
fn fd_derivative<F: Fn(f64) -> f64>(f: &F, j: usize, u: f64, h: f64) -> f64 {
    let stencil = |h: f64| {
        let mut total = 0.0;
        let mut coeff = 1.0f64;
        for i in 0..=j {
            total += coeff * f(u + (j as f64 / 2.0 - i as f64) * h);
            coeff *= -((j - i) as f64) / (i as f64 + 1.0);
        }
        total / h.powi(j as i32)
    };
    let r1 = |h: f64| (4.0 * stencil(h) - stencil(2.0 * h)) / 3.0;
    (16.0 * r1(h) - r1(2.0 * h)) / 15.0
}

#[test]
fn hermite_matches_derivative_definition() {
    // H_j(u) = (-1)^j e^{u^2/2} d^j/du^j e^{-u^2/2}
    let f = |t: f64| (-0.5 * t * t).exp();
    for j in 1..=4usize {
        for iu in -2..=2i32 {
            let u = iu as f64;
            let deriv = fd_derivative(&f, j, u, 0.03);
            let expect = if j % 2 == 0 { 1.0 } else { -1.0 } * (0.5 * u * u).exp() * deriv;
            let got = hermite(j, u);
            assert!(
                (got - expect).abs() < 1e-6,
                "H_{j}({u}): recurrence {got} vs stencil {expect}"
            );
        }
    }
}

#[test]
fn chi_bar_mean_matches_projected_norm_mc() {
    let signs = vec![SignConstraint::NonNegative, SignConstraint::NonNegative];
    let k = PenaltySpec::orthant_cone(signs.clone()).unwrap();
    let exact = mean_chi_bar(&exact_orthant_weights(&signs)).unwrap();
    let stream = SampleStream::new(17, "oracle-chibar-mean");
    let n = 200_000u64;
    let vals: Vec<f64> = (0..n)
        .map(|i| {
            let g = normal_vector(&mut stream.rng(i), 2);
            norm2(&project_scaled(&g, &k, 1.0).unwrap().point)
        })
        .collect();
    let m = lsqgeom::rng::mc_moments(&vals);
    assert!(
        (m.mean - exact).abs() < 4.0 * m.std_error,
        "MC mean {} vs exact {exact} (se {})",
        m.mean,
        m.std_error
    );
    // quarter circle: 1/2 sqrt(2/pi) + 1/4 sqrt(pi/2)
    let closed = 0.5 * (2.0 / std::f64::consts::PI).sqrt()
        + 0.25 * (std::f64::consts::PI / 2.0).sqrt();
    assert!((exact - closed).abs() < 1e-12);
}

#[test]
fn steiner_fit_predicts_held_out_tube_volume() {
    let sq = ConvexBody2D::unit_square();
    let est = steiner_fit(&sq, &[0.3, 0.6, 1.0, 1.6], 300_000, 9).unwrap();
    let r_held = 1.25;
    // tube area = pi r^2 L0 + 2 r L1 + L2, with values[j] holding L_j
    let design = [std::f64::consts::PI * r_held * r_held, 2.0 * r_held, 1.0];
    let pred: f64 = (0..3).map(|j| design[j] * est.values[j]).sum();
    let pred_se: f64 = (0..3)
        .map(|j| (design[j] * est.std_errors[j]).powi(2))
        .sum::<f64>()
        .sqrt();
    let direct = tube_volume_mc(&sq, r_held, 300_000, 10).unwrap();
    let combined = (pred_se * pred_se + direct.std_error * direct.std_error).sqrt();
    assert!(
        (pred - direct.volume).abs() < 3.0 * combined + 0.01 * pred,
        "predicted {pred} (se {pred_se}) vs direct {} (se {})",
        direct.volume,
        direct.std_error
    );
}

/// Conditional variance of f(y) given (f(x), f'(x)) via the inverse of
/// the full 3x3 covariance matrix: 1 / (Sigma^{-1})_{00}.
fn conditioning_oracle(kernel: &SquaredExponentialKernel, x: f64, y: f64) -> f64 {
    use lsqgeom::geometry::CovarianceKernel;
    let s = [
        [1.0, kernel.cov(y, x), kernel.dcov_ds(x, y)],
        [kernel.cov(y, x), 1.0, kernel.dcov_ds(x, x)],
        [
            kernel.dcov_ds(x, y),
            kernel.dcov_ds(x, x),
            kernel.d2cov_dsdt(x, x),
        ],
    ];
    let det = s[0][0] * (s[1][1] * s[2][2] - s[1][2] * s[2][1])
        - s[0][1] * (s[1][0] * s[2][2] - s[1][2] * s[2][0])
        + s[0][2] * (s[1][0] * s[2][1] - s[1][1] * s[2][0]);
    let cof00 = s[1][1] * s[2][2] - s[1][2] * s[2][1];
    det / cof00
}

#[test]
fn critical_radius_matches_covariance_inversion_oracle() {
    use lsqgeom::geometry::CovarianceKernel;
    let kernel = SquaredExponentialKernel::new(1.0).unwrap();
    let grid = uniform_grid(0.0, 3.0, 200).unwrap();
    let delta = 2.0 * (grid[1] - grid[0]);
    let est = critical_radius_process(&kernel, &grid, delta).unwrap();
    let mut sup_oracle = 0.0f64;
    for &x in &grid {
        for &y in &grid {
            if (x - y).abs() < delta * (1.0 - 1e-12) {
                continue;
            }
            let cond = conditioning_oracle(&kernel, x, y);
            let denom = 1.0 - kernel.cov(x, y);
            let ratio = cond.max(0.0) / (denom * denom);
            sup_oracle = sup_oracle.max(ratio);
            let direct = conditional_ratio(&kernel, x, y).unwrap();
            assert!(
                (direct - ratio).abs() < 1e-8,
                "pair ({x}, {y}): closed form {direct} vs inversion {ratio}"
            );
        }
    }
    assert!(
        (est.cot_sq - sup_oracle).abs() < 1e-8,
        "sup {} vs oracle {sup_oracle}",
        est.cot_sq
    );
}

#[test]
fn critical_radius_stable_under_grid_refinement() {
    let kernel = SquaredExponentialKernel::new(1.0).unwrap();
    let coarse_grid = uniform_grid(0.0, 4.0, 81).unwrap();
    let fine_grid = uniform_grid(0.0, 4.0, 161).unwrap();
    let delta = 2.0 * (coarse_grid[1] - coarse_grid[0]);
    let coarse = critical_radius_process(&kernel, &coarse_grid, delta).unwrap();
    let fine = critical_radius_process(&kernel, &fine_grid, delta).unwrap();
    let rel = (coarse.cot_sq - fine.cot_sq).abs() / fine.cot_sq;
    assert!(rel < 0.01, "cot^2 moved by relative {rel:.4} under refinement");
}

// ---------------------------------------------------------------------
// sanity triple for the cone support function, with the signs that
// actually put the point in the polar cone

#[test]
fn cone_support_zero_exactly_on_polar() {
    let k = PenaltySpec::orthant_cone(vec![
        SignConstraint::NonPositive,
        SignConstraint::NonPositive,
    ])
    .unwrap();
    // polar of the nonpositive orthant is the nonnegative orthant
    let inside = Array1::from_vec(vec![1.0, 2.0]);
    let outside = Array1::from_vec(vec![-1.0, -2.0]);
    assert_eq!(support_function(&inside, &k).unwrap(), 0.0);
    assert!(support_function(&outside, &k).unwrap().is_infinite());
}
