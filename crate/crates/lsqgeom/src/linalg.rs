//! Small dense linear algebra: power iteration, a Jacobi symmetric
//! eigensolver, Cholesky and LU solves. Problem sizes here are desk
//! scale, so simple O(n^3) routines with careful tolerances are plenty
//! and keep the crate free of external BLAS/LAPACK linkage.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Spectral norm of `x` via power iteration on `x^T x`
/// (50 iterations, relative tolerance 1e-10).
pub fn operator_norm(x: &Array2<f64>) -> f64 {
    let p = x.ncols();
    if p == 0 || x.nrows() == 0 {
        return 0.0;
    }
    let mut v = Array1::from_elem(p, (p as f64).powf(-0.5));
    let mut lambda = 0.0f64;
    for _ in 0..50 {
        let w = x.t().dot(&x.dot(&v));
        let norm = w.dot(&w).sqrt();
        if norm <= f64::MIN_POSITIVE {
            return 0.0;
        }
        let next_lambda = norm; // ||G v|| -> top eigenvalue of G for unit v
        v = w / norm;
        if (next_lambda - lambda).abs() <= 1e-10 * next_lambda.max(1.0) {
            lambda = next_lambda;
            break;
        }
        lambda = next_lambda;
    }
    lambda.max(0.0).sqrt()
}

/// Eigendecomposition `a = V diag(values) V^T` of a symmetric matrix,
/// eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Array1<f64>,
    pub vectors: Array2<f64>,
}

/// Cyclic Jacobi sweeps; converges quadratically, and 50 sweeps is far
/// more than the handful needed at these sizes.
pub fn sym_eigen(a: &Array2<f64>) -> SymEigen {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigen needs a square matrix");
    let mut m = a.clone();
    let mut v: Array2<f64> = Array2::eye(n);
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _sweep in 0..50 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() <= 1e-15 * frob.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values = Array1::from_iter(order.iter().map(|&i| m[[i, i]]));
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for row in 0..n {
            vectors[[row, col]] = v[[row, i]];
        }
    }
    SymEigen { values, vectors }
}

impl SymEigen {
    fn cutoff(&self, rel_tol: f64) -> f64 {
        let max = self
            .values
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        rel_tol * max.max(f64::MIN_POSITIVE)
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = self.cutoff(rel_tol);
        self.values.iter().filter(|&&v| v.abs() > cut).count()
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `v^T A^+ v` using eigenvalues above the relative cutoff.
    pub fn pinv_quadform(&self, v: &Array1<f64>, rel_tol: f64) -> f64 {
        let cut = self.cutoff(rel_tol);
        let coords = self.vectors.t().dot(v);
        coords
            .iter()
            .zip(self.values.iter())
            .filter(|(_, &lam)| lam.abs() > cut)
            .map(|(&c, &lam)| c * c / lam)
            .sum()
    }

    /// `A^+ v` over the same spectral cutoff.
    pub fn pinv_apply(&self, v: &Array1<f64>, rel_tol: f64) -> Array1<f64> {
        let cut = self.cutoff(rel_tol);
        let mut coords = self.vectors.t().dot(v);
        for (c, &lam) in coords.iter_mut().zip(self.values.iter()) {
            if lam.abs() > cut {
                *c /= lam;
            } else {
                *c = 0.0;
            }
        }
        self.vectors.dot(&coords)
    }

    /// Orthogonal projection of `v` onto the span of eigenvectors with
    /// eigenvalue above the cutoff (for `X^T X` this is row(X)).
    pub fn project_range(&self, v: &Array1<f64>, rel_tol: f64) -> Array1<f64> {
        let cut = self.cutoff(rel_tol);
        let mut coords = self.vectors.t().dot(v);
        for (c, &lam) in coords.iter_mut().zip(self.values.iter()) {
            if lam.abs() <= cut {
                *c = 0.0;
            }
        }
        self.vectors.dot(&coords)
    }
}

/// Minimum-norm least squares solution of `x b = y`.
pub fn lstsq(x: &Array2<f64>, y: &Array1<f64>) -> Array1<f64> {
    let eig = sym_eigen(&x.t().dot(x));
    eig.pinv_apply(&x.t().dot(y), 1e-12)
}

/// Solve `a b = rhs` for symmetric positive definite `a`; `None` when a
/// pivot falls below the relative tolerance (rank deficiency).
pub fn cholesky_solve(a: &Array2<f64>, rhs: &Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, rhs.len());
    let max_diag = (0..n).fold(0.0f64, |acc, i| acc.max(a[[i, i]].abs()));
    let tol = 1e-12 * max_diag.max(f64::MIN_POSITIVE);
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if s <= tol {
                    return None;
                }
                l[[i, i]] = s.sqrt();
            } else {
                l[[i, j]] = s / l[[j, j]];
            }
        }
    }
    // forward then back substitution
    let mut z = rhs.clone();
    for i in 0..n {
        for k in 0..i {
            let t = l[[i, k]] * z[k];
            z[i] -= t;
        }
        z[i] /= l[[i, i]];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let t = l[[k, i]] * z[k];
            z[i] -= t;
        }
        z[i] /= l[[i, i]];
    }
    Some(z)
}

/// LU factorization with partial pivoting, kept around for repeated solves
/// with the matrix and its transpose.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: Array2<f64>,
    perm: Vec<usize>, // row i of PA is row perm[i] of A
}

pub fn lu_factor(a: &Array2<f64>) -> Result<LuFactors> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            what: "lu_factor (square matrix required)",
            expected: n,
            got: a.ncols(),
        });
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[[col, col]].abs();
        for r in (col + 1)..n {
            if lu[[r, col]].abs() > best {
                best = lu[[r, col]].abs();
                piv = r;
            }
        }
        if best <= tol {
            return Err(Error::Singular { what: "design matrix" });
        }
        if piv != col {
            for c in 0..n {
                let tmp = lu[[col, c]];
                lu[[col, c]] = lu[[piv, c]];
                lu[[piv, c]] = tmp;
            }
            perm.swap(col, piv);
        }
        for r in (col + 1)..n {
            let f = lu[[r, col]] / lu[[col, col]];
            lu[[r, col]] = f;
            for c in (col + 1)..n {
                let t = f * lu[[col, c]];
                lu[[r, c]] -= t;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    pub fn n(&self) -> usize {
        self.lu.nrows()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.n();
        let mut z = Array1::from_iter(self.perm.iter().map(|&i| b[i]));
        for i in 0..n {
            for k in 0..i {
                let t = self.lu[[i, k]] * z[k];
                z[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let t = self.lu[[i, k]] * z[k];
                z[i] -= t;
            }
            z[i] /= self.lu[[i, i]];
        }
        z
    }

    /// Solve `A^T x = b` from the same factors: with PA = LU this is
    /// U^T t = b, L^T s = t, x = P^T s.
    pub fn solve_transpose(&self, b: &Array1<f64>) -> Array1<f64> {
        let n = self.n();
        let mut t = b.clone();
        for i in 0..n {
            for k in 0..i {
                let u = self.lu[[k, i]] * t[k];
                t[i] -= u;
            }
            t[i] /= self.lu[[i, i]];
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.lu[[k, i]] * t[k];
                t[i] -= u;
            }
        }
        let mut x = Array1::zeros(n);
        for (i, &pi) in self.perm.iter().enumerate() {
            x[pi] = t[i];
        }
        x
    }
}

pub fn norm2(v: &Array1<f64>) -> f64 {
    v.dot(v).sqrt()
}
