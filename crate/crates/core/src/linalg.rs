//! Dense least squares for the small, tall design matrices of the forecaster.
//!
//! The solver runs a one-sided (Hestenes) Jacobi SVD on the design matrix and
//! returns the minimum-norm minimizer of `‖X b - y‖²`. Singular values below
//! `max(n, k) · ε · σ_max` are treated as zero.

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix { rows: rows.len(), cols, data: rows.iter().flatten().copied().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn mul_vec(&self, b: &[T]) -> Vec<T> {
        assert_eq!(b.len(), self.cols);
        (0..self.rows).map(|r| dot(self.row(r), b)).collect()
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub coefficients: Vec<T>,
    pub rank: usize,
    pub singular_values: Vec<T>,
}

impl<T> LeastSquares<T> {
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.singular_values.len()
    }
}

const MAX_SWEEPS: usize = 80;

/// Minimum-norm least-squares solution of `x b ≈ y`.
pub fn solve_min_norm<T: Scalar>(x: &Matrix<T>, y: &[T]) -> LeastSquares<T> {
    assert_eq!(x.rows(), y.len(), "response length must match design rows");
    let (n, k) = (x.rows(), x.cols());
    // columns of U start as columns of X and are rotated to mutual orthogonality
    let mut u: Vec<Vec<T>> = (0..k).map(|c| x.column(c)).collect();
    let mut v: Vec<Vec<T>> =
        (0..k).map(|c| (0..k).map(|r| if r == c { T::one() } else { T::zero() }).collect()).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..k {
            for j in i + 1..k {
                let alpha = dot(&u[i], &u[i]);
                let beta = dot(&u[j], &u[j]);
                let gamma = dot(&u[i], &u[j]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (T::lit(2.0) * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<T> = u.iter().map(|col| dot(col, col).sqrt()).collect();
    let sigma_max = sigma.iter().copied().fold(T::zero(), T::max);
    let tol = T::from_count(n.max(k)) * eps * sigma_max;
    let mut coef = vec![T::zero(); k];
    let mut rank = 0;
    for i in 0..k {
        if sigma[i] > tol && sigma[i] > T::zero() {
            rank += 1;
            // (u_i · y) / σ_i² = (unit_u_i · y) / σ_i
            let w = dot(&u[i], y) / (sigma[i] * sigma[i]);
            for (cj, vj) in coef.iter_mut().zip(&v[i]) {
                *cj = *cj + w * *vj;
            }
        }
    }
    let mut singular_values = sigma;
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    LeastSquares { coefficients: coef, rank, singular_values }
}

fn rotate<T: Scalar>(cols: &mut [Vec<T>], i: usize, j: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(j);
    let (a, b) = (&mut left[i], &mut right[0]);
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let (xi, yi) = (*x, *y);
        *x = c * xi - s * yi;
        *y = s * xi + c * yi;
    }
}
