//! Small dense helpers on top of `nalgebra`: column-selecting orthogonal
//! factorization, rank, Gram volumes and a non-negative least-squares solve.

use nalgebra::{DMatrix, DVector};

/// Relative threshold below which a residual column norm counts as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Result of orthogonalizing a list of columns with column selection.
///
/// `q` holds orthonormal columns, `r` is upper triangular with positive
/// diagonal such that `cols[selected[j]] = Σ_i q[i] r[(i, j)]`.
#[derive(Debug, Clone)]
pub struct Orthogonalized {
    pub q: Vec<DVector<f64>>,
    pub r: DMatrix<f64>,
    pub selected: Vec<usize>,
}

impl Orthogonalized {
    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// Product of the diagonal of `r`, i.e. the volume of the parallelotope
    /// spanned by the selected columns.
    pub fn abs_det(&self) -> f64 {
        (0..self.r.nrows()).map(|i| self.r[(i, i)]).product()
    }

    pub fn q_matrix(&self, nrows: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(nrows, self.q.len());
        for (j, c) in self.q.iter().enumerate() {
            m.set_column(j, c);
        }
        m
    }

    /// Coefficients of `v` in the selected columns (least squares).
    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        let k = self.q.len();
        let mut rhs = DVector::from_iterator(k, self.q.iter().map(|q| q.dot(v)));
        // back substitution
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for j in i + 1..k {
                s -= self.r[(i, j)] * rhs[j];
            }
            rhs[i] = s / self.r[(i, i)];
        }
        rhs
    }

    /// Component of `v` orthogonal to the span of the selected columns.
    pub fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &self.q {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        w
    }
}

/// Modified Gram-Schmidt with re-orthogonalization and greedy column
/// selection. A column is dropped when its residual norm is below
/// `rel_tol` times the largest input column norm.
pub fn orthogonalize(cols: &[DVector<f64>], rel_tol: f64) -> Orthogonalized {
    let scale = cols.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tol = rel_tol * scale;
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut selected = Vec::new();
    for (idx, c) in cols.iter().enumerate() {
        let mut w = c.clone();
        for _ in 0..2 {
            for qi in &q {
                let proj = qi.dot(&w);
                w.axpy(-proj, qi, 1.0);
            }
        }
        let n = w.norm();
        if scale > 0.0 && n > tol {
            q.push(w / n);
            selected.push(idx);
        }
    }
    let k = q.len();
    let mut r = DMatrix::zeros(k, k);
    for (j, &s) in selected.iter().enumerate() {
        for i in 0..=j {
            r[(i, j)] = q[i].dot(&cols[s]);
        }
    }
    Orthogonalized { q, r, selected }
}

pub fn rank(cols: &[DVector<f64>]) -> usize {
    orthogonalize(cols, RANK_TOL).rank()
}

/// `sqrt(det(MᵀM))` for the matrix with the given columns, without any
/// column selection (a dependent column gives a (near) zero result).
pub fn gram_volume(cols: &[DVector<f64>]) -> f64 {
    let mut q: Vec<DVector<f64>> = Vec::new();
    let mut vol = 1.0;
    for c in cols {
        let mut w = c.clone();
        for _ in 0..2 {
            for qi in &q {
                let proj = qi.dot(&w);
                w.axpy(-proj, qi, 1.0);
            }
        }
        let n = w.norm();
        vol *= n;
        if n == 0.0 {
            return 0.0;
        }
        q.push(w / n);
    }
    vol
}

/// Lawson-Hanson non-negative least squares: `min |Ax − b|` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        match candidate {
            Some(j) if w[j] > tol => passive[j] = true,
            _ => break,
        }
        for _ in 0..max_outer {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = a.select_columns(&idx);
            let sol = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-14)
                .unwrap_or_else(|_| DVector::zeros(idx.len()));
            if sol.iter().all(|&v| v > 0.0) {
                for (k, &j) in idx.iter().enumerate() {
                    x[j] = sol[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if sol[k] <= 0.0 {
                    let denom = x[j] - sol[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                x[j] += alpha * (sol[k] - x[j]);
                if x[j] <= 1e-15 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

/// Euclidean distance from the origin to the convex hull of `points`.
pub fn min_norm_in_hull(points: &[DVector<f64>]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    let m = points[0].len();
    let n = points.len();
    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let big = 1e4 * scale;
    let mut a = DMatrix::zeros(m + 1, n);
    for (j, p) in points.iter().enumerate() {
        for i in 0..m {
            a[(i, j)] = p[i];
        }
        a[(m, j)] = big;
    }
    let mut b = DVector::zeros(m + 1);
    b[m] = big;
    let x = nnls(&a, &b);
    let total: f64 = x.iter().sum();
    if total <= 0.0 {
        return points.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    }
    let mut c = DVector::zeros(m);
    for (j, p) in points.iter().enumerate() {
        c.axpy(x[j] / total, p, 1.0);
    }
    c.norm()
}
