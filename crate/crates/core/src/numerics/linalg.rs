//! Dense linear algebra: a row-major matrix, Householder least squares with
//! column pivoting, cyclic Jacobi for symmetric eigenproblems and a Cholesky
//! solver for small symmetric positive definite systems.

use crate::error::{Error, Result};

/// Dense row-major matrix of finite `f64` values.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput("matrix"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Builds a matrix whose columns are the given slices.
    pub fn from_columns(n_rows: usize, columns: &[&[f64]]) -> Result<Self> {
        let cols = columns.len();
        let mut data = vec![0.0; n_rows * cols];
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has {} rows, expected {n_rows}",
                    col.len()
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                data[i * cols + j] = v;
            }
        }
        Self::new(n_rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solution of a linear least-squares problem.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquares {
    pub coef: Vec<f64>,
    /// Zero when the fit was requested without intercept.
    pub intercept: f64,
    pub rank: usize,
}

impl LeastSquares {
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.intercept + dot(&self.coef, row)
    }
}

/// Householder reflector `I - beta v v^T` acting on rows `offset..`.
struct Reflector {
    offset: usize,
    v: Vec<f64>,
    beta: f64,
}

impl Reflector {
    fn apply(&self, x: &mut [f64]) {
        let tail = &mut x[self.offset..];
        let s = self.beta * dot(&self.v, tail);
        for (t, vi) in tail.iter_mut().zip(&self.v) {
            *t -= s * vi;
        }
    }
}

/// Column-major working copy used by the QR routines.
struct ColMajor {
    rows: usize,
    cols: Vec<Vec<f64>>,
}

/// Builds the reflector that maps `x` onto a multiple of e1 and returns
/// it with the resulting diagonal value.
fn householder(x: &[f64], offset: usize) -> (Reflector, f64) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (
            Reflector {
                offset,
                v: vec![0.0; x.len()],
                beta: 0.0,
            },
            0.0,
        );
    }
    let alpha = if x[0] >= 0.0 { -norm } else { norm };
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vnorm2: f64 = v.iter().map(|t| t * t).sum();
    let beta = if vnorm2 == 0.0 { 0.0 } else { 2.0 / vnorm2 };
    (Reflector { offset, v, beta }, alpha)
}

/// QR with column pivoting: A P = Q R. Returns reflectors, R (as columns,
/// in pivoted order), and the permutation.
fn pivoted_qr(mut a: ColMajor, pivot: bool) -> (Vec<Reflector>, ColMajor, Vec<usize>) {
    let m = a.rows;
    let n = a.cols.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::with_capacity(m.min(n));
    for k in 0..m.min(n) {
        if pivot {
            // Norms are recomputed on the trailing block each step rather than
            // downdated, trading O(mn) work for exact pivot choices.
            let mut best = k;
            let mut best_norm = -1.0;
            for j in k..n {
                let nj: f64 = a.cols[j][k..].iter().map(|v| v * v).sum();
                if nj > best_norm {
                    best_norm = nj;
                    best = j;
                }
            }
            a.cols.swap(k, best);
            perm.swap(k, best);
        }
        let (refl, alpha) = householder(&a.cols[k][k..], k);
        for j in (k + 1)..n {
            refl.apply(&mut a.cols[j]);
        }
        a.cols[k][k] = alpha;
        for v in a.cols[k][(k + 1)..].iter_mut() {
            *v = 0.0;
        }
        reflectors.push(refl);
    }
    (reflectors, a, perm)
}

/// Minimum-norm least squares solution of `X b ~ y` via Householder QR with
/// column pivoting. Columns whose pivot falls below `1e-12 * ||X||_F` are
/// treated as dependent; the remaining trapezoidal system is closed with a
/// second QR so the returned coefficients have minimum Euclidean norm.
///
/// With `fit_intercept` the design and response are centred first, so the
/// intercept is never part of the minimised norm.
pub fn least_squares(x: &Matrix, y: &[f64], fit_intercept: bool) -> Result<LeastSquares> {
    let n = x.rows();
    let p = x.cols();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "design has {n} rows, response has {}",
            y.len()
        )));
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("least squares needs at least one row".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput("response"));
    }
    let (x_means, y_mean) = if fit_intercept {
        let xm: Vec<f64> = (0..p)
            .map(|j| (0..n).map(|i| x.get(i, j)).sum::<f64>() / n as f64)
            .collect();
        (xm, y.iter().sum::<f64>() / n as f64)
    } else {
        (vec![0.0; p], 0.0)
    };
    let cols: Vec<Vec<f64>> = (0..p)
        .map(|j| (0..n).map(|i| x.get(i, j) - x_means[j]).collect())
        .collect();
    let mut rhs: Vec<f64> = y.iter().map(|v| v - y_mean).collect();

    let (coef, rank) = if p == 0 {
        (Vec::new(), 0)
    } else {
        let norm = cols
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        let (reflectors, r, perm) = pivoted_qr(ColMajor { rows: n, cols }, true);
        for refl in &reflectors {
            refl.apply(&mut rhs);
        }
        let tol = 1e-12 * norm;
        let rank = (0..n.min(p))
            .take_while(|&k| r.cols[k][k].abs() > tol)
            .count();
        let z = if rank == 0 {
            vec![0.0; p]
        } else if rank == p {
            back_substitute(&r, &rhs[..p])
        } else {
            min_norm_trapezoidal(&r, rank, &rhs[..rank])
        };
        let mut coef = vec![0.0; p];
        for (k, &j) in perm.iter().enumerate() {
            coef[j] = z[k];
        }
        (coef, rank)
    };
    let intercept = if fit_intercept {
        y_mean - dot(&x_means, &coef)
    } else {
        0.0
    };
    Ok(LeastSquares {
        coef,
        intercept,
        rank,
    })
}

/// Solves the upper triangular system `R z = c` (R square, full rank).
fn back_substitute(r: &ColMajor, c: &[f64]) -> Vec<f64> {
    let p = c.len();
    let mut z = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = c[i];
        for j in (i + 1)..p {
            s -= r.cols[j][i] * z[j];
        }
        z[i] = s / r.cols[i][i];
    }
    z
}

/// Minimum-norm solution of `R[0..rank, ..] z = c` for an upper
/// trapezoidal `R` with full row rank.
fn min_norm_trapezoidal(r: &ColMajor, rank: usize, c: &[f64]) -> Vec<f64> {
    let p = r.cols.len();
    // Columns of R1^T are the rows of R1: a p x rank matrix.
    let cols: Vec<Vec<f64>> = (0..rank)
        .map(|i| (0..p).map(|j| if j >= i { r.cols[j][i] } else { 0.0 }).collect())
        .collect();
    let (reflectors, r2, _) = pivoted_qr(ColMajor { rows: p, cols }, false);
    // R1 z = R2^T Q2^T z = c; forward-substitute R2^T w = c.
    let mut w = vec![0.0; p];
    for i in 0..rank {
        let mut s = c[i];
        for j in 0..i {
            s -= r2.cols[i][j] * w[j];
        }
        w[i] = s / r2.cols[i][i];
    }
    for refl in reflectors.iter().rev() {
        refl.apply(&mut w);
    }
    w
}

/// Eigendecomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Sorted in descending order.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition. Stops once the off-diagonal Frobenius
/// norm falls below `1e-12 * ||A||_F` or after 100 sweeps. Each
/// eigenvector is signed so its largest-magnitude entry is non-negative.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            n,
            a.cols()
        )));
    }
    let sym_tol = 1e-10 * a.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (a.get(i, j) - a.get(j, i)).abs() > sym_tol {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut m = a.clone();
    // Work on the exactly symmetric part.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let mut v = Matrix::identity(n);
    let threshold = 1e-12 * a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).powi(2))
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m.get(j, j).total_cmp(&m.get(i, i)).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        let lead = col
            .iter()
            .copied()
            .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if lead < 0.0 {
            col.iter_mut().for_each(|x| *x = -*x);
        }
        for (i, x) in col.into_iter().enumerate() {
            vectors.set(i, dst, x);
        }
    }
    Ok(SymEigen { values, vectors })
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky.
/// Returns `None` when a pivot is not strictly positive.
pub fn cholesky_solve(a: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k).powi(2);
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        l.set(j, j, ljj);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / ljj);
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * x[k];
        }
        x[i] = s / l.get(i, i);
    }
    Some(x)
}
