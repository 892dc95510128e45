//! Small dense linear algebra: row-major matrices, Cholesky solves and a
//! symmetric eigenvalue routine used for condition estimates.

use crate::error::{FcarError, Result};
use crate::scalar::Scalar;

/// Condition-number threshold above which normal equations are ridged.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Ridge size relative to the mean diagonal of the Gram matrix.
pub const RIDGE_SCALE: f64 = 1e-8;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(FcarError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// `A · v`.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(FcarError::DimensionMismatch(format!(
                "matrix has {} columns, vector has {} entries",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// `A′A`.
    pub fn gram(&self) -> Self {
        let k = self.cols;
        let mut g = Self::zeros(k, k);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..k {
                if r[a] == T::zero() {
                    continue;
                }
                for b in a..k {
                    g.data[a * k + b] += r[a] * r[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                g.data[a * k + b] = g.data[b * k + a];
            }
        }
        g
    }

    /// `A′v`.
    pub fn t_mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.rows {
            return Err(FcarError::DimensionMismatch(format!(
                "matrix has {} rows, vector has {} entries",
                self.rows,
                v.len()
            )));
        }
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// In-place Cholesky factorisation `A = L L′`; returns `None` unless `A` is
/// numerically positive definite.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Option<Matrix<T>> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > T::zero()) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Some(l)
}

/// Solves `L L′ x = b` given the Cholesky factor `L`.
pub fn cholesky_solve<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            let lik = l[(i, k)];
            let yk = y[k];
            y[i] -= lik * yk;
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            let lki = l[(k, i)];
            let yk = y[k];
            y[i] -= lki * yk;
        }
        y[i] /= l[(i, i)];
    }
    y
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    let n = a.rows();
    let mut m = a.clone();
    let tiny = T::epsilon() * T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut scale = T::zero();
        for i in 0..n {
            scale += m[(i, i)] * m[(i, i)];
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= tiny * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// `λ_max / λ_min` from eigenvalues; infinite when `λ_min ≤ 0`.
pub(crate) fn condition_from_eigenvalues<T: Scalar>(ev: impl IntoIterator<Item = T>) -> T {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for e in ev {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    if !(lo > T::zero()) {
        T::infinity()
    } else {
        hi / lo
    }
}

/// Least-squares coefficients with a flag recording whether the ridge
/// fallback was used.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    pub coef: Vec<T>,
    pub ridged: bool,
    pub condition: T,
}

/// Solves the normal equations `G β = r` for a symmetric positive
/// semi-definite `G`, switching to `(G + εI) β = r` with
/// `ε = 1e-8 · trace(G)/k` when the condition estimate exceeds `1e12`.
pub fn solve_normal_equations<T: Scalar>(gram: &Matrix<T>, rhs: &[T]) -> Result<LeastSquares<T>> {
    let k = gram.rows();
    if gram.cols() != k || rhs.len() != k {
        return Err(FcarError::DimensionMismatch(format!(
            "gram is {}x{}, rhs has {} entries",
            gram.rows(),
            gram.cols(),
            rhs.len()
        )));
    }
    if k == 0 {
        return Ok(LeastSquares { coef: vec![], ridged: false, condition: T::one() });
    }
    let condition = condition_from_eigenvalues(symmetric_eigenvalues(gram));
    if condition <= T::lit(CONDITION_LIMIT) {
        if let Some(l) = cholesky(gram) {
            return Ok(LeastSquares { coef: cholesky_solve(&l, rhs), ridged: false, condition });
        }
    }
    let eps = ridge_epsilon(gram.trace(), k);
    if eps == T::zero() {
        return Ok(LeastSquares { coef: vec![T::zero(); k], ridged: true, condition });
    }
    let mut g = gram.clone();
    for i in 0..k {
        g[(i, i)] += eps;
    }
    let l = cholesky(&g).ok_or_else(|| {
        FcarError::DimensionMismatch("ridged normal equations are not positive definite".into())
    })?;
    Ok(LeastSquares { coef: cholesky_solve(&l, rhs), ridged: true, condition })
}

pub(crate) fn ridge_epsilon<T: Scalar>(trace: T, cols: usize) -> T {
    T::lit(RIDGE_SCALE) * trace / T::count(cols.max(1))
}

/// Ordinary least squares `min ‖y − Aβ‖²` through the normal equations.
pub fn least_squares<T: Scalar>(a: &Matrix<T>, y: &[T]) -> Result<LeastSquares<T>> {
    if y.len() != a.rows() {
        return Err(FcarError::DimensionMismatch(format!(
            "design has {} rows, response has {}",
            a.rows(),
            y.len()
        )));
    }
    solve_normal_equations(&a.gram(), &a.t_mul_vec(y)?)
}
