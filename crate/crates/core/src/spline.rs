//! Piecewise-constant spline pre-estimation of the coefficient functions.
//!
//! The delay range `[a, b]` is cut into `N + 1` equal cells and every
//! coefficient function is approximated by a constant on each cell. The
//! constants `λ` solve one least-squares problem over all lags jointly;
//! the resulting pre-estimates feed the pseudo-responses of the
//! local-linear stage.

use crate::error::{FcarError, Result};
use crate::linalg::{
    cholesky, cholesky_solve, condition_from_eigenvalues, ridge_epsilon, symmetric_eigenvalues,
    LeastSquares, Matrix, CONDITION_LIMIT,
};
use crate::scalar::Scalar;
use crate::series::RegressionFrame;

/// Equally spaced knots `a = κ_0 < κ_1 < … < κ_{N+1} = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotGrid<T> {
    a: T,
    b: T,
    knots: Vec<T>,
}

impl<T: Scalar> KnotGrid<T> {
    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    /// Number of interior knots `N`.
    pub fn interior(&self) -> usize {
        self.knots.len() - 2
    }

    /// Number of basis functions, `N + 1`.
    pub fn n_basis(&self) -> usize {
        self.knots.len() - 1
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn spacing(&self) -> T {
        (self.b - self.a) / T::count(self.n_basis())
    }

    /// Index `J` of the cell `[κ_J, κ_{J+1})` holding `u`; the last cell is
    /// closed at `b`.
    pub fn cell(&self, u: T) -> Option<usize> {
        if !(u >= self.a && u <= self.b) {
            return None;
        }
        let last = self.n_basis() - 1;
        let guess = ((u - self.a) / self.spacing()).floor().to_usize().unwrap_or(0);
        let mut j = guess.min(last);
        while j < last && u >= self.knots[j + 1] {
            j += 1;
        }
        while j > 0 && u < self.knots[j] {
            j -= 1;
        }
        Some(j)
    }
}

/// Interior knot count `N = min(⌊n^{1/4} ln n⌋, ⌊n/(2p)⌋ − 1)`, floored at 0.
///
/// The second term keeps the `p(N + 1)` spline coefficients at or below
/// `n/2`.
pub fn knot_count(n: usize, p: usize) -> Result<usize> {
    if p == 0 || n <= 2 * p {
        return Err(FcarError::SeriesTooShort { needed: 2 * p, got: n });
    }
    let nf = n as f64;
    let rate = (nf.powf(0.25) * nf.ln()).floor() as usize;
    let cap = (n / (2 * p)).saturating_sub(1);
    Ok(rate.min(cap))
}

pub fn build_knots<T: Scalar>(a: T, b: T, interior: usize) -> Result<KnotGrid<T>> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(FcarError::DegenerateInterval { a: a.as_f64(), b: b.as_f64() });
    }
    let cells = interior + 1;
    let width = (b - a) / T::count(cells);
    let mut knots: Vec<T> = (0..cells).map(|j| a + T::count(j) * width).collect();
    knots.push(b);
    Ok(KnotGrid { a, b, knots })
}

/// Indicator basis evaluated at a vector of delay values: each row has a
/// single one, in the column of the cell containing `U_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    cells: Vec<usize>,
    n_basis: usize,
}

impl BasisMatrix {
    pub fn rows(&self) -> usize {
        self.cells.len()
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    /// Column index of the single nonzero entry of each row.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.cells.len(), self.n_basis);
        for (i, &j) in self.cells.iter().enumerate() {
            m[(i, j)] = T::one();
        }
        m
    }
}

pub fn basis_matrix<T: Scalar>(delay: &[T], knots: &KnotGrid<T>) -> Result<BasisMatrix> {
    let cells = delay
        .iter()
        .enumerate()
        .map(|(t, &u)| knots.cell(u).ok_or(FcarError::OutOfSupport(t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(BasisMatrix { cells, n_basis: knots.n_basis() })
}

/// `Z = (B∘X̃_1, …, B∘X̃_p)`: block `α` is `B` with row `t` scaled by `X_{t-α}`.
pub fn design_z<T: Scalar>(basis: &Matrix<T>, frame: &RegressionFrame<T>) -> Result<Matrix<T>> {
    if basis.rows() != frame.rows() {
        return Err(FcarError::DimensionMismatch(format!(
            "basis has {} rows, frame has {}",
            basis.rows(),
            frame.rows()
        )));
    }
    let k = basis.cols();
    let p = frame.p();
    let mut z = Matrix::zeros(frame.rows(), p * k);
    for i in 0..frame.rows() {
        let brow = basis.row(i);
        let zrow = z.row_mut(i);
        for alpha in 1..=p {
            let x = frame.regressor(alpha)[i];
            let block = &mut zrow[(alpha - 1) * k..alpha * k];
            for (zj, &bj) in block.iter_mut().zip(brow) {
                *zj = bj * x;
            }
        }
    }
    Ok(z)
}

/// `λ̂ = (Z′Z)⁻¹Z′X`, ridged when `Z′Z` is numerically singular.
pub fn solve_lambda<T: Scalar>(z: &Matrix<T>, response: &[T]) -> Result<LeastSquares<T>> {
    crate::linalg::least_squares(z, response)
}

/// Same solution as [`solve_lambda`] on `design_z(basis, frame)`, exploiting
/// the indicator structure: `Z′Z` is block diagonal with one `p × p` block
/// per knot cell, so the system splits into `N + 1` small solves. The
/// condition estimate and ridge size are computed for the full matrix.
pub fn solve_lambda_blocked<T: Scalar>(
    basis: &BasisMatrix,
    frame: &RegressionFrame<T>,
) -> Result<LeastSquares<T>> {
    if basis.rows() != frame.rows() {
        return Err(FcarError::DimensionMismatch(format!(
            "basis has {} rows, frame has {}",
            basis.rows(),
            frame.rows()
        )));
    }
    let p = frame.p();
    let k = basis.n_basis();
    let mut grams = vec![Matrix::<T>::zeros(p, p); k];
    let mut rhs = vec![vec![T::zero(); p]; k];
    let y = frame.response();
    for (i, &cell) in basis.cells().iter().enumerate() {
        let g = &mut grams[cell];
        let r = &mut rhs[cell];
        for a in 1..=p {
            let xa = frame.regressor(a)[i];
            r[a - 1] += xa * y[i];
            for b in a..=p {
                g[(a - 1, b - 1)] += xa * frame.regressor(b)[i];
            }
        }
    }
    for g in &mut grams {
        for a in 0..p {
            for b in 0..a {
                g[(a, b)] = g[(b, a)];
            }
        }
    }

    let condition = condition_from_eigenvalues(grams.iter().flat_map(symmetric_eigenvalues));
    let trace: T = grams.iter().map(Matrix::trace).sum();
    let mut coef = vec![T::zero(); p * k];

    let place = |coef: &mut [T], cell: usize, sol: &[T]| {
        for a in 0..p {
            coef[a * k + cell] = sol[a];
        }
    };

    if condition <= T::lit(CONDITION_LIMIT) {
        let factors: Option<Vec<_>> = grams.iter().map(cholesky).collect();
        if let Some(factors) = factors {
            for (cell, l) in factors.iter().enumerate() {
                place(&mut coef, cell, &cholesky_solve(l, &rhs[cell]));
            }
            return Ok(LeastSquares { coef, ridged: false, condition });
        }
    }

    let eps = ridge_epsilon(trace, p * k);
    if eps > T::zero() {
        for (cell, g) in grams.iter_mut().enumerate() {
            for a in 0..p {
                g[(a, a)] += eps;
            }
            let l = cholesky(g).ok_or_else(|| {
                FcarError::DimensionMismatch("ridged normal equations are not positive definite".into())
            })?;
            place(&mut coef, cell, &cholesky_solve(&l, &rhs[cell]));
        }
    }
    Ok(LeastSquares { coef, ridged: true, condition })
}

/// Pre-estimates `m̂_α(U_t)`: column `α` is `B` times the `α`-th block of `λ̂`.
pub fn pre_estimates<T: Scalar>(basis: &Matrix<T>, lambda: &[T], p: usize) -> Result<Matrix<T>> {
    let k = basis.cols();
    if lambda.len() != p * k {
        return Err(FcarError::DimensionMismatch(format!(
            "lambda has {} entries, expected p(N+1) = {}",
            lambda.len(),
            p * k
        )));
    }
    let mut out = Matrix::zeros(basis.rows(), p);
    for i in 0..basis.rows() {
        let brow = basis.row(i);
        for alpha in 0..p {
            out[(i, alpha)] = crate::linalg::dot(brow, &lambda[alpha * k..(alpha + 1) * k]);
        }
    }
    Ok(out)
}

/// `X_t − Σ_{α≠γ} coef(t, α) X_{t-α}` for every row. Shared by the
/// spline pseudo-responses and the oracle responses so both follow the
/// same arithmetic.
pub(crate) fn partial_residuals<T: Scalar>(
    frame: &RegressionFrame<T>,
    gamma: usize,
    mut coef: impl FnMut(usize, usize) -> T,
) -> Vec<T> {
    let p = frame.p();
    frame
        .response()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut other = T::zero();
            for alpha in (1..=p).filter(|&a| a != gamma) {
                other += coef(i, alpha) * frame.regressor(alpha)[i];
            }
            x - other
        })
        .collect()
}

/// Pseudo-responses `Ŷ_{γ,t} = X_t − Σ_{α≠γ} m̂_α(U_t) X_{t-α}`.
pub fn pseudo_responses<T: Scalar>(
    frame: &RegressionFrame<T>,
    pre: &Matrix<T>,
    gamma: usize,
) -> Result<Vec<T>> {
    frame.check_gamma(gamma)?;
    if pre.rows() != frame.rows() || pre.cols() != frame.p() {
        return Err(FcarError::DimensionMismatch(format!(
            "pre-estimates are {}x{}, frame is {}x{}",
            pre.rows(),
            pre.cols(),
            frame.rows(),
            frame.p()
        )));
    }
    Ok(partial_residuals(frame, gamma, |i, alpha| pre[(i, alpha - 1)]))
}

/// First-stage fit: knots, spline coefficients and pre-estimates.
#[derive(Debug, Clone)]
pub struct SplinePrefit<T> {
    knots: KnotGrid<T>,
    basis: BasisMatrix,
    lambda: Vec<T>,
    ridged: bool,
    pre: Matrix<T>,
    p: usize,
}

impl<T: Scalar> SplinePrefit<T> {
    /// Runs knot selection, basis construction and the least-squares solve.
    /// `interior_knots` overrides the default [`knot_count`] on the frame's
    /// usable rows.
    pub fn fit(frame: &RegressionFrame<T>, interior_knots: Option<usize>) -> Result<Self> {
        let range = frame.delay_range();
        if range.degenerate {
            return Err(FcarError::DegenerateDelay);
        }
        let interior = match interior_knots {
            Some(n) => n,
            None => knot_count(frame.rows(), frame.p())?,
        };
        let knots = build_knots(range.a, range.b, interior)?;
        let basis = basis_matrix(frame.delay(), &knots)?;
        let solution = solve_lambda_blocked(&basis, frame)?;
        let pre = pre_estimates(&basis.to_matrix(), &solution.coef, frame.p())?;
        Ok(Self {
            knots,
            basis,
            lambda: solution.coef,
            ridged: solution.ridged,
            pre,
            p: frame.p(),
        })
    }

    pub fn knots(&self) -> &KnotGrid<T> {
        &self.knots
    }

    pub fn basis(&self) -> &BasisMatrix {
        &self.basis
    }

    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    /// Whether the ridge fallback was needed.
    pub fn ridged(&self) -> bool {
        self.ridged
    }

    /// `n_eff × p` matrix of `m̂_α(U_t)`.
    pub fn pre_estimates(&self) -> &Matrix<T> {
        &self.pre
    }

    pub fn pseudo_responses(&self, frame: &RegressionFrame<T>, gamma: usize) -> Result<Vec<T>> {
        pseudo_responses(frame, &self.pre, gamma)
    }

    /// Spline pre-estimate `m̂_α(u)` at an arbitrary point, clamped into `[a, b]`.
    pub fn pre_estimate_at(&self, alpha: usize, u: T) -> T {
        let u = u.max(self.knots.a()).min(self.knots.b());
        let k = self.knots.n_basis();
        let cell = self.knots.cell(u).unwrap_or(k - 1);
        self.lambda[(alpha - 1) * k + cell]
    }

    pub fn p(&self) -> usize {
        self.p
    }
}
