//! Dense symmetric linear algebra: a cyclic Jacobi eigensolver, kernel
//! extraction with relative tolerances, inertia counts, a one-sided Jacobi SVD
//! for null spaces of rectangular systems, and the positive-cone search used to
//! decide admissibility of cone-map kernels.
//!
//! Everything here works on small dense matrices (a few hundred rows at most);
//! the metric-graph oracle has its own structured solvers for large meshes.

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |i, j| rows[i][j])
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
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

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Matrix<T>) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Converts every entry to another scalar type.
    pub fn cast<U: Real>(&self) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Square symmetric matrix. Symmetry is maintained by every mutator.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SymMatrix<T>(Matrix<T>);

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n, n))
    }

    /// Builds from the upper triangle of `f`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self(m)
    }

    /// Accepts a square matrix whose asymmetry is within `tol * max|a_ij|`, symmetrizing it.
    pub fn try_from_matrix(m: Matrix<T>, tol: T) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::InvalidArgument("matrix is not square".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let scale = m.max_abs().max(T::one());
        let n = m.rows;
        for i in 0..n {
            for j in i + 1..n {
                if (m[(i, j)] - m[(j, i)]).abs() > tol * scale {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        let half = T::lit(0.5);
        Ok(Self::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)]) * half))
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.0[(i, j)]
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (once when `i == j`).
    pub fn add_sym(&mut self, i: usize, j: usize, v: T) {
        self.0[(i, j)] += v;
        if i != j {
            self.0[(j, i)] += v;
        }
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.0
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        self.0.mul_vec(x)
    }

    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.mul_vec(x))
    }

    pub fn frobenius_norm(&self) -> T {
        self.0.frobenius_norm()
    }

    /// `Bᵀ A B` for a matrix `B` with `dim` rows.
    pub fn congruence(&self, b: &Matrix<T>) -> SymMatrix<T> {
        let m = b.transpose().matmul(&self.0).matmul(b);
        let half = T::lit(0.5);
        SymMatrix::from_fn(m.rows, |i, j| (m[(i, j)] + m[(j, i)]) * half)
    }

    pub fn scaled(&self, s: T) -> SymMatrix<T> {
        SymMatrix(Matrix {
            rows: self.0.rows,
            cols: self.0.cols,
            data: self.0.data.iter().map(|&x| x * s).collect(),
        })
    }

    pub fn sub(&self, rhs: &SymMatrix<T>) -> SymMatrix<T> {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        SymMatrix(Matrix {
            rows: self.0.rows,
            cols: self.0.cols,
            data: self.0.data.iter().zip(&rhs.0.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn cast<U: Real>(&self) -> SymMatrix<U> {
        SymMatrix(self.0.cast())
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn vector(&self, k: usize) -> Vec<T> {
        self.vectors.column(k)
    }

    pub fn spectral_radius(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.values.len();
        Matrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)])
                .sum()
        })
    }
}

/// Counts of eigenvalues below, inside and above the zero band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignCount {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn check_finite<T: Real>(a: &SymMatrix<T>) -> Result<()> {
    if a.0.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Cyclic Jacobi iteration on a row-major symmetric `n×n` buffer. On exit the
/// diagonal holds the eigenvalues; `v`, when given, accumulates the rotations.
fn jacobi<T: Real>(a: &mut [T], n: usize, mut v: Option<&mut [T]>) {
    let eps = T::epsilon();
    let fro = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    if fro == T::zero() {
        return;
    }
    let floor = eps * eps * fro;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                if apq.abs() <= floor || apq.abs() <= eps * (app.abs() * aqq.abs()).sqrt() {
                    a[p * n + q] = T::zero();
                    a[q * n + p] = T::zero();
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (apq + apq);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + theta.hypot(T::one()))
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let tau = s / (T::one() + c);
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r * n + p];
                    let h = a[r * n + q];
                    let gp = g - s * (h + g * tau);
                    let hq = h + s * (g - h * tau);
                    a[r * n + p] = gp;
                    a[p * n + r] = gp;
                    a[r * n + q] = hq;
                    a[q * n + r] = hq;
                }
                if let Some(v) = v.as_deref_mut() {
                    for r in 0..n {
                        let g = v[r * n + p];
                        let h = v[r * n + q];
                        v[r * n + p] = g - s * (h + g * tau);
                        v[r * n + q] = h + s * (g - h * tau);
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
pub fn eig_sym<T: Real>(a: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    check_finite(a)?;
    let n = a.dim();
    let mut work = a.0.data.clone();
    let mut v = Matrix::<T>::identity(n).data;
    jacobi(&mut work, n, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[i * n + i].partial_cmp(&work[j * n + j]).expect("finite"));
    let values = order.iter().map(|&k| work[k * n + k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[i * n + order[j]]);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_sym<T: Real>(a: &SymMatrix<T>) -> Result<Vec<T>> {
    check_finite(a)?;
    let n = a.dim();
    let mut work = a.0.data.clone();
    jacobi(&mut work, n, None);
    let mut values: Vec<T> = (0..n).map(|k| work[k * n + k]).collect();
    values.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    Ok(values)
}

fn zero_band<T: Real>(values: &[T], tol: T) -> T {
    let radius = values.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    tol * radius.max(T::one())
}

/// Orthonormal eigenvectors whose eigenvalues satisfy `|λ| ≤ tol · max(1, ρ(A))`.
pub fn kernel_basis<T: Real>(a: &SymMatrix<T>, tol: T) -> Result<Vec<Vec<T>>> {
    let eig = eig_sym(a)?;
    let band = zero_band(&eig.values, tol);
    Ok(eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l.abs() <= band)
        .map(|(k, _)| eig.vector(k))
        .collect())
}

/// Inertia of `A` with a zero band of `tol · max(1, ρ(A))`.
pub fn count_signs<T: Real>(a: &SymMatrix<T>, tol: T) -> Result<SignCount> {
    Ok(sign_count_of(&eigenvalues_sym(a)?, tol))
}

pub(crate) fn sign_count_of<T: Real>(values: &[T], tol: T) -> SignCount {
    let band = zero_band(values, tol);
    let mut c = SignCount {
        negative: 0,
        zero: 0,
        positive: 0,
    };
    for &l in values {
        if l < -band {
            c.negative += 1;
        } else if l > band {
            c.positive += 1;
        } else {
            c.zero += 1;
        }
    }
    c
}

/// Number of strictly negative eigenvalues (no zero band).
pub fn negative_count<T: Real>(a: &SymMatrix<T>) -> Result<usize> {
    Ok(eigenvalues_sym(a)?.iter().filter(|&&l| l < T::zero()).count())
}

/// Singular values and right singular vectors of a rectangular matrix.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// One entry per column of the input, unsorted.
    pub singular_values: Vec<T>,
    /// Right singular vectors as columns, matching `singular_values`.
    pub right: Matrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Real>(m: &Matrix<T>) -> Result<Svd<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let (rows, cols) = (m.rows, m.cols);
    // Columns stored contiguously for the pairwise rotations.
    let mut u: Vec<Vec<T>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon() * T::lit(rows.max(1) as f64);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + zeta.hypot(T::one()))
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = c * t;
                for cols_vec in [&mut u, &mut v] {
                    let (left, right) = cols_vec.split_at_mut(q);
                    let (xp, xq) = (&mut left[p], &mut right[0]);
                    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
                        let (ap, bq) = (*a, *b);
                        *a = c * ap - s * bq;
                        *b = s * ap + c * bq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    Ok(Svd {
        singular_values: u.iter().map(|c| norm(c)).collect(),
        right: Matrix::from_columns(&v),
    })
}

/// Orthonormal basis of `ker M`, using the relative threshold `tol · σ_max`.
pub fn nullspace<T: Real>(m: &Matrix<T>, tol: T) -> Result<Vec<Vec<T>>> {
    if m.cols == 0 {
        return Ok(Vec::new());
    }
    if m.rows == 0 {
        return Ok((0..m.cols).map(|j| Matrix::<T>::identity(m.cols).column(j)).collect());
    }
    let svd = svd(m)?;
    let smax = svd.singular_values.iter().fold(T::zero(), |a, &b| a.max(b));
    let cut = tol * smax;
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax == T::zero() || s <= cut)
        .map(|(j, _)| svd.right.column(j))
        .collect())
}

/// Numerical rank with relative threshold `tol · σ_max`.
pub fn rank<T: Real>(m: &Matrix<T>, tol: T) -> Result<usize> {
    Ok(m.cols - nullspace(m, tol)?.len())
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows;
    if a.cols != n || b.len() != n {
        return Err(Error::InvalidArgument("dimension mismatch in solve".into()));
    }
    let mut m = a.data.clone();
    let mut x = b.to_vec();
    let scale = a.max_abs().max(T::min_positive_value());
    for k in 0..n {
        let (piv, pmax) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == T::zero() {
            // Exactly singular pivot column: perturb so inverse iteration can proceed.
            m[k * n + k] = T::epsilon() * scale;
        } else if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        let d = m[k * n + k];
        for i in k + 1..n {
            let f = m[i * n + k] / d;
            if f == T::zero() {
                continue;
            }
            for j in k..n {
                m[i * n + j] = m[i * n + j] - f * m[k * n + j];
            }
            x[i] = x[i] - f * x[k];
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= m[k * n + j] * x[j];
        }
        x[k] = s / m[k * n + k];
    }
    if x.iter().all(|v| v.is_finite()) {
        Ok(x)
    } else {
        Err(Error::NonFinite)
    }
}

/// Upper bound on the grid indices walked by the cube-surface search.
pub const SEARCH_BUDGET: usize = 1 << 21;

/// Searches the span of `basis` for a vector with every entry `≥ -1e-10`.
///
/// One basis vector: tries both signs. Two: sweeps `resolution` angles. Three or
/// more: first tries the projection of the all-ones vector, then walks the
/// surface of the coefficient cube `[-1, 1]^d` on a grid with `resolution`
/// points per axis, coarsened to stay within [`SEARCH_BUDGET`] points. The
/// witness is returned normalized.
pub fn nonnegative_in_span<T: Real>(basis: &[Vec<T>], resolution: usize) -> Result<Option<Vec<T>>> {
    let floor = -T::tol(1e-10);
    let accept = |v: &[T]| v.iter().all(|&x| x >= floor);
    if basis.len() >= 3 {
        let n = basis[0].len();
        let mut v = vec![T::zero(); n];
        for b in basis {
            let c: T = b.iter().copied().sum();
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi += c * bi;
            }
        }
        let nv = norm(&v);
        if nv > T::epsilon() {
            let u: Vec<T> = v.iter().map(|&x| x / nv).collect();
            if accept(&u) {
                return Ok(Some(u));
            }
        }
    }
    search_span(basis, resolution, |v, _| accept(v))
}

/// Points per axis of a `d`-dimensional cube-surface grid that fits in [`SEARCH_BUDGET`].
fn budget_resolution(resolution: usize, d: usize) -> usize {
    let mut res = resolution.max(2);
    while res > 2 && (res as f64).powi(d as i32) > SEARCH_BUDGET as f64 {
        res -= 1;
    }
    res
}

/// Deterministic search of the span of `basis` for a unit vector accepted by
/// `accept(vector, coefficients)`, using the grids of [`nonnegative_in_span`].
pub fn search_span<T: Real>(
    basis: &[Vec<T>],
    resolution: usize,
    accept: impl Fn(&[T], &[T]) -> bool,
) -> Result<Option<Vec<T>>> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::EmptyBasis);
    }
    let n = basis[0].len();
    let try_coeffs = |c: &[T]| -> Option<Vec<T>> {
        let mut v = vec![T::zero(); n];
        for (b, &ck) in basis.iter().zip(c) {
            for (vi, &bi) in v.iter_mut().zip(b) {
                *vi += ck * bi;
            }
        }
        let nv = norm(&v);
        if nv <= T::epsilon() {
            return None;
        }
        let u: Vec<T> = v.iter().map(|&x| x / nv).collect();
        let cu: Vec<T> = c.iter().map(|&x| x / nv).collect();
        accept(&u, &cu).then_some(u)
    };
    match d {
        1 => Ok(try_coeffs(&[T::one()]).or_else(|| try_coeffs(&[-T::one()]))),
        2 => {
            let res = resolution.max(4);
            for k in 0..res {
                let t = T::lit(2.0 * std::f64::consts::PI * k as f64 / res as f64);
                if let Some(u) = try_coeffs(&[t.cos(), t.sin()]) {
                    return Ok(Some(u));
                }
            }
            Ok(None)
        }
        _ => {
            let res = budget_resolution(resolution, d);
            let step = |i: usize| T::lit(-1.0 + 2.0 * i as f64 / (res - 1) as f64);
            let mut idx = vec![0usize; d];
            loop {
                if idx.iter().any(|&i| i == 0 || i == res - 1) {
                    let c: Vec<T> = idx.iter().map(|&i| step(i)).collect();
                    if let Some(u) = try_coeffs(&c) {
                        return Ok(Some(u));
                    }
                }
                let mut k = 0;
                loop {
                    if k == d {
                        return Ok(None);
                    }
                    idx[k] += 1;
                    if idx[k] < res {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
    }
}
