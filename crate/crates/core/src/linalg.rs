//! Dense matrices and the handful of linear-algebra routines the laboratory
//! needs: the exact DCT, vector angles, a symmetric eigensolver, SPD inverse
//! square roots, Kronecker products and the orthogonalization `Ĉ = S·T`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Index;

use crate::{Error, Result, ALGEBRAIC_TOL, EIGEN_TOL};

/// Row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row and column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.same_shape(rhs)?;
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * factor).collect() }
    }

    /// Squared Frobenius norm.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn trace(&self) -> f64 {
        self.diag().iter().sum()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&rhs.data).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| libm::fabs(self[(i, j)] - self[(j, i)]) <= tol))
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || libm::fabs(self[(i, j)]) <= tol))
    }

    /// `true` when `self · selfᵀ = I` within `tol`.
    pub fn has_orthonormal_rows(&self, tol: f64) -> bool {
        match self.matmul(&self.transpose()) {
            Ok(g) => g.max_abs_diff(&Self::identity(self.rows)) <= tol,
            Err(_) => false,
        }
    }

    fn same_shape(&self, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

/// Row-major matrix with small integer entries: the low-complexity part `T`
/// of an approximation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i32>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix must have at least one row and column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[i32]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> i32) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| (i == j) as i32)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[i32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[i32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| (0..self.cols).map(|k| self[(i, k)] * rhs[(k, j)]).sum()))
    }

    /// Exact `T·Tᵀ`.
    pub fn gram(&self) -> Self {
        Self::from_fn(self.rows, self.rows, |i, j| int_dot(self.row(i), self.row(j)))
    }

    /// Exact `T·x`.
    pub fn apply(&self, x: &[i64]) -> Result<Vec<i64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a as i64 * b).sum()).collect())
    }

    pub fn to_real(&self) -> RealMatrix {
        RealMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] as f64)
    }

    /// Distinct rows have an integer dot product of exactly zero.
    pub fn rows_orthogonal(&self) -> bool {
        (0..self.rows).all(|i| (0..i).all(|j| int_dot(self.row(i), self.row(j)) == 0))
    }

    pub fn has_zero_row(&self) -> bool {
        (0..self.rows).any(|i| self.row(i).iter().all(|&v| v == 0))
    }

    /// Every entry belongs to `allowed`.
    pub fn entries_in(&self, allowed: &[i32]) -> bool {
        self.data.iter().all(|v| allowed.contains(v))
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i32;

    fn index(&self, (i, j): (usize, usize)) -> &i32 {
        &self.data[i * self.cols + j]
    }
}

/// Exact rational factor applied to a stored integer matrix, e.g. `1/2` for
/// matrices with half-integer entries stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PreScale {
    pub num: i32,
    pub den: i32,
}

impl PreScale {
    pub const ONE: PreScale = PreScale { num: 1, den: 1 };

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// How the scaling matrix `S` of an approximation was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingKind {
    /// The exact DCT itself; there is no low-complexity part.
    Exact,
    /// Rows of `T` are orthogonal, `S = diag(1/‖tᵢ‖)`.
    DiagonalRowNorm,
    /// `S = diag(1/‖tᵢ‖)` applied to a `T` whose rows are not orthogonal;
    /// the resulting `Ĉ` is not orthogonal.
    RowNormalized,
    /// `S = α·I`.
    Scalar,
    /// `S = (T·Tᵀ)^{-1/2}` with off-diagonal terms.
    GeneralSpd,
}

impl ScalingKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScalingKind::Exact => "exact",
            ScalingKind::DiagonalRowNorm => "diagonal-row-norm",
            ScalingKind::RowNormalized => "row-normalized",
            ScalingKind::Scalar => "scalar",
            ScalingKind::GeneralSpd => "general-spd",
        }
    }
}

/// A DCT approximation `Ĉ = S·T` together with its parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxTransform {
    pub name: String,
    /// `None` for the exact DCT.
    pub t: Option<IntMatrix>,
    pub pre_scale: PreScale,
    pub s: RealMatrix,
    pub c_hat: RealMatrix,
    pub scaling: ScalingKind,
}

impl ApproxTransform {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.c_hat.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_orthogonal(&self) -> bool {
        self.c_hat.has_orthonormal_rows(EIGEN_TOL)
    }

    /// Rows whose angles describe the transform: `pre_scale·T` for an
    /// approximation, `C` for the exact DCT.
    pub fn angle_rows(&self) -> RealMatrix {
        match &self.t {
            Some(t) => t.to_real().scale(self.pre_scale.value()),
            None => self.c_hat.clone(),
        }
    }

    /// The exact orthonormal DCT presented as an (error-free) approximation.
    pub fn exact(n: usize) -> Result<Self> {
        Ok(Self { name: "DCT".into(), t: None, pre_scale: PreScale::ONE, s: RealMatrix::identity(n), c_hat: exact_dct_matrix(n)?, scaling: ScalingKind::Exact })
    }

    /// `S = α·I`.
    pub fn scalar(t: &IntMatrix, factor: f64) -> Self {
        let s = RealMatrix::identity(t.rows()).scale(factor);
        let c_hat = t.to_real().scale(factor);
        Self { name: String::new(), t: Some(t.clone()), pre_scale: PreScale::ONE, s, c_hat, scaling: ScalingKind::Scalar }
    }

    /// `S = diag(1/‖tᵢ‖)` regardless of row orthogonality.
    pub fn row_normalized(t: &IntMatrix) -> Result<Self> {
        if t.has_zero_row() {
            return Err(Error::Degenerate("zero row cannot be normalized"));
        }
        let norms: Vec<f64> = t.gram().diag_values().iter().map(|&g| 1.0 / libm::sqrt(g as f64)).collect();
        let s = RealMatrix::diagonal(&norms);
        let c_hat = s.matmul(&t.to_real())?;
        let scaling = if t.rows_orthogonal() { ScalingKind::DiagonalRowNorm } else { ScalingKind::RowNormalized };
        Ok(Self { name: String::new(), t: Some(t.clone()), pre_scale: PreScale::ONE, s, c_hat, scaling })
    }
}

impl IntMatrix {
    fn diag_values(&self) -> Vec<i32> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }
}

/// Sequential inner product, summed left to right.
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in u.iter().zip(v) {
        acc += a * b;
    }
    acc
}

pub fn int_dot(u: &[i32], v: &[i32]) -> i32 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub fn norm(u: &[f64]) -> f64 {
    libm::sqrt(dot(u, u))
}

fn check_dct_length(n: usize) -> Result<()> {
    if matches!(n, 8 | 16 | 32) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("DCT blocklength {n} is not one of 8, 16, 32")))
    }
}

/// Orthonormal DCT-II matrix, `c[k][j] = αₖ·cos(π(2j+1)k / 2n)`.
pub fn exact_dct_matrix(n: usize) -> Result<RealMatrix> {
    check_dct_length(n)?;
    let dc = libm::sqrt(1.0 / n as f64);
    let ac = libm::sqrt(2.0 / n as f64);
    Ok(RealMatrix::from_fn(n, n, |k, j| {
        let alpha = if k == 0 { dc } else { ac };
        alpha * libm::cos(((2 * j + 1) * k) as f64 * PI / (2 * n) as f64)
    }))
}

/// The 8-point DCT written with `γₖ = cos(2π(k+1)/32)`; every row has norm 2.
pub fn printed_dct8() -> RealMatrix {
    let g: [f64; 7] = core::array::from_fn(|k| libm::cos(2.0 * PI * (k + 1) as f64 / 32.0));
    #[rustfmt::skip]
    let rows: [[f64; 8]; 8] = [
        [g[3],  g[3],  g[3],  g[3],  g[3],  g[3],  g[3],  g[3]],
        [g[0],  g[2],  g[4],  g[6], -g[6], -g[4], -g[2], -g[0]],
        [g[1],  g[5], -g[5], -g[1], -g[1], -g[5],  g[5],  g[1]],
        [g[2], -g[6], -g[0], -g[4],  g[4],  g[0],  g[6], -g[2]],
        [g[3], -g[3], -g[3],  g[3],  g[3], -g[3], -g[3],  g[3]],
        [g[4], -g[0],  g[6],  g[2], -g[2], -g[6],  g[0], -g[4]],
        [g[5], -g[1],  g[1], -g[5], -g[5],  g[1], -g[1],  g[5]],
        [g[6], -g[4],  g[2], -g[0],  g[0], -g[2],  g[4], -g[6]],
    ];
    RealMatrix::from_rows(&rows).expect("8x8 literal")
}

/// Angle between two vectors in `[0, π]`.
pub fn angle_between(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!("vectors of length {} and {}", u.len(), v.len())));
    }
    let (uu, vv) = (dot(u, u), dot(v, v));
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::Domain("angle with a zero-norm vector is undefined"));
    }
    let ratio = dot(u, v) / libm::sqrt(uu * vv);
    Ok(libm::acos(ratio.clamp(-1.0, 1.0)))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues and a matrix whose columns are the matching
/// orthonormal eigenvectors.
pub fn symmetric_eigen(m: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("eigendecomposition needs a square matrix".into()));
    }
    let scale = m.max_abs().max(1.0);
    if !m.is_symmetric(EIGEN_TOL * scale) {
        return Err(Error::Domain("matrix is not symmetric"));
    }
    let n = m.rows();
    let mut a: Vec<f64> = m.data().to_vec();
    let mut v: Vec<f64> = RealMatrix::identity(n).data().to_vec();
    let total: f64 = a.iter().map(|x| x * x).sum();

    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i * n + j] * a[i * n + j]).sum();
        if off <= 1e-30 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((values, RealMatrix::new(n, n, v)?))
}

/// `S = M^{-1/2}` for a symmetric positive definite `M`, so `S·M·S = I`.
pub fn spd_inverse_sqrt(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("inverse square root needs a square matrix".into()));
    }
    if m.is_diagonal(1e-14) {
        let d = m.diag();
        if d.iter().any(|&x| x <= 0.0) {
            return Err(Error::Domain("matrix is not positive definite"));
        }
        return Ok(RealMatrix::diagonal(&d.iter().map(|&x| 1.0 / libm::sqrt(x)).collect::<Vec<_>>()));
    }
    let (values, vectors) = symmetric_eigen(m)?;
    let largest = values.iter().fold(0.0f64, |acc, v| acc.max(libm::fabs(*v)));
    if values.iter().any(|&l| l <= largest * 1e-13) {
        return Err(Error::Domain("matrix is not positive definite"));
    }
    let n = m.rows();
    let inv_sqrt: Vec<f64> = values.iter().map(|&l| 1.0 / libm::sqrt(l)).collect();
    let s = RealMatrix::from_fn(n, n, |i, j| (0..n).map(|k| vectors[(i, k)] * inv_sqrt[k] * vectors[(j, k)]).sum());
    // Symmetrize away rounding.
    Ok(RealMatrix::from_fn(n, n, |i, j| 0.5 * (s[(i, j)] + s[(j, i)])))
}

/// Polar-decomposition orthogonalization `Ĉ = (T·Tᵀ)^{-1/2}·T`.
pub fn orthogonalize(t: &IntMatrix) -> Result<ApproxTransform> {
    if !t.is_square() {
        return Err(Error::InvalidArgument("low-complexity matrix must be square".into()));
    }
    if t.rows_orthogonal() {
        if t.has_zero_row() {
            return Err(Error::Degenerate("T·Tᵀ is singular"));
        }
        return ApproxTransform::row_normalized(t);
    }
    let gram = t.gram().to_real();
    let s = spd_inverse_sqrt(&gram).map_err(|_| Error::Degenerate("T·Tᵀ is singular"))?;
    let c_hat = s.matmul(&t.to_real())?;
    Ok(ApproxTransform { name: String::new(), t: Some(t.clone()), pre_scale: PreScale::ONE, s, c_hat, scaling: ScalingKind::GeneralSpd })
}

pub fn kronecker(a: &RealMatrix, b: &RealMatrix) -> RealMatrix {
    let (br, bc) = (b.rows(), b.cols());
    RealMatrix::from_fn(a.rows() * br, a.cols() * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn invert(m: &RealMatrix) -> Result<RealMatrix> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("only square matrices are invertible".into()));
    }
    let n = m.rows();
    let mut a = m.data().to_vec();
    let mut inv = RealMatrix::identity(n).data().to_vec();
    let scale = m.max_abs();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| libm::fabs(a[x * n + col]).total_cmp(&libm::fabs(a[y * n + col]))).expect("non-empty range");
        if libm::fabs(a[pivot * n + col]) <= ALGEBRAIC_TOL * scale {
            return Err(Error::Degenerate("matrix is singular"));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
                inv.swap(pivot * n + k, col * n + k);
            }
        }
        let p = a[col * n + col];
        for k in 0..n {
            a[col * n + k] /= p;
            inv[col * n + k] /= p;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = a[r * n + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..n {
                a[r * n + k] -= f * a[col * n + k];
                inv[r * n + k] -= f * inv[col * n + k];
            }
        }
    }
    RealMatrix::new(n, n, inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1() -> IntMatrix {
        crate::catalog::t1_matrix()
    }

    #[test]
    fn dct_dc_entry_and_orthonormality() {
        for n in [8, 16, 32] {
            let c = exact_dct_matrix(n).unwrap();
            assert!((c[(0, 0)] - 1.0 / libm::sqrt(n as f64)).abs() < 1e-15);
            assert!(c.has_orthonormal_rows(1e-12), "n = {n}");
        }
        assert!(exact_dct_matrix(4).is_err());
    }

    #[test]
    fn normalized_printed_row_matches_exact() {
        let printed = printed_dct8();
        let exact = exact_dct_matrix(8).unwrap();
        for i in 0..8 {
            assert!((norm(printed.row(i)) - 2.0).abs() < 1e-14);
        }
        assert!(printed.scale(0.5).max_abs_diff(&exact) < 1e-15);
        let expected = libm::cos(2.0 * PI / 32.0) / 2.0;
        assert!((exact[(1, 0)] - expected).abs() < 1e-15);
        assert!((exact[(1, 0)] - 0.490393).abs() < 1e-6);
    }

    #[test]
    fn angles() {
        let e = |k: usize| -> [f64; 8] { core::array::from_fn(|i| (i == k) as u8 as f64) };
        let u = [0.3, -1.0, 2.0, 0.0, 0.5, 1.5, -0.25, 4.0];
        assert_eq!(angle_between(&u, &u).unwrap(), 0.0);
        assert!((angle_between(&e(0), &e(1)).unwrap() - PI / 2.0).abs() < 1e-15);
        let ones = [1.0; 8];
        let a = angle_between(&ones, &e(0)).unwrap();
        assert!((a - libm::acos(1.0 / libm::sqrt(8.0))).abs() < 1e-15);
        assert!((a.to_degrees() - 69.29).abs() < 0.01);
        assert_eq!(angle_between(&[0.0; 8], &ones), Err(Error::Domain("angle with a zero-norm vector is undefined")));
    }

    #[test]
    fn inverse_sqrt_cases() {
        let i8 = RealMatrix::identity(8);
        assert_eq!(spd_inverse_sqrt(&i8).unwrap(), i8);
        let d = RealMatrix::diagonal(&[8.0, 18.0, 20.0, 18.0, 8.0, 18.0, 20.0, 18.0]);
        let s = spd_inverse_sqrt(&d).unwrap();
        for (i, v) in [8.0, 18.0, 20.0, 18.0, 8.0, 18.0, 20.0, 18.0].iter().enumerate() {
            assert_eq!(s[(i, i)], 1.0 / libm::sqrt(*v));
        }
        let not_pd = RealMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(spd_inverse_sqrt(&not_pd), Err(Error::Domain(_))));
        let not_sym = RealMatrix::from_rows(&[[2.0, 1.0], [0.0, 2.0]]).unwrap();
        assert!(matches!(spd_inverse_sqrt(&not_sym), Err(Error::Domain(_))));
    }

    #[test]
    fn orthogonalize_t1() {
        let a = orthogonalize(&t1()).unwrap();
        assert_eq!(a.scaling, ScalingKind::DiagonalRowNorm);
        let expected = [8.0, 18.0, 20.0, 18.0, 8.0, 18.0, 20.0, 18.0];
        for (i, v) in expected.iter().enumerate() {
            assert!((a.s[(i, i)] - 1.0 / libm::sqrt(*v)).abs() < 1e-15);
        }
        assert!(a.c_hat.has_orthonormal_rows(1e-12));
        assert!(a.s.matmul(&t1().to_real()).unwrap().max_abs_diff(&a.c_hat) < 1e-12);
    }

    #[test]
    fn orthogonalize_orthonormal_input_gives_identity_scaling() {
        let id = IntMatrix::identity(8);
        let a = orthogonalize(&id).unwrap();
        assert_eq!(a.s, RealMatrix::identity(8));
        let signed = IntMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                if i % 2 == 0 {
                    1
                } else {
                    -1
                }
            } else {
                0
            }
        });
        assert_eq!(orthogonalize(&signed).unwrap().s, RealMatrix::identity(4));
    }

    #[test]
    fn orthogonalize_singular_is_degenerate() {
        let t = IntMatrix::from_rows(&[[1, 1], [2, 2]]).unwrap();
        assert_eq!(orthogonalize(&t).unwrap_err(), Error::Degenerate("T·Tᵀ is singular"));
        let z = IntMatrix::from_rows(&[[1, 0], [0, 0]]).unwrap();
        assert!(matches!(orthogonalize(&z), Err(Error::Degenerate(_))));
    }

    #[test]
    fn kronecker_identity_expansion() {
        let i2 = RealMatrix::identity(2);
        let d = RealMatrix::diagonal(&[4.0, 9.0, 10.0, 9.0]);
        assert_eq!(kronecker(&i2, &d), RealMatrix::diagonal(&[4.0, 9.0, 10.0, 9.0, 4.0, 9.0, 10.0, 9.0]));
        let d16 = kronecker(&kronecker(&i2, &d), &i2).scale(4.0);
        assert_eq!(&d16.diag()[..9], &[16.0, 16.0, 36.0, 36.0, 40.0, 40.0, 36.0, 36.0, 16.0]);
    }

    #[test]
    fn invert_round_trip_and_singular() {
        let m = RealMatrix::from_rows(&[[4.0, 7.0, 2.0], [3.0, 6.0, 1.0], [2.0, 5.0, 3.0]]).unwrap();
        let inv = invert(&m).unwrap();
        assert!(m.matmul(&inv).unwrap().max_abs_diff(&RealMatrix::identity(3)) < 1e-12);
        let s = RealMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(invert(&s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn constructors_validate() {
        assert!(RealMatrix::new(0, 1, vec![]).is_err());
        assert!(RealMatrix::new(1, 2, vec![1.0]).is_err());
        assert!(RealMatrix::new(1, 1, vec![f64::NAN]).is_err());
        assert!(IntMatrix::from_rows(&[vec![1, 2], vec![3]]).is_err());
    }
}
