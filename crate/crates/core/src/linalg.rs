//! Dense matrices over the real and complex fields.
//!
//! Storage is column-major throughout: every kernel here walks contiguous
//! columns, which is what the eigensolver and the basis code need.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Field element: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + 'static
{
    const IS_COMPLEX: bool;

    fn conj(self) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn abs2(self) -> f64;
    fn from_real(x: f64) -> Self;
    /// Drops `im` for real scalars.
    fn from_re_im(re: f64, im: f64) -> Self;
    fn to_complex(self) -> C64;

    fn abs(self) -> f64 {
        self.abs2().sqrt()
    }

    fn scale(self, x: f64) -> Self {
        self * Self::from_real(x)
    }

    /// `self / |self|`, or one for zero.
    fn unit_phase(self) -> Self {
        let a = self.abs();
        if a == 0.0 {
            Self::one()
        } else {
            self.scale(1.0 / a)
        }
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn abs2(self) -> f64 {
        self * self
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn from_re_im(re: f64, _im: f64) -> Self {
        re
    }
    #[inline]
    fn to_complex(self) -> C64 {
        C64::new(self, 0.0)
    }
    #[inline]
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        self * x
    }
}

impl Scalar for C64 {
    const IS_COMPLEX: bool = true;

    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn from_real(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn from_re_im(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
    #[inline]
    fn to_complex(self) -> C64 {
        self
    }
    #[inline]
    fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }
    #[inline]
    fn scale(self, x: f64) -> Self {
        C64::new(self.re * x, self.im * x)
    }
}

/// `y += a * x`
#[inline]
pub fn axpy<T: Scalar>(a: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Inner product conjugate-linear in the first argument: `Σ conj(x_i) y_i`.
#[inline]
pub fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = T::zero();
    for (&xi, &yi) in x.iter().zip(y) {
        acc += xi.conj() * yi;
    }
    acc
}

pub fn norm2<T: Scalar>(x: &[T]) -> f64 {
    x.iter().map(|v| v.abs2()).sum()
}

pub fn norm<T: Scalar>(x: &[T]) -> f64 {
    norm2(x).sqrt()
}

pub fn to_complex_vec<T: Scalar>(x: &[T]) -> Vec<C64> {
    x.iter().map(|v| v.to_complex()).collect()
}

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RMat = Mat<f64>;
pub type CMat = Mat<C64>;

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
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
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from column vectors of equal length.
    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    actual: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Mat {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Mat { rows, cols, data })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Mutable access to two distinct columns at once.
    pub fn col_pair_mut(&mut self, a: usize, b: usize) -> (&mut [T], &mut [T]) {
        assert!(a != b);
        let r = self.rows;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * r);
            (&mut lo[a * r..(a + 1) * r], &mut hi[..r])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * r);
            let (x, y) = (&mut hi[..r], &mut lo[b * r..(b + 1) * r]);
            (x, y)
        }
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Mat {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Mat::from_fn(idx.len(), self.cols, |i, j| self[(idx[i], j)])
    }

    /// Append the columns of `other` (same row count).
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: other.rows,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Mat {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn adjoint(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn to_complex(&self) -> CMat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.to_complex()).collect(),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self * other`
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let bcol = other.col(j);
            let ocol = out.col_mut(j);
            for (k, &b) in bcol.iter().enumerate() {
                if b != T::zero() {
                    axpy(b, self.col(k), ocol);
                }
            }
        }
        Ok(out)
    }

    /// `self^* other`
    pub fn adjoint_mul(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: other.rows,
            });
        }
        Ok(Mat::from_fn(self.cols, other.cols, |i, j| {
            dot(self.col(i), other.col(j))
        }))
    }

    /// Gram matrix `self^* self`, Hermitian by construction.
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
            g[(j, j)] = T::from_real(g[(j, j)].re());
        }
        g
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: x.len(),
            });
        }
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                axpy(xj, self.col(j), &mut y);
            }
        }
        Ok(y)
    }

    /// `self^* x`
    pub fn adjoint_mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        Ok(self.columns().map(|c| dot(c, x)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum; bounds the spectral norm of a Hermitian matrix.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                actual: other.rows * other.cols,
            });
        }
        Ok(Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    /// `max |(self^* self - I)_ij|`
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.gram();
        let mut worst = 0.0f64;
        for j in 0..g.cols {
            for i in 0..g.rows {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Symmetric permutation `P A P^T` with `out[p[i], p[j]] = self[i, j]`.
    pub fn permute_symmetric(&self, p: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(p[i], p[j])] = self[(i, j)];
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.rows + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.rows + i]
    }
}

/// Square Hermitian (real symmetric when `T = f64`) matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    inner: Mat<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Relative asymmetry tolerated before rejecting the input.
    pub const HERMITIAN_TOL: f64 = 1e-10;

    /// Validates near-Hermitian input and replaces it by `(A + A^*)/2`.
    pub fn new(mat: Mat<T>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                actual: mat.ncols(),
            });
        }
        let n = mat.nrows();
        let scale = 1.0 + mat.max_abs();
        let mut asym = 0.0f64;
        for j in 0..n {
            for i in 0..=j {
                asym = asym.max((mat[(i, j)] - mat[(j, i)].conj()).abs());
            }
        }
        if !(asym <= Self::HERMITIAN_TOL * scale) {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        let mut inner = mat;
        for j in 0..n {
            for i in 0..j {
                let v = (inner[(i, j)] + inner[(j, i)].conj()).scale(0.5);
                inner[(i, j)] = v;
                inner[(j, i)] = v.conj();
            }
            inner[(j, j)] = T::from_real(inner[(j, j)].re());
        }
        Ok(SymmetricMatrix { inner })
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn is_complex(&self) -> bool {
        T::IS_COMPLEX
    }

    pub fn matrix(&self) -> &Mat<T> {
        &self.inner
    }

    pub fn into_matrix(self) -> Mat<T> {
        self.inner
    }

    pub fn to_complex(&self) -> SymmetricMatrix<C64> {
        SymmetricMatrix {
            inner: self.inner.to_complex(),
        }
    }
}

impl<T> Index<(usize, usize)> for SymmetricMatrix<T> {
    type Output = T;
    fn index(&self, idx: (usize, usize)) -> &T {
        &self.inner[idx]
    }
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Columns whose residual norm falls below `drop_tol` times their original
/// norm are removed. Returns the orthonormal columns that survive.
pub fn orthonormalize<T: Scalar>(mat: &Mat<T>, drop_tol: f64) -> Mat<T> {
    let mut kept: Vec<Vec<T>> = Vec::new();
    for col in mat.columns() {
        let mut v = col.to_vec();
        let original = norm(&v);
        if original == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &kept {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let r = norm(&v);
        if r > drop_tol * original {
            let inv = 1.0 / r;
            v.iter_mut().for_each(|x| *x = x.scale(inv));
            kept.push(v);
        }
    }
    let mut out = Mat::zeros(mat.nrows(), kept.len());
    for (j, v) in kept.iter().enumerate() {
        out.col_mut(j).copy_from_slice(v);
    }
    out
}

/// Draw `Σ_j g_j b_j` with `g` standard Gaussian in the coordinates of the
/// columns `b_j` (complex Gaussian for complex bases).
pub fn random_in_span<T: Scalar, R: Rng + ?Sized>(basis: &Mat<T>, rng: &mut R) -> Vec<T> {
    let coords: Vec<T> = (0..basis.ncols()).map(|_| gaussian(rng)).collect();
    basis.mul_vec(&coords).expect("coordinate length matches")
}

pub fn gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> T {
    let a: f64 = rng.sample(StandardNormal);
    if T::IS_COMPLEX {
        let b: f64 = rng.sample(StandardNormal);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        T::from_re_im(a * s, b * s)
    } else {
        T::from_real(a)
    }
}

/// Random Hermitian matrix with standard Gaussian entries.
pub fn random_hermitian<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Mat<T> {
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        for i in 0..j {
            let v: T = gaussian(rng);
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
        let d: f64 = rng.sample(StandardNormal);
        m[(j, j)] = T::from_real(d);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matmul_and_adjoint_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: CMat = Mat::from_fn(4, 3, |_, _| gaussian(&mut rng));
        let b: CMat = Mat::from_fn(4, 2, |_, _| gaussian(&mut rng));
        let x = a.adjoint_mul(&b).unwrap();
        let y = a.adjoint().matmul(&b).unwrap();
        assert!(x.sub(&y).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn symmetric_rejects_asymmetric_input() {
        let m = RMat::from_fn(2, 2, |i, j| if i == 0 && j == 1 { 1.0 } else { 0.0 });
        assert!(matches!(SymmetricMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn symmetric_forces_real_diagonal() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 1e-13);
        m[(0, 1)] = C64::new(0.0, 2.0);
        m[(1, 0)] = C64::new(0.0, -2.0);
        let s = SymmetricMatrix::new(m).unwrap();
        assert_eq!(s[(0, 0)].im, 0.0);
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let m = RMat::from_columns(3, &[vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0], vec![1.0, 1.0, 0.0]]).unwrap();
        let q = orthonormalize(&m, 1e-10);
        assert_eq!(q.ncols(), 2);
        assert!(q.orthonormality_defect() < 1e-15);
    }

    #[test]
    fn gaussian_complex_has_imaginary_part() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: C64 = gaussian(&mut rng);
        assert!(z.im != 0.0);
    }
}
