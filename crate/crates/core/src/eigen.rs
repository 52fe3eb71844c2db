//! Dense Hermitian eigensolver.
//!
//! Householder reduction to tridiagonal form, a diagonal phase scaling that
//! makes the tridiagonal real, then implicit-shift QL iterations with
//! Wilkinson-type shifts (the EISPACK `tql2` scheme). Complex Hermitian input
//! is handled natively.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, Mat, RMat, Scalar, SymmetricMatrix};

/// QL sweeps allowed per eigenvalue, pooled over the whole matrix.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 30;

/// Full eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: Mat<T>,
    /// `max_j ‖A v_j − λ_j v_j‖`.
    pub residual_norm: f64,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// `‖A − V Λ V^*‖_max`
    pub fn reconstruction_error(&self, a: &SymmetricMatrix<T>) -> f64 {
        let n = self.order();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            scaled.col_mut(j).iter_mut().for_each(|x| *x = x.scale(lam));
        }
        let vt = self.vectors.adjoint();
        let rec = scaled.matmul(&vt).expect("square");
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((rec[(i, j)] - a[(i, j)]).abs());
            }
        }
        worst
    }
}

/// A run of numerically equal eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    /// Mean of the member values.
    pub value: f64,
    pub multiplicity: usize,
    /// Index of the first member in the ascending value list.
    pub start: usize,
}

impl EigenCluster {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.multiplicity
    }
}

/// Greedy clustering of ascending values: a value within `tol` of its
/// predecessor joins the predecessor's cluster.
pub fn group_eigenvalues(values: &[f64], tol: f64) -> Result<Vec<EigenCluster>> {
    if !(tol >= 0.0) {
        return Err(Error::invalid(format!("cluster tolerance must be >= 0, got {tol}")));
    }
    let mut out: Vec<EigenCluster> = Vec::new();
    let mut sum = 0.0;
    for (i, &v) in values.iter().enumerate() {
        if i > 0 && v < values[i - 1] {
            return Err(Error::invalid("eigenvalues must be ascending"));
        }
        match out.last_mut() {
            Some(c) if v - values[i - 1] <= tol => {
                c.multiplicity += 1;
                sum += v;
                c.value = sum / c.multiplicity as f64;
            }
            _ => {
                sum = v;
                out.push(EigenCluster {
                    value: v,
                    multiplicity: 1,
                    start: i,
                });
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a real symmetric or complex Hermitian matrix.
///
/// Eigenvalues ascend. Each eigenvector has its largest-magnitude entry
/// (first one on ties) real and positive. Vectors sharing an eigenvalue
/// cluster are re-orthonormalized; inside a cluster only the span is
/// meaningful.
pub fn eigh<T: Scalar>(a: &SymmetricMatrix<T>) -> Result<EigenDecomposition<T>> {
    let n = a.order();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: Mat::zeros(0, 0),
            residual_norm: 0.0,
        });
    }
    let mut work = a.matrix().clone();
    let tri = tridiagonalize(&mut work);

    let mut diag = tri.diag.clone();
    let mut off: Vec<f64> = tri.off.iter().map(|e| e.abs()).collect();
    let mut z = RMat::identity(n);
    tridiagonal_ql(&mut diag, &mut off, Some(&mut z))?;

    // V = Q D Z, with D the phase diagonal and Q the product of reflectors.
    let phases = tri.phases();
    let mut v: Mat<T> = Mat::from_fn(n, n, |i, j| phases[i].scale(z[(i, j)]));
    drop(z);
    tri.apply_q(&work, &mut v);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = v.select_columns(&order);
    drop(v);

    let anorm = a.matrix().norm_inf();
    let cluster_tol = 1e-10 * (1.0 + anorm);
    for c in group_eigenvalues(&values, cluster_tol)? {
        if c.multiplicity > 1 {
            reorthonormalize(&mut vectors, c.range());
        }
    }
    for j in 0..n {
        fix_phase(vectors.col_mut(j));
    }

    let av = a.matrix().matmul(&vectors)?;
    let mut residual = 0.0f64;
    for (j, &lam) in values.iter().enumerate() {
        let r: f64 = av
            .col(j)
            .iter()
            .zip(vectors.col(j))
            .map(|(&x, &y)| (x - y.scale(lam)).abs2())
            .sum();
        residual = residual.max(r.sqrt());
    }

    Ok(EigenDecomposition {
        values,
        vectors,
        residual_norm: residual,
    })
}

/// Eigenvalues only, ascending. Skips all vector work.
pub fn eigvalsh<T: Scalar>(a: &SymmetricMatrix<T>) -> Result<Vec<f64>> {
    let n = a.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut work = a.matrix().clone();
    let tri = tridiagonalize(&mut work);
    let mut diag = tri.diag;
    let mut off: Vec<f64> = tri.off.iter().map(|e| e.abs()).collect();
    tridiagonal_ql(&mut diag, &mut off, None)?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Rotate `v` so its largest-magnitude entry is real and positive.
pub fn fix_phase<T: Scalar>(v: &mut [T]) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        let a = x.abs2();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if best_abs <= 0.0 {
        return;
    }
    let p = v[best].unit_phase().conj();
    for x in v.iter_mut() {
        *x *= p;
    }
    v[best] = T::from_real(v[best].re());
}

fn reorthonormalize<T: Scalar>(v: &mut Mat<T>, range: std::ops::Range<usize>) {
    let start = range.start;
    for j in range.clone() {
        for _ in 0..2 {
            for i in start..j {
                let (qi, vj) = v.col_pair_mut(i, j);
                let c = dot(qi, vj);
                axpy(-c, qi, vj);
            }
        }
        let col = v.col_mut(j);
        let r = norm2(col).sqrt();
        if r > 0.0 {
            col.iter_mut().for_each(|x| *x = x.scale(1.0 / r));
        }
    }
}

pub(crate) struct Tridiagonal<T> {
    pub diag: Vec<f64>,
    /// `off[k] = T[k+1, k]` (complex in general).
    pub off: Vec<T>,
    /// Reflector scale `β_k`; the vector `u_k` lives in column `k` below the subdiagonal.
    betas: Vec<f64>,
}

impl<T: Scalar> Tridiagonal<T> {
    /// Unit diagonal `d` with `T = D T_r D^*`, `T_r` real with `|off|` off the diagonal.
    fn phases(&self) -> Vec<T> {
        let n = self.diag.len();
        let mut d = Vec::with_capacity(n);
        d.push(T::one());
        for k in 0..n.saturating_sub(1) {
            let next = d[k] * self.off[k].unit_phase();
            d.push(next);
        }
        d
    }

    /// `x ← H_0 H_1 ⋯ H_{n-3} x`
    fn apply_q(&self, store: &Mat<T>, x: &mut Mat<T>) {
        let n = self.diag.len();
        for k in (0..self.betas.len()).rev() {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let u = &store.col(k)[k + 1..n];
            for j in 0..x.ncols() {
                let col = &mut x.col_mut(j)[k + 1..n];
                let c = dot(u, col).scale(beta);
                axpy(-c, u, col);
            }
        }
    }
}

/// Reduce the Hermitian matrix in `a` to tridiagonal form in place.
///
/// On return column `k` of `a` holds the Householder vector `u_k` in rows
/// `k+1..n`; other entries are scratch.
pub(crate) fn tridiagonalize<T: Scalar>(a: &mut Mat<T>) -> Tridiagonal<T> {
    let n = a.nrows();
    let mut diag = vec![0.0; n];
    let mut off = vec![T::zero(); n.saturating_sub(1)];
    let mut betas = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![T::zero(); n];
    let mut w = vec![T::zero(); n];

    for k in 0..n.saturating_sub(2) {
        diag[k] = a[(k, k)].re();
        let r = n - k - 1;
        let (beta, sub) = {
            let x = &mut a.col_mut(k)[k + 1..];
            householder(x)
        };
        off[k] = sub;
        betas.push(beta);
        if beta == 0.0 {
            continue;
        }
        let u: Vec<T> = a.col(k)[k + 1..].to_vec();

        // p = β S u over the trailing block S = a[k+1.., k+1..]
        let p = &mut p[..r];
        p.iter_mut().for_each(|v| *v = T::zero());
        for (jj, &uj) in u.iter().enumerate() {
            let col = &a.col(k + 1 + jj)[k + 1..];
            axpy(uj.scale(beta), col, p);
        }
        let kappa = 0.5 * beta * dot(&u, p).re();
        let w = &mut w[..r];
        for i in 0..r {
            w[i] = p[i] - u[i].scale(kappa);
        }
        // S -= u w^* + w u^*
        for jj in 0..r {
            let wj = w[jj].conj();
            let uj = u[jj].conj();
            let col = &mut a.col_mut(k + 1 + jj)[k + 1..];
            for i in 0..r {
                col[i] -= u[i] * wj + w[i] * uj;
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)].re();
        off[n - 2] = a[(n - 1, n - 2)];
    }
    diag[n - 1] = a[(n - 1, n - 1)].re();
    Tridiagonal { diag, off, betas }
}

/// Hermitian reflector `H = I − β u u^*` with `H x = s e_1`.
///
/// Overwrites `x` with `u` and returns `(β, s)`. `β = 0` means no reflection.
fn householder<T: Scalar>(x: &mut [T]) -> (f64, T) {
    let alpha = x[0];
    let tail: f64 = norm2(&x[1..]);
    if tail == 0.0 {
        // already reduced; skip the reflection and keep the entry as is
        x.iter_mut().for_each(|v| *v = T::zero());
        return (0.0, alpha);
    }
    let xnorm = (alpha.abs2() + tail).sqrt();
    let phase = alpha.unit_phase();
    x[0] = alpha + phase.scale(xnorm);
    let unorm2 = norm2(x);
    (2.0 / unorm2, -phase.scale(xnorm))
}

/// Implicit QL on a real symmetric tridiagonal matrix (`tql2`).
///
/// `diag` receives the eigenvalues (unsorted); `off[k]` couples `k` and `k+1`.
/// Rotations are accumulated into the columns of `z` when given.
pub(crate) fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], mut z: Option<&mut RMat>) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    // e[i] couples i and i+1, with a trailing zero.
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);

    let eps = f64::EPSILON;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut sweeps = 0usize;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(diag[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                sweeps += 1;
                if sweeps > budget {
                    return Err(Error::NoConvergence {
                        iterations: sweeps - 1,
                        converged: l,
                        order: n,
                    });
                }
                let g = diag[l];
                let mut p = (diag[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                diag[l] = e[l] / (p + r);
                diag[l + 1] = e[l] * (p + r);
                let dl1 = diag[l + 1];
                let mut h = g - diag[l];
                for d in diag.iter_mut().take(n).skip(l + 2) {
                    *d -= h;
                }
                f += h;

                p = diag[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * diag[i] - s * g;
                    diag[i + 1] = h + s * (c * g + s * diag[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (zi, zi1) = z.col_pair_mut(i, i + 1);
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let hh = *b;
                            *b = s * *a + c * hh;
                            *a = c * *a - s * hh;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                diag[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        diag[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Singular values of a general matrix, descending.
///
/// Golub–Kahan bidiagonalization followed by eigenvalues of the symmetric
/// tridiagonal `[[0, B], [B^T, 0]]`; absolute accuracy is `O(ε ‖A‖)`, so
/// small singular values are resolved far better than through `A^* A`.
pub fn singular_values<T: Scalar>(a: &Mat<T>) -> Result<Vec<f64>> {
    let work = if a.nrows() >= a.ncols() { a.clone() } else { a.adjoint() };
    let (rows, cols) = (work.nrows(), work.ncols());
    if cols == 0 {
        return Ok(Vec::new());
    }
    let mut w = work;
    let mut d = vec![0.0; cols];
    let mut e = vec![0.0; cols.saturating_sub(1)];
    let mut tmp = vec![T::zero(); rows];
    for k in 0..cols {
        // left reflector on column k, rows k..
        let (beta, s) = {
            let x = &mut w.col_mut(k)[k..];
            householder(x)
        };
        d[k] = s.abs();
        if beta != 0.0 {
            let u: Vec<T> = w.col(k)[k..].to_vec();
            for j in k + 1..cols {
                let col = &mut w.col_mut(j)[k..];
                let c = dot(&u, col).scale(beta);
                axpy(-c, &u, col);
            }
        }
        if k + 1 < cols {
            // right reflector on row k, columns k+1..
            let mut x: Vec<T> = (k + 1..cols).map(|j| w[(k, j)].conj()).collect();
            let (beta, s) = householder(&mut x);
            e[k] = s.abs();
            if beta != 0.0 {
                // rows k+1.. of A u, then A ← A − β (A u) u^*
                let y = &mut tmp[..rows - k - 1];
                y.iter_mut().for_each(|v| *v = T::zero());
                for (jj, &uj) in x.iter().enumerate() {
                    axpy(uj, &w.col(k + 1 + jj)[k + 1..], y);
                }
                for (jj, &uj) in x.iter().enumerate() {
                    let coef = uj.conj().scale(beta);
                    let col = &mut w.col_mut(k + 1 + jj)[k + 1..];
                    axpy(-coef, y, col);
                }
            }
        }
    }
    // Jordan–Wielandt form of the bidiagonal
    let m = 2 * cols;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    for k in 0..cols {
        off[2 * k] = d[k];
        if k + 1 < cols {
            off[2 * k + 1] = e[k];
        }
    }
    tridiagonal_ql(&mut diag, &mut off, None)?;
    diag.sort_by(|a, b| b.total_cmp(a));
    diag.truncate(cols);
    for v in diag.iter_mut() {
        *v = v.max(0.0);
    }
    Ok(diag)
}

/// Number of singular values with `σ_i / σ_max > rel_cutoff`.
pub fn numerical_rank(singular: &[f64], rel_cutoff: f64) -> usize {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    singular.iter().filter(|&&s| s / smax > rel_cutoff).count()
}
