//! Graph Fourier transform, Paley–Wiener spaces and spatio-spectral
//! limiting.
//!
//! `P` is the orthogonal projection onto a Paley–Wiener space with basis `B`,
//! `Q` is multiplication by the indicator of a vertex set. `PQ` is studied
//! through the Hermitian compression `B^* Q B`, whose spectrum agrees with
//! the nonzero spectrum of `PQ`; a coordinate eigenvector `w` corresponds to
//! the eigenvector `Bw` of `PQ`.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, fix_phase, group_eigenvalues, EigenCluster};
use crate::error::{Error, Result};
use crate::graph::{laplacian, Graph};
use crate::io::{write_values_csv, write_vector_csv};
use crate::linalg::{dot, norm, norm2, random_in_span, Mat, RMat, Scalar, SymmetricMatrix};

/// Eigenvalues closer than this are treated as one eigenspace.
pub const CLUSTER_TOL: f64 = 1e-8;
/// Slack added to `Ω` when deciding Paley–Wiener membership.
pub const PW_TOL: f64 = 1e-9;

/// Laplacian eigendecomposition of a connected graph.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: RMat,
    pub clusters: Vec<EigenCluster>,
    pub residual_norm: f64,
}

pub fn graph_fourier(g: &Graph) -> Result<Spectrum> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let dec = eigh(&laplacian(g))?;
    let clusters = group_eigenvalues(&dec.values, CLUSTER_TOL)?;
    Ok(Spectrum {
        values: dec.values,
        vectors: dec.vectors,
        clusters,
        residual_norm: dec.residual_norm,
    })
}

impl Spectrum {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Fourier coefficients `V^T f`.
    pub fn transform(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.vectors.adjoint_mul_vec(f)
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        self.vectors.mul_vec(coeffs)
    }
}

/// Span of the eigenvectors with eigenvalue at most `omega`.
#[derive(Clone, Debug)]
pub struct PaleyWienerSpace<T> {
    omega: f64,
    basis: Mat<T>,
    /// Laplacian eigenvalue attached to each basis column.
    eigenvalues: Vec<f64>,
}

pub fn pw_space(spec: &Spectrum, omega: f64, tol: f64) -> Result<PaleyWienerSpace<f64>> {
    check_omega(omega)?;
    let cols: Vec<usize> = spec
        .clusters
        .iter()
        .filter(|c| c.value <= omega + tol)
        .flat_map(|c| c.range())
        .collect();
    Ok(PaleyWienerSpace {
        omega,
        basis: spec.vectors.select_columns(&cols),
        eigenvalues: cols.iter().map(|&j| spec.values[j]).collect(),
    })
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega >= 0.0) {
        return Err(Error::invalid(format!("omega must be >= 0, got {omega}")));
    }
    Ok(())
}

impl<T: Scalar> PaleyWienerSpace<T> {
    /// Wrap a known orthonormal eigenbasis (columns of `vectors` with
    /// Laplacian eigenvalues `values`), keeping columns with value
    /// `<= omega + tol`.
    pub fn from_eigenbasis(vectors: &Mat<T>, values: &[f64], omega: f64, tol: f64) -> Result<Self> {
        check_omega(omega)?;
        if values.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: vectors.ncols(),
                actual: values.len(),
            });
        }
        let cols: Vec<usize> = (0..values.len()).filter(|&j| values[j] <= omega + tol).collect();
        let basis = vectors.select_columns(&cols);
        let defect = basis.orthonormality_defect();
        if defect > 1e-8 {
            return Err(Error::invalid(format!(
                "basis is not orthonormal (defect {defect:.3e})"
            )));
        }
        Ok(PaleyWienerSpace {
            omega,
            basis,
            eigenvalues: cols.iter().map(|&j| values[j]).collect(),
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &Mat<T> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `B B^* f`
    pub fn project(&self, f: &[T]) -> Result<Vec<T>> {
        let c = self.basis.adjoint_mul_vec(f)?;
        self.basis.mul_vec(&c)
    }

    /// `‖f − Pf‖ / ‖f‖`
    pub fn membership_defect(&self, f: &[T]) -> Result<f64> {
        let p = self.project(f)?;
        let r: Vec<T> = f.iter().zip(&p).map(|(&a, &b)| a - b).collect();
        let nf = norm(f);
        Ok(if nf == 0.0 { 0.0 } else { norm(&r) / nf })
    }

    /// `max_j ‖(I − P) L b_j‖`: zero when the span is `L`-invariant.
    pub fn invariance_defect(&self, g: &Graph) -> Result<f64> {
        let mut worst = 0.0f64;
        for b in self.basis.columns() {
            let lb = g.apply_laplacian(b)?;
            let p = self.project(&lb)?;
            let r: Vec<T> = lb.iter().zip(&p).map(|(&a, &c)| a - c).collect();
            worst = worst.max(norm(&r));
        }
        Ok(worst)
    }

    /// Unit-norm random element, Gaussian in basis coordinates.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<T> {
        let mut f = random_in_span(&self.basis, rng);
        let inv = 1.0 / norm(&f);
        f.iter_mut().for_each(|x| *x = x.scale(inv));
        f
    }
}

/// Sorted, nonempty vertex set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialMask {
    n: usize,
    indices: Vec<usize>,
}

impl SpatialMask {
    pub fn new(n: usize, indices: &[usize]) -> Result<Self> {
        let mut idx = indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::invalid("mask must be nonempty"));
        }
        if let Some(&bad) = idx.iter().find(|&&v| v >= n) {
            return Err(Error::invalid(format!(
                "mask vertex {bad} out of range for {n} vertices"
            )));
        }
        Ok(SpatialMask { n, indices: idx })
    }

    /// Contiguous block `k` of size `block_size`, e.g. cube copy `k` of a
    /// block-major or slice-major graph.
    pub fn block(n: usize, block_size: usize, k: usize) -> Result<Self> {
        if block_size == 0 || n % block_size != 0 {
            return Err(Error::invalid(format!("block size {block_size} does not divide {n}")));
        }
        if k >= n / block_size {
            return Err(Error::invalid(format!(
                "block {k} out of range ({} blocks)",
                n / block_size
            )));
        }
        Ok(SpatialMask {
            n,
            indices: (k * block_size..(k + 1) * block_size).collect(),
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.indices.binary_search(&v).is_ok()
    }

    /// `Qf`
    pub fn apply<T: Scalar>(&self, f: &[T]) -> Result<Vec<T>> {
        if f.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: f.len(),
            });
        }
        let mut out = vec![T::zero(); self.n];
        for &v in &self.indices {
            out[v] = f[v];
        }
        Ok(out)
    }
}

/// `‖Qf‖² / ‖f‖²`
pub fn concentration<T: Scalar>(f: &[T], mask: &SpatialMask) -> Result<f64> {
    if f.len() != mask.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: mask.ambient_dim(),
            actual: f.len(),
        });
    }
    let total = norm2(f);
    if total == 0.0 {
        return Err(Error::invalid("concentration of the zero vector"));
    }
    let inside: f64 = mask.indices().iter().map(|&v| f[v].abs2()).sum();
    Ok(inside / total)
}

/// Classification thresholds for `PQ` eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SslTolerances {
    /// `|μ − 1| <= one` counts as one.
    pub one: f64,
    /// Mid band is `(1/2 + mid, 1 − one)`.
    pub mid: f64,
}

impl Default for SslTolerances {
    fn default() -> Self {
        SslTolerances { one: 1e-8, mid: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SslBand {
    One,
    Mid,
    Small,
}

impl SslTolerances {
    pub fn band(&self, mu: f64) -> SslBand {
        if mu >= 1.0 - self.one {
            SslBand::One
        } else if mu > 0.5 + self.mid {
            SslBand::Mid
        } else {
            SslBand::Small
        }
    }
}

/// Eigenpairs of `PQ`, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct SslReport<T> {
    pub eigenvalues: Vec<f64>,
    /// Coordinate eigenvectors `w` (columns, descending order).
    pub coordinates: Mat<T>,
    /// `Bw` for the leading `eigenvectors.ncols()` eigenpairs.
    pub eigenvectors: Mat<T>,
    pub count_one: usize,
    pub count_mid: usize,
    pub count_small: usize,
    pub tolerances: SslTolerances,
}

/// All eigenpairs of `PQ` on `pw`, with every eigenvector embedded.
pub fn ssl_eigen<T: Scalar>(pw: &PaleyWienerSpace<T>, mask: &SpatialMask) -> Result<SslReport<T>> {
    ssl_eigen_top(pw, mask, usize::MAX, SslTolerances::default())
}

/// As [`ssl_eigen`], embedding only the leading `embed` eigenvectors.
pub fn ssl_eigen_top<T: Scalar>(
    pw: &PaleyWienerSpace<T>,
    mask: &SpatialMask,
    embed: usize,
    tolerances: SslTolerances,
) -> Result<SslReport<T>> {
    if mask.ambient_dim() != pw.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: pw.ambient_dim(),
            actual: mask.ambient_dim(),
        });
    }
    let d = pw.dim();
    let compression = pw.basis().select_rows(mask.indices()).gram();
    let dec = eigh(&SymmetricMatrix::new(compression)?)?;
    let order: Vec<usize> = (0..d).rev().collect();
    let eigenvalues: Vec<f64> = order.iter().map(|&j| dec.values[j]).collect();
    let coordinates = dec.vectors.select_columns(&order);

    let keep = embed.min(d);
    let head: Vec<usize> = (0..keep).collect();
    let mut eigenvectors = pw.basis().matmul(&coordinates.select_columns(&head))?;
    for j in 0..keep {
        fix_phase(eigenvectors.col_mut(j));
    }

    let (mut one, mut mid, mut small) = (0, 0, 0);
    for &mu in &eigenvalues {
        match tolerances.band(mu) {
            SslBand::One => one += 1,
            SslBand::Mid => mid += 1,
            SslBand::Small => small += 1,
        }
    }
    Ok(SslReport {
        eigenvalues,
        coordinates,
        eigenvectors,
        count_one: one,
        count_mid: mid,
        count_small: small,
        tolerances,
    })
}

impl<T: Scalar> SslReport<T> {
    /// Indices (descending order) of eigenvalues above one half.
    pub fn above_half(&self) -> Vec<usize> {
        (0..self.count_one + self.count_mid).collect()
    }

    /// `‖P Q v_j − μ_j v_j‖` for an embedded eigenvector.
    pub fn residual(&self, pw: &PaleyWienerSpace<T>, mask: &SpatialMask, j: usize) -> Result<f64> {
        let v = self.eigenvectors.col(j);
        let pq = pw.project(&mask.apply(v)?)?;
        let mu = self.eigenvalues[j];
        let r: Vec<T> = pq.iter().zip(v).map(|(&a, &b)| a - b.scale(mu)).collect();
        Ok(norm(&r))
    }

    pub fn write_eigenvalues_csv<W: Write>(&self, out: W) -> Result<()> {
        write_values_csv(out, ["index", "eigenvalue"], &self.eigenvalues)
    }

    pub fn write_eigenvector_csv<W: Write>(&self, j: usize, out: W) -> Result<()> {
        if j >= self.eigenvectors.ncols() {
            return Err(Error::invalid(format!("eigenvector {j} was not embedded")));
        }
        write_vector_csv(out, self.eigenvectors.col(j))
    }
}

/// `|⟨a, b⟩|²`
pub fn overlap2<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    dot(a, b).abs2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eigvalsh;
    use crate::graph::{cube_cycle_product, cube_graph, cycle_graph, vertex_substitution};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_four_fourier() {
        let s = graph_fourier(&cycle_graph(4).unwrap()).unwrap();
        let expect = [0.0, 2.0, 2.0, 4.0];
        assert!(s.values.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-12));
        let f = [1.0, -2.0, 0.5, 3.0];
        let back = s.inverse(&s.transform(&f).unwrap()).unwrap();
        assert!(back.iter().zip(f).all(|(a, b)| (a - b).abs() < 1e-12));
        // constant eigenvector first
        let c = s.vectors.col(0);
        assert!(c.iter().all(|x| (x - 0.5).abs() < 1e-12));
    }

    #[test]
    fn pw_of_cycle_is_everything_at_four() {
        for m in [3, 7, 10] {
            let s = graph_fourier(&cycle_graph(m).unwrap()).unwrap();
            assert_eq!(pw_space(&s, 4.0, PW_TOL).unwrap().dim(), m);
        }
        let s = graph_fourier(&cycle_graph(5).unwrap()).unwrap();
        assert!(pw_space(&s, -1.0, PW_TOL).is_err());
        assert_eq!(pw_space(&s, 0.0, PW_TOL).unwrap().dim(), 1);
    }

    #[test]
    fn cube_clusters_are_hadamard_spans() {
        let s = graph_fourier(&cube_graph(2).unwrap()).unwrap();
        let mult: Vec<usize> = s.clusters.iter().map(|c| c.multiplicity).collect();
        assert_eq!(mult, vec![1, 2, 1]);
        // weight-1 characters (1,1,-1,-1)/2 and (1,-1,1,-1)/2 lie in the 2-cluster
        let pw2 = pw_space(&s, 2.0, PW_TOL).unwrap();
        for h in [[0.5, 0.5, -0.5, -0.5], [0.5, -0.5, 0.5, -0.5], [0.5, -0.5, -0.5, 0.5]] {
            let defect = pw2.membership_defect(&h).unwrap();
            let is_top = h == [0.5, -0.5, -0.5, 0.5];
            assert_eq!(defect > 0.5, is_top);
        }
    }

    #[test]
    fn pw_invariance() {
        let g = vertex_substitution(2, 4).unwrap();
        let s = graph_fourier(&g).unwrap();
        let pw = pw_space(&s, 2.0, PW_TOL).unwrap();
        assert!(pw.invariance_defect(&g).unwrap() < 1e-8);
        assert!(pw.basis().orthonormality_defect() < 1e-10);
    }

    #[test]
    fn masks() {
        assert!(SpatialMask::new(4, &[]).is_err());
        assert!(SpatialMask::new(4, &[4]).is_err());
        let m = SpatialMask::block(12, 4, 2).unwrap();
        assert_eq!(m.indices(), &[8, 9, 10, 11]);
        assert!(SpatialMask::block(12, 5, 0).is_err());
        assert!(SpatialMask::block(12, 4, 3).is_err());
        let f = [1.0; 12];
        assert!((concentration(&f, &m).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(concentration(&[0.0; 12], &m).is_err());
        let mut outside = [0.0; 12];
        outside[0] = 1.0;
        assert_eq!(concentration(&outside, &m).unwrap(), 0.0);
    }

    fn qpq_nonzero(pw: &PaleyWienerSpace<f64>, mask: &SpatialMask) -> Vec<f64> {
        // brute force: Q P Q as an explicit n×n matrix
        let n = pw.ambient_dim();
        let b = pw.basis();
        let p = b.matmul(&b.adjoint()).unwrap();
        let qpq = Mat::from_fn(n, n, |i, j| {
            if mask.contains(i) && mask.contains(j) {
                p[(i, j)]
            } else {
                0.0
            }
        });
        let mut v = eigvalsh(&SymmetricMatrix::new(qpq).unwrap()).unwrap();
        v.retain(|x| x.abs() > 1e-10);
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    #[test]
    fn ssl_matches_brute_force() {
        for g in [vertex_substitution(2, 5).unwrap(), cube_cycle_product(2, 5).unwrap()] {
            let s = graph_fourier(&g).unwrap();
            let pw = pw_space(&s, 2.0, PW_TOL).unwrap();
            let mask = SpatialMask::block(g.order(), 4, 0).unwrap();
            let rep = ssl_eigen(&pw, &mask).unwrap();
            let nonzero: Vec<f64> = rep.eigenvalues.iter().cloned().filter(|x| x.abs() > 1e-10).collect();
            let oracle = qpq_nonzero(&pw, &mask);
            assert_eq!(nonzero.len(), oracle.len());
            assert!(nonzero.iter().zip(&oracle).all(|(a, b)| (a - b).abs() < 1e-10));
            assert_eq!(rep.count_one + rep.count_mid + rep.count_small, pw.dim());
            for j in 0..pw.dim() {
                assert!(rep.residual(&pw, &mask, j).unwrap() < 1e-8);
                assert!(pw.membership_defect(rep.eigenvectors.col(j)).unwrap() < 1e-8);
                assert!(rep.eigenvalues[j] > -1e-10 && rep.eigenvalues[j] < 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn random_unit_is_in_space() {
        let s = graph_fourier(&cycle_graph(9).unwrap()).unwrap();
        let pw = pw_space(&s, 1.0, PW_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = pw.random_unit(&mut rng);
        assert!((norm(&f) - 1.0).abs() < 1e-12);
        assert!(pw.membership_defect(&f).unwrap() < 1e-12);
    }

    #[test]
    fn bands() {
        let t = SslTolerances::default();
        assert_eq!(t.band(1.0 - 1e-9), SslBand::One);
        assert_eq!(t.band(0.99999235), SslBand::Mid);
        assert_eq!(t.band(0.5), SslBand::Small);
        assert_eq!(t.band(0.0148), SslBand::Small);
    }
}
