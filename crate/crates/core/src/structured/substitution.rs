//! Analytic eigenbasis of the vertex substitution `B_N ⊢ C_m`.
//!
//! Every eigenvector is one of two kinds:
//!
//! * Dirichlet type: a cube Dirichlet vector placed on a single block and
//!   zero elsewhere, eigenvalue exactly `2K`;
//! * Neumann type: an eigenvector `φ` of the augmented cube Laplacian `L_α`
//!   inside the span of `h_{n,0..N}`, repeated on every block with the cycle
//!   phase `α^k / √m`, `α = e^{2πiν/m}`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, fix_phase};
use crate::error::{Error, Result};
use crate::graph::{cube_graph, Graph};
use crate::io::{write_json, write_matrix_csv};
use crate::linalg::{CMat, Mat, RMat, Scalar, SymmetricMatrix, C64};
use crate::spectral::{PaleyWienerSpace, PW_TOL};

use super::cube::{binomial, dirichlet_basis, neumann_matrix};

fn check_sizes(n: u32, m: usize) -> Result<()> {
    if n == 0 || n > 20 {
        return Err(Error::invalid(format!("cube dimension must be in 1..=20, got {n}")));
    }
    if m < 3 {
        return Err(Error::invalid(format!("cycle needs m >= 3, got {m}")));
    }
    Ok(())
}

fn cycle_phase(nu: usize, m: usize) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * nu as f64 / m as f64)
}

/// `L(B_N) + C_α`: corner entries `(v_0,v_0) = (v_1,v_1) = 1`,
/// `(v_0,v_1) = −1/α`, `(v_1,v_0) = −α`.
#[derive(Clone, Debug)]
pub struct AugmentedLaplacian {
    pub n: u32,
    pub nu: usize,
    pub m: usize,
    pub alpha: C64,
    cube: Graph,
}

pub fn augmented_laplacian(n: u32, nu: usize, m: usize) -> Result<AugmentedLaplacian> {
    if m == 0 || nu >= m {
        return Err(Error::invalid(format!("need 0 <= nu < m, got nu={nu}, m={m}")));
    }
    Ok(AugmentedLaplacian {
        n,
        nu,
        m,
        alpha: cycle_phase(nu, m),
        cube: cube_graph(n)?,
    })
}

impl AugmentedLaplacian {
    pub fn order(&self) -> usize {
        self.cube.order()
    }

    pub fn apply(&self, f: &[C64]) -> Result<Vec<C64>> {
        let mut out = self.cube.apply_laplacian(f)?;
        let last = self.order() - 1;
        out[0] += f[0] - f[last] / self.alpha;
        out[last] += f[last] - self.alpha * f[0];
        Ok(out)
    }

    pub fn to_dense(&self) -> SymmetricMatrix<C64> {
        let n = self.order();
        let last = n - 1;
        let mut a = CMat::zeros(n, n);
        for v in 0..n {
            a[(v, v)] = C64::from_real(self.cube.degree(v) as f64);
            for &w in self.cube.neighbors(v) {
                a[(v, w)] = C64::from_real(-1.0);
            }
        }
        a[(0, 0)] += C64::from_real(1.0);
        a[(last, last)] += C64::from_real(1.0);
        a[(0, last)] -= self.alpha.conj();
        a[(last, 0)] -= self.alpha;
        SymmetricMatrix::new(a).expect("L_alpha is Hermitian for unit alpha")
    }
}

/// Eigenpairs of `L_α` restricted to the radial (Neumann) subspace.
#[derive(Clone, Debug)]
pub struct NeumannTypeEigen {
    pub n: u32,
    pub nu: usize,
    pub m: usize,
    pub alpha: C64,
    /// Ascending; the `K`-th lies in `[2K, 2K+2]`.
    pub eigenvalues: Vec<f64>,
    /// Column `K` holds `c_κ(α, K)`, `κ = 0..N`.
    pub coefficients: CMat,
    /// Column `K` holds the cube profile `Σ_κ c_κ(α,K) h_{n,κ}`.
    pub profiles: CMat,
}

pub fn neumann_type_eigen(n: u32, nu: usize, m: usize) -> Result<NeumannTypeEigen> {
    let aug = augmented_laplacian(n, nu, m)?;
    let h = neumann_matrix(n)?.to_complex();
    let lh = CMat::from_columns(
        h.nrows(),
        &h.columns().map(|c| aug.apply(c)).collect::<Result<Vec<_>>>()?,
    )?;
    let compression = h.adjoint_mul(&lh)?;
    let dec = eigh(&SymmetricMatrix::new(compression)?)?;
    let mut coefficients = dec.vectors;
    let mut profiles = h.matmul(&coefficients)?;
    for k in 0..profiles.ncols() {
        let before = profiles.col(k).to_vec();
        fix_phase(profiles.col_mut(k));
        // carry the same unit phase over to the coefficients
        let (i, _) = before.iter().enumerate().fold(
            (0, -1.0),
            |(bi, ba), (i, x)| if x.abs2() > ba { (i, x.abs2()) } else { (bi, ba) },
        );
        let p = profiles.col(k)[i] / before[i];
        coefficients.col_mut(k).iter_mut().for_each(|c| *c *= p);
    }
    Ok(NeumannTypeEigen {
        n,
        nu,
        m,
        alpha: aug.alpha,
        eigenvalues: dec.values,
        coefficients,
        profiles,
    })
}

/// Kind of an analytic eigenvector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ModeKind {
    /// Column `index` of the level-`level` Dirichlet basis on block `block`.
    Dirichlet {
        level: u32,
        block: usize,
        index: usize,
    },
    Neumann {
        level: u32,
        nu: usize,
    },
    /// `√2 Re` of the level-`level`, frequency-`nu` Neumann-type vector.
    NeumannCos {
        level: u32,
        nu: usize,
    },
    /// `√2 Im` of the same vector.
    NeumannSin {
        level: u32,
        nu: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeTag {
    #[serde(flatten)]
    pub kind: ModeKind,
    pub eigenvalue: f64,
}

/// All `m 2^N` eigenvalues with their kinds, ascending. Only the small
/// per-frequency problems are solved.
pub fn substitution_spectrum(n: u32, m: usize) -> Result<Vec<ModeTag>> {
    check_sizes(n, m)?;
    let mut tags = dirichlet_tags(n, m)?;
    for nu in 0..m {
        let ne = neumann_type_eigen(n, nu, m)?;
        for (level, &eigenvalue) in ne.eigenvalues.iter().enumerate() {
            tags.push(ModeTag {
                kind: ModeKind::Neumann {
                    level: level as u32,
                    nu,
                },
                eigenvalue,
            });
        }
    }
    tags.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(tags)
}

fn dirichlet_tags(n: u32, m: usize) -> Result<Vec<ModeTag>> {
    let mut tags = Vec::new();
    for level in 1..n {
        let count = binomial(n, level) as usize - 1;
        for block in 0..m {
            for index in 0..count {
                tags.push(ModeTag {
                    kind: ModeKind::Dirichlet { level, block, index },
                    eigenvalue: 2.0 * level as f64,
                });
            }
        }
    }
    Ok(tags)
}

/// Analytic eigenvectors (columns) with tags, ascending by eigenvalue.
#[derive(Clone, Debug)]
pub struct SubstitutionBasis<T = C64> {
    pub n: u32,
    pub m: usize,
    pub vectors: Mat<T>,
    pub tags: Vec<ModeTag>,
}

/// Full orthonormal eigenbasis of `L(B_N ⊢ C_m)`.
pub fn substitution_eigenbasis(n: u32, m: usize) -> Result<SubstitutionBasis<C64>> {
    build_basis(n, m, f64::INFINITY)
}

/// The analytic eigenvectors with eigenvalue `<= omega + PW_TOL`.
pub fn substitution_pw_basis(n: u32, m: usize, omega: f64) -> Result<SubstitutionBasis<C64>> {
    if !(omega >= 0.0) {
        return Err(Error::invalid(format!("omega must be >= 0, got {omega}")));
    }
    build_basis(n, m, omega + PW_TOL)
}

fn build_basis(n: u32, m: usize, cutoff: f64) -> Result<SubstitutionBasis<C64>> {
    check_sizes(n, m)?;
    let size = 1usize << n;
    let total = size * m;
    let dirichlet: Vec<RMat> = (1..n).map(|k| dirichlet_basis(n, k)).collect::<Result<_>>()?;
    let neumann: Vec<NeumannTypeEigen> = (0..m).map(|nu| neumann_type_eigen(n, nu, m)).collect::<Result<_>>()?;

    let mut tags = dirichlet_tags(n, m)?;
    for ne in &neumann {
        for (level, &eigenvalue) in ne.eigenvalues.iter().enumerate() {
            tags.push(ModeTag {
                kind: ModeKind::Neumann {
                    level: level as u32,
                    nu: ne.nu,
                },
                eigenvalue,
            });
        }
    }
    tags.retain(|t| t.eigenvalue <= cutoff);
    tags.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));

    let inv_sqrt_m = 1.0 / (m as f64).sqrt();
    let mut vectors = CMat::zeros(total, tags.len());
    for (j, tag) in tags.iter().enumerate() {
        let col = vectors.col_mut(j);
        match tag.kind {
            ModeKind::Dirichlet { level, block, index } => {
                let d = dirichlet[level as usize - 1].col(index);
                for (v, &x) in d.iter().enumerate() {
                    col[block * size + v] = C64::from_real(x);
                }
            }
            ModeKind::Neumann { level, nu }
            | ModeKind::NeumannCos { level, nu }
            | ModeKind::NeumannSin { level, nu } => {
                let ne = &neumann[nu];
                let phi = ne.profiles.col(level as usize);
                for k in 0..m {
                    let phase = cycle_phase(nu * k % m, m).scale(inv_sqrt_m);
                    for (v, &x) in phi.iter().enumerate() {
                        col[k * size + v] = phase * x;
                    }
                }
            }
        }
    }
    Ok(SubstitutionBasis { n, m, vectors, tags })
}

impl SubstitutionBasis<C64> {
    /// Real orthonormal basis of the same span. Frequencies `ν` and `m − ν`
    /// are replaced by `√2 Re v_ν` and `√2 Im v_ν` for `0 < ν < m/2`;
    /// the remaining vectors are already real.
    pub fn to_real(&self) -> Result<SubstitutionBasis<f64>> {
        let rows = self.vectors.nrows();
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(self.tags.len());
        let mut tags = Vec::with_capacity(self.tags.len());
        let s2 = std::f64::consts::SQRT_2;
        for (j, tag) in self.tags.iter().enumerate() {
            let v = self.vectors.col(j);
            match tag.kind {
                ModeKind::Neumann { level, nu } if 2 * nu != self.m && nu != 0 => {
                    if 2 * nu > self.m {
                        continue;
                    }
                    cols.push(v.iter().map(|z| s2 * z.re).collect());
                    tags.push(ModeTag {
                        kind: ModeKind::NeumannCos { level, nu },
                        eigenvalue: tag.eigenvalue,
                    });
                    cols.push(v.iter().map(|z| s2 * z.im).collect());
                    tags.push(ModeTag {
                        kind: ModeKind::NeumannSin { level, nu },
                        eigenvalue: tag.eigenvalue,
                    });
                }
                ModeKind::NeumannCos { .. } | ModeKind::NeumannSin { .. } => {
                    return Err(Error::invalid("basis is already real"));
                }
                _ => {
                    let imag = v.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
                    if imag > 1e-12 {
                        return Err(Error::invalid(format!(
                            "column {j} expected real, imaginary part {imag:.2e}"
                        )));
                    }
                    cols.push(v.iter().map(|z| z.re).collect());
                    tags.push(*tag);
                }
            }
        }
        if cols.len() != self.tags.len() {
            return Err(Error::invalid("frequencies nu and m - nu must both be present"));
        }
        Ok(SubstitutionBasis {
            n: self.n,
            m: self.m,
            vectors: RMat::from_columns(rows, &cols)?,
            tags,
        })
    }
}

impl<T: Scalar> SubstitutionBasis<T> {
    pub fn values(&self) -> Vec<f64> {
        self.tags.iter().map(|t| t.eigenvalue).collect()
    }

    pub fn pw_space(&self, omega: f64) -> Result<PaleyWienerSpace<T>> {
        PaleyWienerSpace::from_eigenbasis(&self.vectors, &self.values(), omega, PW_TOL)
    }

    /// Writes `<stem>.csv` (rows = vertices) and `<stem>_manifest.json`.
    pub fn export(&self, dir: &Path, stem: &str) -> Result<()> {
        write_matrix_csv(std::fs::File::create(dir.join(format!("{stem}.csv")))?, &self.vectors)?;
        #[derive(Serialize)]
        struct Manifest<'a> {
            n: u32,
            m: usize,
            columns: &'a [ModeTag],
        }
        write_json(
            &dir.join(format!("{stem}_manifest.json")),
            &Manifest {
                n: self.n,
                m: self.m,
                columns: &self.tags,
            },
        )
    }
}

/// `max_j ‖L v_j − λ_j v_j‖` against an explicit graph.
pub fn eigen_residual<T: Scalar>(g: &Graph, vectors: &Mat<T>, values: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for (j, v) in vectors.columns().enumerate() {
        let lv = g.apply_laplacian(v)?;
        let r: f64 = lv
            .iter()
            .zip(v)
            .map(|(&a, &b)| (a - b.scale(values[j])).abs2())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    Ok(worst)
}
