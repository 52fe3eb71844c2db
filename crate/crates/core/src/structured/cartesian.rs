//! `B_N □ C_m`: Dirichlet kernels and the three-part decomposition of
//! `PW_{2K}`.
//!
//! Vertex `(u, ℓ)` has flat index `ℓ 2^N + u`, so slice `ℓ` is a contiguous
//! copy of the cube.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, RMat};
use crate::spectral::{PaleyWienerSpace, PW_TOL};

use super::cube::{binomial, cube_pw_dim, hadamard_by_index, weight_indices};

/// `4 sin²(πk/m)`
pub fn cycle_eigenvalue(m: usize, k: usize) -> f64 {
    let s = (PI * k as f64 / m as f64).sin();
    4.0 * s * s
}

/// Real orthonormal Laplacian eigenbasis of `C_m`: the constant, then
/// cosine/sine pairs for `k = 1, 2, …`, then the alternating vector when
/// `m` is even. Eigenvalues are returned alongside.
pub fn cycle_fourier_basis(m: usize) -> (Vec<f64>, RMat) {
    let mut values = vec![0.0];
    let mut cols = vec![vec![1.0 / (m as f64).sqrt(); m]];
    let s = (2.0 / m as f64).sqrt();
    for k in 1..m.div_ceil(2) {
        let w = 2.0 * PI * k as f64 / m as f64;
        values.extend([cycle_eigenvalue(m, k); 2]);
        cols.push((0..m).map(|l| s * (w * l as f64).cos()).collect());
        cols.push((0..m).map(|l| s * (w * l as f64).sin()).collect());
    }
    if m % 2 == 0 {
        values.push(4.0);
        let a = 1.0 / (m as f64).sqrt();
        cols.push((0..m).map(|l| if l % 2 == 0 { a } else { -a }).collect());
    }
    let basis = RMat::from_columns(m, &cols).expect("columns have length m");
    (values, basis)
}

/// `n` such that `PW_2(C_m)` is spanned by frequencies `|k| <= n`.
pub fn pw2_cycle_radius(m: usize) -> usize {
    m / 4
}

/// `D_n(ℓ) = Σ_{|k|<=n} e^{2πikℓ/m}`.
pub fn dirichlet_kernel(m: usize, n: usize) -> Result<Vec<f64>> {
    if m < 3 {
        return Err(Error::invalid(format!("cycle needs m >= 3, got {m}")));
    }
    if 2 * n + 1 > m {
        return Err(Error::invalid(format!("kernel radius {n} exceeds (m-1)/2 for m={m}")));
    }
    Ok((0..m)
        .map(|l| {
            let w = 2.0 * PI * l as f64 / m as f64;
            1.0 + 2.0 * (1..=n).map(|k| (w * k as f64).cos()).sum::<f64>()
        })
        .collect())
}

/// `D̄_n = D_n / √(m(2n+1))`, unit norm.
pub fn normalized_dirichlet_kernel(m: usize, n: usize) -> Result<Vec<f64>> {
    let d = dirichlet_kernel(m, n)?;
    let c = 1.0 / ((m * (2 * n + 1)) as f64).sqrt();
    Ok(d.into_iter().map(|x| x * c).collect())
}

fn tensor(n: u32, m: usize, cube: &[f64], cycle: &[f64]) -> Vec<f64> {
    let size = 1usize << n;
    let mut out = vec![0.0; size * m];
    for (l, &c) in cycle.iter().enumerate() {
        for (u, &h) in cube.iter().enumerate() {
            out[l * size + u] = c * h;
        }
    }
    out
}

/// The three mutually orthogonal parts of `PW_{2K}(B_N □ C_m)`.
#[derive(Clone, Debug)]
pub struct CartesianPwDecomposition {
    pub n: u32,
    pub m: usize,
    pub k: u32,
    /// `PW_{2K−4}(B_N) ⊗ ℓ²(C_m)`: cyclic shifts of `δ_0 ⊗ h_γ`, `|γ| <= K−2`.
    pub localized: RMat,
    /// `Λ_{2K−2}(B_N) ⊗ PW_2(C_m)`: real Fourier modes times `h_γ`, `|γ| = K−1`.
    pub concentrated: RMat,
    /// `Λ_{2K}(B_N) ⊗ Λ_0(C_m)`: `(1/√m) 𝟙 ⊗ h_γ`, `|γ| = K`.
    pub spread: RMat,
    /// Shifts `D̄_{m'}(· − 2ℓ) ⊗ h_γ`, `ℓ = 0..=(m−1)/2`; present when
    /// `m ≡ 1 (mod 4)`. Spans `concentrated` but is not orthonormal.
    pub concentrated_shifts: Option<RMat>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CartesianComponent {
    Localized,
    Concentrated,
    Spread,
}

impl CartesianComponent {
    pub const ALL: [CartesianComponent; 3] = [
        CartesianComponent::Localized,
        CartesianComponent::Concentrated,
        CartesianComponent::Spread,
    ];
}

fn check_cartesian(n: u32, m: usize, k: u32) -> Result<()> {
    if n == 0 || n > 20 {
        return Err(Error::invalid(format!("cube dimension must be in 1..=20, got {n}")));
    }
    if m < 3 {
        return Err(Error::invalid(format!("cycle needs m >= 3, got {m}")));
    }
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("need 0 < K < N, got K={k}, N={n}")));
    }
    Ok(())
}

pub fn cartesian_pw_basis(n: u32, m: usize, k: u32) -> Result<CartesianPwDecomposition> {
    check_cartesian(n, m, k)?;
    let mut localized = Vec::new();
    for l in 0..m {
        let mut delta = vec![0.0; m];
        delta[l] = 1.0;
        for kappa in 0..k.saturating_sub(1) {
            for g in weight_indices(n, kappa) {
                localized.push(tensor(n, m, &hadamard_by_index(n, g), &delta));
            }
        }
    }

    let (cvals, cbasis) = cycle_fourier_basis(m);
    let low: Vec<usize> = (0..m).filter(|&j| cvals[j] <= 2.0 + PW_TOL).collect();
    let mut concentrated = Vec::new();
    for &j in &low {
        for g in weight_indices(n, k - 1) {
            concentrated.push(tensor(n, m, &hadamard_by_index(n, g), cbasis.col(j)));
        }
    }

    let ones = vec![1.0 / (m as f64).sqrt(); m];
    let spread: Vec<Vec<f64>> = weight_indices(n, k)
        .into_iter()
        .map(|g| tensor(n, m, &hadamard_by_index(n, g), &ones))
        .collect();

    let concentrated_shifts = if m % 4 == 1 {
        let kernel = normalized_dirichlet_kernel(m, (m - 1) / 4)?;
        let mut cols = Vec::new();
        for l in 0..=(m - 1) / 2 {
            let shifted: Vec<f64> = (0..m).map(|t| kernel[(t + m - (2 * l) % m) % m]).collect();
            for g in weight_indices(n, k - 1) {
                cols.push(tensor(n, m, &hadamard_by_index(n, g), &shifted));
            }
        }
        Some(RMat::from_columns(m << n, &cols)?)
    } else {
        None
    };

    let rows = m << n;
    Ok(CartesianPwDecomposition {
        n,
        m,
        k,
        localized: RMat::from_columns(rows, &localized)?,
        concentrated: RMat::from_columns(rows, &concentrated)?,
        spread: RMat::from_columns(rows, &spread)?,
        concentrated_shifts,
    })
}

/// Outcome of one slice-0 norm identity `c ‖Qf‖² = Σ_j |⟨f, Qψ_j⟩|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormIdentity {
    pub constant: f64,
    pub lhs: f64,
    pub rhs: f64,
}

impl NormIdentity {
    pub fn error(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

impl CartesianPwDecomposition {
    pub fn component(&self, c: CartesianComponent) -> &RMat {
        match c {
            CartesianComponent::Localized => &self.localized,
            CartesianComponent::Concentrated => &self.concentrated,
            CartesianComponent::Spread => &self.spread,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.localized.ncols(), self.concentrated.ncols(), self.spread.ncols()]
    }

    /// All three components side by side.
    pub fn combined(&self) -> RMat {
        self.localized
            .hstack(&self.concentrated)
            .and_then(|a| a.hstack(&self.spread))
            .expect("components share the vertex count")
    }

    /// `PQ` eigenvalue of the component's slice-concentrated vectors.
    pub fn constant(&self, c: CartesianComponent) -> f64 {
        match c {
            CartesianComponent::Localized => 1.0,
            CartesianComponent::Concentrated => (2 * pw2_cycle_radius(self.m) + 1) as f64 / self.m as f64,
            CartesianComponent::Spread => 1.0 / self.m as f64,
        }
    }

    /// Restrictions to slice 0 of the unit `PQ` eigenvectors of the
    /// component, as cube vectors: `δ_0 ⊗ h_γ`, `D̄(0) δ_0 ⊗ h_γ` and
    /// `m^{−1/2} δ_0 ⊗ h_γ` respectively.
    pub fn measurements(&self, c: CartesianComponent) -> Vec<(f64, Vec<f64>)> {
        let levels: Vec<u32> = match c {
            CartesianComponent::Localized => (0..self.k.saturating_sub(1)).collect(),
            CartesianComponent::Concentrated => vec![self.k - 1],
            CartesianComponent::Spread => vec![self.k],
        };
        let amp = self.constant(c).sqrt();
        levels
            .into_iter()
            .flat_map(|kappa| weight_indices(self.n, kappa))
            .map(|g| (amp, hadamard_by_index(self.n, g)))
            .collect()
    }

    /// Evaluates `c ‖Qf‖²` and `Σ_j |⟨f, Qψ_j⟩|²` on slice 0.
    pub fn norm_identity(&self, c: CartesianComponent, f: &[f64]) -> Result<NormIdentity> {
        let size = 1usize << self.n;
        if f.len() != size * self.m {
            return Err(Error::DimensionMismatch {
                expected: size * self.m,
                actual: f.len(),
            });
        }
        let slice = &f[..size];
        let constant = self.constant(c);
        let rhs = self
            .measurements(c)
            .iter()
            .map(|(amp, h)| {
                let ip = amp * dot(h, slice);
                ip * ip
            })
            .sum();
        Ok(NormIdentity {
            constant,
            lhs: constant * norm2(slice),
            rhs,
        })
    }
}

/// Nonzero `PQ` eigenvalues on `PW_{2K}(B_N □ C_m)` with a slice mask, as
/// `(value, multiplicity)` in descending order of value. Cube level `κ`
/// contributes `binom(N, κ)` copies of `dim PW_{2K−2κ}(C_m) / m`.
pub fn cartesian_pq_spectrum(n: u32, m: usize, k: u32) -> Result<Vec<(f64, u64)>> {
    check_cartesian(n, m, k)?;
    let mut out: Vec<(f64, u64)> = Vec::new();
    for kappa in 0..=k {
        let budget = 2.0 * (k - kappa) as f64;
        let d = (0..m).filter(|&j| cycle_eigenvalue(m, j) <= budget + PW_TOL).count();
        let value = d as f64 / m as f64;
        let mult = binomial(n, kappa);
        match out.iter_mut().find(|(v, _)| (v - value).abs() < 1e-12) {
            Some(entry) => entry.1 += mult,
            None => out.push((value, mult)),
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(out)
}

/// `[m dim_{K−2}, d_2(C_m) binom(N,K−1), binom(N,K)]`.
pub fn cartesian_dims(n: u32, m: usize, k: u32) -> Result<[u64; 3]> {
    check_cartesian(n, m, k)?;
    Ok([
        m as u64 * cube_pw_dim(n, k as i64 - 2),
        (2 * pw2_cycle_radius(m) + 1) as u64 * binomial(n, k - 1),
        binomial(n, k),
    ])
}

/// Products `h_γ ⊗ c_j` of cube characters and real cycle modes with
/// `2|γ| + λ_j(C_m) <= omega`: an orthonormal Laplacian eigenbasis of
/// `PW_omega(B_N □ C_m)`, ascending by eigenvalue.
pub fn cartesian_pw_eigenbasis(n: u32, m: usize, omega: f64) -> Result<PaleyWienerSpace<f64>> {
    if n == 0 || n > 20 || m < 3 {
        return Err(Error::invalid(format!("invalid sizes N={n}, m={m}")));
    }
    let (cvals, cbasis) = cycle_fourier_basis(m);
    let mut modes: Vec<(f64, usize, usize)> = Vec::new();
    for g in 0..1usize << n {
        for (j, &cv) in cvals.iter().enumerate() {
            let lam = 2.0 * g.count_ones() as f64 + cv;
            if lam <= omega + PW_TOL {
                modes.push((lam, g, j));
            }
        }
    }
    modes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let cols: Vec<Vec<f64>> = modes
        .iter()
        .map(|&(_, g, j)| tensor(n, m, &hadamard_by_index(n, g), cbasis.col(j)))
        .collect();
    let values: Vec<f64> = modes.iter().map(|t| t.0).collect();
    let basis = RMat::from_columns(m << n, &cols)?;
    PaleyWienerSpace::from_eigenbasis(&basis, &values, omega, PW_TOL)
}
