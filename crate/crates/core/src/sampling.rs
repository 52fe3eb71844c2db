//! Frame bounds, cyclic shifts, the block-0 concentration checkers for
//! `B_N ⊢ C_m`, and the cluster Plancherel–Polya checker.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigvalsh, numerical_rank, singular_values};
use crate::error::{Error, Result};
use crate::graph::{induced_subgraph, laplacian, validate_partition, Graph, VertexIndexing, VertexLabel};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{dot, norm, norm2, Mat, RMat, Scalar};
use crate::spectral::{
    graph_fourier, pw_space, ssl_eigen_top, PaleyWienerSpace, SpatialMask, SslReport, SslTolerances, PW_TOL,
};
use crate::structured::{cube_pw_dim, substitution_pw_basis, ModeTag};

/// Relative singular-value cutoff for numerical rank.
pub const RANK_CUTOFF: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    pub rank: usize,
    pub dim: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Frame bounds of the columns of `vectors` on `subspace`: the extreme
/// eigenvalues of `B_s^* Ψ Ψ^* B_s`, taken as squared singular values of
/// `Ψ^* B_s`.
pub fn frame_bounds<T: Scalar>(vectors: &Mat<T>, subspace: &PaleyWienerSpace<T>) -> Result<FrameReport> {
    if vectors.nrows() != subspace.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: subspace.ambient_dim(),
            actual: vectors.nrows(),
        });
    }
    let d = subspace.dim();
    let c = vectors.adjoint_mul(subspace.basis())?;
    let sv = singular_values(&c)?;
    let rank = numerical_rank(&sv, RANK_CUTOFF);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = if sv.len() >= d && d > 0 { sv[d - 1] } else { 0.0 };
    Ok(FrameReport {
        lower: if rank == d { sigma_min * sigma_min } else { 0.0 },
        upper: sigma_max * sigma_max,
        rank,
        dim: d,
        sigma_min,
        sigma_max,
    })
}

/// Graph families on which a cycle rotation acts by a block shift.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftFamily {
    Substitution { n: u32, m: usize },
    Cartesian { n: u32, m: usize },
}

impl ShiftFamily {
    pub fn from_graph(g: &Graph) -> Result<Self> {
        match g.indexing() {
            VertexIndexing::BlockMajor { n, m } => Ok(ShiftFamily::Substitution { n, m }),
            VertexIndexing::SliceMajor { inner, outer }
                if inner.is_power_of_two() && matches!(g.label(0), Some(VertexLabel::Slice { .. })) =>
            {
                Ok(ShiftFamily::Cartesian {
                    n: inner.trailing_zeros(),
                    m: outer,
                })
            }
            other => Err(Error::invalid(format!("no cyclic shift for {other:?} graphs"))),
        }
    }

    pub fn block_size(&self) -> usize {
        match *self {
            ShiftFamily::Substitution { n, .. } | ShiftFamily::Cartesian { n, .. } => 1 << n,
        }
    }

    pub fn blocks(&self) -> usize {
        match *self {
            ShiftFamily::Substitution { m, .. } | ShiftFamily::Cartesian { m, .. } => m,
        }
    }
}

/// Moves block `k` to block `k + k0 (mod m)`.
pub fn cyclic_shift<T: Scalar>(f: &[T], k0: isize, family: ShiftFamily) -> Result<Vec<T>> {
    let size = family.block_size();
    let m = family.blocks();
    let n = size * m;
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: f.len(),
        });
    }
    let offset = k0.rem_euclid(m as isize) as usize * size;
    let mut out = vec![T::zero(); n];
    for (i, &x) in f.iter().enumerate() {
        out[(i + offset) % n] = x;
    }
    Ok(out)
}

/// Block-0 spatio-spectral limiting on `PW_{2K}(B_N ⊢ C_m)` in the real
/// analytic basis.
#[derive(Clone, Debug)]
pub struct SubstitutionSsl {
    pub n: u32,
    pub k: u32,
    pub m: usize,
    pub pw: PaleyWienerSpace<f64>,
    /// Mode of each basis column of `pw`.
    pub tags: Vec<ModeTag>,
    pub mask: SpatialMask,
    pub ssl: SslReport<f64>,
}

pub fn substitution_ssl(n: u32, k: u32, m: usize, tolerances: SslTolerances) -> Result<SubstitutionSsl> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("need 0 < K < N, got K={k}, N={n}")));
    }
    let omega = 2.0 * k as f64;
    let real = substitution_pw_basis(n, m, omega)?.to_real()?;
    let pw = real.pw_space(omega)?;
    let tags: Vec<ModeTag> = real
        .tags
        .into_iter()
        .filter(|t| t.eigenvalue <= omega + PW_TOL)
        .collect();
    let mask = SpatialMask::block(pw.ambient_dim(), 1 << n, 0)?;
    // PQ has rank at most |mask|, so the leading 2^N vectors carry all
    // nonzero eigenvalues
    let ssl = ssl_eigen_top(&pw, &mask, 1 << n, tolerances)?;
    Ok(SubstitutionSsl {
        n,
        k,
        m,
        pw,
        tags,
        mask,
        ssl,
    })
}

impl SubstitutionSsl {
    pub fn family(&self) -> ShiftFamily {
        ShiftFamily::Substitution { n: self.n, m: self.m }
    }

    /// Embedded eigenvectors with eigenvalue above one half.
    pub fn above_half(&self) -> RMat {
        self.ssl.eigenvectors.select_columns(&self.ssl.above_half())
    }

    /// Every cyclic shift of every above-half eigenvector, shift-major.
    pub fn shift_system(&self) -> Result<RMat> {
        let above = self.above_half();
        let mut cols = Vec::with_capacity(self.m * above.ncols());
        for k0 in 0..self.m {
            for v in above.columns() {
                cols.push(cyclic_shift(v, k0 as isize, self.family())?);
            }
        }
        RMat::from_columns(self.pw.ambient_dim(), &cols)
    }
}

/// Block samples `s_k = f(v + k 2^N)`; returns the best `|s_0|²/‖s‖²`
/// over cube vertices `v` and the maximizing vertex.
pub fn cardinality_ratio<T: Scalar>(f: &[T], block_size: usize) -> (f64, usize) {
    let m = f.len() / block_size;
    let mut best = (0.0, 0);
    for v in 0..block_size {
        let total: f64 = (0..m).map(|k| f[v + k * block_size].abs2()).sum();
        if total > 0.0 {
            let r = f[v].abs2() / total;
            if r > best.0 {
                best = (r, v);
            }
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub n: u32,
    pub k: u32,
    pub m: usize,
    /// `dim PW_{2K}(B_N ⊢ C_m)`
    pub dim: usize,
    /// `dim_K` of the cube
    pub dim_k: u64,
    pub count_one: usize,
    pub count_mid: usize,
    pub count_small: usize,
    pub expected_one: u64,
    pub expected_mid: u64,
    pub expected_rank: u64,
    pub shift_rank: usize,
    /// `σ_min / σ_max` of the shift system.
    pub shift_conditioning: f64,
    pub above_half: Vec<f64>,
    /// One per mid eigenvector, descending eigenvalue order.
    pub cardinality_ratios: Vec<f64>,
    pub cardinality_vertices: Vec<usize>,
    pub holds: bool,
    pub top_mid_cardinal: bool,
}

pub fn conjecture_check(n: u32, k: u32, m: usize, tol: f64) -> Result<ConjectureReport> {
    let tolerances = SslTolerances { one: tol, mid: tol };
    conjecture_report(&substitution_ssl(n, k, m, tolerances)?)
}

pub fn conjecture_report(s: &SubstitutionSsl) -> Result<ConjectureReport> {
    let ssl = &s.ssl;
    let dim_k = cube_pw_dim(s.n, s.k as i64);
    let shifts = s.shift_system()?;
    let sv = singular_values(&shifts)?;
    let shift_rank = numerical_rank(&sv, RANK_CUTOFF);
    let smax = sv.first().copied().unwrap_or(0.0);
    let smin = sv.last().copied().unwrap_or(0.0);

    let block = 1usize << s.n;
    let mut ratios = Vec::new();
    let mut vertices = Vec::new();
    for j in ssl.count_one..ssl.count_one + ssl.count_mid {
        let (r, v) = cardinality_ratio(ssl.eigenvectors.col(j), block);
        ratios.push(r);
        vertices.push(v);
    }
    let expected_one = dim_k - (s.k as u64 + 1);
    let expected_mid = s.k as u64;
    let expected_rank = s.m as u64 * (dim_k - 1);
    let holds = ssl.count_one as u64 == expected_one
        && ssl.count_mid as u64 == expected_mid
        && shift_rank as u64 == expected_rank;
    Ok(ConjectureReport {
        n: s.n,
        k: s.k,
        m: s.m,
        dim: s.pw.dim(),
        dim_k,
        count_one: ssl.count_one,
        count_mid: ssl.count_mid,
        count_small: ssl.count_small,
        expected_one,
        expected_mid,
        expected_rank,
        shift_rank,
        shift_conditioning: if smax > 0.0 { smin / smax } else { 0.0 },
        above_half: ssl.eigenvalues[..ssl.count_one + ssl.count_mid].to_vec(),
        top_mid_cardinal: ratios.first().is_some_and(|&r| r > 0.5),
        cardinality_ratios: ratios,
        cardinality_vertices: vertices,
        holds,
    })
}

/// One `(block, f)` evaluation of
/// `μ_K ‖Q^{(k)} f‖² <= Σ_j |⟨Q^{(k)} f, ψ_{j,k}⟩|² <= ‖Q^{(k)} f‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSample {
    pub trial: usize,
    pub block: usize,
    pub local_energy: f64,
    pub captured: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: u32,
    pub k: u32,
    pub m: usize,
    pub mu_k: f64,
    pub count_mid: usize,
    /// `count_mid == K`; when false the conjectured structure is absent.
    pub conjecture_consistent: bool,
    pub trials: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub lower_failures: usize,
    pub upper_failures: usize,
    pub samples: Vec<BlockSample>,
}

/// Block-`k` measurement vectors: restrictions of the shifted above-half
/// eigenvectors to block `k`, orthonormalized there.
fn block_measurements(s: &SubstitutionSsl) -> Result<RMat> {
    let block = 1usize << s.n;
    let above = s.above_half();
    let restricted: Vec<Vec<f64>> = above.columns().map(|c| c[..block].to_vec()).collect();
    let r = RMat::from_columns(block, &restricted)?;
    Ok(crate::linalg::orthonormalize(&r, 1e-12))
}

fn evaluate_blocks(
    s: &SubstitutionSsl,
    meas: &RMat,
    mu_k: f64,
    f: &[f64],
    trial: usize,
    out: &mut Vec<BlockSample>,
) -> Result<()> {
    let block = 1usize << s.n;
    for k in 0..s.m {
        // shifting f back by k is the same as shifting the measurements forward
        let local = &f[k * block..(k + 1) * block];
        let energy = norm2(local);
        let captured: f64 = meas.columns().map(|c| dot(c, local).abs2()).sum();
        let slack = 1e-10 * (1.0 + energy);
        out.push(BlockSample {
            trial,
            block: k,
            local_energy: energy,
            captured,
            lower_holds: mu_k * energy <= captured + slack,
            upper_holds: captured <= energy + slack,
        });
    }
    Ok(())
}

pub fn concentration_check(n: u32, k: u32, m: usize, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    concentration_report(&substitution_ssl(n, k, m, SslTolerances::default())?, trials, seed)
}

pub fn concentration_report(s: &SubstitutionSsl, trials: usize, seed: u64) -> Result<ConcentrationReport> {
    let ssl = &s.ssl;
    if ssl.count_mid == 0 {
        return Err(Error::invalid("no PQ eigenvalues in (1/2, 1); mu_K undefined"));
    }
    let mu_k = ssl.eigenvalues[ssl.count_one + ssl.count_mid - 1];
    let meas = block_measurements(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(trials * s.m);
    for t in 0..trials {
        let f = s.pw.random_unit(&mut rng);
        evaluate_blocks(s, &meas, mu_k, &f, t, &mut samples)?;
    }
    Ok(summarize(s, mu_k, trials, samples))
}

/// Evaluates the inequality for one specific `f` on every block.
pub fn concentration_of(s: &SubstitutionSsl, f: &[f64]) -> Result<ConcentrationReport> {
    let ssl = &s.ssl;
    if ssl.count_mid == 0 {
        return Err(Error::invalid("no PQ eigenvalues in (1/2, 1); mu_K undefined"));
    }
    if f.len() != s.pw.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: s.pw.ambient_dim(),
            actual: f.len(),
        });
    }
    let mu_k = ssl.eigenvalues[ssl.count_one + ssl.count_mid - 1];
    let meas = block_measurements(s)?;
    let mut samples = Vec::new();
    evaluate_blocks(s, &meas, mu_k, f, 0, &mut samples)?;
    Ok(summarize(s, mu_k, 1, samples))
}

fn summarize(s: &SubstitutionSsl, mu_k: f64, trials: usize, samples: Vec<BlockSample>) -> ConcentrationReport {
    let ratios = samples
        .iter()
        .filter(|b| b.local_energy > 1e-24)
        .map(|b| b.captured / b.local_energy);
    let (min_ratio, max_ratio) = ratios.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    ConcentrationReport {
        n: s.n,
        k: s.k,
        m: s.m,
        mu_k,
        count_mid: s.ssl.count_mid,
        conjecture_consistent: s.ssl.count_mid == s.k as usize,
        trials,
        min_ratio,
        max_ratio,
        lower_failures: samples.iter().filter(|b| !b.lower_holds).count(),
        upper_failures: samples.iter().filter(|b| !b.upper_holds).count(),
        samples,
    }
}

/// Per-cluster sampling vectors `ψ_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SamplingChoice {
    /// `ψ_j = φ_{0,j}`, the unit constant on `S_j`.
    ClusterAverage,
    /// `ψ_j = δ_{v_j}`, one vertex per cluster.
    PointSample(Vec<usize>),
    /// Explicit vectors, one per cluster, each supported in its cluster.
    /// Normalized before use.
    Custom(Vec<Vec<f64>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PesensonReport {
    pub clusters: usize,
    pub lambda_per_cluster: Vec<f64>,
    pub theta_per_cluster: Vec<f64>,
    /// `Λ = inf_j λ_{1,j}`
    pub lambda: f64,
    /// `Θ = sup_j θ_j`
    pub theta: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub mu: f64,
    pub admissible: bool,
    pub lower_constant: f64,
    pub pw_dim: usize,
    pub trials: usize,
    pub empirical_min: f64,
    pub empirical_max: f64,
    /// Trials with `Σ_j |⟨f,ψ_j⟩|² < lower − 1e−10`.
    pub lower_failures: usize,
    pub lower_bound_holds: bool,
    pub ratios: Vec<f64>,
}

/// The `ε` maximizing `(1−μ)ε/((1+ε)Θ)`: `1/√a − 1` with `a = ΘΩ/Λ`,
/// or 1 when `Ω = 0`. Not positive when `a >= 1`.
pub fn optimal_epsilon(theta: f64, lambda: f64, omega: f64) -> f64 {
    let a = theta * omega / lambda;
    if a <= 0.0 {
        1.0
    } else {
        1.0 / a.sqrt() - 1.0
    }
}

/// First nonzero Laplacian eigenvalue of the induced cluster graph;
/// zero for a disconnected cluster, infinite for a single vertex.
fn cluster_gap(g: &Graph, cluster: &[usize]) -> Result<f64> {
    let sub = induced_subgraph(g, cluster)?;
    if sub.graph.order() == 1 {
        return Ok(f64::INFINITY);
    }
    if !sub.connected {
        return Ok(0.0);
    }
    Ok(eigvalsh(&laplacian(&sub.graph))?[1])
}

pub fn pesenson_report(
    g: &Graph,
    partition: &[Vec<usize>],
    sampling: &SamplingChoice,
    omega: f64,
    epsilon: Option<f64>,
    trials: usize,
    seed: u64,
) -> Result<PesensonReport> {
    let n = g.order();
    validate_partition(n, partition)?;
    let psi: Vec<Vec<f64>> = match sampling {
        SamplingChoice::ClusterAverage => partition
            .iter()
            .map(|s| {
                let mut v = vec![0.0; n];
                let c = 1.0 / (s.len() as f64).sqrt();
                s.iter().for_each(|&i| v[i] = c);
                v
            })
            .collect(),
        SamplingChoice::PointSample(points) => {
            if points.len() != partition.len() {
                return Err(Error::invalid("need one sample vertex per cluster"));
            }
            points
                .iter()
                .zip(partition)
                .map(|(&p, s)| {
                    if !s.contains(&p) {
                        return Err(Error::invalid(format!("sample vertex {p} outside its cluster")));
                    }
                    let mut v = vec![0.0; n];
                    v[p] = 1.0;
                    Ok(v)
                })
                .collect::<Result<_>>()?
        }
        SamplingChoice::Custom(vectors) => {
            if vectors.len() != partition.len() {
                return Err(Error::invalid("need one sampling vector per cluster"));
            }
            vectors
                .iter()
                .zip(partition)
                .map(|(v, s)| {
                    if v.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            actual: v.len(),
                        });
                    }
                    let outside = (0..n)
                        .filter(|i| !s.contains(i))
                        .map(|i| v[i].abs())
                        .fold(0.0, f64::max);
                    if outside > 0.0 {
                        return Err(Error::invalid("sampling vector not supported in its cluster"));
                    }
                    let nv = norm(v);
                    if nv == 0.0 {
                        return Err(Error::invalid("zero sampling vector"));
                    }
                    Ok(v.iter().map(|x| x / nv).collect())
                })
                .collect::<Result<_>>()?
        }
    };

    let mut lambdas = Vec::with_capacity(partition.len());
    let mut thetas = Vec::with_capacity(partition.len());
    for (s, p) in partition.iter().zip(&psi) {
        lambdas.push(cluster_gap(g, s)?);
        let overlap: f64 = s.iter().map(|&i| p[i]).sum::<f64>() / (s.len() as f64).sqrt();
        if overlap.abs() < 1e-14 {
            return Err(Error::invalid("sampling vector orthogonal to the cluster constant"));
        }
        thetas.push(1.0 / (overlap * overlap));
    }
    let lambda = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let theta = thetas.iter().cloned().fold(0.0, f64::max);
    let eps = epsilon.unwrap_or_else(|| optimal_epsilon(theta, lambda, omega));
    if !(eps > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon must be positive (omega {omega} is at or beyond Lambda/Theta)"
        )));
    }
    let mu = if omega == 0.0 {
        0.0
    } else {
        (1.0 + eps) * theta / lambda * omega
    };
    let admissible = mu < 1.0;
    let lower_constant = (1.0 - mu) * eps / ((1.0 + eps) * theta);

    let pw = pw_space(&graph_fourier(g)?, omega, PW_TOL)?;
    let psi_mat = RMat::from_columns(n, &psi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ratios = Vec::with_capacity(trials);
    for _ in 0..trials {
        let f = pw.random_unit(&mut rng);
        let coeffs = psi_mat.adjoint_mul_vec(&f)?;
        ratios.push(norm2(&coeffs));
    }
    let empirical_min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let empirical_max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lower_failures = if admissible {
        ratios.iter().filter(|&&r| r < lower_constant - 1e-10).count()
    } else {
        0
    };
    Ok(PesensonReport {
        clusters: partition.len(),
        lambda_per_cluster: lambdas,
        theta_per_cluster: thetas,
        lambda,
        theta,
        omega,
        epsilon: eps,
        mu,
        admissible,
        lower_constant,
        pw_dim: pw.dim(),
        trials,
        empirical_min,
        empirical_max,
        lower_failures,
        lower_bound_holds: admissible && lower_failures == 0,
        ratios,
    })
}

impl PesensonReport {
    pub fn write_ratios_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut t = CsvTable::new(out, &["trial", "ratio", "lower_constant"])?;
        for (i, r) in self.ratios.iter().enumerate() {
            t.row([i.to_string(), fmt_f64(*r), fmt_f64(self.lower_constant)])?;
        }
        t.finish()
    }
}

impl ConcentrationReport {
    pub fn write_samples_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut t = CsvTable::new(
            out,
            &[
                "trial",
                "block",
                "local_energy",
                "captured",
                "lower_holds",
                "upper_holds",
            ],
        )?;
        for s in &self.samples {
            t.row([
                s.trial.to_string(),
                s.block.to_string(),
                fmt_f64(s.local_energy),
                fmt_f64(s.captured),
                s.lower_holds.to_string(),
                s.upper_holds.to_string(),
            ])?;
        }
        t.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{block_partition, cube_cycle_product, cycle_graph, vertex_substitution};
    use crate::structured::dirichlet_basis;

    #[test]
    fn frame_of_own_basis() {
        let g = cycle_graph(8).unwrap();
        let pw = pw_space(&graph_fourier(&g).unwrap(), 2.0, PW_TOL).unwrap();
        let r = frame_bounds(pw.basis(), &pw).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-12 && (r.upper - 1.0).abs() < 1e-12);
        assert_eq!(r.rank, pw.dim());
        let twice = pw.basis().hstack(pw.basis()).unwrap();
        let r2 = frame_bounds(&twice, &pw).unwrap();
        assert!((r2.lower - 2.0).abs() < 1e-12 && (r2.upper - 2.0).abs() < 1e-12);
        let one = pw.basis().select_columns(&[0]);
        let r3 = frame_bounds(&one, &pw).unwrap();
        assert_eq!(r3.lower, 0.0);
        assert!(r3.rank < pw.dim());
    }

    #[test]
    fn frame_sandwich() {
        use rand::SeedableRng;
        let g = vertex_substitution(2, 4).unwrap();
        let pw = pw_space(&graph_fourier(&g).unwrap(), 2.0, PW_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = Mat::from_fn(16, 9, |_, _| crate::linalg::gaussian::<f64, _>(&mut rng));
        let r = frame_bounds(&psi, &pw).unwrap();
        for _ in 0..200 {
            let f = pw.random_unit(&mut rng);
            let s = norm2(&psi.adjoint_mul_vec(&f).unwrap());
            assert!(s >= r.lower - 1e-10 && s <= r.upper + 1e-10);
        }
    }

    #[test]
    fn shifts_are_automorphisms() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in [vertex_substitution(2, 5).unwrap(), cube_cycle_product(2, 5).unwrap()] {
            let fam = ShiftFamily::from_graph(&g).unwrap();
            let f: Vec<f64> = (0..g.order()).map(|_| crate::linalg::gaussian(&mut rng)).collect();
            for k0 in [-1isize, 1, 3] {
                let sf = cyclic_shift(&f, k0, fam).unwrap();
                assert!((norm(&sf) - norm(&f)).abs() < 1e-12);
                let lhs = g.apply_laplacian(&sf).unwrap();
                let rhs = cyclic_shift(&g.apply_laplacian(&f).unwrap(), k0, fam).unwrap();
                assert!(lhs.iter().zip(&rhs).all(|(a, b)| (a - b).abs() < 1e-12));
            }
            assert_eq!(cyclic_shift(&f, 5, fam).unwrap(), f);
        }
        assert!(ShiftFamily::from_graph(&cycle_graph(5).unwrap()).is_err());
    }

    #[test]
    fn dirichlet_shift_moves_support() {
        let d = dirichlet_basis(2, 1).unwrap();
        let mut f = vec![0.0; 12];
        f[..4].copy_from_slice(d.col(0));
        let fam = ShiftFamily::Substitution { n: 2, m: 3 };
        let s = cyclic_shift(&f, 1, fam).unwrap();
        assert!(s[..4].iter().all(|&x| x == 0.0));
        assert_eq!(&s[4..8], d.col(0));
    }

    #[test]
    fn conjecture_small_case() {
        let r = conjecture_check(3, 1, 5, 1e-8).unwrap();
        assert_eq!(r.dim_k, 4);
        assert_eq!(r.count_one + r.count_mid + r.count_small, r.dim);
        assert_eq!((r.expected_one, r.expected_mid, r.expected_rank), (2, 1, 15));
        assert_eq!((r.count_one, r.count_mid, r.shift_rank), (2, 1, 15));
        assert!(r.holds);
    }

    #[test]
    fn concentration_small_case() {
        let s = substitution_ssl(3, 1, 5, SslTolerances::default()).unwrap();
        let rep = concentration_report(&s, 20, 1).unwrap();
        assert_eq!(rep.upper_failures, 0);
        assert!(rep.max_ratio <= 1.0 + 1e-10);
        // a Dirichlet-type vector on block 2 is captured exactly there
        let mut f = vec![0.0; 40];
        f[16..24].copy_from_slice(dirichlet_basis(3, 1).unwrap().col(0));
        let one = concentration_of(&s, &f).unwrap();
        let b2 = one.samples.iter().find(|b| b.block == 2).unwrap();
        assert!((b2.captured - 1.0).abs() < 1e-10 && (b2.local_energy - 1.0).abs() < 1e-12);
        assert!(one.samples.iter().all(|b| b.lower_holds && b.upper_holds));
    }

    #[test]
    fn cardinality() {
        let f = [1.0, 0.0, 0.5, 0.0, 0.0, 0.0];
        // block size 2, 3 blocks: vertex 0 samples (1, 0.5, 0)
        let (r, v) = cardinality_ratio(&f, 2);
        assert_eq!(v, 0);
        assert!((r - 0.8).abs() < 1e-15);
    }

    #[test]
    fn pesenson_b3_c5() {
        let g = vertex_substitution(3, 5).unwrap();
        let parts = block_partition(g.order(), 8);
        for omega in [0.0, 0.5, 1.0] {
            let r = pesenson_report(&g, &parts, &SamplingChoice::ClusterAverage, omega, None, 100, 2).unwrap();
            assert!((r.theta - 1.0).abs() < 1e-12);
            assert!((r.lambda - 2.0).abs() < 1e-10);
            assert!(r.admissible);
            assert!(r.lower_bound_holds, "omega={omega}: {r:?}");
            if omega == 0.0 {
                assert!((r.empirical_min - 1.0).abs() < 1e-12 && (r.empirical_max - 1.0).abs() < 1e-12);
            }
        }
        let bad = pesenson_report(&g, &parts, &SamplingChoice::ClusterAverage, 1.5, Some(1.0), 10, 2).unwrap();
        assert!(!bad.admissible && !bad.lower_bound_holds);
        let pts = SamplingChoice::PointSample(parts.iter().map(|p| p[0]).collect());
        let r = pesenson_report(&g, &parts, &pts, 0.0, None, 5, 2).unwrap();
        assert!((r.theta - 8.0).abs() < 1e-12);
        assert!(pesenson_report(&g, &parts[1..], &SamplingChoice::ClusterAverage, 0.0, None, 5, 2).is_err());
    }

    #[test]
    fn epsilon_choice() {
        assert_eq!(optimal_epsilon(1.0, 2.0, 0.0), 1.0);
        assert!((optimal_epsilon(1.0, 2.0, 0.5) - 1.0).abs() < 1e-15);
        assert!((optimal_epsilon(1.0, 2.0, 1.0) - (2f64.sqrt() - 1.0)).abs() < 1e-15);
    }
}
