//! Hadamard, Dirichlet and Neumann vectors on the Boolean cube.

use crate::error::{Error, Result};
use crate::linalg::{RMat, Scalar};

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n as u64 - i) / (i + 1);
    }
    acc
}

/// `dim_K = Σ_{κ≤K} binom(N, κ)`, the dimension of `PW_{2K}(B_N)`.
/// Zero for negative `K`.
pub fn cube_pw_dim(n: u32, k: i64) -> u64 {
    if k < 0 {
        return 0;
    }
    (0..=k.min(n as i64) as u32).map(|j| binomial(n, j)).sum()
}

fn check_cube(n: u32) -> Result<()> {
    if n == 0 || n > 24 {
        return Err(Error::invalid(format!("cube dimension must be in 1..=24, got {n}")));
    }
    Ok(())
}

/// Indices of the weight-`k` characters, ascending.
pub fn weight_indices(n: u32, k: u32) -> Vec<usize> {
    (0..1usize << n).filter(|g| g.count_ones() == k).collect()
}

/// `h_γ` with `γ` given as a flat cube index.
pub fn hadamard_by_index(n: u32, gamma: usize) -> Vec<f64> {
    let scale = (-(n as f64) / 2.0).exp2();
    (0..1usize << n)
        .map(|v| {
            if (v & gamma).count_ones() % 2 == 0 {
                scale
            } else {
                -scale
            }
        })
        .collect()
}

/// `h_γ(v) = 2^{−N/2} (−1)^{⟨v,γ⟩}` with `γ` as a 0/1 bitstring,
/// most significant coordinate first.
pub fn hadamard_vector(n: u32, gamma: &[u8]) -> Result<Vec<f64>> {
    check_cube(n)?;
    if gamma.len() != n as usize {
        return Err(Error::DimensionMismatch {
            expected: n as usize,
            actual: gamma.len(),
        });
    }
    let mut idx = 0usize;
    for &b in gamma {
        if b > 1 {
            return Err(Error::invalid(format!("bitstring entry {b} is not 0 or 1")));
        }
        idx = (idx << 1) | b as usize;
    }
    Ok(hadamard_by_index(n, idx))
}

/// Orthonormal basis of `{Σ_{|γ|=K} c_γ h_γ : Σ c_γ = 0}`, one column per
/// Helmert contrast over the weight-`K` characters in ascending index order.
pub fn dirichlet_basis(n: u32, k: u32) -> Result<RMat> {
    check_cube(n)?;
    if k == 0 || k >= n {
        return Err(Error::invalid(format!(
            "Dirichlet vectors need 0 < K < N, got K={k}, N={n}"
        )));
    }
    let chars: Vec<Vec<f64>> = weight_indices(n, k)
        .into_iter()
        .map(|g| hadamard_by_index(n, g))
        .collect();
    let size = 1usize << n;
    let mut out = RMat::zeros(size, chars.len() - 1);
    let mut running = vec![0.0; size];
    for j in 1..chars.len() {
        running.iter_mut().zip(&chars[j - 1]).for_each(|(r, h)| *r += h);
        let jf = j as f64;
        let inv = 1.0 / (jf * (jf + 1.0)).sqrt();
        for (v, o) in out.col_mut(j - 1).iter_mut().enumerate() {
            *o = (running[v] - jf * chars[j][v]) * inv;
        }
    }
    Ok(out)
}

/// `h_{n,K} = binom(N,K)^{−1/2} Σ_{|γ|=K} h_γ`.
///
/// Depends on `v` only through its Hamming weight `w`:
/// `h_{n,K}(v) = c_K 2^{−N/2} Σ_j (−1)^j binom(w,j) binom(N−w,K−j)`.
pub fn neumann_vector(n: u32, k: u32) -> Result<Vec<f64>> {
    check_cube(n)?;
    if k > n {
        return Err(Error::invalid(format!("level K={k} exceeds N={n}")));
    }
    let mut acc = vec![0.0; 1usize << n];
    for g in weight_indices(n, k) {
        let h = hadamard_by_index(n, g);
        acc.iter_mut().zip(&h).for_each(|(a, x)| *a += x);
    }
    let c = 1.0 / (binomial(n, k) as f64).sqrt();
    acc.iter_mut().for_each(|a| *a = a.scale(c));
    Ok(acc)
}

/// Columns `h_{n,0}, …, h_{n,N}`.
pub fn neumann_matrix(n: u32) -> Result<RMat> {
    let cols: Vec<Vec<f64>> = (0..=n).map(|k| neumann_vector(n, k)).collect::<Result<_>>()?;
    RMat::from_columns(1usize << n, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cube_graph;
    use crate::linalg::dot;

    fn lap_eig_defect(n: u32, f: &[f64], lambda: f64) -> f64 {
        let g = cube_graph(n).unwrap();
        let lf = g.apply_laplacian(f).unwrap();
        lf.iter()
            .zip(f)
            .map(|(a, b)| (a - lambda * b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(7, 3), 35);
        assert_eq!(binomial(7, 0), 1);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(cube_pw_dim(7, 3), 64);
        assert_eq!(cube_pw_dim(7, 1), 8);
        assert_eq!(cube_pw_dim(7, -1), 0);
    }

    #[test]
    fn hadamard_values() {
        let h0 = hadamard_vector(3, &[0, 0, 0]).unwrap();
        assert!(h0.iter().all(|&x| (x - 8f64.sqrt().recip()).abs() < 1e-15));
        for g in 0..8usize {
            let h = hadamard_by_index(3, g);
            let k = g.count_ones() as i32;
            assert!((h[0] - 8f64.sqrt().recip()).abs() < 1e-15);
            assert!((h[7] - (-1f64).powi(k) * 8f64.sqrt().recip()).abs() < 1e-15);
            assert!(lap_eig_defect(3, &h, 2.0 * k as f64) < 1e-14);
            for g2 in 0..8usize {
                let ip = dot(&h, &hadamard_by_index(3, g2));
                assert!((ip - if g == g2 { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!(hadamard_vector(3, &[0, 1]).is_err());
        assert!(hadamard_vector(3, &[0, 1, 2]).is_err());
        // bitstring (1,0,0) is index 4
        assert_eq!(hadamard_vector(3, &[1, 0, 0]).unwrap(), hadamard_by_index(3, 4));
    }

    #[test]
    fn dirichlet_two_cube() {
        let d = dirichlet_basis(2, 1).unwrap();
        assert_eq!(d.ncols(), 1);
        let v = d.col(0);
        // ∝ h_(0,1) − h_(1,0): zero at 00 and 11, ±1/√2 elsewhere
        assert!(v[0].abs() < 1e-15 && v[3].abs() < 1e-15);
        assert!((v[1].abs() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((v[1] + v[2]).abs() < 1e-15);
        assert!(dirichlet_basis(2, 0).is_err());
        assert!(dirichlet_basis(2, 2).is_err());
    }

    #[test]
    fn dirichlet_seven_cube() {
        let counts: Vec<usize> = (1..=3).map(|k| dirichlet_basis(7, k).unwrap().ncols()).collect();
        assert_eq!(counts, vec![6, 20, 34]);
        assert_eq!(counts.iter().sum::<usize>(), 60);
        for k in 1..7 {
            let d = dirichlet_basis(7, k).unwrap();
            assert!(d.orthonormality_defect() < 1e-13);
            for v in d.columns() {
                assert!(v[0].abs() < 1e-14 && v[127].abs() < 1e-14);
                assert!(lap_eig_defect(7, v, 2.0 * k as f64) < 1e-12);
            }
        }
    }

    #[test]
    fn neumann_vectors() {
        let h0 = neumann_vector(4, 0).unwrap();
        assert!(h0.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        let h = neumann_matrix(5).unwrap();
        assert!(h.orthonormality_defect() < 1e-13);
        for k in 0..=5u32 {
            assert!(lap_eig_defect(5, h.col(k as usize), 2.0 * k as f64) < 1e-13);
            if 0 < k && k < 5 {
                let d = dirichlet_basis(5, k).unwrap();
                for v in d.columns() {
                    assert!(dot(v, h.col(k as usize)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn neumann_is_radial() {
        // closed form through Krawtchouk sums
        let n = 6u32;
        for k in 0..=n {
            let h = neumann_vector(n, k).unwrap();
            let c = (binomial(n, k) as f64).sqrt().recip() * (-(n as f64) / 2.0).exp2();
            for (v, &x) in h.iter().enumerate() {
                let w = (v as u32).count_ones();
                let kr: f64 = (0..=k)
                    .map(|j| {
                        let s = if j % 2 == 0 { 1.0 } else { -1.0 };
                        s * binomial(w, j) as f64 * binomial(n - w, k - j) as f64
                    })
                    .sum();
                assert!((x - c * kr).abs() < 1e-13);
            }
        }
    }
}
