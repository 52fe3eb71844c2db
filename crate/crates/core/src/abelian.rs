//! Finite abelian groups `Π Z_{m_ν}`, their Fourier matrices, and
//! space-frequency limiting for symmetric subset pairs.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eigen::eigh;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, CsvTable};
use crate::linalg::{CMat, Scalar, SymmetricMatrix, C64};

/// Modes with `μ` at or below this are left out of sums.
pub const ZERO_MODE_TOL: f64 = 1e-12;

/// `Z_{m_1} × … × Z_{m_N}`, elements in mixed-radix order with the first
/// factor most significant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroup {
    factors: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("group needs at least one factor"));
        }
        if let Some(&m) = factors.iter().find(|&&m| m < 2) {
            return Err(Error::invalid(format!("cycle factor {m} is below 2")));
        }
        factors
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m))
            .ok_or_else(|| Error::invalid("group order overflows"))?;
        Ok(AbelianGroup { factors })
    }

    /// Parses `"m1xm2x…"`, e.g. `"4x5"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let factors = spec
            .split(['x', 'X'])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad group factor {t:?} in {spec:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn element(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, &m) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % m;
            index /= m;
        }
        out
    }

    pub fn index_of(&self, element: &[usize]) -> Result<usize> {
        if element.len() != self.factors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.factors.len(),
                actual: element.len(),
            });
        }
        let mut idx = 0;
        for (&r, &m) in element.iter().zip(&self.factors) {
            if r >= m {
                return Err(Error::invalid(format!("residue {r} out of range for Z_{m}")));
            }
            idx = idx * m + r;
        }
        Ok(idx)
    }

    pub fn neg(&self, index: usize) -> usize {
        let e: Vec<usize> = self
            .element(index)
            .iter()
            .zip(&self.factors)
            .map(|(&r, &m)| (m - r) % m)
            .collect();
        self.index_of(&e).expect("negation stays in range")
    }

    /// `F(s, σ) = Π_ν e^{2πi s_ν σ_ν / m_ν} / √m_ν`.
    pub fn character(&self, s: usize, sigma: usize) -> C64 {
        let (a, b) = (self.element(s), self.element(sigma));
        let mut phase = 0.0;
        for ((&x, &y), &m) in a.iter().zip(&b).zip(&self.factors) {
            phase += ((x * y) % m) as f64 / m as f64;
        }
        C64::from_polar(1.0 / (self.order() as f64).sqrt(), 2.0 * PI * phase)
    }
}

/// Rows indexed by `s ∈ G`, columns by `σ ∈ Ĝ`.
#[derive(Clone, Debug)]
pub struct FourierMatrix {
    pub group: AbelianGroup,
    pub matrix: CMat,
}

impl FourierMatrix {
    /// `max |F F^* − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.adjoint().orthonormality_defect()
    }

    /// `max | |F(s,σ)|² − 1/|G| |`.
    pub fn modulus_defect(&self) -> f64 {
        let target = 1.0 / self.group.order() as f64;
        self.matrix
            .as_slice()
            .iter()
            .map(|z| (z.norm_sqr() - target).abs())
            .fold(0.0, f64::max)
    }
}

pub fn abelian_fourier(group: &AbelianGroup) -> FourierMatrix {
    let n = group.order();
    // tensor product of the per-factor exponentials, built one factor at a time
    let mut acc = CMat::from_fn(1, 1, |_, _| C64::new(1.0, 0.0));
    for &m in group.factors() {
        let scale = 1.0 / (m as f64).sqrt();
        let rows = acc.nrows();
        acc = CMat::from_fn(rows * m, rows * m, |i, j| {
            let (hi_i, lo_i) = (i / m, i % m);
            let (hi_j, lo_j) = (j / m, j % m);
            let e = C64::from_polar(scale, 2.0 * PI * ((lo_i * lo_j) % m) as f64 / m as f64);
            acc[(hi_i, hi_j)] * e
        });
    }
    debug_assert_eq!(acc.nrows(), n);
    FourierMatrix {
        group: group.clone(),
        matrix: acc,
    }
}

/// Subset of `G` (or `Ĝ`, which shares its labels) as sorted flat indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetricSubset {
    elements: Vec<usize>,
    symmetric: bool,
}

impl SymmetricSubset {
    /// Out-of-range indices are rejected; symmetry is recorded, not
    /// enforced, so callers can report it.
    pub fn new(group: &AbelianGroup, elements: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = elements.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&e| e >= group.order()) {
            return Err(Error::invalid(format!(
                "element {bad} outside group of order {}",
                group.order()
            )));
        }
        let symmetric = set.iter().all(|&e| set.contains(&group.neg(e)));
        Ok(SymmetricSubset {
            elements: set.into_iter().collect(),
            symmetric,
        })
    }

    pub fn from_tuples(group: &AbelianGroup, tuples: &[Vec<usize>]) -> Result<Self> {
        let idx: Vec<usize> = tuples.iter().map(|t| group.index_of(t)).collect::<Result<_>>()?;
        Self::new(group, &idx)
    }

    pub fn whole(group: &AbelianGroup) -> Self {
        SymmetricSubset {
            elements: (0..group.order()).collect(),
            symmetric: true,
        }
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn contains(&self, e: usize) -> bool {
        self.elements.binary_search(&e).is_ok()
    }

    fn require_symmetric(&self, what: &str) -> Result<()> {
        if !self.symmetric {
            return Err(Error::invalid(format!("{what} is not closed under negation")));
        }
        if self.elements.is_empty() {
            return Err(Error::invalid(format!("{what} is empty")));
        }
        Ok(())
    }
}

/// One subset element in JSON: a flat index or a residue tuple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Index(usize),
    Tuple(Vec<usize>),
}

/// `{"S": [...], "Sigma": [...]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPair {
    #[serde(rename = "S")]
    pub s: Vec<ElementSpec>,
    #[serde(rename = "Sigma")]
    pub sigma: Vec<ElementSpec>,
}

impl SubsetPair {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self, group: &AbelianGroup) -> Result<(SymmetricSubset, SymmetricSubset)> {
        let flat = |list: &[ElementSpec]| -> Result<Vec<usize>> {
            list.iter()
                .map(|e| match e {
                    ElementSpec::Index(i) => Ok(*i),
                    ElementSpec::Tuple(t) => group.index_of(t),
                })
                .collect()
        };
        Ok((
            SymmetricSubset::new(group, &flat(&self.s)?)?,
            SymmetricSubset::new(group, &flat(&self.sigma)?)?,
        ))
    }
}

#[derive(Clone, Debug)]
pub struct AbelianPqEigen {
    /// Descending.
    pub values: Vec<f64>,
    /// Unit eigenvectors `φ_ν` in `ℓ²(G)`, one column each.
    pub vectors: CMat,
    pub residual_norm: f64,
    /// Set when `|S| < |Σ|`.
    pub warning: Option<String>,
}

/// Eigenpairs of the compression `F_Σ^* 𝟙_S F_Σ`, lifted to `ℓ²(G)` by `F_Σ`.
pub fn abelian_pq_eigen(group: &AbelianGroup, s: &SymmetricSubset, sigma: &SymmetricSubset) -> Result<AbelianPqEigen> {
    s.require_symmetric("S")?;
    sigma.require_symmetric("Sigma")?;
    let warning = (s.len() < sigma.len()).then(|| {
        format!(
            "|S| = {} < |Sigma| = {}; PQ rank may be below |Sigma|",
            s.len(),
            sigma.len()
        )
    });
    let f = abelian_fourier(group);
    let f_sigma = f.matrix.select_columns(sigma.elements());
    let compression = f_sigma.select_rows(s.elements()).gram();
    let eig = eigh(&SymmetricMatrix::new(compression)?)?;
    let order: Vec<usize> = (0..eig.values.len()).rev().collect();
    let coeffs = eig.vectors.select_columns(&order);
    Ok(AbelianPqEigen {
        values: order.iter().map(|&i| eig.values[i]).collect(),
        vectors: f_sigma.matmul(&coeffs)?,
        residual_norm: eig.residual_norm,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Accumulation {
    /// `Σ_ν μ_ν |F^*φ_ν(σ)|²` for every `σ ∈ Ĝ`.
    pub values: Vec<f64>,
    /// `(|S|/|G|) 𝟙_Σ(σ)`.
    pub expected: Vec<f64>,
    pub max_deviation: f64,
    pub excluded_modes: usize,
    pub eigenvalue_sum: f64,
}

pub fn spectral_accumulation(
    group: &AbelianGroup,
    s: &SymmetricSubset,
    sigma: &SymmetricSubset,
) -> Result<Accumulation> {
    let eig = abelian_pq_eigen(group, s, sigma)?;
    accumulation_from(group, s, sigma, &eig)
}

pub fn accumulation_from(
    group: &AbelianGroup,
    s: &SymmetricSubset,
    sigma: &SymmetricSubset,
    eig: &AbelianPqEigen,
) -> Result<Accumulation> {
    let n = group.order();
    let f = abelian_fourier(group);
    let mut values = vec![0.0; n];
    let mut excluded = 0;
    for (j, &mu) in eig.values.iter().enumerate() {
        if mu <= ZERO_MODE_TOL {
            excluded += 1;
            continue;
        }
        let hat = f.matrix.adjoint_mul_vec(eig.vectors.col(j))?;
        values.iter_mut().zip(&hat).for_each(|(v, z)| *v += mu * z.abs2());
    }
    let level = s.len() as f64 / n as f64;
    let expected: Vec<f64> = (0..n).map(|k| if sigma.contains(k) { level } else { 0.0 }).collect();
    let max_deviation = values
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Accumulation {
        values,
        expected,
        max_deviation,
        excluded_modes: excluded,
        eigenvalue_sum: eig.values.iter().sum(),
    })
}

impl Accumulation {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut t = CsvTable::new(out, &["sigma", "accumulation", "expected"])?;
        for (k, (v, e)) in self.values.iter().zip(&self.expected).enumerate() {
            t.row([k.to_string(), fmt_f64(*v), fmt_f64(*e)])?;
        }
        t.finish()
    }
}

/// `max_{s, t∈S} |K(s,t) − (PQ δ_t)(s)|` with `K(s,t) = Σ_{μ_ν>0} φ_ν(s) φ̄_ν(t)`
/// and `PQ δ_t` formed directly from the Fourier matrix.
pub fn mercer_defect(
    group: &AbelianGroup,
    s: &SymmetricSubset,
    sigma: &SymmetricSubset,
    eig: &AbelianPqEigen,
) -> Result<f64> {
    let n = group.order();
    let f = abelian_fourier(group);
    let f_sigma = f.matrix.select_columns(sigma.elements());
    let keep: Vec<usize> = (0..eig.values.len())
        .filter(|&j| eig.values[j] > ZERO_MODE_TOL)
        .collect();
    let phi = eig.vectors.select_columns(&keep);
    let mut worst = 0.0f64;
    for &t in s.elements() {
        let mut delta = vec![C64::new(0.0, 0.0); n];
        delta[t] = C64::new(1.0, 0.0);
        // Q δ_t = δ_t for t in S, then P = F_Σ F_Σ^*
        let pq = f_sigma.mul_vec(&f_sigma.adjoint_mul_vec(&delta)?)?;
        for (i, &target) in pq.iter().enumerate() {
            let k: C64 = (0..phi.ncols()).map(|c| phi[(i, c)] * phi[(t, c)].conj()).sum();
            worst = worst.max((k - target).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, laplacian};
    use crate::structured::hadamard_by_index;

    #[test]
    fn group_indexing() {
        let g = AbelianGroup::parse("4x5").unwrap();
        assert_eq!(g.order(), 20);
        assert_eq!(g.element(7), vec![1, 2]);
        assert_eq!(g.index_of(&[1, 2]).unwrap(), 7);
        assert_eq!(g.neg(7), g.index_of(&[3, 3]).unwrap());
        assert!(AbelianGroup::parse("4x1").is_err());
        assert!(AbelianGroup::parse("4xa").is_err());
        assert!(g.index_of(&[4, 0]).is_err());
    }

    #[test]
    fn haar_matrix() {
        let f = abelian_fourier(&AbelianGroup::new(vec![2]).unwrap());
        let r = 0.5f64.sqrt();
        let expect = [[r, r], [r, -r]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((f.matrix[(i, j)] - C64::new(expect[i][j], 0.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kronecker_hadamard() {
        let g = AbelianGroup::new(vec![2, 2, 2]).unwrap();
        let f = abelian_fourier(&g);
        for sigma in 0..8 {
            let h = hadamard_by_index(3, sigma);
            for s in 0..8 {
                assert!((f.matrix[(s, sigma)] - C64::new(h[s], 0.0)).abs() < 1e-15);
                assert!((f.matrix[(s, sigma)] - g.character(s, sigma)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn fourier_unitary_and_flat() {
        for spec in ["3", "4x5", "2x3x2", "6"] {
            let f = abelian_fourier(&AbelianGroup::parse(spec).unwrap());
            assert!(f.unitarity_defect() < 1e-12);
            assert!(f.modulus_defect() < 1e-12);
        }
    }

    #[test]
    fn z3_columns_diagonalize_cycle() {
        let f = abelian_fourier(&AbelianGroup::new(vec![3]).unwrap());
        let l = laplacian(&cycle_graph(3).unwrap()).to_complex();
        for j in 0..3 {
            let col = f.matrix.col(j);
            let lv = l.matrix().mul_vec(col).unwrap();
            let lambda = 2.0 - 2.0 * (2.0 * PI * j as f64 / 3.0).cos();
            assert!(lv.iter().zip(col).all(|(a, b)| (a - b * lambda).abs() < 1e-14));
        }
    }

    #[test]
    fn trivial_cases() {
        let g = AbelianGroup::new(vec![2]).unwrap();
        let all = SymmetricSubset::whole(&g);
        let zero = SymmetricSubset::new(&g, &[0]).unwrap();
        let e = abelian_pq_eigen(&g, &all, &zero).unwrap();
        assert_eq!(e.values.len(), 1);
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!(e
            .vectors
            .col(0)
            .iter()
            .all(|z| (z - C64::new(0.5f64.sqrt(), 0.0)).abs() < 1e-14));
        let e2 = abelian_pq_eigen(&g, &all, &all).unwrap();
        assert!(e2.values.iter().all(|v| (v - 1.0).abs() < 1e-14));
        let acc = spectral_accumulation(&g, &all, &zero).unwrap();
        assert!((acc.values[0] - 1.0).abs() < 1e-14 && acc.values[1].abs() < 1e-14);
        assert!(acc.max_deviation < 1e-14);
    }

    #[test]
    fn z6_brute_force() {
        let g = AbelianGroup::new(vec![6]).unwrap();
        let s = SymmetricSubset::new(&g, &[0, 1, 5]).unwrap();
        let e = abelian_pq_eigen(&g, &s, &s).unwrap();
        // the 3×3 compression by hand: M_ab = (1/6) Σ_{t∈S} e^{2πi t (b−a)/6}
        let sig = [0i64, 1, 5];
        let mut m = CMat::zeros(3, 3);
        for a in 0..3 {
            for b in 0..3 {
                m[(a, b)] = sig
                    .iter()
                    .map(|&t| C64::from_polar(1.0 / 6.0, 2.0 * PI * (t * (sig[b] - sig[a])) as f64 / 6.0))
                    .sum();
            }
        }
        let mut oracle = crate::eigen::eigvalsh(&SymmetricMatrix::new(m).unwrap()).unwrap();
        oracle.reverse();
        for (a, b) in e.values.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
        let acc = accumulation_from(&g, &s, &s, &e).unwrap();
        assert!(acc.max_deviation <= 1e-10);
        for k in 0..6 {
            let want = if s.contains(k) { 0.5 } else { 0.0 };
            assert!((acc.values[k] - want).abs() < 1e-10);
        }
        assert!(mercer_defect(&g, &s, &s, &e).unwrap() < 1e-9);
        assert!((acc.eigenvalue_sum - 9.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_rejected() {
        let g = AbelianGroup::new(vec![6]).unwrap();
        let bad = SymmetricSubset::new(&g, &[0, 1]).unwrap();
        assert!(!bad.is_symmetric());
        let ok = SymmetricSubset::new(&g, &[0]).unwrap();
        assert!(abelian_pq_eigen(&g, &bad, &ok).is_err());
        assert!(abelian_pq_eigen(&g, &ok, &bad).is_err());
        let small = abelian_pq_eigen(&g, &ok, &SymmetricSubset::new(&g, &[0, 1, 5]).unwrap()).unwrap();
        assert!(small.warning.is_some());
    }

    #[test]
    fn json_subsets() {
        let g = AbelianGroup::parse("4x5").unwrap();
        let pair = SubsetPair::from_json(r#"{"S": [0, [1, 1], [3, 4]], "Sigma": [[0, 0]]}"#).unwrap();
        let (s, sigma) = pair.resolve(&g).unwrap();
        assert_eq!(s.elements(), &[0, 6, 19]);
        assert!(s.is_symmetric() && sigma.is_symmetric());
    }
}
