//! Acceptance suite. Runs without the libtest harness so that each
//! criterion prints one line to stdout.
//!
//! Criterion 1 as literally stated cannot hold: the constant vector is an
//! eigenvector with eigenvalue exactly 0, and for even K the frequency-0
//! Neumann-type vector sits exactly on 2K rather than strictly above it.
//! It is checked verbatim and reported as FAIL; the exit status tolerates
//! that one failure only when the observed counts match the analysis. A
//! second line checks the same staircase split by eigenvector type.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cubecycle::abelian::{spectral_accumulation, AbelianGroup, SymmetricSubset};
use cubecycle::eigen::{eigh, eigvalsh};
use cubecycle::graph::{block_partition, cube_cycle_product, laplacian, vertex_substitution};
use cubecycle::linalg::{norm, random_hermitian, random_in_span, CMat, Mat, RMat, Scalar, SymmetricMatrix};
use cubecycle::sampling::{conjecture_report, pesenson_report, substitution_ssl, SamplingChoice, SubstitutionSsl};
use cubecycle::spectral::{ssl_eigen_top, SpatialMask, SslTolerances};
use cubecycle::structured::{
    binomial, cartesian_pw_basis, cartesian_pw_eigenbasis, substitution_eigenbasis, substitution_pw_basis,
    substitution_spectrum, CartesianComponent, ModeKind,
};

const N: u32 = 7;
const M: usize = 21;
const K: u32 = 3;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let out = Outcome {
        id,
        pass,
        detail,
        elapsed: start.elapsed(),
    };
    println!(
        "criterion {:>3}: {} ({:.1}s) {}",
        out.id,
        if out.pass { "PASS" } else { "FAIL" },
        out.elapsed.as_secs_f64(),
        out.detail
    );
    out
}

fn count(values: &[f64], pred: impl Fn(f64) -> bool) -> usize {
    values.iter().filter(|&&v| pred(v)).count()
}

/// Literal per-level counts `(#λ = 2K, #λ ∈ (2K, 2K+2))`, tolerance 1e−8.
fn staircase(values: &[f64]) -> Vec<(usize, usize)> {
    (0..=3)
        .map(|k| {
            let lo = 2.0 * k as f64;
            (
                count(values, |v| (v - lo).abs() <= 1e-8),
                count(values, |v| v > lo + 1e-8 && v < lo + 2.0 - 1e-8),
            )
        })
        .collect()
}

/// Counts observed when the literal check fails for the reasons given in the
/// module docs: one extra eigenvalue on 2K (and one fewer inside) for K even.
fn explained_staircase() -> Vec<(usize, usize)> {
    (0..=3u32)
        .map(|k| {
            let dirichlet = if k == 0 { 0 } else { M * (binomial(N, k) as usize - 1) };
            if k % 2 == 0 {
                (dirichlet + 1, M - 1)
            } else {
                (dirichlet, M)
            }
        })
        .collect()
}

fn criterion_1_literal(oracle: &[f64]) -> (bool, String) {
    let tags = substitution_spectrum(N, M).expect("structural spectrum");
    let values: Vec<f64> = tags.iter().map(|t| t.eigenvalue).collect();
    let dev = values
        .iter()
        .zip(oracle)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let got = staircase(&values);
    let mut ok = dev <= 1e-8;
    for (k, &(eq, inside)) in got.iter().enumerate() {
        let want_eq = M * (binomial(N, k as u32) as usize - 1);
        ok &= eq == want_eq && inside == M;
    }
    (
        ok,
        format!("(#=2K, #inside) per K=0..3: {got:?}; dense-oracle deviation {dev:.1e}"),
    )
}

fn criterion_1_by_type() -> (bool, String) {
    let tags = substitution_spectrum(N, M).expect("structural spectrum");
    let mut ok = true;
    let mut rows = Vec::new();
    for k in 0..=3u32 {
        let lo = 2.0 * k as f64;
        let dirichlet: Vec<f64> = tags
            .iter()
            .filter(|t| matches!(t.kind, ModeKind::Dirichlet { level, .. } if level == k))
            .map(|t| t.eigenvalue)
            .collect();
        let neumann: Vec<f64> = tags
            .iter()
            .filter(|t| matches!(t.kind, ModeKind::Neumann { level, .. } if level == k))
            .map(|t| t.eigenvalue)
            .collect();
        let want = if k == 0 { 0 } else { M * (binomial(N, k) as usize - 1) };
        ok &= dirichlet.len() == want && dirichlet.iter().all(|v| (v - lo).abs() <= 1e-8);
        ok &= neumann.len() == M && neumann.iter().all(|&v| v >= lo - 1e-8 && v < lo + 2.0 - 1e-8);
        rows.push((dirichlet.len(), neumann.len()));
    }
    (
        ok,
        format!("by type: (Dirichlet on 2K, Neumann-type in [2K,2K+2)) per K: {rows:?}"),
    )
}

fn criterion_2(oracle: &[f64]) -> (bool, String) {
    let basis = substitution_pw_basis(N, M, 6.0).expect("PW basis");
    let d = basis.vectors.ncols();
    let dense = count(oracle, |v| v <= 6.0 + 1e-9);
    (
        d == 1323 && dense == 1323,
        format!("analytic dim {d}, dense count {dense}"),
    )
}

fn criterion_3(s: &SubstitutionSsl) -> (bool, String) {
    let r = &s.ssl;
    let e62 = r.eigenvalues[61];
    let e64 = r.eigenvalues[63];
    let ok = r.count_one == 60 && r.count_mid == 3 && (e62 - 0.9982).abs() <= 2e-3 && (e64 - 0.0148).abs() <= 2e-3;
    (
        ok,
        format!(
            "ones {}, mid {}, #62 = {e62:.8}, #64 = {e64:.8}, mid values {:?}",
            r.count_one,
            r.count_mid,
            &r.eigenvalues[60..63]
        ),
    )
}

fn criterion_4(s: &SubstitutionSsl) -> (bool, String) {
    let r = conjecture_report(s).expect("conjecture report");
    let ok = r.count_one == 60
        && r.count_one as u64 == r.dim_k - 4
        && r.count_mid == 3
        && r.shift_rank == 1323
        && r.shift_rank as u64 == r.m as u64 * (r.dim_k - 1)
        && r.top_mid_cardinal;
    (
        ok,
        format!(
            "count_one {}, count_mid {}, shift_rank {} (sigma ratio {:.3}), cardinality ratios {:?}",
            r.count_one, r.count_mid, r.shift_rank, r.shift_conditioning, r.cardinality_ratios
        ),
    )
}

fn criterion_5() -> (bool, String) {
    let g = cube_cycle_product(N, M).expect("product graph");
    let dense = eigvalsh(&laplacian(&g)).expect("dense spectrum");
    let dense_dim = count(&dense, |v| v <= 6.0 + 1e-9);
    let pw = cartesian_pw_eigenbasis(N, M, 6.0).expect("PW basis");
    let invariance = pw.invariance_defect(&g).expect("invariance");
    let mask = SpatialMask::block(pw.ambient_dim(), 1 << N, 0).expect("mask");
    let r = ssl_eigen_top(&pw, &mask, 0, SslTolerances::default()).expect("PQ");
    let ev = &r.eigenvalues;
    let ones = count(ev, |v| (v - 1.0).abs() <= 1e-8);
    let mids = count(ev, |v| (v - 11.0 / 21.0).abs() <= 1e-8);
    let lows = count(ev, |v| (v - 1.0 / 21.0).abs() <= 1e-8);
    let zeros = count(ev, |v| v.abs() <= 1e-8);
    let ok = pw.dim() == 434
        && dense_dim == 434
        && invariance <= 1e-10
        && ones == 8
        && mids == 21
        && lows == 35
        && ones + mids + lows + zeros == ev.len();
    (
        ok,
        format!(
            "dim {} (dense {dense_dim}), invariance {invariance:.1e}; 1 x{ones}, 11/21 x{mids}, 1/21 x{lows}, 0 x{zeros}",
            pw.dim()
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let mut worst_spec = 0.0f64;
    let mut worst_gram = 0.0f64;
    for n in 1..=3u32 {
        for m in [3usize, 5, 7] {
            let b = substitution_eigenbasis(n, m).expect("analytic basis");
            let mut analytic = b.values();
            analytic.sort_by(f64::total_cmp);
            let dense = eigvalsh(&laplacian(&vertex_substitution(n, m).expect("graph"))).expect("oracle");
            let d = analytic
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            worst_spec = worst_spec.max(if analytic.len() == dense.len() {
                d
            } else {
                f64::INFINITY
            });
            worst_gram = worst_gram.max(b.vectors.orthonormality_defect());
        }
    }
    (
        worst_spec <= 1e-9 && worst_gram <= 1e-9,
        format!("max spectrum deviation {worst_spec:.1e}, max Gram defect {worst_gram:.1e}"),
    )
}

fn criterion_7() -> (bool, String) {
    let dec = cartesian_pw_basis(N, M, K).expect("decomposition");
    let targets = [1.0, 0.5 + 1.0 / 42.0, 1.0 / 21.0];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    let mut constants_ok = true;
    for (c, target) in CartesianComponent::ALL.into_iter().zip(targets) {
        constants_ok &= (dec.constant(c) - target).abs() < 1e-15;
        let basis = dec.component(c);
        for _ in 0..100 {
            let mut f = random_in_span(basis, &mut rng);
            let nf = norm(&f);
            f.iter_mut().for_each(|x| *x /= nf);
            worst = worst.max(dec.norm_identity(c, &f).expect("identity").error());
        }
    }
    (
        constants_ok && worst <= 1e-10,
        format!("dims {:?}, max identity error {worst:.1e}", dec.dims()),
    )
}

fn random_symmetric_subset<R: Rng>(g: &AbelianGroup, size_hint: usize, rng: &mut R) -> SymmetricSubset {
    let mut picked = Vec::new();
    for _ in 0..size_hint {
        let e = rng.gen_range(0..g.order());
        picked.push(e);
        picked.push(g.neg(e));
    }
    SymmetricSubset::new(g, &picked).expect("in range")
}

fn criterion_8() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut largest = 0;
    while cases < 50 {
        let factors: Vec<usize> = (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(2..=7)).collect();
        let g = AbelianGroup::new(factors).expect("group");
        if g.order() > 360 {
            continue;
        }
        let a = random_symmetric_subset(&g, rng.gen_range(1..=g.order()), &mut rng);
        let b = random_symmetric_subset(&g, rng.gen_range(1..=g.order()), &mut rng);
        let (s, sigma) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let acc = spectral_accumulation(&g, &s, &sigma).expect("accumulation");
        worst = worst.max(acc.max_deviation);
        largest = largest.max(g.order());
        cases += 1;
    }
    (
        worst <= 1e-10,
        format!("{cases} cases, largest |G| = {largest}, max deviation {worst:.1e}"),
    )
}

fn criterion_9() -> (bool, String) {
    let g = vertex_substitution(3, 5).expect("graph");
    let parts = block_partition(g.order(), 8);
    let mut ok = true;
    let mut rows = Vec::new();
    for omega in [0.0, 0.5, 1.0] {
        let r = pesenson_report(&g, &parts, &SamplingChoice::ClusterAverage, omega, None, 100, 9).expect("report");
        ok &= (r.theta - 1.0).abs() < 1e-12 && (r.lambda - 2.0).abs() < 1e-9;
        ok &= r.admissible && r.lower_bound_holds && r.trials == 100;
        rows.push(format!(
            "omega {omega}: eps {:.4}, mu {:.4}, lower {:.4}, min {:.4}",
            r.epsilon, r.mu, r.lower_constant, r.empirical_min
        ));
    }
    (ok, rows.join("; "))
}

fn eigen_quality<T: Scalar>(a: &Mat<T>) -> (f64, f64, f64) {
    let sym = SymmetricMatrix::new(a.clone()).expect("hermitian");
    let e = eigh(&sym).expect("eigh");
    let av = a.matmul(&e.vectors).expect("product");
    let mut resid = 0.0f64;
    for (j, &lam) in e.values.iter().enumerate() {
        for (x, y) in av.col(j).iter().zip(e.vectors.col(j)) {
            resid = resid.max((*x - y.scale(lam)).abs());
        }
    }
    (resid, a.norm_inf(), e.vectors.orthonormality_defect())
}

fn criterion_10() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = true;
    let mut worst_rel = 0.0f64;
    let mut worst_orth = 0.0f64;
    for n in [1usize, 2, 3, 10, 57, 128, 300, 500] {
        let real: RMat = random_hermitian(n, &mut rng);
        let cplx: CMat = random_hermitian(n, &mut rng);
        for (resid, anorm, orth) in [eigen_quality(&real), eigen_quality(&cplx)] {
            ok &= resid <= 1e-9 * (1.0 + anorm) && orth <= 1e-10;
            worst_rel = worst_rel.max(resid / (1.0 + anorm));
            worst_orth = worst_orth.max(orth);
        }
    }
    (
        ok,
        format!(
            "orders up to 500, real and complex: max residual/(1+|A|) {worst_rel:.1e}, max |V*V-I| {worst_orth:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let substitution = vertex_substitution(N, M).expect("graph");
    let oracle = eigvalsh(&laplacian(&substitution)).expect("dense spectrum");

    let mut outcomes = Vec::new();
    let c1 = run("1", || criterion_1_literal(&oracle));
    let c1_explained = !c1.pass && {
        let tags = substitution_spectrum(N, M).expect("structural spectrum");
        let values: Vec<f64> = tags.iter().map(|t| t.eigenvalue).collect();
        staircase(&values) == explained_staircase()
    };
    outcomes.push(c1);
    outcomes.push(run("1t", criterion_1_by_type));
    outcomes.push(run("2", || criterion_2(&oracle)));

    let start = Instant::now();
    let ssl = substitution_ssl(N, K, M, SslTolerances::default()).expect("block-0 PQ");
    let ssl_time = start.elapsed();
    outcomes.push(run("3", || {
        let (pass, detail) = criterion_3(&ssl);
        let within = ssl_time <= Duration::from_secs(300);
        (
            pass && within,
            format!("{detail}; PQ setup {:.1}s", ssl_time.as_secs_f64()),
        )
    }));
    outcomes.push(run("4", || criterion_4(&ssl)));
    drop(ssl);

    outcomes.push(run("5", criterion_5));
    outcomes.push(run("6", criterion_6));
    outcomes.push(run("7", criterion_7));
    outcomes.push(run("8", criterion_8));
    outcomes.push(run("9", criterion_9));
    outcomes.push(run("10", criterion_10));

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    let unexpected: Vec<&str> = failed
        .iter()
        .copied()
        .filter(|&id| !(id == "1" && c1_explained))
        .collect();
    println!(
        "\nacceptance: {} checked, {} passed, failed {:?}, unexplained failures {:?}",
        outcomes.len(),
        outcomes.len() - failed.len(),
        failed,
        unexpected
    );
    if c1_explained {
        println!("criterion 1 literal counts differ only by the constant mode at 0 and the frequency-0 Neumann-type modes sitting on 2K for even K");
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
