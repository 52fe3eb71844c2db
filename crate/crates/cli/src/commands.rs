use std::path::Path;

use serde::Serialize;

use cubecycle::abelian::{abelian_pq_eigen, accumulation_from, mercer_defect, AbelianGroup, SubsetPair};
use cubecycle::graph::{block_partition, cube_cycle_product, vertex_substitution, Graph};
use cubecycle::linalg::RMat;
use cubecycle::sampling::{
    concentration_report, conjecture_report, cyclic_shift, frame_bounds, pesenson_report, substitution_ssl,
    FrameReport, SamplingChoice, ShiftFamily,
};
use cubecycle::spectral::{
    graph_fourier, pw_space, ssl_eigen_top, PaleyWienerSpace, SpatialMask, SslBand, SslReport, SslTolerances, PW_TOL,
};
use cubecycle::structured::{
    cartesian_dims, cartesian_pq_spectrum, cartesian_pw_basis, cartesian_pw_eigenbasis, cube_pw_dim,
    cycle_fourier_basis, substitution_pw_basis, substitution_spectrum, CartesianComponent, ModeKind,
};

use crate::config::{Family, RunConfig};
use crate::output::{Output, Table};
use crate::{row, CliError, Sampling};

pub fn tolerances(cfg: &RunConfig) -> SslTolerances {
    SslTolerances {
        one: cfg.tol,
        mid: cfg.tol,
    }
}

pub fn band_name(b: SslBand) -> &'static str {
    match b {
        SslBand::One => "one",
        SslBand::Mid => "mid",
        SslBand::Small => "small",
    }
}

/// `(type, level, nu or block)`
pub fn mode_label(kind: &ModeKind) -> (&'static str, u32, usize) {
    match *kind {
        ModeKind::Dirichlet { level, block, .. } => ("dirichlet", level, block),
        ModeKind::Neumann { level, nu } => ("neumann", level, nu),
        ModeKind::NeumannCos { level, nu } => ("neumann_cos", level, nu),
        ModeKind::NeumannSin { level, nu } => ("neumann_sin", level, nu),
    }
}

pub fn graph_for(cfg: &RunConfig) -> Result<Graph, CliError> {
    Ok(match cfg.family {
        Family::Substitution => vertex_substitution(cfg.n, cfg.m)?,
        Family::Cartesian => cube_cycle_product(cfg.n, cfg.m)?,
        Family::Custom => {
            let path = cfg.edges.as_ref().expect("validated");
            let text = std::fs::read_to_string(path).map_err(cubecycle::Error::from)?;
            Graph::read_edge_list(cfg.order.expect("validated"), &text)?
        }
        Family::Abelian => return Err(CliError::Validation("abelian groups have no graph here".into())),
    })
}

/// Sorted cube-cycle sumset `(λ, cube level, cycle mode)`.
pub fn cartesian_spectrum(n: u32, m: usize) -> Vec<(f64, u32, usize)> {
    let (cyc, _) = cycle_fourier_basis(m);
    let mut out: Vec<(f64, u32, usize)> = (0..1usize << n)
        .flat_map(|g| {
            let level = g.count_ones();
            cyc.iter()
                .enumerate()
                .map(move |(j, c)| (2.0 * level as f64 + c, level, j))
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    out
}

/// Paley-Wiener space for the configured family; analytic bases for the
/// structured families, a dense eigendecomposition otherwise.
pub fn pw_for(cfg: &RunConfig, omega: f64) -> Result<PaleyWienerSpace<f64>, CliError> {
    Ok(match cfg.family {
        Family::Substitution => substitution_pw_basis(cfg.n, cfg.m, omega)?.to_real()?.pw_space(omega)?,
        Family::Cartesian => cartesian_pw_eigenbasis(cfg.n, cfg.m, omega)?,
        _ => pw_space(&graph_fourier(&graph_for(cfg)?)?, omega, PW_TOL)?,
    })
}

pub fn mask_for(cfg: &RunConfig, ambient: usize, explicit: Option<&[usize]>) -> Result<SpatialMask, CliError> {
    match (explicit, cfg.family) {
        (Some(v), _) => Ok(SpatialMask::new(ambient, v)?),
        (None, Family::Custom) => Err(CliError::Validation("--family custom needs --mask".into())),
        (None, _) => Ok(SpatialMask::block(ambient, 1 << cfg.n, cfg.block)?),
    }
}

pub fn spectrum(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution, Family::Cartesian, Family::Custom], "spectrum")?;
    let mut t;
    match cfg.family {
        Family::Substitution => {
            t = Table::new(["index", "eigenvalue", "type", "level", "nu_or_block"]);
            for (i, tag) in substitution_spectrum(cfg.n, cfg.m)?.iter().enumerate() {
                let (kind, level, tagv) = mode_label(&tag.kind);
                t.push(row![i + 1, tag.eigenvalue, kind, level, tagv]);
            }
        }
        Family::Cartesian => {
            t = Table::new(["index", "eigenvalue", "cube_level", "cycle_mode"]);
            for (i, (v, level, j)) in cartesian_spectrum(cfg.n, cfg.m).into_iter().enumerate() {
                t.push(row![i + 1, v, level, j]);
            }
        }
        _ => {
            t = Table::new(["index", "eigenvalue"]);
            for (i, v) in graph_fourier(&graph_for(cfg)?)?.values.into_iter().enumerate() {
                t.push(row![i + 1, v]);
            }
        }
    }
    println!("{} eigenvalues", t.len());
    out.table("spectrum", &t)
}

#[derive(Serialize)]
struct PqSummary {
    omega: f64,
    dim: usize,
    mask_size: usize,
    count_one: usize,
    count_mid: usize,
    count_small: usize,
}

pub fn pq_table(r: &SslReport<f64>, limit: usize) -> Table {
    let mut t = Table::new(["index", "eigenvalue", "band"]);
    for (i, &v) in r.eigenvalues.iter().take(limit).enumerate() {
        t.push(row![i + 1, v, band_name(r.tolerances.band(v))]);
    }
    t
}

pub fn pq(cfg: &RunConfig, explicit: Option<&[usize]>, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution, Family::Cartesian, Family::Custom], "pq")?;
    let omega = cfg.bandlimit()?;
    let pw = pw_for(cfg, omega)?;
    let mask = mask_for(cfg, pw.ambient_dim(), explicit)?;
    let r = ssl_eigen_top(&pw, &mask, 0, tolerances(cfg))?;
    println!(
        "dim PW = {}, PQ eigenvalues: {} one, {} in (1/2, 1), {} at most 1/2",
        pw.dim(),
        r.count_one,
        r.count_mid,
        r.count_small
    );
    out.table("pq_eigenvalues", &pq_table(&r, usize::MAX))?;
    out.document(
        "pq_summary",
        &PqSummary {
            omega,
            dim: pw.dim(),
            mask_size: mask.len(),
            count_one: r.count_one,
            count_mid: r.count_mid,
            count_small: r.count_small,
        },
    )
}

pub fn conjecture(cfg: &RunConfig, trials: usize, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution], "conjecture")?;
    let k = cfg.interior_level()?;
    let s = substitution_ssl(cfg.n, k, cfg.m, tolerances(cfg))?;
    let r = conjecture_report(&s)?;
    println!(
        "count_one {} (expected {}), count_mid {} (expected {}), shift_rank {} (expected {}): {}",
        r.count_one,
        r.expected_one,
        r.count_mid,
        r.expected_mid,
        r.shift_rank,
        r.expected_rank,
        if r.holds { "holds" } else { "does not hold" }
    );
    let mut t = Table::new(["eigen_index", "eigenvalue", "cardinality_ratio", "vertex"]);
    for (j, (ratio, v)) in r.cardinality_ratios.iter().zip(&r.cardinality_vertices).enumerate() {
        let idx = s.ssl.count_one + j;
        t.push(row![idx + 1, s.ssl.eigenvalues[idx], *ratio, *v]);
    }
    out.document("conjecture", &r)?;
    out.table("cardinality", &t)?;
    if s.ssl.count_mid == 0 {
        println!("no eigenvalues in (1/2, 1); concentration check skipped");
        return Ok(());
    }
    let mut c = concentration_report(&s, trials, cfg.seed)?;
    println!(
        "concentration over {} trials x {} blocks: ratio range [{:.6}, {:.6}], mu_K {:.6}, {} lower failures",
        trials, cfg.m, c.min_ratio, c.max_ratio, c.mu_k, c.lower_failures
    );
    let mut st = Table::new([
        "trial",
        "block",
        "local_energy",
        "captured",
        "lower_holds",
        "upper_holds",
    ]);
    for b in &c.samples {
        st.push(row![
            b.trial,
            b.block,
            b.local_energy,
            b.captured,
            b.lower_holds,
            b.upper_holds
        ]);
    }
    c.samples.clear();
    out.document("concentration", &c)?;
    out.table("concentration_samples", &st)
}

#[derive(Serialize)]
struct FrameSummary {
    omega: f64,
    vectors: usize,
    #[serde(flatten)]
    report: FrameReport,
}

/// Every cyclic shift of every embedded PQ eigenvector above 1/2.
pub fn shift_system(r: &SslReport<f64>, family: ShiftFamily) -> Result<RMat, CliError> {
    let above = r.eigenvectors.select_columns(&r.above_half());
    let mut cols = Vec::new();
    for k0 in 0..family.blocks() {
        for v in above.columns() {
            cols.push(cyclic_shift(v, k0 as isize, family)?);
        }
    }
    Ok(RMat::from_columns(above.nrows(), &cols)?)
}

pub fn frame(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution, Family::Cartesian], "frame")?;
    let omega = cfg.bandlimit()?;
    let pw = pw_for(cfg, omega)?;
    let mask = mask_for(cfg, pw.ambient_dim(), None)?;
    let r = ssl_eigen_top(&pw, &mask, 1 << cfg.n, tolerances(cfg))?;
    let family = match cfg.family {
        Family::Substitution => ShiftFamily::Substitution { n: cfg.n, m: cfg.m },
        _ => ShiftFamily::Cartesian { n: cfg.n, m: cfg.m },
    };
    let shifts = shift_system(&r, family)?;
    let report = frame_bounds(&shifts, &pw)?;
    println!(
        "{} shifted vectors on PW of dim {}: rank {}, bounds [{:.6e}, {:.6e}]",
        shifts.ncols(),
        report.dim,
        report.rank,
        report.lower,
        report.upper
    );
    out.document(
        "frame",
        &FrameSummary {
            omega,
            vectors: shifts.ncols(),
            report,
        },
    )
}

pub fn pesenson(
    cfg: &RunConfig,
    sampling: Sampling,
    epsilon: Option<f64>,
    trials: usize,
    partition: Option<&Path>,
    out: &mut Output,
) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution, Family::Cartesian, Family::Custom], "pesenson")?;
    let omega = cfg.bandlimit()?;
    let g = graph_for(cfg)?;
    let parts: Vec<Vec<usize>> = match (partition, cfg.family) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).map_err(cubecycle::Error::from)?;
            serde_json::from_str(&text).map_err(cubecycle::Error::from)?
        }
        (None, Family::Custom) => return Err(CliError::Validation("--family custom needs --partition".into())),
        (None, _) => block_partition(g.order(), 1 << cfg.n),
    };
    let choice = match sampling {
        Sampling::Average => SamplingChoice::ClusterAverage,
        Sampling::Point => SamplingChoice::PointSample(parts.iter().map(|p| *p.iter().min().unwrap_or(&0)).collect()),
    };
    let mut r = pesenson_report(&g, &parts, &choice, omega, epsilon, trials, cfg.seed)?;
    println!(
        "Lambda {:.6}, Theta {:.6}, eps {:.6}, mu {:.6}, lower constant {:.6}, empirical min {:.6}: {}",
        r.lambda,
        r.theta,
        r.epsilon,
        r.mu,
        r.lower_constant,
        r.empirical_min,
        if r.lower_bound_holds {
            "bound holds"
        } else if r.admissible {
            "bound violated"
        } else {
            "not admissible (mu >= 1)"
        }
    );
    let mut t = Table::new(["trial", "ratio", "lower_constant"]);
    for (i, &x) in r.ratios.iter().enumerate() {
        t.push(row![i, x, r.lower_constant]);
    }
    r.ratios.clear();
    out.document("pesenson", &r)?;
    out.table("pesenson_ratios", &t)
}

#[derive(Serialize)]
struct CartesianSummary {
    dims: [usize; 3],
    constants: [f64; 3],
    pq_spectrum: Vec<(f64, u64)>,
    max_identity_error: [f64; 3],
}

pub fn cartesian(cfg: &RunConfig, trials: usize, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Cartesian], "cartesian")?;
    let k = cfg.interior_level()?;
    let dec = cartesian_pw_basis(cfg.n, cfg.m, k)?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(cfg.seed);
    let mut t = Table::new(["component", "trial", "constant", "lhs", "rhs", "error"]);
    let mut worst = [0.0f64; 3];
    for (ci, c) in CartesianComponent::ALL.into_iter().enumerate() {
        let basis = dec.component(c);
        if basis.ncols() == 0 {
            continue;
        }
        for trial in 0..trials {
            let mut f = cubecycle::linalg::random_in_span(basis, &mut rng);
            let nf = cubecycle::linalg::norm(&f);
            f.iter_mut().for_each(|x| *x /= nf);
            let id = dec.norm_identity(c, &f)?;
            worst[ci] = worst[ci].max(id.error());
            t.push(row![
                format!("{c:?}").to_lowercase(),
                trial,
                id.constant,
                id.lhs,
                id.rhs,
                id.error()
            ]);
        }
    }
    let summary = CartesianSummary {
        dims: dec.dims(),
        constants: CartesianComponent::ALL.map(|c| dec.constant(c)),
        pq_spectrum: cartesian_pq_spectrum(cfg.n, cfg.m, k)?,
        max_identity_error: worst,
    };
    println!(
        "dims {:?} (total {}), constants {:?}, max identity errors {:?}",
        summary.dims,
        summary.dims.iter().sum::<usize>(),
        summary.constants,
        worst
    );
    out.document("cartesian_summary", &summary)?;
    out.table("cartesian_identities", &t)
}

#[derive(Serialize)]
struct AbelianSummary {
    factors: Vec<usize>,
    order: usize,
    s_size: usize,
    sigma_size: usize,
    max_deviation: f64,
    mercer_defect: f64,
    eigenvalue_sum: f64,
    expected_trace: f64,
    excluded_modes: usize,
    warning: Option<String>,
}

pub fn abelian(_cfg: &RunConfig, group: &str, subsets: &Path, out: &mut Output) -> Result<(), CliError> {
    let g = AbelianGroup::parse(group)?;
    let text = std::fs::read_to_string(subsets).map_err(cubecycle::Error::from)?;
    let (s, sigma) = SubsetPair::from_json(&text)?.resolve(&g)?;
    let eig = abelian_pq_eigen(&g, &s, &sigma)?;
    if let Some(w) = &eig.warning {
        eprintln!("warning: {w}");
    }
    let acc = accumulation_from(&g, &s, &sigma, &eig)?;
    let mercer = mercer_defect(&g, &s, &sigma, &eig)?;
    let mut et = Table::new(["index", "eigenvalue"]);
    for (i, &v) in eig.values.iter().enumerate() {
        et.push(row![i + 1, v]);
    }
    let mut at = Table::new(["sigma", "element", "accumulation", "expected", "deviation"]);
    for (k, (v, e)) in acc.values.iter().zip(&acc.expected).enumerate() {
        let label = g.element(k).iter().map(|r| r.to_string()).collect::<Vec<_>>().join("x");
        at.push(row![k, label, *v, *e, (v - e).abs()]);
    }
    let summary = AbelianSummary {
        factors: g.factors().to_vec(),
        order: g.order(),
        s_size: s.len(),
        sigma_size: sigma.len(),
        max_deviation: acc.max_deviation,
        mercer_defect: mercer,
        eigenvalue_sum: acc.eigenvalue_sum,
        expected_trace: (s.len() * sigma.len()) as f64 / g.order() as f64,
        excluded_modes: acc.excluded_modes,
        warning: eig.warning.clone(),
    };
    println!(
        "|G| = {}, |S| = {}, |Sigma| = {}: max accumulation deviation {:.3e}, Mercer defect {:.3e}",
        summary.order, summary.s_size, summary.sigma_size, summary.max_deviation, summary.mercer_defect
    );
    out.table("abelian_eigenvalues", &et)?;
    out.table("accumulation", &at)?;
    out.document("abelian_summary", &summary)
}

pub fn dims(cfg: &RunConfig, out: &mut Output) -> Result<(), CliError> {
    cfg.require(&[Family::Substitution, Family::Cartesian], "dims")?;
    let target = cfg.level()?;
    match cfg.family {
        Family::Substitution => {
            let values: Vec<f64> = substitution_spectrum(cfg.n, cfg.m)?
                .iter()
                .map(|t| t.eigenvalue)
                .collect();
            let mut t = Table::new(["K", "cube_dim_K", "m_times_dim_K_minus_1", "counted"]);
            for k in 0..=cfg.n {
                let dk = cube_pw_dim(cfg.n, k as i64);
                let counted = values.iter().filter(|&&v| v <= 2.0 * k as f64 + PW_TOL).count();
                t.push(row![k, dk, cfg.m as u64 * (dk - 1), counted]);
                if k == target {
                    println!("dim PW_{}(B_{} |- C_{}) = {counted}", 2 * k, cfg.n, cfg.m);
                }
            }
            out.table("dims", &t)
        }
        _ => {
            let values = cartesian_spectrum(cfg.n, cfg.m);
            let mut t = Table::new(["K", "localized", "concentrated", "spread", "total", "counted"]);
            for k in 1..cfg.n {
                let [a, b, c] = cartesian_dims(cfg.n, cfg.m, k)?;
                let counted = values.iter().filter(|x| x.0 <= 2.0 * k as f64 + PW_TOL).count();
                t.push(row![k, a, b, c, a + b + c, counted]);
                if k == target {
                    println!(
                        "dim PW_{}(B_{} x C_{}) = {a}+{b}+{c} = {}",
                        2 * k,
                        cfg.n,
                        cfg.m,
                        a + b + c
                    );
                }
            }
            out.table("dims", &t)
        }
    }
}
