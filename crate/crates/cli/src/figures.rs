//! Plot-ready data for the spectra and eigenvector figures.
//!
//! Indices are 1-based and count PQ eigenvalues in descending order. Inside
//! a degenerate eigenvalue cluster the solver's basis is arbitrary, so a
//! selection there stands for its eigenvalue rather than for one vector;
//! each figure writes a selection document recording the multiplicities.

use serde::Serialize;

use cubecycle::sampling::substitution_ssl;
use cubecycle::spectral::{ssl_eigen_top, PaleyWienerSpace, SpatialMask, SslReport};
use cubecycle::structured::{cartesian_pw_eigenbasis, substitution_spectrum, ModeTag};

use crate::commands::{cartesian_spectrum, mode_label, pq_table, tolerances};
use crate::config::RunConfig;
use crate::output::{Output, Table};
use crate::{row, CliError, Figure};

const SPECTRUM_ROWS: usize = 620;
const PQ_ROWS: usize = 80;

#[derive(Serialize)]
struct Selection {
    index: usize,
    eigenvalue: f64,
    multiplicity: usize,
}

#[derive(Serialize)]
struct SelectionDoc {
    selections: Vec<Selection>,
    /// `max_i |φ(i + 2^N) − φ(i)|` per selection (Cartesian traces only).
    #[serde(skip_serializing_if = "Option::is_none")]
    period_defect: Option<Vec<f64>>,
}

fn selections(r: &SslReport<f64>, indices: &[usize], tol: f64) -> Result<Vec<Selection>, CliError> {
    indices
        .iter()
        .map(|&i| {
            let v = *r.eigenvalues.get(i - 1).ok_or_else(|| {
                CliError::Validation(format!(
                    "PQ has only {} eigenvalues, index {i} requested",
                    r.eigenvalues.len()
                ))
            })?;
            Ok(Selection {
                index: i,
                eigenvalue: v,
                multiplicity: r.eigenvalues.iter().filter(|&&x| (x - v).abs() <= tol).count(),
            })
        })
        .collect()
}

/// The eigenvector for 1-based index `i`, from coordinates.
fn vector(pw: &PaleyWienerSpace<f64>, r: &SslReport<f64>, i: usize) -> Result<Vec<f64>, CliError> {
    Ok(pw.basis().mul_vec(r.coordinates.col(i - 1))?)
}

fn traces(vectors: &[(usize, Vec<f64>)], len: usize) -> Table {
    let mut header = vec!["vertex".to_string()];
    for (i, _) in vectors {
        header.push(format!("ev{i}_re"));
        header.push(format!("ev{i}_im"));
    }
    let mut t = Table::new(header);
    for v in 0..len {
        let mut r = row![v];
        for (_, f) in vectors {
            r.extend(row![f[v], 0.0]);
        }
        t.push(r);
    }
    t
}

fn fourier(r: &SslReport<f64>, pw: &PaleyWienerSpace<f64>, tags: Option<&[ModeTag]>, indices: &[usize]) -> Table {
    let mut header: Vec<String> = ["coefficient", "laplacian_eigenvalue", "type", "level", "nu_or_block"]
        .map(String::from)
        .to_vec();
    header.extend(indices.iter().map(|i| format!("ev{i}")));
    let mut t = Table::new(header);
    for c in 0..pw.dim() {
        let (kind, level, tagv) = match tags {
            Some(tags) => {
                let (k, l, v) = mode_label(&tags[c].kind);
                (k.to_string(), l.to_string(), v.to_string())
            }
            None => ("product".into(), String::new(), String::new()),
        };
        let mut row = row![c, pw.eigenvalues()[c], kind, level, tagv];
        for &i in indices {
            row.extend(row![r.coordinates[(c, i - 1)]]);
        }
        t.push(row);
    }
    t
}

fn check_indices(dim: usize, indices: &[usize]) -> Result<(), CliError> {
    match indices.iter().find(|&&i| i > dim) {
        Some(i) => Err(CliError::Validation(format!(
            "figure needs PQ eigenvalue index {i} but PW has dimension {dim}"
        ))),
        None => Ok(()),
    }
}

fn plot_script(id: Figure, files: &[&str]) -> String {
    let name = format!("{id:?}").to_lowercase();
    let mut s = String::new();
    s.push_str(&format!("# Plot stub for {name}; edit freely.\n"));
    s.push_str("import csv\nimport sys\n\nimport matplotlib.pyplot as plt\n\n\n");
    s.push_str("def load(path):\n    with open(path) as fh:\n        rows = list(csv.DictReader(fh))\n");
    s.push_str("    return {k: [r[k] for r in rows] for k in rows[0]}\n\n\n");
    s.push_str("def numeric(col):\n    return [float(x) for x in col]\n\n\n");
    s.push_str(&format!("FILES = {:?}\n\n", files));
    s.push_str("fig, axes = plt.subplots(len(FILES), 1, figsize=(10, 3 * len(FILES)), squeeze=False)\n");
    s.push_str("for ax, path in zip(axes[:, 0], FILES):\n");
    s.push_str("    data = load(path)\n    keys = list(data)\n    x = numeric(data[keys[0]])\n");
    s.push_str("    for k in keys[1:]:\n        try:\n            ax.plot(x, numeric(data[k]), label=k, lw=0.8)\n");
    s.push_str("        except ValueError:\n            pass\n");
    s.push_str("    ax.set_title(path)\n    ax.legend(fontsize='small')\n");
    s.push_str(&format!(
        "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else '{name}.png')\n"
    ));
    s
}

fn cartesian_pq(cfg: &RunConfig, omega: f64) -> Result<(PaleyWienerSpace<f64>, SslReport<f64>), CliError> {
    let pw = cartesian_pw_eigenbasis(cfg.n, cfg.m, omega)?;
    let mask = SpatialMask::block(pw.ambient_dim(), 1 << cfg.n, 0)?;
    let r = ssl_eigen_top(&pw, &mask, 0, tolerances(cfg))?;
    Ok((pw, r))
}

pub fn emit(cfg: &RunConfig, id: Figure, out: &mut Output) -> Result<(), CliError> {
    let ext = match out.format() {
        crate::config::Format::Csv => "csv",
        crate::config::Format::Json => "json",
    };
    let block = 1usize << cfg.n;
    let mut files: Vec<String> = Vec::new();
    let put = |out: &mut Output, stem: &str, t: &Table, files: &mut Vec<String>| -> Result<(), CliError> {
        out.table(stem, t)?;
        files.push(format!("{stem}.{ext}"));
        Ok(())
    };
    match id {
        Figure::Fig2 => {
            let mut t = Table::new(["rank", "eigenvalue", "type"]);
            for (i, tag) in substitution_spectrum(cfg.n, cfg.m)?
                .iter()
                .take(SPECTRUM_ROWS)
                .enumerate()
            {
                t.push(row![i + 1, tag.eigenvalue, mode_label(&tag.kind).0]);
            }
            put(out, "fig2_eigenvalues", &t, &mut files)?;
        }
        Figure::Fig3 => {
            let s = substitution_ssl(cfg.n, cfg.interior_level()?, cfg.m, tolerances(cfg))?;
            put(out, "fig3_pq_eigenvalues", &pq_table(&s.ssl, PQ_ROWS), &mut files)?;
        }
        Figure::Fig4 => {
            let indices = [32, 62, 64];
            let s = substitution_ssl(cfg.n, cfg.interior_level()?, cfg.m, tolerances(cfg))?;
            check_indices(s.pw.dim(), &indices)?;
            let vecs: Vec<(usize, Vec<f64>)> = indices
                .iter()
                .map(|&i| Ok((i, vector(&s.pw, &s.ssl, i)?)))
                .collect::<Result<_, CliError>>()?;
            put(
                out,
                "fig4_traces",
                &traces(&vecs, (3 * block).min(s.pw.ambient_dim())),
                &mut files,
            )?;
            put(
                out,
                "fig4_fourier",
                &fourier(&s.ssl, &s.pw, Some(&s.tags), &indices),
                &mut files,
            )?;
            out.document(
                "fig4_selection",
                &SelectionDoc {
                    selections: selections(&s.ssl, &indices, cfg.tol)?,
                    period_defect: None,
                },
            )?;
        }
        Figure::Fig5 => {
            let indices = [61, 62, 63, 64];
            let s = substitution_ssl(cfg.n, cfg.interior_level()?, cfg.m, tolerances(cfg))?;
            check_indices(s.pw.dim(), &indices)?;
            let mut t = Table::new(["eigen_index", "vertex", "slot", "block", "value"]);
            for &i in &indices {
                let f = vector(&s.pw, &s.ssl, i)?;
                // center each group on the block holding the largest sample
                let peak = (0..f.len())
                    .max_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs()))
                    .unwrap_or(0)
                    / block;
                for v in 0..block {
                    for slot in 0..cfg.m {
                        let l = (slot + peak + cfg.m - cfg.m / 2) % cfg.m;
                        t.push(row![i, v, slot, l, f[v + l * block]]);
                    }
                }
            }
            put(out, "fig5_samples", &t, &mut files)?;
            out.document(
                "fig5_selection",
                &SelectionDoc {
                    selections: selections(&s.ssl, &indices, cfg.tol)?,
                    period_defect: None,
                },
            )?;
        }
        Figure::Fig7 => {
            let k = cfg.interior_level()?;
            let cart = cartesian_spectrum(cfg.n, cfg.m);
            let sub = substitution_spectrum(cfg.n, cfg.m)?;
            let mut t = Table::new(["rank", "cartesian", "substitution"]);
            for (i, (c, s)) in cart.iter().zip(&sub).take(SPECTRUM_ROWS).enumerate() {
                t.push(row![i + 1, c.0, s.eigenvalue]);
            }
            put(out, "fig7_eigenvalues", &t, &mut files)?;
            let (_, cr) = cartesian_pq(cfg, 2.0 * k as f64)?;
            let s = substitution_ssl(cfg.n, k, cfg.m, tolerances(cfg))?;
            let mut pt = Table::new(["rank", "cartesian", "substitution"]);
            for (i, (a, b)) in cr.eigenvalues.iter().zip(&s.ssl.eigenvalues).take(PQ_ROWS).enumerate() {
                pt.push(row![i + 1, *a, *b]);
            }
            put(out, "fig7_pq_eigenvalues", &pt, &mut files)?;
        }
        Figure::Fig8 => {
            let indices = [1, 11, 30];
            let k = cfg.interior_level()?;
            let (pw, r) = cartesian_pq(cfg, 2.0 * k as f64)?;
            check_indices(pw.dim(), &indices)?;
            let vecs: Vec<(usize, Vec<f64>)> = indices
                .iter()
                .map(|&i| Ok((i, vector(&pw, &r, i)?)))
                .collect::<Result<_, CliError>>()?;
            let period: Vec<f64> = vecs
                .iter()
                .map(|(_, f)| {
                    (0..f.len())
                        .map(|i| (f[(i + block) % f.len()] - f[i]).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            put(
                out,
                "fig8_traces",
                &traces(&vecs, (3 * block).min(pw.ambient_dim())),
                &mut files,
            )?;
            put(out, "fig8_fourier", &fourier(&r, &pw, None, &indices), &mut files)?;
            out.document(
                "fig8_selection",
                &SelectionDoc {
                    selections: selections(&r, &indices, cfg.tol)?,
                    period_defect: Some(period),
                },
            )?;
        }
    }
    let names: Vec<&str> = files.iter().map(String::as_str).collect();
    let name = format!("{id:?}").to_lowercase();
    out.text(&format!("plot_{name}.py"), &plot_script(id, &names))
}
