//! CSV, JSON sidecar and Matrix Market plumbing.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::eigen::EigenDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{Mat, Scalar, C64};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Scientific notation with 15 significant digits.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

/// Writes a headed CSV table.
pub struct CsvTable<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvTable<W> {
    pub fn new(out: W, header: &[&str]) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(header).map_err(csv_err)?;
        Ok(CsvTable { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(csv_err)
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("{other:?}")),
    }
}

/// `index,value` rows.
pub fn write_values_csv<W: Write>(out: W, header: [&str; 2], values: &[f64]) -> Result<()> {
    let mut t = CsvTable::new(out, &header)?;
    for (i, v) in values.iter().enumerate() {
        t.row([i.to_string(), fmt_f64(*v)])?;
    }
    t.finish()
}

/// `index,re,im` rows for one vertex vector.
pub fn write_vector_csv<W: Write, T: Scalar>(out: W, v: &[T]) -> Result<()> {
    let mut t = CsvTable::new(out, &["index", "re", "im"])?;
    for (i, x) in v.iter().enumerate() {
        t.row([i.to_string(), fmt_f64(x.re()), fmt_f64(x.im())])?;
    }
    t.finish()
}

/// Matrix as CSV, one row per matrix row. Complex entries get `re`/`im`
/// column pairs.
pub fn write_matrix_csv<W: Write, T: Scalar>(out: W, m: &Mat<T>) -> Result<()> {
    let mut header = vec!["row".to_string()];
    for j in 0..m.ncols() {
        if T::IS_COMPLEX {
            header.push(format!("c{j}_re"));
            header.push(format!("c{j}_im"));
        } else {
            header.push(format!("c{j}"));
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = CsvTable::new(out, &header_refs)?;
    for i in 0..m.nrows() {
        let mut row = vec![i.to_string()];
        for j in 0..m.ncols() {
            row.push(fmt_f64(m[(i, j)].re()));
            if T::IS_COMPLEX {
                row.push(fmt_f64(m[(i, j)].im()));
            }
        }
        t.row(row)?;
    }
    t.finish()
}

/// Eigenvalues to `<stem>_values.csv`, eigenvectors to `<stem>_vectors.csv`.
pub fn write_decomposition<T: Scalar>(
    dir: &Path,
    stem: &str,
    dec: &EigenDecomposition<T>,
) -> Result<(PathBuf, PathBuf)> {
    let vp = dir.join(format!("{stem}_values.csv"));
    let mp = dir.join(format!("{stem}_vectors.csv"));
    write_values_csv(fs::File::create(&vp)?, ["index", "eigenvalue"], &dec.values)?;
    write_matrix_csv(fs::File::create(&mp)?, &dec.vectors)?;
    Ok((vp, mp))
}

#[derive(Serialize)]
struct Sidecar<'a, C: Serialize> {
    file: &'a str,
    toolkit: &'static str,
    version: &'static str,
    config: &'a C,
}

/// Writes `<file>.json` next to `file` with the config echo and version.
pub fn write_sidecar<C: Serialize>(file: &Path, config: &C) -> Result<PathBuf> {
    let name = file
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| Error::invalid("sidecar target has no file name"))?;
    let side = file.with_file_name(format!("{name}.json"));
    let body = Sidecar {
        file: name,
        toolkit: "cubecycle",
        version: TOOLKIT_VERSION,
        config,
    };
    let mut text = serde_json::to_string_pretty(&body)?;
    text.push('\n');
    fs::write(&side, text)?;
    Ok(side)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Dense Matrix Market export (`array` format, column-major).
pub fn write_matrix_market<W: Write, T: Scalar>(mut out: W, m: &Mat<T>) -> Result<()> {
    let field = if T::IS_COMPLEX { "complex" } else { "real" };
    writeln!(out, "%%MatrixMarket matrix array {field} general")?;
    writeln!(out, "{} {}", m.nrows(), m.ncols())?;
    for x in m.as_slice() {
        if T::IS_COMPLEX {
            writeln!(out, "{} {}", fmt_f64(x.re()), fmt_f64(x.im()))?;
        } else {
            writeln!(out, "{}", fmt_f64(x.re()))?;
        }
    }
    Ok(())
}

/// Reads `array` or `coordinate` Matrix Market data (real, integer or
/// complex; general, symmetric or hermitian) into a complex matrix.
pub fn read_matrix_market<R: BufRead>(input: R) -> Result<Mat<C64>> {
    let mut lines = input.lines();
    let banner = lines
        .next()
        .ok_or_else(|| Error::Parse("empty Matrix Market input".into()))??;
    let words: Vec<String> = banner.split_whitespace().map(str::to_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::Parse(format!("bad banner: {banner}")));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        f => return Err(Error::Parse(format!("unsupported format {f}"))),
    };
    let complex = match words[3].as_str() {
        "real" | "integer" => false,
        "complex" => true,
        f => return Err(Error::Parse(format!("unsupported field {f}"))),
    };
    let symmetry = words[4].clone();
    if !matches!(symmetry.as_str(), "general" | "symmetric" | "hermitian") {
        return Err(Error::Parse(format!("unsupported symmetry {symmetry}")));
    }

    let mut body = lines.filter(|l| match l {
        Ok(s) => !s.trim().is_empty() && !s.starts_with('%'),
        Err(_) => true,
    });
    let size_line = body.next().ok_or_else(|| Error::Parse("missing size line".into()))??;
    let sizes: Vec<usize> = size_line
        .split_whitespace()
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad size line: {size_line}")))
        })
        .collect::<Result<_>>()?;
    let (rows, cols) = match sizes.as_slice() {
        [r, c, ..] => (*r, *c),
        _ => return Err(Error::Parse(format!("bad size line: {size_line}"))),
    };
    let mut m = Mat::<C64>::zeros(rows, cols);

    let parse_value = |toks: &[&str]| -> Result<C64> {
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s}")));
        match (complex, toks) {
            (false, [re]) => Ok(C64::new(num(re)?, 0.0)),
            (true, [re, im]) => Ok(C64::new(num(re)?, num(im)?)),
            _ => Err(Error::Parse(format!("bad entry {toks:?}"))),
        }
    };
    let mirror = |m: &mut Mat<C64>, i: usize, j: usize, v: C64| {
        m[(i, j)] = v;
        if i != j {
            match symmetry.as_str() {
                "symmetric" => m[(j, i)] = v,
                "hermitian" => m[(j, i)] = v.conj(),
                _ => {}
            }
        }
    };

    if coordinate {
        let nnz = *sizes
            .get(2)
            .ok_or_else(|| Error::Parse("coordinate size line needs nnz".into()))?;
        for _ in 0..nnz {
            let line = body.next().ok_or_else(|| Error::Parse("truncated entries".into()))??;
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() < 3 {
                return Err(Error::Parse(format!("bad entry line: {line}")));
            }
            let idx = |s: &str| -> Result<usize> {
                let k: usize = s.parse().map_err(|_| Error::Parse(format!("bad index {s}")))?;
                k.checked_sub(1)
                    .ok_or_else(|| Error::Parse("indices are 1-based".into()))
            };
            let (i, j) = (idx(toks[0])?, idx(toks[1])?);
            if i >= rows || j >= cols {
                return Err(Error::Parse(format!("entry ({}, {}) out of range", i + 1, j + 1)));
            }
            mirror(&mut m, i, j, parse_value(&toks[2..])?);
        }
    } else {
        let general = symmetry == "general";
        for j in 0..cols {
            let start = if general { 0 } else { j };
            for i in start..rows {
                let line = body.next().ok_or_else(|| Error::Parse("truncated entries".into()))??;
                let toks: Vec<&str> = line.split_whitespace().collect();
                mirror(&mut m, i, j, parse_value(&toks)?);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RMat;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.00000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.00000000000000e0");
        assert_eq!(fmt_f64(11.0 / 21.0).len(), "5.23809523809524e-1".len());
    }

    #[test]
    fn dense_round_trip() {
        let m = RMat::from_fn(3, 2, |i, j| (i as f64) - 0.5 * j as f64);
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &m).unwrap();
        let back = read_matrix_market(buf.as_slice()).unwrap();
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(back[(i, j)].re, m[(i, j)]);
            }
        }
        let c = m.to_complex().map(|z| z * C64::new(0.0, 1.0));
        let mut buf = Vec::new();
        write_matrix_market(&mut buf, &c).unwrap();
        let back = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(back[(2, 1)], c[(2, 1)]);
    }

    #[test]
    fn coordinate_hermitian() {
        let text = "%%MatrixMarket matrix coordinate complex hermitian\n% note\n2 2 2\n1 1 1 0\n2 1 0 1\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m[(1, 0)], C64::new(0.0, 1.0));
        assert_eq!(m[(0, 1)], C64::new(0.0, -1.0));
        assert!(read_matrix_market("%%MatrixMarket matrix coordinate pattern general\n".as_bytes()).is_err());
    }

    #[test]
    fn sidecar_contents() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("x.csv");
        fs::write(&f, "a\n").unwrap();
        let side = write_sidecar(&f, &serde_json::json!({"n": 7})).unwrap();
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(side).unwrap()).unwrap();
        assert_eq!(v["config"]["n"], 7);
        assert_eq!(v["version"], TOOLKIT_VERSION);
    }

    #[test]
    fn vector_csv_has_re_im() {
        let mut buf = Vec::new();
        write_vector_csv(&mut buf, &[C64::new(1.0, -2.0)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "index,re,im\n0,1.00000000000000e0,-2.00000000000000e0\n");
    }
}
