//! CSV and matrix file formats.
//!
//! CSV files start with `# key = value` comment lines, followed by a header
//! row and one record per line (LF endings). Reals are printed with 17
//! significant digits; absent values are empty fields.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use riemann_accel::experiments::{Fig1Output, Fig2Output, Fig3Output};
use riemann_accel::optimizer::Trajectory;
use riemann_accel::nalgebra::DMatrix;

pub const FIG1_HEADER: [&str; 5] = ["k", "t", "method", "gap", "bound"];
pub const FIG2_HEADER: [&str; 3] = ["k", "method", "gap"];
pub const FIG3_HEADER: [&str; 4] = ["h", "k", "t", "error"];
pub const TRAJECTORY_HEADER: [&str; 9] =
    ["k", "t", "value", "gap", "grad_norm", "dist_to_min", "energy", "bound", "outside_domain"];
pub const DEFECT_HEADER: [&str; 3] = ["h", "max_defect", "fitted_c"];

pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

/// A CSV table with its leading comments.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub comments: Vec<(String, String)>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), ..Table::default() }
    }

    fn comment(&mut self, key: &str, value: impl ToString) {
        self.comments.push((key.to_string(), value.to_string()));
    }

    pub fn write_to(&self, w: impl Write) -> io::Result<()> {
        let mut w = BufWriter::new(w);
        for (k, v) in &self.comments {
            writeln!(w, "# {k} = {v}")?;
        }
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(&self.header)?;
        for r in &self.rows {
            csv.write_record(r)?;
        }
        csv.flush()
    }
}

pub fn fig1_table(out: &Fig1Output, seed: u64) -> Table {
    let mut t = Table::new(&FIG1_HEADER);
    t.comment("R", real(out.r0));
    t.comment("zeta", real(out.zeta));
    t.comment("gap0", real(out.gap0));
    t.comment("seed", seed);
    t.rows = out
        .rows
        .iter()
        .map(|r| vec![r.k.to_string(), real(r.t), r.method.to_string(), real(r.gap), opt(r.bound)])
        .collect();
    t
}

pub fn fig2_table(out: &Fig2Output, seed: u64) -> Table {
    let mut t = Table::new(&FIG2_HEADER);
    t.comment("R", real(out.r0));
    t.comment("lambda_max", real(out.lambda_max));
    t.comment("m", out.matrix.nrows());
    t.comment("eta", real(out.eta));
    t.comment("h", real(out.h));
    t.comment("seed", seed);
    t.rows = out.rows.iter().map(|r| vec![r.k.to_string(), r.method.to_string(), real(r.gap)]).collect();
    t
}

/// Per-step rows followed by one `k = peak` summary row per step size.
pub fn fig3_table(out: &Fig3Output, h_ref: f64, horizon: f64, seed: u64) -> Table {
    let mut t = Table::new(&FIG3_HEADER);
    t.comment("h_ref", real(h_ref));
    t.comment("horizon", real(horizon));
    t.comment("seed", seed);
    t.rows = out.rows.iter().map(|r| vec![real(r.h), r.k.to_string(), real(r.t), real(r.error)]).collect();
    t.rows.extend(out.peaks.iter().map(|&(h, p)| vec![real(h), "peak".into(), String::new(), real(p)]));
    t
}

pub fn trajectory_table(tr: &Trajectory, method: &str, r0: Option<f64>, seed: u64) -> Table {
    let mut t = Table::new(&TRAJECTORY_HEADER);
    if let Some(r0) = r0 {
        t.comment("R", real(r0));
    }
    t.comment("method", method);
    t.comment("seed", seed);
    if let Some(d) = &tr.diagnostic {
        t.comment("diagnostic", d);
    }
    t.rows = tr
        .records
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                real(r.t),
                real(r.value),
                opt(r.gap),
                real(r.grad_norm),
                opt(r.dist_to_min),
                opt(r.energy),
                opt(r.bound),
                r.outside_domain.to_string(),
            ]
        })
        .collect();
    t
}

pub fn defect_table(sweep: &[(f64, f64, f64)]) -> Table {
    let mut t = Table::new(&DEFECT_HEADER);
    t.rows = sweep.iter().map(|&(h, d, c)| vec![real(h), real(d), real(c)]).collect();
    t
}

pub fn write_matrix(path: &Path, q: &DMatrix<f64>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", q.nrows())?;
    for i in 0..q.nrows() {
        let row: Vec<String> = (0..q.ncols()).map(|j| real(q[(i, j)])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    w.flush()
}

/// Reads a square matrix: first line `m`, then `m` lines of `m` reals.
pub fn read_matrix(path: &Path, max_size: usize) -> Result<DMatrix<f64>, String> {
    let f = File::open(path).map_err(|e| format!("cannot open matrix {}: {e}", path.display()))?;
    let mut lines = BufReader::new(f).lines();
    let first = lines
        .next()
        .ok_or("matrix file is empty")?
        .map_err(|e| e.to_string())?;
    let m: usize = first.trim().parse().map_err(|_| format!("bad matrix size line `{}`", first.trim()))?;
    if m == 0 || m > max_size {
        return Err(format!("matrix size {m} outside 1..={max_size}"));
    }
    let mut q = DMatrix::zeros(m, m);
    for i in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| format!("matrix file ends after {i} of {m} rows"))?
            .map_err(|e| e.to_string())?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| format!("row {}: bad number `{s}`", i + 1)))
            .collect::<Result<_, _>>()?;
        if vals.len() != m {
            return Err(format!("row {} has {} entries, expected {m}", i + 1, vals.len()));
        }
        for (j, v) in vals.into_iter().enumerate() {
            q[(i, j)] = v;
        }
    }
    if lines.any(|l| l.is_ok_and(|l| !l.trim().is_empty())) {
        return Err(format!("trailing data after {m} matrix rows"));
    }
    Ok(q)
}
