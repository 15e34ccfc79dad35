//! File formats: operator matrices, grid functions, trajectories and sweep
//! tables. Every writer has a reader that inverts it exactly.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use quartic_core::grid::{Grid, GridFunction};
use quartic_core::linalg::CMat;
use quartic_core::spectral::SweepRecord;
use serde_json::Value;

use crate::complex_text::{format_complex, format_f64, parse_complex, parse_f64};
use crate::error::CliError;

/// `dim n` followed by `n` rows of `n` complex entries.
pub fn write_matrix(w: &mut impl Write, m: &CMat<f64>) -> Result<(), CliError> {
    writeln!(w, "dim {}", m.nrows())?;
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix(r: impl BufRead) -> Result<CMat<f64>, CliError> {
    let mut lines = Vec::new();
    for line in r.lines() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim().to_string();
        if !body.is_empty() {
            lines.push(body);
        }
    }
    let header = lines.first().ok_or_else(|| CliError::Config("matrix file is empty".into()))?;
    let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", n] => n.parse::<usize>().map_err(|_| CliError::Config(format!("bad matrix header '{header}'")))?,
        _ => return Err(CliError::Config(format!("matrix file must start with 'dim n', got '{header}'"))),
    };
    if n == 0 {
        return Err(CliError::Config("matrix dimension must be positive".into()));
    }
    if lines.len() != n + 1 {
        return Err(CliError::Config(format!("matrix file declares {n} rows, found {}", lines.len() - 1)));
    }
    let mut m = CMat::<f64>::zeros(n, n);
    for (i, line) in lines[1..].iter().enumerate() {
        let entries: Vec<&str> = line.split_whitespace().collect();
        if entries.len() != n {
            return Err(CliError::Config(format!("matrix row {} has {} entries, expected {n}", i + 1, entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = parse_complex(e)?;
        }
    }
    Ok(m)
}

pub fn load_matrix(path: &Path) -> Result<CMat<f64>, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    read_matrix(std::io::BufReader::new(f)).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn component_header(dim: usize) -> Vec<String> {
    let mut h = vec!["x".to_string()];
    for c in 0..dim {
        h.push(format!("u{c}_re"));
        h.push(format!("u{c}_im"));
    }
    h
}

/// One row per node: `x, u0_re, u0_im, u1_re, ...`.
pub fn write_grid_function(w: impl Write, g: &GridFunction<f64>) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(component_header(g.dim()))?;
    for (j, x) in g.grid.nodes().iter().enumerate() {
        let mut row = vec![format_f64(*x)];
        for c in 0..g.dim() {
            let z = g.values[(c, j)];
            row.push(format_f64(z.re));
            row.push(format_f64(z.im));
        }
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

/// Node abscissae and values of a grid-function table.
pub fn read_grid_function(r: impl std::io::Read) -> Result<(Vec<f64>, CMat<f64>), CliError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header = rd.headers()?.clone();
    if header.len() < 3 || header.len() % 2 == 0 || &header[0] != "x" {
        return Err(CliError::Config("grid function table needs columns x, u0_re, u0_im, ...".into()));
    }
    let dim = (header.len() - 1) / 2;
    let mut xs = Vec::new();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        xs.push(parse_f64(&rec[0])?);
        let mut col = Vec::with_capacity(dim);
        for c in 0..dim {
            col.push(Complex64::new(parse_f64(&rec[1 + 2 * c])?, parse_f64(&rec[2 + 2 * c])?));
        }
        cols.push(col);
    }
    let values = CMat::<f64>::from_fn(dim, cols.len(), |c, j| cols[j][c]);
    Ok((xs, values))
}

/// Reads a table and checks it lives on `grid`.
pub fn load_grid_function(path: &Path, grid: &Arc<Grid<f64>>, dim: usize) -> Result<GridFunction<f64>, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let (xs, values) = read_grid_function(f)?;
    if values.nrows() != dim {
        return Err(CliError::Config(format!("{}: {} components, operator has {dim}", path.display(), values.nrows())));
    }
    let nodes = grid.nodes();
    let scale = (grid.b() - grid.a()).abs();
    if xs.len() != nodes.len() || xs.iter().zip(nodes).any(|(x, y)| (x - y).abs() > 1e-12 * scale) {
        return Err(CliError::Config(format!("{}: abscissae do not match the configured grid", path.display())));
    }
    Ok(GridFunction::new(grid.clone(), values)?)
}

fn trajectory_header(dim: usize, n: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for c in 0..dim {
        for j in 0..n {
            h.push(format!("u{c}_{j}_re"));
            h.push(format!("u{c}_{j}_im"));
        }
    }
    h
}

/// `# manifest {...}` line, then one row per time with the `dim x n`
/// value array flattened row-major (component-major), re/im interleaved.
pub fn write_trajectory(
    mut w: impl Write,
    manifest: &Value,
    times: &[f64],
    states: &[GridFunction<f64>],
) -> Result<(), CliError> {
    writeln!(w, "# manifest {manifest}")?;
    let (dim, n) = states.first().map(|s| (s.dim(), s.len())).unwrap_or((0, 0));
    let mut out = csv::Writer::from_writer(w);
    out.write_record(trajectory_header(dim, n))?;
    for (t, s) in times.iter().zip(states) {
        let mut row = Vec::with_capacity(1 + 2 * dim * n);
        row.push(format_f64(*t));
        for c in 0..dim {
            for j in 0..n {
                let z = s.values[(c, j)];
                row.push(format_f64(z.re));
                row.push(format_f64(z.im));
            }
        }
        out.write_record(row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub manifest: Value,
    pub times: Vec<f64>,
    /// One `dim x n` array per time.
    pub states: Vec<CMat<f64>>,
}

pub fn read_trajectory(r: impl BufRead) -> Result<TrajectoryTable, CliError> {
    let mut lines = r.lines();
    let first = lines.next().ok_or_else(|| CliError::Config("empty trajectory file".into()))??;
    let manifest_text = first
        .strip_prefix("# manifest ")
        .ok_or_else(|| CliError::Config("trajectory file must start with a manifest line".into()))?;
    let manifest: Value =
        serde_json::from_str(manifest_text).map_err(|e| CliError::Config(format!("manifest: {e}")))?;
    let dim = manifest["dim"].as_u64().ok_or_else(|| CliError::Config("manifest lacks dim".into()))? as usize;
    let n = manifest["nodes"].as_u64().ok_or_else(|| CliError::Config("manifest lacks nodes".into()))? as usize;
    let rest: Vec<String> = lines.collect::<Result<_, _>>()?;
    let body = rest.join("\n");
    let mut rd = csv::Reader::from_reader(body.as_bytes());
    if rd.headers()?.len() != 1 + 2 * dim * n {
        return Err(CliError::Config("trajectory header does not match the manifest".into()));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        times.push(parse_f64(&rec[0])?);
        let mut m = CMat::<f64>::zeros(dim, n);
        for c in 0..dim {
            for j in 0..n {
                let k = 1 + 2 * (c * n + j);
                m[(c, j)] = Complex64::new(parse_f64(&rec[k])?, parse_f64(&rec[k + 1])?);
            }
        }
        states.push(m);
    }
    Ok(TrajectoryTable { manifest, times, states })
}

pub const SWEEP_COLUMNS: [&str; 5] = ["lambda_re", "lambda_im", "resolvent_norm", "ratio", "frame_ok"];

/// One sweep table row in fixed column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub lambda: Complex64,
    /// `NaN` where the evaluation failed.
    pub resolvent_norm: f64,
    pub ratio: f64,
    pub frame_ok: bool,
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        SweepRow {
            lambda: Complex64::new(r.lambda.0, r.lambda.1),
            resolvent_norm: r.norm.unwrap_or(f64::NAN),
            ratio: r.ratio.unwrap_or(f64::NAN),
            frame_ok: r.frame_ok,
        }
    }
}

pub fn write_sweep(w: impl Write, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        out.write_record([
            format_f64(r.lambda.re),
            format_f64(r.lambda.im),
            format_f64(r.resolvent_norm),
            format_f64(r.ratio),
            r.frame_ok.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn parse_cell(s: &str) -> Result<f64, CliError> {
    if s == "NaN" {
        Ok(f64::NAN)
    } else {
        parse_f64(s)
    }
}

pub fn read_sweep(r: impl std::io::Read) -> Result<Vec<SweepRow>, CliError> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().ne(SWEEP_COLUMNS) {
        return Err(CliError::Config("sweep table columns differ from lambda_re,lambda_im,resolvent_norm,ratio,frame_ok".into()));
    }
    rd.records()
        .map(|rec| {
            let rec = rec?;
            let frame_ok = match &rec[4] {
                "true" => true,
                "false" => false,
                other => return Err(CliError::Config(format!("frame_ok must be true/false, got '{other}'"))),
            };
            Ok(SweepRow {
                lambda: Complex64::new(parse_f64(&rec[0])?, parse_f64(&rec[1])?),
                resolvent_norm: parse_cell(&rec[2])?,
                ratio: parse_cell(&rec[3])?,
                frame_ok,
            })
        })
        .collect()
}
