//! Report and record serialization: CSV (plot-ready) and JSON.
//!
//! Output is bytewise deterministic for a fixed input: floats use Rust's
//! shortest round-trip formatting and row order is fixed by the drivers.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use cohest::harness::ReportRow;
use cohest::measurement::ExpectationRecord;
use cohest::states::DiagonalDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn writer_for(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    match out {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p.as_os_str() == "-" => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(std::fs::File::create(p)?)),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

#[derive(Serialize)]
struct JsonRow<'a> {
    family: String,
    n: usize,
    eta: Option<f64>,
    measure: &'a str,
    exact: Option<f64>,
    lower: f64,
    ratio: Option<f64>,
    subset: &'a str,
    w: f64,
    shots: u64,
    seed: u64,
}

pub fn write_rows(rows: &[ReportRow], out: Option<&Path>, format: Format) -> io::Result<()> {
    let mut w = writer_for(out)?;
    match format {
        Format::Csv => {
            writeln!(w, "family,n,eta,measure,exact,lower,ratio,subset,w,shots,seed")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    r.family,
                    r.n,
                    opt(r.eta),
                    r.measure,
                    opt(r.exact),
                    r.lower,
                    opt(r.ratio),
                    r.subset,
                    r.w,
                    r.shots,
                    r.seed
                )?;
            }
        }
        Format::Json => {
            let json_rows: Vec<JsonRow> = rows
                .iter()
                .map(|r| JsonRow {
                    family: r.family.to_string(),
                    n: r.n,
                    eta: r.eta,
                    measure: &r.measure,
                    exact: r.exact,
                    lower: r.lower,
                    ratio: r.ratio,
                    subset: &r.subset,
                    w: r.w,
                    shots: r.shots,
                    seed: r.seed,
                })
                .collect();
            serde_json::to_writer_pretty(&mut w, &json_rows)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

pub fn write_records(records: &[ExpectationRecord], out: Option<&Path>) -> io::Result<()> {
    let mut w = writer_for(out)?;
    writeln!(w, "operator,mean,sigma,shots")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.operator, r.mean, r.sigma, r.shots)?;
    }
    w.flush()
}

pub fn write_diagonal(diag: &DiagonalDistribution, path: &Path) -> io::Result<()> {
    let mut w = writer_for(Some(path))?;
    writeln!(w, "index,probability")?;
    for (i, p) in diag.probs().iter().enumerate() {
        writeln!(w, "{i},{p}")?;
    }
    w.flush()
}

#[derive(Debug)]
pub enum DiagError {
    Io(String),
    Parse(String),
}

/// Read a measured diagonal: one `index,probability` row per basis state,
/// indices covering `0..d` exactly once. The vector is renormalized (the
/// sum must already be within 1e-6 of one).
pub fn read_diagonal(path: &Path, d: usize) -> Result<DiagonalDistribution, DiagError> {
    let text = std::fs::read_to_string(path).map_err(|e| DiagError::Io(e.to_string()))?;
    let mut probs = vec![f64::NAN; d];
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim().eq_ignore_ascii_case("index,probability") => {}
        _ => {
            return Err(DiagError::Parse(
                "diagonal file must start with 'index,probability'".into(),
            ))
        }
    }
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| DiagError::Parse(format!("line {}: {m}", idx + 1));
        let (i_raw, p_raw) = line
            .split_once(',')
            .ok_or_else(|| err("expected index,probability".into()))?;
        let i: usize = i_raw
            .trim()
            .parse()
            .map_err(|_| err(format!("bad index '{i_raw}'")))?;
        let p: f64 = p_raw
            .trim()
            .parse()
            .map_err(|_| err(format!("bad probability '{p_raw}'")))?;
        if i >= d {
            return Err(err(format!("index {i} outside 0..{d}")));
        }
        if !probs[i].is_nan() {
            return Err(err(format!("duplicate index {i}")));
        }
        if p < -1e-9 {
            return Err(err(format!("negative probability {p}")));
        }
        probs[i] = p.max(0.0);
    }
    if let Some(missing) = probs.iter().position(|p| p.is_nan()) {
        return Err(DiagError::Parse(format!("missing index {missing}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(DiagError::Parse(format!(
            "probabilities sum to {sum}, expected 1 within 1e-6"
        )));
    }
    let normalized: Vec<f64> = probs.iter().map(|p| p / sum).collect();
    DiagonalDistribution::new(normalized).map_err(|e| DiagError::Parse(e.to_string()))
}
