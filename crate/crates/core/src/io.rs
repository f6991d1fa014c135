//! Curve input files and tabular output.
//!
//! Inputs are either a curve-definition JSON object
//! (`{"param", "y", "z", "s_min", "s_max", "samples"?}`) or a sampled CSV with
//! header columns `s, x, y, z` (further columns are ignored). Errors name the
//! file and, where possible, the line.

use std::fs;
use std::path::Path;

use crate::curve::{CurveDef, CurveFile, SampledCurve};
use crate::error::IoError;
use crate::frenet::Analysis;
use crate::report::{fmt_f64, frenet_rows, FRENET_COLUMNS};
use crate::synth::{InvariantProfile, Trajectory};

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn format_err(p: &Path, message: impl Into<String>) -> IoError {
    IoError::Format { path: path_str(p), message: message.into() }
}

pub fn read_text(p: &Path) -> Result<String, IoError> {
    fs::read_to_string(p).map_err(|source| IoError::Io { path: path_str(p), source })
}

pub fn write_text(p: &Path, text: &str) -> Result<(), IoError> {
    fs::write(p, text).map_err(|source| IoError::Io { path: path_str(p), source })
}

/// Reads a curve, choosing the format by extension (`.json`, else CSV).
pub fn read_curve(p: &Path) -> Result<CurveDef, IoError> {
    let text = read_text(p)?;
    if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_curve_json(p, &text)
    } else {
        parse_sampled_csv(p, &text)
    }
}

pub fn parse_curve_json(p: &Path, text: &str) -> Result<CurveDef, IoError> {
    let file: CurveFile = serde_json::from_str(text)
        .map_err(|e| format_err(p, format!("line {}: {e}", e.line())))?;
    CurveDef::from_file(&file).map_err(|source| IoError::Curve { path: path_str(p), source })
}

pub fn parse_sampled_csv(p: &Path, text: &str) -> Result<CurveDef, IoError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| format_err(p, format!("line 1: {e}")))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format_err(p, format!("line 1: missing column `{name}` (need s, x, y, z)")))
    };
    let idx = [col("s")?, col("x")?, col("y")?, col("z")?];
    let mut cols: [Vec<f64>; 4] = Default::default();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line());
            format_err(p, format!("line {line}: {e}"))
        })?;
        let line = rec.position().map_or(0, |pos| pos.line());
        for (k, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("");
            let v: f64 = field
                .parse()
                .map_err(|_| format_err(p, format!("line {line}: `{field}` is not a number")))?;
            if !v.is_finite() {
                return Err(format_err(p, format!("line {line}: non-finite value `{field}`")));
            }
            cols[k].push(v);
        }
    }
    let [s, x, y, z] = cols;
    let curve = SampledCurve::new(s, &x, y, z).map_err(|source| IoError::Curve { path: path_str(p), source })?;
    CurveDef::sampled(curve).map_err(|source| IoError::Curve { path: path_str(p), source })
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn frenet_csv(a: &Analysis) -> String {
    csv_string(&FRENET_COLUMNS, frenet_rows(a).iter().map(|r| r.fields().to_vec()))
}

pub const TRAJECTORY_COLUMNS: [&str; 13] =
    ["s", "x", "y", "z", "kappa", "tau", "eps", "t_y", "t_z", "n_y", "n_z", "b_y", "b_z"];

/// Sampled-curve CSV of a synthesized trajectory with its frame appended.
pub fn trajectory_csv(tr: &Trajectory, profile: &InvariantProfile) -> Result<String, IoError> {
    let mut rows = Vec::with_capacity(tr.states.len());
    for st in &tr.states {
        let bad = |e: crate::error::DomainError| format_err(Path::new("<profile>"), e.to_string());
        let kappa = profile.kappa.eval(st.s).map_err(bad)?;
        let tau = profile.tau.eval(st.s).map_err(bad)?;
        let eps = if st.frame_invariants()[0] >= 0.0 { 1 } else { -1 };
        let f = fmt_f64;
        rows.push(vec![
            f(st.s),
            f(st.r.x),
            f(st.r.y),
            f(st.r.z),
            f(kappa),
            f(tau),
            eps.to_string(),
            f(st.t.y),
            f(st.t.z),
            f(st.n.y),
            f(st.n.z),
            f(st.b.y),
            f(st.b.z),
        ]);
    }
    Ok(csv_string(&TRAJECTORY_COLUMNS, rows.into_iter()))
}

/// Two-column whitespace-separated series, one point per line.
pub fn series_text(points: &[(f64, f64)]) -> String {
    points.iter().map(|(x, y)| format!("{} {}\n", fmt_f64(*x), fmt_f64(*y))).collect()
}
