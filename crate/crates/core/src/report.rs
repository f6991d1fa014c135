//! Machine-readable reports.
//!
//! JSON output is deterministic: object keys are sorted, floating-point
//! numbers are printed with 17 significant digits (`{:.16e}`) and non-finite
//! values become `null`. Every document carries `"schema": 1`.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::classify::{
    best_origin, check_rectifying_statements, classify_rectifying, fit_normal_components, NormalFit, RectifyingVerdict,
    RectifyingStatements,
};
use crate::curve::CurveDef;
use crate::error::ClassifyError;
use crate::frenet::Analysis;
use crate::metric::PgVector3;

pub const SCHEMA_VERSION: u64 = 1;

/// Formats a float with 17 significant digits, the form used in every
/// report file.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Wraps a serializable body as `{"schema": 1, "kind": kind, ...body}`.
pub fn document<T: Serialize>(kind: &str, body: &T) -> Value {
    let mut map = Map::new();
    map.insert("schema".into(), Value::from(SCHEMA_VERSION));
    map.insert("kind".into(), Value::from(kind));
    match serde_json::to_value(body).expect("report types serialize") {
        Value::Object(fields) => map.extend(fields),
        other => {
            map.insert("body".into(), other);
        }
    }
    Value::Object(map)
}

/// Pretty-printed canonical JSON text ending in a newline.
pub fn to_canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_i64() || n.is_u64() {
                out.push_str(&n.to_string());
            } else {
                match n.as_f64() {
                    Some(f) if f.is_finite() => out.push_str(&fmt_f64(f)),
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(depth + 1, out);
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(&map[k.as_str()], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// Flat per-point row of the Frenet analysis; the x-components of the frame
/// (always 1, 0, 0) are omitted.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrenetRow {
    pub s: f64,
    pub kappa: f64,
    pub tau: f64,
    pub eps: i8,
    pub t_y: f64,
    pub t_z: f64,
    pub n_y: f64,
    pub n_z: f64,
    pub b_y: f64,
    pub b_z: f64,
    pub res_t: f64,
    pub res_n: f64,
    pub res_b: f64,
}

pub const FRENET_COLUMNS: [&str; 13] =
    ["s", "kappa", "tau", "eps", "t_y", "t_z", "n_y", "n_z", "b_y", "b_z", "res_t", "res_n", "res_b"];

impl FrenetRow {
    pub fn fields(&self) -> [String; 13] {
        let f = fmt_f64;
        [
            f(self.s),
            f(self.kappa),
            f(self.tau),
            self.eps.to_string(),
            f(self.t_y),
            f(self.t_z),
            f(self.n_y),
            f(self.n_z),
            f(self.b_y),
            f(self.b_z),
            f(self.res_t),
            f(self.res_n),
            f(self.res_b),
        ]
    }
}

pub fn frenet_rows(a: &Analysis) -> Vec<FrenetRow> {
    a.samples
        .iter()
        .map(|p| {
            let f = &p.frame;
            FrenetRow {
                s: f.s,
                kappa: f.kappa,
                tau: f.tau,
                eps: f.eps,
                t_y: f.t.y,
                t_z: f.t.z,
                n_y: f.n.y,
                n_z: f.n.z,
                b_y: f.b.y,
                b_z: f.b.z,
                res_t: p.residuals.t,
                res_n: p.residuals.n,
                res_b: p.residuals.b,
            }
        })
        .collect()
}

#[derive(Serialize)]
struct FrenetReportBody<'a> {
    admissibility: &'a crate::curve::AdmissibilityReport,
    max_residual: f64,
    rows: Vec<FrenetRow>,
}

pub fn frenet_report(a: &Analysis) -> Value {
    let max_residual = a.samples.iter().map(|p| p.residuals.max()).fold(0.0, f64::max);
    document("frenet", &FrenetReportBody { admissibility: &a.admissibility, max_residual, rows: frenet_rows(a) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Rectifying,
    NormalFit,
    Neither,
}

#[derive(Clone, Debug, Serialize)]
pub struct Parameters {
    pub m1: Option<f64>,
    pub n1: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub tol_adm: f64,
    pub tol_classify: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub parameters: Parameters,
    pub rectifying: RectifyingVerdict,
    /// Present when the rectifying verdict holds.
    pub statements: Option<RectifyingStatements>,
    pub normal_fit: Option<NormalFit>,
    /// Why the normal-curve fit was not attempted or failed.
    pub normal_fit_error: Option<String>,
    pub tolerances: Tolerances,
    pub origin: PgVector3,
    pub origin_searched: bool,
}

/// Runs both characterizations: rectifying first, then the normal-curve fit.
/// With `search_origin`, the isotropic part of the origin is replaced by the
/// least-squares best origin (its x-component is kept).
pub fn classify_curve(
    c: &CurveDef,
    origin: PgVector3,
    tol: f64,
    tol_adm: f64,
    search_origin: bool,
) -> Result<ClassificationReport, ClassifyError> {
    let p0 = if search_origin { best_origin(c, origin.x)? } else { origin };
    let rect = classify_rectifying(c, p0, tol)?;
    let statements = if rect.is_rectifying { Some(check_rectifying_statements(c, p0, &rect, tol)?) } else { None };
    let (normal_fit, normal_fit_error) = match fit_normal_components(c, p0) {
        Ok(f) => (Some(f), None),
        Err(e @ ClassifyError::Curve(_)) => return Err(e),
        Err(e) => (None, Some(e.to_string())),
    };
    let normal_ok = normal_fit.as_ref().is_some_and(|f| f.xi_residual <= tol && f.eta_residual <= tol);
    let verdict = if rect.is_rectifying {
        Verdict::Rectifying
    } else if normal_ok {
        Verdict::NormalFit
    } else {
        Verdict::Neither
    };
    let nf = normal_fit.as_ref();
    let parameters = Parameters {
        m1: Some(rect.m1),
        n1: Some(rect.n1),
        a: Some(rect.a),
        b: Some(rect.b_coef),
        c1: nf.map(|f| f.c1),
        c2: nf.map(|f| f.c2),
        c3: nf.map(|f| f.c3),
        c4: nf.map(|f| f.c4),
        kappa: nf.map(|f| f.kappa0),
        tau: nf.map(|f| f.tau0),
    };
    Ok(ClassificationReport {
        verdict,
        parameters,
        rectifying: rect,
        statements,
        normal_fit,
        normal_fit_error,
        tolerances: Tolerances { tol_adm, tol_classify: tol },
        origin: p0,
        origin_searched: search_origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_json_is_sorted_and_fixed_width() {
        let v = json!({"b": 0.1, "a": [1, -2.5, null], "c": {"z": true, "y": "q\"x"}, "d": []});
        let text = to_canonical_json(&v);
        let expected = "{\n  \"a\": [\n    1,\n    -2.5000000000000000e0,\n    null\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": \"q\\\"x\",\n    \"z\": true\n  },\n  \"d\": []\n}\n";
        assert_eq!(text, expected);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn documents_carry_schema() {
        #[derive(Serialize)]
        struct B {
            x: f64,
        }
        let d = document("test", &B { x: f64::NAN });
        assert_eq!(d["schema"], json!(1));
        assert_eq!(d["kind"], json!("test"));
        assert!(to_canonical_json(&d).contains("\"x\": null"));
    }

    #[test]
    fn round_trip_of_17_digits() {
        for v in [0.1f64, 1.0 / 3.0, -2.0e-300, 6.02214076e23, f64::MIN_POSITIVE, 1.0 + f64::EPSILON] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn cosh_sinh_is_neither() {
        let c = CurveDef::parse("cosh(s)", "sinh(s)", -1.0, 1.0, 101).unwrap();
        let r = classify_curve(&c, PgVector3::ZERO, 1e-6, 1e-12, false).unwrap();
        assert_eq!(r.verdict, Verdict::Neither);
        assert!(r.statements.is_none());
        // κ = τ = 1 is constant, so the normal fit runs but cannot match.
        assert!(r.normal_fit.is_some());
    }
}
