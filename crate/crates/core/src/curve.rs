//! Curves in graph form `r(s) = (s + x₀, y(s), z(s))`.
//!
//! A curve is either given exactly by two expressions (derivatives through
//! Taylor jets) or by samples (derivatives through quintic splines).

use serde::{Deserialize, Serialize};

use crate::dsl::{Expr, Jet};
use crate::error::CurveError;
use crate::metric::PgVector3;
use crate::spline::{interpolate_many, QuinticSpline, SPLINE_ORDERS};

/// Derivative orders available from either curve source: 0..=5.
pub const CURVE_ORDERS: usize = SPLINE_ORDERS;

/// Default minimum spacing between spline sites. Third derivatives of an
/// interpolating quintic carry rounding noise of order `eps/h³`, so denser
/// data is thinned to this spacing before interpolation.
pub const DEFAULT_SPLINE_SPACING: f64 = 3e-3;

#[derive(Clone, Debug)]
pub struct SampledCurve {
    s: Vec<f64>,
    x_offset: f64,
    spline_sites: usize,
    y: Vec<f64>,
    z: Vec<f64>,
    y_spline: QuinticSpline,
    z_spline: QuinticSpline,
}

impl SampledCurve {
    /// `x` must equal `s` up to a constant offset (graph form, unit speed).
    pub fn new(s: Vec<f64>, x: &[f64], y: Vec<f64>, z: Vec<f64>) -> Result<Self, CurveError> {
        Self::with_spline_spacing(s, x, y, z, DEFAULT_SPLINE_SPACING)
    }

    /// Like [`SampledCurve::new`], interpolating only a subset of the samples
    /// whose spacing is at least `min_spacing` (0 keeps every sample).
    pub fn with_spline_spacing(
        s: Vec<f64>,
        x: &[f64],
        y: Vec<f64>,
        z: Vec<f64>,
        min_spacing: f64,
    ) -> Result<Self, CurveError> {
        if x.len() != s.len() || y.len() != s.len() || z.len() != s.len() {
            return Err(CurveError::Invalid("sample columns differ in length".into()));
        }
        let offsets: Vec<f64> = x.iter().zip(&s).map(|(x, s)| x - s).collect();
        let x_offset = offsets.iter().sum::<f64>() / offsets.len().max(1) as f64;
        let scale = s.iter().chain(x).fold(1.0f64, |m, v| m.max(v.abs()));
        if let Some((i, _)) = offsets.iter().enumerate().find(|(_, o)| (**o - x_offset).abs() > 1e-9 * scale) {
            return Err(CurveError::Invalid(format!(
                "row {}: x - s is not constant, the samples are not parametrized by x (reparametrize first)",
                i + 1
            )));
        }
        let keep = thin_sites(&s, min_spacing);
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        let sites = pick(&s);
        let mut splines = interpolate_many(&sites, &[&pick(&y), &pick(&z)])?;
        let z_spline = splines.pop().expect("two splines");
        let y_spline = splines.pop().expect("two splines");
        Ok(Self { s, x_offset, spline_sites: sites.len(), y, z, y_spline, z_spline })
    }

    /// Number of samples used as interpolation sites.
    pub fn spline_sites(&self) -> usize {
        self.spline_sites
    }

    pub fn params(&self) -> &[f64] {
        &self.s
    }

    pub fn x_offset(&self) -> f64 {
        self.x_offset
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }
}

#[derive(Clone, Debug)]
pub enum CurveSource {
    Exact { y: Expr, z: Expr },
    Sampled(SampledCurve),
}

#[derive(Clone, Debug)]
pub struct CurveDef {
    pub source: CurveSource,
    pub s_min: f64,
    pub s_max: f64,
    pub samples: usize,
}

/// On-disk curve definition, `x` being the parameter itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveFile {
    #[serde(default = "default_param")]
    pub param: String,
    pub y: String,
    pub z: String,
    pub s_min: f64,
    pub s_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

fn default_param() -> String {
    "s".to_string()
}

pub const DEFAULT_SAMPLES: usize = 1000;

fn check_range(s_min: f64, s_max: f64, samples: usize) -> Result<(), CurveError> {
    if !(s_min.is_finite() && s_max.is_finite() && s_min < s_max) {
        return Err(CurveError::Invalid(format!("need s_min < s_max, got [{s_min}, {s_max}]")));
    }
    if samples < 2 {
        return Err(CurveError::Invalid(format!("need at least 2 grid samples, got {samples}")));
    }
    Ok(())
}

impl CurveDef {
    pub fn exact(y: Expr, z: Expr, s_min: f64, s_max: f64, samples: usize) -> Result<Self, CurveError> {
        check_range(s_min, s_max, samples)?;
        Ok(Self { source: CurveSource::Exact { y, z }, s_min, s_max, samples })
    }

    /// Parses both components with parameter name `s`.
    pub fn parse(y: &str, z: &str, s_min: f64, s_max: f64, samples: usize) -> Result<Self, CurveError> {
        let parse = |src: &str| Expr::parse(src, "s").map_err(|e| CurveError::Invalid(format!("`{src}`: {e}")));
        Self::exact(parse(y)?, parse(z)?, s_min, s_max, samples)
    }

    pub fn from_file(file: &CurveFile) -> Result<Self, CurveError> {
        let parse = |src: &str| {
            Expr::parse(src, &file.param).map_err(|e| CurveError::Invalid(format!("`{src}`: {e}")))
        };
        Self::exact(
            parse(&file.y)?,
            parse(&file.z)?,
            file.s_min,
            file.s_max,
            file.samples.unwrap_or(DEFAULT_SAMPLES),
        )
    }

    /// Sampled curve; the grid defaults to one point per sample.
    pub fn sampled(curve: SampledCurve) -> Result<Self, CurveError> {
        let (s_min, s_max) = (curve.s[0], curve.s[curve.s.len() - 1]);
        let samples = curve.s.len();
        check_range(s_min, s_max, samples)?;
        Ok(Self { source: CurveSource::Sampled(curve), s_min, s_max, samples })
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self, CurveError> {
        check_range(self.s_min, self.s_max, samples)?;
        self.samples = samples;
        Ok(self)
    }

    /// Restricts the analysis range (must stay within a sampled curve's data).
    pub fn with_range(mut self, s_min: f64, s_max: f64) -> Result<Self, CurveError> {
        check_range(s_min, s_max, self.samples)?;
        if let CurveSource::Sampled(c) = &self.source {
            let (lo, hi) = (c.s[0], c.s[c.s.len() - 1]);
            if s_min < lo || s_max > hi {
                return Err(CurveError::Invalid(format!("range [{s_min}, {s_max}] exceeds sampled data [{lo}, {hi}]")));
            }
        }
        self.s_min = s_min;
        self.s_max = s_max;
        Ok(self)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.source, CurveSource::Exact { .. })
    }

    /// Uniform analysis grid over `[s_min, s_max]`.
    pub fn grid(&self) -> Vec<f64> {
        linspace(self.s_min, self.s_max, self.samples)
    }

    fn check_in_range(&self, s: f64) -> Result<(), CurveError> {
        let slack = 1e-12 * (self.s_max - self.s_min).max(1.0);
        if s.is_nan() || s < self.s_min - slack || s > self.s_max + slack {
            return Err(CurveError::OutOfRange { at: s, min: self.s_min, max: self.s_max });
        }
        Ok(())
    }

    /// `x = s + x₀`; zero offset for exact curves.
    pub fn x_offset(&self) -> f64 {
        match &self.source {
            CurveSource::Exact { .. } => 0.0,
            CurveSource::Sampled(c) => c.x_offset,
        }
    }

    /// Taylor jets of `y` and `z` at `s`, `N ≤ 6` coefficients for sampled curves.
    pub fn component_jets<const N: usize>(&self, s: f64) -> Result<(Jet<N>, Jet<N>), CurveError> {
        match &self.source {
            CurveSource::Exact { y, z } => Ok((y.eval_jet::<N>(s)?, z.eval_jet::<N>(s)?)),
            CurveSource::Sampled(c) => {
                self.check_in_range(s)?;
                Ok((
                    Jet::from_derivatives(&c.y_spline.derivatives(s)),
                    Jet::from_derivatives(&c.z_spline.derivatives(s)),
                ))
            }
        }
    }

    /// Derivatives of orders 0..=3 of `(y, z)`.
    pub fn derivatives3(&self, s: f64) -> Result<([f64; 4], [f64; 4]), CurveError> {
        let (y, z) = self.component_jets::<4>(s)?;
        Ok((y.derivatives(), z.derivatives()))
    }

    pub fn position(&self, s: f64) -> Result<PgVector3, CurveError> {
        let (y, z) = self.component_jets::<1>(s)?;
        Ok(PgVector3::new(s + self.x_offset(), y.value(), z.value()))
    }
}

/// Indices of a subset with consecutive spacing ≥ `min_spacing`, always
/// keeping both endpoints and at least six sites when available.
fn thin_sites(s: &[f64], min_spacing: f64) -> Vec<usize> {
    let n = s.len();
    if n < 2 || min_spacing <= 0.0 {
        return (0..n).collect();
    }
    let span = s[n - 1] - s[0];
    let spacing = min_spacing.min(span / 5.0);
    let mut keep = vec![0];
    for i in 1..n - 1 {
        let last = s[*keep.last().expect("non-empty")];
        if s[i] - last >= spacing && s[n - 1] - s[i] >= 0.5 * spacing {
            keep.push(i);
        }
    }
    keep.push(n - 1);
    if keep.len() < 6 {
        return (0..n).collect();
    }
    keep
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `|y″² − z″²| < tol_adm`: the osculating direction is lightlike.
    Lightlike,
    /// `y″² − z″²` changes sign between two grid points.
    SignChange,
    /// A component could not be evaluated.
    Domain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub s: f64,
    pub kind: ViolationKind,
    /// `y″² − z″²` at the point (NaN when not evaluable).
    pub q: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Maximal grid run with one causal type of the osculating direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub s_start: f64,
    pub s_end: f64,
    pub points: usize,
    pub eps: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub tol_adm: f64,
    pub grid_points: usize,
    pub violations: Vec<Violation>,
    pub segments: Vec<Segment>,
}

pub const DEFAULT_TOL_ADM: f64 = 1e-12;

fn lightlike_defect(c: &CurveDef, s: f64) -> Result<f64, CurveError> {
    let (y, z) = c.derivatives3(s)?;
    Ok(y[2] * y[2] - z[2] * z[2])
}

/// Checks `y″² − z″² ≠ 0` on the grid. `ẋ = 1` holds by construction.
pub fn check_admissible(c: &CurveDef, tol_adm: f64) -> AdmissibilityReport {
    let grid = c.grid();
    let mut violations = Vec::new();
    let mut segments: Vec<Segment> = Vec::new();
    let mut open: Option<Segment> = None;
    let mut prev: Option<(f64, f64)> = None;

    let close = |open: &mut Option<Segment>, segments: &mut Vec<Segment>| {
        if let Some(seg) = open.take() {
            segments.push(seg);
        }
    };

    for &s in &grid {
        let q = match lightlike_defect(c, s) {
            Ok(q) => q,
            Err(e) => {
                violations.push(Violation { s, kind: ViolationKind::Domain, q: f64::NAN, detail: Some(e.to_string()) });
                close(&mut open, &mut segments);
                prev = None;
                continue;
            }
        };
        if q.abs() < tol_adm {
            violations.push(Violation { s, kind: ViolationKind::Lightlike, q, detail: None });
            close(&mut open, &mut segments);
            prev = None;
            continue;
        }
        let eps: i8 = if q > 0.0 { 1 } else { -1 };
        if let Some((s_prev, q_prev)) = prev {
            if (q_prev > 0.0) != (q > 0.0) {
                let at = locate_sign_change(c, s_prev, s, q_prev);
                violations.push(Violation { s: at, kind: ViolationKind::SignChange, q: 0.0, detail: None });
                close(&mut open, &mut segments);
            }
        }
        match open.as_mut() {
            Some(seg) => {
                seg.s_end = s;
                seg.points += 1;
            }
            None => open = Some(Segment { s_start: s, s_end: s, points: 1, eps }),
        }
        prev = Some((s, q));
    }
    close(&mut open, &mut segments);
    AdmissibilityReport { admissible: violations.is_empty(), tol_adm, grid_points: grid.len(), violations, segments }
}

fn locate_sign_change(c: &CurveDef, mut a: f64, mut b: f64, qa: f64) -> f64 {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        match lightlike_defect(c, m) {
            Ok(q) if (q > 0.0) == (qa > 0.0) => a = m,
            Ok(_) => b = m,
            Err(_) => break,
        }
    }
    0.5 * (a + b)
}

/// Re-expresses a curve `t ↦ (x(t), y(t), z(t))` in graph form `s = x` by
/// inverting the strictly monotone map `t ↦ x(t)`. The result is sampled on
/// `samples` uniformly spaced values of `s`.
pub fn reparametrize_graph(
    x: &Expr,
    y: &Expr,
    z: &Expr,
    t_min: f64,
    t_max: f64,
    samples: usize,
) -> Result<CurveDef, CurveError> {
    check_range(t_min, t_max, samples)?;
    let samples = samples.max(6);
    let ts = linspace(t_min, t_max, samples);
    let xdot = |t: f64| -> Result<f64, CurveError> { Ok(x.eval_jet::<2>(t)?.derivative(1)) };
    let mut speeds = Vec::with_capacity(samples);
    for &t in &ts {
        speeds.push(xdot(t)?);
    }
    let scale = speeds.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = DEFAULT_TOL_ADM * scale.max(1.0);
    let sign = speeds[0].signum();
    for (i, &v) in speeds.iter().enumerate() {
        if v.abs() <= floor || v.signum() != sign {
            return Err(CurveError::NotAdmissible { at: ts[i], reason: format!("dx/dt = {v} vanishes or changes sign") });
        }
    }
    // the grid alone can miss an isolated zero of dx/dt between nodes
    for w in ts.windows(2) {
        let (t_star, v) = golden_min(|t| xdot(t).map(|v| v * sign), w[0], w[1])?;
        if v <= floor {
            return Err(CurveError::NotAdmissible { at: t_star, reason: format!("dx/dt = {} vanishes", v * sign) });
        }
    }

    let xs: Vec<f64> = ts.iter().map(|&t| x.eval(t)).collect::<Result<_, _>>()?;
    let (s_lo, s_hi) = if sign > 0.0 { (xs[0], xs[samples - 1]) } else { (xs[samples - 1], xs[0]) };
    let s_grid = linspace(s_lo, s_hi, samples);
    let mut ys = Vec::with_capacity(samples);
    let mut zs = Vec::with_capacity(samples);
    for &s in &s_grid {
        let t = invert_monotone(x, &ts, &xs, sign, s)?;
        ys.push(y.eval(t)?);
        zs.push(z.eval(t)?);
    }
    let sampled = SampledCurve::new(s_grid.clone(), &s_grid, ys, zs)?;
    CurveDef::sampled(sampled)
}

fn golden_min<F>(f: F, mut a: f64, mut b: f64) -> Result<(f64, f64), CurveError>
where
    F: Fn(f64) -> Result<f64, CurveError>,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Safeguarded Newton iteration for `x(t) = s`, bracketed by the sample grid.
fn invert_monotone(x: &Expr, ts: &[f64], xs: &[f64], sign: f64, s: f64) -> Result<f64, CurveError> {
    let n = ts.len();
    // index of the bracketing interval in the direction of increasing x
    let key = |i: usize| xs[i] * sign;
    let target = s * sign;
    let mut lo_i = 0;
    let mut hi_i = n - 1;
    while hi_i - lo_i > 1 {
        let mid = (lo_i + hi_i) / 2;
        if key(mid) <= target {
            lo_i = mid;
        } else {
            hi_i = mid;
        }
    }
    let (mut a, mut b) = (ts[lo_i], ts[hi_i]);
    if (xs[lo_i] - s).abs() == 0.0 {
        return Ok(a);
    }
    if (xs[hi_i] - s).abs() == 0.0 {
        return Ok(b);
    }
    let tol = 1e-12 * s.abs().max(1.0);
    let mut t = a + (b - a) * (s - xs[lo_i]) / (xs[hi_i] - xs[lo_i]);
    for _ in 0..100 {
        let j = x.eval_jet::<2>(t)?;
        let f = j.value() - s;
        if f.abs() <= tol {
            return Ok(t);
        }
        if f * sign < 0.0 {
            a = t;
        } else {
            b = t;
        }
        let newton = t - f / j.derivative(1);
        t = if newton > a.min(b) && newton < a.max(b) { newton } else { 0.5 * (a + b) };
        if (b - a).abs() <= f64::EPSILON * t.abs().max(1.0) {
            return Ok(t);
        }
    }
    Ok(t)
}
