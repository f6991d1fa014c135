//! The pseudo-Galilean Frenet trihedron `{t, n, b}`, curvature and torsion.
//!
//! With `r(s) = (s, y(s), z(s))`:
//!
//! ```text
//! t = (1, y′, z′)
//! κ = √|y″² − z″²|,   ε = sign(y″² − z″²)
//! n = (0, y″, z″) / κ
//! b = (0, ε z″, ε y″) / κ          so that det(t, n, b) = 1
//! τ = (y″ z‴ − y‴ z″) / κ²
//! ```

use serde::{Deserialize, Serialize};

use crate::curve::{check_admissible, AdmissibilityReport, CurveDef, DEFAULT_TOL_ADM};
use crate::dsl::Jet;
use crate::error::CurveError;
use crate::metric::{det3, PgVector3};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetData {
    pub s: f64,
    pub t: PgVector3,
    pub n: PgVector3,
    pub b: PgVector3,
    pub eps: i8,
    pub kappa: f64,
    pub tau: f64,
}

impl FrenetData {
    /// Builds the frame from `y′, y″, y‴` and `z′, z″, z‴`.
    pub fn from_derivatives(s: f64, y: [f64; 3], z: [f64; 3], tol_adm: f64) -> Result<Self, CurveError> {
        let [y1, y2, y3] = y;
        let [z1, z2, z3] = z;
        let q = y2 * y2 - z2 * z2;
        if !q.is_finite() || q.abs() < tol_adm {
            return Err(CurveError::NotAdmissible {
                at: s,
                reason: format!("y''^2 - z''^2 = {q:e} (lightlike osculating direction)"),
            });
        }
        let eps: i8 = if q > 0.0 { 1 } else { -1 };
        let e = f64::from(eps);
        let kappa = (e * q).sqrt();
        Ok(FrenetData {
            s,
            t: PgVector3::new(1.0, y1, z1),
            n: PgVector3::isotropic(y2 / kappa, z2 / kappa),
            b: PgVector3::isotropic(e * z2 / kappa, e * y2 / kappa),
            eps,
            kappa,
            tau: (y2 * z3 - y3 * z2) / (kappa * kappa),
        })
    }

    pub fn det(&self) -> f64 {
        det3(&self.t, &self.n, &self.b)
    }
}

pub fn frame_at(c: &CurveDef, s: f64) -> Result<FrenetData, CurveError> {
    frame_at_tol(c, s, DEFAULT_TOL_ADM)
}

pub fn frame_at_tol(c: &CurveDef, s: f64, tol_adm: f64) -> Result<FrenetData, CurveError> {
    let (y, z) = c.derivatives3(s)?;
    FrenetData::from_derivatives(s, [y[1], y[2], y[3]], [z[1], z[2], z[3]], tol_adm)
}

/// Torsion through `det(r′, r″, r‴) / κ²`, computed without the frame.
pub fn torsion_det(c: &CurveDef, s: f64) -> Result<f64, CurveError> {
    let (y, z) = c.derivatives3(s)?;
    let k2 = (y[2] * y[2] - z[2] * z[2]).abs();
    if !k2.is_finite() || k2 < DEFAULT_TOL_ADM {
        return Err(CurveError::NotAdmissible { at: s, reason: format!("|y''^2 - z''^2| = {k2:e}") });
    }
    let r1 = PgVector3::new(1.0, y[1], z[1]);
    let r2 = PgVector3::new(0.0, y[2], z[2]);
    let r3 = PgVector3::new(0.0, y[3], z[3]);
    Ok(det3(&r1, &r2, &r3) / k2)
}

/// Euclidean norms of `t′ − κn`, `n′ − τb`, `b′ − τn`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrenetResiduals {
    pub t: f64,
    pub n: f64,
    pub b: f64,
}

impl FrenetResiduals {
    pub fn max(&self) -> f64 {
        self.t.max(self.n).max(self.b)
    }
}

/// The frame formulas evaluated on jets of the curve components, so that the
/// frame vectors come out as jets and their derivatives are exact.
struct FrameJet<const N: usize> {
    t_y: Jet<N>,
    t_z: Jet<N>,
    n_y: Jet<N>,
    n_z: Jet<N>,
    b_y: Jet<N>,
    b_z: Jet<N>,
    kappa: Jet<N>,
    tau: Jet<N>,
}

fn frame_jet<const N: usize>(s: f64, y1: Jet<N>, z1: Jet<N>, tol_adm: f64) -> Result<FrameJet<N>, CurveError> {
    let y2 = y1.differentiate();
    let z2 = z1.differentiate();
    let y3 = y2.differentiate();
    let z3 = z2.differentiate();
    let q = y2 * y2 - z2 * z2;
    if !q.value().is_finite() || q.value().abs() < tol_adm {
        return Err(CurveError::NotAdmissible { at: s, reason: format!("y''^2 - z''^2 = {:e}", q.value()) });
    }
    let e = q.value().signum();
    let not_adm = || CurveError::NotAdmissible { at: s, reason: "curvature jet is singular".into() };
    let kappa = q.scale(e).checked_sqrt().ok_or_else(not_adm)?;
    let inv_kappa = kappa.recip().ok_or_else(not_adm)?;
    let tau = (y2 * z3 - y3 * z2) * inv_kappa * inv_kappa;
    Ok(FrameJet {
        t_y: y1,
        t_z: z1,
        n_y: y2 * inv_kappa,
        n_z: z2 * inv_kappa,
        b_y: z2 * inv_kappa.scale(e),
        b_z: y2 * inv_kappa.scale(e),
        kappa,
        tau,
    })
}

/// Residuals of the Frenet derivative formulas at `s`.
///
/// The frame derivatives come from differentiating the closed-form frame
/// (jets of `y′` and `z′` carrying derivatives up to order five), not from the
/// derivative formulas themselves.
pub fn frenet_residuals(c: &CurveDef, s: f64) -> Result<FrenetResiduals, CurveError> {
    let (y, z) = c.component_jets::<6>(s)?;
    let fj = frame_jet(s, y.differentiate(), z.differentiate(), DEFAULT_TOL_ADM)?;
    let d = |j: &Jet<6>| j.derivative(1);
    let v = |j: &Jet<6>| j.value();
    let (kappa, tau) = (v(&fj.kappa), v(&fj.tau));
    let norm = |a: f64, b: f64| a.hypot(b);
    Ok(FrenetResiduals {
        t: norm(d(&fj.t_y) - kappa * v(&fj.n_y), d(&fj.t_z) - kappa * v(&fj.n_z)),
        n: norm(d(&fj.n_y) - tau * v(&fj.b_y), d(&fj.n_z) - tau * v(&fj.b_z)),
        b: norm(d(&fj.b_y) - tau * v(&fj.n_y), d(&fj.b_z) - tau * v(&fj.n_z)),
    })
}

/// One analysed grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetSample {
    pub frame: FrenetData,
    pub residuals: FrenetResiduals,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Analysis {
    pub admissibility: AdmissibilityReport,
    /// Frames at every admissible grid point, in grid order.
    pub samples: Vec<FrenetSample>,
}

/// Frames and residuals over the grid, evaluated on `threads` workers
/// (results are identical for any thread count).
pub fn analyze(c: &CurveDef, tol_adm: f64, threads: usize) -> Analysis {
    let admissibility = check_admissible(c, tol_adm);
    let grid = c.grid();
    let eval = |s: f64| -> Option<FrenetSample> {
        let frame = frame_at_tol(c, s, tol_adm).ok()?;
        let residuals = frenet_residuals(c, s).ok()?;
        Some(FrenetSample { frame, residuals })
    };
    let slots = par_map(&grid, threads, eval);
    Analysis { admissibility, samples: slots.into_iter().flatten().collect() }
}

/// Maps `f` over `items` on up to `threads` scoped threads, writing each
/// result into its own slot.
pub fn par_map<T, R, F>(items: &[T], threads: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(T) -> R + Sync,
    T: Copy,
{
    let threads = threads.max(1).min(items.len().max(1));
    if threads == 1 {
        return items.iter().map(|&x| f(x)).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|part| {
                let f = &f;
                scope.spawn(move || part.iter().map(|&x| f(x)).collect::<Vec<R>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
