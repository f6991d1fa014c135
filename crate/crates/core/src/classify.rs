//! Position-vector decomposition in the Frenet frame and the normal /
//! rectifying characterizations.
//!
//! Components along `n` and `b` are frame coefficients from a 2×2 solve, not
//! kernel products: `pg_inner` of a non-isotropic `r` with isotropic `n` is
//! identically zero.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curve::CurveDef;
use crate::dsl::Jet3;
use crate::error::ClassifyError;
use crate::frenet::{frame_at, FrenetData};
use crate::metric::{iso_inner, pg_inner, PgVector3};
use crate::synth::{NormalClosedForm, MIN_NORMAL_TORSION};

/// Default rectifying tolerance for curves given in closed form.
pub const DEFAULT_TOL_EXACT: f64 = 1e-6;
/// Default rectifying tolerance for sampled curves.
pub const DEFAULT_TOL_SAMPLED: f64 = 1e-4;
/// Relative spread allowed in `κ`, `τ` before a normal-curve fit is refused.
pub const CONSTANCY_TOL: f64 = 1e-6;

const MIN_GRID: usize = 8;
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameComponents {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Coefficients of `d` in the basis `{t, n, b}` of `f`.
pub fn decompose(d: PgVector3, f: &FrenetData) -> Result<FrameComponents, ClassifyError> {
    let alpha = d.x;
    let w = d - alpha * f.t;
    let det = f.n.y * f.b.z - f.b.y * f.n.z;
    if !(det.abs() >= SINGULAR_TOL) {
        return Err(ClassifyError::SingularFrame(f.s));
    }
    Ok(FrameComponents {
        alpha,
        beta: (w.y * f.b.z - f.b.y * w.z) / det,
        gamma: (f.n.y * w.z - w.y * f.n.z) / det,
    })
}

pub fn frame_components(c: &CurveDef, s: f64, p0: PgVector3) -> Result<FrameComponents, ClassifyError> {
    let f = frame_at(c, s)?;
    decompose(c.position(s)? - p0, &f)
}

/// Frame, components and derived quantities at one grid point.
#[derive(Clone, Copy, Debug)]
struct GridSample {
    s: f64,
    frame: FrenetData,
    comp: FrameComponents,
    /// `|⟨r, r⟩|` expanded in the frame.
    rho2: f64,
    /// `‖βn + γb‖`.
    normal_len: f64,
}

fn sample_grid(c: &CurveDef, p0: PgVector3) -> Result<Vec<GridSample>, ClassifyError> {
    let grid = c.grid();
    if grid.len() < MIN_GRID {
        return Err(ClassifyError::DegenerateFit(format!("need at least {MIN_GRID} grid points, got {}", grid.len())));
    }
    grid.into_iter()
        .map(|s| {
            let frame = frame_at(c, s)?;
            let comp = decompose(c.position(s)? - p0, &frame)?;
            let (nn, bb, nb) = (iso_inner(&frame.n, &frame.n), iso_inner(&frame.b, &frame.b), iso_inner(&frame.n, &frame.b));
            let rho2 = (comp.alpha * comp.alpha
                + comp.beta * comp.beta * nn
                + comp.gamma * comp.gamma * bb
                + 2.0 * comp.beta * comp.gamma * nb)
                .abs();
            let rn = comp.beta * frame.n + comp.gamma * frame.b;
            Ok(GridSample { s, frame, comp, rho2, normal_len: pg_inner(&rn, &rn).abs().sqrt() })
        })
        .collect()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = v.fold((0.0, 0usize), |(a, n), x| (a + x, n + 1));
    sum / n as f64
}

fn max_dev(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = mean(v.clone());
    v.map(|x| (x - m).abs()).fold(0.0, f64::max)
}

/// Least-squares line `y ≈ a·x + b` and its max-abs residual.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let mx = mean(x.iter().copied());
    let my = mean(y.iter().copied());
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    let a = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let b = my - a * mx;
    let res = x.iter().zip(y).map(|(u, v)| (v - (a * u + b)).abs()).fold(0.0, f64::max);
    (a, b, res)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectifyingVerdict {
    pub is_rectifying: bool,
    pub m1: f64,
    pub n1: f64,
    /// Slope of the fitted line `τ/κ ≈ a·s + b_coef`.
    pub a: f64,
    pub b_coef: f64,
    pub beta_max: f64,
    pub ratio_residual: f64,
    pub rho_check: f64,
    pub gamma_spread: f64,
    /// `a·n₁`; −1 when `τ = −(s + m₁)κ/n₁`, +1 under the opposite sign.
    pub slope_times_n1: f64,
    pub tol: f64,
    pub origin: PgVector3,
    pub grid_points: usize,
}

/// Tests whether `r − p₀` stays in the rectifying plane `span{t, b}` and fits
/// `m₁`, `n₁` and the line through `τ/κ`.
pub fn classify_rectifying(c: &CurveDef, p0: PgVector3, tol: f64) -> Result<RectifyingVerdict, ClassifyError> {
    let samples = sample_grid(c, p0)?;
    let s: Vec<f64> = samples.iter().map(|g| g.s).collect();
    let ratio: Vec<f64> = samples.iter().map(|g| g.frame.tau / g.frame.kappa).collect();
    let m1 = mean(samples.iter().map(|g| g.comp.alpha - g.s));
    let n1 = mean(samples.iter().map(|g| g.comp.gamma));
    let beta_max = samples.iter().map(|g| g.comp.beta.abs()).fold(0.0, f64::max);
    let gamma_spread = max_dev(samples.iter().map(|g| g.comp.gamma));
    let (a, b_coef, ratio_residual) = line_fit(&s, &ratio);
    let rho_check = samples
        .iter()
        .map(|g| {
            let eps_b = iso_inner(&g.frame.b, &g.frame.b).signum();
            let lambda = g.s + m1;
            (g.rho2 - (lambda * lambda + eps_b * n1 * n1).abs()).abs()
        })
        .fold(0.0, f64::max);
    Ok(RectifyingVerdict {
        is_rectifying: beta_max <= tol && a.abs() > tol && n1.abs() > tol,
        m1,
        n1,
        a,
        b_coef,
        beta_max,
        ratio_residual,
        rho_check,
        gamma_spread,
        slope_times_n1: a * n1,
        tol,
        origin: p0,
        grid_points: samples.len(),
    })
}

/// Origin `(x0, p_y, p_z)` minimizing `Σ β(s)²` over the isotropic plane;
/// `β` does not depend on the origin's x-component.
pub fn best_origin(c: &CurveDef, x0: f64) -> Result<PgVector3, ClassifyError> {
    let samples = sample_grid(c, PgVector3::new(x0, 0.0, 0.0))?;
    let rows = samples.len();
    let mut m = DMatrix::<f64>::zeros(rows, 2);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, g) in samples.iter().enumerate() {
        let f = &g.frame;
        let det = f.n.y * f.b.z - f.b.y * f.n.z;
        m[(i, 0)] = f.b.z / det;
        m[(i, 1)] = -f.b.y / det;
        rhs[i] = g.comp.beta;
    }
    // A frame that barely turns leaves the origin partly undetermined; take
    // the minimum-norm solution then.
    let sol = match least_squares(m.clone(), &rhs) {
        Some(sol) => sol,
        None => m
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| ClassifyError::DegenerateFit(format!("origin search: {e}")))?,
    };
    Ok(PgVector3::new(x0, sol[0], sol[1]))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatementCheck {
    pub pass: bool,
    pub residual: f64,
}

/// The four rectifying-curve statements checked on the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RectifyingStatements {
    pub tol: f64,
    /// Sign of `⟨b, b⟩` on the grid (−1 for timelike `b`).
    pub eps_b: i8,
    /// `ρ² = |(s + m₁)² + ε n₁²|`.
    pub distance_function: StatementCheck,
    /// `α(s) = s + m₁`.
    pub tangential_component: StatementCheck,
    /// `‖r^N‖` constant and equal to `|n₁|`, `ρ` not constant.
    pub normal_component: StatementCheck,
    pub normal_length: f64,
    pub rho2_spread: f64,
    /// `γ` constant; `τ` vanishes only where `s + m₁` does.
    pub binormal_component: StatementCheck,
    pub tau_min_abs: f64,
    pub all_pass: bool,
}

pub fn check_rectifying_statements(
    c: &CurveDef,
    p0: PgVector3,
    v: &RectifyingVerdict,
    tol: f64,
) -> Result<RectifyingStatements, ClassifyError> {
    if !v.is_rectifying {
        return Err(ClassifyError::NotRectifying);
    }
    let samples = sample_grid(c, p0)?;
    let (m1, n1) = (v.m1, v.n1);
    let eps_b = iso_inner(&samples[0].frame.b, &samples[0].frame.b).signum();

    let rho_res = samples
        .iter()
        .map(|g| {
            let lambda = g.s + m1;
            (g.rho2 - (lambda * lambda + eps_b * n1 * n1).abs()).abs()
        })
        .fold(0.0, f64::max);
    let alpha_res = samples.iter().map(|g| (g.comp.alpha - (g.s + m1)).abs()).fold(0.0, f64::max);

    let normal_length = mean(samples.iter().map(|g| g.normal_len));
    let normal_res = max_dev(samples.iter().map(|g| g.normal_len)).max((normal_length - n1.abs()).abs());
    let rho2_min = samples.iter().map(|g| g.rho2).fold(f64::INFINITY, f64::min);
    let rho2_max = samples.iter().map(|g| g.rho2).fold(f64::NEG_INFINITY, f64::max);
    let rho2_spread = rho2_max - rho2_min;

    let gamma_res = max_dev(samples.iter().map(|g| g.comp.gamma));
    let tau_min_abs = samples.iter().map(|g| g.frame.tau.abs()).fold(f64::INFINITY, f64::min);
    // τ = −(s + m₁)κ/n₁ vanishes where s = −m₁; elsewhere it must not.
    let tau_ok = samples.iter().all(|g| {
        g.frame.tau.abs() > tol || (g.s + m1).abs() <= tol * (1.0 + 2.0 * n1.abs() / g.frame.kappa)
    }) && samples.iter().any(|g| g.frame.tau.abs() > tol);

    let check = |residual: f64, extra: bool| StatementCheck { pass: residual <= tol && extra, residual };
    let distance_function = check(rho_res, true);
    let tangential_component = check(alpha_res, true);
    let normal_component = check(normal_res, rho2_spread > tol && normal_length > tol);
    let binormal_component = check(gamma_res, tau_ok);
    Ok(RectifyingStatements {
        tol,
        eps_b: eps_b as i8,
        all_pass: distance_function.pass
            && tangential_component.pass
            && normal_component.pass
            && binormal_component.pass,
        distance_function,
        tangential_component,
        normal_component,
        normal_length,
        rho2_spread,
        binormal_component,
        tau_min_abs,
    })
}

/// Componentwise spread of `r − p₀ − (s + m₁)t − n₁b` over the grid.
pub fn conservation_spread(c: &CurveDef, p0: PgVector3, m1: f64, n1: f64) -> Result<[f64; 3], ClassifyError> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for s in c.grid() {
        let f = frame_at(c, s)?;
        let v = (c.position(s)? - p0 - (s + m1) * f.t - n1 * f.b).to_array();
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    Ok([hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]])
}

/// Max over `grid` of `|ξ″ + 2τη′ + τ²ξ − κ|` and `|η″ + 2τξ′ + τ²η|`.
pub fn normal_system_residual<F, G>(xi: F, eta: G, kappa: f64, tau: f64, grid: &[f64]) -> (f64, f64)
where
    F: Fn(f64) -> Jet3,
    G: Fn(f64) -> Jet3,
{
    grid.iter().fold((0.0f64, 0.0f64), |(r1, r2), &s| {
        let (x, e) = (xi(s), eta(s));
        let e1 = x.d2() + 2.0 * tau * e.d1() + tau * tau * x.v() - kappa;
        let e2 = e.d2() + 2.0 * tau * x.d1() + tau * tau * e.v();
        (r1.max(e1.abs()), r2.max(e2.abs()))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFit {
    pub kappa0: f64,
    pub tau0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub xi_residual: f64,
    pub eta_residual: f64,
    /// ODE residuals of the fitted closed form on the grid.
    pub ode_residual: (f64, f64),
}

impl NormalFit {
    pub fn closed_form(&self) -> NormalClosedForm {
        NormalClosedForm { kappa: self.kappa0, tau: self.tau0, c: [self.c1, self.c2, self.c3, self.c4] }
    }
}

/// Householder-QR least squares; `None` when `R` has a (numerically) zero
/// diagonal entry.
fn least_squares(m: DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let qr = m.qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    if !(scale > 0.0) || r.diagonal().iter().any(|d| d.abs() <= 1e-13 * scale) {
        return None;
    }
    r.solve_upper_triangular(&(qr.q().transpose() * rhs))
}

fn relative_spread(v: &[f64]) -> (f64, f64) {
    // Centred on the first sample so that a constant column averages exactly.
    let m = v[0] + mean(v.iter().map(|x| x - v[0]));
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (m, (hi - lo) / m.abs().max(f64::MIN_POSITIVE))
}

/// Fits `(c₁, c₂, c₃, c₄)` of the normal-curve closed form to measured
/// components `β(s)`, `γ(s)` given the measured (constant) `κ`, `τ`.
pub fn fit_normal_samples(
    s: &[f64],
    beta: &[f64],
    gamma: &[f64],
    kappa: &[f64],
    tau: &[f64],
) -> Result<NormalFit, ClassifyError> {
    let n = s.len();
    if n < 4 || [beta.len(), gamma.len(), kappa.len(), tau.len()].iter().any(|&l| l != n) {
        return Err(ClassifyError::DegenerateFit(format!("need ≥ 4 equally long sample columns, got {n}")));
    }
    let (k0, k_spread) = relative_spread(kappa);
    let (t0, t_spread) = relative_spread(tau);
    if !(t0.abs() >= MIN_NORMAL_TORSION) {
        return Err(ClassifyError::ZeroTorsion(t0));
    }
    if !(k_spread <= CONSTANCY_TOL && t_spread <= CONSTANCY_TOL) {
        return Err(ClassifyError::NonConstantInvariants { kappa_spread: k_spread, tau_spread: t_spread });
    }
    let shift = k0 / (t0 * t0);
    let mut m = DMatrix::<f64>::zeros(2 * n, 4);
    let mut rhs = DVector::<f64>::zeros(2 * n);
    for i in 0..n {
        let (em, ep) = ((-t0 * s[i]).exp(), (t0 * s[i]).exp());
        let row = [em, s[i] * em, ep, s[i] * ep];
        for j in 0..4 {
            m[(2 * i, j)] = row[j];
            m[(2 * i + 1, j)] = if j < 2 { row[j] } else { -row[j] };
        }
        rhs[2 * i] = beta[i] - shift;
        rhs[2 * i + 1] = gamma[i];
    }
    let mut scale = [0.0; 4];
    for j in 0..4 {
        scale[j] = m.column(j).norm();
        if scale[j] == 0.0 {
            return Err(ClassifyError::DegenerateFit("zero design column".into()));
        }
        m.column_mut(j).scale_mut(1.0 / scale[j]);
    }
    let sol = least_squares(m, &rhs).ok_or_else(|| ClassifyError::DegenerateFit("normal fit: rank-deficient design".into()))?;
    let cs = [sol[0] / scale[0], sol[1] / scale[1], sol[2] / scale[2], sol[3] / scale[3]];
    let form = NormalClosedForm { kappa: k0, tau: t0, c: cs };
    let xi_residual = s.iter().zip(beta).map(|(&u, &b)| (form.xi(u) - b).abs()).fold(0.0, f64::max);
    let eta_residual = s.iter().zip(gamma).map(|(&u, &g)| (form.eta(u) - g).abs()).fold(0.0, f64::max);
    let ode_residual = normal_system_residual(|u| form.xi_jet3(u), |u| form.eta_jet3(u), k0, t0, s);
    Ok(NormalFit {
        kappa0: k0,
        tau0: t0,
        c1: cs[0],
        c2: cs[1],
        c3: cs[2],
        c4: cs[3],
        xi_residual,
        eta_residual,
        ode_residual,
    })
}

/// Normal-curve fit of the frame components `β`, `γ` of `r − p₀` on the grid.
pub fn fit_normal_components(c: &CurveDef, p0: PgVector3) -> Result<NormalFit, ClassifyError> {
    let samples = sample_grid(c, p0)?;
    let col = |f: fn(&GridSample) -> f64| samples.iter().map(f).collect::<Vec<f64>>();
    fit_normal_samples(
        &col(|g| g.s),
        &col(|g| g.comp.beta),
        &col(|g| g.comp.gamma),
        &col(|g| g.frame.kappa),
        &col(|g| g.frame.tau),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::expr;
    use crate::synth::{synth_normal_components, synth_rectifying};

    fn curve(y: &str, z: &str, a: f64, b: f64, n: usize) -> CurveDef {
        CurveDef::parse(y, z, a, b, n).unwrap()
    }

    #[test]
    fn basis_vectors_decompose_trivially() {
        let c = curve("cosh(s)", "sinh(s)", -1.0, 1.0, 11);
        let f = frame_at(&c, 0.3).unwrap();
        let near = |u: FrameComponents, e: [f64; 3]| {
            (u.alpha - e[0]).abs() < 1e-14 && (u.beta - e[1]).abs() < 1e-14 && (u.gamma - e[2]).abs() < 1e-14
        };
        assert!(near(decompose(f.n, &f).unwrap(), [0.0, 1.0, 0.0]));
        assert!(near(decompose(2.0 * f.t + 3.0 * f.b, &f).unwrap(), [2.0, 0.0, 3.0]));
        assert_eq!(frame_components(&c, 0.0, PgVector3::ZERO).unwrap(), FrameComponents {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0
        });
    }

    #[test]
    fn reconstruction_and_origin_shift() {
        let c = curve("sin(s) + s^3/5", "s/3 + cos(2*s)/7", -1.0, 1.0, 41);
        for s in c.grid() {
            let f = frame_at(&c, s).unwrap();
            let d = c.position(s).unwrap() - PgVector3::new(0.3, -0.2, 0.5);
            let u = decompose(d, &f).unwrap();
            let back = u.alpha * f.t + u.beta * f.n + u.gamma * f.b;
            assert!((back - d).euclidean_norm() <= 1e-12);
            // (δ, 0, 0) = δt − δ(0, t_y, t_z): α shifts by −δ, β and γ by the
            // components of δ(0, t_y, t_z).
            let v = decompose(d - PgVector3::new(2.0, 0.0, 0.0), &f).unwrap();
            let w = decompose(2.0 * PgVector3::isotropic(f.t.y, f.t.z), &f).unwrap();
            assert!((v.alpha - (u.alpha - 2.0)).abs() < 1e-12);
            assert!((v.beta - (u.beta + w.beta)).abs() < 1e-12 && (v.gamma - (u.gamma + w.gamma)).abs() < 1e-12);
        }
    }

    #[test]
    fn cosh_sinh_and_parabola_are_not_rectifying() {
        let v = classify_rectifying(&curve("cosh(s)", "sinh(s)", -1.0, 1.0, 101), PgVector3::ZERO, 1e-6).unwrap();
        assert!(!v.is_rectifying);
        assert!(v.a.abs() < 1e-12 && (v.b_coef - 1.0).abs() < 1e-12);
        let v = classify_rectifying(&curve("s^2/2", "0", -1.0, 1.0, 101), PgVector3::ZERO, 1e-6).unwrap();
        assert!(!v.is_rectifying);
        assert_eq!(v.a, 0.0);
        assert!(matches!(
            check_rectifying_statements(&curve("cosh(s)", "sinh(s)", -1.0, 1.0, 11), PgVector3::ZERO, &v, 1e-5),
            Err(ClassifyError::NotRectifying)
        ));
    }

    #[test]
    fn small_grid_is_degenerate() {
        let c = curve("cosh(s)", "sinh(s)", -1.0, 1.0, 7);
        assert!(matches!(classify_rectifying(&c, PgVector3::ZERO, 1e-6), Err(ClassifyError::DegenerateFit(_))));
    }

    #[test]
    fn synthesized_rectifying_round_trip() {
        let syn = synth_rectifying(0.0, 1.0, &expr("1"), 0.0, 2.0, 1e-3).unwrap();
        let c = syn.trajectory.to_curve().unwrap();
        let v = classify_rectifying(&c, PgVector3::ZERO, 1e-6).unwrap();
        assert!(v.is_rectifying, "{v:?}");
        assert!(v.m1.abs() < 1e-6 && (v.n1 - 1.0).abs() < 1e-6);
        assert!((v.slope_times_n1 + 1.0).abs() <= 1e-6);
        assert!((v.b_coef * v.n1 + v.m1).abs() <= 1e-6);
        let rep = check_rectifying_statements(&c, PgVector3::ZERO, &v, 1e-5).unwrap();
        assert!(rep.all_pass, "{rep:?}");
        assert_eq!(rep.eps_b, -1);
        assert!((rep.normal_length - 1.0).abs() < 1e-6);

        // Moving the origin along x tilts r − p₀ out of the rectifying plane.
        let shifted = classify_rectifying(&c, PgVector3::new(5.0, 0.0, 0.0), 1e-6).unwrap();
        assert!(!shifted.is_rectifying && (shifted.m1 + 5.0).abs() < 1e-6);
        assert!(conservation_spread(&c, PgVector3::ZERO, 0.0, 1.0).unwrap().iter().all(|d| *d <= 1e-6));
    }

    #[test]
    fn origin_search_recovers_isotropic_offset() {
        let syn = synth_rectifying(0.5, -1.5, &expr("2"), -1.0, 0.5, 1e-3).unwrap();
        let c = syn.trajectory.to_curve().unwrap();
        let off = PgVector3::new(0.0, 0.7, -0.4);
        let moved = {
            let st = &syn.trajectory.states;
            let s: Vec<f64> = st.iter().map(|x| x.s).collect();
            let x: Vec<f64> = st.iter().map(|x| x.r.x).collect();
            let y: Vec<f64> = st.iter().map(|x| x.r.y + off.y).collect();
            let z: Vec<f64> = st.iter().map(|x| x.r.z + off.z).collect();
            CurveDef::sampled(crate::curve::SampledCurve::new(s, &x, y, z).unwrap()).unwrap()
        };
        assert!(!classify_rectifying(&moved, PgVector3::ZERO, 1e-6).unwrap().is_rectifying);
        let p = best_origin(&moved, 0.0).unwrap();
        assert!((p - off).max_abs() < 1e-6, "{p:?}");
        assert!(classify_rectifying(&moved, p, 1e-6).unwrap().is_rectifying);
        assert!(classify_rectifying(&c, PgVector3::ZERO, 1e-6).unwrap().is_rectifying);
        // Constant frame: only the n-direction of the origin is determined.
        let p = best_origin(&curve("s^2/2", "0", -1.0, 1.0, 21), 0.0).unwrap();
        assert!(p.is_finite() && p.z.abs() < 1e-12);
    }

    #[test]
    fn ode_residual_examples() {
        let grid = [-1.0, 0.0, 0.5, 2.0];
        let (r1, r2) = normal_system_residual(|s| Jet3::constant(0.25 + 0.0 * s), |_| Jet3::constant(0.0), 1.0, 2.0, &grid);
        assert!(r1 < 1e-15 && r2 == 0.0);
        assert_eq!(normal_system_residual(|_| Jet3::constant(0.0), |_| Jet3::constant(0.0), 1.0, 2.0, &grid), (1.0, 0.0));
        let f = NormalClosedForm::new(1.3, -0.7, [0.3, -0.2, 0.1, 0.05]).unwrap();
        let (r1, r2) = normal_system_residual(|s| f.xi_jet3(s), |s| f.eta_jet3(s), 1.3, -0.7, &grid);
        assert!(r1 <= 1e-12 && r2 <= 1e-12);
    }

    fn fit_from_closed_form(k: f64, t: f64, c: [f64; 4]) -> NormalFit {
        let s = crate::curve::linspace(-1.0, 1.0, 101);
        let v = synth_normal_components(k, t, c, &s).unwrap();
        let beta: Vec<f64> = v.iter().map(|p| p.0).collect();
        let gamma: Vec<f64> = v.iter().map(|p| p.1).collect();
        fit_normal_samples(&s, &beta, &gamma, &vec![k; s.len()], &vec![t; s.len()]).unwrap()
    }

    #[test]
    fn normal_fit_recovers_parameters() {
        let f = fit_from_closed_form(1.0, 1.0, [0.3, -0.2, 0.1, 0.05]);
        let got = [f.kappa0, f.tau0, f.c1, f.c2, f.c3, f.c4];
        let want = [1.0, 1.0, 0.3, -0.2, 0.1, 0.05];
        assert!(got.iter().zip(want).all(|(a, b)| (a - b).abs() <= 1e-8), "{got:?}");
        assert!(f.ode_residual.0 <= 1e-8 && f.ode_residual.1 <= 1e-8);
        let f = fit_from_closed_form(1.0, 2.0, [0.0; 4]);
        assert!([f.c1, f.c2, f.c3, f.c4].iter().all(|c| c.abs() <= 1e-12));
        assert!(f.xi_residual <= 1e-14);
    }

    #[test]
    fn normal_fit_preconditions() {
        let s = [0.0, 0.1, 0.2, 0.3, 0.4];
        let z = [0.0; 5];
        assert!(matches!(fit_normal_samples(&s, &z, &z, &[1.0; 5], &[1e-12; 5]), Err(ClassifyError::ZeroTorsion(_))));
        assert!(matches!(
            fit_normal_samples(&s, &z, &z, &[1.0, 1.0, 1.0, 1.0, 1.1], &[1.0; 5]),
            Err(ClassifyError::NonConstantInvariants { .. })
        ));
        assert!(matches!(
            fit_normal_components(&curve("s^2/2", "0", 0.0, 1.0, 20), PgVector3::ZERO),
            Err(ClassifyError::ZeroTorsion(_))
        ));
    }
}
