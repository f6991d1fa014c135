//! Curves from prescribed curvature and torsion.
//!
//! The Frenet system `t′ = κn, n′ = τb, b′ = τn` together with `r′ = t` is
//! integrated with the classical fixed-step fourth-order Runge–Kutta scheme.
//! `t.x ≡ 1` and `n.x = b.x ≡ 0`, so the state carries `r` (3), the isotropic
//! parts of `t`, `n`, `b` (2 each).

use serde::{Deserialize, Serialize};

use crate::curve::{CurveDef, SampledCurve};
use crate::dsl::{BinOp, Expr, Jet, Jet3, Node};
use crate::error::{CurveError, SynthError};
use crate::metric::{det3, iso_inner, PgVector3};

pub const DEFAULT_STEP: f64 = 1e-3;

/// Tolerance on the initial frame's orthonormality and orientation.
const INIT_FRAME_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetState {
    pub s: f64,
    pub r: PgVector3,
    /// Always `(1, t_y, t_z)`.
    pub t: PgVector3,
    pub n: PgVector3,
    pub b: PgVector3,
}

impl FrenetState {
    /// `t = (1,0,0)`, `n = (0,1,0)`, `b = (0,0,1)` at position `r`.
    pub fn canonical(s: f64, r: PgVector3) -> Self {
        Self {
            s,
            r,
            t: PgVector3::new(1.0, 0.0, 0.0),
            n: PgVector3::isotropic(1.0, 0.0),
            b: PgVector3::isotropic(0.0, 1.0),
        }
    }

    fn pack(&self) -> [f64; 9] {
        [self.r.x, self.r.y, self.r.z, self.t.y, self.t.z, self.n.y, self.n.z, self.b.y, self.b.z]
    }

    fn unpack(s: f64, u: &[f64; 9]) -> Self {
        Self {
            s,
            r: PgVector3::new(u[0], u[1], u[2]),
            t: PgVector3::new(1.0, u[3], u[4]),
            n: PgVector3::isotropic(u[5], u[6]),
            b: PgVector3::isotropic(u[7], u[8]),
        }
    }

    /// `(n·n, b·b, n·b)` in the isotropic plane; constants of motion.
    pub fn frame_invariants(&self) -> [f64; 3] {
        [iso_inner(&self.n, &self.n), iso_inner(&self.b, &self.b), iso_inner(&self.n, &self.b)]
    }

    pub fn det(&self) -> f64 {
        det3(&self.t, &self.n, &self.b)
    }

    fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::BadInitialFrame(m));
        if !(self.r.is_finite() && self.t.is_finite() && self.n.is_finite() && self.b.is_finite()) {
            return bad("non-finite component".into());
        }
        if self.t.x != 1.0 || self.n.x != 0.0 || self.b.x != 0.0 {
            return bad("need t.x = 1 and n.x = b.x = 0".into());
        }
        let [nn, bb, nb] = self.frame_invariants();
        let eps = nn.signum();
        if (nn - eps).abs() > INIT_FRAME_TOL || (bb + eps).abs() > INIT_FRAME_TOL || nb.abs() > INIT_FRAME_TOL {
            return bad(format!("n·n = {nn}, b·b = {bb}, n·b = {nb}"));
        }
        let d = self.det();
        if (d - 1.0).abs() > INIT_FRAME_TOL {
            return bad(format!("det(t, n, b) = {d}"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct InvariantProfile {
    pub kappa: Expr,
    pub tau: Expr,
    pub s_min: f64,
    pub s_max: f64,
}

impl InvariantProfile {
    pub fn new(kappa: Expr, tau: Expr, s_min: f64, s_max: f64) -> Result<Self, SynthError> {
        if !(s_min.is_finite() && s_max.is_finite() && s_min < s_max) {
            return Err(SynthError::InvalidProfile(format!("need s_min < s_max, got [{s_min}, {s_max}]")));
        }
        Ok(Self { kappa, tau, s_min, s_max })
    }

    fn eval(&self, s: f64) -> Result<(f64, f64), SynthError> {
        let k = self.kappa.eval(s)?;
        if !(k > 0.0) {
            return Err(SynthError::InvalidProfile(format!("kappa({s}) = {k} is not positive")));
        }
        Ok((k, self.tau.eval(s)?))
    }
}

/// States at every step, starting at `s_min` and ending exactly at `s_max`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<FrenetState>,
}

impl Trajectory {
    pub fn last(&self) -> &FrenetState {
        self.states.last().expect("trajectory is never empty")
    }

    /// Largest drift of `n·n`, `b·b`, `n·b` from their initial values.
    pub fn invariant_drift(&self) -> [f64; 3] {
        let init = self.states[0].frame_invariants();
        let mut drift = [0.0f64; 3];
        for st in &self.states {
            let v = st.frame_invariants();
            for k in 0..3 {
                drift[k] = drift[k].max((v[k] - init[k]).abs());
            }
        }
        drift
    }

    pub fn det_drift(&self) -> f64 {
        self.states.iter().map(|st| (st.det() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Sampled curve through the positions, parametrized by `s`.
    pub fn to_curve(&self) -> Result<CurveDef, CurveError> {
        let s: Vec<f64> = self.states.iter().map(|st| st.s).collect();
        let x: Vec<f64> = self.states.iter().map(|st| st.r.x).collect();
        let y: Vec<f64> = self.states.iter().map(|st| st.r.y).collect();
        let z: Vec<f64> = self.states.iter().map(|st| st.r.z).collect();
        CurveDef::sampled(SampledCurve::new(s, &x, y, z)?)
    }
}

fn rhs(k: f64, tau: f64, u: &[f64; 9]) -> [f64; 9] {
    [1.0, u[3], u[4], k * u[5], k * u[6], tau * u[7], tau * u[8], tau * u[5], tau * u[6]]
}

fn axpy(u: &[f64; 9], h: f64, d: &[f64; 9]) -> [f64; 9] {
    let mut out = *u;
    for i in 0..9 {
        out[i] += h * d[i];
    }
    out
}

/// Integrates from `init` (placed at `s_min`) over the profile's range with a
/// fixed step no larger than `step`; the step is shrunk so that an integer
/// number of steps lands exactly on `s_max`. No re-orthonormalization.
pub fn integrate_frenet(p: &InvariantProfile, init: &FrenetState, step: f64) -> Result<Trajectory, SynthError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(SynthError::InvalidProfile(format!("step must be positive, got {step}")));
    }
    init.validate()?;
    let length = p.s_max - p.s_min;
    let n_steps = ((length / step) - 1e-9).ceil().max(1.0) as usize;
    let h = length / n_steps as f64;
    let s_at = |i: usize| if i == n_steps { p.s_max } else { p.s_min + h * i as f64 };

    let mut u = init.pack();
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(FrenetState::unpack(p.s_min, &u));
    let (mut k0, mut t0) = p.eval(p.s_min)?;
    for i in 0..n_steps {
        let s = s_at(i);
        let (km, tm) = p.eval(s + 0.5 * h)?;
        let (k1, t1) = p.eval(s_at(i + 1))?;
        let d1 = rhs(k0, t0, &u);
        let d2 = rhs(km, tm, &axpy(&u, 0.5 * h, &d1));
        let d3 = rhs(km, tm, &axpy(&u, 0.5 * h, &d2));
        let d4 = rhs(k1, t1, &axpy(&u, h, &d3));
        for j in 0..9 {
            u[j] += h / 6.0 * (d1[j] + 2.0 * d2[j] + 2.0 * d3[j] + d4[j]);
        }
        states.push(FrenetState::unpack(s_at(i + 1), &u));
        (k0, t0) = (k1, t1);
    }
    Ok(Trajectory { states })
}

#[derive(Clone, Debug)]
pub struct RectifyingSynthesis {
    pub m1: f64,
    pub n1: f64,
    pub profile: InvariantProfile,
    pub trajectory: Trajectory,
}

impl RectifyingSynthesis {
    /// Componentwise spread (max − min) of `r − (s + m₁)t − n₁b` along the
    /// trajectory; zero for an exactly rectifying curve.
    pub fn conservation_spread(&self) -> [f64; 3] {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for st in &self.trajectory.states {
            let v = (st.r - (st.s + self.m1) * st.t - self.n1 * st.b).to_array();
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]]
    }
}

/// `τ(s) = −(s + m₁)κ(s)/n₁` as an expression tree in `kappa`'s parameter.
pub fn rectifying_torsion(m1: f64, n1: f64, kappa: &Expr) -> Expr {
    let lambda = Node::Binary(BinOp::Add, Box::new(Node::Var), Box::new(Node::Const(m1)));
    let prod = Node::Binary(BinOp::Mul, Box::new(lambda), Box::new(kappa.root().clone()));
    let ratio = Node::Binary(BinOp::Div, Box::new(prod), Box::new(Node::Const(n1)));
    Expr::from_node(Node::Neg(Box::new(ratio)), kappa.param())
}

/// Rectifying curve with `⟨r, t⟩ = s + m₁` and binormal coefficient `n₁`.
///
/// Integrates from the canonical frame at `s_min` with
/// `r(s_min) = (s_min + m₁)t + n₁b`, so `r − (s + m₁)t − n₁b` starts at zero
/// and stays there.
pub fn synth_rectifying(
    m1: f64,
    n1: f64,
    kappa: &Expr,
    s_min: f64,
    s_max: f64,
    step: f64,
) -> Result<RectifyingSynthesis, SynthError> {
    if !(n1 != 0.0 && n1.is_finite() && m1.is_finite()) {
        return Err(SynthError::InvalidProfile(format!("need finite m1 and non-zero n1, got m1 = {m1}, n1 = {n1}")));
    }
    let profile = InvariantProfile::new(kappa.clone(), rectifying_torsion(m1, n1, kappa), s_min, s_max)?;
    let init = FrenetState::canonical(s_min, PgVector3::new(s_min + m1, 0.0, n1));
    let trajectory = integrate_frenet(&profile, &init, step)?;
    Ok(RectifyingSynthesis { m1, n1, profile, trajectory })
}

/// Closed-form normal-plane components
///
/// ```text
/// ξ(s) = (c₁ + c₂s)e^{−τs} + (c₃ + c₄s)e^{τs} + κ/τ²
/// η(s) = (c₁ + c₂s)e^{−τs} − (c₃ + c₄s)e^{τs}
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalClosedForm {
    pub kappa: f64,
    pub tau: f64,
    pub c: [f64; 4],
}

pub const MIN_NORMAL_TORSION: f64 = 1e-9;

impl NormalClosedForm {
    pub fn new(kappa: f64, tau: f64, c: [f64; 4]) -> Result<Self, SynthError> {
        if !(tau.abs() >= MIN_NORMAL_TORSION) {
            return Err(SynthError::ZeroTorsion(tau));
        }
        Ok(Self { kappa, tau, c })
    }

    fn parts<const N: usize>(&self, s: f64) -> (Jet<N>, Jet<N>, f64) {
        let x = Jet::<N>::variable(s);
        let [c1, c2, c3, c4] = self.c;
        let minus = (x * c2 + c1) * (x * -self.tau).exp();
        let plus = (x * c4 + c3) * (x * self.tau).exp();
        (minus, plus, self.kappa / (self.tau * self.tau))
    }

    pub fn xi_jet<const N: usize>(&self, s: f64) -> Jet<N> {
        let (minus, plus, k) = self.parts::<N>(s);
        minus + plus + k
    }

    pub fn eta_jet<const N: usize>(&self, s: f64) -> Jet<N> {
        let (minus, plus, _) = self.parts::<N>(s);
        minus - plus
    }

    pub fn xi(&self, s: f64) -> f64 {
        self.xi_jet::<1>(s).value()
    }

    pub fn eta(&self, s: f64) -> f64 {
        self.eta_jet::<1>(s).value()
    }

    pub fn xi_jet3(&self, s: f64) -> Jet3 {
        self.xi_jet::<4>(s)
    }

    pub fn eta_jet3(&self, s: f64) -> Jet3 {
        self.eta_jet::<4>(s)
    }
}

/// Samples `(ξ(s), η(s))` of the closed form on `grid`.
pub fn synth_normal_components(
    kappa: f64,
    tau: f64,
    c: [f64; 4],
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, SynthError> {
    let form = NormalClosedForm::new(kappa, tau, c)?;
    Ok(grid.iter().map(|&s| (form.xi(s), form.eta(s))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::expr;

    fn profile(k: &str, t: &str, a: f64, b: f64) -> InvariantProfile {
        InvariantProfile::new(expr(k), expr(t), a, b).unwrap()
    }

    #[test]
    fn plane_parabola() {
        let tr = integrate_frenet(&profile("1", "0", 0.0, 1.0), &FrenetState::canonical(0.0, PgVector3::ZERO), 1e-3)
            .unwrap();
        let end = tr.last();
        assert_eq!(end.s, 1.0);
        assert!((end.r.x - 1.0).abs() < 1e-12);
        assert!((end.r.y - 0.5).abs() < 1e-8);
        assert_eq!(end.r.z, 0.0);
        assert_eq!(tr.states.len(), 1001);
    }

    #[test]
    fn unit_invariants_match_closed_form() {
        let tr = integrate_frenet(&profile("1", "1", 0.0, 2.0), &FrenetState::canonical(0.0, PgVector3::ZERO), 1e-3)
            .unwrap();
        let end = tr.last();
        let s = 2.0f64;
        assert!((end.r.y - (s.cosh() - 1.0)).abs() < 1e-10);
        assert!((end.r.z - (s.sinh() - s)).abs() < 1e-10);
        assert!((end.n.y - s.cosh()).abs() < 1e-10);
        assert!((end.b.y - s.sinh()).abs() < 1e-10);
    }

    #[test]
    fn conserved_quantities_hold() {
        let tr = integrate_frenet(
            &profile("1 + s^2/4", "sin(3*s)", 0.0, 4.0),
            &FrenetState::canonical(0.0, PgVector3::ZERO),
            1e-3,
        )
        .unwrap();
        assert!(tr.invariant_drift().iter().all(|d| *d <= 1e-8), "{:?}", tr.invariant_drift());
        assert!(tr.det_drift() <= 1e-8);
        assert!(tr.states.iter().all(|st| st.n.x == 0.0 && st.b.x == 0.0 && st.t.x == 1.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        let init = FrenetState::canonical(0.0, PgVector3::ZERO);
        assert!(matches!(
            integrate_frenet(&profile("s - 0.5", "0", 0.0, 1.0), &init, 1e-2),
            Err(SynthError::InvalidProfile(_))
        ));
        assert!(integrate_frenet(&profile("1", "0", 0.0, 1.0), &init, 0.0).is_err());
        let mut skew = init;
        skew.n = PgVector3::isotropic(1.0, 0.1);
        assert!(matches!(
            integrate_frenet(&profile("1", "0", 0.0, 1.0), &skew, 1e-2),
            Err(SynthError::BadInitialFrame(_))
        ));
        let mut flipped = init;
        flipped.b = PgVector3::isotropic(0.0, -1.0);
        assert!(matches!(
            integrate_frenet(&profile("1", "0", 0.0, 1.0), &flipped, 1e-2),
            Err(SynthError::BadInitialFrame(_))
        ));
        assert!(synth_rectifying(0.0, 0.0, &expr("1"), 0.0, 1.0, 1e-3).is_err());
    }

    #[test]
    fn timelike_initial_normal_is_accepted() {
        let init = FrenetState {
            s: 0.0,
            r: PgVector3::ZERO,
            t: PgVector3::new(1.0, 0.0, 0.0),
            n: PgVector3::isotropic(0.0, 1.0),
            b: PgVector3::isotropic(-1.0, 0.0),
        };
        let tr = integrate_frenet(&profile("2", "0.5", 0.0, 1.0), &init, 1e-3).unwrap();
        let c = tr.to_curve().unwrap();
        let f = crate::frenet::frame_at(&c, 0.5).unwrap();
        assert_eq!(f.eps, -1);
        assert!((f.kappa - 2.0).abs() < 1e-6 && (f.tau - 0.5).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn rectifying_bracket_is_conserved() {
        let syn = synth_rectifying(0.0, 1.0, &expr("1"), 0.0, 2.0, 1e-3).unwrap();
        assert!(syn.conservation_spread().iter().all(|d| *d <= 1e-7), "{:?}", syn.conservation_spread());
        assert_eq!(syn.profile.tau.eval(1.5).unwrap(), -1.5);
    }

    #[test]
    fn normal_closed_form_values() {
        let v = synth_normal_components(1.0, 2.0, [0.0; 4], &[-1.0, 0.0, 3.0]).unwrap();
        assert!(v.iter().all(|&(xi, eta)| xi == 0.25 && eta == 0.0));
        let v = synth_normal_components(1.0, 1.0, [1.0, 0.0, 0.0, 0.0], &[0.0]).unwrap();
        assert_eq!(v[0], (2.0, 1.0));
        assert!(matches!(synth_normal_components(1.0, 1e-12, [0.0; 4], &[0.0]), Err(SynthError::ZeroTorsion(_))));
    }
}
