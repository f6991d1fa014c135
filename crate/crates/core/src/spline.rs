//! Quintic (degree-5) B-spline interpolation with not-a-knot end conditions.
//!
//! Interior knots sit on the data sites `x₃ … x_{N−4}`, so the interpolant is
//! C⁴ and reproduces quintic polynomials exactly. The collocation matrix is
//! banded and totally positive, which makes Gaussian elimination without
//! pivoting stable.

use crate::error::CurveError;

const DEGREE: usize = 5;
const BAND: usize = DEGREE;

/// Number of derivatives returned by [`QuinticSpline::derivatives`] (orders 0..=5).
pub const SPLINE_ORDERS: usize = DEGREE + 1;

#[derive(Clone, Debug)]
pub struct QuinticSpline {
    knots: Vec<f64>,
    coef: Vec<f64>,
}

/// LU factors of a banded matrix stored row-wise as `a[i][j - i + BAND]`.
struct BandLu {
    n: usize,
    a: Vec<[f64; 2 * BAND + 1]>,
}

impl BandLu {
    fn factor(mut a: Vec<[f64; 2 * BAND + 1]>) -> Result<Self, CurveError> {
        let n = a.len();
        for k in 0..n {
            let piv = a[k][BAND];
            if piv == 0.0 || !piv.is_finite() {
                return Err(CurveError::Invalid("singular spline collocation matrix".into()));
            }
            for i in k + 1..n.min(k + BAND + 1) {
                let f = a[i][k + BAND - i] / piv;
                if f == 0.0 {
                    continue;
                }
                a[i][k + BAND - i] = f;
                for j in k + 1..n.min(k + BAND + 1) {
                    a[i][j + BAND - i] -= f * a[k][j + BAND - k];
                }
            }
        }
        Ok(Self { n, a })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(BAND);
            let acc: f64 = (lo..i).map(|j| self.a[i][j + BAND - i] * x[j]).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let hi = n.min(i + BAND + 1);
            let acc: f64 = (i + 1..hi).map(|j| self.a[i][j + BAND - i] * x[j]).sum();
            x[i] = (x[i] - acc) / self.a[i][BAND];
        }
        x
    }
}

fn find_span(knots: &[f64], n_basis: usize, u: f64) -> usize {
    let last = n_basis - 1;
    if u >= knots[last + 1] {
        return last;
    }
    if u <= knots[DEGREE] {
        return DEGREE;
    }
    let (mut lo, mut hi) = (DEGREE, last + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if u < knots[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Non-zero basis functions and their derivatives at `u`:
/// `ders[k][j]` is the k-th derivative of `N_{span−5+j}`.
fn basis_derivatives(knots: &[f64], span: usize, u: f64) -> [[f64; DEGREE + 1]; DEGREE + 1] {
    const P: usize = DEGREE;
    let mut ndu = [[0.0; P + 1]; P + 1];
    let mut left = [0.0; P + 1];
    let mut right = [0.0; P + 1];
    ndu[0][0] = 1.0;
    for j in 1..=P {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        let mut saved = 0.0;
        for r in 0..j {
            ndu[j][r] = right[r + 1] + left[j - r];
            let temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = [[0.0; P + 1]; P + 1];
    for j in 0..=P {
        ders[0][j] = ndu[j][P];
    }
    let mut a = [[0.0; P + 1]; 2];
    for r in 0..=P {
        let (mut s1, mut s2) = (0, 1);
        a[0][0] = 1.0;
        for k in 1..=P {
            let mut d = 0.0;
            let rk = r as isize - k as isize;
            let pk = P - k;
            if r >= k {
                let rk = rk as usize;
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            let j1: usize = if rk >= -1 { 1 } else { (-rk) as usize };
            let j2: usize = if r as isize - 1 <= pk as isize { k - 1 } else { P - r };
            for j in j1..=j2 {
                let idx = (rk + j as isize) as usize;
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][idx];
                d += a[s2][j] * ndu[idx][pk];
            }
            if r <= pk {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut factor = P as f64;
    for k in 1..=P {
        for v in ders[k].iter_mut() {
            *v *= factor;
        }
        factor *= (P - k) as f64;
    }
    ders
}

/// Interpolates several series sharing the same strictly increasing sites.
pub fn interpolate_many(sites: &[f64], series: &[&[f64]]) -> Result<Vec<QuinticSpline>, CurveError> {
    let n = sites.len();
    if n < DEGREE + 1 {
        return Err(CurveError::Invalid(format!("quintic interpolation needs at least 6 samples, got {n}")));
    }
    if sites.iter().any(|v| !v.is_finite()) || sites.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CurveError::Invalid("sample parameters must be finite and strictly increasing".into()));
    }
    for s in series {
        if s.len() != n {
            return Err(CurveError::Invalid("sample columns differ in length".into()));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(CurveError::Invalid("samples must be finite".into()));
        }
    }
    let mut knots = Vec::with_capacity(n + DEGREE + 1);
    knots.extend(std::iter::repeat_n(sites[0], DEGREE + 1));
    knots.extend_from_slice(&sites[3..n - 3]);
    knots.extend(std::iter::repeat_n(sites[n - 1], DEGREE + 1));

    let mut band = vec![[0.0; 2 * BAND + 1]; n];
    for (i, &u) in sites.iter().enumerate() {
        let span = find_span(&knots, n, u);
        let ders = basis_derivatives(&knots, span, u);
        for (j, &value) in ders[0].iter().enumerate() {
            let col = span - DEGREE + j;
            let offset = col as isize - i as isize;
            if offset.unsigned_abs() > BAND {
                if value != 0.0 {
                    return Err(CurveError::Invalid("spline collocation exceeds band".into()));
                }
                continue;
            }
            band[i][(offset + BAND as isize) as usize] = value;
        }
    }
    let lu = BandLu::factor(band)?;
    Ok(series
        .iter()
        .map(|values| QuinticSpline { knots: knots.clone(), coef: lu.solve(values) })
        .collect())
}

impl QuinticSpline {
    pub fn interpolate(sites: &[f64], values: &[f64]) -> Result<Self, CurveError> {
        Ok(interpolate_many(sites, &[values])?.remove(0))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    /// Value and derivatives of orders 1..=5 at `u` (clamped to the domain).
    pub fn derivatives(&self, u: f64) -> [f64; SPLINE_ORDERS] {
        let (lo, hi) = self.domain();
        let u = u.clamp(lo, hi);
        let span = find_span(&self.knots, self.coef.len(), u);
        let ders = basis_derivatives(&self.knots, span, u);
        let mut out = [0.0; SPLINE_ORDERS];
        for (k, row) in ders.iter().enumerate() {
            out[k] = row.iter().enumerate().map(|(j, b)| b * self.coef[span - DEGREE + j]).sum();
        }
        out
    }

    pub fn value(&self, u: f64) -> f64 {
        self.derivatives(u)[0]
    }
}
