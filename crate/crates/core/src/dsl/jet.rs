//! Truncated Taylor series ("jets") with a compile-time number of coefficients.
//!
//! A `Jet<N>` stores the normalized Taylor coefficients `c_k = f⁽ᵏ⁾(s₀)/k!`
//! for `k < N`. Arithmetic is truncated polynomial algebra; the elementary
//! functions use the usual power-series recurrences, so every coefficient is
//! exact up to floating-point rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value and first three derivatives.
pub type Jet3 = Jet<4>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<const N: usize> {
    c: [f64; N],
}

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    /// The independent variable evaluated at `s`.
    pub fn variable(s: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = s;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn from_coeffs(c: [f64; N]) -> Self {
        Self { c }
    }

    /// Builds a jet from derivatives `f, f′, f″, …` (missing ones are zero).
    pub fn from_derivatives(d: &[f64]) -> Self {
        let mut c = [0.0; N];
        for (k, slot) in c.iter_mut().enumerate() {
            if let Some(v) = d.get(k) {
                *slot = v / factorial(k);
            }
        }
        Self { c }
    }

    pub fn coeffs(&self) -> &[f64; N] {
        &self.c
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative; zero beyond the truncation order.
    pub fn derivative(&self, k: usize) -> f64 {
        if k < N {
            self.c[k] * factorial(k)
        } else {
            0.0
        }
    }

    pub fn derivatives(&self) -> [f64; N] {
        let mut d = self.c;
        for (k, v) in d.iter_mut().enumerate() {
            *v *= factorial(k);
        }
        d
    }

    /// The jet of `f′`, one order shorter in content (last coefficient is zero).
    pub fn differentiate(&self) -> Self {
        let mut c = [0.0; N];
        for k in 1..N {
            c[k - 1] = k as f64 * self.c[k];
        }
        Self { c }
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= k);
        Self { c }
    }

    /// Coefficients of `a·(k-th coefficient)` weighted recurrences share this
    /// shape: `Σ_{j=1..k} j·a_j·b_{k−j}`.
    fn weighted(&self, other: &[f64; N], k: usize) -> f64 {
        (1..=k).map(|j| j as f64 * self.c[j] * other[k - j]).sum()
    }

    pub fn recip(&self) -> Option<Self> {
        Self::constant(1.0).checked_div(self)
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        let b0 = rhs.c[0];
        if b0 == 0.0 {
            return None;
        }
        let mut q = [0.0; N];
        for k in 0..N {
            let acc: f64 = (1..=k).map(|j| rhs.c[j] * q[k - j]).sum();
            q[k] = (self.c[k] - acc) / b0;
        }
        Some(Self { c: q })
    }

    pub fn exp(&self) -> Self {
        let mut e = [0.0; N];
        e[0] = self.c[0].exp();
        for k in 1..N {
            e[k] = self.weighted(&e, k) / k as f64;
        }
        Self { c: e }
    }

    /// Natural logarithm; requires a positive value.
    pub fn checked_ln(&self) -> Option<Self> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return None;
        }
        let mut l = [0.0; N];
        l[0] = a0.ln();
        for k in 1..N {
            let acc: f64 = (1..k).map(|j| j as f64 * l[j] * self.c[k - j]).sum();
            l[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Some(Self { c: l })
    }

    /// Returns `(sin, cos)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = self.c[0].sin();
        c[0] = self.c[0].cos();
        for k in 1..N {
            let kf = k as f64;
            s[k] = self.weighted(&c, k) / kf;
            c[k] = -self.weighted(&s, k) / kf;
        }
        (Self { c: s }, Self { c })
    }

    /// Returns `(sinh, cosh)`.
    pub fn sinh_cosh(&self) -> (Self, Self) {
        let mut s = [0.0; N];
        let mut c = [0.0; N];
        s[0] = self.c[0].sinh();
        c[0] = self.c[0].cosh();
        for k in 1..N {
            let kf = k as f64;
            s[k] = self.weighted(&c, k) / kf;
            c[k] = self.weighted(&s, k) / kf;
        }
        (Self { c: s }, Self { c })
    }

    pub fn sin(&self) -> Self {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Self {
        self.sin_cos().1
    }

    pub fn sinh(&self) -> Self {
        self.sinh_cosh().0
    }

    pub fn cosh(&self) -> Self {
        self.sinh_cosh().1
    }

    pub fn tanh(&self) -> Self {
        // tanh′ = 1 − tanh², integrated coefficient by coefficient.
        let mut t = [0.0; N];
        let mut d = [0.0; N];
        t[0] = self.c[0].tanh();
        d[0] = 1.0 - t[0] * t[0];
        for k in 1..N {
            t[k] = self.weighted(&d, k) / k as f64;
            let sq: f64 = (0..=k).map(|j| t[j] * t[k - j]).sum();
            d[k] = -sq;
        }
        Self { c: t }
    }

    /// Square root; requires a strictly positive value (the derivative is
    /// unbounded at zero).
    pub fn checked_sqrt(&self) -> Option<Self> {
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return None;
        }
        let mut r = [0.0; N];
        r[0] = a0.sqrt();
        for k in 1..N {
            let acc: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.c[k] - acc) / (2.0 * r[0]);
        }
        Some(Self { c: r })
    }

    /// `|f|`; undefined (non-differentiable) where `f = 0`.
    pub fn checked_abs(&self) -> Option<Self> {
        let a0 = self.c[0];
        if a0 > 0.0 {
            Some(*self)
        } else if a0 < 0.0 {
            Some(-*self)
        } else {
            None
        }
    }

    pub fn powi(&self, n: i32) -> Option<Self> {
        let mut base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Some(acc)
    }

    /// `f^p` for a constant exponent. Integer exponents go through repeated
    /// multiplication and accept any base (non-zero for negative `p`); other
    /// exponents require a positive base.
    pub fn checked_powf(&self, p: f64) -> Option<Self> {
        if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
            return self.powi(p as i32);
        }
        let a0 = self.c[0];
        if a0 <= 0.0 {
            return None;
        }
        let mut b = [0.0; N];
        b[0] = a0.powf(p);
        for k in 1..N {
            let acc: f64 = (0..k)
                .map(|j| (p * (k - j) as f64 - j as f64) * self.c[k - j] * b[j])
                .sum();
            b[k] = acc / (k as f64 * a0);
        }
        Some(Self { c: b })
    }
}

impl Jet<4> {
    pub fn v(&self) -> f64 {
        self.c[0]
    }
    pub fn d1(&self) -> f64 {
        self.c[1]
    }
    pub fn d2(&self) -> f64 {
        2.0 * self.c[2]
    }
    pub fn d3(&self) -> f64 {
        6.0 * self.c[3]
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a += b);
        Self { c }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.c;
        c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a -= b);
        Self { c }
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for (k, slot) in c.iter_mut().enumerate() {
            *slot = (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum();
        }
        Self { c }
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, k: f64) -> Self {
        self.c[0] += k;
        self
    }
}

/// Unchecked division: a zero divisor yields non-finite coefficients.
impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).unwrap_or(Self { c: [f64::NAN; N] })
    }
}
