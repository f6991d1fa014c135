//! The pseudo-Galilean metric kernel.
//!
//! Vectors are split into a non-isotropic part (the `x` coordinate) and the
//! isotropic plane `x = 0`, which carries a Minkowski-signature product
//! `y·y' − z·z'`. The scalar product is degenerate: as soon as one factor has a
//! non-zero `x` component, only the `x` components contribute.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A vector in pseudo-Galilean space, `x` being the absolute coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PgVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Causal character with respect to the degenerate metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalCharacter {
    NonIsotropic,
    IsotropicSpacelike,
    IsotropicTimelike,
    IsotropicLightlike,
}

impl PgVector3 {
    pub const ZERO: PgVector3 = PgVector3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Vector in the isotropic plane.
    pub const fn isotropic(y: f64, z: f64) -> Self {
        Self { x: 0.0, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_isotropic(&self) -> bool {
        self.x == 0.0
    }

    /// Pseudo-Galilean scalar product, see [`pg_inner`].
    pub fn inner(&self, other: &PgVector3) -> f64 {
        pg_inner(self, other)
    }

    pub fn causal_character(&self) -> CausalCharacter {
        causal_character(self)
    }

    /// Plain Euclidean norm, used only for residual bookkeeping.
    pub fn euclidean_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for PgVector3 {
    fn from(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl fmt::Display for PgVector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for PgVector3 {
    type Output = PgVector3;
    fn add(self, rhs: PgVector3) -> PgVector3 {
        PgVector3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for PgVector3 {
    type Output = PgVector3;
    fn sub(self, rhs: PgVector3) -> PgVector3 {
        PgVector3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for PgVector3 {
    type Output = PgVector3;
    fn neg(self) -> PgVector3 {
        PgVector3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<PgVector3> for f64 {
    type Output = PgVector3;
    fn mul(self, v: PgVector3) -> PgVector3 {
        PgVector3::new(self * v.x, self * v.y, self * v.z)
    }
}

impl Mul<f64> for PgVector3 {
    type Output = PgVector3;
    fn mul(self, k: f64) -> PgVector3 {
        k * self
    }
}

/// Pseudo-Galilean scalar product.
///
/// Non-isotropic pairs (either `x` non-zero) use `u.x·v.x`; isotropic pairs use
/// the `(+, −)` product `u.y·v.y − u.z·v.z`.
///
/// Note that a mixed pair yields `0`. Decomposing a position vector in a
/// Frenet frame goes through [`crate::classify::frame_components`], not this.
pub fn pg_inner(u: &PgVector3, v: &PgVector3) -> f64 {
    if u.x != 0.0 || v.x != 0.0 {
        u.x * v.x
    } else {
        u.y * v.y - u.z * v.z
    }
}

/// Isotropic-plane product `y·y' − z·z'`, ignoring `x`.
pub fn iso_inner(u: &PgVector3, v: &PgVector3) -> f64 {
    u.y * v.y - u.z * v.z
}

/// Exact classification; no tolerance is applied to the `x == 0` test.
pub fn causal_character(u: &PgVector3) -> CausalCharacter {
    if u.x != 0.0 {
        return CausalCharacter::NonIsotropic;
    }
    let q = u.y * u.y - u.z * u.z;
    if q > 0.0 {
        CausalCharacter::IsotropicSpacelike
    } else if q < 0.0 {
        CausalCharacter::IsotropicTimelike
    } else {
        CausalCharacter::IsotropicLightlike
    }
}

/// Determinant of the 3×3 matrix with rows `u`, `v`, `w`.
pub fn det3(u: &PgVector3, v: &PgVector3, w: &PgVector3) -> f64 {
    u.x * (v.y * w.z - v.z * w.y) - u.y * (v.x * w.z - v.z * w.x) + u.z * (v.x * w.y - v.y * w.x)
}
