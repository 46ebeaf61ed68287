//! Second-order forward-mode duals.
//!
//! A [`Dual2`] carries a value together with two directional first derivatives
//! and the mixed second derivative along those directions:
//!
//! ```text
//!   f(x + a e1 + b e2)  ->  (f, Df a, Df b, a' D2f b)
//! ```
//!
//! Seeding the two directions with unit vectors `e_i`, `e_j` makes `d12` the
//! Hessian entry `H[i][j]`, so one sweep per index pair fills the Hessian
//! exactly — no finite differencing, no taping.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value, two directional derivatives, and the mixed second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual2 {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d12: f64,
}

impl Dual2 {
    pub const fn constant(v: f64) -> Self {
        Dual2 { v, d1: 0.0, d2: 0.0, d12: 0.0 }
    }

    /// A variable seeded with first-derivative directions `d1`, `d2`.
    pub const fn seeded(v: f64, d1: f64, d2: f64) -> Self {
        Dual2 { v, d1, d2, d12: 0.0 }
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Dual2 {
            v: s,
            d1: c * self.d1,
            d2: c * self.d2,
            d12: c * self.d12 - s * self.d1 * self.d2,
        }
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Dual2 {
            v: c,
            d1: -s * self.d1,
            d2: -s * self.d2,
            d12: -s * self.d12 - c * self.d1 * self.d2,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        Dual2 {
            v: e,
            d1: e * self.d1,
            d2: e * self.d2,
            d12: e * (self.d12 + self.d1 * self.d2),
        }
    }

    /// Reciprocal; the caller must rule out `v == 0`.
    pub fn recip(self) -> Self {
        let w = 1.0 / self.v;
        let w2 = w * w;
        Dual2 {
            v: w,
            d1: -self.d1 * w2,
            d2: -self.d2 * w2,
            d12: -self.d12 * w2 + 2.0 * self.d1 * self.d2 * w2 * w,
        }
    }
}

impl Add for Dual2 {
    type Output = Dual2;
    fn add(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v + rhs.v,
            d1: self.d1 + rhs.d1,
            d2: self.d2 + rhs.d2,
            d12: self.d12 + rhs.d12,
        }
    }
}

impl Sub for Dual2 {
    type Output = Dual2;
    fn sub(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v - rhs.v,
            d1: self.d1 - rhs.d1,
            d2: self.d2 - rhs.d2,
            d12: self.d12 - rhs.d12,
        }
    }
}

impl Mul for Dual2 {
    type Output = Dual2;
    fn mul(self, rhs: Dual2) -> Dual2 {
        Dual2 {
            v: self.v * rhs.v,
            d1: self.v * rhs.d1 + self.d1 * rhs.v,
            d2: self.v * rhs.d2 + self.d2 * rhs.v,
            d12: self.v * rhs.d12 + self.d1 * rhs.d2 + self.d2 * rhs.d1 + self.d12 * rhs.v,
        }
    }
}

impl Div for Dual2 {
    type Output = Dual2;
    #[allow(clippy::suspicious_arithmetic_impl)] // a/b as a * b^{-1}
    fn div(self, rhs: Dual2) -> Dual2 {
        self * rhs.recip()
    }
}

impl Neg for Dual2 {
    type Output = Dual2;
    fn neg(self) -> Dual2 {
        Dual2 { v: -self.v, d1: -self.d1, d2: -self.d2, d12: -self.d12 }
    }
}
