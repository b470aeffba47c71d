//! Hyper-dual numbers `re + a e1 + b e2 + ab e1 e2` with `e1^2 = e2^2 = 0`.
//!
//! Seeding `e1` on the field point and `e2` on the source point yields the
//! value, both first partials and the exact mixed partial in one pass.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HyperDual {
    pub re: f64,
    pub a: f64,
    pub b: f64,
    pub ab: f64,
}

impl HyperDual {
    pub const fn new(re: f64, a: f64, b: f64, ab: f64) -> Self {
        Self { re, a, b, ab }
    }

    pub const fn constant(re: f64) -> Self {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    /// Variable seeded along the first direction.
    pub const fn var_a(re: f64) -> Self {
        Self::new(re, 1.0, 0.0, 0.0)
    }

    /// Variable seeded along the second direction.
    pub const fn var_b(re: f64) -> Self {
        Self::new(re, 0.0, 1.0, 0.0)
    }

    /// Lift a scalar function given its value and first two derivatives.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Self {
        Self {
            re: f,
            a: df * self.a,
            b: df * self.b,
            ab: df * self.ab + d2f * self.a * self.b,
        }
    }

    /// Infinitesimal part only.
    pub fn delta(&self) -> Self {
        Self { re: 0.0, ..*self }
    }

    /// Evaluate a Taylor polynomial `sum c_k d^k` at the infinitesimal
    /// offset of `self` from its real part. Only terms up to `d^2` survive.
    pub fn taylor(&self, c0: f64, c1: f64, c2: f64) -> Self {
        let d = self.delta();
        Self::constant(c0) + d * c1 + d * d * c2
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.a + o.a, self.b + o.b, self.ab + o.ab)
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.a - o.a, self.b - o.b, self.ab - o.ab)
    }
}

impl Neg for HyperDual {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.a, -self.b, -self.ab)
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.re * o.re,
            self.re * o.a + self.a * o.re,
            self.re * o.b + self.b * o.re,
            self.re * o.ab + self.a * o.b + self.b * o.a + self.ab * o.re,
        )
    }
}

impl Div for HyperDual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl Add<f64> for HyperDual {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.re += o;
        self
    }
}

impl Sub<f64> for HyperDual {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.re -= o;
        self
    }
}

impl Mul<f64> for HyperDual {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Self::new(self.re * o, self.a * o, self.b * o, self.ab * o)
    }
}

impl Div<f64> for HyperDual {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        self * (1.0 / o)
    }
}

impl Scalar for HyperDual {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let x = self.re;
        self.chain(x.ln(), 1.0 / x, -1.0 / (x * x))
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.re))
    }
    fn recip(self) -> Self {
        let x = self.re;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
    }
}
