//! Truncated Taylor series in one variable.
//!
//! `Jet<N>` stores `c[k] = f^(k)(x0) / k!` for `k < N`. Arithmetic is exact
//! up to the truncation order, which gives analytic derivatives of any
//! closed-form profile without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    pub c: [f64; N],
}

impl<const N: usize> Jet<N> {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = v;
        Self { c }
    }

    /// The independent variable `x0 + t`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; N];
        c[0] = x0;
        if N > 1 {
            c[1] = 1.0;
        }
        Self { c }
    }

    pub fn from_coeffs(c: [f64; N]) -> Self {
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn deriv(&self, k: usize) -> f64 {
        if k >= N {
            return 0.0;
        }
        let mut f = 1.0;
        for j in 2..=k {
            f *= j as f64;
        }
        self.c[k] * f
    }

    /// Derivative with respect to the expansion variable; the top
    /// coefficient is lost.
    pub fn differentiate(&self) -> Self {
        let mut c = [0.0; N];
        for k in 0..N.saturating_sub(1) {
            c[k] = (k + 1) as f64 * self.c[k + 1];
        }
        Self { c }
    }

    /// Taylor coefficients of `f(inner(t))` where `self` holds the
    /// coefficients of `f` about `inner.value()`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut dz = *inner;
        dz.c[0] = 0.0;
        let mut acc = Self::constant(self.c[N - 1]);
        for k in (0..N - 1).rev() {
            acc = acc * dz + self.c[k];
        }
        acc
    }

    /// Evaluate the truncated polynomial at offset `t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] += o.c[k];
        }
        self
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for k in 0..N {
            self.c[k] -= o.c[k];
        }
        self
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut c = [0.0; N];
        for k in 0..N {
            let mut s = 0.0;
            for i in 0..=k {
                s += self.c[i] * o.c[k - i];
            }
            c[k] = s;
        }
        Self { c }
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let mut q = [0.0; N];
        let b0 = o.c[0];
        for k in 0..N {
            let mut s = self.c[k];
            for i in 1..=k {
                s -= o.c[i] * q[k - i];
            }
            q[k] = s / b0;
        }
        Self { c: q }
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, o: f64) -> Self {
        self.c[0] += o;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, o: f64) -> Self {
        self.c[0] -= o;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(mut self, o: f64) -> Self {
        for v in self.c.iter_mut() {
            *v *= o;
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(mut self, o: f64) -> Self {
        for v in self.c.iter_mut() {
            *v /= o;
        }
        self
    }
}

impl<const N: usize> Scalar for Jet<N> {
    fn cst(v: f64) -> Self {
        Self::constant(v)
    }

    fn re(&self) -> f64 {
        self.c[0]
    }

    fn exp(self) -> Self {
        let mut r = [0.0; N];
        r[0] = self.c[0].exp();
        for k in 1..N {
            let mut s = 0.0;
            for i in 1..=k {
                s += i as f64 * self.c[i] * r[k - i];
            }
            r[k] = s / k as f64;
        }
        Self { c: r }
    }

    fn ln(self) -> Self {
        let a0 = self.c[0];
        let mut l = [0.0; N];
        l[0] = a0.ln();
        for k in 1..N {
            let mut s = self.c[k];
            for i in 1..k {
                s -= (i as f64 / k as f64) * l[i] * self.c[k - i];
            }
            l[k] = s / a0;
        }
        Self { c: l }
    }

    fn sqrt(self) -> Self {
        let mut s = [0.0; N];
        s[0] = self.c[0].sqrt();
        for k in 1..N {
            let mut t = self.c[k];
            for i in 1..k {
                t -= s[i] * s[k - i];
            }
            s[k] = t / (2.0 * s[0]);
        }
        Self { c: s }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let x = Jet::<6>::variable(0.7);
        let y = (x * x + 1.0).ln().exp();
        let z = x * x + 1.0;
        for k in 0..6 {
            assert!((y.c[k] - z.c[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_of_reciprocal() {
        let x = Jet::<5>::variable(2.0);
        let y = x.recip();
        // d^k/dx^k (1/x) = (-1)^k k! / x^(k+1)
        let mut fact = 1.0;
        for k in 0..5 {
            if k > 0 {
                fact *= k as f64;
            }
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 } * fact / 2f64.powi(k as i32 + 1);
            assert!((y.deriv(k) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn composition_matches_direct() {
        // exp(r) with r = exp(t) about t = 0.3
        let t = Jet::<7>::variable(0.3);
        let r = t.exp();
        let direct = r.exp();
        let outer = Jet::<7>::variable(r.value()).exp();
        let comp = outer.compose(&r);
        for k in 0..7 {
            assert!((direct.c[k] - comp.c[k]).abs() < 1e-12 * direct.c[k].abs().max(1.0));
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let x = Jet::<6>::variable(3.0);
        let y = (x * x * x + 2.0).sqrt();
        let back = y * y;
        let target = x * x * x + 2.0;
        for k in 0..6 {
            assert!((back.c[k] - target.c[k]).abs() < 1e-12);
        }
    }
}
