//! Legendre polynomials, normalized associated functions and exact
//! derivatives at the north pole.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `d^k P_l / dx^k` at `x = 1`, exactly.
pub fn legendre_deriv_at_one(l: u32, k: u32) -> BigRational {
    if k > l {
        return BigRational::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let l = l as i64;
    let k = k as i64;
    for q in (-k + 1)..=k {
        num *= BigInt::from(l + q);
    }
    for q in 1..=k {
        den *= BigInt::from(2 * q);
    }
    BigRational::new(num, den)
}

/// `P_l(x)` by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    if l == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, x);
    for n in 1..l {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * x * p1 - nf * p0) / (nf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// All `P_0 .. P_lmax` at `x`.
pub fn legendre_p_all(lmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(1.0);
    if lmax == 0 {
        return out;
    }
    out.push(x);
    for n in 1..lmax {
        let nf = n as f64;
        out.push(((2.0 * nf + 1.0) * x * out[n] - nf * out[n - 1]) / (nf + 1.0));
    }
    out
}

/// Orthonormal associated Legendre values `Pbar_l^m(cos theta)` for a fixed
/// `m >= 0` and `l = m ..= lmax`, Condon–Shortley phase included, such that
/// `Y_lm = Pbar_l^m e^{i m phi}`.
pub fn assoc_legendre_normalized(lmax: usize, m: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; lmax + 1];
    if m > lmax {
        return out;
    }
    let s2 = (1.0 - x * x).max(0.0);
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for i in 1..=m {
        let fi = i as f64;
        pmm *= -((2.0 * fi + 1.0) / (2.0 * fi)).sqrt() * s2.sqrt();
    }
    out[m] = pmm;
    if m == lmax {
        return out;
    }
    out[m + 1] = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
    let mf = m as f64;
    for l in (m + 2)..=lmax {
        let lf = l as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lp = lf - 1.0;
        let b = ((lp * lp - mf * mf) / (4.0 * lp * lp - 1.0)).sqrt();
        out[l] = a * (x * out[l - 1] - b * out[l - 2]);
    }
    out
}
