//! Debye polynomials and the large-order uniform expansions of I and K.
//!
//! The polynomials are generated once in exact rational arithmetic from
//! their integral recurrence and then cached as floating coefficients.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::SpecFunError;

/// Highest polynomial index kept.
pub const MAX_ORDER: usize = 6;

/// Smallest order accepted by the uniform product.
pub const MIN_UNIFORM_ORDER: f64 = 10.0;

type Poly = Vec<BigRational>;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect()
}

fn poly_deriv(a: &Poly) -> Poly {
    if a.len() <= 1 {
        return vec![BigRational::zero()];
    }
    a.iter().enumerate().skip(1).map(|(k, c)| c * BigRational::from_integer(BigInt::from(k))).collect()
}

fn poly_integral(a: &Poly) -> Poly {
    let mut out = vec![BigRational::zero()];
    for (k, c) in a.iter().enumerate() {
        out.push(c / BigRational::from_integer(BigInt::from(k + 1)));
    }
    out
}

fn poly_scale(a: &Poly, s: &BigRational) -> Poly {
    a.iter().map(|c| c * s).collect()
}

/// Exact coefficients of `U_0 .. U_n` (ascending powers of t).
pub fn debye_u_exact(n: usize) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Poly> = vec![vec![BigRational::one()]];
    let half_t2_one_minus_t2 = vec![BigRational::zero(), BigRational::zero(), rat(1, 2), BigRational::zero(), rat(-1, 2)];
    let one_minus_5t2 = vec![BigRational::one(), BigRational::zero(), rat(-5, 1)];
    for k in 0..n {
        let u = &out[k];
        let a = poly_mul(&half_t2_one_minus_t2, &poly_deriv(u));
        let b = poly_scale(&poly_integral(&poly_mul(&one_minus_5t2, u)), &rat(1, 8));
        out.push(poly_add(&a, &b));
    }
    out
}

/// Exact coefficients of the companion polynomials `V_0 .. V_n`.
pub fn debye_v_exact(n: usize) -> Vec<Vec<BigRational>> {
    let u = debye_u_exact(n);
    let mut out = vec![vec![BigRational::one()]];
    let t_t2m1 = vec![BigRational::zero(), rat(-1, 1), BigRational::zero(), BigRational::one()];
    let t = vec![BigRational::zero(), BigRational::one()];
    for k in 1..=n {
        let inner = poly_add(&poly_scale(&u[k - 1], &rat(1, 2)), &poly_mul(&t, &poly_deriv(&u[k - 1])));
        out.push(poly_add(&u[k], &poly_mul(&t_t2m1, &inner)));
    }
    out
}

fn to_f64(p: &[BigRational]) -> Vec<f64> {
    p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
}

struct Tables {
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| Tables {
        u: debye_u_exact(MAX_ORDER).iter().map(|p| to_f64(p)).collect(),
        v: debye_v_exact(MAX_ORDER).iter().map(|p| to_f64(p)).collect(),
    })
}

/// Highest order of the extended `U_k` table.
pub const EXTENDED_ORDER: usize = 13;

/// Floating coefficients of `U_0 .. U_EXTENDED_ORDER`, lowest power first.
pub fn debye_u_table() -> &'static [Vec<f64>] {
    static T: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    T.get_or_init(|| debye_u_exact(EXTENDED_ORDER).iter().map(|p| to_f64(p)).collect())
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * t + x)
}

/// `U_k(t)`.
pub fn debye_u(k: usize, t: f64) -> f64 {
    horner(&tables().u[k], t)
}

/// `V_k(t)`.
pub fn debye_v(k: usize, t: f64) -> f64 {
    horner(&tables().v[k], t)
}

/// Exponent `nu * xi(x / nu)` of the uniform expansion, written in terms of
/// the unscaled argument. Also used as the common scale of scaled Bessel
/// values.
pub fn uniform_exponent(nu: f64, x: f64) -> f64 {
    let w = nu.hypot(x);
    if nu == 0.0 {
        return x;
    }
    w + nu * (x / (nu + w)).ln()
}

/// Uniform expansion of `I_nu(x), I_nu'(x), K_nu(x), K_nu'(x)` with the
/// exponent factored out: `I = i e^eta`, `K = k e^-eta`.
pub fn uniform_ik(nu: f64, x: f64, terms: usize) -> (f64, f64, f64, f64, f64) {
    let z = x / nu;
    let w2 = 1.0 + z * z;
    let sq = w2.sqrt();
    let t = 1.0 / sq;
    let q = w2.sqrt().sqrt();
    let eta = uniform_exponent(nu, x);
    let (mut su, mut sua, mut sv, mut sva) = (0.0, 0.0, 0.0, 0.0);
    let mut pw = 1.0;
    for k in 0..=terms.min(MAX_ORDER) {
        let uk = debye_u(k, t) * pw;
        let vk = debye_v(k, t) * pw;
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        su += uk;
        sua += sgn * uk;
        sv += vk;
        sva += sgn * vk;
        pw /= nu;
    }
    let pre_i = 1.0 / (2.0 * std::f64::consts::PI * nu).sqrt();
    let pre_k = (std::f64::consts::PI / (2.0 * nu)).sqrt();
    let i = pre_i * su / q;
    let di = pre_i * q * sv / z;
    let k = pre_k * sua / q;
    let dk = -pre_k * q * sva / z;
    (eta, i, di, k, dk)
}

/// Uniform approximation of `I_a1(a1 z1) K_a2(a2 z2)` truncated at total
/// order `s_max`. Returns `(mantissa, exponent)` with the product equal to
/// `mantissa * exp(exponent)`.
pub fn ik_uniform_product(a1: f64, z1: f64, a2: f64, z2: f64, s_max: usize) -> Result<(f64, f64), SpecFunError> {
    if a1 < MIN_UNIFORM_ORDER || a2 < MIN_UNIFORM_ORDER {
        return Err(SpecFunError::Domain(format!("uniform product needs orders >= {MIN_UNIFORM_ORDER}, got {a1}, {a2}")));
    }
    if s_max > MAX_ORDER {
        return Err(SpecFunError::Domain(format!("uniform product truncation {s_max} exceeds stored order {MAX_ORDER}")));
    }
    if !(z1 > 0.0 && z2 > 0.0) {
        return Err(SpecFunError::Domain("uniform product needs positive arguments".into()));
    }
    let t1 = 1.0 / (1.0 + z1 * z1).sqrt();
    let t2 = 1.0 / (1.0 + z2 * z2).sqrt();
    let mut sum = 0.0;
    for s1 in 0..=s_max {
        for s2 in 0..=s1 {
            let sgn = if s2 % 2 == 0 { 1.0 } else { -1.0 };
            sum += sgn * debye_u(s1 - s2, t1) * debye_u(s2, t2) / (a1.powi((s1 - s2) as i32) * a2.powi(s2 as i32));
        }
    }
    let pre = 1.0 / (2.0 * (a1 * a2).sqrt() * ((1.0 + z1 * z1) * (1.0 + z2 * z2)).sqrt().sqrt());
    let exponent = uniform_exponent(a1, a1 * z1) - uniform_exponent(a2, a2 * z2);
    Ok((pre * sum, exponent))
}
