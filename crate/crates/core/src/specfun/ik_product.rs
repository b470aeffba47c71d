//! Derivatives of `I_q(k a) K_q(k b) / sqrt(a b)` in `k` for half-integer
//! `q`, with hyper-dual `a`, `b`.
//!
//! The product is assembled in logarithmic form. The `q ln z` growth and,
//! where it dominates, the `+/- z` growth of the two factors are split off
//! analytically. The remainders of `ln I_q - q ln z` and `ln K_q + q ln z`
//! are smooth, so the `k`-derivatives keep their precision at both
//! `k a << q` and `k a >> q`.
//!
//! Evaluations of the remainders:
//! - `q >= DEBYE_ORDER`: uniform expansion with `EXTENDED_ORDER` terms;
//! - otherwise `K` from its terminating form, and `I` from its power series
//!   below `z = max(n^2 / 2, 4)` and its terminating Hankel form above.

use super::olver::{debye_u_table, EXTENDED_ORDER};
use super::SpecFunError;
use crate::numerics::{HyperDual, Jet, Scalar};

/// Orders at or above this use the uniform expansion.
pub const DEBYE_ORDER: f64 = 20.0;

/// `lin * z + jet(z)`, with `jet` the Taylor series about `z0`.
#[derive(Debug, Clone, Copy)]
pub struct Remainder<const M: usize> {
    pub lin: f64,
    pub jet: Jet<M>,
}

/// Remainders of `ln I_q(z) - q ln z` and `ln K_q(z) + q ln z` about `z0`.
/// In the uniform branch both carry an extra `-/+ q ln q`, which cancels in
/// every product.
pub fn chi_jets<const M: usize>(q: f64, z0: f64) -> Result<(Remainder<M>, Remainder<M>), SpecFunError> {
    if !(z0 > 0.0 && z0.is_finite()) {
        return Err(SpecFunError::Domain(format!("product argument must be positive, got {z0}")));
    }
    if q >= DEBYE_ORDER {
        let (i, k) = debye_chi(q, z0);
        return Ok((Remainder { lin: 0.0, jet: i }, Remainder { lin: 0.0, jet: k }));
    }
    let n2 = 2.0 * q - 1.0;
    if n2 < 0.0 || (n2 - n2.round()).abs() > 1e-12 {
        return Err(SpecFunError::Domain(format!("order {q} is not a positive half-integer")));
    }
    let n = ((q - 0.5).round()) as usize;
    let z = Jet::<M>::variable(z0);
    let c_i = -q * std::f64::consts::LN_2 - ln_gamma_half(n);
    let c_k = -(2.0 * q).ln() - c_i;
    let chi_k = if n > 0 && z0 <= q.sqrt() {
        Remainder { lin: 0.0, jet: k_small(n, q, z) }
    } else {
        Remainder { lin: -1.0, jet: k_remainder(n, z) + c_k }
    };
    let chi_i = if z0 < hankel_arg(n) {
        Remainder { lin: 0.0, jet: series_remainder(q, z) + c_i }
    } else {
        Remainder { lin: 1.0, jet: hankel_remainder(n, q, z) }
    };
    Ok((chi_i, chi_k))
}

fn hankel_arg(n: usize) -> f64 {
    (0.5 * (n * n) as f64).max(4.0)
}

/// `ln Gamma(n + 3/2)`.
fn ln_gamma_half(n: usize) -> f64 {
    0.5 * std::f64::consts::PI.ln() + (0..=n).map(|i| (i as f64 + 0.5).ln()).sum::<f64>()
}

/// Normalised coefficients `a_{n-m} / a_n` of the terminating form of `K`.
fn k_coeffs(n: usize) -> Vec<f64> {
    let mut b = vec![1.0; n + 1];
    for m in 1..=n {
        let (nf, mf) = (n as f64, m as f64);
        b[m] = b[m - 1] * 2.0 * (nf - mf + 1.0) / ((2.0 * nf - mf + 1.0) * mf);
    }
    b
}

/// Hankel coefficients `a_k(n)`.
fn hankel_coeffs(n: usize) -> Vec<f64> {
    let mut a = vec![1.0; n + 1];
    for k in 1..=n {
        let (nf, kf) = (n as f64, k as f64);
        a[k] = a[k - 1] * (nf + kf) * (nf - kf + 1.0) / (2.0 * kf);
    }
    a
}

/// `ln P(z)` with `P(z) = sum_m b_m z^m`; `-z` and `c_K` are added by the
/// caller.
fn k_remainder<const M: usize>(n: usize, z: Jet<M>) -> Jet<M> {
    let b = k_coeffs(n);
    if z.value() <= 4.0 * (n as f64 + 1.0) {
        return b.iter().rev().fold(Jet::constant(0.0), |acc, &c| acc * z + c).ln();
    }
    // z^n sum_m b_m z^(m - n), kept in range for z >> n
    let u = z.recip();
    let tail = b.iter().fold(Jet::constant(0.0), |acc, &c| acc * u + c);
    z.ln() * n as f64 + tail.ln()
}

/// `ln (z^q K_q(z))` near the origin from the reflection formula,
/// `Q(0) [T(z) - c z^(2q) S(z)]` with `T = sum_j (z^2/4)^j / (j! (1-q)_j)`.
/// Avoids the cancellation of `e^-z` against the terminating polynomial.
fn k_small<const M: usize>(n: usize, q: f64, z: Jet<M>) -> Jet<M> {
    let w = z * z * 0.25;
    let mut t = Jet::constant(1.0);
    for j in (1..=(30 + 2 * M)).rev() {
        let jf = j as f64;
        t = t * w * (1.0 / (jf * (jf - q))) + 1.0;
    }
    let lg_q1 = ln_gamma_half(n);
    let lg_q = lg_q1 - q.ln();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let c = sign * (std::f64::consts::PI.ln() - q * 4f64.ln() - lg_q - lg_q1).exp();
    let odd = (z.ln() * (2.0 * q) + series_remainder(q, z)).exp() * c;
    (t - odd).ln() + (q - 1.0) * std::f64::consts::LN_2 + lg_q
}

/// `ln sum_j (z^2/4)^j / (j! (q+1)_j)`.
fn series_remainder<const M: usize>(q: f64, z: Jet<M>) -> Jet<M> {
    let w = z * z * 0.25;
    let w0 = w.value();
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut terms = 0usize;
    for j in 1..100_000usize {
        term *= w0 / (j as f64 * (q + j as f64));
        sum += term;
        terms = j;
        if j as f64 > z.value() && term < 1e-18 * sum {
            break;
        }
    }
    terms += 2 * M;
    // Horner with the unit terms scaled by e^(-z0/2) to stay in range
    let half = 0.5 * z.value();
    let unit = (-half).exp();
    let mut acc = Jet::constant(unit);
    for j in (1..=terms).rev() {
        acc = acc * w * (1.0 / (j as f64 * (q + j as f64))) + unit;
    }
    acc.ln() + half
}

/// `ln I_q(z) - q ln z - z` from the terminating Hankel form.
fn hankel_remainder<const M: usize>(n: usize, q: f64, z: Jet<M>) -> Jet<M> {
    let a = hankel_coeffs(n);
    let u = z.recip();
    let lead = a.iter().rev().fold(Jet::constant(0.0), |acc, &c| acc * (-u) + c);
    let back = a.iter().rev().fold(Jet::constant(0.0), |acc, &c| acc * u + c);
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
    let full = lead + (z * -2.0).exp() * back * sign;
    let ln_2pi = (2.0 * std::f64::consts::PI).ln();
    full.ln() - z.ln() * (q + 0.5) - 0.5 * ln_2pi
}

/// Uniform-expansion remainders with `-/+ q ln q` dropped.
fn debye_chi<const M: usize>(q: f64, z0: f64) -> (Jet<M>, Jet<M>) {
    let t = Jet::<M>::variable(z0) / q;
    let w2 = t * t + 1.0;
    let w = w2.sqrt();
    let tau = w.recip();
    let eta = w - (w + 1.0).ln();
    let table = debye_u_table();
    let tau2 = tau * tau;
    let mut plus = Jet::constant(0.0);
    let mut minus = Jet::constant(0.0);
    let mut qk = 1.0;
    for (k, c) in table.iter().enumerate().take(EXTENDED_ORDER + 1) {
        // U_k has parity k in tau
        let mut acc = Jet::constant(0.0);
        let mut idx = c.len() as isize - 1;
        if (idx as usize) % 2 != k % 2 {
            idx -= 1;
        }
        while idx >= 0 {
            acc = acc * tau2 + c[idx as usize];
            idx -= 2;
        }
        if k % 2 == 1 {
            acc = acc * tau;
        }
        let term = acc * qk;
        plus = plus + term;
        minus = if k % 2 == 0 { minus + term } else { minus - term };
        qk /= q;
    }
    let quarter = w2.ln() * 0.25;
    let pi = std::f64::consts::PI;
    let chi_i = eta * q - quarter + plus.ln() - 0.5 * (2.0 * pi * q).ln();
    let chi_k = -(eta * q) - quarter + minus.ln() + 0.5 * (pi / (2.0 * q)).ln();
    (chi_i, chi_k)
}

/// Shift a `z`-jet to a `k`-jet along `z = a k`, keeping `N` terms.
fn along<const M: usize, const N: usize>(f: &Jet<M>, a: f64) -> Jet<N> {
    let mut c = [0.0; N];
    let mut s = 1.0;
    for (n, v) in c.iter_mut().enumerate() {
        *v = f.c[n] * s;
        s *= a;
    }
    Jet::from_coeffs(c)
}

/// Hyper-dual lift of `g(x) = coef ln x + lin k x + chi(k x)` at hyper-dual
/// `x`, as `k`-jets of the four components. The linear term is left out of
/// the value so the caller can cancel it exactly.
fn lift<const M: usize, const N: usize>(chi: &Remainder<M>, coef: f64, k0: f64, x: HyperDual) -> [Jet<N>; 4] {
    let x0 = x.re;
    let k = Jet::<N>::variable(k0);
    let d1 = chi.jet.differentiate();
    let d2 = d1.differentiate();
    let g0 = along::<M, N>(&chi.jet, x0) + coef * x0.ln();
    let g1 = k * along::<M, N>(&d1, x0) + k * chi.lin + coef / x0;
    let g2 = k * k * along::<M, N>(&d2, x0) - coef / (x0 * x0);
    [g0, g1 * x.a, g1 * x.b, g1 * x.ab + g2 * (x.a * x.b)]
}

/// `d^m/dk^m [I_q(k lo) K_q(k hi) / sqrt(lo hi)]` for `m < N` at `k0`.
///
/// Requires `M >= N + 2`.
pub fn ik_product_derivs<const M: usize, const N: usize>(
    q: f64,
    k0: f64,
    lo: HyperDual,
    hi: HyperDual,
) -> Result<[HyperDual; N], SpecFunError> {
    assert!(M >= N + 2, "jet length {M} too short for {N} derivatives");
    if !(k0 > 0.0 && lo.re > 0.0 && hi.re > 0.0) {
        return Err(SpecFunError::Domain("product needs positive wavenumber and radii".into()));
    }
    let (ci, _) = chi_jets::<M>(q, k0 * lo.re)?;
    let (_, ck) = chi_jets::<M>(q, k0 * hi.re)?;
    let f = lift::<M, N>(&ci, q - 0.5, k0, lo);
    let h = lift::<M, N>(&ck, -(q + 0.5), k0, hi);
    let lin = Jet::<N>::variable(k0) * (ci.lin * lo.re + ck.lin * hi.re);
    let lam = [f[0] + h[0] + lin, f[1] + h[1], f[2] + h[2], f[3] + h[3]];
    let g0 = lam[0].exp();
    let ga = g0 * lam[1];
    let gb = g0 * lam[2];
    let gab = g0 * (lam[3] + lam[1] * lam[2]);
    let mut out = [HyperDual::constant(0.0); N];
    for (m, o) in out.iter_mut().enumerate() {
        *o = HyperDual::new(g0.deriv(m), ga.deriv(m), gb.deriv(m), gab.deriv(m));
    }
    Ok(out)
}
