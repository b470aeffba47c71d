//! Hermite polynomials and orthonormal Hermite functions.

/// Physicists' `H_n(x)` as `(mantissa, ln_scale)`, value `mantissa * e^ln_scale`.
pub fn hermite(n: usize, x: f64) -> (f64, f64) {
    let mut scale = 0.0;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
        let a = h1.abs();
        if a > 1e200 || (a < 1e-200 && a > 0.0) {
            let s = a.ln();
            h0 /= a;
            h1 /= a;
            scale += s;
        }
    }
    (h1, scale)
}

/// `phi_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))` and `phi_n'(x)`.
pub fn hermite_function(n: usize, x: f64) -> (f64, f64) {
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    let mut prev = 0.0;
    let mut cur = p0;
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    // phi_n' = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}
    let nf = n as f64;
    let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
    let d = (nf / 2.0).sqrt() * prev - ((nf + 1.0) / 2.0).sqrt() * next;
    (cur, d)
}

/// `e^{-t/2} L_n^(alpha)(t)` by the three-term recurrence in `n`, with the
/// weight carried from the start so no intermediate overflows.
pub fn scaled_laguerre(n: usize, alpha: f64, t: f64) -> f64 {
    let w = (-0.5 * t).exp();
    if n == 0 {
        return w;
    }
    let (mut l0, mut l1) = (w, w * (1.0 + alpha - t));
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 + alpha - t) * l1 - (kf + alpha) * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
    }
    l1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        let x = 0.7;
        let (h3, s) = hermite(3, x);
        assert!((h3 * s.exp() - (8.0 * x * x * x - 12.0 * x)).abs() < 1e-13);
        let (f1, d1) = hermite_function(1, x);
        let c = 2f64.sqrt() * std::f64::consts::PI.powf(-0.25);
        assert!((f1 - c * x * (-0.5 * x * x).exp()).abs() < 1e-15);
        assert!((d1 - c * (1.0 - x * x) * (-0.5 * x * x).exp()).abs() < 1e-15);
    }

    #[test]
    fn large_order_does_not_overflow() {
        let (m, s) = hermite(401, 3.0);
        assert!(m.is_finite() && s.is_finite() && s > 100.0);
    }

    #[test]
    fn laguerre_matches_odd_hermite() {
        // H_{2l+1}(x) = (-1)^l 2^{2l+1} l! x L_l^(1/2)(x^2)
        for l in [0usize, 1, 4, 9] {
            for x in [0.3, 1.1, 2.4] {
                let (m, s) = hermite(2 * l + 1, x);
                let lf: f64 = (1..=l).map(|i| i as f64).product();
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let lag = scaled_laguerre(l, 0.5, x * x) * (0.5 * x * x).exp();
                let rhs = sign * 2f64.powi(2 * l as i32 + 1) * lf * x * lag;
                assert!((m * s.exp() - rhs).abs() < 1e-12 * rhs.abs().max(1.0));
            }
        }
    }
}
