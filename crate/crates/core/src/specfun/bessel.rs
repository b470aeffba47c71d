//! Modified Bessel functions `I_p`, `K_p` of real order and argument.
//!
//! Values are returned with an explicit exponent so that very large and very
//! small magnitudes stay representable. Large orders use the uniform
//! expansion directly. Otherwise `K` comes from Temme's series (small
//! argument) or Steed's continued fraction and is recurred upward in order;
//! the ratio `I_{p+1}/I_p` is recurred downward from a uniform-expansion
//! seed, and `I` itself follows from the Wronskian.

use super::olver::{uniform_exponent, uniform_ik};
use super::SpecFunError;

/// Orders at and above this use the uniform expansion.
pub const UNIFORM_ORDER: f64 = 150.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const CF_EPS: f64 = 1e-16;
const CF_MAXIT: usize = 100_000;
const RESCALE: f64 = 1e250;

/// `I = i e^eta`, `I' = di e^eta`, `K = k e^-eta`, `K' = dk e^-eta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIK {
    pub order: f64,
    pub x: f64,
    pub eta: f64,
    pub i: f64,
    pub di: f64,
    pub k: f64,
    pub dk: f64,
}

impl ScaledIK {
    pub fn i_value(&self) -> f64 {
        self.i * self.eta.exp()
    }
    pub fn k_value(&self) -> f64 {
        self.k * (-self.eta).exp()
    }
    /// `x I'/I`.
    pub fn log_deriv_i(&self) -> f64 {
        self.x * self.di / self.i
    }
    /// `x K'/K`.
    pub fn log_deriv_k(&self) -> f64 {
        self.x * self.dk / self.k
    }
    /// `I_p(x) K_p(x)`, exact in the scaling.
    pub fn product(&self) -> f64 {
        self.i * self.k
    }
}

/// `1/Gamma(1+mu)`, `1/Gamma(1-mu)` and Temme's combinations for `|mu| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    if mu.abs() < 1e-3 {
        const A3: f64 = -0.655_878_071_520_253_8;
        const A4: f64 = -0.042_002_635_034_095_2;
        const A5: f64 = 0.166_538_611_382_291_5;
        const A6: f64 = -0.042_197_734_555_544_3;
        let m2 = mu * mu;
        let gam1 = -(EULER_GAMMA + A4 * m2 + A6 * m2 * m2);
        let gam2 = 1.0 + A3 * m2 + A5 * m2 * m2;
        let gampl = gam2 - mu * gam1;
        let gammi = gam2 + mu * gam1;
        return (gam1, gam2, gampl, gammi);
    }
    let gampl = 1.0 / statrs::function::gamma::gamma(1.0 + mu);
    let gammi = 1.0 / statrs::function::gamma::gamma(1.0 - mu);
    ((gammi - gampl) / (2.0 * mu), 0.5 * (gammi + gampl), gampl, gammi)
}

/// `K_mu(x)` and `K_{mu+1}(x)` for `|mu| <= 1/2` as mantissas with a common
/// natural-log scale.
fn k_pair_low(mu: f64, x: f64) -> (f64, f64, f64) {
    let half = (mu.abs() - 0.5).abs() < 1e-15;
    if half {
        let k12 = (std::f64::consts::PI / (2.0 * x)).sqrt();
        // mu = -1/2: K_{-1/2} = K_{1/2}
        return (k12, k12, -x);
    }
    let xi = 1.0 / x;
    if x < 2.0 {
        let x2 = 0.5 * x;
        let pimu = std::f64::consts::PI * mu;
        let fact = if pimu.abs() < 1e-16 { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < 1e-16 { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..CF_MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * CF_EPS {
                break;
            }
        }
        (sum, sum1 * 2.0 * xi, 0.0)
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..CF_MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < CF_EPS {
                break;
            }
        }
        h *= a1;
        let k_mu = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
        let k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
        (k_mu, k_mu1, -x)
    }
}

fn check(p: f64, x: f64) -> Result<(), SpecFunError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(SpecFunError::Domain(format!("Bessel argument must be positive and finite, got {x}")));
    }
    if !(p >= 0.0 && p.is_finite()) {
        return Err(SpecFunError::Domain(format!("Bessel order must be non-negative, got {p}")));
    }
    Ok(())
}

/// `I_{p+1}(x) / I_p(x)` by downward recurrence from a uniform seed.
fn i_ratio(p: f64, x: f64) -> f64 {
    let steps = (UNIFORM_ORDER - p).ceil().max(1.0) as usize;
    let top = p + steps as f64;
    let (_, i, di, _, _) = uniform_ik(top, x, 6);
    let mut rho = di / i - top / x;
    for j in (1..=steps).rev() {
        let nu = p + j as f64;
        rho = 1.0 / (2.0 * nu / x + rho);
    }
    rho
}

/// Scaled `I_p, I_p', K_p, K_p'` at `x`.
pub fn bessel_ik(p: f64, x: f64) -> Result<ScaledIK, SpecFunError> {
    check(p, x)?;
    let eta = uniform_exponent(p, x);
    if p >= UNIFORM_ORDER {
        let (_, i, di, k, dk) = uniform_ik(p, x, 6);
        return Ok(ScaledIK { order: p, x, eta, i, di, k, dk });
    }
    let nl = (p + 0.5).floor();
    let mu = p - nl;
    let (mut k0, mut k1, mut scale) = k_pair_low(mu, x);
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + k0;
        k0 = k1;
        k1 = next;
        if k1.abs() > RESCALE {
            k0 /= RESCALE;
            k1 /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    let rho = i_ratio(p, x);
    // K = kt e^scale; I = 1 / (x (K_{p+1} + rho K_p))
    let kt = k0;
    let dkt = p / x * k0 - k1;
    let it = 1.0 / (x * (k1 + rho * k0));
    let shift = scale + eta;
    let k = kt * shift.exp();
    let dk = dkt * shift.exp();
    let i = it * (-shift).exp();
    let di = i * (rho + p / x);
    Ok(ScaledIK { order: p, x, eta, i, di, k, dk })
}

/// Scaled values for the consecutive orders `p0, p0 + 1, ..., p0 + n - 1`.
/// Shares one upward `K` recurrence and one downward ratio sweep.
pub fn bessel_ik_ladder(p0: f64, n: usize, x: f64) -> Result<Vec<ScaledIK>, SpecFunError> {
    check(p0, x)?;
    if n == 0 {
        return Ok(vec![]);
    }
    let p_last = p0 + (n - 1) as f64;
    let mut out = Vec::with_capacity(n);
    // Ratios rho_p = I_{p+1}/I_p for every order in the ladder.
    let mut rho = vec![0.0; n];
    {
        let top_steps = (UNIFORM_ORDER - p_last).ceil().max(1.0) as usize;
        let top = p_last + top_steps as f64;
        let (_, i, di, _, _) = uniform_ik(top, x, 6);
        let mut r = di / i - top / x;
        for j in (1..=top_steps).rev() {
            r = 1.0 / (2.0 * (p_last + j as f64) / x + r);
        }
        rho[n - 1] = r;
        for j in (0..n - 1).rev() {
            let nu = p0 + (j + 1) as f64;
            rho[j] = 1.0 / (2.0 * nu / x + rho[j + 1]);
        }
    }
    let nl = (p0 + 0.5).floor();
    let mu = p0 - nl;
    let (mut k0, mut k1, mut scale) = k_pair_low(mu, x);
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + k0;
        k0 = k1;
        k1 = next;
        if k1.abs() > RESCALE {
            k0 /= RESCALE;
            k1 /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    for j in 0..n {
        let p = p0 + j as f64;
        let eta = uniform_exponent(p, x);
        if p >= UNIFORM_ORDER {
            let (_, i, di, k, dk) = uniform_ik(p, x, 6);
            out.push(ScaledIK { order: p, x, eta, i, di, k, dk });
        } else {
            let shift = scale + eta;
            let it = 1.0 / (x * (k1 + rho[j] * k0));
            let i = it * (-shift).exp();
            out.push(ScaledIK {
                order: p,
                x,
                eta,
                i,
                di: i * (rho[j] + p / x),
                k: k0 * shift.exp(),
                dk: (p / x * k0 - k1) * shift.exp(),
            });
        }
        let next = 2.0 * (p + 1.0) / x * k1 + k0;
        k0 = k1;
        k1 = next;
        if k1.abs() > RESCALE {
            k0 /= RESCALE;
            k1 /= RESCALE;
            scale += RESCALE.ln();
        }
    }
    Ok(out)
}

/// Taylor coefficients `c_n = y^(n)(x)/n!`, `n < N`, of a solution of the
/// modified Bessel equation of order `p` given `y(x)` and `y'(x)`.
pub fn bessel_taylor<const N: usize>(p: f64, x: f64, y: f64, dy: f64) -> [f64; N] {
    let mut c = [0.0; N];
    if N > 0 {
        c[0] = y;
    }
    if N > 1 {
        c[1] = dy;
    }
    // (x+t)^2 y'' + (x+t) y' - ((x+t)^2 + p^2) y = 0, coefficient of t^n
    for n in 0..N.saturating_sub(2) {
        let fnn = n as f64;
        let cm1 = if n >= 1 { c[n - 1] } else { 0.0 };
        let cm2 = if n >= 2 { c[n - 2] } else { 0.0 };
        let s = 2.0 * x * fnn * (fnn + 1.0) * c[n + 1]
            + fnn * (fnn - 1.0) * c[n]
            + x * (fnn + 1.0) * c[n + 1]
            + fnn * c[n]
            - (x * x + p * p) * c[n]
            - 2.0 * x * cm1
            - cm2;
        c[n + 2] = -s / (x * x * (fnn + 2.0) * (fnn + 1.0));
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_forms() {
        for &x in &[0.01, 0.3, 1.0, 2.5, 10.0, 80.0] {
            let b = bessel_ik(0.5, x).unwrap();
            let i = (2.0 / (std::f64::consts::PI * x)).sqrt() * x.sinh();
            let k = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((b.i_value() / i - 1.0).abs() < 1e-13, "I at {x}");
            assert!((b.k_value() / k - 1.0).abs() < 1e-13, "K at {x}");
        }
    }

    #[test]
    fn wronskian_holds() {
        for &p in &[0.0, 0.3, 1.5, 7.5, 40.5, 149.5, 200.5, 400.5] {
            for &x in &[0.05, 1.0, 3.0, 30.0, 300.0] {
                let b = bessel_ik(p, x).unwrap();
                let w = x * (b.i * b.dk - b.di * b.k);
                assert!((w + 1.0).abs() < 1e-12, "p={p} x={x} w={w}");
            }
        }
    }

    #[test]
    fn ladder_matches_single_calls() {
        let x = 7.3;
        let lad = bessel_ik_ladder(0.5, 220, x).unwrap();
        for (j, b) in lad.iter().enumerate().step_by(13) {
            let s = bessel_ik(0.5 + j as f64, x).unwrap();
            assert!((b.i / s.i - 1.0).abs() < 1e-12);
            assert!((b.k / s.k - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn integer_order_reference_values() {
        // I_0(1), K_0(1), I_1(2), K_1(2)
        let b0 = bessel_ik(0.0, 1.0).unwrap();
        assert!((b0.i_value() - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((b0.k_value() - 0.421_024_438_240_708_3).abs() < 1e-14);
        let b1 = bessel_ik(1.0, 2.0).unwrap();
        assert!((b1.i_value() - 1.590_636_854_637_329).abs() < 1e-13);
        assert!((b1.k_value() - 0.139_865_881_816_522_43).abs() < 1e-14);
    }

    #[test]
    fn taylor_coefficients_follow_the_ode() {
        let p = 3.5;
        let x = 2.0;
        let b = bessel_ik(p, x).unwrap();
        let c = bessel_taylor::<6>(p, x, b.i, b.di);
        let h = 1e-3;
        let bp = bessel_ik(p, x + h).unwrap();
        let scale = (bp.eta - b.eta).exp();
        let series: f64 = c.iter().enumerate().map(|(n, cn)| cn * h.powi(n as i32)).sum();
        assert!((series / (bp.i * scale) - 1.0).abs() < 1e-13);
    }
}
