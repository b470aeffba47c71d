//! WKB series of the Langer-form radial equation.
//!
//! With `h = exp(-sum s_m)` the orders obey
//! `2 s0' s_m' = s_{m-1}'' - (nu'/nu) s_{m-1}' - sum_{k=1}^{m-1} s_k' s_{m-k}'`
//! plus the source `nu'/(2 nu)` at `m = 2`, starting from `s0' = sqrt(V)`.
//! Everything is evaluated on Taylor jets in `x`, so the derivatives the
//! recurrence consumes are exact.

use super::{select_nu, ModeIndex, RadialError, Reference};
use crate::media::{MediumProfile, Polarization};
use crate::numerics::quad::{integrate_scalar, AdaptiveOptions};
use crate::numerics::{Jet, Scalar};

/// Largest admissible `|s1'/s0'|` for using the asymptotic series.
pub const WKB_VALIDITY_LIMIT: f64 = 0.1;

/// Jet length used for seeding; supports orders up to `SEED_JET - 2`.
pub(crate) const SEED_JET: usize = 12;
pub(crate) const MAX_ORDER: usize = SEED_JET - 2;

pub(crate) struct InputJets<const N: usize> {
    pub v: Jet<N>,
    pub nu_log: Jet<N>,
    pub nu: Jet<N>,
    /// `V_h` and `V - V_h` when a comparison medium is given.
    pub reference: Option<(Jet<N>, Jet<N>)>,
}

pub(crate) fn input_jets<const N: usize>(
    profile: &MediumProfile,
    pol: Polarization,
    kappa: f64,
    p: f64,
    x: f64,
    reference: Option<&Reference>,
) -> InputJets<N> {
    let r = Jet::<N>::variable(x).exp();
    let (eps, mu) = profile.eps_mu(r, kappa);
    let nu = select_nu(pol, eps, mu);
    let kr2 = r * r * (kappa * kappa);
    let v = kr2 * eps * mu + p * p;
    let reference = reference.map(|h| {
        let (xe, xm) = profile.chi(r, kappa);
        (kr2 * (h.n * h.n) + p * p, kr2 * h.delta_n2(xe, xm))
    });
    InputJets { v, nu_log: nu.differentiate() / nu, nu, reference }
}

/// `s_0' .. s_{m_max}'` as jets.
pub(crate) fn series<const N: usize>(v: Jet<N>, nu_log: Jet<N>, m_max: usize) -> Vec<Jet<N>> {
    let s0 = v.sqrt();
    let two_s0 = s0 * 2.0;
    let mut s = Vec::with_capacity(m_max + 1);
    s.push(s0);
    for m in 1..=m_max {
        let prev = s[m - 1];
        let mut rm = prev.differentiate() - nu_log * prev;
        for k in 1..m {
            rm = rm - s[k] * s[m - k];
        }
        if m == 2 {
            rm = rm + nu_log * 0.5;
        }
        s.push(rm / two_s0);
    }
    s
}

/// Series of the comparison medium (`nu' = 0`) and the deviations
/// `s_m' - s_{m,h}'`, propagated without forming either difference.
pub(crate) fn deviation_series<const N: usize>(
    v_h: Jet<N>,
    dv: Jet<N>,
    nu_log: Jet<N>,
    m_max: usize,
) -> (Vec<Jet<N>>, Vec<Jet<N>>) {
    let zero = Jet::<N>::constant(0.0);
    let hom = series(v_h, zero, m_max);
    let s0h = hom[0];
    let s0 = (v_h + dv).sqrt();
    let ds0 = dv / (s0 + s0h);
    let two_s0 = (s0h + ds0) * 2.0;
    let mut dev = Vec::with_capacity(m_max + 1);
    dev.push(ds0);
    for m in 1..=m_max {
        let (hp, dp) = (hom[m - 1], dev[m - 1]);
        let mut dr = dp.differentiate() - nu_log * (hp + dp);
        for k in 1..m {
            dr = dr - (dev[k] * hom[m - k] + hom[k] * dev[m - k] + dev[k] * dev[m - k]);
        }
        if m == 2 {
            dr = dr + nu_log * 0.5;
        }
        dev.push((dr - ds0 * hom[m] * 2.0) / two_s0);
    }
    (hom, dev)
}

/// Number of orders kept under optimal truncation, and the size of the
/// first omitted term.
pub(crate) fn truncation(values: &[f64]) -> (usize, f64) {
    let mut keep = 1;
    for m in 2..values.len() {
        if values[m].abs() >= values[m - 1].abs() {
            return (m - 1, values[m].abs());
        }
        keep = m;
    }
    let last = values[keep].abs();
    let ratio = if keep >= 1 && values[keep - 1] != 0.0 { last / values[keep - 1].abs() } else { 1.0 };
    (keep, last * ratio)
}

/// `(L+, L-)` from the first `keep + 1` orders: `L+ = -sum s_m'`,
/// `L- = sum (-1)^m s_m'`.
pub(crate) fn log_derivs_from(values: &[f64], keep: usize) -> (f64, f64) {
    let mut lp = 0.0;
    let mut lm = 0.0;
    for (m, s) in values.iter().enumerate().take(keep + 1) {
        lp -= s;
        lm += if m % 2 == 0 { *s } else { -*s };
    }
    (lp, lm)
}

/// Values of `s_0' .. s_{m_max}'` at `x` (`m_max <= 10`).
pub fn wkb_orders(profile: &MediumProfile, mode: &ModeIndex, x: f64, m_max: usize) -> Vec<f64> {
    let m_max = m_max.min(MAX_ORDER);
    let jets = input_jets::<SEED_JET>(profile, mode.polarization, mode.kappa, mode.p(), x, None);
    series(jets.v, jets.nu_log, m_max).iter().map(|j| j.value()).collect()
}

/// `(s0', s1', s2')` at `x`.
pub fn wkb_series(profile: &MediumProfile, mode: &ModeIndex, x: f64) -> (f64, f64, f64) {
    let jets = input_jets::<4>(profile, mode.polarization, mode.kappa, mode.p(), x, None);
    let s = series(jets.v, jets.nu_log, 2);
    (s[0].value(), s[1].value(), s[2].value())
}

/// `s2'` from its closed expression in the derivatives of `V` and
/// `nu'/nu`, independent of the recurrence.
pub fn wkb_orders_closed_s2(profile: &MediumProfile, mode: &ModeIndex, x: f64) -> f64 {
    let jets = input_jets::<4>(profile, mode.polarization, mode.kappa, mode.p(), x, None);
    let (v, v1, v2) = (jets.v.deriv(0), jets.v.deriv(1), jets.v.deriv(2));
    let (q, q1) = (jets.nu_log.deriv(0), jets.nu_log.deriv(1));
    let s0 = v.sqrt();
    let s0d = v1 / (2.0 * s0);
    let s0dd = v2 / (2.0 * s0) - v1 * v1 / (4.0 * v * s0);
    let s1 = s0d / (2.0 * s0) - 0.5 * q;
    let s1d = (s0dd * s0 - s0d * s0d) / (2.0 * s0 * s0) - 0.5 * q1;
    (s1d - q * s1 - s1 * s1 + 0.5 * q) / (2.0 * s0)
}

/// Validity parameter `|s1'/s0'|`.
pub fn wkb_validity(profile: &MediumProfile, mode: &ModeIndex, x: f64) -> f64 {
    let (s0, s1, _) = wkb_series(profile, mode, x);
    (s1 / s0).abs()
}

/// Optimally truncated WKB log-derivatives `(L+, L-)` at `x` and the
/// estimated truncation error.
pub fn wkb_log_derivs(profile: &MediumProfile, mode: &ModeIndex, x: f64) -> (f64, f64, f64) {
    let values = wkb_orders(profile, mode, x, MAX_ORDER);
    let (keep, err) = truncation(&values);
    let (lp, lm) = log_derivs_from(&values, keep);
    (lp, lm, err)
}

fn even_sum(profile: &MediumProfile, mode: &ModeIndex, x: f64) -> (f64, f64) {
    let jets = input_jets::<4>(profile, mode.polarization, mode.kappa, mode.p(), x, None);
    let s = series(jets.v, jets.nu_log, 2);
    (s[0].value() + s[2].value(), jets.nu.value())
}

/// Asymptotic Green coefficient from the even WKB orders `s0' + s2'`:
/// `u = -1/2 sqrt(nu nu0 / (sE'(x) sE'(x0))) exp(-|int sE'|)`.
pub fn wkb_green(profile: &MediumProfile, mode: &ModeIndex, r: f64, r0: f64) -> Result<f64, RadialError> {
    for &rr in &[r, r0] {
        if !(rr > 0.0) {
            return Err(RadialError::InvalidMode(format!("radius must be positive, got {rr}")));
        }
        let param = wkb_validity(profile, mode, rr.ln());
        if param > WKB_VALIDITY_LIMIT {
            return Err(RadialError::WkbValidity { r: rr, param });
        }
    }
    let (lo, hi) = if r <= r0 { (r.ln(), r0.ln()) } else { (r0.ln(), r.ln()) };
    let (se_lo, nu_lo) = even_sum(profile, mode, lo);
    let (se_hi, nu_hi) = even_sum(profile, mode, hi);
    let phase = if hi > lo {
        let opts = AdaptiveOptions { rel_tol: 1e-13, ..Default::default() };
        integrate_scalar(|x| even_sum(profile, mode, x).0, lo, hi, opts).0
    } else {
        0.0
    };
    let u = -0.5 * (nu_lo * nu_hi / (se_lo * se_hi)).sqrt() * (-phase).exp();
    Ok((-0.5 * (lo + hi)).exp() * u)
}
