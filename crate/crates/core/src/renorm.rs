//! Angular-mode coefficients of the renormalizer `D0 + D1`, the reference
//! divergency series of the bare stress and the gap term.
//!
//! `D0 + D1` is expanded near the source as
//! `-(1/sqrt(nu nu0)) [f_{-1} + c f_1 + kappa alpha0 gamma^2 f_0
//! + c kappa alpha0 gamma^2 f_2 + (beta1 chi / kappa) f_0]` with
//! `f_alpha = rho^alpha e^{-k rho} / (4 pi)`, `k = kappa chi` and
//! `c = n0^2 R0 / 48`. Mode coefficients of `f_alpha` are
//! `(-d/dk)^{alpha+1}` of `I_p(k r<) K_p(k r>) / sqrt(r r0)`, and
//! `gamma^2 ~ 2 (1 - cos gamma)` couples neighbouring orders through
//! `(cos gamma f)_l = [l f_{l-1} + (l+1) f_{l+1}] / (2l+1)`.
//!
//! Radial dependence is carried on hyper-dual numbers (`e1` on `r`, `e2` on
//! `r0`), so one evaluation yields the value, both first partials and the
//! mixed partial. The scalar mode coefficient of the Green function is
//! `nu nu0` times the mode coefficient of the position-space wave.

use crate::geo_optics::{beta1, coefficient_jets, GeoError, ValidityBound};
use crate::media::{MediumError, MediumProfile, Polarization, TailCoefficients};
use crate::numerics::{HyperDual, Scalar};
use crate::radial_green::{coincidence_deviation, ModeIndex, RadialError, Reference};
use crate::specfun::{ik_product_derivs, SpecFunError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenormError {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error("unsupported power alpha = {0}; expected -1, 0, 1 or 2")]
    UnsupportedAlpha(i32),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("profile has no high-frequency tail (non-dispersive)")]
    MissingTail,
}

/// Highest `k`-derivative of the Bessel products that is needed:
/// `alpha + 1 <= 3` plus two orders for the Taylor shift in `k`.
const K_DERIVS: usize = 6;
/// Taylor length of the logarithmic remainders in their argument.
const CHI_TAYLOR: usize = K_DERIVS + 2;

/// `d^m/dk^m [I_q(k r<) K_q(k r>)] / sqrt(r r0)`, `m < K_DERIVS`, for the
/// three orders `q = p - 1, p, p + 1`.
type Ladder = [[HyperDual; K_DERIVS]; 3];

fn ladder(l: u32, k: f64, r: HyperDual, r0: HyperDual) -> Result<Ladder, SpecFunError> {
    let (r_lo, r_hi) = if r.re >= r0.re { (r0, r) } else { (r, r0) };
    let p = l as f64 + 0.5;
    let mut out = [[HyperDual::constant(0.0); K_DERIVS]; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = ik_product_derivs::<CHI_TAYLOR, K_DERIVS>(p - 1.0 + j as f64, k, r_lo, r_hi)?;
    }
    Ok(out)
}

/// `f_{alpha, q}` at `k_base + dk`, Taylor-shifted to second order in `dk`.
fn f_alpha(lad: &Ladder, order: usize, alpha: i32, dk: HyperDual) -> HyperDual {
    let m0 = (alpha + 1) as usize;
    let d = &lad[order];
    let sign = if m0 % 2 == 0 { 1.0 } else { -1.0 };
    (d[m0] + dk * d[m0 + 1] + dk * dk * (d[m0 + 2] * 0.5)) * sign
}

/// Mode coefficient of `2 (1 - cos gamma) f_alpha`.
fn gamma2_alpha(lad: &Ladder, l: u32, alpha: i32, dk: HyperDual) -> HyperDual {
    let lf = l as f64;
    let cos_part = (f_alpha(lad, 0, alpha, dk) * lf + f_alpha(lad, 2, alpha, dk) * (lf + 1.0)) / (2.0 * lf + 1.0);
    (f_alpha(lad, 1, alpha, dk) - cos_part) * 2.0
}

fn check_alpha(alpha: i32) -> Result<(), RenormError> {
    if (-1..=2).contains(&alpha) {
        Ok(())
    } else {
        Err(RenormError::UnsupportedAlpha(alpha))
    }
}

fn hd4(h: HyperDual) -> [f64; 4] {
    [h.re, h.a, h.b, h.ab]
}

/// Mode coefficient `f_{alpha,l}(r, r0; k)` of `rho^alpha e^{-k rho} / (4 pi)`
/// as `[f, df/dr, df/dr0, d2f/dr dr0]` (one-sided from `r > r0` at
/// coincidence).
pub fn f_coefficient(alpha: i32, l: u32, k: f64, r: f64, r0: f64) -> Result<[f64; 4], RenormError> {
    check_alpha(alpha)?;
    if l == 0 {
        return Err(RenormError::Invalid("l must be at least 1".into()));
    }
    if !(k > 0.0 && r > 0.0 && r0 > 0.0) {
        return Err(RenormError::Invalid(format!("need k, r, r0 > 0, got k = {k}, r = {r}, r0 = {r0}")));
    }
    let lad = ladder(l, k, HyperDual::var_a(r), HyperDual::var_b(r0))?;
    Ok(hd4(f_alpha(&lad, 1, alpha, HyperDual::constant(0.0))))
}

/// Mode coefficient of `2 (1 - cos gamma) f_alpha` at `k`.
pub fn gamma2_coefficient(alpha: i32, l: u32, k: f64, r: f64, r0: f64) -> Result<[f64; 4], RenormError> {
    check_alpha(alpha)?;
    if l == 0 {
        return Err(RenormError::Invalid("l must be at least 1".into()));
    }
    let lad = ladder(l, k, HyperDual::var_a(r), HyperDual::var_b(r0))?;
    Ok(hd4(gamma2_alpha(&lad, l, alpha, HyperDual::constant(0.0))))
}

/// Source-point data entering the expansion, as hyper-duals in `(r, r0)`.
struct SourceData {
    /// `sqrt(nu(r) nu(r0))`
    nu_mean: HyperDual,
    chi: HyperDual,
    /// `n0^2 R0 / 48`
    c: HyperDual,
    kappa_alpha0: HyperDual,
    /// `beta1 chi / kappa`
    scatter: HyperDual,
}

fn source_data(profile: &MediumProfile, pol: Polarization, kappa: f64, r: HyperDual, r0: HyperDual) -> SourceData {
    let select = |e: HyperDual, m: HyperDual| match pol {
        Polarization::E => m,
        Polarization::M => e,
    };
    let (e, m) = profile.eps_mu(r, kappa);
    let (e0, m0) = profile.eps_mu(r0, kappa);
    let nu_mean = (select(e, m) * select(e0, m0)).sqrt();

    let (ej, mj) = profile.eps_mu_jet::<5>(r0.re, kappa);
    let nj = (ej * mj).sqrt();
    let dn = |k: usize| r0.taylor(nj.deriv(k), nj.deriv(k + 1), 0.5 * nj.deriv(k + 2));
    let (n0, n1, n2) = (dn(0), dn(1), dn(2));
    let d = r - r0;
    let chi = n0 + n1 * d * 0.5 + n2 * d * d * (1.0 / 6.0);

    let cj = coefficient_jets(profile, r0.re, kappa, pol);
    let lift = |j: crate::numerics::Jet<6>| r0.taylor(j.c[0], j.c[1], j.c[2]);
    let c = n0 * n0 * lift(cj.curvature) * (1.0 / 48.0);
    let kappa_alpha0 = lift(cj.alpha0) * kappa;
    let scatter = lift(cj.beta1) * chi * (1.0 / kappa);
    SourceData { nu_mean, chi, c, kappa_alpha0, scatter }
}

/// Per-term pieces of the renormalizer coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormTerms {
    /// `1/rho` term
    pub d0_1: [f64; 4],
    /// curvature `rho` term
    pub d0_2: [f64; 4],
    /// `kappa alpha0 gamma^2` term
    pub d0_3: [f64; 4],
    /// curvature times `kappa alpha0 gamma^2 rho^2` term
    pub d0_4: [f64; 4],
    /// first scattering `beta1 / kappa` term
    pub d1: [f64; 4],
}

impl RenormTerms {
    pub fn sum(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for t in [self.d0_1, self.d0_2, self.d0_3, self.d0_4, self.d1] {
            for (o, v) in out.iter_mut().zip(t) {
                *o += v;
            }
        }
        out
    }
}

/// Renormalizer mode coefficient in the layout of
/// [`crate::radial_green::RadialMode::green_all`]:
/// `[g, dg/dr, dg/dr0, d2g/dr dr0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormCoefficient {
    pub mode: ModeIndex,
    pub r: f64,
    pub r0: f64,
    pub value: [f64; 4],
    pub terms: RenormTerms,
}

struct TermsHd {
    d0_1: HyperDual,
    d0_2: HyperDual,
    d0_3: HyperDual,
    d0_4: HyperDual,
    d1: HyperDual,
}

/// The bracket terms without the leading `-sqrt(nu nu0)`.
fn bracket(lad: &Ladder, l: u32, src: &SourceData, dk: HyperDual) -> TermsHd {
    let f0 = f_alpha(lad, 1, 0, dk);
    TermsHd {
        d0_1: f_alpha(lad, 1, -1, dk),
        d0_2: src.c * f_alpha(lad, 1, 1, dk),
        d0_3: src.kappa_alpha0 * gamma2_alpha(lad, l, 0, dk),
        d0_4: src.c * src.kappa_alpha0 * gamma2_alpha(lad, l, 2, dk),
        d1: src.scatter * f0,
    }
}

/// Mode coefficient of the renormalizer between `r` and `r0`.
pub fn renorm_coeff(profile: &MediumProfile, mode: &ModeIndex, r: f64, r0: f64) -> Result<RenormCoefficient, RenormError> {
    ValidityBound::default().check(r, r0, 0.0)?;
    profile.check_radius(r)?;
    profile.check_radius(r0)?;
    let (rh, r0h) = (HyperDual::var_a(r), HyperDual::var_b(r0));
    let src = source_data(profile, mode.polarization, mode.kappa, rh, r0h);
    let k_base = mode.kappa * src.chi.re;
    let lad = ladder(mode.l, k_base, rh, r0h)?;
    let dk = (src.chi * mode.kappa).delta();
    let t = bracket(&lad, mode.l, &src, dk);
    let pre = -src.nu_mean;
    let terms = RenormTerms {
        d0_1: hd4(pre * t.d0_1),
        d0_2: hd4(pre * t.d0_2),
        d0_3: hd4(pre * t.d0_3),
        d0_4: hd4(pre * t.d0_4),
        d1: hd4(pre * t.d1),
    };
    Ok(RenormCoefficient { mode: *mode, r, r0, value: terms.sum(), terms })
}

/// Renormalizer coincidence values at `reference.r` minus the exact Green
/// function of the comparison medium: `(g, d_r d_r0 (r r0 g) at r -> r0+)`.
/// The comparison medium is the one subtracted by
/// [`crate::radial_green::coincidence_deviation`], so bare minus
/// renormalizer is the difference of the two deviations.
pub fn renorm_deviation(profile: &MediumProfile, mode: &ModeIndex, reference: &Reference) -> Result<(f64, f64), RenormError> {
    let re = reference.r;
    let (rh, r0h) = (HyperDual::var_a(re), HyperDual::var_b(re));
    let src = source_data(profile, mode.polarization, mode.kappa, rh, r0h);
    let k_base = reference.k();
    let lad = ladder(mode.l, k_base, rh, r0h)?;
    let dk = src.chi * mode.kappa - k_base;
    let t = bracket(&lad, mode.l, &src, dk);
    // f_{-1}(k_base + dk) - f_{-1}(k_base), without the cancelling constant
    let d = &lad[1];
    let shift = dk * d[1] + dk * dk * (d[2] * 0.5);
    let nu_dev = src.nu_mean - reference.nu;
    let nu_dev = HyperDual { re: 0.0, ..nu_dev };
    let rest = t.d0_2 + t.d0_3 + t.d0_4 + t.d1;
    let dev = -(nu_dev * t.d0_1) - shift * reference.nu - src.nu_mean * rest;
    Ok((dev.re, (rh * r0h * dev).ab))
}

/// Order of divergency in the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergencyOrder {
    Lambda4,
    Lambda2,
    LogLambda,
}

/// Coefficients of the bare spectral stress `(W_rr, W_thth)` for the
/// given order, summed over both polarizations and multiplied by
/// `2l + 1`; `tail` holds `[n_inf, n_inf', n_inf'']`.
pub fn divergency_reference(
    tail: &TailCoefficients,
    p: f64,
    kappa: f64,
    r: f64,
    order: DivergencyOrder,
) -> Result<(f64, f64), RenormError> {
    if !(kappa > 0.0) {
        return Err(RenormError::Invalid(format!("kappa must be positive, got {kappa}")));
    }
    let [n, n1, n2] = tail.n_inf;
    let w2 = p * p + kappa * kappa * r * r;
    let w = w2.sqrt();
    let r3 = r * r * r;
    let (p2, w4) = (p * p, w2 * w2);
    let (p4, w6) = (p2 * p2, w4 * w2);
    let (p6, w8) = (p4 * p2, w4 * w4);
    let p8 = p4 * p4;
    let q = w2 - p2;
    Ok(match order {
        DivergencyOrder::Lambda4 => (-4.0 * p * w / r3, 2.0 * p * p2 / (r3 * w)),
        DivergencyOrder::Lambda2 => {
            let rr = p * (-8.0 * r * r * w4 * n + p4 + w4) / (2.0 * r3 * w4 * w);
            let tt = (-8.0 * p * p2 * r * r * w4 * n + 5.0 * p4 * p2 * p - 6.0 * p4 * p * w2 + p * p2 * w4 - 2.0 * p * w6)
                / (4.0 * r3 * w6 * w);
            (rr, tt)
        }
        DivergencyOrder::LogLambda => {
            let rr = p / (32.0 * r3 * w8 * w2 * w * q)
                * (32.0 * p4 * r3 * w6 * n1
                    - 16.0 * r * r * w4 * n * q * (5.0 * p4 + w4)
                    - q * q * (105.0 * p6 - 63.0 * p4 * w2 + 7.0 * p2 * w4 - w6)
                    - 64.0 * p2 * r3 * r * w8 * n * n);
            let tt = p / (64.0 * r3 * w8 * w4 * w * q)
                * (-(q * q) * (1155.0 * p8 - 1617.0 * p6 * w2 + 553.0 * p4 * w4 - 47.0 * p2 * w6 + 4.0 * w8)
                    + 16.0
                        * r
                        * r
                        * w4
                        * (2.0 * p4 * r * w2 * (r * w2 * n2 - 5.0 * q * n1)
                            + n * (35.0 * p8 - 65.0 * p6 * w2 + 33.0 * p4 * w4 - 5.0 * p2 * w6 + 2.0 * w8)
                            + 4.0 * p2 * r * r * (2.0 * w2 - 3.0 * p2) * w4 * n * n));
            (rr, tt)
        }
    })
}

fn tail_at(profile: &MediumProfile, r: f64) -> Result<TailCoefficients, RenormError> {
    profile.check_radius(r)?;
    profile.tails(r).ok_or(RenormError::MissingTail)
}

/// Bare minus `D0` angular stress left at large frequency:
/// `(p^3/w^3) (r n_inf'' - n_inf') / (3 kappa^2 r^2)`, in the normalization
/// of [`divergency_reference`].
pub fn gap_term(profile: &MediumProfile, p: f64, kappa: f64, r: f64) -> Result<f64, RenormError> {
    let t = tail_at(profile, r)?;
    Ok(gap_from_tail(&t, p, kappa, r))
}

pub fn gap_from_tail(tail: &TailCoefficients, p: f64, kappa: f64, r: f64) -> f64 {
    let w = (p * p + kappa * kappa * r * r).sqrt();
    let [_, n1, n2] = tail.n_inf;
    (p / w).powi(3) * (r * n2 - n1) / (3.0 * kappa * kappa * r * r)
}

/// The same left-over expressed through the scattering amplitudes,
/// `(p^3/w^3) 2 (beta_E + beta_M) / r`.
pub fn gap_term_from_beta(profile: &MediumProfile, p: f64, kappa: f64, r: f64) -> Result<f64, RenormError> {
    let be = beta1(profile, r, kappa, Polarization::E)?;
    let bm = beta1(profile, r, kappa, Polarization::M)?;
    let w = (p * p + kappa * kappa * r * r).sqrt();
    Ok((p / w).powi(3) * 2.0 * (be + bm) / r)
}

/// Angular stress of one mode at coincidence after subtracting `D0` and
/// after subtracting `D0 + D1`, next to the gap term, all in the
/// normalization of [`divergency_reference`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapResidual {
    pub l: u32,
    pub kappa: f64,
    pub w: f64,
    pub bare_minus_d0: f64,
    pub bare_minus_d0_d1: f64,
    pub gap: f64,
}

/// `W_th^th` summed over polarizations: `-(2l+1) l(l+1) g / (nu r^2)`. The
/// bare value enters through the exact coincidence deviation, so only the
/// differences are formed and the divergent pieces never appear.
pub fn gap_residual(profile: &MediumProfile, l: u32, kappa: f64, r: f64) -> Result<GapResidual, RenormError> {
    let lf = l as f64;
    let p = lf + 0.5;
    let (eps, mu) = profile.eps_mu::<f64>(r, kappa);
    let mut ren = 0.0;
    let mut d1 = 0.0;
    for pol in [Polarization::E, Polarization::M] {
        let mode = ModeIndex::new(l, pol, kappa)?;
        let dev = coincidence_deviation(profile, &mode, r)?;
        let (dg_ren, _) = renorm_deviation(profile, &mode, &dev.reference)?;
        let scatter = renorm_coeff(profile, &mode, r, r)?.terms.d1[0];
        let nu = if pol == Polarization::E { mu } else { eps };
        let f = -(2.0 * lf + 1.0) * lf * (lf + 1.0) / (nu * r * r);
        ren += f * (dev.dg - dg_ren);
        d1 += f * scatter;
    }
    Ok(GapResidual {
        l,
        kappa,
        w: (p * p + kappa * kappa * r * r).sqrt(),
        bare_minus_d0: ren + d1,
        bare_minus_d0_d1: ren,
        gap: gap_term(profile, p, kappa, r)?,
    })
}
