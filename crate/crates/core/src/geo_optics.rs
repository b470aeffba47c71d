//! Geometrical optics of the renormalizing Green function near the point of
//! emission: optical length, amplitude, curvature quantities and the
//! first-scattering amplitude `beta1`.
//!
//! All local coefficients are functions of `(n, n', n'', nu, nu', nu'', r)`
//! written once over [`Scalar`]; evaluating them on jets gives their radial
//! derivatives, which the mode decomposition in `renorm` needs.

use std::f64::consts::PI;

use crate::media::{MediumError, MediumProfile, Polarization};
use crate::numerics::{Jet, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("separation outside the quadratic-expansion bound: |r - r0| / r0 = {dr_rel:.3e}, gamma = {gamma:.3e}")]
    OutsideValidity { dr_rel: f64, gamma: f64 },
    #[error("coincident points: the amplitude is singular at rho = 0")]
    Coincident,
}

/// Bound on `|r - r0| / r0` and on `gamma` for the quadratic expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityBound {
    pub dr_rel: f64,
    pub gamma: f64,
}

impl Default for ValidityBound {
    fn default() -> Self {
        Self { dr_rel: 0.05, gamma: 0.05 }
    }
}

impl ValidityBound {
    pub fn check(&self, r: f64, r0: f64, gamma: f64) -> Result<(), GeoError> {
        let dr_rel = (r - r0).abs() / r0;
        if dr_rel > self.dr_rel || gamma.abs() > self.gamma {
            return Err(GeoError::OutsideValidity { dr_rel, gamma });
        }
        Ok(())
    }
}

/// Local coefficients built from radial derivatives `[f, f', f'']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoefficients<S> {
    /// `R_r^r`
    pub ricci_rr: S,
    /// 3D curvature scalar `R_0`
    pub curvature: S,
    /// `sin^2 gamma` coefficient of the optical length
    pub alpha0: S,
    pub beta1: S,
}

pub fn laplacian<S: Scalar>(f: [S; 3], r: S) -> S {
    f[2] + f[1] * 2.0 / r
}

pub fn ricci_rr<S: Scalar>(n: [S; 3], nu: [S; 3], r: S) -> S {
    (nu[1] * nu[1] / nu[0] - nu[2] - nu[1] / r) * 2.0 / (n[0] * n[0] * nu[0])
}

pub fn curvature_scalar<S: Scalar>(n: [S; 3], r: S) -> S {
    let n2 = n[0] * n[0];
    -(laplacian(n, r) * 4.0) / (n2 * n[0]) + n[1] * n[1] * 2.0 / (n2 * n2)
}

pub fn alpha0<S: Scalar>(n: [S; 3], r: S) -> S {
    let q = n[1] * r;
    q * (q + n[0] * 2.0) / (n[0] * 24.0)
}

pub fn beta1_closed<S: Scalar>(n: [S; 3], nu: [S; 3], r: S) -> S {
    let n2 = n[0] * n[0];
    let a = (n[1] * n[1] - n[0] * laplacian(n, r) * 2.0) / n2;
    let b = (nu[0] * nu[2] * 6.0 - nu[1] * nu[1] * 9.0) / (nu[0] * nu[0]);
    (a + b) / (n2 * 24.0)
}

pub fn local_coefficients<S: Scalar>(n: [S; 3], nu: [S; 3], r: S) -> LocalCoefficients<S> {
    LocalCoefficients {
        ricci_rr: ricci_rr(n, nu, r),
        curvature: curvature_scalar(n, r),
        alpha0: alpha0(n, r),
        beta1: beta1_closed(n, nu, r),
    }
}

/// Geometry at the point of emission for one polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub r0: f64,
    pub kappa: f64,
    pub polarization: Polarization,
    pub n: [f64; 3],
    pub nu: [f64; 3],
    pub ricci_rr: f64,
    pub curvature: f64,
    pub alpha0: f64,
    pub beta1: f64,
}

impl LocalGeometry {
    fn nu_expanded<S: Scalar>(&self, r: S) -> S {
        let d = r - self.r0;
        d * d * (0.5 * self.nu[2]) + d * self.nu[1] + self.nu[0]
    }
}

fn nu_of(pol: Polarization, eps: Jet<6>, mu: Jet<6>) -> Jet<6> {
    match pol {
        Polarization::E => mu,
        Polarization::M => eps,
    }
}

/// Radial jets of the profile about `r0`: `n` and `nu` with two derivatives,
/// each carried as a jet so coefficient derivatives follow.
pub fn profile_jets(profile: &MediumProfile, r0: f64, kappa: f64, pol: Polarization) -> ([Jet<6>; 3], [Jet<6>; 3]) {
    let (e, m) = profile.eps_mu_jet::<6>(r0, kappa);
    let n = (e * m).sqrt();
    let nu = nu_of(pol, e, m);
    let d1 = n.differentiate();
    let v1 = nu.differentiate();
    ([n, d1, d1.differentiate()], [nu, v1, v1.differentiate()])
}

/// Local coefficients as jets in `r0` (valid through third order).
pub fn coefficient_jets(profile: &MediumProfile, r0: f64, kappa: f64, pol: Polarization) -> LocalCoefficients<Jet<6>> {
    let (n, nu) = profile_jets(profile, r0, kappa, pol);
    local_coefficients(n, nu, Jet::<6>::variable(r0))
}

pub fn local_geometry(profile: &MediumProfile, r0: f64, kappa: f64, pol: Polarization) -> Result<LocalGeometry, GeoError> {
    let s = profile.sample(r0, kappa)?;
    let n = [s.n[0], s.n[1], s.n[2]];
    let nu4 = s.nu(pol);
    let nu = [nu4[0], nu4[1], nu4[2]];
    let c = local_coefficients(n, nu, r0);
    Ok(LocalGeometry {
        r0,
        kappa,
        polarization: pol,
        n,
        nu,
        ricci_rr: c.ricci_rr,
        curvature: c.curvature,
        alpha0: c.alpha0,
        beta1: c.beta1,
    })
}

pub fn beta1(profile: &MediumProfile, r0: f64, kappa: f64, pol: Polarization) -> Result<f64, GeoError> {
    Ok(local_geometry(profile, r0, kappa, pol)?.beta1)
}

/// `beta1` through the amplitude route: the regular part of
/// `div(nu grad A0) / (2 n^2 nu A0) - R_r^r / 4` at coincidence, with the
/// radial Laplacian of `nu^{-1/2}` taken by central differences of the
/// sampled profile.
pub fn beta1_via_amplitude(profile: &MediumProfile, r0: f64, kappa: f64, pol: Polarization, h: f64) -> Result<f64, GeoError> {
    let g = local_geometry(profile, r0, kappa, pol)?;
    let nu_at = |r: f64| -> Result<f64, GeoError> { Ok(profile.sample(r, kappa)?.nu(pol)[0]) };
    let phi = |r: f64| -> Result<f64, GeoError> { Ok(nu_at(r)?.powf(-0.5)) };
    // flux F(r) = r^2 nu phi' at r0 +- h/2, phi' from 4th-order differences
    let flux = |r: f64| -> Result<f64, GeoError> {
        let d = (phi(r - 2.0 * h)? - 8.0 * phi(r - h)? + 8.0 * phi(r + h)? - phi(r + 2.0 * h)?) / (12.0 * h);
        Ok(r * r * nu_at(r)? * d)
    };
    let hf = 0.5 * h;
    let dflux = (flux(r0 - 3.0 * hf)? - 27.0 * flux(r0 - hf)? + 27.0 * flux(r0 + hf)? - flux(r0 + 3.0 * hf)?) / (24.0 * h);
    let div = dflux / (r0 * r0);
    let n2 = g.n[0] * g.n[0];
    let c = n2 * g.curvature / 48.0;
    Ok((div / (g.nu[0] * phi(r0)?) + 2.0 * c) / (2.0 * n2) - g.ricci_rr / 4.0)
}

fn chord<S: Scalar>(r: S, r0: f64, gamma: S) -> S {
    // rho^2 = (r - r0)^2 + 4 r r0 sin^2(gamma/2), kept free of cancellation
    let d = r - r0;
    let sh = sin_s(gamma * 0.5);
    (d * d + r * (4.0 * r0) * sh * sh).sqrt()
}

fn sin_s<S: Scalar>(x: S) -> S {
    // odd Taylor series; arguments here are small angles
    let x2 = x * x;
    let mut term = x;
    let mut acc = x;
    for k in 1..12 {
        let kf = (2 * k) as f64;
        term = -(term * x2) / (kf * (kf + 1.0));
        acc = acc + term;
    }
    acc
}

/// Optical length with the expansion frozen at the emission point.
pub fn optical_length_generic<S: Scalar>(g: &LocalGeometry, r: S, gamma: S) -> S {
    let rho = chord(r, g.r0, gamma);
    let d = r - g.r0;
    let sg = sin_s(gamma);
    rho * (d * d * (g.n[2] / 6.0) + d * (g.n[1] * 0.5) + g.n[0] - sg * sg * g.alpha0)
}

pub fn amplitude0_generic<S: Scalar>(g: &LocalGeometry, r: S, gamma: S) -> S {
    let rho = chord(r, g.r0, gamma);
    let nu = g.nu_expanded(r);
    let c = g.n[0] * g.n[0] * g.curvature / 48.0;
    -(rho.recip() + rho * c) / ((nu * g.nu[0]).sqrt() * (4.0 * PI))
}

/// `(D0, D1)` as generic scalars.
pub fn renorm_wave_generic<S: Scalar>(g: &LocalGeometry, r: S, gamma: S) -> (S, S) {
    let s = optical_length_generic(g, r, gamma);
    let a = amplitude0_generic(g, r, gamma);
    let e = (-(s * g.kappa)).exp();
    let d0 = a * e;
    let d1 = d0 * s * (g.beta1 / g.kappa);
    (d0, d1)
}

fn rho_of(r: f64, r0: f64, gamma: f64) -> f64 {
    chord(r, r0, gamma)
}

pub fn optical_length(profile: &MediumProfile, r: f64, r0: f64, gamma: f64, kappa: f64, bound: ValidityBound) -> Result<f64, GeoError> {
    bound.check(r, r0, gamma)?;
    profile.check_radius(r)?;
    let g = local_geometry(profile, r0, kappa, Polarization::E)?;
    Ok(optical_length_generic(&g, r, gamma))
}

pub fn amplitude0(
    profile: &MediumProfile,
    r: f64,
    r0: f64,
    gamma: f64,
    kappa: f64,
    pol: Polarization,
    bound: ValidityBound,
) -> Result<f64, GeoError> {
    bound.check(r, r0, gamma)?;
    profile.check_radius(r)?;
    if rho_of(r, r0, gamma) == 0.0 {
        return Err(GeoError::Coincident);
    }
    let g = local_geometry(profile, r0, kappa, pol)?;
    Ok(amplitude0_generic(&g, r, gamma))
}

pub fn renorm_wave(
    profile: &MediumProfile,
    r: f64,
    r0: f64,
    gamma: f64,
    kappa: f64,
    pol: Polarization,
    bound: ValidityBound,
) -> Result<(f64, f64), GeoError> {
    bound.check(r, r0, gamma)?;
    profile.check_radius(r)?;
    if rho_of(r, r0, gamma) == 0.0 {
        return Err(GeoError::Coincident);
    }
    if !(kappa > 0.0) {
        return Err(GeoError::Medium(MediumError::Invalid(format!("kappa must be positive, got {kappa}"))));
    }
    let g = local_geometry(profile, r0, kappa, pol)?;
    Ok(renorm_wave_generic(&g, r, gamma))
}

/// Residual of the wave equation
/// `div(nu grad D) / (n^2 nu) - R_r^r D / 2 - kappa^2 D` at a field point
/// away from the source, using the true profile for the operator.
/// `include_d1` selects `D0 + D1` or `D0` alone.
pub fn wave_residual(
    profile: &MediumProfile,
    r: f64,
    r0: f64,
    gamma: f64,
    kappa: f64,
    pol: Polarization,
    include_d1: bool,
) -> Result<f64, GeoError> {
    let g = local_geometry(profile, r0, kappa, pol)?;
    let eval = |rr: Jet<3>, gg: Jet<3>| {
        let (d0, d1) = renorm_wave_generic(&g, rr, gg);
        if include_d1 {
            d0 + d1
        } else {
            d0
        }
    };
    let dr = eval(Jet::variable(r), Jet::constant(gamma));
    let dg = eval(Jet::constant(r), Jet::variable(gamma));
    let d = dr.value();
    let s = profile.sample(r, kappa)?;
    let nu = s.nu(pol);
    let n2 = s.n[0] * s.n[0];
    let radial = dr.deriv(2) + (2.0 / r + nu[1] / nu[0]) * dr.deriv(1);
    let angular = (dg.deriv(2) + gamma.cos() / gamma.sin() * dg.deriv(1)) / (r * r);
    let n3 = [s.n[0], s.n[1], s.n[2]];
    let ricci = ricci_rr(n3, [nu[0], nu[1], nu[2]], r);
    Ok((radial + angular) / n2 - 0.5 * ricci * d - kappa * kappa * d)
}
