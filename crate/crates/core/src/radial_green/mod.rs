//! Scalar Green coefficients `g^{lm}(r, r0)` of one angular mode.
//!
//! The radial equation is solved in the Langer variable `x = ln r` with
//! `g = e^{-x/2 - x0/2} u`. Homogeneous solutions are carried as
//! log-derivatives `L = h'/h` obeying the Riccati equation
//! `L' = V + nu'/(2 nu) + (nu'/nu) L - L^2` with `V = p^2 + kappa^2 r^2 n^2`
//! and primes in `x`. The WKB series of the same equation seeds the
//! integration and doubles as an independent asymptotic path.

mod cache;
mod riccati;
mod wkb;

pub use cache::{read_mode_cache, write_mode_cache, CacheKey};
pub use riccati::{
    coincidence_deviation, homogeneous_green, solve_radial_mode, CoincidenceDeviation, GreenDerivative, GridSpec,
    RadialMode,
};
pub use wkb::{
    wkb_green, wkb_log_derivs, wkb_orders, wkb_orders_closed_s2, wkb_series, wkb_validity, WKB_VALIDITY_LIMIT,
};

use crate::media::{MediumError, MediumProfile, Polarization};
use crate::numerics::ode::OdeError;
use crate::numerics::{Jet, Scalar};
use crate::specfun::SpecFunError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadialError {
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("radial integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("invalid mode: {0}")]
    InvalidMode(String),
    #[error("no valid WKB seed within reach of x = {x}: validity parameter {param:.3e}")]
    SeedInvalid { x: f64, param: f64 },
    #[error("radius {r} outside the solved grid [{r_min}, {r_max}]")]
    OutOfGrid { r: f64, r_min: f64, r_max: f64 },
    #[error("WKB validity violated at r = {r}: |s1'/s0'| = {param:.3e}")]
    WkbValidity { r: f64, param: f64 },
    #[error("cache: {0}")]
    Cache(String),
}

/// One term of the mode sum and spectral integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    pub l: u32,
    pub polarization: Polarization,
    pub kappa: f64,
}

impl ModeIndex {
    pub fn new(l: u32, polarization: Polarization, kappa: f64) -> Result<Self, RadialError> {
        if l == 0 {
            return Err(RadialError::InvalidMode("l must be at least 1".into()));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(RadialError::InvalidMode(format!("kappa must be finite and positive, got {kappa}")));
        }
        Ok(Self { l, polarization, kappa })
    }

    /// `p = l + 1/2`.
    pub fn p(&self) -> f64 {
        self.l as f64 + 0.5
    }
}

fn select_nu<S: Copy>(pol: Polarization, eps: S, mu: S) -> S {
    match pol {
        Polarization::E => mu,
        Polarization::M => eps,
    }
}

/// Homogeneous comparison medium frozen at one radius: the exact Bessel
/// solution of this medium is subtracted analytically so that only the
/// deviation caused by the inhomogeneity is integrated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub r: f64,
    pub kappa: f64,
    pub polarization: Polarization,
    pub chi_e: f64,
    pub chi_m: f64,
    pub n: f64,
    pub nu: f64,
}

impl Reference {
    pub fn at(profile: &MediumProfile, r: f64, kappa: f64, pol: Polarization) -> Self {
        let (chi_e, chi_m) = profile.chi::<f64>(r, kappa);
        let (eps, mu) = profile.eps_mu::<f64>(r, kappa);
        let n = (eps * mu).sqrt();
        let nu = select_nu(pol, eps, mu);
        Self { r, kappa, polarization: pol, chi_e, chi_m, n, nu }
    }

    /// Wavenumber `kappa n` of the comparison medium.
    pub fn k(&self) -> f64 {
        self.kappa * self.n
    }

    /// `eps mu - eps_h mu_h` from susceptibility differences.
    fn delta_n2<S: Scalar>(&self, chi_e: S, chi_m: S) -> S {
        (chi_e - self.chi_e) * (chi_m + 1.0) + (chi_m - self.chi_m) * (1.0 + self.chi_e)
    }
}

/// Coefficients of the Riccati equation at one abscissa.
#[derive(Debug, Clone, Copy)]
struct LocalTerms {
    v: f64,
    nu_log: f64,
    nu: f64,
    dv: f64,
}

fn local_terms(profile: &MediumProfile, pol: Polarization, kappa: f64, p: f64, x: f64, reference: Option<&Reference>) -> LocalTerms {
    let r = x.exp();
    let (eps, mu) = profile.eps_mu(Jet::<2>::variable(r), kappa);
    let nu = select_nu(pol, eps, mu);
    let kr2 = kappa * kappa * r * r;
    let n2 = eps.value() * mu.value();
    let dv = match reference {
        Some(h) => {
            let (xe, xm) = profile.chi::<f64>(r, kappa);
            kr2 * h.delta_n2(xe, xm)
        }
        None => 0.0,
    };
    LocalTerms { v: p * p + kr2 * n2, nu_log: r * nu.c[1] / nu.c[0], nu: nu.c[0], dv }
}
