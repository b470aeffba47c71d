//! Radially varying dielectric media on the imaginary frequency axis.
//!
//! A profile supplies the static susceptibilities `eps(r, 0) - 1` and
//! `mu(r, 0) - 1`; an optional single-resonance dispersion rescales them by
//! `1 / (1 + kappa^2 / kappa_res^2)`, which gives the `1/kappa^2` tails
//! needed for a finite stress. Everything is evaluated generically over
//! [`Scalar`] so radial derivatives come out of the same code path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::numerics::{Jet, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MediumError {
    #[error("radius {r} outside profile domain [{r_min}, {r_max}]")]
    OutOfDomain { r: f64, r_min: f64, r_max: f64 },
    #[error("unknown profile kind '{0}'")]
    UnknownKind(String),
    #[error("missing parameter '{0}'")]
    MissingParameter(String),
    #[error("table is not smooth near r = {r}: second-difference jump {jump:.3e} exceeds {limit:.3e}")]
    NonSmoothTable { r: f64, jump: f64, limit: f64 },
    #[error("invalid profile: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    E,
    M,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::E, Polarization::M];

    pub fn dual(self) -> Self {
        match self {
            Polarization::E => Polarization::M,
            Polarization::M => Polarization::E,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Density {
    /// `peak * exp(-(r / width)^2)` [m^-3]
    Gaussian { peak: f64, width: f64 },
}

impl Density {
    pub fn eval<S: Scalar>(&self, r: S) -> S {
        match *self {
            Density::Gaussian { peak, width } => {
                let u = r / width;
                (-(u * u)).exp() * peak
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Density::Gaussian { peak, width } => Density::Gaussian { peak: peak * factor, width },
        }
    }
}

/// Piecewise quintic Hermite interpolant of one tabulated column. Nodal first
/// and second derivatives come from a centred five-point Lagrange fit, so the
/// interpolant is twice continuously differentiable.
#[derive(Debug, Clone, PartialEq)]
pub struct QuinticTable {
    r: Vec<f64>,
    f: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

fn lagrange<S: Scalar>(xs: &[f64], ys: &[f64], r: S) -> S {
    let mut acc = S::cst(0.0);
    for i in 0..xs.len() {
        let mut term = S::cst(ys[i]);
        for j in 0..xs.len() {
            if i != j {
                term = term * ((r - xs[j]) / (xs[i] - xs[j]));
            }
        }
        acc = acc + term;
    }
    acc
}

impl QuinticTable {
    pub fn new(r: &[f64], f: &[f64]) -> Self {
        let n = r.len();
        let mut d1 = vec![0.0; n];
        let mut d2 = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(2).min(n - 5);
            let j = lagrange(&r[lo..lo + 5], &f[lo..lo + 5], Jet::<3>::variable(r[i]));
            d1[i] = j.deriv(1);
            d2[i] = j.deriv(2);
        }
        Self { r: r.to_vec(), f: f.to_vec(), d1, d2 }
    }

    pub fn eval<S: Scalar>(&self, x: S) -> S {
        let n = self.r.len();
        let i = self.r.partition_point(|&v| v <= x.re()).clamp(1, n - 1) - 1;
        let h = self.r[i + 1] - self.r[i];
        let t = (x - self.r[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let t5 = t4 * t;
        let h00 = t3 * (-10.0) + t4 * 15.0 - t5 * 6.0 + 1.0;
        let h10 = t - t3 * 6.0 + t4 * 8.0 - t5 * 3.0;
        let h20 = (t2 - t3 * 3.0 + t4 * 3.0 - t5) * 0.5;
        let h01 = t3 * 10.0 - t4 * 15.0 + t5 * 6.0;
        let h11 = t3 * (-4.0) + t4 * 7.0 - t5 * 3.0;
        let h21 = (t3 - t4 * 2.0 + t5) * 0.5;
        h00 * self.f[i]
            + h10 * (self.d1[i] * h)
            + h20 * (self.d2[i] * h * h)
            + h01 * self.f[i + 1]
            + h11 * (self.d1[i + 1] * h)
            + h21 * (self.d2[i + 1] * h * h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    Homogeneous { eps: f64, mu: f64 },
    /// Impedance-matched lens `n = 2 n1 / (1 + k (r/a)^2)` with `eps = mu = n`.
    Fisheye { n1: f64, k: f64, a: f64 },
    /// `eps = 1 + (alpha/eps0) rho(r)`, `mu = 1`.
    DiluteGas { polarizability_over_eps0: f64, density: Density },
    /// Static `eps`, `mu` on an increasing radial grid; held constant at the
    /// end values outside the table.
    Tabulated { eps: QuinticTable, mu: QuinticTable },
}

impl ProfileKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileKind::Homogeneous { .. } => "homogeneous",
            ProfileKind::Fisheye { .. } => "fisheye",
            ProfileKind::DiluteGas { .. } => "dilute_gas",
            ProfileKind::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Dispersion {
    #[default]
    None,
    SingleResonance {
        kappa_res: f64,
    },
}

impl Dispersion {
    /// Factor applied to the static susceptibilities.
    pub fn factor(&self, kappa: f64) -> f64 {
        match *self {
            Dispersion::None => 1.0,
            Dispersion::SingleResonance { kappa_res } => 1.0 / (1.0 + (kappa / kappa_res).powi(2)),
        }
    }

    /// `lim kappa^2 * factor` when finite.
    pub fn tail_weight(&self) -> Option<f64> {
        match *self {
            Dispersion::None => None,
            Dispersion::SingleResonance { kappa_res } => Some(kappa_res * kappa_res),
        }
    }

    /// Natural spectral scale.
    pub fn scale(&self) -> Option<f64> {
        match *self {
            Dispersion::None => None,
            Dispersion::SingleResonance { kappa_res } => Some(kappa_res),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub r_min: f64,
    pub r_max: f64,
}

/// One entry of the `params` map of a profile config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Array(Vec<f64>),
    Density(Density),
}

/// Profile config as read from JSON: `{kind, params, dispersion, domain}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: String,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub dispersion: Dispersion,
    pub domain: Domain,
}

impl ProfileSpec {
    fn real(&self, key: &str) -> Result<f64, MediumError> {
        match self.params.get(key) {
            Some(ParamValue::Real(v)) => Ok(*v),
            Some(_) => Err(MediumError::Invalid(format!("parameter '{key}' must be a number"))),
            None => Err(MediumError::MissingParameter(key.into())),
        }
    }

    fn real_or(&self, key: &str, default: f64) -> Result<f64, MediumError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(_) => self.real(key),
        }
    }

    fn array(&self, key: &str) -> Result<&[f64], MediumError> {
        match self.params.get(key) {
            Some(ParamValue::Array(v)) => Ok(v),
            Some(_) => Err(MediumError::Invalid(format!("parameter '{key}' must be an array"))),
            None => Err(MediumError::MissingParameter(key.into())),
        }
    }

    fn density(&self, key: &str) -> Result<Density, MediumError> {
        match self.params.get(key) {
            Some(ParamValue::Density(d)) => Ok(d.clone()),
            Some(_) => Err(MediumError::Invalid(format!("parameter '{key}' must be a density profile"))),
            None => Err(MediumError::MissingParameter(key.into())),
        }
    }
}

/// Relative size of an adjacent second-difference jump that marks a table
/// as non-smooth.
pub const TABLE_SMOOTHNESS_TOL: f64 = 0.5;

fn check_table_smooth(r: &[f64], f: &[f64]) -> Result<(), MediumError> {
    let d2: Vec<f64> = (1..r.len() - 1)
        .map(|i| {
            let h0 = r[i] - r[i - 1];
            let h1 = r[i + 1] - r[i];
            2.0 * ((f[i + 1] - f[i]) / h1 - (f[i] - f[i - 1]) / h0) / (h0 + h1)
        })
        .collect();
    let scale = d2.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return Ok(());
    }
    let limit = TABLE_SMOOTHNESS_TOL * scale;
    for i in 1..d2.len() {
        let jump = (d2[i] - d2[i - 1]).abs();
        if jump > limit {
            return Err(MediumError::NonSmoothTable { r: r[i], jump, limit });
        }
    }
    Ok(())
}

/// Build and validate a profile from its config.
pub fn make_profile(spec: &ProfileSpec) -> Result<MediumProfile, MediumError> {
    let kind = match spec.kind.as_str() {
        "homogeneous" => ProfileKind::Homogeneous { eps: spec.real("eps0_value")?, mu: spec.real_or("mu0_value", 1.0)? },
        "fisheye" => ProfileKind::Fisheye { n1: spec.real("n1")?, k: spec.real("k")?, a: spec.real("a")? },
        "dilute_gas" => ProfileKind::DiluteGas {
            polarizability_over_eps0: spec.real("polarizability_over_eps0")?,
            density: spec.density("density")?,
        },
        "tabulated" => {
            let r = spec.array("r")?;
            let eps = spec.array("eps")?;
            let mu = match spec.params.get("mu") {
                None => vec![1.0; r.len()],
                Some(_) => spec.array("mu")?.to_vec(),
            };
            tabulated(r, eps, &mu)?
        }
        other => return Err(MediumError::UnknownKind(other.into())),
    };
    MediumProfile::new(kind, spec.dispersion, spec.domain)
}

/// Tabulated profile kind from raw columns.
pub fn tabulated(r: &[f64], eps: &[f64], mu: &[f64]) -> Result<ProfileKind, MediumError> {
    if r.len() < 6 || eps.len() != r.len() || mu.len() != r.len() {
        return Err(MediumError::Invalid("tabulated profile needs >= 6 points and equal-length columns".into()));
    }
    if r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(MediumError::Invalid("tabulated radii must be strictly increasing".into()));
    }
    check_table_smooth(r, eps)?;
    check_table_smooth(r, mu)?;
    Ok(ProfileKind::Tabulated { eps: QuinticTable::new(r, eps), mu: QuinticTable::new(r, mu) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediumProfile {
    pub kind: ProfileKind,
    pub dispersion: Dispersion,
    pub domain: Domain,
}

/// Values and radial derivatives (orders 0..=3) at one `(r, kappa)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumSample {
    pub r: f64,
    pub kappa: f64,
    pub eps: [f64; 4],
    pub mu: [f64; 4],
    pub n: [f64; 4],
    /// Tail values `n_inf(r)`, `Z_inf(r)`; `None` without dispersion.
    pub n_inf: Option<f64>,
    pub z_inf: Option<f64>,
}

impl MediumSample {
    /// Radial-equation weight: `mu` for E, `eps` for M.
    pub fn nu(&self, pol: Polarization) -> [f64; 4] {
        match pol {
            Polarization::E => self.mu,
            Polarization::M => self.eps,
        }
    }

    pub fn nu_e(&self) -> [f64; 4] {
        self.mu
    }

    pub fn nu_m(&self) -> [f64; 4] {
        self.eps
    }

    /// The other material function: `eps` for E, `mu` for M.
    pub fn dual(&self, pol: Polarization) -> [f64; 4] {
        match pol {
            Polarization::E => self.eps,
            Polarization::M => self.mu,
        }
    }
}

/// Large-`kappa` tails `n ~ 1 + n_inf / kappa^2`, `Z ~ 1 + z_inf / kappa^2`
/// with radial derivatives (orders 0..=2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailCoefficients {
    pub n_inf: [f64; 3],
    pub z_inf: [f64; 3],
}

impl MediumProfile {
    pub fn new(kind: ProfileKind, dispersion: Dispersion, domain: Domain) -> Result<Self, MediumError> {
        let p = Self { kind, dispersion, domain };
        p.validate()?;
        Ok(p)
    }

    pub fn homogeneous(eps: f64, mu: f64, dispersion: Dispersion, domain: Domain) -> Result<Self, MediumError> {
        Self::new(ProfileKind::Homogeneous { eps, mu }, dispersion, domain)
    }

    fn validate(&self) -> Result<(), MediumError> {
        let d = self.domain;
        if !(d.r_min > 0.0 && d.r_max > d.r_min && d.r_max.is_finite()) {
            return Err(MediumError::Invalid(format!("domain must satisfy 0 < r_min < r_max, got [{}, {}]", d.r_min, d.r_max)));
        }
        if let Dispersion::SingleResonance { kappa_res } = self.dispersion {
            if !(kappa_res > 0.0 && kappa_res.is_finite()) {
                return Err(MediumError::Invalid(format!("resonance wavenumber must be positive, got {kappa_res}")));
            }
        }
        match &self.kind {
            ProfileKind::Homogeneous { eps, mu } => {
                if !(eps.is_finite() && mu.is_finite()) {
                    return Err(MediumError::Invalid("non-finite permittivity or permeability".into()));
                }
            }
            ProfileKind::Fisheye { n1, k, a } => {
                if !(*n1 > 0.0 && *a > 0.0 && k.is_finite()) {
                    return Err(MediumError::Invalid("fisheye needs n1 > 0, a > 0".into()));
                }
            }
            ProfileKind::DiluteGas { polarizability_over_eps0, density } => {
                let Density::Gaussian { peak, width } = density;
                if !(polarizability_over_eps0.is_finite() && *peak >= 0.0 && *width > 0.0) {
                    return Err(MediumError::Invalid("dilute gas needs finite polarizability, peak >= 0, width > 0".into()));
                }
            }
            ProfileKind::Tabulated { eps, .. } => {
                if eps.r[0] > d.r_min || *eps.r.last().unwrap() < d.r_max {
                    return Err(MediumError::Invalid("table must cover the domain".into()));
                }
            }
        }
        let n = 400;
        for i in 0..=n {
            let r = d.r_min + (d.r_max - d.r_min) * i as f64 / n as f64;
            let (e, m) = self.static_eps_mu::<f64>(r);
            if !(e > 0.0 && m > 0.0 && e.is_finite() && m.is_finite()) {
                return Err(MediumError::Invalid(format!("non-positive eps or mu at r = {r}: eps = {e}, mu = {m}")));
            }
        }
        Ok(())
    }

    pub fn check_radius(&self, r: f64) -> Result<(), MediumError> {
        let d = self.domain;
        if !(r >= d.r_min && r <= d.r_max) {
            return Err(MediumError::OutOfDomain { r, r_min: d.r_min, r_max: d.r_max });
        }
        Ok(())
    }

    /// Static susceptibilities `(eps - 1, mu - 1)`. Analytic kinds are
    /// defined for every `r > 0`; the radial solver relies on this beyond
    /// the query domain.
    pub fn static_chi<S: Scalar>(&self, r: S) -> (S, S) {
        match &self.kind {
            ProfileKind::Homogeneous { eps, mu } => (S::cst(eps - 1.0), S::cst(mu - 1.0)),
            ProfileKind::Fisheye { n1, k, a } => {
                let u = r / *a;
                let q = u * u * *k;
                // 2 n1 / (1 + q) - 1 = (2 n1 - 1 - q) / (1 + q)
                let x = (-q + (2.0 * n1 - 1.0)) / (q + 1.0);
                (x, x)
            }
            ProfileKind::DiluteGas { polarizability_over_eps0, density } => {
                (density.eval(r) * *polarizability_over_eps0, S::cst(0.0))
            }
            ProfileKind::Tabulated { eps, mu } => {
                let x = r.re();
                let (lo, hi) = (eps.r[0], *eps.r.last().unwrap());
                if x < lo {
                    (S::cst(eps.f[0] - 1.0), S::cst(mu.f[0] - 1.0))
                } else if x > hi {
                    (S::cst(*eps.f.last().unwrap() - 1.0), S::cst(*mu.f.last().unwrap() - 1.0))
                } else {
                    (eps.eval(r) - 1.0, mu.eval(r) - 1.0)
                }
            }
        }
    }

    /// Static `(eps, mu)`.
    pub fn static_eps_mu<S: Scalar>(&self, r: S) -> (S, S) {
        if let ProfileKind::Fisheye { n1, k, a } = &self.kind {
            // direct form keeps full relative precision where n -> 0
            let u = r / *a;
            let n = (u * u * *k + 1.0).recip() * (2.0 * n1);
            return (n, n);
        }
        let (xe, xm) = self.static_chi(r);
        (xe + 1.0, xm + 1.0)
    }

    /// Susceptibilities at imaginary wavenumber `kappa`, no domain check.
    pub fn chi<S: Scalar>(&self, r: S, kappa: f64) -> (S, S) {
        let (xe, xm) = self.static_chi(r);
        let f = self.dispersion.factor(kappa);
        if f == 1.0 {
            return (xe, xm);
        }
        (xe * f, xm * f)
    }

    /// `(eps, mu)` at imaginary wavenumber `kappa`, no domain check.
    pub fn eps_mu<S: Scalar>(&self, r: S, kappa: f64) -> (S, S) {
        let (e, m) = self.static_eps_mu(r);
        let f = self.dispersion.factor(kappa);
        if f == 1.0 {
            return (e, m);
        }
        (e * f + (1.0 - f), m * f + (1.0 - f))
    }

    /// Taylor jets of `(eps, mu)` about `r`.
    pub fn eps_mu_jet<const N: usize>(&self, r: f64, kappa: f64) -> (Jet<N>, Jet<N>) {
        self.eps_mu(Jet::<N>::variable(r), kappa)
    }

    pub fn sample(&self, r: f64, kappa: f64) -> Result<MediumSample, MediumError> {
        self.check_radius(r)?;
        if !(kappa >= 0.0) {
            return Err(MediumError::Invalid(format!("kappa must be non-negative, got {kappa}")));
        }
        Ok(self.sample_unchecked(r, kappa))
    }

    pub fn sample_unchecked(&self, r: f64, kappa: f64) -> MediumSample {
        let (e, m) = self.eps_mu_jet::<4>(r, kappa);
        let n = (e * m).sqrt();
        let d = |j: Jet<4>| [j.deriv(0), j.deriv(1), j.deriv(2), j.deriv(3)];
        let tails = self.tails(r);
        MediumSample {
            r,
            kappa,
            eps: d(e),
            mu: d(m),
            n: d(n),
            n_inf: tails.map(|t| t.n_inf[0]),
            z_inf: tails.map(|t| t.z_inf[0]),
        }
    }

    /// Tail coefficients of `n` and of the impedance `Z = sqrt(mu/eps)`.
    pub fn tails(&self, r: f64) -> Option<TailCoefficients> {
        let w = self.dispersion.tail_weight()?;
        let (e, m) = self.static_eps_mu(Jet::<3>::variable(r));
        let xe = e - 1.0;
        let xm = m - 1.0;
        let n_inf = (xe + xm) * (0.5 * w);
        let z_inf = (xm - xe) * (0.5 * w);
        let d = |j: Jet<3>| [j.deriv(0), j.deriv(1), j.deriv(2)];
        Some(TailCoefficients { n_inf: d(n_inf), z_inf: d(z_inf) })
    }

    /// Same profile with every static susceptibility multiplied by `factor`.
    pub fn scaled_susceptibility(&self, factor: f64) -> Result<Self, MediumError> {
        let kind = match &self.kind {
            ProfileKind::DiluteGas { polarizability_over_eps0, density } => {
                ProfileKind::DiluteGas { polarizability_over_eps0: *polarizability_over_eps0, density: density.scaled(factor) }
            }
            ProfileKind::Homogeneous { eps, mu } => {
                ProfileKind::Homogeneous { eps: 1.0 + (eps - 1.0) * factor, mu: 1.0 + (mu - 1.0) * factor }
            }
            ProfileKind::Tabulated { eps, mu } => {
                let sc = |t: &QuinticTable| t.f.iter().map(|v| 1.0 + (v - 1.0) * factor).collect::<Vec<_>>();
                tabulated(&eps.r, &sc(eps), &sc(mu))?
            }
            ProfileKind::Fisheye { .. } => {
                return Err(MediumError::Invalid("fisheye profiles cannot be rescaled in density".into()));
            }
        };
        Self::new(kind, self.dispersion, self.domain)
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.kind, ProfileKind::Homogeneous { .. })
    }

    /// Largest static susceptibility magnitude on the domain.
    pub fn max_susceptibility(&self) -> f64 {
        let d = self.domain;
        (0..=400)
            .map(|i| {
                let r = d.r_min + (d.r_max - d.r_min) * i as f64 / 400.0;
                let (e, m) = self.static_eps_mu::<f64>(r);
                (e - 1.0).abs().max((m - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Stable digest of the profile, used to key caches.
    pub fn fingerprint(&self) -> String {
        format!("{:?}|{:?}|{:?}", self.kind, self.dispersion, self.domain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> MediumProfile {
        MediumProfile::new(
            ProfileKind::DiluteGas {
                polarizability_over_eps0: 1e-3,
                density: Density::Gaussian { peak: 1.0, width: 1.0 },
            },
            Dispersion::SingleResonance { kappa_res: 2.0 },
            Domain { r_min: 0.05, r_max: 5.0 },
        )
        .unwrap()
    }

    #[test]
    fn refractive_index_squared() {
        let s = gas().sample(0.8, 1.3).unwrap();
        assert!((s.n[0] * s.n[0] - s.eps[0] * s.mu[0]).abs() < 1e-15);
        assert_eq!(s.nu(Polarization::E), s.mu);
        assert_eq!(s.nu(Polarization::M), s.eps);
    }

    #[test]
    fn gaussian_derivatives() {
        let s = gas().sample(0.8, 0.0).unwrap();
        let g = (-0.64f64).exp() * 1e-3;
        assert!((s.eps[1] - g * (-1.6)).abs() < 1e-15);
        assert!((s.eps[2] - g * (4.0 * 0.64 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_eps_rejected() {
        let r = MediumProfile::homogeneous(-1.0, 1.0, Dispersion::None, Domain { r_min: 0.1, r_max: 1.0 });
        assert!(matches!(r, Err(MediumError::Invalid(_))));
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(gas().sample(6.0, 1.0), Err(MediumError::OutOfDomain { .. })));
    }

    #[test]
    fn quintic_hermite_reproduces_quartic() {
        let r: Vec<f64> = (0..12).map(|i| 0.5 + 0.1 * i as f64 + 0.01 * (i * i) as f64).collect();
        let f = |x: f64| 1.0 + 0.3 * x - 0.2 * x * x + 0.05 * x.powi(4);
        let t = QuinticTable::new(&r, &r.iter().map(|&x| f(x)).collect::<Vec<_>>());
        for k in 0..50 {
            let x = 0.55 + k as f64 * 0.039;
            let j = t.eval(Jet::<3>::variable(x));
            assert!((j.value() - f(x)).abs() < 1e-12);
            assert!((j.deriv(2) - (-0.4 + 0.6 * x * x)).abs() < 1e-9);
        }
    }

    #[test]
    fn spec_params_and_errors() {
        let spec = ProfileSpec {
            kind: "fisheye".into(),
            params: [("n1", 1.0), ("k", 1.0), ("a", 1.0)].into_iter().map(|(k, v)| (k.to_string(), ParamValue::Real(v))).collect(),
            dispersion: Dispersion::None,
            domain: Domain { r_min: 0.01, r_max: 3.0 },
        };
        let p = make_profile(&spec).unwrap();
        assert!((p.sample(0.01, 0.0).unwrap().n[0] - 2.0 / 1.0001).abs() < 1e-14);
        let mut bad = spec.clone();
        bad.params.remove("a");
        assert_eq!(make_profile(&bad), Err(MediumError::MissingParameter("a".into())));
        bad.kind = "crystal".into();
        assert!(matches!(make_profile(&bad), Err(MediumError::UnknownKind(_))));
    }

    #[test]
    fn kinked_table_rejected() {
        let r: Vec<f64> = (0..20).map(|i| 0.1 + 0.1 * i as f64).collect();
        let eps: Vec<f64> = r.iter().map(|&x| 1.0 + 0.1 * (x - 1.05).abs()).collect();
        assert!(matches!(tabulated(&r, &eps, &[1.0; 20]), Err(MediumError::NonSmoothTable { .. })));
    }
}
