//! Anomaly-induced level shifts of a non-interacting condensate in a box
//! and in a spherical harmonic trap, with the collision scalings used to
//! tell the two effects apart.
//!
//! `delta0 = rho0 / (4 pi lambda_C) int_0^kappa0 (alpha/eps0)^2 kappa dkappa`
//! is reported for `lambda_C = 2 pi hbar / (m c)` and `lambda_C = hbar / (m c)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::anomaly::{dipole_potential, AnomalyError, Spectrum};
use crate::numerics::log_log_slope;
use crate::numerics::quad::{integrate_adaptive, AdaptiveOptions};
use crate::specfun::scaled_laguerre;

pub const HBAR: f64 = 1.054571817e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const BOHR_RADIUS: f64 = 5.29177210903e-11;
pub const ATOMIC_MASS_UNIT: f64 = 1.66053906660e-27;
pub const RB87_MASS: f64 = 86.909180520 * ATOMIC_MASS_UNIT;
/// Largest trap level whose wavefunction quadrature is supported.
pub const TRAP_LEVEL_MAX: u32 = 200;

const TRAP_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BecError {
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("trap quadrature failed at level {level} (error {error:.3e})")]
    Quadrature { level: u32, error: f64 },
    #[error("need at least two levels, got {0}")]
    InsufficientLevels(usize),
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
}

/// Which Compton wavelength enters `delta0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ComptonReading {
    /// `2 pi hbar / (m c)`
    Formula,
    /// `hbar / (m c)`
    #[default]
    Reduced,
}

impl ComptonReading {
    pub fn wavelength(self, mass: f64) -> f64 {
        let reduced = HBAR / (mass * SPEED_OF_LIGHT);
        match self {
            ComptonReading::Formula => 2.0 * PI * reduced,
            ComptonReading::Reduced => reduced,
        }
    }
}

/// `alpha / eps0` in m^3 as a function of imaginary wavenumber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum Polarizability {
    Constant { value: f64 },
    /// Linear interpolation, held at the end values outside the table.
    Tabulated { kappa: Vec<f64>, values: Vec<f64> },
}

impl Polarizability {
    fn validate(&self) -> Result<(), BecError> {
        match self {
            Polarizability::Constant { value } if value.is_finite() => Ok(()),
            Polarizability::Constant { .. } => Err(BecError::Invalid("polarizability must be finite".into())),
            Polarizability::Tabulated { kappa, values } => {
                if kappa.len() != values.len() || kappa.len() < 2 {
                    return Err(BecError::Invalid("polarizability table needs matching kappa and values".into()));
                }
                if !kappa.windows(2).all(|w| w[1] > w[0]) || kappa[0] < 0.0 {
                    return Err(BecError::Invalid("polarizability kappa grid must be non-negative and increasing".into()));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, k: f64) -> f64 {
        match self {
            Polarizability::Constant { value } => *value,
            Polarizability::Tabulated { kappa, values } => {
                let n = kappa.len();
                if k <= kappa[0] {
                    return values[0];
                }
                if k >= kappa[n - 1] {
                    return values[n - 1];
                }
                let i = kappa.partition_point(|x| *x <= k) - 1;
                let w = (k - kappa[i]) / (kappa[i + 1] - kappa[i]);
                values[i] + w * (values[i + 1] - values[i])
            }
        }
    }

    /// Nodes of `[0, kappa0]` on which the spectrum is piecewise linear.
    fn nodes(&self, kappa0: f64) -> Vec<f64> {
        let mut out = vec![0.0];
        if let Polarizability::Tabulated { kappa, .. } = self {
            out.extend(kappa.iter().copied().filter(|k| *k > 0.0 && *k < kappa0));
        }
        out.push(kappa0);
        out
    }

    /// `int_0^kappa0 (alpha/eps0)^2 kappa dkappa`, exact for piecewise
    /// linear `alpha`.
    pub fn squared_moment(&self, kappa0: f64) -> f64 {
        let k = self.nodes(kappa0);
        let mut total = 0.0;
        for w in k.windows(2) {
            let (k0, k1) = (w[0], w[1]);
            let (a0, a1) = (self.at(k0), self.at(k1));
            // Simpson is exact for the cubic alpha^2 kappa on each piece
            let km = 0.5 * (k0 + k1);
            let am = 0.5 * (a0 + a1);
            total += (k1 - k0) / 6.0 * (a0 * a0 * k0 + 4.0 * am * am * km + a1 * a1 * k1);
        }
        total
    }
}

fn positive(name: &str, v: f64) -> Result<(), BecError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(BecError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

/// Condensate in a box of height `a` and cross-section `b x b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxModel {
    pub a: f64,
    pub b: f64,
    pub n_atoms: f64,
    pub m_atom: f64,
    pub polarizability: Polarizability,
    pub kappa0: f64,
    pub level: u32,
    /// Reading used where a single value is needed (discrimination tables).
    #[serde(default)]
    pub compton: ComptonReading,
}

impl BoxModel {
    pub fn validate(&self) -> Result<(), BecError> {
        positive("a", self.a)?;
        positive("b", self.b)?;
        positive("n_atoms", self.n_atoms)?;
        positive("m_atom", self.m_atom)?;
        positive("kappa0", self.kappa0)?;
        self.polarizability.validate()?;
        if self.level < 1 {
            return Err(BecError::Invalid("box level must be at least 1".into()));
        }
        Ok(())
    }

    /// Mean density `N / (a b^2)`.
    pub fn rho0(&self) -> f64 {
        self.n_atoms / (self.a * self.b * self.b)
    }

    pub fn wavenumber(&self, level: u32) -> f64 {
        PI * level as f64 / self.a
    }

    pub fn energy(&self, level: u32) -> f64 {
        let k = self.wavenumber(level);
        HBAR * HBAR * k * k / (2.0 * self.m_atom)
    }

    pub fn delta0(&self, reading: ComptonReading) -> f64 {
        self.rho0() / (4.0 * PI * reading.wavelength(self.m_atom)) * self.polarizability.squared_moment(self.kappa0)
    }
}

/// Box shifts under both Compton readings; `V/E_l = delta0` for every `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxShift {
    pub rho0: f64,
    pub lambda_formula: f64,
    pub lambda_reduced: f64,
    pub delta0_formula: f64,
    pub delta0_reduced: f64,
    pub v_over_e_formula: f64,
    pub v_over_e_reduced: f64,
}

pub fn box_shift(model: &BoxModel) -> Result<BoxShift, BecError> {
    model.validate()?;
    let f = model.delta0(ComptonReading::Formula);
    let r = model.delta0(ComptonReading::Reduced);
    Ok(BoxShift {
        rho0: model.rho0(),
        lambda_formula: ComptonReading::Formula.wavelength(model.m_atom),
        lambda_reduced: ComptonReading::Reduced.wavelength(model.m_atom),
        delta0_formula: f,
        delta0_reduced: r,
        v_over_e_formula: f,
        v_over_e_reduced: r,
    })
}

/// `<V>/E_l` for the box from the dipole potential: the dilute stress
/// `tr sigma_E = -(3/2) p` with the planar `beta1_E + beta1_M =
/// (alpha/6 eps0) rho''`, a hard cutoff at `kappa0`, `V = (alpha/eps0) tr
/// sigma_E` integrated on a uniform grid of `nodes` points, then averaged
/// over `rho/N`. Uses no Compton wavelength; the chain gives
/// `rho0 M m c / (4 pi^2 hbar)`, twice the closed value with
/// `lambda_C = 2 pi hbar / (m c)`.
pub fn box_shift_via_dipole(model: &BoxModel, nodes: usize) -> Result<f64, BecError> {
    model.validate()?;
    if nodes < 2 {
        return Err(BecError::Invalid("dipole grid needs at least two nodes".into()));
    }
    let mut grid: Vec<f64> = (0..nodes).map(|i| model.kappa0 * i as f64 / (nodes - 1) as f64).collect();
    grid.extend(model.polarizability.nodes(model.kappa0));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let alpha: Vec<f64> = grid.iter().map(|&k| model.polarizability.at(k)).collect();
    let hbar_c = HBAR * SPEED_OF_LIGHT;
    // spectral tr sigma_E per unit rho''
    let trace: Vec<f64> = grid.iter().zip(&alpha).map(|(k, a)| -hbar_c / (16.0 * PI * PI) * a * k).collect();
    let v_per_curvature = dipole_potential(&Spectrum::new(grid.clone(), alpha)?, &Spectrum::new(grid, trace)?)?;
    // rho = 2 rho0 sin^2(k z): <rho''>_{rho/N} = -2 k^2 rho0
    let k = model.wavenumber(model.level);
    let mean_v = v_per_curvature * (-2.0 * k * k * model.rho0());
    Ok(mean_v / model.energy(model.level))
}

/// `(<rho>/E_l) / (<rho>/E_1)`; `<rho> = (3/2) rho0` at every level.
pub fn box_collision_scaling(model: &BoxModel) -> Result<f64, BecError> {
    model.validate()?;
    let mean_rho = 1.5 * model.rho0();
    Ok((mean_rho / model.energy(model.level)) / (mean_rho / model.energy(1)))
}

/// Condensate in an isotropic harmonic trap of frequency `omega`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapModel {
    pub omega: f64,
    pub n_atoms: f64,
    pub m_atom: f64,
    pub polarizability: Polarizability,
    pub kappa0: f64,
    pub level: u32,
    #[serde(default)]
    pub compton: ComptonReading,
}

impl TrapModel {
    pub fn validate(&self) -> Result<(), BecError> {
        positive("omega", self.omega)?;
        positive("n_atoms", self.n_atoms)?;
        positive("m_atom", self.m_atom)?;
        positive("kappa0", self.kappa0)?;
        self.polarizability.validate()?;
        if self.level > TRAP_LEVEL_MAX {
            return Err(BecError::Invalid(format!("trap level must not exceed {TRAP_LEVEL_MAX}")));
        }
        Ok(())
    }

    /// Oscillator length `sqrt(hbar / (m omega))`.
    pub fn length(&self) -> f64 {
        (HBAR / (self.m_atom * self.omega)).sqrt()
    }

    pub fn rho0(&self) -> f64 {
        self.n_atoms / self.length().powi(3)
    }

    pub fn delta0(&self) -> f64 {
        self.rho0() / (4.0 * PI * self.compton.wavelength(self.m_atom)) * self.polarizability.squared_moment(self.kappa0)
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// `N_l^2 2^{4l+2} (l!)^2`, the prefactor of `psi_l^2 = C e^{-t} L_l^(1/2)(t)^2`.
fn trap_norm(l: usize) -> f64 {
    let ln = 2.0 * l as f64 * std::f64::consts::LN_2 + 2.0 * ln_factorial(l) - ln_factorial(2 * l + 1) - 1.5 * PI.ln();
    ln.exp()
}

/// Radial s-wave `psi_l(xi)` of the trap, normalized over `xi` in 3D.
pub fn trap_wavefunction(level: u32, xi: f64) -> f64 {
    let l = level as usize;
    let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
    sign * trap_norm(l).sqrt() * scaled_laguerre(l, 0.5, xi * xi)
}

/// `F = psi_l^2` and its first two derivatives in `t = xi^2`.
pub fn trap_density(level: u32, xi: f64) -> [f64; 3] {
    let l = level as usize;
    let t = xi * xi;
    let c = trap_norm(l);
    let w = scaled_laguerre(l, 0.5, t);
    // d/dt L_l^(a) = -L_{l-1}^(a+1), d^2/dt^2 L_l^(a) = L_{l-2}^(a+2)
    let l1 = if l >= 1 { -scaled_laguerre(l - 1, 1.5, t) } else { 0.0 };
    let l2 = if l >= 2 { scaled_laguerre(l - 2, 2.5, t) } else { 0.0 };
    let wd = l1 - 0.5 * w;
    let wdd = l2 - l1 + 0.25 * w;
    [c * w * w, 2.0 * c * w * wd, 2.0 * c * (wd * wd + w * wdd)]
}

/// Trap level with exact and asymptotic shifts, in units of `hbar omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrapLevel {
    pub level: u32,
    pub energy: f64,
    pub e_over_hbar_omega: f64,
    pub delta0: f64,
    pub v_exact_over_hbar_omega: f64,
    pub v_asymptotic_over_hbar_omega: f64,
    pub rho_exact_over_rho0: f64,
    pub rho_asymptotic_over_rho0: f64,
    /// `int psi^2 d^3 xi`, 1 up to quadrature error.
    pub norm: f64,
}

/// `[norm, <rho>/rho0, <V>/(hbar omega delta0)]` with
/// `<V> ~ int psi^2 (d_xi^2 psi^2 - d_xi psi^2 / xi) d^3 xi`; in `t = xi^2`
/// the bracket is `4 t F''(t)`.
fn trap_integrals(level: u32) -> Result<[f64; 3], BecError> {
    let l = level as f64;
    let xi_max = (4.0 * l + 3.0).sqrt() + 9.0;
    let eval = |xs: &[f64]| -> Vec<Vec<f64>> {
        xs.iter()
            .map(|&x| {
                let [f, _, ftt] = trap_density(level, x);
                let w = 4.0 * PI * x * x;
                vec![w * f, w * f * f, w * f * 4.0 * x * x * ftt]
            })
            .collect()
    };
    let opts = AdaptiveOptions {
        rel_tol: TRAP_REL_TOL,
        abs_tol: 0.0,
        initial_panels: 8 + 2 * level as usize,
        max_evaluations: 15 * (2000 + 40 * level as usize),
        batch: 8,
    };
    let q = integrate_adaptive(eval, 0.0, xi_max, opts);
    if !q.converged {
        let error = q.error.iter().fold(0.0f64, |a, e| a.max(*e));
        return Err(BecError::Quadrature { level, error });
    }
    Ok([q.value[0], q.value[1], q.value[2]])
}

/// Asymptotic `<V>/(hbar omega delta0)`: the `l = 0` closed value and the
/// small-`xi` Hermite form for `l >= 1`.
pub fn trap_v_asymptotic(level: u32) -> f64 {
    if level == 0 {
        return 1.0 / (2f64.sqrt() * PI.powf(1.5));
    }
    let l = level as f64;
    (4.0 * l + 3.0).powf(1.5) / (3.0 * PI * PI * (2.0 * l + 1.0))
}

/// Asymptotic `<rho>/rho0`.
pub fn trap_rho_asymptotic(level: u32) -> f64 {
    if level == 0 {
        return (2.0 * PI).powf(-1.5);
    }
    let l = level as f64;
    (4.0 * l + 3.0).sqrt() / (2.0 * PI * PI * (2.0 * l + 1.0))
}

pub fn trap_levels(model: &TrapModel) -> Result<TrapLevel, BecError> {
    model.validate()?;
    let l = model.level;
    let [norm, rho, v] = trap_integrals(l)?;
    let delta0 = model.delta0();
    let e = 2.0 * l as f64 + 1.5;
    Ok(TrapLevel {
        level: l,
        energy: HBAR * model.omega * e,
        e_over_hbar_omega: e,
        delta0,
        v_exact_over_hbar_omega: delta0 * v,
        v_asymptotic_over_hbar_omega: delta0 * trap_v_asymptotic(l),
        rho_exact_over_rho0: rho,
        rho_asymptotic_over_rho0: trap_rho_asymptotic(l),
        norm,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "snake_case")]
pub enum Geometry {
    Box(BoxModel),
    Trap(TrapModel),
}

/// One row of the discrimination table. Energies are in units of `E_1`
/// (box) or `hbar omega` (trap); `v_over_rho = (V / unit) / (<rho>/rho0)`.
/// The trap uses the exact `V` and the closed `<rho>` scalings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminationRow {
    pub level: u32,
    pub energy_over_unit: f64,
    pub v_over_e: f64,
    pub rho_over_rho0: f64,
    pub rho_over_e: f64,
    pub v_over_rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrimination {
    pub rows: Vec<DiscriminationRow>,
    /// Log-log slope of `V/<rho>` against `E_l` over levels `l >= 1`.
    pub slope: f64,
    pub proportional_to_energy: bool,
}

/// Tolerance on the slope of `V/<rho>` against energy.
pub const DISCRIMINATION_SLOPE_TOL: f64 = 0.05;

pub fn discriminate(geometry: &Geometry, levels: &[u32]) -> Result<Discrimination, BecError> {
    if levels.len() < 2 {
        return Err(BecError::InsufficientLevels(levels.len()));
    }
    let rows: Vec<Result<DiscriminationRow, BecError>> = levels
        .par_iter()
        .map(|&level| match geometry {
            Geometry::Box(m) => {
                let m = BoxModel { level, ..m.clone() };
                m.validate()?;
                let e = m.energy(level) / m.energy(1);
                let v_over_e = m.delta0(m.compton);
                let rho = 1.5;
                Ok(DiscriminationRow {
                    level,
                    energy_over_unit: e,
                    v_over_e,
                    rho_over_rho0: rho,
                    rho_over_e: rho / e,
                    v_over_rho: v_over_e * e / rho,
                })
            }
            Geometry::Trap(m) => {
                let t = trap_levels(&TrapModel { level, ..m.clone() })?;
                let e = t.e_over_hbar_omega;
                let v_over_e = t.v_exact_over_hbar_omega / e;
                let rho = t.rho_asymptotic_over_rho0;
                Ok(DiscriminationRow {
                    level,
                    energy_over_unit: e,
                    v_over_e,
                    rho_over_rho0: rho,
                    rho_over_e: rho / e,
                    v_over_rho: t.v_exact_over_hbar_omega / rho,
                })
            }
        })
        .collect();
    let rows: Vec<DiscriminationRow> = rows.into_iter().collect::<Result<_, _>>()?;
    let fit: Vec<&DiscriminationRow> = rows.iter().filter(|r| r.level >= 1).collect();
    let slope = if fit.len() >= 2 {
        let x: Vec<f64> = fit.iter().map(|r| r.energy_over_unit).collect();
        let y: Vec<f64> = fit.iter().map(|r| r.v_over_rho).collect();
        log_log_slope(&x, &y)
    } else {
        f64::NAN
    };
    Ok(Discrimination { rows, slope, proportional_to_energy: (slope - 1.0).abs() <= DISCRIMINATION_SLOPE_TOL })
}

/// Parameters of the rubidium estimate: `alpha/eps0 = 300 * 4 pi a_B^3`,
/// `kappa0 = 2 pi / 0.5 um`, `N = 1e6`, `a = 100 um`, `b = 10 um`.
pub fn rubidium_box(level: u32) -> BoxModel {
    BoxModel {
        a: 100e-6,
        b: 10e-6,
        n_atoms: 1e6,
        m_atom: RB87_MASS,
        polarizability: Polarizability::Constant { value: 300.0 * 4.0 * PI * BOHR_RADIUS.powi(3) },
        kappa0: 2.0 * PI / 0.5e-6,
        level,
        compton: ComptonReading::Reduced,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hermite_function;

    fn trap(level: u32) -> TrapModel {
        let b = rubidium_box(1);
        TrapModel {
            omega: 2.0 * PI * 100.0,
            n_atoms: 1e6,
            m_atom: b.m_atom,
            polarizability: b.polarizability,
            kappa0: b.kappa0,
            level,
            compton: ComptonReading::Reduced,
        }
    }

    #[test]
    fn rubidium_estimate() {
        let s = box_shift(&rubidium_box(1)).unwrap();
        assert!((s.lambda_reduced - 2.437e-18).abs() < 1e-21);
        assert!(s.delta0_reduced > 3e-5 && s.delta0_reduced < 3e-4, "{}", s.delta0_reduced);
        assert!((s.delta0_reduced / s.delta0_formula - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn box_shift_is_linear_in_atoms_and_level_free() {
        let m = rubidium_box(1);
        let d1 = box_shift(&m).unwrap().delta0_reduced;
        let d2 = box_shift(&BoxModel { n_atoms: 2e6, ..m.clone() }).unwrap().delta0_reduced;
        assert_eq!(d2, 2.0 * d1);
        let d5 = box_shift(&BoxModel { level: 5, ..m }).unwrap().v_over_e_reduced;
        assert_eq!(d5, d1);
    }

    #[test]
    fn dipole_path_is_twice_the_compton_formula_reading() {
        for level in [1, 3] {
            let m = rubidium_box(level);
            let v = box_shift_via_dipole(&m, 33).unwrap();
            let closed = m.delta0(ComptonReading::Formula);
            assert!((v / (2.0 * closed) - 1.0).abs() < 1e-6, "{v:e} vs {closed:e}");
        }
    }

    #[test]
    fn tabulated_polarizability_moment() {
        let k0 = 3.0;
        let tab = Polarizability::Tabulated { kappa: vec![0.0, 1.0, 2.0, 4.0], values: vec![2.0, 1.0, 1.0, 0.0] };
        // exact: alpha = 2 - k on [0,1], 1 on [1,2], 1 - (k-2)/2 on [2,3]
        let f1 = |k: f64| (2.0 - k).powi(2) * k;
        let f3 = |k: f64| (1.0 - (k - 2.0) / 2.0).powi(2) * k;
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
            let n = 2000;
            let h = (b - a) / n as f64;
            (0..=n).map(|i| f(a + i as f64 * h) * if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }).sum::<f64>() * h / 3.0
        };
        let exact = simpson(&f1, 0.0, 1.0) + 1.5 + simpson(&f3, 2.0, 3.0);
        assert!((tab.squared_moment(k0) - exact).abs() < 1e-12);
        let c = Polarizability::Constant { value: 2.0 };
        assert!((c.squared_moment(k0) - 2.0 * 9.0).abs() < 1e-13);
    }

    #[test]
    fn collision_scaling_is_inverse_square() {
        for (l, want) in [(1, 1.0), (2, 0.25), (10, 0.01)] {
            let s = box_collision_scaling(&rubidium_box(l)).unwrap();
            assert!((s - want).abs() < 1e-15);
        }
    }

    #[test]
    fn wavefunction_matches_hermite_functions() {
        // psi_l = phi_{2l+1}(xi) / (xi sqrt(2 pi))
        for l in [0u32, 1, 5, 30] {
            for xi in [0.2, 1.0, 3.3] {
                let (phi, _) = hermite_function(2 * l as usize + 1, xi);
                let want = phi / (xi * (2.0 * PI).sqrt());
                let got = trap_wavefunction(l, xi);
                assert!((got - want).abs() < 1e-12 * want.abs().max(1e-3), "l={l} xi={xi}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn density_derivatives_match_differences() {
        for l in [0u32, 2, 7] {
            let xi = 0.9f64;
            let t = xi * xi;
            let h = 1e-4;
            let f = |t: f64| trap_density(l, t.sqrt())[0];
            let d = trap_density(l, xi);
            let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            assert!((d[1] - d1).abs() < 1e-8, "{l}");
            assert!((d[2] - d2).abs() < 1e-5, "{l}");
        }
    }

    #[test]
    fn normalization_to_high_levels() {
        for l in [0u32, 1, 10, 50] {
            let [norm, _, _] = trap_integrals(l).unwrap();
            assert!((norm - 1.0).abs() < 1e-10, "l={l}: {norm}");
        }
    }

    #[test]
    fn ground_state_closed_forms() {
        let t = trap_levels(&trap(0)).unwrap();
        assert_eq!(t.e_over_hbar_omega, 1.5);
        assert!((t.rho_exact_over_rho0 - (2.0 * PI).powf(-1.5)).abs() < 1e-13);
        // the exact ground-state integral is 3 / (2 sqrt 2 pi^{3/2})
        let v = t.v_exact_over_hbar_omega / t.delta0;
        assert!((v - 3.0 / (2.0 * 2f64.sqrt() * PI.powf(1.5))).abs() < 1e-12);
        assert!((t.v_asymptotic_over_hbar_omega / t.delta0 - 0.12698727186848194).abs() < 1e-15);
    }

    #[test]
    fn excited_levels_follow_the_small_xi_form() {
        for l in 1..=10 {
            let t = trap_levels(&trap(l)).unwrap();
            let rel = (t.v_exact_over_hbar_omega - t.v_asymptotic_over_hbar_omega) / t.v_exact_over_hbar_omega;
            assert!(rel.abs() < 0.05, "l={l}: {rel}");
        }
        let t = trap_levels(&trap(3)).unwrap();
        let want = t.delta0 / (3.0 * PI * PI) * 15f64.powf(1.5) / 7.0;
        assert!((t.v_asymptotic_over_hbar_omega - want).abs() < 1e-14 * want);
    }

    #[test]
    fn small_argument_hermite_asymptotics() {
        for l in [20u32, 40, 80] {
            let s = (4.0 * l as f64 + 3.0).sqrt();
            let lf = l as f64;
            for xi in [0.05, 0.2, 0.35, 0.5] {
                let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
                let asym = sign * (s * xi).sin() / ((4.0 * lf + 2.0).powf(0.25) * PI * xi);
                let exact = trap_wavefunction(l, xi);
                let scale = 1.0 / ((4.0 * lf + 2.0).powf(0.25) * PI * xi);
                assert!((exact - asym).abs() < 0.02 * scale, "l={l} xi={xi}: {exact} vs {asym}");
            }
        }
    }

    #[test]
    fn large_level_exponent() {
        let ls = [50u32, 100, 150, 200];
        let v: Vec<f64> = ls.iter().map(|&l| trap_integrals(l).unwrap()[2]).collect();
        let x: Vec<f64> = ls.iter().map(|&l| l as f64).collect();
        let s = log_log_slope(&x, &v);
        assert!((s - 0.5).abs() < 0.05, "{s}");
    }

    #[test]
    fn trap_ratio_tracks_energy() {
        let d = discriminate(&Geometry::Trap(trap(1)), &[1, 2, 4, 8]).unwrap();
        assert!(d.proportional_to_energy, "slope {}", d.slope);
        let b = discriminate(&Geometry::Box(rubidium_box(1)), &[1, 2, 3, 4]).unwrap();
        assert!((b.slope - 1.0).abs() < 1e-12);
        for r in &b.rows {
            assert!((r.v_over_rho / b.rows[0].v_over_rho - (r.level as f64).powi(2)).abs() < 1e-9);
        }
        assert!(matches!(discriminate(&Geometry::Trap(trap(1)), &[1]), Err(BecError::InsufficientLevels(1))));
    }
}
