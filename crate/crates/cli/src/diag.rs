//! Invariant suites: sum identities, Wronskian constancy, Bessel closed
//! form, WKB convergence, zero scattering and the gap term.

use vdw_core::geo_optics::beta1;
use vdw_core::media::{Density, Dispersion, Domain, MediumProfile, Polarization, ProfileKind};
use vdw_core::numerics::log_log_slope;
use vdw_core::radial_green::{homogeneous_green, solve_radial_mode, wkb_green, GridSpec, ModeIndex};
use vdw_core::renorm::gap_residual;
use vdw_core::specfun::{vsh_sum, vsh_sum_direct, VshKind};

use crate::table::Table;

pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub requirement: &'static str,
    pub pass: bool,
}

fn wide() -> Domain {
    Domain { r_min: 1e-3, r_max: 1e3 }
}

fn fisheye() -> MediumProfile {
    MediumProfile::new(ProfileKind::Fisheye { n1: 1.5, k: 1.0, a: 1.0 }, Dispersion::None, wide()).expect("fisheye")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Worst deviation of the closed vector-harmonic sums from direct
/// `m`-summation, relative to `max(|closed|, 1)`, over `l <= 10`.
pub fn sum_identities() -> f64 {
    let mut worst = 0.0f64;
    for l in 1..=10u32 {
        for kind in VshKind::ALL {
            let cf = vsh_sum(kind, l);
            for i in 0..20 {
                let theta = 0.15 + 2.8 * (i as f64 + 0.5) / 20.0;
                let phi = (i as f64 * 2.399_963_229_728_653) % (2.0 * std::f64::consts::PI);
                let (re, im) = vsh_sum_direct(kind, l, theta, phi);
                for a in 0..3 {
                    for b in 0..3 {
                        let scale = cf[a][b].abs().max(1.0);
                        worst = worst.max((re[a][b] - cf[a][b]).abs() / scale).max(im[a][b].abs() / scale);
                    }
                }
            }
        }
    }
    worst
}

/// Largest Wronskian spread of the fisheye solver over a few modes.
pub fn wronskian_spread() -> f64 {
    let profile = fisheye();
    let mut worst = 0.0f64;
    for l in [1, 4, 30] {
        let mode = ModeIndex::new(l, Polarization::E, 2.0).expect("mode");
        match solve_radial_mode(&profile, mode, GridSpec::new(0.05, 20.0, 41).expect("grid")) {
            Ok(sol) => worst = worst.max(sol.wronskian_spread()),
            Err(_) => return f64::NAN,
        }
    }
    worst
}

/// Worst relative deviation of the homogeneous solver from the Bessel
/// closed form over orders `ls` and `kappa r` in `[0.1, 100]`.
pub fn bessel_green(ls: &[u32]) -> f64 {
    let (eps, mu) = (2.0, 1.3);
    let profile = MediumProfile::homogeneous(eps, mu, Dispersion::None, wide()).expect("homogeneous");
    let n = (eps * mu).sqrt();
    let radii: [f64; 7] = [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0];
    let mut worst = 0.0f64;
    for pol in [Polarization::E, Polarization::M] {
        let nu = if pol == Polarization::E { mu } else { eps };
        for &l in ls {
            let mode = ModeIndex::new(l, pol, 1.0).expect("mode");
            let Ok(sol) = solve_radial_mode(&profile, mode, GridSpec::new(0.1, 100.0, 31).expect("grid")) else {
                return f64::NAN;
            };
            for &r in &radii {
                for &r0 in &radii {
                    if (r / r0).ln().abs() > 2.5 {
                        continue;
                    }
                    let (Ok(got), Ok(want)) = (sol.green_all(r, r0), homogeneous_green(n, nu, &mode, r, r0)) else {
                        return f64::NAN;
                    };
                    for k in 0..4 {
                        worst = worst.max(rel(got[k], want[k]));
                    }
                }
            }
        }
    }
    worst
}

/// Log-log slope of the WKB Green-function error against `w`.
pub fn wkb_slope() -> f64 {
    let profile = fisheye();
    let (r, r0) = (1.2, 1.0);
    let mut w = Vec::new();
    let mut err = Vec::new();
    for kappa in [20.0, 40.0, 80.0, 160.0] {
        let mode = ModeIndex::new(1, Polarization::E, kappa).expect("mode");
        let Ok(sol) = solve_radial_mode(&profile, mode, GridSpec::new(0.9, 1.3, 5).expect("grid")) else {
            return f64::NAN;
        };
        let (Ok(exact), Ok(approx)) = (sol.green_all(r, r0), wkb_green(&profile, &mode, r, r0)) else {
            return f64::NAN;
        };
        w.push(kappa * r0 * profile.eps_mu::<f64>(r0, kappa).0);
        err.push(rel(approx, exact[0]));
    }
    -log_log_slope(&w, &err)
}

/// Largest `|beta1|` of both polarizations over `count` radii of the
/// homogeneous and fisheye profiles.
pub fn zero_scattering(count: usize) -> f64 {
    let domain = Domain { r_min: 0.05, r_max: 5.0 };
    let homogeneous = MediumProfile::homogeneous(2.0, 1.0, Dispersion::SingleResonance { kappa_res: 2.0 }, domain).expect("homogeneous");
    let lens = MediumProfile::new(ProfileKind::Fisheye { n1: 1.5, k: 1.0, a: 1.0 }, Dispersion::None, domain).expect("fisheye");
    let mut worst = 0.0f64;
    for profile in [&homogeneous, &lens] {
        for i in 0..count {
            let r = 0.1 + 4.8 * i as f64 / (count - 1).max(1) as f64;
            for kappa in [0.5, 2.0, 10.0] {
                for pol in [Polarization::E, Polarization::M] {
                    match beta1(profile, r, kappa, pol) {
                        Ok(b) => worst = worst.max(b.abs()),
                        Err(_) => return f64::NAN,
                    }
                }
            }
        }
    }
    worst
}

/// Gap-term suite on a dilute dispersive gas at `l = 20`, `r = 0.8`:
/// the worst relative deviation of bare minus `D0` from the gap term at
/// `w >= 100`, and the power with which subtracting `D1` shrinks the rest.
pub fn gap_suite() -> (f64, f64) {
    let kind = ProfileKind::DiluteGas { polarizability_over_eps0: 1.0, density: Density::Gaussian { peak: 1e-4, width: 1.0 } };
    let domain = Domain { r_min: 0.05, r_max: 4.0 };
    let profile = MediumProfile::new(kind, Dispersion::SingleResonance { kappa_res: 1.0 }, domain).expect("gas");
    let (l, r) = (20u32, 0.8);
    let p = l as f64 + 0.5;
    let mut worst = 0.0f64;
    let mut w = Vec::new();
    let mut left = Vec::new();
    for target in [100.0f64, 141.0, 200.0, 283.0, 400.0] {
        let kappa = (target * target - p * p).sqrt() / r;
        let Ok(g) = gap_residual(&profile, l, kappa, r) else {
            return (f64::NAN, f64::NAN);
        };
        worst = worst.max(rel(g.bare_minus_d0, g.gap));
        w.push(g.w);
        left.push((g.bare_minus_d0_d1 / g.bare_minus_d0).abs());
    }
    (worst, -log_log_slope(&w, &left))
}

pub fn checks() -> Vec<Check> {
    let below = |name, measured: f64, tol: f64, requirement| Check { name, measured, requirement, pass: measured < tol };
    let (gap_rel, gap_power) = gap_suite();
    let slope = wkb_slope();
    vec![
        below("sum_identities", sum_identities(), 1e-12, "< 1e-12"),
        below("wronskian_spread", wronskian_spread(), 1e-9, "< 1e-9"),
        below("bessel_green", bessel_green(&[1, 5, 20, 100]), 1e-8, "< 1e-8"),
        Check { name: "wkb_slope", measured: slope, requirement: "3 +- 0.5", pass: (slope - 3.0).abs() < 0.5 },
        below("zero_scattering", zero_scattering(50), 1e-12, "< 1e-12"),
        below("gap_term", gap_rel, 1e-3, "< 1e-3"),
        Check { name: "gap_d1_power", measured: gap_power, requirement: ">= 2", pass: gap_power >= 2.0 },
    ]
}

pub fn run() -> Table {
    let mut t = Table::new("diag", &["check", "measured", "requirement", "pass"]);
    for c in checks() {
        t.push(vec![c.name.into(), c.measured.into(), c.requirement.into(), c.pass.into()]);
    }
    t
}
