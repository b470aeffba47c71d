//! Riccati integration of the homogeneous solutions and the Wronskian
//! representation `u = h+(x>) h-(x<) / W`.

use super::wkb::{deviation_series, input_jets, log_derivs_from, truncation, wkb_log_derivs, wkb_validity, MAX_ORDER, SEED_JET};
use super::{local_terms, ModeIndex, RadialError, Reference};
use crate::media::MediumProfile;
use crate::numerics::ode::{integrate, OdeOptions};
use crate::specfun::bessel_ik;

/// Target of `int 2 sqrt(V) dx` between a seed and the first point of
/// interest: seed errors relax like `exp(-int 2 sqrt(V))`.
const SUPPRESSION: f64 = 36.0;
/// Furthest a seed may be moved from the region of interest, in `x`.
const MAX_EXTENSION: f64 = 80.0;
/// Relative seed error accepted outside the validity bound; the remaining
/// `exp(-SUPPRESSION)` damping takes it below rounding.
const SERIES_TOLERANCE: f64 = 1e-2;

fn ode_options() -> OdeOptions {
    OdeOptions { rtol: 1e-12, atol: 1e-14, h_init: 1e-3, max_steps: 400_000 }
}

/// Radial grid, uniform in `x = ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self, RadialError> {
        if !(r_min > 0.0 && r_max > r_min && points >= 2) {
            return Err(RadialError::InvalidMode(format!("grid needs 0 < r_min < r_max and 2+ points, got [{r_min}, {r_max}] x {points}")));
        }
        Ok(Self { r_min, r_max, points })
    }

    pub fn abscissae(&self) -> Vec<f64> {
        let (a, b) = (self.r_min.ln(), self.r_max.ln());
        let n = self.points - 1;
        (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
    }
}

/// Walk away from `x_from` in direction `dir` until seed errors are
/// suppressed below double precision and the WKB series is usable.
fn seed_point(profile: &MediumProfile, mode: &ModeIndex, x_from: f64, dir: f64) -> Result<f64, RadialError> {
    let (pol, kappa, p) = (mode.polarization, mode.kappa, mode.p());
    let root_v = |x: f64| local_terms(profile, pol, kappa, p, x, None).v.sqrt();
    let mut x = x_from;
    let mut w = root_v(x);
    let mut acc = 0.0;
    loop {
        if acc >= SUPPRESSION {
            let param = wkb_validity(profile, mode, x);
            if param < super::WKB_VALIDITY_LIMIT {
                return Ok(x);
            }
            // Power-law tails keep |s1'/s0'| finite while the series
            // still converges; accept a small truncation error there.
            let (lp, lm, err) = wkb_log_derivs(profile, mode, x);
            if err.is_finite() && err <= SERIES_TOLERANCE * lp.abs().max(lm.abs()) {
                return Ok(x);
            }
            if (x - x_from).abs() > MAX_EXTENSION {
                return Err(RadialError::SeedInvalid { x, param });
            }
        }
        let dx = (0.5 / w).min(0.25);
        let x2 = x + dir * dx;
        let w2 = root_v(x2);
        acc += (w + w2) * dx;
        x = x2;
        w = w2;
    }
}

fn riccati_rhs<'a>(profile: &'a MediumProfile, mode: &ModeIndex) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + 'a {
    let (pol, kappa, p) = (mode.polarization, mode.kappa, mode.p());
    move |x, y| {
        let t = local_terms(profile, pol, kappa, p, x, None);
        [t.v + 0.5 * t.nu_log + t.nu_log * y[0] - y[0] * y[0], y[0]]
    }
}

/// Which derivatives of `g` to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreenDerivative {
    Value,
    Dr,
    Dr0,
    Mixed,
}

/// Homogeneous solutions of one mode on a grid.
#[derive(Debug, Clone)]
pub struct RadialMode {
    pub mode: ModeIndex,
    pub grid: GridSpec,
    pub x: Vec<f64>,
    pub l_plus: Vec<f64>,
    pub l_minus: Vec<f64>,
    /// `ln h+` relative to its value at the upper seed.
    pub ln_h_plus: Vec<f64>,
    /// `ln h-` relative to its value at the lower seed.
    pub ln_h_minus: Vec<f64>,
    /// Seed abscissae `(x_lo, x_hi)`.
    pub seeds: (f64, f64),
    profile: MediumProfile,
}

/// Integrate `L+` inward and `L-` outward over the grid.
pub fn solve_radial_mode(profile: &MediumProfile, mode: ModeIndex, grid: GridSpec) -> Result<RadialMode, RadialError> {
    let x = grid.abscissae();
    let n = x.len();
    let x_hi = seed_point(profile, &mode, x[n - 1], 1.0)?;
    let x_lo = seed_point(profile, &mode, x[0], -1.0)?;
    let f = riccati_rhs(profile, &mode);
    let opts = ode_options();

    let (lp0, _, _) = wkb_log_derivs(profile, &mode, x_hi);
    let down: Vec<f64> = x.iter().rev().copied().collect();
    let mut plus = Vec::with_capacity(n);
    integrate(&f, x_hi, [lp0, 0.0], x[0], &down, |_, y| plus.push(*y), opts)?;
    plus.reverse();

    let (_, lm0, _) = wkb_log_derivs(profile, &mode, x_lo);
    let mut minus = Vec::with_capacity(n);
    integrate(&f, x_lo, [lm0, 0.0], x[n - 1], &x, |_, y| minus.push(*y), opts)?;

    Ok(RadialMode {
        mode,
        grid,
        l_plus: plus.iter().map(|y| y[0]).collect(),
        ln_h_plus: plus.iter().map(|y| y[1]).collect(),
        l_minus: minus.iter().map(|y| y[0]).collect(),
        ln_h_minus: minus.iter().map(|y| y[1]).collect(),
        x,
        seeds: (x_lo, x_hi),
        profile: profile.clone(),
    })
}

impl RadialMode {
    pub(crate) fn from_parts(
        profile: &MediumProfile,
        mode: ModeIndex,
        grid: GridSpec,
        arrays: [Vec<f64>; 5],
        seeds: (f64, f64),
    ) -> Self {
        let [x, l_plus, l_minus, ln_h_plus, ln_h_minus] = arrays;
        Self { mode, grid, x, l_plus, l_minus, ln_h_plus, ln_h_minus, seeds, profile: profile.clone() }
    }

    pub fn profile(&self) -> &MediumProfile {
        &self.profile
    }

    fn nu_at(&self, x: f64) -> f64 {
        local_terms(&self.profile, self.mode.polarization, self.mode.kappa, self.mode.p(), x, None).nu
    }

    /// `ln |W|` at grid node `i`; `W = h+ h- (L+ - L-) / nu` is negative.
    pub fn ln_wronskian_at(&self, i: usize) -> f64 {
        self.ln_h_plus[i] + self.ln_h_minus[i] + (self.l_plus[i] - self.l_minus[i]).abs().ln() - self.nu_at(self.x[i]).ln()
    }

    /// Largest relative deviation of `W` from its value at the first node.
    pub fn wronskian_spread(&self) -> f64 {
        let w0 = self.ln_wronskian_at(0);
        (0..self.x.len()).map(|i| (self.ln_wronskian_at(i) - w0).exp_m1().abs()).fold(0.0, f64::max)
    }

    fn check_x(&self, r: f64) -> Result<f64, RadialError> {
        let x = r.ln();
        let (a, b) = (self.x[0], self.x[self.x.len() - 1]);
        if !(x >= a - 1e-12 && x <= b + 1e-12) {
            return Err(RadialError::OutOfGrid { r, r_min: self.grid.r_min, r_max: self.grid.r_max });
        }
        Ok(x.clamp(a, b))
    }

    /// `(L+, ln h+)` at `x`, integrated down from the next node above.
    fn plus_at(&self, x: f64) -> Result<(f64, f64), RadialError> {
        let j = self.x.partition_point(|&xi| xi < x).min(self.x.len() - 1);
        if self.x[j] == x {
            return Ok((self.l_plus[j], self.ln_h_plus[j]));
        }
        let f = riccati_rhs(&self.profile, &self.mode);
        let (y, _) = integrate(&f, self.x[j], [self.l_plus[j], self.ln_h_plus[j]], x, &[], |_, _| {}, ode_options())?;
        Ok((y[0], y[1]))
    }

    /// `(L-, ln h-)` at `x`, integrated up from the next node below.
    fn minus_at(&self, x: f64) -> Result<(f64, f64), RadialError> {
        let j = self.x.partition_point(|&xi| xi <= x).saturating_sub(1);
        if self.x[j] == x {
            return Ok((self.l_minus[j], self.ln_h_minus[j]));
        }
        let f = riccati_rhs(&self.profile, &self.mode);
        let (y, _) = integrate(&f, self.x[j], [self.l_minus[j], self.ln_h_minus[j]], x, &[], |_, _| {}, ode_options())?;
        Ok((y[0], y[1]))
    }

    fn ln_w_at(&self, x: f64) -> Result<f64, RadialError> {
        let (lp, hp) = self.plus_at(x)?;
        let (lm, hm) = self.minus_at(x)?;
        Ok(hp + hm + (lp - lm).abs().ln() - self.nu_at(x).ln())
    }

    /// `[g, dg/dr, dg/dr0, d2g/dr dr0]`. At `r = r0` the derivatives are the
    /// one-sided limits from `r > r0`.
    pub fn green_all(&self, r: f64, r0: f64) -> Result<[f64; 4], RadialError> {
        let x = self.check_x(r)?;
        let x0 = self.check_x(r0)?;
        let field_above = x >= x0;
        let (x_hi, x_lo) = if field_above { (x, x0) } else { (x0, x) };
        let (lp, hp) = self.plus_at(x_hi)?;
        let (lm, hm) = self.minus_at(x_lo)?;
        let ln_w = 0.5 * (self.ln_w_at(x)? + self.ln_w_at(x0)?);
        let g = -(hp + hm - ln_w - 0.5 * (x + x0)).exp();
        let (dx_field, dx_source) = if field_above { (lp - 0.5, lm - 0.5) } else { (lm - 0.5, lp - 0.5) };
        let dr = g * dx_field / r;
        let dr0 = g * dx_source / r0;
        let mixed = g * dx_field * dx_source / (r * r0);
        Ok([g, dr, dr0, mixed])
    }

    /// `g^{lm}(r, r0)` or one of its first derivatives.
    pub fn green_coeff(&self, r: f64, r0: f64, deriv: GreenDerivative) -> Result<f64, RadialError> {
        let all = self.green_all(r, r0)?;
        Ok(match deriv {
            GreenDerivative::Value => all[0],
            GreenDerivative::Dr => all[1],
            GreenDerivative::Dr0 => all[2],
            GreenDerivative::Mixed => all[3],
        })
    }
}

/// Closed-form coefficient in a homogeneous medium of index `n` and
/// `nu`: `-nu I_p(k r<) K_p(k r>) / sqrt(r r0)` with `k = kappa n`, as
/// `[g, dg/dr, dg/dr0, d2g/dr dr0]` (one-sided from `r > r0` at coincidence).
pub fn homogeneous_green(n: f64, nu: f64, mode: &ModeIndex, r: f64, r0: f64) -> Result<[f64; 4], RadialError> {
    let k = mode.kappa * n;
    let p = mode.p();
    let field_above = r >= r0;
    let (r_hi, r_lo) = if field_above { (r, r0) } else { (r0, r) };
    let b_hi = bessel_ik(p, k * r_hi)?;
    let b_lo = bessel_ik(p, k * r_lo)?;
    let g = -nu * b_lo.i * b_hi.k * (b_lo.eta - b_hi.eta).exp() / (r * r0).sqrt();
    let lp = b_hi.log_deriv_k();
    let lm = b_lo.log_deriv_i();
    let (dx_field, dx_source) = if field_above { (lp - 0.5, lm - 0.5) } else { (lm - 0.5, lp - 0.5) };
    Ok([g, g * dx_field / r, g * dx_source / r0, g * dx_field * dx_source / (r * r0)])
}

/// Coincidence values split into the comparison-medium part (exact
/// Bessel functions) and the deviation caused by the inhomogeneity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceDeviation {
    pub reference: Reference,
    /// `g(r, r)` of the comparison medium.
    pub g_h: f64,
    /// `d_r d_r0 (r r0 g)` at `r -> r0+` of the comparison medium.
    pub mix_h: f64,
    pub dg: f64,
    pub dmix: f64,
    pub l_plus_h: f64,
    pub l_minus_h: f64,
    pub dl_plus: f64,
    pub dl_minus: f64,
}

/// Deviations `dL = L - L_h` of both log-derivatives at `x_e`.
fn deviation_side(
    profile: &MediumProfile,
    mode: &ModeIndex,
    h: &Reference,
    x_e: f64,
    dir: f64,
) -> Result<f64, RadialError> {
    let (pol, kappa, p) = (mode.polarization, mode.kappa, mode.p());
    let wkb_dev = |x: f64| -> (f64, f64) {
        let jets = input_jets::<SEED_JET>(profile, pol, kappa, p, x, Some(h));
        let (v_h, dv) = jets.reference.expect("reference requested");
        let (hom, dev) = deviation_series(v_h, dv, jets.nu_log, MAX_ORDER);
        let full: Vec<f64> = hom.iter().zip(&dev).map(|(a, b)| a.value() + b.value()).collect();
        let dvals: Vec<f64> = dev.iter().map(|d| d.value()).collect();
        let (keep, _) = truncation(&full);
        let (dp, dm) = log_derivs_from(&dvals, keep);
        let err = dvals.get(keep + 1).map_or(dvals[keep].abs(), |d| d.abs());
        (if dir > 0.0 { dp } else { dm }, err)
    };
    let (at_e, err_e) = wkb_dev(x_e);
    if wkb_validity(profile, mode, x_e) < super::WKB_VALIDITY_LIMIT && err_e <= 1e-14 * at_e.abs() {
        return Ok(at_e);
    }
    let x_s = seed_point(profile, mode, x_e, dir)?;
    let (seed, _) = wkb_dev(x_s);
    let zs = h.k() * x_s.exp();
    let bs = bessel_ik(p, zs)?;
    let lh_seed = if dir > 0.0 { bs.log_deriv_k() } else { bs.log_deriv_i() };
    let scale = {
        let s = at_e.abs().max(seed.abs());
        if s > 0.0 && s.is_finite() {
            s
        } else {
            1.0
        }
    };
    let f = |x: f64, y: &[f64; 2]| -> [f64; 2] {
        let t = local_terms(profile, pol, kappa, p, x, Some(h));
        let r = x.exp();
        let v_h = p * p + kappa * kappa * r * r * h.n * h.n;
        let lh = y[0];
        let dl = scale * y[1];
        let ddl = t.dv + 0.5 * t.nu_log + t.nu_log * (lh + dl) - 2.0 * lh * dl - dl * dl;
        [v_h - lh * lh, ddl / scale]
    };
    let (y, _) = integrate(f, x_s, [lh_seed, seed / scale], x_e, &[], |_, _| {}, ode_options())?;
    Ok(y[1] * scale)
}

/// Coincidence Green value and mixed derivative of one mode at `r`,
/// referred to the homogeneous medium with the local `n`, `nu`.
pub fn coincidence_deviation(profile: &MediumProfile, mode: &ModeIndex, r: f64) -> Result<CoincidenceDeviation, RadialError> {
    let h = Reference::at(profile, r, mode.kappa, mode.polarization);
    let b = bessel_ik(mode.p(), h.k() * r)?;
    let l_plus_h = b.log_deriv_k();
    let l_minus_h = b.log_deriv_i();
    let delta_h = -1.0 / b.product();
    let g_h = h.nu / (delta_h * r);
    let (a_h, b_h) = (l_plus_h + 0.5, l_minus_h + 0.5);
    let mix_h = g_h * a_h * b_h;
    let (dl_plus, dl_minus) = if profile.is_homogeneous() {
        (0.0, 0.0)
    } else {
        let x_e = r.ln();
        (deviation_side(profile, mode, &h, x_e, 1.0)?, deviation_side(profile, mode, &h, x_e, -1.0)?)
    };
    let dd = dl_plus - dl_minus;
    let dg = -(h.nu / r) * dd / (delta_h * (delta_h + dd));
    let dmix = dg * (a_h + dl_plus) * (b_h + dl_minus) + g_h * (dl_plus * b_h + a_h * dl_minus + dl_plus * dl_minus);
    Ok(CoincidenceDeviation { reference: h, g_h, mix_h, dg, dmix, l_plus_h, l_minus_h, dl_plus, dl_minus })
}
