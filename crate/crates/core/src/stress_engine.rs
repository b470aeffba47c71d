//! Spectral stresses of single modes, renormalized mode sums and the
//! imaginary-wavenumber integral `sigma = -(hbar c / 2 pi) int W dkappa`.
//!
//! Per polarization `P` with weight `nu` and dual function `d`
//! (`nu = mu, d = eps` for E):
//! `W_r^r(d-field) = kappa^2 d g`, `W_th^th(nu-field) = -l(l+1) g / (nu r^2)`,
//! `W_r^r(nu-field) = -d_r d_r0 (r r0 g) / (nu r^2) - W_th^th(nu-field)`,
//! each weighted by the coincidence sum `(2l+1)/(4 pi)`. Renormalization
//! subtracts the renormalizer from `g` and from the mixed derivative per
//! mode before any summation.

use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::media::{MediumError, MediumProfile, Polarization};
use crate::numerics::log_log_slope;
use crate::numerics::series_tail::fitted_tail;
use crate::numerics::quad::{half_line_map, integrate_adaptive, integrate_plan, AdaptiveOptions, QuadResult};
use crate::radial_green::{coincidence_deviation, ModeIndex, RadialError};
use crate::renorm::{renorm_deviation, RenormError};

/// `hbar c` in J m.
pub const HBAR_C: f64 = 3.1615e-26;

/// Modes evaluated together before the stop rule is consulted. Fixed, so
/// results do not depend on the thread count.
const L_CHUNK: u32 = 8;
/// Consecutive small terms that end the mode sum.
const STOP_RUN: usize = 3;
/// Largest accepted share of unconverged mode tails in the total stress.
/// Nodes at `kappa r` near or above `l_max` cannot meet `l_tol`; their
/// tail estimates enter the error instead.
const MODE_TAIL_REL_MAX: f64 = 1e-3;
/// First checkpoint of the extrapolated mode sum; later ones double.
const FIRST_CHECKPOINT: u32 = 32;
/// Inverse powers of `p = l + 1/2` fitted to the renormalized terms.
const TAIL_POWERS: [i32; 5] = [2, 3, 4, 5, 6];
/// The kappa quadrature ends at `kappa r = l_max / KAPPA_CUT_MODES`; above
/// it the integrand is a fitted power law.
const KAPPA_CUT_MODES: f64 = 10.0;
/// Fit nodes `kappa_cut 2^(-j/2)` below the cut.
const KAPPA_FIT_NODES: usize = 5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StressError {
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error(transparent)]
    Renorm(#[from] RenormError),
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("invalid stress spec: {0}")]
    Invalid(String),
    #[error("mode sum not converged at l_max = {l_max}: tail estimate {tail:.3e} Pa against stress {stress:.3e} Pa")]
    NonConvergent { l_max: u32, tail: f64, stress: f64 },
    #[error("kappa integrand decays as kappa^{exponent:.2}, too slowly for a finite tail")]
    KappaTail { exponent: f64 },
    #[error("kappa quadrature missed tolerance {rel_tol:e} with {nodes} nodes (error {error:.3e} Pa)")]
    Quadrature { rel_tol: f64, nodes: usize, error: f64 },
}

/// Truncation and quadrature settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StressSpec {
    pub l_tol: f64,
    pub l_max: u32,
    pub kappa_rel_tol: f64,
    /// Scale of the map `kappa = kappa_s t / (1 - t)`; defaults to the
    /// resonance wavenumber, else `1/r`.
    pub kappa_scale: Option<f64>,
    pub kappa_nodes_max: usize,
}

impl Default for StressSpec {
    fn default() -> Self {
        Self { l_tol: 1e-8, l_max: 400, kappa_rel_tol: 1e-6, kappa_scale: None, kappa_nodes_max: 15 * 64 }
    }
}

impl StressSpec {
    pub fn validate(&self) -> Result<(), StressError> {
        let bad = |m: &str| Err(StressError::Invalid(m.into()));
        if !(self.l_tol > 0.0 && self.l_tol < 1.0) {
            return bad("l_tol must lie in (0, 1)");
        }
        if self.l_max < 2 * L_CHUNK {
            return bad("l_max must be at least 16");
        }
        if !(self.kappa_rel_tol > 0.0 && self.kappa_rel_tol < 1.0) {
            return bad("kappa_rel_tol must lie in (0, 1)");
        }
        if let Some(s) = self.kappa_scale {
            if !(s > 0.0 && s.is_finite()) {
                return bad("kappa_scale must be positive");
            }
        }
        if self.kappa_nodes_max < 60 {
            return bad("kappa_nodes_max must allow at least four panels (60 nodes)");
        }
        Ok(())
    }

    pub fn scale_for(&self, profile: &MediumProfile, r: f64) -> f64 {
        self.kappa_scale.or(profile.dispersion.scale()).unwrap_or(1.0 / r)
    }
}

/// Weighted angular coefficients of one `(l, P, kappa)` mode, split by the
/// field (electric / magnetic) that carries them.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpectralStress {
    pub rr_e_field: f64,
    pub thth_e_field: f64,
    pub rr_m_field: f64,
    pub thth_m_field: f64,
}

impl SpectralStress {
    pub fn rr(&self) -> f64 {
        self.rr_e_field + self.rr_m_field
    }

    pub fn thth(&self) -> f64 {
        self.thth_e_field + self.thth_m_field
    }
}

/// Coincidence `(g, mix)` of one mode, bare or renormalized, with
/// `mix = d_r d_r0 (r r0 g)` one-sided from `r > r0`.
fn coincidence_values(profile: &MediumProfile, mode: &ModeIndex, r: f64, renormalize: bool) -> Result<(f64, f64), StressError> {
    let dev = coincidence_deviation(profile, mode, r)?;
    if renormalize {
        let (dg_ren, dmix_ren) = renorm_deviation(profile, mode, &dev.reference)?;
        Ok((dev.dg - dg_ren, dev.dmix - dmix_ren))
    } else {
        Ok((dev.g_h + dev.dg, dev.mix_h + dev.dmix))
    }
}

/// Spectral stress coefficients of one mode at coincidence `r0 = r`.
pub fn spectral_stress_mode(
    profile: &MediumProfile,
    mode: &ModeIndex,
    r: f64,
    renormalize: bool,
) -> Result<SpectralStress, StressError> {
    profile.check_radius(r)?;
    let (g, mix) = coincidence_values(profile, mode, r, renormalize)?;
    let (eps, mu) = profile.eps_mu::<f64>(r, mode.kappa);
    let lf = mode.l as f64;
    let weight = (2.0 * lf + 1.0) / (4.0 * std::f64::consts::PI);
    let (nu, dual) = match mode.polarization {
        Polarization::E => (mu, eps),
        Polarization::M => (eps, mu),
    };
    let k2 = mode.kappa * mode.kappa;
    let r2 = r * r;
    let w_dual = k2 * dual * g;
    let w_th = -lf * (lf + 1.0) * g / (nu * r2);
    let w_rr = -mix / (nu * r2) - w_th;
    let (dual_rr, nu_rr, nu_th) = (weight * w_dual, weight * w_rr, weight * w_th);
    Ok(match mode.polarization {
        Polarization::E => SpectralStress { rr_e_field: dual_rr, thth_e_field: 0.0, rr_m_field: nu_rr, thth_m_field: nu_th },
        Polarization::M => SpectralStress { rr_e_field: nu_rr, thth_e_field: nu_th, rr_m_field: dual_rr, thth_m_field: 0.0 },
    })
}

/// Layout of the mode-sum vector.
const N_SUM: usize = 8;
/// Layout of the kappa-integrand vector: the mode sum, the two gradient
/// terms of the Abraham identity and the mode-sum error estimate.
const N_INT: usize = 11;

fn mode_vector(profile: &MediumProfile, l: u32, kappa: f64, r: f64) -> Result<[f64; N_SUM], StressError> {
    let e = spectral_stress_mode(profile, &ModeIndex::new(l, Polarization::E, kappa)?, r, true)?;
    let m = spectral_stress_mode(profile, &ModeIndex::new(l, Polarization::M, kappa)?, r, true)?;
    Ok([
        e.rr_e_field + m.rr_e_field,
        e.thth_e_field + m.thth_e_field,
        e.rr_m_field + m.rr_m_field,
        e.thth_m_field + m.thth_m_field,
        e.rr(),
        e.thth(),
        m.rr(),
        m.thth(),
    ])
}

fn term_norm(v: &[f64]) -> f64 {
    v[..4].iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Renormalized mode sum at one `kappa`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSum {
    pub kappa: f64,
    /// `[rr_E, thth_E, rr_M, thth_M]` by field, then `[rr, thth]` of the
    /// E and of the M polarization.
    pub values: [f64; N_SUM],
    pub l_used: u32,
    pub converged: bool,
    /// Error estimate of the sum: the last small term, or the change of the
    /// extrapolated sum between the last two checkpoints.
    pub tail: f64,
    /// Term magnitudes decrease over the final stop window.
    pub monotone_tail: bool,
}

/// Partial sum through `terms.len()` modes plus the fitted inverse-power
/// tail over the upper half of the terms.
fn extrapolated(terms: &[[f64; N_SUM]]) -> Option<[f64; N_SUM]> {
    let n = terms.len();
    let from = n / 2;
    let p: Vec<f64> = (from..n).map(|i| i as f64 + 1.5).collect();
    let tail = fitted_tail(&p, &terms[from..], &TAIL_POWERS)?;
    let mut out = tail;
    for t in terms {
        for (o, v) in out.iter_mut().zip(t) {
            *o += v;
        }
    }
    Some(out)
}

fn checkpoints(l_cap: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut c = FIRST_CHECKPOINT;
    while c < l_cap {
        out.push(c);
        c *= 2;
    }
    out.push(l_cap);
    out
}

/// Renormalized mode sum over `1 <= l <= l_cap`.
///
/// The renormalized terms fall off as inverse powers of `p = l + 1/2`, so
/// beyond the last computed mode the sum is completed by a fitted tail. The
/// sum ends when three consecutive terms are below `l_tol` of the partial
/// sum, or when the extrapolated sums at two successive checkpoints agree
/// to `l_tol`.
fn mode_sum_capped(profile: &MediumProfile, kappa: f64, r: f64, l_tol: f64, l_cap: u32) -> Result<ModeSum, StressError> {
    let marks = checkpoints(l_cap);
    let mut next_mark = 0usize;
    let mut previous: Option<[f64; N_SUM]> = None;
    let mut terms: Vec<[f64; N_SUM]> = Vec::new();
    let mut sum = [0.0; N_SUM];
    let mut small_run = 0usize;
    let monotone = |terms: &[[f64; N_SUM]]| {
        let w = &terms[terms.len().saturating_sub(STOP_RUN)..];
        w.windows(2).all(|p| term_norm(&p[1]) <= term_norm(&p[0]))
    };
    let mut last_change = f64::INFINITY;
    let mut l = 1;
    while l <= l_cap {
        let hi = (l + L_CHUNK - 1).min(l_cap);
        let chunk: Vec<Result<[f64; N_SUM], StressError>> =
            (l..=hi).into_par_iter().map(|j| mode_vector(profile, j, kappa, r)).collect();
        for t in chunk {
            let t = t?;
            for (s, v) in sum.iter_mut().zip(t) {
                *s += v;
            }
            terms.push(t);
            let tn = term_norm(&t);
            small_run = if tn <= l_tol * term_norm(&sum) { small_run + 1 } else { 0 };
            if small_run >= STOP_RUN {
                let l_used = terms.len() as u32;
                return Ok(ModeSum { kappa, values: sum, l_used, converged: true, tail: tn, monotone_tail: monotone(&terms) });
            }
            if next_mark < marks.len() && terms.len() as u32 == marks[next_mark] {
                next_mark += 1;
                if let Some(e) = extrapolated(&terms) {
                    if let Some(prev) = previous {
                        last_change = (0..N_SUM).map(|c| (e[c] - prev[c]).abs()).fold(0.0, f64::max);
                        if last_change <= l_tol * term_norm(&e) {
                            let l_used = terms.len() as u32;
                            return Ok(ModeSum {
                                kappa,
                                values: e,
                                l_used,
                                converged: true,
                                tail: last_change,
                                monotone_tail: monotone(&terms),
                            });
                        }
                    }
                    previous = Some(e);
                }
            }
        }
        l = hi + 1;
    }
    let values = previous.unwrap_or(sum);
    let tail = if last_change.is_finite() {
        last_change
    } else {
        terms.last().map_or(0.0, |t| term_norm(t)) * terms.len() as f64
    };
    Ok(ModeSum { kappa, values, l_used: l_cap, converged: false, tail, monotone_tail: monotone(&terms) })
}

/// Renormalized mode sum at one `kappa`; see [`renormalized_stress`] for
/// the stop rule.
pub fn mode_sum(profile: &MediumProfile, r: f64, kappa: f64, spec: &StressSpec) -> Result<ModeSum, StressError> {
    spec.validate()?;
    profile.check_radius(r)?;
    mode_sum_capped(profile, kappa, r, spec.l_tol, spec.l_max)
}

/// Physical stress at one radius with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct StressResult {
    pub r: f64,
    pub sigma_rr: f64,
    /// Equal to `sigma_phiphi` by symmetry.
    pub sigma_thth: f64,
    pub trace_e: f64,
    pub trace_m: f64,
    /// `[rr, thth]` carried by the electric and by the magnetic field.
    pub e_field: [f64; 2],
    pub m_field: [f64; 2],
    /// `[rr, thth]` of the E and of the M polarization.
    pub e_polarization: [f64; 2],
    pub m_polarization: [f64; 2],
    /// `(eps'/eps) tr sigma_E` and `(mu'/mu) tr sigma_M`, with the
    /// dispersive gradients inside the spectral integral.
    pub eps_gradient_term: f64,
    pub mu_gradient_term: f64,
    pub l_max_used: u32,
    pub kappa_nodes: usize,
    /// Quadrature error plus omitted modes plus the kappa-tail model error
    /// plus the change under doubling `l_max` at the dominant node.
    pub error: f64,
    pub quadrature_converged: bool,
    pub modes_converged: bool,
    pub monotone_tails: bool,
    /// Log-log slope of the integrand over the fit nodes below `kappa_cut`.
    pub tail_exponent: f64,
    pub grid: KappaGrid,
}

impl StressResult {
    pub fn sigma_phiphi(&self) -> f64 {
        self.sigma_thth
    }
}

struct NodeCache {
    values: Mutex<HashMap<u64, (Vec<f64>, ModeSum)>>,
}

/// Integrand columns at one node, before the `kappa(t)` Jacobian.
fn integrand(profile: &MediumProfile, r: f64, ms: &ModeSum) -> Vec<f64> {
    let (eps, mu) = profile.eps_mu(crate::numerics::Jet::<2>::variable(r), ms.kappa);
    let eps_log = eps.c[1] / eps.c[0];
    let mu_log = mu.c[1] / mu.c[0];
    let v = ms.values;
    let mut row = v.to_vec();
    row.push(eps_log * (v[0] + 2.0 * v[1]));
    row.push(mu_log * (v[2] + 2.0 * v[3]));
    row.push(ms.tail);
    row
}

/// Integral of the integrand over `(kappa_cut, inf)`.
#[derive(Debug, Clone, PartialEq)]
struct PowerTail {
    exponent: f64,
    values: Vec<f64>,
    error: f64,
}

/// Fits `a (kappa/kc)^s + b (kappa/kc)^(s-2)` per column, with `s` the
/// log-log slope of the stress columns, and integrates it from `kc`.
/// The error is the change against the one-term fit.
fn power_tail(kc: f64, pts: &[(f64, Vec<f64>)]) -> Result<PowerTail, StressError> {
    let norms: Vec<f64> = pts.iter().map(|p| term_norm(&p.1)).collect();
    if norms.iter().all(|n| *n == 0.0) {
        return Ok(PowerTail { exponent: f64::NEG_INFINITY, values: vec![0.0; N_INT], error: 0.0 });
    }
    let ks: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let s = log_log_slope(&ks, &norms);
    if !(s < -1.0) {
        return Err(StressError::KappaTail { exponent: s });
    }
    let phi: Vec<(f64, f64)> = ks.iter().map(|k| ((k / kc).powf(s), (k / kc).powf(s - 2.0))).collect();
    let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
    for (p1, p2) in &phi {
        s11 += p1 * p1;
        s12 += p1 * p2;
        s22 += p2 * p2;
    }
    let det = s11 * s22 - s12 * s12;
    let i1 = kc / (-s - 1.0);
    let i2 = kc / (1.0 - s);
    let mut values = vec![0.0; N_INT];
    let mut error = 0.0f64;
    for c in 0..N_INT - 1 {
        let (mut y1, mut y2) = (0.0, 0.0);
        for ((p1, p2), pt) in phi.iter().zip(pts) {
            y1 += p1 * pt.1[c];
            y2 += p2 * pt.1[c];
        }
        let a = (y1 * s22 - y2 * s12) / det;
        let b = (s11 * y2 - s12 * y1) / det;
        values[c] = a * i1 + b * i2;
        if c < 4 {
            error = error.max((values[c] - y1 / s11 * i1).abs());
        }
    }
    let last = pts.iter().max_by(|a, b| a.0.total_cmp(&b.0)).expect("fit nodes");
    values[N_INT - 1] = last.1[N_INT - 1].abs() * i1;
    Ok(PowerTail { exponent: s, values, error })
}

/// Kappa partition of a finished stress evaluation, reusable at nearby
/// radii so that finite differences in `r` see a smooth integral.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaGrid {
    pub scale: f64,
    pub kappa_cut: f64,
    /// Panels in `t = kappa / (kappa + scale)`.
    pub panels: Vec<(f64, f64)>,
}

/// Renormalized stress at `r`.
///
/// The kappa integral runs over `t = kappa / (kappa + kappa_s)` up to
/// `kappa_cut = l_max / (10 r)`, where mode sums capped at `l_max` are still
/// accurate, and is completed by a power-law tail fitted to nodes in
/// `[kappa_cut / 4, kappa_cut]`.
pub fn renormalized_stress(profile: &MediumProfile, r: f64, spec: &StressSpec) -> Result<StressResult, StressError> {
    stress_with_grid(profile, r, spec, None)
}

/// Renormalized stress at `r` on a fixed kappa partition taken from an
/// earlier result.
pub fn renormalized_stress_on(
    profile: &MediumProfile,
    r: f64,
    spec: &StressSpec,
    grid: &KappaGrid,
) -> Result<StressResult, StressError> {
    stress_with_grid(profile, r, spec, Some(grid))
}

fn stress_with_grid(
    profile: &MediumProfile,
    r: f64,
    spec: &StressSpec,
    grid: Option<&KappaGrid>,
) -> Result<StressResult, StressError> {
    spec.validate()?;
    profile.check_radius(r)?;
    let (scale, kappa_cut) = match grid {
        Some(g) => (g.scale, g.kappa_cut),
        None => (spec.scale_for(profile, r), spec.l_max as f64 / (KAPPA_CUT_MODES * r)),
    };
    let t_cut = kappa_cut / (kappa_cut + scale);
    let cache = NodeCache { values: Mutex::new(HashMap::new()) };
    let node = |kappa: f64| -> Result<(Vec<f64>, ModeSum), StressError> {
        if let Some(v) = cache.values.lock().expect("cache lock").get(&kappa.to_bits()) {
            return Ok(v.clone());
        }
        let out = if kappa > 0.0 {
            let ms = mode_sum_capped(profile, kappa, r, spec.l_tol, spec.l_max)?;
            (integrand(profile, r, &ms), ms)
        } else {
            let empty = ModeSum { kappa, values: [0.0; N_SUM], l_used: 0, converged: true, tail: 0.0, monotone_tail: true };
            (vec![0.0; N_INT], empty)
        };
        cache.values.lock().expect("cache lock").insert(kappa.to_bits(), out.clone());
        Ok(out)
    };
    let failure: Mutex<Option<StressError>> = Mutex::new(None);
    let eval = |ts: &[f64]| -> Vec<Vec<f64>> {
        ts.par_iter()
            .map(|&t| {
                let (kappa, jac) = half_line_map(scale, t);
                match node(kappa) {
                    Ok((row, _)) => row.iter().map(|x| x * jac).collect(),
                    Err(e) => {
                        failure.lock().expect("failure lock").get_or_insert(e);
                        vec![0.0; N_INT]
                    }
                }
            })
            .collect()
    };
    let fit_kappas: Vec<f64> = (0..KAPPA_FIT_NODES).map(|j| kappa_cut * 2f64.powf(-(j as f64) / 2.0)).collect();
    let fit: Vec<Result<(f64, Vec<f64>), StressError>> =
        fit_kappas.par_iter().map(|&k| node(k).map(|(row, _)| (k, row))).collect();
    let fit: Vec<(f64, Vec<f64>)> = fit.into_iter().collect::<Result<_, _>>()?;
    let tail = power_tail(kappa_cut, &fit)?;
    let quad: QuadResult = match grid {
        Some(g) => integrate_plan(&eval, &g.panels),
        None => {
            // coarse pass fixes the absolute floor for components that cancel
            let coarse = integrate_adaptive(
                &eval,
                0.0,
                t_cut,
                AdaptiveOptions { rel_tol: 1.0, abs_tol: 0.0, initial_panels: 4, max_evaluations: 60, batch: 1 },
            );
            if let Some(e) = failure.lock().expect("failure lock").take() {
                return Err(e);
            }
            let magnitude = coarse.value.iter().take(4).fold(0.0f64, |a, x| a.max(x.abs()));
            let opts = AdaptiveOptions {
                rel_tol: spec.kappa_rel_tol,
                abs_tol: spec.kappa_rel_tol * magnitude,
                initial_panels: 4,
                max_evaluations: spec.kappa_nodes_max,
                batch: 4,
            };
            integrate_adaptive(&eval, 0.0, t_cut, opts)
        }
    };
    if let Some(e) = failure.lock().expect("failure lock").take() {
        return Err(e);
    }
    let pref = -HBAR_C / (2.0 * std::f64::consts::PI);
    let v: Vec<f64> = quad.value.iter().zip(&tail.values).map(|(x, t)| pref * (x + t)).collect();
    let quad_err = pref.abs() * quad.error.iter().take(4).fold(0.0f64, |a, x| a.max(*x));
    let kappa_tail_err = pref.abs() * tail.error;

    let mut nodes: Vec<(f64, Vec<f64>, ModeSum)> = {
        let map = cache.values.lock().expect("cache lock");
        let mut all: Vec<(f64, Vec<f64>, ModeSum)> =
            map.iter().map(|(k, (row, ms))| (f64::from_bits(*k), row.clone(), ms.clone())).collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        all
    };
    nodes.retain(|n| n.2.l_used > 0);

    let mut modes_converged = true;
    let mut monotone = true;
    let mut l_max_used = 0;
    for (_, _, ms) in &nodes {
        l_max_used = l_max_used.max(ms.l_used);
        monotone &= ms.monotone_tail;
        modes_converged &= ms.converged;
    }
    let node_count = quad.evaluations;
    let tail_err = v[N_INT - 1].abs();

    // control node: largest integrand, re-summed to twice its l
    let mut doubling_err = 0.0;
    if let Some((_, row, ms)) = nodes.iter().max_by(|a, b| term_norm(&a.1).total_cmp(&term_norm(&b.1))) {
        if ms.converged && term_norm(row) > 0.0 {
            let ext = mode_sum_capped(profile, ms.kappa, r, 0.0, 2 * ms.l_used)?;
            let change: f64 = (0..4).map(|c| (ext.values[c] - ms.values[c]).abs()).fold(0.0, f64::max);
            let rel = change / term_norm(&ms.values);
            doubling_err = rel * v.iter().take(4).fold(0.0f64, |a, x| a.max(x.abs()));
        }
    }

    let tail_exponent = tail.exponent;
    let error = quad_err + tail_err + kappa_tail_err + doubling_err;
    let result = StressResult {
        r,
        sigma_rr: v[0] + v[2],
        sigma_thth: v[1] + v[3],
        trace_e: v[0] + 2.0 * v[1],
        trace_m: v[2] + 2.0 * v[3],
        e_field: [v[0], v[1]],
        m_field: [v[2], v[3]],
        e_polarization: [v[4], v[5]],
        m_polarization: [v[6], v[7]],
        eps_gradient_term: v[8],
        mu_gradient_term: v[9],
        l_max_used,
        kappa_nodes: node_count,
        error,
        quadrature_converged: quad.converged,
        modes_converged,
        monotone_tails: monotone,
        tail_exponent,
        grid: KappaGrid { scale, kappa_cut, panels: quad.plan() },
    };
    let total = result.sigma_rr.abs().max(result.sigma_thth.abs());
    if !modes_converged && tail_err > MODE_TAIL_REL_MAX * total.max(f64::MIN_POSITIVE) {
        return Err(StressError::NonConvergent { l_max: spec.l_max, tail: tail_err, stress: total });
    }
    if !quad.converged {
        return Err(StressError::Quadrature { rel_tol: spec.kappa_rel_tol, nodes: quad.evaluations, error: quad_err });
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::{Density, Dispersion, Domain, ProfileKind};

    fn gas(peak: f64) -> MediumProfile {
        let kind = ProfileKind::DiluteGas { polarizability_over_eps0: 1.0, density: Density::Gaussian { peak, width: 1.0 } };
        MediumProfile::new(kind, Dispersion::SingleResonance { kappa_res: 5.0 }, Domain { r_min: 0.05, r_max: 4.0 }).unwrap()
    }

    #[test]
    fn homogeneous_stress_vanishes() {
        let domain = Domain { r_min: 0.1, r_max: 5.0 };
        let p = MediumProfile::homogeneous(2.0, 1.5, Dispersion::SingleResonance { kappa_res: 3.0 }, domain).unwrap();
        let spec = StressSpec::default();
        for r in [0.3, 1.0, 2.5] {
            let s = renormalized_stress(&p, r, &spec).unwrap();
            assert_eq!([s.sigma_rr, s.sigma_thth, s.trace_e, s.trace_m], [0.0; 4]);
            assert!(s.modes_converged && s.quadrature_converged);
        }
    }

    #[test]
    fn bare_modes_do_not_vanish() {
        let domain = Domain { r_min: 0.1, r_max: 5.0 };
        let p = MediumProfile::homogeneous(2.0, 1.0, Dispersion::None, domain).unwrap();
        let mode = ModeIndex::new(1, Polarization::E, 1.0).unwrap();
        let bare = spectral_stress_mode(&p, &mode, 1.0, false).unwrap();
        let ren = spectral_stress_mode(&p, &mode, 1.0, true).unwrap();
        assert!(bare.rr().abs() > 1e-3);
        assert_eq!(ren, SpectralStress::default());
    }

    #[test]
    fn modes_are_linear_in_dilute_density() {
        let (a, b) = (gas(1e-6), gas(2e-6));
        for (l, kappa) in [(1, 0.5), (3, 2.0), (10, 8.0)] {
            let va = mode_vector(&a, l, kappa, 0.8).unwrap();
            let vb = mode_vector(&b, l, kappa, 0.8).unwrap();
            for c in 0..4 {
                if va[c] != 0.0 {
                    assert!((vb[c] / va[c] - 2.0).abs() < 1e-3, "l={l} c={c}: {}", vb[c] / va[c]);
                }
            }
        }
    }

    fn fit_nodes(kc: f64, col: impl Fn(f64) -> f64) -> Vec<(f64, Vec<f64>)> {
        (0..KAPPA_FIT_NODES)
            .map(|j| {
                let k = kc * 2f64.powf(-(j as f64) / 2.0);
                (k, vec![col(k); N_INT])
            })
            .collect()
    }

    #[test]
    fn power_tail_integrates_a_power_law() {
        let kc = 20.0;
        let pure = power_tail(kc, &fit_nodes(kc, |k| 3.0 * k.powi(-3))).unwrap();
        let exact = 1.5 / (kc * kc);
        assert!((pure.exponent + 3.0).abs() < 1e-12);
        assert!((pure.values[0] - exact).abs() < 1e-12 * exact);
        assert!(pure.error < 1e-12 * exact);

        let mixed = power_tail(kc, &fit_nodes(kc, |k| 3.0 * k.powi(-3) + 0.5 * k.powi(-5))).unwrap();
        let exact = 1.5 / (kc * kc) + 0.125 / kc.powi(4);
        assert!((mixed.values[0] - exact).abs() < 1e-2 * exact);
        assert!(mixed.error > 0.0);
    }

    #[test]
    fn slow_tails_are_rejected() {
        let pts: Vec<(f64, Vec<f64>)> = (0..KAPPA_FIT_NODES).map(|j| (10.0 * 2f64.powi(-(j as i32)), vec![1.0; N_INT])).collect();
        assert!(matches!(power_tail(10.0, &pts), Err(StressError::KappaTail { .. })));
    }

    #[test]
    fn mode_sums_ignore_thread_count() {
        let p = gas(1e-4);
        let spec = StressSpec::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mode_sum(&p, 0.8, 1.0, &spec).unwrap())
        };
        let (one, four) = (run(1), run(4));
        assert!(one.converged);
        assert_eq!(one.values.map(f64::to_bits), four.values.map(f64::to_bits));
    }

    #[test]
    fn fixed_grid_reproduces_the_adaptive_result() {
        let p = gas(1e-4);
        let spec = StressSpec { l_tol: 1e-6, kappa_rel_tol: 1e-4, ..StressSpec::default() };
        let s = renormalized_stress(&p, 0.8, &spec).unwrap();
        let again = renormalized_stress_on(&p, 0.8, &spec, &s.grid).unwrap();
        assert!((again.sigma_rr - s.sigma_rr).abs() <= 1e-12 * s.sigma_rr.abs());
        assert!(s.error < 1e-2 * s.sigma_rr.abs());
        assert!(s.tail_exponent < -2.0);
    }

    #[test]
    fn spec_validation() {
        assert!(StressSpec { l_tol: 0.0, ..StressSpec::default() }.validate().is_err());
        assert!(StressSpec { l_max: 4, ..StressSpec::default() }.validate().is_err());
        assert!(StressSpec { kappa_scale: Some(-1.0), ..StressSpec::default() }.validate().is_err());
        assert!(StressSpec::default().validate().is_ok());
    }
}
