//! Dormand–Prince 5(4) with adaptive step control for small fixed-size
//! systems. Integrates in either direction.

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-11, atol: 1e-14, h_init: 1e-2, max_steps: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step budget exhausted at x = {x} after {steps} steps")]
    StepBudget { x: f64, steps: usize },
    #[error("step size underflow at x = {x}")]
    StepUnderflow { x: f64 },
    #[error("non-finite state at x = {x}")]
    NonFinite { x: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrate `y' = f(x, y)` from `x0` to `x1`. `stops` are abscissae the
/// integrator must land on exactly (sorted in the direction of travel);
/// `on_stop` is called at each with the state.
pub fn integrate<const D: usize, F, S>(
    f: F,
    x0: f64,
    y0: [f64; D],
    x1: f64,
    stops: &[f64],
    mut on_stop: S,
    opts: OdeOptions,
) -> Result<([f64; D], OdeStats), OdeError>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    S: FnMut(f64, &[f64; D]),
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let mut x = x0;
    let mut y = y0;
    let mut stats = OdeStats { steps: 0, rejected: 0 };
    if x0 == x1 {
        return Ok((y, stats));
    }
    let mut h = opts.h_init.abs().min((x1 - x0).abs()) * dir;
    let mut k1 = f(x, &y);
    let mut stop_idx = 0;
    while stop_idx < stops.len() && (stops[stop_idx] - x0) * dir <= 0.0 {
        on_stop(stops[stop_idx], &y);
        stop_idx += 1;
    }
    loop {
        let target = if stop_idx < stops.len() && (x1 - stops[stop_idx]) * dir > 0.0 { stops[stop_idx] } else { x1 };
        let remaining = target - x;
        let h_prop = h;
        let mut landing = false;
        if h.abs() >= remaining.abs() {
            h = remaining;
            landing = true;
        }
        if h.abs() < 1e-15 * x.abs().max(1.0) && !landing {
            return Err(OdeError::StepUnderflow { x });
        }
        let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(x + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(x + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let yn = axpy(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + h, &yn);
        let mut err = 0.0f64;
        for i in 0..D {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(yn[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            if !yn.iter().all(|v| v.is_finite()) && h.abs() < 1e-12 {
                return Err(OdeError::NonFinite { x });
            }
            h *= 0.2;
            stats.rejected += 1;
            continue;
        }
        if err <= 1.0 {
            x = if landing { target } else { x + h };
            y = yn;
            k1 = k7;
            stats.steps += 1;
            if landing {
                if target != x1 || (stop_idx < stops.len() && stops[stop_idx] == x1) {
                    on_stop(x, &y);
                    stop_idx += 1;
                }
                if x == x1 {
                    return Ok((y, stats));
                }
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if landing { h_prop.abs().max(h.abs() * fac) * dir } else { h * fac };
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            stats.rejected += 1;
        }
        if stats.steps + stats.rejected > opts.max_steps {
            return Err(OdeError::StepBudget { x, steps: stats.steps });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_backward_and_forward() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-16, ..Default::default() };
        let (y, _) = integrate(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 3.0, &[], |_, _| {}, opts).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-12);
        let (y, _) = integrate(|_, y: &[f64; 1]| [-y[0]], 3.0, [1.0], 0.0, &[], |_, _| {}, opts).unwrap();
        assert!((y[0] - 3.0f64.exp()).abs() < 1e-10);
    }

    #[test]
    fn lands_on_stops() {
        let mut seen = vec![];
        let opts = OdeOptions::default();
        integrate(|_, _y: &[f64; 1]| [1.0], 0.0, [0.0], 1.0, &[0.25, 0.5], |x, y| seen.push((x, y[0])), opts).unwrap();
        assert_eq!(seen.len(), 2);
        assert_eq!(seen[0].0, 0.25);
        assert!((seen[1].1 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn harmonic_oscillator_energy() {
        let opts = OdeOptions { rtol: 1e-12, atol: 1e-14, ..Default::default() };
        let (y, _) =
            integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 10.0, &[], |_, _| {}, opts).unwrap();
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
    }
}
