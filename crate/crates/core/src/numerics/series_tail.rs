//! Tails of slowly convergent sums with inverse-power terms.

use nalgebra::{DMatrix, DVector};

/// `sum_{j >= 0} (p0 + j)^-k` for `k >= 2` by Euler-Maclaurin; accurate to
/// rounding for `p0 >= 20`.
pub fn inverse_power_tail(p0: f64, k: i32) -> f64 {
    assert!(k >= 2, "inverse_power_tail needs k >= 2");
    let kf = k as f64;
    let mut s = p0.powi(1 - k) / (kf - 1.0) + 0.5 * p0.powi(-k);
    // B_{2i} / (2i)!
    const B: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut rising = kf;
    let mut pw = p0.powi(-k - 1);
    for (i, b) in B.iter().enumerate() {
        s += b * rising * pw;
        let m = 2 * i as i32 + 1;
        rising *= (kf + m as f64) * (kf + m as f64 + 1.0);
        pw /= p0 * p0;
    }
    s
}

/// Fit `t(p) = sum_k c_k p^-k`, `k` in `powers`, to samples and return the
/// tail `sum_{p > p_last}` of the fitted model for each column.
///
/// `p` must be consecutive with unit spacing; `terms[i][c]` is column `c`
/// at `p[i]`.
pub fn fitted_tail<const C: usize>(p: &[f64], terms: &[[f64; C]], powers: &[i32]) -> Option<[f64; C]> {
    let n = p.len();
    if n < 2 * powers.len() || terms.len() != n {
        return None;
    }
    let p_ref = *p.last()?;
    let a = DMatrix::from_fn(n, powers.len(), |i, j| (p_ref / p[i]).powi(powers[j]));
    let svd = a.svd(true, true);
    let mut out = [0.0; C];
    for (c, o) in out.iter_mut().enumerate() {
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t[c].abs()));
        if scale == 0.0 {
            continue;
        }
        let b = DVector::from_fn(n, |i, _| terms[i][c] / scale);
        let coef = svd.solve(&b, 1e-14).ok()?;
        let p0 = p_ref + 1.0;
        *o = scale
            * powers
                .iter()
                .enumerate()
                .map(|(j, &k)| coef[j] * p_ref.powi(k) * inverse_power_tail(p0, k))
                .sum::<f64>();
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_matches_direct_sums() {
        for k in [2, 3, 4, 6] {
            let p0 = 40.5;
            let direct: f64 = (0..2_000_000).rev().map(|j| (p0 + j as f64).powi(-k)).sum();
            // remainder beyond the direct range
            let rest = inverse_power_tail(p0 + 2_000_000.0, k);
            let want = direct + rest;
            let got = inverse_power_tail(p0, k);
            assert!(((got - want) / want).abs() < 1e-12, "k {k}: {got} vs {want}");
        }
    }

    #[test]
    fn fit_recovers_inverse_power_model() {
        let p: Vec<f64> = (51..=100).map(|l| l as f64 + 0.5).collect();
        let model = |x: f64| [3.0 / (x * x) - 7.0 / x.powi(4), 2.0 / x.powi(3)];
        let terms: Vec<[f64; 2]> = p.iter().map(|&x| model(x)).collect();
        let tail = fitted_tail(&p, &terms, &[2, 3, 4, 5, 6]).unwrap();
        let want = [3.0 * inverse_power_tail(101.5, 2) - 7.0 * inverse_power_tail(101.5, 4), 2.0 * inverse_power_tail(101.5, 3)];
        for c in 0..2 {
            assert!(((tail[c] - want[c]) / want[c]).abs() < 1e-9, "column {c}: {} vs {}", tail[c], want[c]);
        }
    }
}
