//! Addition theorems for vector spherical harmonics at coincident angles.
//!
//! With `Y = r_hat Y_lm`, `Psi = r grad Y_lm` and `Phi = r_hat x Psi`, the
//! sums `sum_m A_lm (x) B_lm^*` over a complete `m` multiplet are
//! rotation-invariant tensors in the local `(r, theta, phi)` frame.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::legendre::assoc_legendre_normalized;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VshKind {
    YY,
    PsiPsi,
    PhiPhi,
    PsiPhi,
    PhiPsi,
    YPsi,
    YPhi,
    PsiY,
    PhiY,
}

impl VshKind {
    pub const ALL: [VshKind; 9] = [
        VshKind::YY,
        VshKind::PsiPsi,
        VshKind::PhiPhi,
        VshKind::PsiPhi,
        VshKind::PhiPsi,
        VshKind::YPsi,
        VshKind::YPhi,
        VshKind::PsiY,
        VshKind::PhiY,
    ];

    fn parts(self) -> (Field, Field) {
        use Field::*;
        match self {
            VshKind::YY => (Y, Y),
            VshKind::PsiPsi => (Psi, Psi),
            VshKind::PhiPhi => (Phi, Phi),
            VshKind::PsiPhi => (Psi, Phi),
            VshKind::PhiPsi => (Phi, Psi),
            VshKind::YPsi => (Y, Psi),
            VshKind::YPhi => (Y, Phi),
            VshKind::PsiY => (Psi, Y),
            VshKind::PhiY => (Phi, Y),
        }
    }
}

#[derive(Clone, Copy)]
enum Field {
    Y,
    Psi,
    Phi,
}

pub type Tensor3 = [[f64; 3]; 3];

/// Closed-form value of the multiplet sum.
pub fn vsh_sum(kind: VshKind, l: u32) -> Tensor3 {
    let lf = l as f64;
    let c = lf * (lf + 1.0) * (2.0 * lf + 1.0) / (8.0 * PI);
    let mut t = [[0.0; 3]; 3];
    match kind {
        VshKind::YY => t[0][0] = (2.0 * lf + 1.0) / (4.0 * PI),
        VshKind::PsiPsi | VshKind::PhiPhi => {
            t[1][1] = c;
            t[2][2] = c;
        }
        VshKind::PsiPhi => {
            t[1][2] = c;
            t[2][1] = -c;
        }
        VshKind::PhiPsi => {
            t[1][2] = -c;
            t[2][1] = c;
        }
        VshKind::YPsi | VshKind::YPhi | VshKind::PsiY | VshKind::PhiY => {}
    }
    t
}

fn fields(l: u32, theta: f64, phi: f64) -> Vec<[[Complex64; 3]; 3]> {
    // per m: [Y, Psi, Phi] each a 3-vector in (r, theta, phi)
    let lu = l as usize;
    let x = theta.cos();
    let s = theta.sin();
    let mut out = Vec::with_capacity(2 * lu + 1);
    let mut by_m = Vec::with_capacity(lu + 1);
    for m in 0..=lu {
        let pl = assoc_legendre_normalized(lu, m, x);
        let p = pl[lu];
        let pm1 = if lu >= 1 && m <= lu - 1 { pl[lu - 1] } else { 0.0 };
        let lf = l as f64;
        let mf = m as f64;
        // (x^2 - 1) dP/dx = l x P_l - sqrt((2l+1)(l-m)(l+m)/(2l-1)) P_{l-1}
        let coef = if lu >= 1 { ((2.0 * lf + 1.0) * (lf - mf) * (lf + mf) / (2.0 * lf - 1.0)).sqrt() } else { 0.0 };
        let dpdx = (lf * x * p - coef * pm1) / (x * x - 1.0);
        let dtheta = -s * dpdx;
        by_m.push((p, dtheta));
    }
    for mi in -(l as i64)..=(l as i64) {
        let m = mi.unsigned_abs() as usize;
        let (p, dp) = by_m[m];
        let ph = Complex64::from_polar(1.0, mi as f64 * phi);
        let sign = if mi < 0 && m % 2 == 1 { -1.0 } else { 1.0 };
        let y = ph * p * sign;
        let dy = ph * dp * sign;
        let im = Complex64::new(0.0, mi as f64);
        let z = Complex64::new(0.0, 0.0);
        let yv = [y, z, z];
        let psi = [z, dy, im * y / s];
        let phiv = [z, -im * y / s, dy];
        out.push([yv, psi, phiv]);
    }
    out
}

/// Direct summation over `m` of explicit harmonics at `(theta, phi)`.
/// Returns the real and imaginary parts of the tensor.
pub fn vsh_sum_direct(kind: VshKind, l: u32, theta: f64, phi: f64) -> (Tensor3, Tensor3) {
    let (fa, fb) = kind.parts();
    let ia = fa as usize;
    let ib = fb as usize;
    let mut re = [[0.0; 3]; 3];
    let mut im = [[0.0; 3]; 3];
    for f in fields(l, theta, phi) {
        for i in 0..3 {
            for j in 0..3 {
                let v = f[ia][i] * f[ib][j].conj();
                re[i][j] += v.re;
                im[i][j] += v.im;
            }
        }
    }
    (re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_phi_l2_block() {
        let t = vsh_sum(VshKind::PsiPhi, 2);
        let c = 30.0 / (8.0 * PI);
        assert_eq!(t[1][2], c);
        assert_eq!(t[2][1], -c);
        assert_eq!(t[0][0], 0.0);
    }

    #[test]
    fn direct_matches_closed_form_small_l() {
        for l in 1..=4 {
            for kind in VshKind::ALL {
                let (re, im) = vsh_sum_direct(kind, l, 0.7, 1.9);
                let cf = vsh_sum(kind, l);
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((re[i][j] - cf[i][j]).abs() < 1e-12, "{kind:?} l={l} ({i},{j})");
                        assert!(im[i][j].abs() < 1e-12);
                    }
                }
            }
        }
    }
}
