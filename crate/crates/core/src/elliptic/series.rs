//! Series expansions: Eisenstein q-series, Jacobi theta `θ₁` with derivatives,
//! and the Laurent expansion of `℘` at the origin.

use core::f64::consts::PI;

use crate::C64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// `g₂(ℤ + ℤτ) = G2_NORM · E₄(τ)`.
pub(crate) const G2_NORM: f64 = 4.0 * PI * PI * PI * PI / 3.0;
/// `g₃(ℤ + ℤτ) = G3_NORM · E₆(τ)`.
pub(crate) const G3_NORM: f64 = 8.0 * PI * PI * PI * PI * PI * PI / 27.0;

const MAX_Q_TERMS: usize = 4000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Eisenstein {
    pub e2: C64,
    pub e4: C64,
    pub e6: C64,
}

/// Normalized Eisenstein series `E₂, E₄, E₆` at `τ` (Im τ > 0), summed as
/// Lambert series in `q = e^{2πiτ}`.
pub(crate) fn eisenstein(tau: C64) -> Eisenstein {
    let q = (I * 2.0 * PI * tau).exp();
    let (mut s1, mut s3, mut s5) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let mut qn = C64::new(1.0, 0.0);
    for n in 1..=MAX_Q_TERMS {
        qn *= q;
        let nf = n as f64;
        let t = qn / (C64::new(1.0, 0.0) - qn);
        let n2 = nf * nf;
        s1 += t * nf;
        s3 += t * (n2 * nf);
        s5 += t * (n2 * n2 * nf);
        if qn.norm() * n2 * n2 * nf < 1e-18 {
            break;
        }
    }
    Eisenstein {
        e2: C64::new(1.0, 0.0) - s1 * 24.0,
        e4: C64::new(1.0, 0.0) + s3 * 240.0,
        e6: C64::new(1.0, 0.0) - s5 * 504.0,
    }
}

/// Klein's `j(τ) = 1728 E₄³ / (E₄³ − E₆²)`.
pub(crate) fn j_of_tau(tau: C64) -> C64 {
    let e = eisenstein(tau);
    let e43 = e.e4 * e.e4 * e.e4;
    e43 * 1728.0 / (e43 - e.e6 * e.e6)
}

/// `θ₁(v)` and its first three derivatives for the nome `q = e^{iπτ}`.
pub(crate) fn theta1_derivs(v: C64, tau: C64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    let mut scale = 0.0_f64;
    for n in 0..64usize {
        let h = n as f64 + 0.5;
        let qpow = (I * PI * tau * (h * h)).exp();
        let k = (2 * n + 1) as f64;
        let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
        let (s, c) = ((v * k).sin(), (v * k).cos());
        let a = qpow * sign;
        let t0 = a * s;
        let t1 = a * c * k;
        let t2 = -a * s * (k * k);
        let t3 = -a * c * (k * k * k);
        out[0] += t0;
        out[1] += t1;
        out[2] += t2;
        out[3] += t3;
        let mag = t0.norm() + t1.norm() + t2.norm() + t3.norm();
        scale = scale.max(out[0].norm() + out[1].norm());
        if n > 0 && mag <= 1e-18 * scale {
            break;
        }
    }
    out
}

/// Number of Laurent coefficients kept; adequate for `|z| ≤ LAURENT_RADIUS · |ω_min|`.
pub(crate) const LAURENT_TERMS: usize = 28;
pub(crate) const LAURENT_RADIUS: f64 = 0.25;

/// Coefficients `c_k` (index `k`, starting at 2) of
/// `℘(z) = z⁻² + Σ_{k≥2} c_k z^{2k−2}`.
pub(crate) fn laurent_coefficients(g2: C64, g3: C64) -> [C64; LAURENT_TERMS + 2] {
    let mut c = [C64::new(0.0, 0.0); LAURENT_TERMS + 2];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..LAURENT_TERMS + 2 {
        let mut s = C64::new(0.0, 0.0);
        for m in 2..=k - 2 {
            s += c[m] * c[k - m];
        }
        c[k] = s * (3.0 / (((2 * k + 1) * (k - 3)) as f64));
    }
    c
}

/// `(℘, ℘′, ζ, ℘′ζ + 2℘²)` at small `z ≠ 0`, summed from the Laurent
/// expansion. The last entry is analytic at 0 and is summed term by term so
/// that the `z⁻⁴` cancellation never happens in floating point.
pub(crate) fn laurent_values(z: C64, c: &[C64; LAURENT_TERMS + 2]) -> [C64; 4] {
    let z2 = z * z;
    let inv = C64::new(1.0, 0.0) / z;
    let inv2 = inv * inv;
    // b = ℘ − z⁻², cc = ℘′ + 2z⁻³, a = ζ − z⁻¹, hs = −2a/z³ + 4b/z² + cc/z.
    let (mut a, mut b, mut cc, mut hs) = (
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    // z^{2k−4}, starting at k = 2.
    let mut zp = C64::new(1.0, 0.0);
    for (k, ck) in c.iter().enumerate().skip(2) {
        let kf = k as f64;
        let two_k_m1 = 2.0 * kf - 1.0;
        hs += ck * zp * (2.0 / two_k_m1 + 2.0 * kf + 2.0);
        b += ck * zp * z2;
        cc += ck * zp * z * (2.0 * kf - 2.0);
        a -= ck * zp * z2 * z / two_k_m1;
        zp *= z2;
    }
    let wp = inv2 + b;
    let dwp = inv2 * inv * (-2.0) + cc;
    let zeta = inv + a;
    let h = hs + cc * a + b * b * 2.0;
    [wp, dwp, zeta, h]
}

/// Arithmetic-geometric mean with the optimal branch of the square root at
/// every step.
pub(crate) fn agm(mut a: C64, mut b: C64) -> C64 {
    for _ in 0..200 {
        let an = (a + b) * 0.5;
        let mut bn = (a * b).sqrt();
        if (an - bn).norm() > (an + bn).norm() {
            bn = -bn;
        }
        a = an;
        b = bn;
        if (a - b).norm() <= 1e-16 * a.norm() {
            break;
        }
    }
    (a + b) * 0.5
}
