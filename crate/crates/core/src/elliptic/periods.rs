use core::f64::consts::PI;

use super::series::{self, I};
use super::{CurveInvariants, PeriodMatrix};
use crate::{Error, Result, C64};
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

/// Default relative tolerance on the reproduced invariants.
pub const DEFAULT_PRECISION: f64 = 1e-13;

const NEWTON_STEPS: usize = 80;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Reduces `τ = ω₂/ω₁` into the standard fundamental domain and returns the
/// matching first basis vector `ω₁'` with `ω₂' = τ'·ω₁'`.
///
/// Boundary ties go to `Re τ ∈ [−½, ½)`, and on `|τ| = 1` to `Re τ ≤ 0`.
pub(crate) fn reduce_basis(omega1: C64, omega2: C64) -> (C64, C64) {
    let (mut w1, mut w2) = (omega1, omega2);
    if (w2 / w1).im < 0.0 {
        core::mem::swap(&mut w1, &mut w2);
    }
    for _ in 0..200 {
        let tau = w2 / w1;
        let n = (tau.re + 0.5).floor();
        w2 -= w1 * n;
        let tau = w2 / w1;
        if tau.norm_sqr() < 1.0 - 1e-13 {
            let (a, b) = (w2, -w1);
            w1 = a;
            w2 = b;
        } else {
            break;
        }
    }
    let mut tau = w2 / w1;
    if tau.re >= 0.5 - 1e-12 {
        w2 -= w1;
        tau = w2 / w1;
    }
    if (tau.norm_sqr() - 1.0).abs() < 1e-12 && tau.re > 1e-12 {
        let (a, b) = (w2, -w1);
        w1 = a;
        w2 = b;
        tau = w2 / w1;
    }
    (w1, tau)
}

struct Candidate {
    omega1: C64,
    tau: C64,
    residual: f64,
}

/// Relative mismatch between the invariants of `ω₁(ℤ + ℤτ)` and the targets.
fn residual_of(inv: &CurveInvariants, omega1: C64, tau: C64, scale: f64) -> f64 {
    let e = series::eisenstein(tau);
    let w2 = omega1 * omega1;
    let w4 = w2 * w2;
    let g2 = e.e4 * series::G2_NORM / w4;
    let g3 = e.e6 * series::G3_NORM / (w4 * w2);
    let s4 = scale.powi(4);
    let s6 = scale.powi(6);
    ((g2 - inv.g2).norm() / s4).max((g3 - inv.g3).norm() / s6)
}

/// Newton's method on `(ω₁, τ) ↦ (g₂(Λ) − g₂, g₃(Λ) − g₃)`. The Jacobian is
/// invertible exactly when `Δ ≠ 0`, so this converges from any reasonable
/// seed to some basis of the unique lattice with the given invariants.
fn newton(inv: &CurveInvariants, mut omega1: C64, mut tau: C64, scale: f64) -> Candidate {
    let mut best = residual_of(inv, omega1, tau, scale);
    for _ in 0..NEWTON_STEPS {
        let (w1, t) = reduce_basis(omega1, omega1 * tau);
        omega1 = w1;
        tau = t;
        let e = series::eisenstein(tau);
        let w2 = omega1 * omega1;
        let w4 = w2 * w2;
        let w6 = w4 * w2;
        let g2 = e.e4 * series::G2_NORM / w4;
        let g3 = e.e6 * series::G3_NORM / w6;
        let f1 = g2 - inv.g2;
        let f2 = g3 - inv.g3;
        // Ramanujan: E₄' = 2πi(E₂E₄ − E₆)/3, E₆' = πi(E₂E₆ − E₄²).
        let de4 = I * (2.0 * PI) * (e.e2 * e.e4 - e.e6) / 3.0;
        let de6 = I * PI * (e.e2 * e.e6 - e.e4 * e.e4);
        let a11 = g2 * (-4.0) / omega1;
        let a12 = de4 * series::G2_NORM / w4;
        let a21 = g3 * (-6.0) / omega1;
        let a22 = de6 * series::G3_NORM / w6;
        let det = a11 * a22 - a12 * a21;
        if det.norm() == 0.0 || !det.is_finite() {
            break;
        }
        let d_omega = (a22 * f1 - a12 * f2) / det;
        let d_tau = (a11 * f2 - a21 * f1) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand_w = omega1 - d_omega * lambda;
            let cand_t = tau - d_tau * lambda;
            if cand_t.im > 0.05 && cand_w.norm() > 0.0 {
                let r = residual_of(inv, cand_w, cand_t, scale);
                if r < best {
                    best = r;
                    omega1 = cand_w;
                    tau = cand_t;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted || best < 1e-16 {
            break;
        }
    }
    let (w1, t) = reduce_basis(omega1, omega1 * tau);
    Candidate {
        omega1: w1,
        tau: t,
        residual: residual_of(inv, w1, t, scale),
    }
}

/// Chooses `ω₁` so that `ω₁(ℤ + ℤτ)` matches the invariants as closely as
/// the fixed `τ` allows.
fn omega_from_tau(inv: &CurveInvariants, tau: C64) -> C64 {
    let e = series::eisenstein(tau);
    let gh2 = e.e4 * series::G2_NORM;
    let gh3 = e.e6 * series::G3_NORM;
    let mut best = (f64::INFINITY, one());
    if inv.g2.norm().powi(3) >= 27.0 * inv.g3.norm_sqr() {
        let base = (gh2 / inv.g2).powf(0.25);
        for k in 0..4 {
            let w = base * C64::from_polar(1.0, PI * 0.5 * k as f64);
            let d = (gh3 / w.powi(6) - inv.g3).norm();
            if d < best.0 {
                best = (d, w);
            }
        }
    } else {
        let base = (gh3 / inv.g3).powf(1.0 / 6.0);
        for k in 0..6 {
            let w = base * C64::from_polar(1.0, PI / 3.0 * k as f64);
            let d = (gh2 / w.powi(4) - inv.g2).norm();
            if d < best.0 {
                best = (d, w);
            }
        }
    }
    best.1
}

/// Roots of `4x³ − g₂x − g₃` by Durand–Kerner with a Newton polish.
pub(crate) fn cubic_roots(inv: &CurveInvariants) -> [C64; 3] {
    let s = inv.scale().max(1e-300);
    let s2 = s * s;
    let seed = C64::new(0.4, 0.9);
    let mut r = [seed * s2, seed * seed * s2, seed * seed * seed * s2];
    let f = |x: C64| x * x * x - inv.g2 * 0.25 * x - inv.g3 * 0.25;
    for _ in 0..500 {
        let mut delta = 0.0_f64;
        for i in 0..3 {
            let mut den = one();
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            let step = f(r[i]) / den;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-17 * s2 {
            break;
        }
    }
    for x in r.iter_mut() {
        for _ in 0..3 {
            let d = *x * *x * 3.0 - inv.g2 * 0.25;
            if d.norm() > 0.0 {
                *x -= f(*x) / d;
            }
        }
    }
    r
}

/// Seeds `τ` from the roots via `λ = (e₃ − e₂)/(e₁ − e₂)` and
/// `τ = i·M(1, √(1−λ))/M(1, √λ)`, one seed per ordering of the roots.
fn agm_seeds(inv: &CurveInvariants) -> alloc::vec::Vec<C64> {
    let e = cubic_roots(inv);
    let perms = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut out = alloc::vec::Vec::new();
    for p in perms {
        let (e1, e2, e3) = (e[p[0]], e[p[1]], e[p[2]]);
        let lambda = (e3 - e2) / (e1 - e2);
        let k = lambda.sqrt();
        let kp = (one() - lambda).sqrt();
        let mk = series::agm(one(), k);
        let mkp = series::agm(one(), kp);
        let tau = I * mkp / mk;
        if tau.is_finite() && tau.im > 0.0 {
            let (_, t) = reduce_basis(one(), tau);
            out.push(t);
        }
    }
    out
}

fn fallback_seeds() -> alloc::vec::Vec<C64> {
    let mut out = alloc::vec::Vec::new();
    for i in 0..8 {
        for j in 0..8 {
            let re = -0.5 + (i as f64 + 0.5) / 8.0;
            let im = 0.8 + 0.35 * j as f64 * (1.0 + 0.3 * j as f64);
            out.push(C64::new(re, im));
        }
    }
    out
}

/// Periods and quasi-periods of the lattice with invariants `g₂, g₃`.
///
/// The returned basis is oriented with `τ = ω₂/ω₁` in the standard
/// fundamental domain. When the lattice has extra automorphisms (`τ = i` or
/// `τ = e^{2πi/3}`) the rotation of `ω₁` with smallest argument is used, and
/// in general the sign with `Re ω₁ > 0`.
pub fn compute_periods(inv: &CurveInvariants, precision_target: f64) -> Result<PeriodMatrix> {
    inv.check_nondegenerate()?;
    if !(precision_target > 0.0) {
        return Err(Error::InvalidArgument(
            "precision target must be positive".into(),
        ));
    }
    let scale = inv.scale();
    let mut best: Option<Candidate> = None;
    let try_seed = |tau: C64, best: &mut Option<Candidate>| {
        let w = omega_from_tau(inv, tau);
        let c = newton(inv, w, tau, scale);
        let better = best.as_ref().is_none_or(|b| c.residual < b.residual);
        if better {
            *best = Some(c);
        }
        best.as_ref()
            .is_some_and(|b| b.residual < precision_target * 1e-2)
    };
    let mut done = false;
    for tau in agm_seeds(inv) {
        if try_seed(tau, &mut best) {
            done = true;
            break;
        }
    }
    if !done {
        for tau in fallback_seeds() {
            if try_seed(tau, &mut best) {
                break;
            }
        }
    }
    let best = best.ok_or(Error::NoConvergence {
        context: "period lattice",
        residual: f64::INFINITY,
    })?;
    if !(best.residual < precision_target) {
        return Err(Error::NoConvergence {
            context: "period lattice",
            residual: best.residual,
        });
    }
    Ok(finish(best.omega1, best.tau))
}

fn finish(omega1: C64, tau: C64) -> PeriodMatrix {
    let rho = C64::new(-0.5, 3.0_f64.sqrt() / 2.0);
    let units: &[f64] = if (tau - I).norm() < 1e-9 {
        &[0.0, 0.5, 1.0, 1.5]
    } else if (tau - rho).norm() < 1e-9 {
        &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0, 4.0 / 3.0, 5.0 / 3.0]
    } else {
        &[0.0, 1.0]
    };
    let mut omega = omega1;
    let mut best_key = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &k in units {
        let w = omega1 * C64::from_polar(1.0, PI * k);
        let c = w.re / w.norm();
        // Largest cosine of the argument; ties resolved toward Im ω₁ > 0.
        let key = ((c * 1e12).round(), w.im);
        if key > best_key {
            best_key = key;
            omega = w;
        }
    }
    let omega2 = omega * tau;
    let e = series::eisenstein(tau);
    let eta1 = e.e2 * (PI * PI / 3.0) / omega;
    let eta2 = (eta1 * omega2 - I * (2.0 * PI)) / omega;
    PeriodMatrix {
        omega1: omega,
        omega2,
        eta1,
        eta2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_lattice() {
        let inv = CurveInvariants::real(4.0, 0.0).unwrap();
        let pm = compute_periods(&inv, DEFAULT_PRECISION).unwrap();
        assert!((pm.tau() - I).norm() < 1e-12);
        assert!(pm.omega1.im.abs() < 1e-14 && pm.omega1.re > 0.0);
        assert!(pm.legendre_residual() < 1e-12);
    }

    #[test]
    fn reduce_basis_ties() {
        let (_, t) = reduce_basis(one(), C64::new(0.5, 0.9));
        assert!((t - C64::new(-0.5, 0.9)).norm() < 1e-14);
        let (_, t) = reduce_basis(one(), C64::from_polar(1.0, 1.2));
        assert!(t.re < 0.0 && (t.norm() - 1.0).abs() < 1e-14);
        let (_, t) = reduce_basis(one(), C64::new(3.3, 0.01));
        assert!(t.norm() >= 1.0 - 1e-12 && t.re >= -0.5 && t.re < 0.5);
    }

    #[test]
    fn cubic_roots_are_roots() {
        let inv = CurveInvariants::new(C64::new(1.3, -2.0), C64::new(0.4, 0.9)).unwrap();
        for r in cubic_roots(&inv) {
            assert!(inv.cubic(r).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_precision() {
        let inv = CurveInvariants::real(4.0, 0.0).unwrap();
        assert!(compute_periods(&inv, 0.0).is_err());
    }
}
