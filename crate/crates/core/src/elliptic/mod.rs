//! Period lattices and Weierstrass functions.
//!
//! Curves are given by their Weierstrass invariants `g₂, g₃`. The lattice is
//! found by Newton's method on `(ω₁, τ)` against the Eisenstein
//! q-expansions of `g₂(Λ), g₃(Λ)`, seeded by the AGM. Function values come
//! from Jacobi's `θ₁` on the reduced lattice, or from the Laurent expansion
//! close to a lattice point.

mod periods;
pub(crate) mod series;

use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

use crate::{Error, Result, C64};
use series::{LAURENT_RADIUS, LAURENT_TERMS};

pub use periods::{compute_periods, DEFAULT_PRECISION};

/// Relative discriminant below which a curve counts as degenerate:
/// `|Δ| ≤ DEGENERACY · (|g₂|³ + 27|g₃|²)`.
pub const DEGENERACY: f64 = 1e-10;

/// Relative distance to the lattice below which `℘`, `℘′`, `ζ` refuse to
/// evaluate.
pub const POLE_THRESHOLD: f64 = 1e-6;

/// Legendre relation residual accepted by [`PeriodMatrix::validate`].
pub const LEGENDRE_TOL: f64 = 1e-12;

/// Weierstrass invariants of `y² = 4x³ − g₂x − g₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveInvariants {
    pub g2: C64,
    pub g3: C64,
}

impl CurveInvariants {
    /// Builds the invariants, rejecting (numerically) singular curves.
    pub fn new(g2: C64, g3: C64) -> Result<Self> {
        let inv = CurveInvariants { g2, g3 };
        inv.check_nondegenerate()?;
        Ok(inv)
    }

    pub fn real(g2: f64, g3: f64) -> Result<Self> {
        Self::new(C64::new(g2, 0.0), C64::new(g3, 0.0))
    }

    /// `Δ = g₂³ − 27 g₃²`.
    pub fn discriminant(&self) -> C64 {
        self.g2 * self.g2 * self.g2 - self.g3 * self.g3 * 27.0
    }

    pub fn j_invariant(&self) -> C64 {
        self.g2 * self.g2 * self.g2 * 1728.0 / self.discriminant()
    }

    pub fn check_nondegenerate(&self) -> Result<()> {
        let d = self.discriminant().norm();
        let scale = self.g2.norm().powi(3) + 27.0 * self.g3.norm_sqr();
        if !d.is_finite() || scale == 0.0 || d <= DEGENERACY * scale {
            return Err(Error::DegenerateCurve { discriminant: d });
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        CurveInvariants {
            g2: self.g2.conj(),
            g3: self.g3.conj(),
        }
    }

    /// `4x³ − g₂x − g₃`.
    pub fn cubic(&self, x: C64) -> C64 {
        x * x * x * 4.0 - self.g2 * x - self.g3
    }

    /// Natural length scale `max(|g₂|^{1/4}, |g₃|^{1/6})`, of order `1/|ω|`.
    pub(crate) fn scale(&self) -> f64 {
        self.g2
            .norm()
            .powf(0.25)
            .max(self.g3.norm().powf(1.0 / 6.0))
    }
}

/// Periods `ω₁, ω₂` and quasi-periods `η₁, η₂` of a lattice, i.e. the
/// entries of the period matrix `P = [[ω₁, ω₂], [−η₁, −η₂]]` of `G`.
///
/// Matrices produced by [`compute_periods`] are oriented (`Im τ > 0`) with
/// `τ` in the standard fundamental domain. Entrywise conjugates (see
/// [`PeriodMatrix::conj`]) are anti-oriented; both kinds are accepted
/// everywhere and the Legendre relation is checked with the matching sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMatrix {
    pub omega1: C64,
    pub omega2: C64,
    pub eta1: C64,
    pub eta2: C64,
}

impl PeriodMatrix {
    pub fn tau(&self) -> C64 {
        self.omega2 / self.omega1
    }

    /// `+1` when `Im(ω₂/ω₁) > 0`, `−1` otherwise.
    pub fn orientation(&self) -> f64 {
        if self.tau().im > 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `|η₁ω₂ − η₂ω₁ − 2πi·orientation|`.
    pub fn legendre_residual(&self) -> f64 {
        let lhs = self.eta1 * self.omega2 - self.eta2 * self.omega1;
        (lhs - C64::new(0.0, 2.0 * PI * self.orientation())).norm()
    }

    pub fn validate(&self) -> Result<()> {
        let tau = self.tau();
        if !(tau.im.is_finite() && tau.im.abs() > 1e-12) {
            return Err(Error::InvalidArgument(
                "periods are linearly dependent over R".into(),
            ));
        }
        let r = self.legendre_residual();
        if !(r < LEGENDRE_TOL.max(1e-12 * self.scale())) {
            return Err(Error::InvalidArgument(alloc::format!(
                "Legendre relation fails by {r:e}"
            )));
        }
        Ok(())
    }

    pub fn conj(&self) -> Self {
        PeriodMatrix {
            omega1: self.omega1.conj(),
            omega2: self.omega2.conj(),
            eta1: self.eta1.conj(),
            eta2: self.eta2.conj(),
        }
    }

    pub fn min_period(&self) -> f64 {
        self.omega1.norm().min(self.omega2.norm())
    }

    /// The 2×2 matrix `[[ω₁, ω₂], [−η₁, −η₂]]`, row-major.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [[self.omega1, self.omega2], [-self.eta1, -self.eta2]]
    }

    fn scale(&self) -> f64 {
        (self.eta1 * self.omega2).norm() + (self.eta2 * self.omega1).norm()
    }
}

/// Real coordinates `(a, b)` of `z = a·w1 + b·w2`.
pub fn real_coords(z: C64, w1: C64, w2: C64) -> (f64, f64) {
    let det = w1.re * w2.im - w1.im * w2.re;
    let a = (z.re * w2.im - z.im * w2.re) / det;
    let b = (w1.re * z.im - w1.im * z.re) / det;
    (a, b)
}

/// Rounds values within `1e-12` of an integer onto it.
fn snap_integer(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-12 * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Writes `z = z0 + m·ω₁ + n·ω₂` with the real coefficients of `z0` in `[0,1)`.
///
/// Coefficients within `1e-12` of an integer are treated as that integer.
pub fn reduce_mod_lattice(z: C64, pm: &PeriodMatrix) -> (C64, i64, i64) {
    let (a, b) = real_coords(z, pm.omega1, pm.omega2);
    let (a, b) = (snap_integer(a), snap_integer(b));
    let (m, n) = (a.floor(), b.floor());
    let z0 = z - pm.omega1 * m - pm.omega2 * n;
    (z0, m as i64, n as i64)
}

/// `℘`, `℘′`, `ζ` at one point, together with the lattice reduction used.
#[derive(Debug, Clone, Copy)]
pub struct WeierstrassValues {
    pub wp: C64,
    pub wp_prime: C64,
    pub zeta: C64,
    /// `℘′(z)ζ(z0) + 2℘(z)²` at the reduced argument `z0`; analytic at the
    /// lattice (value `g₂/3`), evaluated without cancellation near it.
    pub(crate) h0: C64,
    /// `ζ(z) − ζ(z0)`, a lattice combination of quasi-periods.
    pub(crate) zeta_shift: C64,
    /// Reduced argument, `z` minus the nearest lattice point found.
    pub(crate) z0: C64,
}

/// Evaluator for the Weierstrass functions of one lattice.
///
/// Internally keeps a reduced, oriented basis of the lattice, independent of
/// the basis the caller's [`PeriodMatrix`] uses.
#[derive(Debug, Clone)]
pub struct Weierstrass {
    inv: CurveInvariants,
    pm: PeriodMatrix,
    w1: C64,
    w2: C64,
    e1: C64,
    e2: C64,
    tau: C64,
    laurent: [C64; LAURENT_TERMS + 2],
}

impl Weierstrass {
    pub fn new(inv: CurveInvariants, pm: PeriodMatrix) -> Self {
        let (mut w1, mut w2, mut e1, mut e2) = (pm.omega1, pm.omega2, pm.eta1, pm.eta2);
        if (w2 / w1).im < 0.0 {
            core::mem::swap(&mut w1, &mut w2);
            core::mem::swap(&mut e1, &mut e2);
        }
        for _ in 0..200 {
            let tau = w2 / w1;
            let n = tau.re.round();
            w2 -= w1 * n;
            e2 -= e1 * n;
            if w2.norm() < w1.norm() * (1.0 - 1e-15) {
                let (nw1, nw2) = (w2, -w1);
                let (ne1, ne2) = (e2, -e1);
                w1 = nw1;
                w2 = nw2;
                e1 = ne1;
                e2 = ne2;
            } else {
                break;
            }
        }
        Weierstrass {
            inv,
            pm,
            w1,
            w2,
            e1,
            e2,
            tau: w2 / w1,
            laurent: series::laurent_coefficients(inv.g2, inv.g3),
        }
    }

    pub fn invariants(&self) -> &CurveInvariants {
        &self.inv
    }

    pub fn periods(&self) -> &PeriodMatrix {
        &self.pm
    }

    /// Length of a shortest nonzero lattice vector.
    pub fn shortest_period(&self) -> f64 {
        self.w1.norm()
    }

    /// All three functions at `z`, with no pole guard. At an exact lattice
    /// point the values are infinite.
    pub fn values(&self, z: C64) -> WeierstrassValues {
        let (a, b) = real_coords(z, self.w1, self.w2);
        let (m, n) = (a.round(), b.round());
        let z0 = z - self.w1 * m - self.w2 * n;
        let shift = self.e1 * m + self.e2 * n;
        let [wp, wp_prime, zeta0, h0] = self.values_reduced(z0);
        WeierstrassValues {
            wp,
            wp_prime,
            zeta: zeta0 + shift,
            h0,
            zeta_shift: shift,
            z0,
        }
    }

    /// `(℘, ℘′, ζ, ℘′ζ + 2℘²)` for `z0` in the centred fundamental
    /// parallelogram of the reduced basis.
    fn values_reduced(&self, z0: C64) -> [C64; 4] {
        if z0.norm() < LAURENT_RADIUS * self.w1.norm() {
            return series::laurent_values(z0, &self.laurent);
        }
        let u = z0 / self.w1;
        let v = u * PI;
        let [t0, t1, t2, t3] = series::theta1_derivs(v, self.tau);
        let l1 = t1 / t0;
        let l2 = t2 / t0;
        let l3 = t3 / t0;
        let eta_hat = self.e1 * self.w1;
        let dl = l2 - l1 * l1;
        let ddl = l3 - l2 * l1 * 3.0 + l1 * l1 * l1 * 2.0;
        let w1i = C64::new(1.0, 0.0) / self.w1;
        let zeta = (eta_hat * u + l1 * PI) * w1i;
        let wp = (-eta_hat - dl * (PI * PI)) * w1i * w1i;
        let wp_prime = -ddl * (PI * PI * PI) * w1i * w1i * w1i;
        let h = wp_prime * zeta + wp * wp * 2.0;
        [wp, wp_prime, zeta, h]
    }

    fn guard(&self, z: C64) -> Result<WeierstrassValues> {
        let v = self.values(z);
        let d = v.z0.norm();
        if d < POLE_THRESHOLD * self.pm.min_period() {
            return Err(Error::PoleAtLatticePoint { distance: d });
        }
        Ok(v)
    }

    pub fn eval(&self, z: C64) -> Result<WeierstrassValues> {
        self.guard(z)
    }

    pub fn wp(&self, z: C64) -> Result<C64> {
        Ok(self.guard(z)?.wp)
    }

    pub fn wp_prime(&self, z: C64) -> Result<C64> {
        Ok(self.guard(z)?.wp_prime)
    }

    pub fn zeta(&self, z: C64) -> Result<C64> {
        Ok(self.guard(z)?.zeta)
    }

    /// `℘″ = 6℘² − g₂/2`.
    pub(crate) fn wp_second(&self, wp: C64) -> C64 {
        wp * wp * 6.0 - self.inv.g2 * 0.5
    }
}

/// `℘(z)` for the lattice of `pm`.
pub fn wp(z: C64, pm: &PeriodMatrix, inv: &CurveInvariants) -> Result<C64> {
    Weierstrass::new(*inv, *pm).wp(z)
}

/// `℘′(z)` for the lattice of `pm`.
pub fn wp_prime(z: C64, pm: &PeriodMatrix, inv: &CurveInvariants) -> Result<C64> {
    Weierstrass::new(*inv, *pm).wp_prime(z)
}

/// `ζ(z)` for the lattice of `pm`.
pub fn zeta(z: C64, pm: &PeriodMatrix, inv: &CurveInvariants) -> Result<C64> {
    Weierstrass::new(*inv, *pm).zeta(z)
}

/// Invariants `(g₂(Λ), g₃(Λ))` of the lattice spanned by `ω₁, ω₂`, from the
/// Eisenstein q-series.
pub fn lattice_invariants(omega1: C64, omega2: C64) -> (C64, C64) {
    let (w1, tau) = periods::reduce_basis(omega1, omega2);
    let e = series::eisenstein(tau);
    let w2 = w1 * w1;
    let w4 = w2 * w2;
    (
        e.e4 * series::G2_NORM / w4,
        e.e6 * series::G3_NORM / (w4 * w2),
    )
}

/// Klein's `j(τ)` from q-series, for `Im τ > 0`.
pub fn j_of_tau(tau: C64) -> C64 {
    let (_, t) = periods::reduce_basis(C64::new(1.0, 0.0), tau);
    series::j_of_tau(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> (CurveInvariants, PeriodMatrix) {
        let inv = CurveInvariants::real(4.0, 0.0).unwrap();
        let pm = compute_periods(&inv, DEFAULT_PRECISION).unwrap();
        (inv, pm)
    }

    #[test]
    fn degenerate_curve_rejected() {
        assert!(matches!(
            CurveInvariants::real(3.0, 1.0),
            Err(Error::DegenerateCurve { .. })
        ));
        assert!(CurveInvariants::real(0.0, 0.0).is_err());
    }

    #[test]
    fn reduce_mod_lattice_examples() {
        let (_, pm) = square();
        let (z0, m, n) = reduce_mod_lattice(C64::new(0.0, 0.0), &pm);
        assert_eq!((m, n), (0, 0));
        assert!(z0.norm() == 0.0);

        let (z0, m, n) = reduce_mod_lattice(pm.omega1 + pm.omega2, &pm);
        assert_eq!((m, n), (1, 1));
        assert!(z0.norm() < 1e-14);

        let z = pm.omega1 * 0.5 + pm.omega2 * 2.25;
        let (z0, m, n) = reduce_mod_lattice(z, &pm);
        assert_eq!((m, n), (0, 2));
        assert!((z0 - (pm.omega1 * 0.5 + pm.omega2 * 0.25)).norm() < 1e-14);
    }

    #[test]
    fn pole_is_reported() {
        let (inv, pm) = square();
        let err = wp(pm.omega1 * 3.0, &pm, &inv).unwrap_err();
        assert!(matches!(err, Error::PoleAtLatticePoint { .. }));
        assert!(zeta(C64::new(0.0, 0.0), &pm, &inv).is_err());
        assert!(wp_prime(pm.omega2 * 1e-9, &pm, &inv).is_err());
    }

    #[test]
    fn half_period_values() {
        let (inv, pm) = square();
        let w = Weierstrass::new(inv, pm);
        let half = pm.omega1 * 0.5;
        // Largest real root of 4x³ − 4x is 1.
        assert!((w.wp(half).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(w.wp_prime(half).unwrap().norm() < 1e-11);
        assert!((w.zeta(half).unwrap() - pm.eta1 * 0.5).norm() < 1e-12);
    }

    #[test]
    fn laurent_and_theta_branches_agree() {
        let inv = CurveInvariants::new(C64::new(2.0, 1.0), C64::new(-1.0, 0.5)).unwrap();
        let pm = compute_periods(&inv, DEFAULT_PRECISION).unwrap();
        let w = Weierstrass::new(inv, pm);
        let r = LAURENT_RADIUS * w.shortest_period();
        let dir = C64::from_polar(1.0, 0.7);
        let inside = w.values_reduced(dir * (r * 0.999));
        let outside = w.values_reduced(dir * (r * 1.001));
        let lo = series::laurent_values(dir * (r * 1.001), &w.laurent);
        for k in 0..4 {
            assert!(
                (outside[k] - lo[k]).norm() < 1e-11 * (1.0 + lo[k].norm()),
                "k={k}"
            );
            assert!(inside[k].is_finite());
        }
    }
}
