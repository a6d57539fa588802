//! The universal vectorial extension `G ⊂ ℙ⁴` of an elliptic curve and
//! products `𝒢 = G₁ × … × G_g`.
//!
//! `G` is cut out by
//!
//! ```text
//! X0·X2² = 4X1³ − g2·X0²·X1 − g3·X0³,    X0·X4 − X2·X3 = 2·X1²
//! ```
//!
//! with exponential `(z, w) ↦ (1, ℘, ℘′, ζ + w, ℘′·(ζ + w) + 2℘²)`, whose
//! kernel is spanned by the columns `(ωᵢ, −ηᵢ)` of the period matrix. The
//! maximal compact subgroup is the image of the real span of those columns,
//! parametrised by Betti coordinates `(p, q) ∈ [0,1)²` per factor.
//!
//! Points over the identity fibre (`z` a lattice point) are stored as
//! [`FactorPoint::Fiber`], projectively `[0 : 0 : 1 : 0 : v]`.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

use crate::elliptic::{
    compute_periods, real_coords, reduce_mod_lattice, CurveInvariants, PeriodMatrix, Weierstrass,
    DEFAULT_PRECISION,
};
use crate::{Error, Result, C64};

/// Default relative tolerance on the two model equations.
pub const MODEL_TOL: f64 = 1e-9;
/// Default tolerance on the Betti residual for compact membership.
pub const COMPACT_TOL: f64 = 1e-8;
/// Reduced arguments closer than this (relative to the shortest period) to a
/// lattice point are mapped onto the identity fibre.
pub const FIBER_SNAP: f64 = 1e-12;

const LOG_GRID: usize = 12;
const LOG_SEEDS: usize = 4;
const LOG_ITERATIONS: usize = 80;

/// One factor of a point of `𝒢`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorPoint {
    /// `[0 : 0 : 1 : 0 : v]`, over the identity of the elliptic curve.
    Fiber(C64),
    /// `[1 : x1 : x2 : x3 : x4]`.
    Affine([C64; 4]),
}

impl FactorPoint {
    /// Representative homogeneous coordinates.
    pub fn coords(&self) -> [C64; 5] {
        let zero = C64::new(0.0, 0.0);
        match *self {
            FactorPoint::Fiber(v) => [zero, zero, C64::new(1.0, 0.0), zero, v],
            FactorPoint::Affine([a, b, c, d]) => [C64::new(1.0, 0.0), a, b, c, d],
        }
    }

    /// Normalises homogeneous coordinates. Only points with `X0 ≠ 0` or of the
    /// form `[0 : 0 : X2 : 0 : X4]` lie on the model; the model equations are
    /// not checked otherwise.
    pub fn from_homogeneous(x: [C64; 5]) -> Result<Self> {
        let scale = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(
                "coordinates must be finite and not all zero".into(),
            ));
        }
        let eps = 1e-15 * scale;
        if x[0].norm() > eps {
            return Ok(FactorPoint::Affine([
                x[1] / x[0],
                x[2] / x[0],
                x[3] / x[0],
                x[4] / x[0],
            ]));
        }
        let off = x[1].norm().max(x[3].norm()) / scale;
        if x[2].norm() <= eps || off > 1e-12 {
            return Err(Error::NotOnModel {
                residual: off.max(x[0].norm() / scale),
            });
        }
        Ok(FactorPoint::Fiber(x[4] / x[2]))
    }

    pub fn conj(&self) -> Self {
        match *self {
            FactorPoint::Fiber(v) => FactorPoint::Fiber(v.conj()),
            FactorPoint::Affine(x) => FactorPoint::Affine(x.map(|c| c.conj())),
        }
    }
}

/// A point of `𝒢` in model coordinates, one entry per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct UEPoint {
    pub factors: Vec<FactorPoint>,
}

impl UEPoint {
    pub fn identity(g: usize) -> Self {
        UEPoint {
            factors: alloc::vec![FactorPoint::Fiber(C64::new(0.0, 0.0)); g],
        }
    }

    /// Complex conjugate coordinates; a point of the conjugate configuration.
    pub fn conj(&self) -> Self {
        UEPoint {
            factors: self.factors.iter().map(FactorPoint::conj).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Distance between projective points: per factor, both representatives
    /// are scaled to unit length and phase-aligned, and the largest
    /// difference norm over the factors is returned.
    pub fn distance(&self, other: &UEPoint) -> f64 {
        self.factors
            .iter()
            .zip(&other.factors)
            .map(|(a, b)| projective_distance(&a.coords(), &b.coords()))
            .fold(0.0, f64::max)
    }
}

pub(crate) fn projective_distance(a: &[C64; 5], b: &[C64; 5]) -> f64 {
    let na = a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nb = b.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let inner: C64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / na - phase * y / nb).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Tangent-space coordinates `(z, w)` per factor.
#[derive(Debug, Clone, PartialEq)]
pub struct LogPoint {
    pub factors: Vec<(C64, C64)>,
}

/// Betti coordinates `(p, q)` per factor, stored in `[0,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiPoint {
    factors: Vec<(f64, f64)>,
}

/// Reduces a real number into `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Signed distance of `x` to the nearest integer, in `[−½, ½]`.
pub fn centred(x: f64) -> f64 {
    x - x.round()
}

impl BettiPoint {
    pub fn new(factors: Vec<(f64, f64)>) -> Self {
        BettiPoint {
            factors: factors
                .into_iter()
                .map(|(p, q)| (frac(p), frac(q)))
                .collect(),
        }
    }

    /// From a flat slice `(p₁, q₁, p₂, q₂, …)`.
    pub fn from_flat(x: &[f64]) -> Self {
        BettiPoint::new(x.chunks(2).map(|c| (c[0], c[1])).collect())
    }

    pub fn flat(&self) -> Vec<f64> {
        self.factors.iter().flat_map(|&(p, q)| [p, q]).collect()
    }

    pub fn factors(&self) -> &[(f64, f64)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest coordinate distance on the torus `ℝ^{2g}/ℤ^{2g}`.
    pub fn torus_distance(&self, other: &BettiPoint) -> f64 {
        torus_distance(&self.flat(), &other.flat())
    }
}

/// Max-norm distance on `ℝⁿ/ℤⁿ`.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| centred(x - y).abs())
        .fold(0.0, f64::max)
}

/// Relative residual of the two model equations at homogeneous coordinates.
///
/// Each equation is divided by the sum of the magnitudes of its terms, after
/// scaling the coordinates to unit max-norm.
pub fn model_residual(inv: &CurveInvariants, x: &[C64; 5]) -> f64 {
    let s = x.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if s == 0.0 || !s.is_finite() {
        return f64::INFINITY;
    }
    let y = x.map(|c| c / s);
    let [y0, y1, y2, y3, y4] = y;
    let t = [
        y0 * y2 * y2,
        y1 * y1 * y1 * 4.0,
        inv.g2 * y0 * y0 * y1,
        inv.g3 * y0 * y0 * y0,
    ];
    let cubic = t[0] - t[1] + t[2] + t[3];
    let cubic_scale: f64 = t.iter().map(|c| c.norm()).sum();
    let u = [y0 * y4, y2 * y3, y1 * y1 * 2.0];
    let quad = u[0] - u[1] - u[2];
    let quad_scale: f64 = u.iter().map(|c| c.norm()).sum();
    let rel = |e: C64, s: f64| if s > 0.0 { e.norm() / s } else { e.norm() };
    rel(cubic, cubic_scale).max(rel(quad, quad_scale))
}

/// Which coordinate is normalised to 1 in a smooth local representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    X0,
    X2,
}

/// Curve data of one factor.
#[derive(Debug, Clone)]
pub struct Factor {
    weierstrass: Weierstrass,
}

impl Factor {
    pub fn new(inv: CurveInvariants, pm: PeriodMatrix) -> Result<Self> {
        inv.check_nondegenerate()?;
        pm.validate()?;
        Ok(Factor {
            weierstrass: Weierstrass::new(inv, pm),
        })
    }

    pub fn invariants(&self) -> &CurveInvariants {
        self.weierstrass.invariants()
    }

    pub fn periods(&self) -> &PeriodMatrix {
        self.weierstrass.periods()
    }

    pub fn weierstrass(&self) -> &Weierstrass {
        &self.weierstrass
    }

    /// Tangent vector of Betti parameters `(p, q)` and residual `r`, with
    /// `(p, q)` moved to the nearest integers first.
    fn tangent(&self, p: f64, q: f64, r: C64) -> (C64, C64) {
        let pm = self.periods();
        let (p0, q0) = (centred(p), centred(q));
        (
            pm.omega1 * p0 + pm.omega2 * q0,
            r - pm.eta1 * p0 - pm.eta2 * q0,
        )
    }

    pub fn exp(&self, z: C64, w: C64) -> FactorPoint {
        let v = self.weierstrass.values(z);
        if v.z0.norm() <= FIBER_SNAP * self.weierstrass.shortest_period() {
            return FactorPoint::Fiber(v.zeta_shift + w);
        }
        let x3 = v.zeta + w;
        let x4 = v.h0 + v.wp_prime * (v.zeta_shift + w);
        FactorPoint::Affine([v.wp, v.wp_prime, x3, x4])
    }

    /// Point with Betti coordinates `(p, q)` and Betti residual `r`.
    pub fn exp_betti(&self, p: f64, q: f64, r: C64) -> FactorPoint {
        let (z, w) = self.tangent(p, q, r);
        self.exp(z, w)
    }

    /// Chart a smooth representative near `(p, q, r)` would use.
    pub fn preferred_chart(&self, p: f64, q: f64) -> Chart {
        let (z, _) = self.tangent(p, q, C64::new(0.0, 0.0));
        let v = self.weierstrass.values(z);
        if v.z0.norm() < 0.25 * self.weierstrass.shortest_period() {
            Chart::X2
        } else {
            Chart::X0
        }
    }

    /// Homogeneous coordinates of the point `(p, q, r)`, normalised in the
    /// given chart. Smooth in `(p, q)` wherever the chart coordinate does
    /// not vanish; the `X2` chart is regular across the identity fibre.
    pub fn projective(&self, p: f64, q: f64, r: C64, chart: Chart) -> [C64; 5] {
        let (z, w) = self.tangent(p, q, r);
        let v = self.weierstrass.values(z);
        let one = C64::new(1.0, 0.0);
        let s = v.zeta_shift + w;
        match chart {
            Chart::X0 => [one, v.wp, v.wp_prime, v.zeta + w, v.h0 + v.wp_prime * s],
            Chart::X2 => {
                let z0 = v.z0;
                if z0.norm() <= FIBER_SNAP * self.weierstrass.shortest_period() {
                    let z2 = z0 * z0;
                    let g2 = self.invariants().g2;
                    return [
                        -z2 * z0 * 0.5,
                        -z0 * 0.5,
                        one,
                        -z2 * 0.5 + (-z2 * z0 * 0.5) * s,
                        s - g2 * z2 * z0 / 6.0,
                    ];
                }
                let inv_d = one / v.wp_prime;
                [
                    inv_d,
                    v.wp * inv_d,
                    one,
                    (v.zeta + w) * inv_d,
                    s + v.h0 * inv_d,
                ]
            }
        }
    }

    /// `(z, w)` with `exp(z, w) = pt`, `z` reduced to the fundamental
    /// parallelogram of the period basis.
    pub fn log(&self, pt: &FactorPoint, model_tol: f64) -> Result<(C64, C64)> {
        let [x0, x1, x2, x3, x4] = pt.coords();
        let res = model_residual(self.invariants(), &[x0, x1, x2, x3, x4]);
        if !(res <= model_tol) {
            return Err(Error::NotOnModel { residual: res });
        }
        if let FactorPoint::Fiber(v) = *pt {
            return Ok((C64::new(0.0, 0.0), v));
        }
        let z = self.invert_wp(x1, x2)?;
        let v = self.weierstrass.values(z);
        let w = if v.z0.norm() < 0.25 * self.weierstrass.shortest_period() {
            (x4 - v.h0) / v.wp_prime - v.zeta_shift
        } else {
            x3 - v.zeta
        };
        let pm = self.periods();
        let (z0, m, n) = reduce_mod_lattice(z, pm);
        Ok((z0, w + pm.eta1 * m as f64 + pm.eta2 * n as f64))
    }

    /// Solves `℘(z) = x1`, `℘′(z) = x2` by Gauss–Newton on both equations,
    /// seeded from a grid over the fundamental parallelogram.
    fn invert_wp(&self, x1: C64, x2: C64) -> Result<C64> {
        let wf = &self.weierstrass;
        let unit = wf.shortest_period();
        let a1 = 1.0 / (unit.powi(-2) + x1.norm());
        let a2 = 1.0 / (unit.powi(-3) + x1.norm().powf(1.5));
        let residual = |z: C64| -> (f64, C64, C64, C64, C64) {
            let v = wf.values(z);
            let r1 = (v.wp - x1) * a1;
            let r2 = (v.wp_prime - x2) * a2;
            let j1 = v.wp_prime * a1;
            let j2 = wf.wp_second(v.wp) * a2;
            ((r1.norm_sqr() + r2.norm_sqr()).sqrt(), j1, j2, r1, r2)
        };
        let pm = wf.periods();
        let (w1, w2) = (pm.omega1, pm.omega2);
        let mut seeds: Vec<(f64, C64)> = Vec::with_capacity(LOG_GRID * LOG_GRID + 1);
        for i in 0..LOG_GRID {
            for j in 0..LOG_GRID {
                let a = (i as f64 + 0.5) / LOG_GRID as f64 - 0.5;
                let b = (j as f64 + 0.5) / LOG_GRID as f64 - 0.5;
                let z = w1 * a + w2 * b;
                let r = residual(z).0;
                if r.is_finite() {
                    seeds.push((r, z));
                }
            }
        }
        if x2.norm() > 0.0 {
            let z = -x1 * 2.0 / x2;
            if z.norm() < unit && z.norm() > 0.0 {
                seeds.push((residual(z).0, z));
            }
        }
        seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best: Option<(f64, C64)> = None;
        for &(_, z0) in seeds.iter().take(LOG_SEEDS) {
            let (r, z) = gauss_newton_1d(&residual, z0, unit);
            if best.is_none_or(|(br, _)| r < br) {
                best = Some((r, z));
            }
            if r < 1e-13 {
                break;
            }
        }
        match best {
            Some((r, z)) if r < 1e-6 => Ok(z),
            Some((r, _)) => Err(Error::NoConvergence {
                context: "inverting the Weierstrass function",
                residual: r,
            }),
            None => Err(Error::NoConvergence {
                context: "inverting the Weierstrass function",
                residual: f64::INFINITY,
            }),
        }
    }
}

/// Damped complex Gauss–Newton for two holomorphic residuals of one
/// variable. `f` returns `(norm, J1, J2, r1, r2)`.
fn gauss_newton_1d<F>(f: &F, mut z: C64, unit: f64) -> (f64, C64)
where
    F: Fn(C64) -> (f64, C64, C64, C64, C64),
{
    let (mut norm, mut j1, mut j2, mut r1, mut r2) = f(z);
    for _ in 0..LOG_ITERATIONS {
        if norm < 1e-16 {
            break;
        }
        let den = j1.norm_sqr() + j2.norm_sqr();
        if !(den > 0.0) {
            break;
        }
        let mut step = -(j1.conj() * r1 + j2.conj() * r2) / den;
        if step.norm() > 0.25 * unit {
            step *= 0.25 * unit / step.norm();
        }
        let mut accepted = false;
        for _ in 0..30 {
            let cand = z + step;
            let e = f(cand);
            if e.0 < norm {
                z = cand;
                (norm, j1, j2, r1, r2) = e;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted || step.norm() < 1e-17 * unit {
            break;
        }
    }
    (norm, z)
}

/// A product `𝒢 = G₁ × … × G_g` with its tolerances.
#[derive(Debug, Clone)]
pub struct ExtensionConfig {
    factors: Vec<Factor>,
    model_tol: f64,
    compact_tol: f64,
}

impl ExtensionConfig {
    pub fn new(factors: Vec<(CurveInvariants, PeriodMatrix)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one factor is required".into(),
            ));
        }
        let factors = factors
            .into_iter()
            .map(|(inv, pm)| Factor::new(inv, pm))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtensionConfig {
            factors,
            model_tol: MODEL_TOL,
            compact_tol: COMPACT_TOL,
        })
    }

    /// Computes the period matrices of the given curves.
    pub fn from_curves(curves: &[CurveInvariants]) -> Result<Self> {
        let factors = curves
            .iter()
            .map(|inv| Ok((*inv, compute_periods(inv, DEFAULT_PRECISION)?)))
            .collect::<Result<Vec<_>>>()?;
        ExtensionConfig::new(factors)
    }

    pub fn with_tolerances(mut self, model_tol: f64, compact_tol: f64) -> Self {
        self.model_tol = model_tol;
        self.compact_tol = compact_tol;
        self
    }

    pub fn model_tol(&self) -> f64 {
        self.model_tol
    }

    pub fn compact_tol(&self) -> f64 {
        self.compact_tol
    }

    /// Number of factors `g`.
    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, k: usize) -> &Factor {
        &self.factors[k]
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.factors.len() {
            return Err(Error::InvalidArgument(alloc::format!(
                "point has {n} factors, configuration has {}",
                self.factors.len()
            )));
        }
        Ok(())
    }

    pub fn identity(&self) -> UEPoint {
        UEPoint::identity(self.factors.len())
    }

    pub fn exp(&self, x: &LogPoint) -> Result<UEPoint> {
        self.check_len(x.factors.len())?;
        Ok(UEPoint {
            factors: self
                .factors
                .iter()
                .zip(&x.factors)
                .map(|(f, &(z, w))| f.exp(z, w))
                .collect(),
        })
    }

    pub fn log(&self, pt: &UEPoint) -> Result<LogPoint> {
        self.check_len(pt.len())?;
        Ok(LogPoint {
            factors: self
                .factors
                .iter()
                .zip(&pt.factors)
                .map(|(f, p)| f.log(p, self.model_tol))
                .collect::<Result<_>>()?,
        })
    }

    /// Largest relative model residual over the factors.
    pub fn model_residual(&self, pt: &UEPoint) -> Result<f64> {
        self.check_len(pt.len())?;
        Ok(self
            .factors
            .iter()
            .zip(&pt.factors)
            .map(|(f, p)| model_residual(f.invariants(), &p.coords()))
            .fold(0.0, f64::max))
    }

    pub fn betti_to_point(&self, b: &BettiPoint) -> Result<UEPoint> {
        self.check_len(b.len())?;
        Ok(self.exp_betti(b.factors(), None))
    }

    /// Point with the given Betti coordinates and per-factor residuals
    /// (zero when `residuals` is `None`).
    pub fn exp_betti(&self, pq: &[(f64, f64)], residuals: Option<&[C64]>) -> UEPoint {
        UEPoint {
            factors: self
                .factors
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let r = residuals.map_or(C64::new(0.0, 0.0), |r| r[k]);
                    f.exp_betti(pq[k].0, pq[k].1, r)
                })
                .collect(),
        }
    }

    /// Betti coordinates of a point together with `r = w + p·η₁ + q·η₂`
    /// per factor; `r` vanishes exactly on the compact subgroup.
    pub fn betti_residual(&self, pt: &UEPoint) -> Result<(BettiPoint, Vec<C64>)> {
        let log = self.log(pt)?;
        let mut pq = Vec::with_capacity(log.factors.len());
        let mut res = Vec::with_capacity(log.factors.len());
        for (f, &(z, w)) in self.factors.iter().zip(&log.factors) {
            let pm = f.periods();
            let (p, q) = real_coords(z, pm.omega1, pm.omega2);
            pq.push((p, q));
            res.push(w + pm.eta1 * p + pm.eta2 * q);
        }
        Ok((BettiPoint::new(pq), res))
    }

    pub fn is_in_compact(&self, pt: &UEPoint, tol: f64) -> Result<bool> {
        let (_, r) = self.betti_residual(pt)?;
        Ok(r.iter().all(|c| c.norm() < tol))
    }

    pub fn add(&self, a: &UEPoint, b: &UEPoint) -> Result<UEPoint> {
        let (ba, ra) = self.betti_residual(a)?;
        let (bb, rb) = self.betti_residual(b)?;
        let pq: Vec<_> = ba
            .factors()
            .iter()
            .zip(bb.factors())
            .map(|(x, y)| (x.0 + y.0, x.1 + y.1))
            .collect();
        let r: Vec<_> = ra.iter().zip(&rb).map(|(x, y)| x + y).collect();
        Ok(self.exp_betti(&pq, Some(&r)))
    }

    pub fn scalar_mul(&self, n: i64, a: &UEPoint) -> Result<UEPoint> {
        let (b, r) = self.betti_residual(a)?;
        let nf = n as f64;
        let pq: Vec<_> = b
            .factors()
            .iter()
            .map(|&(p, q)| (frac(p * nf), frac(q * nf)))
            .collect();
        let r: Vec<_> = r.iter().map(|x| x * nf).collect();
        Ok(self.exp_betti(&pq, Some(&r)))
    }

    pub fn neg(&self, a: &UEPoint) -> Result<UEPoint> {
        self.scalar_mul(-1, a)
    }

    /// Configuration of the conjugate group: invariants and period
    /// matrices conjugated entrywise.
    pub fn conjugate(&self) -> Self {
        ExtensionConfig {
            factors: self
                .factors
                .iter()
                .map(|f| Factor {
                    weierstrass: Weierstrass::new(f.invariants().conj(), f.periods().conj()),
                })
                .collect(),
            model_tol: self.model_tol,
            compact_tol: self.compact_tol,
        }
    }
}
