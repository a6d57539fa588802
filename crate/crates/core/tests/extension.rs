use maxcompact_core::elliptic::{compute_periods, CurveInvariants, DEFAULT_PRECISION};
use maxcompact_core::extension::{
    model_residual, BettiPoint, ExtensionConfig, FactorPoint, LogPoint, UEPoint,
};
use maxcompact_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_curve(rng: &mut ChaCha8Rng) -> CurveInvariants {
    loop {
        let g2 = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let g3 = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if let Ok(inv) = CurveInvariants::new(g2, g3) {
            if inv.discriminant().norm() > 1e-3 * (g2.norm().powi(3) + 27.0 * g3.norm_sqr()) {
                return inv;
            }
        }
    }
}

fn random_config(rng: &mut ChaCha8Rng, g: usize) -> ExtensionConfig {
    let curves: Vec<_> = (0..g).map(|_| random_curve(rng)).collect();
    ExtensionConfig::from_curves(&curves).unwrap()
}

fn random_log(rng: &mut ChaCha8Rng, cfg: &ExtensionConfig) -> LogPoint {
    LogPoint {
        factors: cfg
            .factors()
            .iter()
            .map(|f| {
                let pm = f.periods();
                let z = pm.omega1 * rng.gen_range(-2.0..2.0) + pm.omega2 * rng.gen_range(-2.0..2.0);
                (z, c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
            })
            .collect(),
    }
}

fn shift_by_kernel(cfg: &ExtensionConfig, x: &LogPoint, m: &[(i64, i64)]) -> LogPoint {
    LogPoint {
        factors: cfg
            .factors()
            .iter()
            .zip(&x.factors)
            .zip(m)
            .map(|((f, &(z, w)), &(a, b))| {
                let pm = f.periods();
                let (a, b) = (a as f64, b as f64);
                (
                    z + pm.omega1 * a + pm.omega2 * b,
                    w - pm.eta1 * a - pm.eta2 * b,
                )
            })
            .collect(),
    }
}

#[test]
fn exponential_lands_on_the_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cfg = random_config(&mut rng, 1);
    let mut worst = 0.0_f64;
    for i in 0..1000 {
        let cfg = if i % 50 == 0 {
            random_config(&mut rng, 1)
        } else {
            cfg.clone()
        };
        let x = random_log(&mut rng, &cfg);
        let pt = cfg.exp(&x).unwrap();
        worst = worst.max(cfg.model_residual(&pt).unwrap());
    }
    assert!(worst < 1e-9, "worst model residual {worst}");
}

#[test]
fn kernel_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let cfg = random_config(&mut rng, 2);
        let x = random_log(&mut rng, &cfg);
        let m: Vec<_> = (0..2)
            .map(|_| (rng.gen_range(-5..=5), rng.gen_range(-5..=5)))
            .collect();
        let a = cfg.exp(&x).unwrap();
        let b = cfg.exp(&shift_by_kernel(&cfg, &x, &m)).unwrap();
        assert!(a.distance(&b) < 1e-8, "{}", a.distance(&b));
    }
}

#[test]
fn log_inverts_exp_modulo_the_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let cfg = random_config(&mut rng, 1);
        let x = random_log(&mut rng, &cfg);
        let pt = cfg.exp(&x).unwrap();
        let y = cfg.log(&pt).unwrap();
        let back = cfg.exp(&y).unwrap();
        assert!(pt.distance(&back) < 1e-9);
        let (bx, rx) = betti_of(&cfg, &x);
        let (by, ry) = cfg.betti_residual(&pt).unwrap();
        assert!(bx.torus_distance(&by) < 1e-8);
        assert!((rx[0] - ry[0]).norm() < 1e-8);
        let pm = cfg.factor(0).periods();
        let (a, b) = maxcompact_core::elliptic::real_coords(y.factors[0].0, pm.omega1, pm.omega2);
        assert!((0.0..1.0).contains(&a) && (0.0..1.0).contains(&b));
    }
}

/// Betti coordinates and residual read off a tangent vector directly.
fn betti_of(cfg: &ExtensionConfig, x: &LogPoint) -> (BettiPoint, Vec<C64>) {
    let mut pq = Vec::new();
    let mut r = Vec::new();
    for (f, &(z, w)) in cfg.factors().iter().zip(&x.factors) {
        let pm = f.periods();
        let (p, q) = maxcompact_core::elliptic::real_coords(z, pm.omega1, pm.omega2);
        pq.push((p, q));
        r.push(w + pm.eta1 * p + pm.eta2 * q);
    }
    (BettiPoint::new(pq), r)
}

#[test]
fn compact_points_have_zero_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let cfg = random_config(&mut rng, 2);
        let b = BettiPoint::new((0..2).map(|_| (rng.gen(), rng.gen())).collect());
        let pt = cfg.betti_to_point(&b).unwrap();
        let (b2, r) = cfg.betti_residual(&pt).unwrap();
        assert!(r.iter().all(|x| x.norm() < 1e-9), "{r:?}");
        assert!(b.torus_distance(&b2) < 1e-9);
        assert!(cfg.is_in_compact(&pt, 1e-9).unwrap());
    }
}

#[test]
fn shifting_w_shifts_the_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cfg = random_config(&mut rng, 1);
    let pm = *cfg.factor(0).periods();
    let (p, q) = (0.37, 0.81);
    let z = pm.omega1 * p + pm.omega2 * q;
    let w = -pm.eta1 * p - pm.eta2 * q;
    let pt = cfg
        .exp(&LogPoint {
            factors: vec![(z, w + 1.0)],
        })
        .unwrap();
    let (_, r) = cfg.betti_residual(&pt).unwrap();
    assert!((r[0].norm() - 1.0).abs() < 1e-9);
    assert!(!cfg.is_in_compact(&pt, 1e-8).unwrap());
}

#[test]
fn half_period_is_two_torsion_on_the_real_curve() {
    let inv = CurveInvariants::real(4.0, 0.0).unwrap();
    let cfg = ExtensionConfig::from_curves(&[inv]).unwrap();
    let pt = cfg
        .betti_to_point(&BettiPoint::new(vec![(0.5, 0.0)]))
        .unwrap();
    // Largest root of 4x³ − 4x.
    let FactorPoint::Affine(x) = pt.factors[0] else {
        panic!()
    };
    assert!((x[0] - c(1.0, 0.0)).norm() < 1e-12);
    assert!(x[1].norm() < 1e-10);
}

#[test]
fn fiber_point_is_the_laurent_limit() {
    // Independent truncated Laurent series for ℘, ℘′, ζ at small z.
    let inv = CurveInvariants::new(c(1.3, 0.4), c(-0.6, 0.9)).unwrap();
    let cfg = ExtensionConfig::from_curves(&[inv]).unwrap();
    let v = c(0.7, -0.2);
    let target = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), v];
    let dir = C64::from_polar(1.0, 0.9);
    for k in 2..6 {
        let z = dir * 10f64.powi(-k);
        let wp = z.powi(-2) + inv.g2 * z * z / 20.0;
        let dwp = z.powi(-3) * -2.0 + inv.g2 * z / 10.0;
        let zeta = z.inv() - inv.g2 * z.powi(3) / 60.0;
        let x3 = zeta + v;
        let oracle = [c(1.0, 0.0), wp, dwp, x3, dwp * x3 + wp * wp * 2.0].map(|x| x / dwp);
        let pt = cfg
            .exp(&LogPoint {
                factors: vec![(z, v)],
            })
            .unwrap();
        let got = pt.factors[0]
            .coords()
            .map(|x| x / pt.factors[0].coords()[2]);
        for i in 0..5 {
            assert!((got[i] - oracle[i]).norm() < 1e-10 * (1.0 + oracle[i].norm()));
            assert!((got[i] - target[i]).norm() < 2.0 * 10f64.powi(-k) * (1.0 + v.norm()));
        }
    }
    let pt = cfg
        .exp(&LogPoint {
            factors: vec![(c(0.0, 0.0), v)],
        })
        .unwrap();
    assert_eq!(pt.factors[0], FactorPoint::Fiber(v));
}

#[test]
fn conjugation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let cfg = random_config(&mut rng, 2);
        let bar = cfg.conjugate();
        let x = random_log(&mut rng, &cfg);
        let xbar = LogPoint {
            factors: x
                .factors
                .iter()
                .map(|&(z, w)| (z.conj(), w.conj()))
                .collect(),
        };
        let lhs = cfg.exp(&x).unwrap().conj();
        let rhs = bar.exp(&xbar).unwrap();
        assert!(lhs.distance(&rhs) < 1e-9);
        let b = BettiPoint::new(vec![(rng.gen(), rng.gen()), (rng.gen(), rng.gen())]);
        let pt = cfg.betti_to_point(&b).unwrap();
        let (_, r1) = cfg.betti_residual(&pt).unwrap();
        let (_, r2) = bar.betti_residual(&pt.conj()).unwrap();
        assert!(bar.is_in_compact(&pt.conj(), 1e-9).unwrap());
        for (a, b) in r1.iter().zip(&r2) {
            assert!((a.norm() - b.norm()).abs() < 1e-9);
        }
    }
    let real = ExtensionConfig::from_curves(&[CurveInvariants::real(2.0, -1.0).unwrap()]).unwrap();
    assert_eq!(
        real.conjugate().factor(0).invariants(),
        real.factor(0).invariants()
    );
}

#[test]
fn group_law_through_betti_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let cfg = random_config(&mut rng, 2);
        let a = BettiPoint::new(vec![(rng.gen(), rng.gen()), (rng.gen(), rng.gen())]);
        let b = BettiPoint::new(vec![(rng.gen(), rng.gen()), (rng.gen(), rng.gen())]);
        let sum: Vec<f64> = a.flat().iter().zip(b.flat()).map(|(x, y)| x + y).collect();
        let pa = cfg.betti_to_point(&a).unwrap();
        let pb = cfg.betti_to_point(&b).unwrap();
        let added = cfg.add(&pa, &pb).unwrap();
        let direct = cfg.betti_to_point(&BettiPoint::from_flat(&sum)).unwrap();
        assert!(added.distance(&direct) < 1e-8);
        assert!(cfg.is_in_compact(&added, 1e-8).unwrap());
        assert!(cfg.add(&pa, &cfg.identity()).unwrap().distance(&pa) < 1e-9);
        let neg = cfg.neg(&pa).unwrap();
        assert!(cfg.add(&pa, &neg).unwrap().distance(&cfg.identity()) < 1e-8);
    }
}

#[test]
fn torsion_point_of_order_six() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = random_config(&mut rng, 1);
    let pt = cfg
        .betti_to_point(&BettiPoint::new(vec![(1.0 / 3.0, 0.5)]))
        .unwrap();
    let six = cfg.scalar_mul(6, &pt).unwrap();
    assert!(six.distance(&cfg.identity()) < 1e-8);
    let three = cfg.scalar_mul(3, &pt).unwrap();
    assert!(three.distance(&cfg.identity()) > 1e-2);
}

#[test]
fn explicit_periods_constructor_validates() {
    let inv = CurveInvariants::real(4.0, 0.0).unwrap();
    let mut pm = compute_periods(&inv, DEFAULT_PRECISION).unwrap();
    assert!(ExtensionConfig::new(vec![(inv, pm)]).is_ok());
    pm.eta1 += 0.1;
    assert!(ExtensionConfig::new(vec![(inv, pm)]).is_err());
    assert!(ExtensionConfig::new(vec![]).is_err());
    let _ = model_residual;
    let _ = UEPoint::identity(1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn residual_is_independent_of_lattice_representative(
        p in -3.0f64..3.0, q in -3.0f64..3.0, wr in -2.0f64..2.0, wi in -2.0f64..2.0,
        m in -4i64..4, n in -4i64..4,
    ) {
        let cfg = ExtensionConfig::from_curves(&[CurveInvariants::new(c(1.0, 2.0), c(-0.5, 0.3)).unwrap()]).unwrap();
        let pm = *cfg.factor(0).periods();
        let x = LogPoint { factors: vec![(pm.omega1 * p + pm.omega2 * q, c(wr, wi))] };
        let y = shift_by_kernel(&cfg, &x, &[(m, n)]);
        let (_, r1) = cfg.betti_residual(&cfg.exp(&x).unwrap()).unwrap();
        let (_, r2) = cfg.betti_residual(&cfg.exp(&y).unwrap()).unwrap();
        let (_, r0) = betti_of(&cfg, &x);
        prop_assert!((r1[0] - r2[0]).norm() < 1e-8);
        prop_assert!((r1[0] - r0[0]).norm() < 1e-8);
    }

    #[test]
    fn scalar_multiples_follow_betti_arithmetic(p in 0.0f64..1.0, q in 0.0f64..1.0, n in -7i64..7) {
        let cfg = ExtensionConfig::from_curves(&[CurveInvariants::real(3.0, 0.5).unwrap()]).unwrap();
        let pt = cfg.betti_to_point(&BettiPoint::new(vec![(p, q)])).unwrap();
        let got = cfg.scalar_mul(n, &pt).unwrap();
        let want = cfg.betti_to_point(&BettiPoint::new(vec![(p * n as f64, q * n as f64)])).unwrap();
        prop_assert!(got.distance(&want) < 1e-8);
    }
}
