//! Best rational approximation by continued fractions.

#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

/// The closest fraction `n/d` to `x` with `1 ≤ d ≤ max_den`, among the
/// convergents and semiconvergents of the continued fraction of `x`.
pub fn best_rational(x: f64, max_den: u64) -> (i64, u64) {
    let max_den = max_den.max(1);
    let floor = x.floor();
    let mut frac = x - floor;
    let base = floor as i64;
    // Convergents h/k of the fractional part.
    let (mut h0, mut k0, mut h1, mut k1) = (1i128, 0i128, 0i128, 1i128);
    let mut best = (0i128, 1i128);
    let mut best_err = frac.abs();
    if (1.0 - frac) < best_err {
        best = (1, 1);
        best_err = 1.0 - frac;
    }
    for _ in 0..64 {
        if frac == 0.0 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            // Largest semiconvergent within the bound.
            let t = (max_den as i128 - k0) / k1.max(1);
            if t > 0 {
                let (hs, ks) = (t * h1 + h0, t * k1 + k0);
                consider(x - floor, hs, ks, &mut best, &mut best_err);
            }
            break;
        }
        consider(x - floor, h2, k2, &mut best, &mut best_err);
        h0 = h1;
        k0 = k1;
        h1 = h2;
        k1 = k2;
        if frac < 1e-300 {
            break;
        }
    }
    (base * best.1 as i64 + best.0 as i64, best.1 as u64)
}

fn consider(x: f64, h: i128, k: i128, best: &mut (i128, i128), err: &mut f64) {
    let e = (x - h as f64 / k as f64).abs();
    if e < *err {
        *err = e;
        *best = (h, k);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_fractions() {
        assert_eq!(best_rational(1.0 / 3.0, 100), (1, 3));
        assert_eq!(best_rational(0.5, 100), (1, 2));
        assert_eq!(best_rational(0.0, 100), (0, 1));
        assert_eq!(best_rational(-0.75, 100), (-3, 4));
        assert_eq!(best_rational(2.0 - 1e-13, 100), (2, 1));
        assert_eq!(best_rational(core::f64::consts::PI, 1000), (355, 113));
        assert_eq!(best_rational(core::f64::consts::PI, 100), (311, 99));
    }
}
