//! Rational linear structure of point sets on the Betti torus.

use alloc::vec::Vec;

use num_integer::Integer;

use crate::extension::{centred, frac, BettiPoint};
use crate::ratapprox::best_rational;

/// `a·x ≡ offset (mod 1)` for an integer vector `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub coeffs: Vec<i64>,
    pub offset: f64,
}

/// Common value of `a·x mod 1` over the points, if every point is within
/// `tol` of it on the circle.
fn common_offset(a: &[i64], points: &[Vec<f64>], tol: f64) -> Option<f64> {
    let dot = |x: &[f64]| a.iter().zip(x).map(|(&c, &v)| c as f64 * v).sum::<f64>();
    let base = dot(&points[0]);
    let devs: Vec<f64> = points.iter().map(|x| centred(dot(x) - base)).collect();
    let mean = devs.iter().sum::<f64>() / devs.len() as f64;
    if devs.iter().any(|d| (d - mean).abs() >= tol) {
        return None;
    }
    let c = frac(base + mean);
    Some(if centred(c).abs() < 1e-12 { 0.0 } else { c })
}

/// Integer vectors in `[−h, h]ⁿ` with gcd 1 and first nonzero entry
/// positive.
fn primitive_vectors(n: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = alloc::vec![-h; n];
    loop {
        let first = v.iter().find(|&&c| c != 0);
        if let Some(&f) = first {
            let g = v.iter().fold(0i64, |g, &c| g.gcd(&c));
            if f > 0 && g == 1 {
                out.push(v.clone());
            }
        }
        let mut t = 0;
        loop {
            if t == n {
                return out;
            }
            if v[t] < h {
                v[t] += 1;
                break;
            }
            v[t] = -h;
            t += 1;
        }
    }
}

/// Hermite normal form rows spanning the same integer lattice.
pub fn hermite_basis(rows: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&c| c as i128).collect())
        .collect();
    let mut rank = 0;
    for col in 0..n {
        loop {
            let piv = (rank..m.len())
                .filter(|&i| m[i][col] != 0)
                .min_by_key(|&i| m[i][col].abs());
            let Some(piv) = piv else { break };
            m.swap(rank, piv);
            let mut done = true;
            for j in rank + 1..m.len() {
                if m[j][col] != 0 {
                    let q = m[j][col] / m[rank][col];
                    for k in 0..n {
                        m[j][k] -= q * m[rank][k];
                    }
                    if m[j][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if rank < m.len() && m[rank][col] != 0 {
            if m[rank][col] < 0 {
                for k in 0..n {
                    m[rank][k] = -m[rank][k];
                }
            }
            for i in 0..rank {
                let q = Integer::div_floor(&m[i][col], &m[rank][col]);
                if q != 0 {
                    for k in 0..n {
                        m[i][k] -= q * m[rank][k];
                    }
                }
            }
            rank += 1;
        }
    }
    m.truncate(rank);
    m.into_iter()
        .map(|r| r.into_iter().map(|c| c as i64).collect())
        .collect()
}

/// All primitive `a` with `‖a‖∞ ≤ height` such that `a·x mod 1` is constant
/// within `tol` across the points, reduced to a basis of the lattice they
/// span. Fewer than two points give no relations.
pub fn detect_subtorus(points: &[BettiPoint], height: i64, tol: f64) -> Vec<Relation> {
    let flat: Vec<Vec<f64>> = points.iter().map(BettiPoint::flat).collect();
    subtorus_relations(&flat, height, tol)
}

/// [`detect_subtorus`] on flat coordinate vectors.
pub fn subtorus_relations(points: &[Vec<f64>], height: i64, tol: f64) -> Vec<Relation> {
    if points.len() < 2 || height < 1 {
        return Vec::new();
    }
    let n = points[0].len();
    let found: Vec<Vec<i64>> = primitive_vectors(n, height)
        .into_iter()
        .filter(|a| common_offset(a, points, tol).is_some())
        .collect();
    hermite_basis(&found)
        .into_iter()
        .filter_map(|a| {
            // A lattice combination may accumulate more error than its
            // generators; the offset is re-estimated with a loose bound.
            let scale = a.iter().map(|c| c.unsigned_abs()).sum::<u64>().max(1) as f64;
            let offset = common_offset(&a, points, tol * scale)?;
            Some(Relation { coeffs: a, offset })
        })
        .collect()
}

/// Order of `b` in `ℝ^{2g}/ℤ^{2g}` when every coordinate is within `tol` of
/// a fraction with denominator at most `max_den`.
pub fn detect_torsion(b: &BettiPoint, max_den: u64, tol: f64) -> Option<u64> {
    torsion_order(&b.flat(), max_den, tol)
}

/// [`detect_torsion`] on flat coordinates.
pub fn torsion_order(x: &[f64], max_den: u64, tol: f64) -> Option<u64> {
    let mut order = 1u64;
    for &v in x {
        let (num, den) = best_rational(v, max_den);
        if (v - num as f64 / den as f64).abs() > tol {
            return None;
        }
        order = order.lcm(&den);
    }
    let n = order as f64;
    x.iter()
        .all(|&v| centred(v * n).abs() <= n * tol)
        .then_some(order)
}
