use num_bigint::BigInt;
use num_rational::BigRational;
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;
use num_traits::ToPrimitive;

use super::RatMatrix;
use crate::elliptic::{real_coords, PeriodMatrix};
use crate::ratapprox::best_rational;
use crate::C64;

/// Tangent action `[[α, 0], [γ, ᾱ]]` and its rational period action `A`
/// with `L·P = P·A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Endomorphism {
    pub gamma: C64,
    pub a: RatMatrix,
    pub residual: f64,
}

/// Tangent action and integer period matrix `B` with `L·P̃ = P·B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isogeny {
    pub gamma: C64,
    pub b: [[i64; 2]; 2],
    pub residual: f64,
}

/// Real coefficients of `α·ω̃_j` in the basis `(ω1, ω2)`, as the columns of
/// a `2 × 2` matrix.
fn period_action(src: &PeriodMatrix, tgt: &PeriodMatrix, alpha: C64) -> [[f64; 2]; 2] {
    let (a11, a21) = real_coords(alpha * src.omega1, tgt.omega1, tgt.omega2);
    let (a12, a22) = real_coords(alpha * src.omega2, tgt.omega1, tgt.omega2);
    [[a11, a12], [a21, a22]]
}

/// Least-squares `γ` from `γ·ω̃_j − ᾱ·η̃_j = −Σᵢ ηᵢ·m_ij` and the relative
/// residual of `L·P̃ − P·M`.
fn fit_gamma(src: &PeriodMatrix, tgt: &PeriodMatrix, alpha: C64, m: &[[f64; 2]; 2]) -> (C64, f64) {
    let ws = [src.omega1, src.omega2];
    let es = [src.eta1, src.eta2];
    let rhs: [C64; 2] =
        core::array::from_fn(|j| alpha.conj() * es[j] - (tgt.eta1 * m[0][j] + tgt.eta2 * m[1][j]));
    let num = ws[0].conj() * rhs[0] + ws[1].conj() * rhs[1];
    let den = ws[0].norm_sqr() + ws[1].norm_sqr();
    let gamma = num / den;
    let scale = [
        src.omega1, src.omega2, src.eta1, src.eta2, tgt.omega1, tgt.omega2, tgt.eta1, tgt.eta2,
    ]
    .iter()
    .map(|c| c.norm())
    .fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        let top = alpha * ws[j] - (tgt.omega1 * m[0][j] + tgt.omega2 * m[1][j]);
        let bottom =
            gamma * ws[j] - alpha.conj() * es[j] + (tgt.eta1 * m[0][j] + tgt.eta2 * m[1][j]);
        worst = worst.max(top.norm()).max(bottom.norm());
    }
    (gamma, worst / scale.max(f64::MIN_POSITIVE))
}

fn to_f64(a: &RatMatrix) -> [[f64; 2]; 2] {
    core::array::from_fn(|i| core::array::from_fn(|j| a.get(i, j).to_f64().unwrap_or(f64::NAN)))
}

/// Recovers `A` with `L·P = P·A` and entries of denominator at most
/// `denom_bound`; `None` if no such relation holds to `tol`.
pub fn solve_endomorphism(
    pm: &PeriodMatrix,
    alpha: C64,
    denom_bound: u64,
    tol: f64,
) -> Option<Endomorphism> {
    let raw = period_action(pm, pm, alpha);
    if raw.iter().flatten().any(|x| !x.is_finite()) {
        return None;
    }
    let rows = raw
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| {
                    let (n, d) = best_rational(x, denom_bound);
                    BigRational::new(BigInt::from(n), BigInt::from(d))
                })
                .collect()
        })
        .collect();
    let a = RatMatrix::from_rows(rows);
    let (gamma, residual) = fit_gamma(pm, pm, alpha, &to_f64(&a));
    if !(residual < tol) {
        return None;
    }
    // α must be a root of the characteristic polynomial of A.
    let tr = a.trace().to_f64()?;
    let det = a.determinant()?.to_f64()?;
    let charpoly = alpha * alpha - alpha * tr + det;
    if !(charpoly.norm() < tol * (1.0 + alpha.norm_sqr())) {
        return None;
    }
    Some(Endomorphism { gamma, a, residual })
}

/// Recovers an integer `B` with `L·P̃ = P·B` for an isogeny with tangent
/// action `α` from the curve with periods `src` to the curve with periods
/// `tgt`; `None` if no integer relation holds to `tol`.
pub fn solve_isogeny(
    src: &PeriodMatrix,
    tgt: &PeriodMatrix,
    alpha: C64,
    tol: f64,
) -> Option<Isogeny> {
    let raw = period_action(src, tgt, alpha);
    if raw
        .iter()
        .flatten()
        .any(|x| !x.is_finite() || x.abs() > 1e15)
    {
        return None;
    }
    let b: [[i64; 2]; 2] =
        core::array::from_fn(|i| core::array::from_fn(|j| raw[i][j].round() as i64));
    let bf = b.map(|r| r.map(|x| x as f64));
    let (gamma, residual) = fit_gamma(src, tgt, alpha, &bf);
    (residual < tol).then_some(Isogeny { gamma, b, residual })
}
