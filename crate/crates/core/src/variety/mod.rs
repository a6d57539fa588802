//! Multiprojective polynomial systems on `𝒢 ⊂ (ℙ⁴)^g`.
//!
//! Variables are `X{i}_{k}` (coordinate `i ∈ 0..=4` of factor `k ∈ 1..=g`)
//! and the affine aliases `x{i}_{k}` (`i ∈ 1..=4`, with `X0_k = 1`). Affine
//! input is homogenised with `X0_k`; homogeneous input must be homogeneous in
//! every factor.

mod coeff;
mod parse;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
#[allow(unused_imports)] // shadowed by the inherent methods when std is linked
use num_traits::Float;

pub use coeff::Coeff;
pub use parse::parse_variety;

use crate::extension::{ExtensionConfig, UEPoint};
use crate::{Error, Result, C64};

/// Exponents of one monomial, indexed by factor then coordinate.
pub type Monomial = Vec<[u32; 5]>;

fn factor_degree(m: &Monomial, k: usize) -> u32 {
    m[k].iter().sum()
}

/// Polynomial homogeneous in each factor's five coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiProjPoly {
    terms: BTreeMap<Monomial, Coeff>,
    degrees: Vec<u32>,
    approx: Vec<(Monomial, C64)>,
}

impl MultiProjPoly {
    /// Collects terms over `g` factors, dropping zero coefficients.
    pub fn new(g: usize, terms: impl IntoIterator<Item = (Monomial, Coeff)>) -> Result<Self> {
        let mut map: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (m, c) in terms {
            if m.len() != g {
                return Err(Error::InvalidArgument(alloc::format!(
                    "monomial over {} factors in a system over {g}",
                    m.len()
                )));
            }
            let e = map.entry(m).or_insert_with(|| Coeff::integer(0));
            *e = &*e + &c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut degrees = alloc::vec![0; g];
        for k in 0..g {
            let mut it = map.keys().map(|m| factor_degree(m, k));
            if let Some(d) = it.next() {
                if it.any(|e| e != d) {
                    return Err(Error::InhomogeneousDegree {
                        line: 0,
                        factor: k + 1,
                    });
                }
                degrees[k] = d;
            }
        }
        let approx = map.iter().map(|(m, c)| (m.clone(), c.to_c64())).collect();
        Ok(MultiProjPoly {
            terms: map,
            degrees,
            approx,
        })
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Coeff> {
        &self.terms
    }

    pub fn num_factors(&self) -> usize {
        self.degrees.len()
    }

    /// Degree in each factor's coordinates.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at homogeneous coordinates, one row per factor.
    pub fn eval(&self, x: &[[C64; 5]]) -> C64 {
        eval_terms(&self.approx, x)
    }

    /// Value divided by `∏ₖ ‖xₖ‖∞^{dₖ}`; its modulus does not depend on the
    /// representatives chosen.
    pub fn eval_scaled(&self, x: &[[C64; 5]]) -> C64 {
        let mut s = 1.0;
        for (row, &d) in x.iter().zip(&self.degrees) {
            let m = row.iter().map(|c| c.norm()).fold(0.0, f64::max);
            s *= m.powi(d as i32);
        }
        self.eval(x) / s
    }
}

fn eval_terms(terms: &[(Monomial, C64)], x: &[[C64; 5]]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (m, c) in terms {
        let mut t = *c;
        for (row, e) in x.iter().zip(m) {
            for i in 0..5 {
                if e[i] > 0 {
                    t *= row[i].powu(e[i]);
                }
            }
        }
        acc += t;
    }
    acc
}

impl fmt::Display for MultiProjPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |_| 'X')
    }
}

fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: &BTreeMap<Monomial, Coeff>,
    letter: impl Fn(usize) -> char,
) -> fmt::Result {
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (n, (m, c)) in terms.iter().enumerate() {
        if n > 0 {
            write!(f, " + ")?;
        }
        write!(f, "{c}")?;
        for (k, row) in m.iter().enumerate() {
            for (i, &e) in row.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}{i}_{}", letter(k), k + 1)?,
                    _ => write!(f, "*{}{i}_{}^{e}", letter(k), k + 1)?,
                }
            }
        }
    }
    Ok(())
}

/// A polynomial system with its degree of definition.
#[derive(Debug, Clone, PartialEq)]
pub struct VarietySpec {
    polys: Vec<MultiProjPoly>,
    g: usize,
    delta: u32,
}

impl VarietySpec {
    pub fn new(g: usize, polys: Vec<MultiProjPoly>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::EmptySystem);
        }
        for (n, p) in polys.iter().enumerate() {
            if p.num_factors() != g {
                return Err(Error::InvalidArgument(alloc::format!(
                    "equation {} has {} factors, expected {g}",
                    n + 1,
                    p.num_factors()
                )));
            }
            if p.degrees().iter().all(|&d| d == 0) {
                return Err(Error::ConstantEquation { line: n + 1 });
            }
        }
        let delta = polys
            .iter()
            .flat_map(|p| p.degrees().iter().copied())
            .max()
            .unwrap_or(0);
        Ok(VarietySpec { polys, g, delta })
    }

    pub fn polys(&self) -> &[MultiProjPoly] {
        &self.polys
    }

    pub fn num_factors(&self) -> usize {
        self.g
    }

    /// Degree of definition: the largest per-factor degree of the system.
    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Scale-free residuals at raw homogeneous coordinates.
    pub fn eval_coords(&self, x: &[[C64; 5]]) -> Vec<C64> {
        self.polys.iter().map(|p| p.eval_scaled(x)).collect()
    }

    /// `eval_coords` at each factor's representative coordinates:
    /// `(1, x1, …, x4)` for affine factors and `(0, 0, 1, 0, v)` on the
    /// identity fibre.
    pub fn eval_point(&self, pt: &UEPoint) -> Result<Vec<C64>> {
        if pt.len() != self.g {
            return Err(Error::InvalidArgument(alloc::format!(
                "point has {} factors, variety has {}",
                pt.len(),
                self.g
            )));
        }
        let x: Vec<[C64; 5]> = pt.factors.iter().map(|f| f.coords()).collect();
        Ok(self.eval_coords(&x))
    }

    /// Substitution `X0_k = 1` on the factors in `affine` and the identity
    /// `(0, 0, 1, 0, 0)` on the others.
    pub fn specialize(&self, affine: &[bool]) -> Specialization {
        let polys = self
            .polys
            .iter()
            .map(|p| {
                let mut out: BTreeMap<Monomial, Coeff> = BTreeMap::new();
                'terms: for (m, c) in p.terms() {
                    let mut key = m.clone();
                    for (k, row) in key.iter_mut().enumerate() {
                        if affine[k] {
                            row[0] = 0;
                        } else {
                            if row[0] + row[1] + row[3] + row[4] > 0 {
                                continue 'terms;
                            }
                            *row = [0; 5];
                        }
                    }
                    let e = out.entry(key).or_insert_with(|| Coeff::integer(0));
                    *e = &*e + c;
                }
                out.retain(|_, c| !c.is_zero());
                AffinePoly { terms: out }
            })
            .collect();
        Specialization {
            affine: affine.to_vec(),
            polys,
        }
    }

    /// All `2^g` specialisations, indexed by the bitmask of affine factors
    /// (bit `k` set means factor `k + 1` uses the chart `X0 = 1`).
    pub fn chart_specializations(&self) -> Vec<Specialization> {
        (0..1usize << self.g)
            .map(|mask| {
                let affine: Vec<bool> = (0..self.g).map(|k| mask >> k & 1 == 1).collect();
                self.specialize(&affine)
            })
            .collect()
    }
}

/// Residuals of the system at a point of the configuration, scaled as in
/// [`MultiProjPoly::eval_scaled`].
pub fn eval_variety(spec: &VarietySpec, cfg: &ExtensionConfig, pt: &UEPoint) -> Result<Vec<C64>> {
    let res = cfg.model_residual(pt)?;
    if !(res <= cfg.model_tol()) {
        return Err(Error::NotOnModel { residual: res });
    }
    spec.eval_point(pt)
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.polys {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Polynomial in the affine coordinates of some factors.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl AffinePoly {
    pub fn terms(&self) -> &BTreeMap<Monomial, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree in each factor's variables.
    pub fn factor_degrees(&self, g: usize) -> Vec<u32> {
        (0..g)
            .map(|k| {
                self.terms
                    .keys()
                    .map(|m| factor_degree(m, k))
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Largest total degree across all variables.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|r| r.iter().sum::<u32>()).sum())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for AffinePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.terms, |_| 'x')
    }
}

/// One chart specialisation of a system.
#[derive(Debug, Clone, PartialEq)]
pub struct Specialization {
    /// Factors on the chart `X0 = 1`; the others sit at the identity.
    pub affine: Vec<bool>,
    pub polys: Vec<AffinePoly>,
}

impl Specialization {
    /// Largest per-factor degree; never exceeds the source system's `δ`.
    pub fn degree(&self) -> u32 {
        let g = self.affine.len();
        self.polys
            .iter()
            .flat_map(|p| p.factor_degrees(g))
            .max()
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.polys
            .iter()
            .map(AffinePoly::total_degree)
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inhomogeneous_terms_rejected() {
        let t = [
            (alloc::vec![[1, 0, 0, 0, 0]], Coeff::integer(1)),
            (alloc::vec![[0, 2, 0, 0, 0]], Coeff::integer(1)),
        ];
        assert!(matches!(
            MultiProjPoly::new(1, t),
            Err(Error::InhomogeneousDegree { factor: 1, .. })
        ));
    }

    #[test]
    fn cancelling_terms_vanish() {
        let t = [
            (alloc::vec![[1, 0, 0, 0, 0]], Coeff::integer(2)),
            (alloc::vec![[1, 0, 0, 0, 0]], Coeff::integer(-2)),
        ];
        let p = MultiProjPoly::new(1, t).unwrap();
        assert!(p.is_zero());
        assert!(matches!(
            VarietySpec::new(1, alloc::vec![p]),
            Err(Error::ConstantEquation { line: 1 })
        ));
        assert_eq!(VarietySpec::new(1, alloc::vec![]), Err(Error::EmptySystem));
    }
}
