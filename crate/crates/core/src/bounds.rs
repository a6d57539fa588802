//! Explicit bounds as exact integers, and pfaffian format bookkeeping.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use num_bigint::BigUint;
use num_traits::{One, Pow};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PfaffianFormat(pub [BigUint; 6]);

impl PfaffianFormat {
    pub fn from_u64(entries: [u64; 6]) -> Self {
        PfaffianFormat(entries.map(BigUint::from))
    }

    pub fn entries(&self) -> &[BigUint; 6] {
        &self.0
    }
}

impl fmt::Display for PfaffianFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Format of the graph of the exponential on a fundamental domain of one
/// factor.
pub fn format_graph() -> PfaffianFormat {
    PfaffianFormat::from_u64([9, 9, 1, 6, 144503, 4])
}

/// Format of the set cut out by a variety pulled back along the exponential
/// of one factor.
pub fn format_xg() -> PfaffianFormat {
    PfaffianFormat::from_u64([9, 9, 3, 12, 144503, 10])
}

/// `(9g′, 9g′, 3, 12g′, 144503^{g′}, 10g′)` for a product of `g′` factors.
pub fn format_product(factors: u32) -> Result<PfaffianFormat> {
    if factors == 0 {
        return Err(Error::InvalidArgument(
            "product format needs at least one factor".into(),
        ));
    }
    let n = BigUint::from(factors);
    Ok(PfaffianFormat([
        &n * 9u32,
        &n * 9u32,
        BigUint::from(3u32),
        &n * 12u32,
        Pow::pow(BigUint::from(144503u32), factors),
        &n * 10u32,
    ]))
}

fn check_args(g: u32, delta: u32) -> Result<()> {
    if g == 0 || delta == 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "g = {g} and delta = {delta} must both be positive"
        )));
    }
    Ok(())
}

/// `2^(42g² + 126g) · g^(30g) · max(3, δ)^(21g)`, bounding the number of
/// isolated points of `V ∩ C` for a variety of degree of definition `δ` in
/// the `g`-fold product.
pub fn n_iso_bound(g: u32, delta: u32) -> Result<BigUint> {
    check_args(g, delta)?;
    let g64 = u64::from(g);
    let two_exp = 42 * g64 * g64 + 126 * g64;
    let power_of_two = BigUint::one() << two_exp;
    let g_part: BigUint = Pow::pow(BigUint::from(g), 30 * g64);
    let d_part: BigUint = Pow::pow(BigUint::from(delta.max(3)), 21 * g64);
    Ok(power_of_two * g_part * d_part)
}

/// A constant known to exist and be effectively computable whose value is
/// not available.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Constant {
    Unresolved,
}

impl Constant {
    pub fn is_resolved(&self) -> bool {
        false
    }
}

/// Shape of the bound `N ≤ c₁·δ^{c₂}` on the number of components of
/// `V ∩ C`, with `c₁, c₂` depending only on `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentBoundShape {
    pub g: u32,
    pub statement: String,
    pub c1: Constant,
    pub c2: Constant,
    /// Expected growth of the constants in `g`.
    pub exponent_shape: String,
    pub note: String,
}

pub fn component_bound_shape(g: u32) -> Result<ComponentBoundShape> {
    check_args(g, 1)?;
    Ok(ComponentBoundShape {
        g,
        statement: "N <= c1 * delta^c2".into(),
        c1: Constant::Unresolved,
        c2: Constant::Unresolved,
        exponent_shape: "(c*g)^(c'*g)".into(),
        note: "c1, c2 (and c, c') are effectively computable but no values are stated".into(),
    })
}

/// Both bounds for one `(g, δ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundReport {
    pub g: u32,
    pub delta: u32,
    pub n_iso: BigUint,
    pub components: ComponentBoundShape,
}

pub fn bound_report(g: u32, delta: u32) -> Result<BoundReport> {
    Ok(BoundReport {
        g,
        delta,
        n_iso: n_iso_bound(g, delta)?,
        components: component_bound_shape(g)?,
    })
}

/// A bound on the number of isolated points of `V ∩ C` in terms of `g` and
/// `δ`. Implementations derived from general component-count estimates for
/// pfaffian sets belong here and should say where their formula comes from.
pub trait IsolatedPointBound {
    fn name(&self) -> &str;
    /// `None` where the bound does not apply.
    fn bound(&self, g: u32, delta: u32) -> Option<BigUint>;
}

/// The closed form [`n_iso_bound`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedForm;

impl IsolatedPointBound for ClosedForm {
    fn name(&self) -> &str {
        "closed-form"
    }

    fn bound(&self, g: u32, delta: u32) -> Option<BigUint> {
        n_iso_bound(g, delta).ok()
    }
}

/// Smallest value over several bounds.
pub fn best_bound(
    bounds: &[&dyn IsolatedPointBound],
    g: u32,
    delta: u32,
) -> Option<(String, BigUint)> {
    let mut all: Vec<(String, BigUint)> = bounds
        .iter()
        .filter_map(|b| Some((String::from(b.name()), b.bound(g, delta)?)))
        .collect();
    all.sort_by(|a, b| a.1.cmp(&b.1));
    all.into_iter().next()
}
