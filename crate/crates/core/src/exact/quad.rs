use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::RatMatrix;
use crate::{Error, Result};

/// `ℚ(√D)` for a negative non-square integer `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: i64,
}

/// `a + b·√D`; the field is carried separately by [`QuadField`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElem {
    pub a: BigRational,
    pub b: BigRational,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::InvalidArgument(alloc::format!(
                "D = {d} must be negative"
            )));
        }
        Ok(QuadField { d })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    fn d_rat(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.d))
    }

    pub fn zero(&self) -> QuadElem {
        QuadElem::rational(BigRational::zero())
    }

    pub fn one(&self) -> QuadElem {
        QuadElem::rational(BigRational::one())
    }

    /// `√D`.
    pub fn sqrt_d(&self) -> QuadElem {
        QuadElem {
            a: BigRational::zero(),
            b: BigRational::one(),
        }
    }

    pub fn mul(&self, x: &QuadElem, y: &QuadElem) -> QuadElem {
        QuadElem {
            a: &x.a * &y.a + &x.b * &y.b * self.d_rat(),
            b: &x.a * &y.b + &x.b * &y.a,
        }
    }

    /// `N(x) = a² − D·b²`, positive for `x ≠ 0`.
    pub fn norm(&self, x: &QuadElem) -> BigRational {
        &x.a * &x.a - &x.b * &x.b * self.d_rat()
    }

    /// `(a − b√D) / (a² − D·b²)`.
    pub fn inv(&self, x: &QuadElem) -> Option<QuadElem> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        Some(QuadElem {
            a: &x.a / &n,
            b: -&x.b / &n,
        })
    }

    /// `A(x) = a·I + b·A_D` with `A_D = [[0, D], [1, 0]]`.
    pub fn embed(&self, x: &QuadElem) -> RatMatrix {
        RatMatrix::from_rows(alloc::vec![
            alloc::vec![x.a.clone(), &x.b * self.d_rat()],
            alloc::vec![x.b.clone(), x.a.clone()],
        ])
    }
}

impl QuadElem {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        QuadElem { a, b }
    }

    pub fn rational(a: BigRational) -> Self {
        QuadElem {
            a,
            b: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, o: &QuadElem) -> QuadElem {
        QuadElem {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &QuadElem) -> QuadElem {
        QuadElem {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
        }
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem {
            a: -&self.a,
            b: -&self.b,
        }
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√D", self.a, self.b)
    }
}

/// Rank of a matrix over `ℚ(√D)` by Gaussian elimination in the field.
pub fn rank_over_field(field: &QuadField, rows: &[alloc::vec::Vec<QuadElem>]) -> usize {
    let mut m: alloc::vec::Vec<alloc::vec::Vec<QuadElem>> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = field.inv(&m[rank][c]).expect("nonzero pivot");
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = field.mul(&m[i][c], &inv);
            for j in c..cols {
                let t = field.mul(&f, &m[rank][j]);
                m[i][j] = &m[i][j] - &t;
            }
        }
        rank += 1;
    }
    rank
}
