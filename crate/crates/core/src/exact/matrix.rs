use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense row-major matrix over `ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: alloc::vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RatMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_ints<const C: usize>(rows: &[[i64; C]]) -> Self {
        RatMatrix {
            rows: rows.len(),
            cols: C,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())))
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> BigRational {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i).clone())
            .sum()
    }

    /// Determinant by exact elimination; `None` unless square.
    pub fn determinant(&self) -> Option<BigRational> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut m = self.data.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i * n + c].is_zero()) else {
                return Some(BigRational::zero());
            };
            if p != c {
                for j in 0..n {
                    m.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = m[c * n + c].clone();
            det *= &piv;
            for i in c + 1..n {
                let f = &m[i * n + c] / &piv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let t = &f * &m[c * n + j];
                    m[i * n + j] -= t;
                }
            }
        }
        Some(det)
    }

    /// Places `block` with its top-left corner at `(i, j)`.
    pub fn set_block(&mut self, i: usize, j: usize, block: &RatMatrix) {
        for a in 0..block.rows {
            for b in 0..block.cols {
                self.set(i + a, j + b, block.get(a, b).clone());
            }
        }
    }

    /// Rank over `ℚ`: rows are cleared of denominators and reduced by
    /// fraction-free (Bareiss) elimination over `ℤ`.
    pub fn exact_rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                let l = row.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in rank + 1..self.rows {
                for j in c + 1..self.cols {
                    let v = &m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j];
                    debug_assert!((&v % &prev).is_zero());
                    m[i][j] = v / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[rank][c].clone();
            rank += 1;
        }
        rank
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;
    fn add(self, o: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;
    fn sub(self, o: &RatMatrix) -> RatMatrix {
        self + &(-o)
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;
    fn neg(self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, o: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut out = RatMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a * o.get(k, j);
                    out.data[i * o.cols + j] += t;
                }
            }
        }
        out
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(RatMatrix::zeros(3, 4).exact_rank(), 0);
        assert_eq!(RatMatrix::identity(5).exact_rank(), 5);
        assert_eq!(RatMatrix::from_ints(&[[1, 2], [2, 4]]).exact_rank(), 1);
        assert_eq!(
            RatMatrix::from_ints(&[[0, 0, 1], [0, 0, 2], [0, 3, 0]]).exact_rank(),
            2
        );
    }

    #[test]
    fn determinant_and_trace() {
        let m = RatMatrix::from_ints(&[[2, 1], [7, -3]]);
        assert_eq!(
            m.determinant().unwrap(),
            BigRational::from_integer((-13).into())
        );
        assert_eq!(m.trace(), BigRational::from_integer((-1).into()));
        assert!(RatMatrix::zeros(2, 3).determinant().is_none());
    }
}
