use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::C64;

/// Exact complex rational `re + im·i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Coeff { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Coeff {
            re,
            im: BigRational::zero(),
        }
    }

    pub fn integer(n: i64) -> Self {
        Coeff::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn imaginary_unit() -> Self {
        Coeff {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    /// Exact value of a finite double; `None` for NaN or infinities.
    pub fn from_c64(z: C64) -> Option<Self> {
        Some(Coeff {
            re: BigRational::from_float(z.re)?,
            im: BigRational::from_float(z.im)?,
        })
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(Coeff {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Coeff::integer(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

/// Written so that the variety parser reads it back: `(3/2)`, `(-1/4*i)`,
/// `(1+2*i)`.
impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "({})", self.re),
            (true, false) => write!(f, "({}*i)", self.im),
            (false, false) => {
                if self.im < BigRational::zero() {
                    write!(f, "({}-{}*i)", self.re, -&self.im)
                } else {
                    write!(f, "({}+{}*i)", self.re, self.im)
                }
            }
        }
    }
}
