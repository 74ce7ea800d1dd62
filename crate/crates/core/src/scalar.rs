//! Scalar abstraction and the exact Gaussian-rational field.
//!
//! All transforms in this crate are generic over a [`Scalar`]: a field with a
//! conjugation. The intended instantiation is [`GaussianRational`] (exact
//! arithmetic over Q(i)); `f64` also implements the trait for quick numeric
//! experiments, with conjugation acting as the identity.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Field with conjugation. Everything the transforms need from a coefficient.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn conj(&self) -> Self;

    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Whether the value is a real number `>= 0`; used to validate
    /// covariance matrices.
    fn is_nonneg_real(&self) -> bool;
}

impl Scalar for f64 {
    fn conj(&self) -> Self {
        *self
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn is_nonneg_real(&self) -> bool {
        *self >= 0.0
    }
}

/// Exact element of Q(i): a rational real part and a rational imaginary part.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussianRational {
            re,
            im: BigRational::zero(),
        }
    }

    /// Build `(re_num/re_den) + (im_num/im_den) i`, rejecting zero denominators.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Result<Self> {
        if re_den == 0 || im_den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(GaussianRational {
            re: BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            im: BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        })
    }

    pub fn i() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Squared modulus |z|^2 = re^2 + im^2, a nonnegative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}i", self.im);
        }
        if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        GaussianRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        GaussianRational {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<'a> Add<&'a GaussianRational> for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &'a Self) -> Self {
        GaussianRational {
            re: self.re + &rhs.re,
            im: self.im + &rhs.im,
        }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> Self {
        GaussianRational {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<'a, 'b> Mul<&'b GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &'b GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: Self) -> Self {
        let n = rhs.norm_sq();
        assert!(!n.is_zero(), "division by zero Gaussian rational");
        let conj = rhs.conj();
        let prod = &self * &conj;
        GaussianRational {
            re: prod.re / &n,
            im: prod.im / &n,
        }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> Self {
        GaussianRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Scalar for GaussianRational {
    fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    fn from_int(n: i64) -> Self {
        GaussianRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    fn is_nonneg_real(&self) -> bool {
        self.im.is_zero() && !self.re.is_negative()
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        GaussianRational::from_int(n)
    }
}
