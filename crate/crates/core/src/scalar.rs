//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_q(text: &str) -> Result<Q> {
    let t = text.trim();
    let bad = || Error::Parse {
        line: 0,
        col: 0,
        msg: format!("invalid rational `{text}`"),
    };
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Canonical `"num/den"` text (integers print without a denominator).
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The scalar fields the exterior algebra is generic over.
pub trait Field:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
    + From<Q>
{
    fn inv(&self) -> Self;

    fn div_ref(&self, other: &Self) -> Self {
        self.clone() * &other.inv()
    }

    fn conj(&self) -> Self;

    /// Size of the numerators, used for residual diagnostics.
    fn magnitude(&self) -> f64;
}

impl Field for Q {
    fn inv(&self) -> Self {
        self.recip()
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> Self {
        Self { re, im }
    }

    pub fn i() -> Self {
        Self::new(Q::zero(), Q::one())
    }

    pub fn real(re: Q) -> Self {
        Self::new(re, Q::zero())
    }
}

impl From<Q> for GaussQ {
    fn from(re: Q) -> Self {
        Self::real(re)
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}i", fmt_q(&self.re), fmt_q(&self.im))
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        Self::new(Q::zero(), Q::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        Self::new(Q::one(), Q::zero())
    }
}

impl Neg for GaussQ {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Add for GaussQ {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Add<&GaussQ> for GaussQ {
    type Output = Self;
    fn add(self, o: &GaussQ) -> Self {
        Self::new(self.re + &o.re, self.im + &o.im)
    }
}

impl Sub<&GaussQ> for GaussQ {
    type Output = Self;
    fn sub(self, o: &GaussQ) -> Self {
        Self::new(self.re - &o.re, self.im - &o.im)
    }
}

impl Mul for GaussQ {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self * &o
    }
}

impl Mul<&GaussQ> for GaussQ {
    type Output = Self;
    fn mul(self, o: &GaussQ) -> Self {
        Self::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Div for GaussQ {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self.div_ref(&o)
    }
}

impl AddAssign<&GaussQ> for GaussQ {
    fn add_assign(&mut self, o: &GaussQ) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussQ> for GaussQ {
    fn sub_assign(&mut self, o: &GaussQ) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussQ> for GaussQ {
    fn mul_assign(&mut self, o: &GaussQ) {
        *self = self.clone() * o;
    }
}

impl Field for GaussQ {
    fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        Self::new(&self.re / &n, -(&self.im / &n))
    }

    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    fn magnitude(&self) -> f64 {
        let r = q_to_f64(&self.re);
        let i = q_to_f64(&self.im);
        (r * r + i * i).sqrt()
    }
}
