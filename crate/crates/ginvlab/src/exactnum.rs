//! Exact Gaussian-rational scalars.
//!
//! Every scalar is `a + b*i` with `a`, `b` arbitrary-precision rationals, so
//! ranks, Penrose equations and set-membership tests are decided by exact
//! equality with no tolerances anywhere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

/// A complex number whose real and imaginary parts are exact rationals.
///
/// `BigRational` keeps every fraction in lowest terms with a positive
/// denominator, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }

    /// Real rational `p/q`.
    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::zero(),
        )
    }

    /// Gaussian rational `p/q + r/s i`.
    pub fn from_parts(p: i64, q: i64, r: i64, s: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(p), BigInt::from(q)),
            BigRational::new(BigInt::from(r), BigInt::from(s)),
        )
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    /// Complex conjugate `a - b*i`.
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = a^2 + b^2`, an exact nonnegative rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; fails on zero.
    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -&self.im / &n))
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text form: `p/q`, `p/q+r/s i` or `p/q-r/s i`, with `/1`
/// denominators elided. This is what the matrix JSON format stores.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        fmt_rational(&self.re, f)?;
        if self.im.is_negative() {
            write!(f, "-")?;
            fmt_rational(&-self.im.clone(), f)?;
        } else {
            write!(f, "+")?;
            fmt_rational(&self.im, f)?;
        }
        write!(f, "i")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let err = || Error::ParseScalar(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).map_err(|_| err())?;
            let q = BigInt::from_str(q).map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p = BigInt::from_str(s).map_err(|_| err())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    /// Whitespace-insensitive parse of the canonical grammar.
    fn from_str(s: &str) -> Result<Self, Error> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::ParseScalar(s.to_string());
        if compact.is_empty() || !compact.is_ascii() {
            return Err(err());
        }
        if let Some(body) = compact.strip_suffix('i') {
            // Split real and imaginary parts at the last top-level sign,
            // skipping a leading sign on the real part.
            let split = body
                .char_indices()
                .skip(1)
                .rev()
                .find(|&(i, c)| (c == '+' || c == '-') && !matches!(&body[i - 1..i], "/" | "+" | "-"))
                .map(|(i, _)| i);
            match split {
                Some(i) => {
                    let re = parse_rational(&body[..i])?;
                    let im_str = &body[i..];
                    let im = if im_str == "+" || im_str == "-" {
                        return Err(err());
                    } else {
                        parse_rational(im_str)?
                    };
                    Ok(Self::new(re, im))
                }
                // Pure imaginary like "2i" or "1/2i".
                None => Ok(Self::new(BigRational::zero(), parse_rational(body)?)),
            }
        } else {
            Ok(Self::new(parse_rational(&compact)?, BigRational::zero()))
        }
    }
}
