//! Exact dyadic rationals `m * 2^e`.
//!
//! Every metric computation in the toolkit stays inside this ring, so each
//! inequality asserted by a certificate is decidable by integer arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A dyadic rational, normalized so the mantissa is odd (or zero with `exp == 0`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }

    /// `2^e` for any integer `e` (negative allowed).
    pub fn pow2(e: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exp: e }
    }

    pub fn from_integer(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        while (&self.mantissa % 2u8).is_zero() {
            self.mantissa /= 2;
            self.exp += 1;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// `Some(e)` iff the value is exactly `2^e`.
    pub fn as_pow2(&self) -> Option<i64> {
        if self.mantissa.is_one() {
            Some(self.exp)
        } else {
            None
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exp: self.exp }
    }

    pub fn halved(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp - 1 }
    }

    /// Value divided by `8^k` (used for the cascade scales).
    pub fn div_pow8(&self, k: u32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp - 3 * k as i64 }
    }

    pub fn to_rational(&self) -> BigRational {
        let num = self.mantissa.clone();
        if self.exp >= 0 {
            BigRational::from_integer(num << self.exp as usize)
        } else {
            BigRational::new(num, BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Parses `"0"`, `"2"`, `"3/16"`, `"1/4"`. The denominator must be a power of two.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num: BigInt = num_s
            .parse()
            .map_err(|_| Error::Parse(format!("bad dyadic numerator {num_s:?}")))?;
        let Some(den_s) = den_s else {
            return Ok(Dyadic::new(num, 0));
        };
        let den: BigInt = den_s
            .parse()
            .map_err(|_| Error::Parse(format!("bad dyadic denominator {den_s:?}")))?;
        if den <= BigInt::zero() {
            return Err(Error::Parse(format!("nonpositive denominator in {s:?}")));
        }
        let mut d = den.clone();
        let mut e = 0i64;
        while (&d % 2u8).is_zero() {
            d /= 2;
            e += 1;
        }
        if !d.is_one() {
            return Err(Error::Parse(format!("denominator of {s:?} is not a power of two")));
        }
        Ok(Dyadic::new(num, -e))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp >= 0 {
            write!(f, "{}", &self.mantissa << self.exp as usize)
        } else {
            write!(f, "{}/{}", self.mantissa, BigInt::one() << (-self.exp) as usize)
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        // Compare m1*2^(e1-e) vs m2*2^(e2-e) at the common scale e = min(e1,e2).
        let e = self.exp.min(other.exp);
        let lhs = &self.mantissa << (self.exp - e) as usize;
        let rhs = &other.mantissa << (other.exp - e) as usize;
        lhs.cmp(&rhs)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.min(rhs.exp);
        let a = &self.mantissa << (self.exp - e) as usize;
        let b = &rhs.mantissa << (rhs.exp - e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let e = self.exp.min(rhs.exp);
        let a = &self.mantissa << (self.exp - e) as usize;
        let b = &rhs.mantissa << (rhs.exp - e) as usize;
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa.clone(), exp: self.exp }
    }
}

/// Expects `eps = 2^{-k}` with `k >= 0`; returns `k`.
pub fn pow2_exponent(eps: &Dyadic) -> Result<u32> {
    match eps.as_pow2() {
        Some(e) if e <= 0 => Ok((-e) as u32),
        _ => Err(Error::Input(format!("expected a dyadic of the form 2^-k, got {eps}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_pow2() {
        let d = Dyadic::new(BigInt::from(12), -4);
        assert_eq!(d.to_string(), "3/4");
        assert_eq!(Dyadic::pow2(-3).to_string(), "1/8");
        assert_eq!(Dyadic::pow2(-3).as_pow2(), Some(-3));
        assert_eq!(Dyadic::new(BigInt::from(6), -1).as_pow2(), None);
    }

    #[test]
    fn arithmetic() {
        let a = Dyadic::parse("3/16").unwrap();
        let b = Dyadic::parse("1/4").unwrap();
        assert_eq!((&a + &b).to_string(), "7/16");
        assert_eq!((&b - &a).to_string(), "1/16");
        assert_eq!((&a * &b).to_string(), "3/64");
        assert!(a < b);
        assert!((&a - &b).is_negative());
    }

    #[test]
    fn parse_rejects_non_dyadic() {
        assert!(Dyadic::parse("1/3").is_err());
        assert!(Dyadic::parse("x").is_err());
        assert_eq!(Dyadic::parse("2").unwrap(), Dyadic::from_integer(2));
    }

    #[test]
    fn geometric_tail_of_eighths_stays_below_quarter() {
        // sum_{i=l..r} eps/8^{i+1} < eps/4 for every l, r
        let eps = Dyadic::one();
        for l in 0..6u32 {
            let mut sum = Dyadic::zero();
            for i in l..12 {
                sum = &sum + &eps.div_pow8(i + 1);
            }
            assert!(sum < Dyadic::pow2(-2));
        }
    }
}
