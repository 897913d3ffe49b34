//! Exact rational quantities.
//!
//! Every real-valued parameter of a network (weights, release amounts,
//! thresholds, gains) and every extracellular amount is held as an exact
//! rational so that threshold comparisons never depend on rounding.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number '{text}': {reason}")]
pub struct ParseQuantityError {
    pub text: String,
    pub reason: &'static str,
}

/// An exact rational number in canonical form (reduced, positive denominator).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Quantity(BigRational);

impl Quantity {
    pub fn zero() -> Self {
        Quantity(BigRational::zero())
    }

    pub fn one() -> Self {
        Quantity(BigRational::one())
    }

    pub fn from_integer(value: i64) -> Self {
        Quantity(BigRational::from_integer(BigInt::from(value)))
    }

    /// Builds `numer / denom`. Panics on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Quantity(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// Number of fractional decimal digits needed to print this value exactly,
    /// or `None` when the denominator has a prime factor other than 2 or 5.
    fn decimal_places(&self) -> Option<usize> {
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut den = self.denom().clone();
        let (mut twos, mut fives) = (0usize, 0usize);
        while den.is_even() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        den.is_one().then_some(twos.max(fives))
    }
}

impl fmt::Display for Quantity {
    /// Finite decimals are printed as such (`1.1`, `-0.25`, `3`); anything
    /// else falls back to `num/den`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(places) = self.decimal_places() else {
            return write!(f, "{}/{}", self.numer(), self.denom());
        };
        if places == 0 {
            return write!(f, "{}", self.numer());
        }
        let scale = num_traits::pow(BigInt::from(10), places);
        let scaled = self.numer().abs() * &scale / self.denom();
        let digits = format!("{:0>width$}", scaled.to_string(), width = places + 1);
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        let sign = if self.is_negative() { "-" } else { "" };
        write!(f, "{sign}{int_part}.{frac_part}")
    }
}

impl fmt::Debug for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quantity({self})")
    }
}

fn parse_digits(text: &str, part: &str) -> Result<BigInt, ParseQuantityError> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseQuantityError {
            text: text.to_string(),
            reason: "expected decimal digits",
        });
    }
    Ok(part.parse().expect("ascii digits parse as an integer"))
}

impl FromStr for Quantity {
    type Err = ParseQuantityError;

    /// Accepts `[-]digits[.digits]` or `[-]digits/digits`. No exponents, no
    /// surrounding whitespace.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (negative, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let value = if let Some((num, den)) = body.split_once('/') {
            let num = parse_digits(text, num)?;
            let den = parse_digits(text, den)?;
            if den.is_zero() {
                return Err(ParseQuantityError {
                    text: text.to_string(),
                    reason: "zero denominator",
                });
            }
            BigRational::new(num, den)
        } else if let Some((int, frac)) = body.split_once('.') {
            let int = parse_digits(text, int)?;
            let frac_digits = parse_digits(text, frac)?;
            let scale = num_traits::pow(BigInt::from(10), frac.len());
            BigRational::new(int * &scale + frac_digits, scale)
        } else {
            BigRational::from_integer(parse_digits(text, body)?)
        };
        Ok(Quantity(if negative { -value } else { value }))
    }
}

impl Add for Quantity {
    type Output = Quantity;
    fn add(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    fn add(self, rhs: &'a Quantity) -> Quantity {
        Quantity(&self.0 + &rhs.0)
    }
}

impl Sub for Quantity {
    type Output = Quantity;
    fn sub(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 - rhs.0)
    }
}

impl<'a> Sub<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    fn sub(self, rhs: &'a Quantity) -> Quantity {
        Quantity(&self.0 - &rhs.0)
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    fn mul(self, rhs: &'a Quantity) -> Quantity {
        Quantity(&self.0 * &rhs.0)
    }
}

impl Neg for Quantity {
    type Output = Quantity;
    fn neg(self) -> Quantity {
        Quantity(-self.0)
    }
}

impl Sum for Quantity {
    fn sum<I: Iterator<Item = Quantity>>(iter: I) -> Quantity {
        iter.fold(Quantity::zero(), Add::add)
    }
}

impl From<i64> for Quantity {
    fn from(value: i64) -> Self {
        Quantity::from_integer(value)
    }
}

/// Convenience for tests and literals: `q("1.1")`. Panics on malformed input.
pub fn q(text: &str) -> Quantity {
    text.parse()
        .unwrap_or_else(|err| panic!("bad quantity literal: {err}"))
}

impl PartialEq<i64> for Quantity {
    fn eq(&self, other: &i64) -> bool {
        *self == Quantity::from_integer(*other)
    }
}

impl PartialOrd<i64> for Quantity {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Quantity::from_integer(*other)))
    }
}
