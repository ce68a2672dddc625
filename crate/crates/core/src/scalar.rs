//! Scalar abstraction for the exponent algebra.
//!
//! Every exponent relation is a rational function of the inputs, so the same
//! code runs in binary floating point (`f32`, `f64`) and in exact
//! arbitrary-precision rational arithmetic (`BigRational`).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar:
    Num + Signed + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync
{
    /// Exact arithmetic: identities must hold with zero residual.
    const EXACT: bool;

    /// Tolerance used when certifying identities in this arithmetic.
    fn identity_tolerance() -> f64;

    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::int(num) / Self::int(den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }

    /// |self| within the arithmetic's identity tolerance of zero.
    fn is_certified_zero(&self) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs().to_f64_lossy() <= Self::identity_tolerance()
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn identity_tolerance() -> f64 {
        1e-12
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn identity_tolerance() -> f64 {
        1e-5
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn identity_tolerance() -> f64 {
        0.0
    }
}

/// Parses a decimal literal such as `2.8`, `-0.125` or `3e-2` into an exact rational.
pub fn parse_decimal_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = all_digits.parse().ok()?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Some(value)
}
