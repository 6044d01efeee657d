//! Exact rational scalars and their canonical string form.
//!
//! All quantities in the engine are arbitrary-precision rationals. The
//! canonical serialization is the lowest-terms `"p/q"` string, with
//! integers written without the `/1` suffix, so values round-trip
//! bit-exactly through JSON.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational scalar used throughout the engine.
pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"300"`, `"1/3"`, `"-7/2"`, or a decimal literal like `"0.25"`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseRationalError::Invalid(s.to_string()));
        }
        let negative = int_part.starts_with('-');
        let int: BigInt = if int_part == "-" || int_part.is_empty() {
            BigInt::zero()
        } else {
            int_part
                .parse()
                .map_err(|_| ParseRationalError::Invalid(s.to_string()))?
        };
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rational::from_integer(int.clone());
        let frac_value = Rational::new(frac, scale);
        if negative {
            value -= frac_value;
        } else {
            value += frac_value;
        }
        return Ok(value);
    }
    let int: BigInt = s
        .parse()
        .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
    Ok(Rational::from_integer(int))
}

/// Canonical lowest-terms string: `"p/q"`, or just `"p"` when the
/// denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate `f64` value, for the CLI's optional convenience fields.
pub fn rational_to_f64(r: &Rational) -> f64 {
    let num = r.numer();
    let den = r.denom();
    // Exact conversion whenever both parts fit in an i128.
    if let (Some(n), Some(d)) = (i128::try_from(num).ok(), i128::try_from(den).ok()) {
        return n as f64 / d as f64;
    }
    let digits = 30;
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (num * &scale) / den;
    let s = scaled.to_string();
    s.parse::<f64>().unwrap_or(f64::NAN) / 1e30
}
