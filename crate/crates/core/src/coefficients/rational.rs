use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact fraction, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for `n/d`.
pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Serializes as `"num/den"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"`, an integer, or a decimal literal such as `"-0.125"` or
/// `"1.5e-3"`. Decimals are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("invalid rational `{text}`"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(Rational::new(n, d));
    }

    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = text[i + 1..].parse().map_err(|_| bad())?;
            (&text[..i], e)
        }
        None => (text, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= Pow::pow(&ten, scale as u32);
    } else {
        value /= Pow::pow(&ten, scale.unsigned_abs());
    }
    Ok(if negative { -value } else { value })
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    let root = n.nth_root(q);
    (Pow::pow(&root, q) == *n).then_some(root)
}

/// `s^t` computed exactly, or `None` when the result is irrational.
///
/// The `q`-th root of numerator and denominator (with `t = p/q`) is extracted
/// with integer arithmetic and confirmed by raising it back to the `q`-th
/// power.
pub fn exact_pow(s: &Rational, t: &Rational) -> Result<Option<Rational>> {
    if !s.is_positive() {
        return Err(Error::domain(format!(
            "exact power needs s > 0, got {}",
            format_rational(s)
        )));
    }
    if t.is_zero() || s.is_one() {
        return Ok(Some(Rational::one()));
    }
    let Some(q) = t.denom().to_u32() else {
        return Ok(None);
    };
    let p = t.numer();
    let (Some(rn), Some(rd)) = (exact_root(s.numer(), q), exact_root(s.denom(), q)) else {
        return Ok(None);
    };
    let e = p
        .abs()
        .to_u32()
        .ok_or_else(|| Error::Overflow(format!("exponent {p} too large")))?;
    let base = Rational::new(rn, rd);
    let value = Pow::pow(&base, e);
    Ok(Some(if p.is_negative() { value.recip() } else { value }))
}
