//! Helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Renders `n` for integers and `n/d` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `12`, `-3/4`, `0.9` or `1.25` into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let s = text.trim();
    let bad = || Error::usage(format!("invalid rational number `{text}`"));
    if s.is_empty() {
        return Err(bad());
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, s),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::usage(format!("zero denominator in `{text}`")));
        }
        Rat::new(n, d)
    } else if let Some((ip, fp)) = body.split_once('.') {
        if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let ip: BigInt = if ip.is_empty() {
            BigInt::zero()
        } else {
            ip.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let fp: BigInt = fp.parse().map_err(|_| bad())?;
        Rat::new(ip * &scale + fp, scale)
    } else {
        if !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        Rat::from_integer(body.parse().map_err(|_| bad())?)
    };
    Ok(if neg { -value } else { value })
}

pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

/// Integer vector scaled from rationals by the lcm of their denominators.
pub(crate) fn scale_to_integers(values: &[Rat]) -> Vec<BigInt> {
    let l = lcm_of_denominators(values);
    values
        .iter()
        .map(|r| (r * Rat::from_integer(l.clone())).to_integer())
        .collect()
}

pub(crate) fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}
