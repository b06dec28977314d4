//! Exact rationals and their `"num/den"` string form.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rational used throughout the crate.
pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguint(n: &BigUint) -> Q {
    Q::from_integer(BigInt::from(n.clone()))
}

/// Renders `q` in lowest terms as `"num/den"`; integers keep the `/1`.
pub fn to_string(q: &Q) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse(text: &str) -> Option<Q> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => BigInt::from_str(text).ok().map(Q::from_integer),
    }
}

/// `q^e` for a signed exponent; `q` must be nonzero when `e < 0`.
pub fn pow(q: &Q, e: i64) -> Q {
    let mut acc = Q::one();
    let base = if e < 0 { q.recip() } else { q.clone() };
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

pub fn is_nonnegative(q: &Q) -> bool {
    !q.is_negative()
}

/// Serde adapter storing a rational as its `"num/den"` string.
pub mod serde_q {
    use super::Q;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
    }
}

/// Serializes big naturals as decimal strings.
pub mod serde_uint {
    use num_bigint::BigUint;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }
}
