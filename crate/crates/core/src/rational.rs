//! Exact rational helpers.
//!
//! [`Rational`] is an arbitrary-precision quotient kept in lowest terms with
//! the sign on the numerator; every endpoint, radius and certificate value in
//! this crate is one of these.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

use crate::error::Error;

/// `p/q` as a rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn half() -> Rational {
    rat(1, 2)
}

/// `2^e` for any signed exponent.
pub fn pow2(e: i64) -> Rational {
    let mag = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        Rational::from_integer(mag)
    } else {
        Rational::new(BigInt::one(), mag)
    }
}

/// `2^{-k}`.
pub fn tol(k: u32) -> Rational {
    pow2(-(k as i64))
}

pub fn clamp_unit(q: &Rational) -> Rational {
    if q.is_negative() {
        zero()
    } else if *q > one() {
        one()
    } else {
        q.clone()
    }
}

pub fn in_unit(q: &Rational) -> bool {
    !q.is_negative() && *q <= one()
}

/// Largest multiple of `2^{-k}` that is strictly below `bound`.
pub fn grid_floor_strict(bound: &Rational, k: u32) -> Rational {
    let scale = Rational::from_integer(BigInt::one() << k);
    let scaled = bound * &scale;
    let j = scaled.ceil().to_integer() - BigInt::one();
    Rational::new(j, BigInt::one() << k)
}

/// Canonical `p/q` wire form; integers print without a denominator.
pub fn fmt_rat(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p/q`, `-p/q` or an integer. Decimals are rejected.
pub fn parse_rat(text: &str) -> Result<Rational, Error> {
    let bad = || Error::BadRational(text.to_string());
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

pub fn min_rat(a: Rational, b: Rational) -> Rational {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max_rat(a: Rational, b: Rational) -> Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rat {
    use super::{fmt_rat, parse_rat, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rat(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::super::{fmt_rat, Rational};
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(qs.len()))?;
            for q in qs {
                seq.serialize_element(&fmt_rat(q))?;
            }
            seq.end()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        let q = rat(6, -8);
        assert_eq!(q.numer(), &BigInt::from(-3));
        assert_eq!(q.denom(), &BigInt::from(4));
        assert_eq!(fmt_rat(&q), "-3/4");
        assert_eq!(fmt_rat(&int(5)), "5");
    }

    #[test]
    fn parse_round_trip() {
        for text in ["0", "1", "1/3", "-7/2", "12/8"] {
            let q = parse_rat(text).unwrap();
            assert_eq!(parse_rat(&fmt_rat(&q)).unwrap(), q);
        }
        assert!(parse_rat("0.5").is_err());
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn grid_floor_is_strict() {
        assert_eq!(grid_floor_strict(&rat(1, 4), 6), rat(15, 64));
        assert_eq!(grid_floor_strict(&rat(3, 10), 2), rat(1, 4));
        assert_eq!(grid_floor_strict(&zero(), 3), rat(-1, 8));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-3), rat(1, 8));
        assert_eq!(tol(0), one());
    }
}
