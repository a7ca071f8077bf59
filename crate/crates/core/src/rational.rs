//! Exact rational scalars and their string encoding.
//!
//! Every rational crossing a serialization boundary is written as `"p/q"`
//! (or `"p"` when integral) and parsed back from the same forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GkzError, Result};

pub type Q = BigRational;

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn parse(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || GkzError::BadRational(s.to_string());
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = n.parse().map_err(|_| bad())?;
    let den: BigInt = d.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

pub fn format(x: &Q) -> String {
    x.to_string()
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Sign of a rational as -1, 0 or 1.
pub fn signum(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Converts an integral rational to `i64`; panics if it is not integral or
/// out of range, which callers rule out beforehand.
pub fn to_i64(x: &Q) -> i64 {
    assert!(is_integer(x), "expected an integral rational, got {x}");
    i64::try_from(x.numer()).expect("integer fits in i64")
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        format(x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_vec {
    use super::*;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        xs.iter().map(format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub mod serde_q_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        m.iter()
            .map(|row| row.iter().map(format).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|row| {
                row.iter()
                    .map(|s| parse(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -4 ").unwrap(), int(-4));
        assert_eq!(parse("0/5").unwrap(), int(0));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
        assert!(parse("1.5").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format(&ratio(-2, 4)), "-1/2");
        assert_eq!(format(&int(7)), "7");
    }
}
