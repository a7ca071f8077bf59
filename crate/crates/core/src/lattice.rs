//! Integer lattice vectors in Zⁿ.

use std::fmt;
use std::ops::{Add, Deref, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GkzError, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zero(n: usize) -> Self {
        LatticeVector(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        LatticeVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn dot(&self, other: &[i64]) -> i64 {
        debug_assert_eq!(self.0.len(), other.len());
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        LatticeVector(self.0.iter().map(|x| x * k).collect())
    }

    /// Comma-joined coordinates, the key format used in JSON maps.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_key(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(LatticeVector(Vec::new()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| GkzError::InvalidInput(format!("bad exponent key `{s}`")))
            })
            .collect::<Result<Vec<_>>>()
            .map(LatticeVector)
    }
}

impl Deref for LatticeVector {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

impl From<&[i64]> for LatticeVector {
    fn from(v: &[i64]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl<const K: usize> From<[i64; K]> for LatticeVector {
    fn from(v: [i64; K]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl Add for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        LatticeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// All integer points of the box `lo[i] <= x[i] <= hi[i]`, in lexicographic order.
pub fn box_points(lo: &[i64], hi: &[i64]) -> impl Iterator<Item = LatticeVector> {
    let lo = lo.to_vec();
    let hi = hi.to_vec();
    let empty = lo.iter().zip(&hi).any(|(l, h)| l > h);
    let mut cur = if empty { None } else { Some(lo.clone()) };
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                cur = None;
                break;
            }
            i -= 1;
            if next[i] < hi[i] {
                next[i] += 1;
                cur = Some(next);
                break;
            }
            next[i] = lo[i];
        }
        Some(LatticeVector(out))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_round_trip() {
        let v = LatticeVector::from([1, -2, 0]);
        assert_eq!(v.key(), "1,-2,0");
        assert_eq!(LatticeVector::parse_key("1,-2,0").unwrap(), v);
    }

    #[test]
    fn box_enumeration() {
        let pts: Vec<_> = box_points(&[0, -1], &[1, 0]).collect();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0], LatticeVector::from([0, -1]));
        assert_eq!(pts[3], LatticeVector::from([1, 0]));
        assert_eq!(box_points(&[1], &[0]).count(), 0);
        assert_eq!(box_points(&[], &[]).count(), 1);
    }
}
