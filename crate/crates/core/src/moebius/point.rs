//! Points of the rational projective line in the slope chart.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// A point `t ∈ ℚ ∪ {∞}` of the projective line.
///
/// The derived `Ord` is the fixed total order used throughout the crate:
/// rationals by value, with `Infinity` above every rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(BigRational),
    Infinity,
}

/// Cyclic orientation of an ordered triple of points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Positive,
    Negative,
    Degenerate,
}

impl Orientation {
    pub fn reversed(self) -> Orientation {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
            Orientation::Degenerate => Orientation::Degenerate,
        }
    }
}

impl ProjPoint {
    pub fn zero() -> ProjPoint {
        ProjPoint::Finite(BigRational::zero())
    }

    pub fn integer(n: i64) -> ProjPoint {
        ProjPoint::Finite(BigRational::from_integer(n.into()))
    }

    /// `numer / denom`; a zero denominator gives `Infinity`.
    pub fn ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> ProjPoint {
        ProjPoint::from_homogeneous(numer.into(), denom.into())
    }

    /// The point with homogeneous coordinates `(p : q)`. Panics on `(0 : 0)`.
    pub fn from_homogeneous(p: BigInt, q: BigInt) -> ProjPoint {
        if q.is_zero() {
            assert!(!p.is_zero(), "(0 : 0) is not a projective point");
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(BigRational::new(p, q))
        }
    }

    /// Homogeneous coordinates `(p : q)` with `q ≥ 0`; `Infinity` is `(1 : 0)`.
    pub fn homogeneous(&self) -> (BigInt, BigInt) {
        match self {
            ProjPoint::Finite(r) => (r.numer().clone(), r.denom().clone()),
            ProjPoint::Infinity => (BigInt::one(), BigInt::zero()),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ProjPoint::Finite(r) => Some(r),
            ProjPoint::Infinity => None,
        }
    }

    /// Floating approximation, `+∞` for `Infinity`. Only used by heuristics.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            ProjPoint::Finite(r) => r.to_f64().unwrap_or_else(|| {
                if r.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
            ProjPoint::Infinity => f64::INFINITY,
        }
    }
}

/// Orientation of `(p, q, r)` in the positive cyclic order of the line.
///
/// `Degenerate` iff two of the points coincide. Otherwise `Positive` iff the
/// triple is a cyclic rotation of an increasing triple.
pub fn ccw(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Orientation {
    if p == q || q == r || r == p {
        return Orientation::Degenerate;
    }
    let increasing = |a: &ProjPoint, b: &ProjPoint, c: &ProjPoint| a < b && b < c;
    if increasing(p, q, r) || increasing(q, r, p) || increasing(r, p, q) {
        Orientation::Positive
    } else {
        Orientation::Negative
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Infinity => f.write_str("inf"),
            ProjPoint::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            ProjPoint::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for ProjPoint {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(ProjPoint::Infinity);
        }
        let bad = || ParseError::Point(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (
                p.trim().parse::<BigInt>().map_err(|_| bad())?,
                q.trim().parse::<BigInt>().map_err(|_| bad())?,
            ),
            None => (s.parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
        };
        if q.is_zero() {
            return Err(bad());
        }
        Ok(ProjPoint::Finite(BigRational::new(p, q)))
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
