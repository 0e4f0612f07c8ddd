use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::ProjPoint;
use crate::error::{Error, ParseError};

/// An element of the projective group over ℚ with positive determinant,
/// stored as the canonical integer matrix `(a b; c d)`.
///
/// Canonical form: `ad − bc > 0`, `gcd(a, b, c, d) = 1`, and the first nonzero
/// entry in the order `a, b, c, d` is positive. Two matrices represent the same
/// projective transformation iff their canonical forms are equal, so the
/// derived `Eq`/`Hash` are the group equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    entries: [BigInt; 4],
}

impl GroupElement {
    /// Normalizes `(a b; c d)`. Fails unless the determinant is positive.
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<GroupElement, Error> {
        let entries = [a.into(), b.into(), c.into(), d.into()];
        let det = &entries[0] * &entries[3] - &entries[1] * &entries[2];
        if !det.is_positive() {
            return Err(Error::NonPositiveDeterminant);
        }
        Ok(GroupElement::normalized(entries))
    }

    pub fn identity() -> GroupElement {
        GroupElement {
            entries: [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()],
        }
    }

    /// Assumes a positive determinant.
    fn normalized(mut entries: [BigInt; 4]) -> GroupElement {
        let content = entries
            .iter()
            .fold(BigInt::zero(), |g, e| g.gcd(e));
        if !content.is_one() {
            for e in entries.iter_mut() {
                *e /= &content;
            }
        }
        let leading_negative = entries
            .iter()
            .find(|e| !e.is_zero())
            .map_or(false, |e| e.is_negative());
        if leading_negative {
            for e in entries.iter_mut() {
                *e = -std::mem::take(e);
            }
        }
        GroupElement { entries }
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.entries
    }

    pub fn determinant(&self) -> BigInt {
        let [a, b, c, d] = &self.entries;
        a * d - b * c
    }

    pub fn is_identity(&self) -> bool {
        *self == GroupElement::identity()
    }

    /// The product `self · other` (apply `other` first).
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let [a, b, c, d] = &self.entries;
        let [e, f, g, h] = &other.entries;
        GroupElement::normalized([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    /// Inverse via the adjugate `(d −b; −c a)`.
    pub fn invert(&self) -> GroupElement {
        let [a, b, c, d] = &self.entries;
        GroupElement::normalized([d.clone(), -b, -c, a.clone()])
    }

    pub fn pow(&self, n: i64) -> GroupElement {
        let base = if n < 0 { self.invert() } else { self.clone() };
        let mut result = GroupElement::identity();
        for _ in 0..n.unsigned_abs() {
            result = base.compose(&result);
        }
        result
    }

    /// The slope transform `t ↦ (a·t + b)/(c·t + d)`.
    pub fn act(&self, p: &ProjPoint) -> ProjPoint {
        let [a, b, c, d] = &self.entries;
        let (x, y) = p.homogeneous();
        ProjPoint::from_homogeneous(a * &x + b * &y, c * &x + d * &y)
    }

    pub fn trace(&self) -> BigInt {
        &self.entries[0] + &self.entries[3]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "{a} {b} {c} {d}")
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.entries;
        write!(f, "({a} {b}; {c} {d})")
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::Parse(ParseError::Element(s.to_string()));
        let parts: Vec<BigInt> = s
            .split_whitespace()
            .map(|t| t.parse::<BigInt>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [a, b, c, d]: [BigInt; 4] = parts.try_into().map_err(|_| bad())?;
        GroupElement::new(a, b, c, d)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    #[test]
    fn compose_examples() {
        let r = m(3, -4, 4, 3);
        assert_eq!(GroupElement::identity().compose(&r), r);
        assert!(r.compose(&r.invert()).is_identity());
        // (3 −4; 4 3)² = (−7 −24; 24 −7) → sign flip
        assert_eq!(r.compose(&r), m(7, 24, -24, 7));
        assert_eq!(r.compose(&r).entries()[0], BigInt::from(7));
    }

    #[test]
    fn invert_examples() {
        assert!(GroupElement::identity().invert().is_identity());
        assert_eq!(m(1, 1, 0, 1).invert(), m(1, -1, 0, 1));
        assert_eq!(m(2, 0, 0, 1).invert(), m(1, 0, 0, 2));
    }

    #[test]
    fn normalization() {
        assert_eq!(m(2, 4, 0, 2), m(1, 2, 0, 1));
        assert_eq!(m(-1, 0, 0, -1), GroupElement::identity());
        assert_eq!(m(0, -1, 1, 0).to_string(), "0 1 -1 0");
        assert_eq!(
            GroupElement::new(0, 1, 1, 0),
            Err(Error::NonPositiveDeterminant)
        );
        assert_eq!(
            GroupElement::new(1, 2, 2, 4),
            Err(Error::NonPositiveDeterminant)
        );
    }

    #[test]
    fn act_examples() {
        let p = |s: &str| s.parse::<ProjPoint>().unwrap();
        assert_eq!(GroupElement::identity().act(&p("5/7")), p("5/7"));
        assert_eq!(m(1, 1, 0, 1).act(&p("0")), p("1"));
        assert_eq!(m(0, -1, 1, 0).act(&p("inf")), p("0"));
        assert_eq!(m(0, -1, 1, 0).act(&p("0")), p("inf"));
        assert_eq!(m(1, 1, 0, 1).act(&p("inf")), p("inf"));
        // pole of t ↦ (2t + 1)/(t + 3) is −3
        assert_eq!(m(2, 1, 1, 3).act(&p("-3")), p("inf"));
        assert_eq!(m(2, 1, 1, 3).act(&p("inf")), p("2"));
    }

    #[test]
    fn parse_round_trip() {
        let g: GroupElement = "4 -6 2 -2".parse().unwrap();
        assert_eq!(g, m(2, -3, 1, -1));
        assert_eq!(g.to_string().parse::<GroupElement>().unwrap(), g);
        assert!("1 2 3".parse::<GroupElement>().is_err());
    }

    #[test]
    fn powers() {
        let t = m(1, 1, 0, 1);
        assert_eq!(t.pow(4), m(1, 4, 0, 1));
        assert_eq!(t.pow(-3), m(1, -3, 0, 1));
        assert!(t.pow(0).is_identity());
    }
}
