//! Open arcs of the projective line and finite unions of them.
//!
//! Every set operation works on a common refinement: the sorted endpoints of
//! all operands cut the circle into finitely many points and open gaps, and
//! each operand is constant on every cell. Membership on a gap is decided at
//! one exact rational representative, so all results are exact.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::element::GroupElement;
use super::point::{ccw, Orientation, ProjPoint};
use crate::error::Error;

/// The open arc swept in the positive direction from `from` to `to`.
///
/// `from == to` is only produced by set operations and denotes the circle
/// with that single point removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    from: ProjPoint,
    to: ProjPoint,
}

impl Arc {
    pub fn new(from: ProjPoint, to: ProjPoint) -> Result<Arc, Error> {
        if from == to {
            return Err(Error::DegenerateArc(from.to_string()));
        }
        Ok(Arc { from, to })
    }

    /// The circle minus `p`.
    pub fn punctured(p: ProjPoint) -> Arc {
        Arc {
            from: p.clone(),
            to: p,
        }
    }

    pub fn from(&self) -> &ProjPoint {
        &self.from
    }

    pub fn to(&self) -> &ProjPoint {
        &self.to
    }

    pub fn is_punctured_circle(&self) -> bool {
        self.from == self.to
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        if *p == self.from || *p == self.to {
            return false;
        }
        self.is_punctured_circle() || ccw(&self.from, p, &self.to) == Orientation::Positive
    }

    pub fn image(&self, g: &GroupElement) -> Arc {
        Arc {
            from: g.act(&self.from),
            to: g.act(&self.to),
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.from, self.to)
    }
}

/// A finite union of open arcs in canonical form.
///
/// The stored arcs are the connected components of the set, sorted by their
/// `from` endpoint. Neighbouring components may share an endpoint, which is
/// then a puncture of the set. The full circle has no components and is
/// flagged separately, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcSet {
    full: bool,
    arcs: Vec<Arc>,
}

/// One cell of a refinement: a breakpoint or the open gap after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cell {
    Point(ProjPoint),
    /// Open gap between consecutive breakpoints; the whole circle when the
    /// refinement has no breakpoints.
    Gap {
        from: Option<ProjPoint>,
        to: Option<ProjPoint>,
        probe: ProjPoint,
    },
}

impl Cell {
    pub fn probe(&self) -> &ProjPoint {
        match self {
            Cell::Point(p) => p,
            Cell::Gap { probe, .. } => probe,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Point(p) => write!(f, "{{{p}}}"),
            Cell::Gap {
                from: Some(a),
                to: Some(b),
                ..
            } => write!(f, "({a}, {b})"),
            Cell::Gap { .. } => f.write_str("circle"),
        }
    }
}

/// Breakpoints shared by a family of sets, with one probe per gap.
pub(crate) struct Refinement {
    breaks: Vec<ProjPoint>,
    probes: Vec<ProjPoint>,
}

impl Refinement {
    pub(crate) fn of<'a>(sets: impl IntoIterator<Item = &'a ArcSet>) -> Refinement {
        let breaks = sets
            .into_iter()
            .flat_map(|s| s.arcs.iter().flat_map(|a| [a.from.clone(), a.to.clone()]))
            .collect();
        Refinement::with_breaks(breaks)
    }

    pub(crate) fn with_breaks(mut breaks: Vec<ProjPoint>) -> Refinement {
        breaks.sort();
        breaks.dedup();
        let n = breaks.len();
        let probes = match n {
            0 => vec![ProjPoint::zero()],
            1 => vec![if breaks[0].is_infinity() {
                ProjPoint::zero()
            } else {
                ProjPoint::Infinity
            }],
            _ => (0..n)
                .map(|i| gap_probe(&breaks[i], &breaks[(i + 1) % n]))
                .collect(),
        };
        Refinement { breaks, probes }
    }

    fn len(&self) -> usize {
        self.breaks.len()
    }

    /// Gap `i` follows breakpoint `i`; gap `i − 1` precedes it.
    fn prev_gap(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    pub(crate) fn cells(&self) -> Vec<Cell> {
        if self.breaks.is_empty() {
            return vec![Cell::Gap {
                from: None,
                to: None,
                probe: self.probes[0].clone(),
            }];
        }
        let n = self.len();
        let mut cells = Vec::with_capacity(2 * n);
        for i in 0..n {
            cells.push(Cell::Point(self.breaks[i].clone()));
            cells.push(Cell::Gap {
                from: Some(self.breaks[i].clone()),
                to: Some(self.breaks[(i + 1) % n].clone()),
                probe: self.probes[i].clone(),
            });
        }
        cells
    }

    fn gap_membership(&self, set: &ArcSet) -> Vec<bool> {
        self.probes.iter().map(|p| set.contains(p)).collect()
    }

    fn point_membership(&self, set: &ArcSet) -> Vec<bool> {
        self.breaks.iter().map(|p| set.contains(p)).collect()
    }

    /// Whether each cell lies in the closure of `set`.
    fn closure_flags(&self, set: &ArcSet) -> (Vec<bool>, Vec<bool>) {
        let gaps = self.gap_membership(set);
        let points = (0..self.len())
            .map(|i| gaps[i] || gaps[self.prev_gap(i)] || set.contains(&self.breaks[i]))
            .collect();
        (points, gaps)
    }

    /// Assembles the open set whose gaps and breakpoints are flagged.
    fn assemble(&self, points: &[bool], gaps: &[bool]) -> ArcSet {
        let n = self.len();
        if n == 0 {
            return if gaps[0] { ArcSet::full() } else { ArcSet::empty() };
        }
        let excluded: Vec<usize> = (0..n).filter(|&i| !points[i]).collect();
        if excluded.is_empty() {
            debug_assert!(gaps.iter().all(|&g| g));
            return ArcSet::full();
        }
        let mut arcs = Vec::new();
        for &start in &excluded {
            if !gaps[start] {
                continue;
            }
            let mut j = (start + 1) % n;
            while points[j] {
                debug_assert!(gaps[j]);
                j = (j + 1) % n;
            }
            arcs.push(Arc {
                from: self.breaks[start].clone(),
                to: self.breaks[j].clone(),
            });
        }
        ArcSet::from_components(arcs)
    }
}

/// An exact rational strictly inside the gap `(u, v)` of the cyclic order.
fn gap_probe(u: &ProjPoint, v: &ProjPoint) -> ProjPoint {
    let one = || BigRational::one();
    match (u, v) {
        (ProjPoint::Finite(a), ProjPoint::Infinity) => ProjPoint::Finite(a + one()),
        (ProjPoint::Infinity, ProjPoint::Finite(b)) => ProjPoint::Finite(b - one()),
        (ProjPoint::Finite(a), ProjPoint::Finite(b)) if a < b => {
            ProjPoint::Finite((a + b) / BigRational::from_integer(BigInt::from(2)))
        }
        // wraps through infinity
        _ => ProjPoint::Infinity,
    }
}

impl ArcSet {
    pub fn empty() -> ArcSet {
        ArcSet {
            full: false,
            arcs: Vec::new(),
        }
    }

    pub fn full() -> ArcSet {
        ArcSet {
            full: true,
            arcs: Vec::new(),
        }
    }

    pub fn arc(arc: Arc) -> ArcSet {
        ArcSet::from_components(vec![arc])
    }

    /// Convenience for `ArcSet::arc(Arc::new(from, to)?)`.
    pub fn between(from: ProjPoint, to: ProjPoint) -> Result<ArcSet, Error> {
        Ok(ArcSet::arc(Arc::new(from, to)?))
    }

    /// The union of arbitrary (possibly overlapping) arcs.
    pub fn from_arcs(arcs: impl IntoIterator<Item = Arc>) -> ArcSet {
        arcs.into_iter()
            .fold(ArcSet::empty(), |acc, a| acc.union(&ArcSet::arc(a)))
    }

    /// `arcs` must already be pairwise disjoint components.
    fn from_components(mut arcs: Vec<Arc>) -> ArcSet {
        arcs.sort();
        ArcSet { full: false, arcs }
    }

    pub fn is_empty(&self) -> bool {
        !self.full && self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Endpoints of the components; none of them belong to the set.
    pub fn boundary(&self) -> Vec<ProjPoint> {
        let mut pts: Vec<ProjPoint> = self
            .arcs
            .iter()
            .flat_map(|a| [a.from.clone(), a.to.clone()])
            .collect();
        pts.sort();
        pts.dedup();
        pts
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.full || self.arcs.iter().any(|a| a.contains(p))
    }

    /// `p` lies in the closure of the set.
    pub fn closure_contains(&self, p: &ProjPoint) -> bool {
        self.contains(p) || self.arcs.iter().any(|a| a.from == *p || a.to == *p)
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        self.combine(other, |a, b| a && b)
    }

    /// Interior of `self ∖ other`, that is `self ∖ closure(other)`.
    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        self.intersect(&other.complement().interior)
    }

    fn combine(&self, other: &ArcSet, op: impl Fn(bool, bool) -> bool) -> ArcSet {
        if self.is_full() && other.is_full() || self.is_empty() && other.is_empty() {
            return ArcSet {
                full: op(self.full, other.full),
                arcs: Vec::new(),
            };
        }
        let r = Refinement::of([self, other]);
        let (pa, ga) = (r.point_membership(self), r.gap_membership(self));
        let (pb, gb) = (r.point_membership(other), r.gap_membership(other));
        let points: Vec<bool> = pa.iter().zip(&pb).map(|(&a, &b)| op(a, b)).collect();
        let gaps: Vec<bool> = ga.iter().zip(&gb).map(|(&a, &b)| op(a, b)).collect();
        r.assemble(&points, &gaps)
    }

    /// The closed complement, as its interior plus the boundary points.
    pub fn complement(&self) -> Complement {
        let r = Refinement::of([self]);
        let gaps: Vec<bool> = r.gap_membership(self).iter().map(|g| !g).collect();
        let points: Vec<bool> = if r.len() == 0 {
            Vec::new()
        } else {
            (0..r.len())
                .map(|i| gaps[i] && gaps[r.prev_gap(i)])
                .collect()
        };
        Complement {
            interior: r.assemble(&points, &gaps),
            points: self.boundary(),
        }
    }

    /// `other ⊆ self`.
    pub fn covers(&self, other: &ArcSet) -> bool {
        if self.full || other.is_empty() {
            return true;
        }
        let r = Refinement::of([self, other]);
        r.cells()
            .iter()
            .all(|c| !other.contains(c.probe()) || self.contains(c.probe()))
    }

    /// `closure(other) ⊆ self`.
    pub fn covers_closure(&self, other: &ArcSet) -> bool {
        self.covers(other) && other.boundary().iter().all(|p| self.contains(p))
    }

    /// The first cell of `closure(other)` (or of `other` when `closed` is
    /// false) that `self` misses.
    pub fn first_uncovered(&self, other: &ArcSet, closed: bool) -> Option<Cell> {
        other
            .cells_within(&[self], closed)
            .into_iter()
            .find(|cell| !self.contains(cell.probe()))
    }

    /// Cells of the common refinement with `others` that lie in the closure of
    /// `self` (or in `self` itself when `closed` is false).
    pub fn cells_within(&self, others: &[&ArcSet], closed: bool) -> Vec<Cell> {
        let r = Refinement::of(std::iter::once(self).chain(others.iter().copied()));
        let (cp, cg) = r.closure_flags(self);
        r.cells()
            .into_iter()
            .enumerate()
            .filter(|(k, cell)| match cell {
                Cell::Gap { .. } if r.len() == 0 => self.is_full(),
                Cell::Gap { .. } => cg[k / 2],
                Cell::Point(p) if closed => cp[k / 2] || self.contains(p),
                Cell::Point(p) => self.contains(p),
            })
            .map(|(_, cell)| cell)
            .collect()
    }

    /// `closure(self) ∩ closure(other) = ∅`.
    pub fn closures_disjoint(&self, other: &ArcSet) -> bool {
        if self.is_empty() || other.is_empty() {
            return true;
        }
        if self.full || other.full {
            return false;
        }
        let r = Refinement::of([self, other]);
        let (pa, ga) = r.closure_flags(self);
        let (pb, gb) = r.closure_flags(other);
        !(pa.iter().zip(&pb).any(|(&a, &b)| a && b) || ga.iter().zip(&gb).any(|(&a, &b)| a && b))
    }

    /// The exact image `g·A`. Positive determinant preserves the cyclic
    /// order, so components map to components.
    pub fn image(&self, g: &GroupElement) -> ArcSet {
        if self.full || self.arcs.is_empty() {
            return self.clone();
        }
        ArcSet::from_components(self.arcs.iter().map(|a| a.image(g)).collect())
    }

    /// `g⁻¹·A`.
    pub fn preimage(&self, g: &GroupElement) -> ArcSet {
        self.image(&g.invert())
    }
}

/// Closed complement of an [`ArcSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complement {
    pub interior: ArcSet,
    pub points: Vec<ProjPoint>,
}

impl Complement {
    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.interior.contains(p) || self.points.contains(p)
    }
}

/// Exact decision that a union of open sets plus finitely many points is the
/// whole circle.
pub fn covers_circle(sets: &[&ArcSet], points: &[ProjPoint]) -> bool {
    let mut breaks: Vec<ProjPoint> = points.to_vec();
    for s in sets {
        breaks.extend(s.boundary());
    }
    let r = Refinement::with_breaks(breaks);
    r.cells().iter().all(|c| {
        let p = c.probe();
        sets.iter().any(|s| s.contains(p)) || matches!(c, Cell::Point(q) if points.contains(q))
    })
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.full {
            return f.write_str("full");
        }
        if self.arcs.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self.arcs.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(" ∪ "))
    }
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// Serialized as "full", "empty", or a list of [from, to] endpoint pairs.
impl Serialize for ArcSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.full {
            return serializer.serialize_str("full");
        }
        let mut seq = serializer.serialize_seq(Some(self.arcs.len()))?;
        for a in &self.arcs {
            seq.serialize_element(&[&a.from, &a.to])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ArcSetVisitor;

        impl<'de> Visitor<'de> for ArcSetVisitor {
            type Value = ArcSet;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("\"full\", \"empty\" or a list of [from, to] endpoint pairs")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<ArcSet, E> {
                match v.trim() {
                    "full" => Ok(ArcSet::full()),
                    "empty" => Ok(ArcSet::empty()),
                    other => Err(E::custom(format!("unknown arc set `{other}`"))),
                }
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<ArcSet, A::Error> {
                let mut arcs = Vec::new();
                while let Some([from, to]) = seq.next_element::<[ProjPoint; 2]>()? {
                    if from == to {
                        arcs.push(Arc::punctured(from));
                    } else {
                        arcs.push(Arc { from, to });
                    }
                }
                Ok(ArcSet::from_arcs(arcs))
            }
        }

        deserializer.deserialize_any(ArcSetVisitor)
    }
}
