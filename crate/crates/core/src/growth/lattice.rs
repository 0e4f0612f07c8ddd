//! Quasi-lattice comparison on a finite piece of an orbit.
//!
//! For two nets `A`, `A'` of the orbit piece (each within `C` of every orbit
//! point) with base points `p ∈ A`, `p' ∈ A'` at distance `δ`, checks
//! `|B(p, r) ∩ A| ≤ K_C · |B(p', (1+δ+C)·r) ∩ A'|`, where `K_C` bounds how
//! many points of `A` fit in a ball of radius `C`.

use std::collections::BTreeSet;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::engine::{orbit_ball, Caps, PseudogroupSpec};
use crate::error::{Error, Result};
use crate::moebius::ProjPoint;

/// Pairwise orbit distances on the orbit ball of radius `R` around a base
/// point.
#[derive(Clone, Debug)]
pub struct OrbitMetric {
    radius: u32,
    points: IndexMap<ProjPoint, ()>,
    dist: Vec<Vec<u32>>,
}

impl OrbitMetric {
    /// Every pair in the piece is within `2R`, so one orbit ball of radius
    /// `2R` per point yields the full distance table.
    pub fn compute(spec: &PseudogroupSpec, x: &ProjPoint, radius: u32, caps: Caps) -> Result<OrbitMetric> {
        let piece = orbit_ball(spec, x, radius, caps)?;
        let points: IndexMap<ProjPoint, ()> = piece.distances.keys().map(|p| (p.clone(), ())).collect();
        let mut dist = Vec::with_capacity(points.len());
        for p in points.keys() {
            let ball = orbit_ball(spec, p, 2 * radius, caps)?;
            let row = points
                .keys()
                .map(|q| {
                    *ball
                        .distances
                        .get(q)
                        .expect("points of the piece are within twice its radius")
                })
                .collect();
            dist.push(row);
        }
        Ok(OrbitMetric {
            radius,
            points,
            dist,
        })
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn base(&self) -> &ProjPoint {
        self.points.get_index(0).expect("piece contains its base").0
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &ProjPoint> {
        self.points.keys()
    }

    pub fn index_of(&self, p: &ProjPoint) -> Option<usize> {
        self.points.get_index_of(p)
    }

    pub fn distance(&self, i: usize, j: usize) -> u32 {
        self.dist[i][j]
    }

    /// Distance from the base point.
    pub fn depth(&self, i: usize) -> u32 {
        self.dist[0][i]
    }

    /// Number of `net` points within `r` of point `i`.
    fn count_within(&self, i: usize, net: &BTreeSet<usize>, r: u32) -> usize {
        net.iter().filter(|&&j| self.dist[i][j] <= r).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRow {
    pub radius: u32,
    pub lhs: usize,
    pub rhs_radius: u32,
    pub rhs: usize,
    /// The right-hand ball lies inside the piece, so its count is exact.
    pub rhs_complete: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiLatticeReport {
    pub c: u32,
    pub k_c: usize,
    pub delta: u32,
    pub base: ProjPoint,
    pub base_other: ProjPoint,
    pub rows: Vec<LatticeRow>,
    /// Radii skipped because the right-hand ball was truncated and the
    /// inequality could not be confirmed from a partial count.
    pub excluded: Vec<u32>,
    pub verified: bool,
}

fn resolve(metric: &OrbitMetric, net: &[ProjPoint], which: usize) -> Result<BTreeSet<usize>> {
    net.iter()
        .map(|p| {
            metric.index_of(p).ok_or_else(|| Error::NetOutsideOrbit {
                net: which,
                point: p.to_string(),
            })
        })
        .collect()
}

fn check_net(metric: &OrbitMetric, net: &BTreeSet<usize>, c: u32, which: usize) -> Result<()> {
    for i in 0..metric.len() {
        if !net.iter().any(|&j| metric.distance(i, j) <= c) {
            return Err(Error::NotACNet {
                net: which,
                c,
                point: metric.points.get_index(i).unwrap().0.to_string(),
            });
        }
    }
    Ok(())
}

/// Point of `net` nearest to `i`, ties broken by orbit order.
fn nearest(metric: &OrbitMetric, i: usize, net: &BTreeSet<usize>) -> usize {
    *net.iter()
        .min_by_key(|&&j| (metric.distance(i, j), j))
        .expect("nets are nonempty")
}

pub fn compare_quasi_lattices(
    metric: &OrbitMetric,
    net1: &[ProjPoint],
    net2: &[ProjPoint],
    c: u32,
) -> Result<QuasiLatticeReport> {
    let a = resolve(metric, net1, 1)?;
    let b = resolve(metric, net2, 2)?;
    check_net(metric, &a, c, 1)?;
    check_net(metric, &b, c, 2)?;

    let k_c = (0..metric.len())
        .map(|i| metric.count_within(i, &a, c))
        .max()
        .unwrap_or(0);
    let p = nearest(metric, 0, &a);
    let q = nearest(metric, p, &b);
    let delta = metric.distance(p, q);
    let big_r = metric.radius();
    let (dp, dq) = (metric.depth(p), metric.depth(q));

    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for r in 1..=big_r.saturating_sub(dp) {
        let lhs = metric.count_within(p, &a, r);
        let rhs_radius = (1 + delta + c) * r;
        let rhs = metric.count_within(q, &b, rhs_radius);
        let rhs_complete = dq + rhs_radius <= big_r;
        let holds = lhs <= k_c * rhs;
        if !holds && !rhs_complete {
            excluded.push(r);
            continue;
        }
        rows.push(LatticeRow {
            radius: r,
            lhs,
            rhs_radius,
            rhs,
            rhs_complete,
            holds,
        });
    }
    let verified = !rows.is_empty() && rows.iter().all(|row| row.holds);
    Ok(QuasiLatticeReport {
        c,
        k_c,
        delta,
        base: metric.points.get_index(p).unwrap().0.clone(),
        base_other: metric.points.get_index(q).unwrap().0.clone(),
        rows,
        excluded,
        verified,
    })
}

impl QuasiLatticeReport {
    /// Recounts every row from the raw distance table and re-derives the
    /// verdict; true iff it matches the stored report.
    pub fn recheck(&self, metric: &OrbitMetric, net1: &[ProjPoint], net2: &[ProjPoint]) -> bool {
        let (Ok(a), Ok(b)) = (resolve(metric, net1, 1), resolve(metric, net2, 2)) else {
            return false;
        };
        let (Some(p), Some(q)) = (metric.index_of(&self.base), metric.index_of(&self.base_other)) else {
            return false;
        };
        if !a.contains(&p) || !b.contains(&q) || metric.distance(p, q) != self.delta {
            return false;
        }
        let k_c = (0..metric.len())
            .map(|i| metric.count_within(i, &a, self.c))
            .max()
            .unwrap_or(0);
        if k_c != self.k_c {
            return false;
        }
        let rows_ok = self.rows.iter().all(|row| {
            let lhs = metric.count_within(p, &a, row.radius);
            let rhs = metric.count_within(q, &b, row.rhs_radius);
            row.rhs_radius == (1 + self.delta + self.c) * row.radius
                && lhs == row.lhs
                && rhs == row.rhs
                && (lhs <= k_c * rhs) == row.holds
        });
        let verified = !self.rows.is_empty() && self.rows.iter().all(|row| row.holds);
        rows_ok && verified == self.verified
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::GeneratingSystem;
    use crate::moebius::{ArcSet, GroupElement};

    fn rotation_metric(radius: u32) -> OrbitMetric {
        let gens = GeneratingSystem::new([("r", GroupElement::new(3, -4, 4, 3).unwrap())]).unwrap();
        let spec = PseudogroupSpec::new(gens, ArcSet::full(), None).unwrap();
        OrbitMetric::compute(&spec, &ProjPoint::zero(), radius, Caps::default()).unwrap()
    }

    fn by_depth(metric: &OrbitMetric, keep: impl Fn(u32, usize) -> bool) -> Vec<ProjPoint> {
        metric
            .points()
            .enumerate()
            .filter(|&(i, _)| keep(metric.depth(i), i))
            .map(|(_, p)| p.clone())
            .collect()
    }

    #[test]
    fn rotation_metric_is_word_metric_on_integers() {
        let metric = rotation_metric(5);
        assert_eq!(metric.len(), 11);
        for i in 0..metric.len() {
            for j in 0..metric.len() {
                let d = metric.distance(i, j);
                assert_eq!(d, metric.distance(j, i));
                assert_eq!(d == 0, i == j);
            }
        }
        let far: Vec<u32> = (0..11).map(|i| metric.depth(i)).collect();
        assert_eq!(far.iter().filter(|&&d| d == 5).count(), 2);
    }

    #[test]
    fn whole_orbit_with_zero_constant() {
        let metric = rotation_metric(6);
        let all: Vec<ProjPoint> = metric.points().cloned().collect();
        let report = compare_quasi_lattices(&metric, &all, &all, 0).unwrap();
        assert_eq!((report.k_c, report.delta), (1, 0));
        assert!(report.verified);
        assert!(report.rows.iter().all(|r| r.lhs == r.rhs));
        assert!(report.recheck(&metric, &all, &all));
    }

    #[test]
    fn even_net() {
        let metric = rotation_metric(8);
        let all: Vec<ProjPoint> = metric.points().cloned().collect();
        // word length from the base has the parity of the exponent
        let evens = by_depth(&metric, |d, _| d % 2 == 0);
        let report = compare_quasi_lattices(&metric, &all, &evens, 1).unwrap();
        assert_eq!(report.k_c, 3);
        assert!(report.verified);
        assert!(report.recheck(&metric, &all, &evens));
        let mut forged = report.clone();
        forged.rows[0].rhs += 1;
        assert!(!forged.recheck(&metric, &all, &evens));
    }

    #[test]
    fn sparse_subset_is_not_a_net() {
        let metric = rotation_metric(8);
        let all: Vec<ProjPoint> = metric.points().cloned().collect();
        let sparse = by_depth(&metric, |d, _| d % 4 == 0);
        assert!(matches!(
            compare_quasi_lattices(&metric, &all, &sparse, 1),
            Err(Error::NotACNet { net: 2, c: 1, .. })
        ));
        let stray = vec![ProjPoint::ratio(1, 7)];
        assert!(matches!(
            compare_quasi_lattices(&metric, &all, &stray, 1),
            Err(Error::NetOutsideOrbit { net: 2, .. })
        ));
    }
}
