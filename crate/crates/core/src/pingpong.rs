//! Semigroup ping-pong certificates.
//!
//! Elements `t_1..t_k` with nonempty tables `A_1..A_k` whose closures are
//! pairwise disjoint and with `t_i·A_j ⊆ A_i` for all `i, j` freely generate a
//! free semigroup: a positive word ending in `t_i` sends any table into `A_i`,
//! so two distinct words can be told apart by their last letters.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{Arc, ArcSet, GroupElement, ProjPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PingPongCertificate {
    pub elements: Vec<GroupElement>,
    pub tables: Vec<ArcSet>,
}

/// Why a certificate was rejected. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "kebab-case")]
pub enum PingPongFailure {
    TooFewElements { k: usize },
    TableCountMismatch { elements: usize, tables: usize },
    EmptyTable { i: usize },
    ClosuresMeet { i: usize, j: usize },
    /// `t_i·A_j ⊄ A_i`.
    Escapes { i: usize, j: usize },
}

impl fmt::Display for PingPongFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PingPongFailure::TooFewElements { k } => write!(f, "need at least 2 elements, got {k}"),
            PingPongFailure::TableCountMismatch { elements, tables } => {
                write!(f, "{elements} elements but {tables} tables")
            }
            PingPongFailure::EmptyTable { i } => write!(f, "table {i} is empty"),
            PingPongFailure::ClosuresMeet { i, j } => {
                write!(f, "closures of tables {i} and {j} meet")
            }
            PingPongFailure::Escapes { i, j } => {
                write!(f, "element {i} does not map table {j} into table {i}")
            }
        }
    }
}

impl PingPongCertificate {
    /// Exact check of the ping-pong conditions.
    pub fn verify(&self) -> std::result::Result<(), PingPongFailure> {
        let k = self.elements.len();
        if k < 2 {
            return Err(PingPongFailure::TooFewElements { k });
        }
        if self.tables.len() != k {
            return Err(PingPongFailure::TableCountMismatch {
                elements: k,
                tables: self.tables.len(),
            });
        }
        if let Some(i) = self.tables.iter().position(|a| a.is_empty()) {
            return Err(PingPongFailure::EmptyTable { i });
        }
        for i in 0..k {
            for j in i + 1..k {
                if !self.tables[i].closures_disjoint(&self.tables[j]) {
                    return Err(PingPongFailure::ClosuresMeet { i, j });
                }
            }
        }
        for (i, t) in self.elements.iter().enumerate() {
            for (j, table) in self.tables.iter().enumerate() {
                if !self.tables[i].covers(&table.image(t)) {
                    return Err(PingPongFailure::Escapes { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.verify().is_ok()
    }
}

/// Knobs for [`search_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchParams {
    /// Largest power `m` tried for the elements.
    pub max_power: u32,
    /// Table half-widths tried, as angles on the circle of lines.
    pub half_widths: Vec<f64>,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            max_power: 8,
            half_widths: (2..=10).map(|e| PI / f64::from(1u32 << e)).collect(),
        }
    }
}

/// Angle of the line through `(x, y)` in `(−π/2, π/2]`; slope `t` has angle
/// `atan(t)` and infinity has `π/2`.
fn line_angle(x: f64, y: f64) -> f64 {
    let mut theta = x.atan2(y);
    while theta <= -PI / 2.0 {
        theta += PI;
    }
    while theta > PI / 2.0 {
        theta -= PI;
    }
    theta
}

/// Approximate attracting fixed point of `g` as an angle, if `g` is
/// hyperbolic or parabolic.
pub fn attracting_angle(g: &GroupElement) -> Option<f64> {
    let [a, b, c, d] = g.entries().clone().map(|e| e.to_f64().unwrap_or(f64::NAN));
    let scale = [a, b, c, d].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    if !disc.is_finite() || disc < 0.0 {
        return None;
    }
    let lambda = (tr + tr.signum() * disc.sqrt()) / 2.0;
    // eigenvector of the dominant eigenvalue
    let (x, y) = if (lambda - a).abs() + b.abs() > (lambda - d).abs() + c.abs() {
        (b, lambda - a)
    } else {
        (lambda - d, c)
    };
    Some(line_angle(x, y))
}

/// Rational point at angle `theta`, rounded to a multiple of `resolution`.
fn point_at(theta: f64, resolution: &BigRational) -> Option<ProjPoint> {
    let theta = line_angle(theta.sin(), theta.cos());
    if (theta - PI / 2.0).abs() < 1e-12 {
        return Some(ProjPoint::Infinity);
    }
    let t = theta.tan();
    let step = resolution.to_f64()?;
    let k = (t / step).round();
    if !k.is_finite() || k.abs() > 1e15 {
        return Some(ProjPoint::Infinity);
    }
    let k = BigInt::from(k as i64);
    Some(ProjPoint::Finite(resolution * BigRational::from_integer(k)))
}

/// Heuristic search for tables around the attracting fixed points of powers of
/// `elements`. Only exactly verified certificates are returned.
///
/// Candidates are tried in order of increasing power, then decreasing width;
/// the first verified one wins.
pub fn search_certificate(
    elements: &[GroupElement],
    resolution: &BigRational,
    params: &SearchParams,
) -> Result<Option<PingPongCertificate>> {
    if elements.len() < 2 {
        return Err(Error::TooFewElements(elements.len()));
    }
    assert!(resolution.is_positive(), "resolution must be positive");
    let Some(angles) = elements.iter().map(attracting_angle).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    for m in 1..=params.max_power {
        let powered: Vec<GroupElement> = elements.iter().map(|g| g.pow(i64::from(m))).collect();
        for &w in &params.half_widths {
            let tables: Option<Vec<ArcSet>> = angles
                .iter()
                .map(|&theta| {
                    let from = point_at(theta - w, resolution)?;
                    let to = point_at(theta + w, resolution)?;
                    Arc::new(from, to).ok().map(ArcSet::arc)
                })
                .collect();
            let Some(tables) = tables else { continue };
            let cert = PingPongCertificate {
                elements: powered.clone(),
                tables,
            };
            if cert.is_valid() {
                return Ok(Some(cert));
            }
        }
    }
    Ok(None)
}
