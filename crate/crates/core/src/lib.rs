//! Growth, recurrence and ping-pong analysis for pseudogroups generated by
//! finitely generated subgroups of the projective group acting on the rational
//! projective line.
//!
//! Everything that decides a mathematical statement is exact: group elements
//! are canonical integer matrices, points are rationals or infinity, and open
//! sets are finite unions of arcs with rational endpoints. Floating point only
//! appears in the growth regression and in heuristic certificate search.

pub mod engine;
pub mod error;
pub mod growth;
pub mod moebius;
pub mod pingpong;
pub mod recurrence;
pub mod scenario;
mod text;

pub use error::{Error, ParseError, Result};
pub use moebius::{Arc, ArcSet, GroupElement, ProjPoint};
