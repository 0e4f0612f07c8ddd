//! Growth functions of germ covers and orbits, and the tools used to compare
//! them: regression-based classification, domination with explicit
//! constants, quasi-lattice comparison and generating-system distortion.

mod classify;
mod distortion;
mod domination;
mod doubling;
mod lattice;
mod series;

pub use classify::{classify_growth, ClassifierParams, GrowthKind, GrowthVerdict};
pub use distortion::{compare_generating_systems, Distortion};
pub use domination::{
    check_domination, search_domination, Constants, DominationGrid, DominationOutcome,
};
pub use doubling::sphere_doubling_check;
pub use lattice::{compare_quasi_lattices, LatticeRow, OrbitMetric, QuasiLatticeReport};
pub use series::GrowthSeries;
