//! Exact arithmetic for the orientation-preserving projective group over ℚ
//! acting on the rational projective line.

mod arc;
mod element;
mod point;

pub use arc::{covers_circle, Arc, ArcSet, Cell, Complement};
pub use element::GroupElement;
pub use point::{ccw, Orientation, ProjPoint};
