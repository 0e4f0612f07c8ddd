use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::engine::{germ_ball, Caps, PseudogroupSpec};
use crate::error::Result;
use crate::moebius::ProjPoint;

/// Empirical distortion between the constrained word lengths of two
/// generating systems, over the elements both radius-`R` balls contain.
///
/// Every common element `g` satisfies `|g|_A ≤ λ·|g|_B`, `|g|_B ≤ λ·|g|_A`
/// and `||g|_A − |g|_B| ≤ additive`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distortion {
    #[serde(with = "crate::text")]
    pub lambda: Ratio<u32>,
    pub additive: u32,
    /// Elements present in both balls, the identity included.
    pub common: usize,
    /// The balls share nothing but the identity; `lambda` is then 1.
    pub only_identity: bool,
}

pub fn compare_generating_systems(
    spec_a: &PseudogroupSpec,
    spec_b: &PseudogroupSpec,
    x: &ProjPoint,
    radius: u32,
    caps: Caps,
) -> Result<Distortion> {
    let a = germ_ball(spec_a, x, radius, caps)?;
    let b = germ_ball(spec_b, x, radius, caps)?;
    let mut lambda = Ratio::from_integer(1u32);
    let mut additive = 0;
    let mut common = 0;
    for (g, ma) in a.members() {
        let Some(lb) = b.length(g) else { continue };
        let la = ma.length;
        common += 1;
        if la == 0 || lb == 0 {
            continue;
        }
        lambda = lambda.max(Ratio::new(la, lb)).max(Ratio::new(lb, la));
        additive = additive.max(la.abs_diff(lb));
    }
    Ok(Distortion {
        lambda,
        additive,
        common,
        only_identity: common <= 1,
    })
}
