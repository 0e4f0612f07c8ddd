use crate::engine::{GermBall, PseudogroupSpec};
use crate::error::{Error, Result};
use crate::pingpong::PingPongCertificate;
use crate::recurrence::PairCoverage;

/// Checks `s(n+1) ≥ 2·s(n)` for `n < radius` and `s(n) ≥ 2^n` for
/// `n ≤ radius` on the sphere sizes of `ball`.
///
/// Both preconditions are re-verified here: `certificate` must pass exact
/// verification with elements drawn from `spec`'s generators, and
/// `coverage` must report full pair coverage.
pub fn sphere_doubling_check(
    ball: &GermBall,
    spec: &PseudogroupSpec,
    certificate: &PingPongCertificate,
    coverage: &PairCoverage,
) -> Result<bool> {
    if let Err(failure) = certificate.verify() {
        return Err(Error::NotCertified(format!("ping-pong certificate: {failure}")));
    }
    if let Some(g) = certificate
        .elements
        .iter()
        .find(|g| spec.generators().position(g).is_none())
    {
        return Err(Error::NotCertified(format!(
            "certificate element {g} is not a generator"
        )));
    }
    if !coverage.covered {
        let at = coverage
            .uncovered
            .as_ref()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "unknown cell".into());
        return Err(Error::NotCertified(format!("pair coverage fails at {at}")));
    }
    Ok(doubles(ball.sphere_sizes()))
}

fn doubles(spheres: &[usize]) -> bool {
    let pairs_double = spheres.windows(2).all(|w| w[1] >= 2 * w[0]);
    let powers = spheres
        .iter()
        .enumerate()
        .all(|(n, &s)| n >= usize::BITS as usize - 1 || s >= 1usize << n);
    pairs_double && powers
}
