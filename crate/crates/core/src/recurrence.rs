//! Exact coverage checks: recurrence of a generating system, coverage by the
//! translates `γ·V` with finitely many `γ` removed, and coverage by pairwise
//! intersections of translates.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::engine::{Caps, GermSearch, PseudogroupSpec};
use crate::error::{Error, Result};
use crate::moebius::{ArcSet, Cell, GroupElement, ProjPoint};

/// A composite of generators restricted to where it is defined inside `U`.
///
/// `domain = {x ∈ U : every prefix of the word keeps x in U}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordDomain {
    /// Generator indices in application order.
    pub word: Vec<usize>,
    pub product: GroupElement,
    pub domain: ArcSet,
}

impl WordDomain {
    pub fn empty_word(spec: &PseudogroupSpec) -> WordDomain {
        WordDomain {
            word: Vec::new(),
            product: GroupElement::identity(),
            domain: spec.u().clone(),
        }
    }

    /// Appends generator `s` (applied after the current word).
    pub fn extend(&self, spec: &PseudogroupSpec, s: usize) -> WordDomain {
        let product = spec.generators().element(s).compose(&self.product);
        let domain = self.domain.intersect(&spec.u().preimage(&product));
        let mut word = self.word.clone();
        word.push(s);
        WordDomain {
            word,
            product,
            domain,
        }
    }

    /// `{x ∈ domain : product·x ∈ target}`.
    pub fn pullback(&self, target: &ArcSet) -> ArcSet {
        self.domain.intersect(&target.preimage(&self.product))
    }

    pub fn labels(&self, spec: &PseudogroupSpec) -> Vec<String> {
        labels(spec, &self.word)
    }
}

fn labels(spec: &PseudogroupSpec, word: &[usize]) -> Vec<String> {
    word.iter()
        .map(|&i| spec.generators().label(i).to_string())
        .collect()
}

/// One contributing set of a coverage certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoveragePiece {
    /// Labels of the word that produced the piece, in application order.
    pub word: Vec<String>,
    /// Element carrying `source` onto a superset of `set`.
    pub mapping: GroupElement,
    pub set: ArcSet,
}

/// Witness that finitely many pieces cover a target set.
///
/// Re-verification uses arc algebra only: each piece must lie inside
/// `mapping·source`, and the union of the pieces must cover the target (its
/// closure when `closed` is set).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageCertificate {
    pub source: ArcSet,
    pub target: ArcSet,
    pub closed: bool,
    pub pieces: Vec<CoveragePiece>,
    pub verified: bool,
}

impl CoverageCertificate {
    fn assemble(source: ArcSet, target: ArcSet, closed: bool, pieces: Vec<CoveragePiece>) -> Self {
        let mut cert = CoverageCertificate {
            source,
            target,
            closed,
            pieces,
            verified: false,
        };
        cert.verified = cert.reverify();
        cert
    }

    pub fn union(&self) -> ArcSet {
        self.pieces
            .iter()
            .fold(ArcSet::empty(), |acc, p| acc.union(&p.set))
    }

    pub fn reverify(&self) -> bool {
        let pieces_sound = self
            .pieces
            .iter()
            .all(|p| self.source.image(&p.mapping).covers(&p.set));
        let union = self.union();
        let covered = if self.closed {
            union.covers_closure(&self.target)
        } else {
            union.covers(&self.target)
        };
        pieces_sound && covered
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecurrenceOutcome {
    Found {
        n: u32,
        certificate: CoverageCertificate,
    },
    /// No coverage up to the cap. Not a refutation.
    NotFound { searched: u32 },
}

/// Smallest `N ≤ n_cap` with `U = ⋃_{|w| ≤ N} {x ∈ dom(w) : w·x ∈ V}`.
///
/// Words are explored breadth first. A word whose domain is empty is dropped,
/// as is one whose `(product, domain)` pair was already reached by a shorter
/// or earlier word; equal products with different domains are both kept.
pub fn find_recurrence_n(spec: &PseudogroupSpec, n_cap: u32, caps: Caps) -> Result<RecurrenceOutcome> {
    let v = spec.v().ok_or(Error::MissingV)?.clone();
    let u = spec.u().clone();
    let gens = spec.generators();

    let root = WordDomain::empty_word(spec);
    let mut seen: HashSet<(GroupElement, ArcSet)> = HashSet::new();
    seen.insert((root.product.clone(), root.domain.clone()));
    let mut union = ArcSet::empty();
    let mut pieces = Vec::new();
    let mut level = vec![root];

    for n in 0..=n_cap {
        if n > 0 {
            let mut next = Vec::new();
            for w in &level {
                let skip = w.word.last().map(|&s| gens.inverse_index(s));
                for s in (0..gens.len()).filter(|&s| Some(s) != skip) {
                    let ext = w.extend(spec, s);
                    if ext.domain.is_empty()
                        || !seen.insert((ext.product.clone(), ext.domain.clone()))
                    {
                        continue;
                    }
                    next.push(ext);
                    if seen.len() > caps.max_nodes {
                        return Err(Error::ResourceCapExceeded {
                            limit: caps.max_nodes,
                        });
                    }
                }
            }
            level = next;
        }
        for w in &level {
            let piece = w.pullback(&v);
            if piece.is_empty() || union.covers(&piece) {
                continue;
            }
            union = union.union(&piece);
            pieces.push(CoveragePiece {
                word: w.labels(spec),
                mapping: w.product.invert(),
                set: piece,
            });
        }
        if union.covers(&u) {
            let certificate = CoverageCertificate::assemble(v, u, false, pieces);
            debug_assert!(certificate.verified);
            return Ok(RecurrenceOutcome::Found { n, certificate });
        }
        if level.is_empty() {
            break;
        }
    }
    Ok(RecurrenceOutcome::NotFound { searched: n_cap })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClaimOutcome {
    Covered {
        depth: u32,
        certificate: CoverageCertificate,
    },
    /// Exhausted the depth cap without covering. Not a refutation.
    Inconclusive { searched: u32 },
}

/// Semi-decides `U ⊆ ⋃_{γ ∉ F} γ·V` (or `closure(U) ⊆ …` when `closed`),
/// enumerating `γ` by unconstrained word length.
pub fn check_claim_b(
    spec: &PseudogroupSpec,
    excluded: &HashSet<GroupElement>,
    depth_cap: u32,
    closed: bool,
    caps: Caps,
) -> Result<ClaimOutcome> {
    let v = spec.v().ok_or(Error::MissingV)?.clone();
    let target = spec.u().clone();
    let free = PseudogroupSpec::new(spec.generators().clone(), ArcSet::full(), None)?;
    let mut search = GermSearch::start(&free, &ProjPoint::zero(), caps)?;
    let mut union = ArcSet::empty();
    let mut pieces = Vec::new();
    let done = |union: &ArcSet| {
        if closed {
            union.covers_closure(&target)
        } else {
            union.covers(&target)
        }
    };

    let mut layer = 0..1;
    for depth in 0..=depth_cap {
        if depth > 0 {
            layer = search.step()?;
        }
        for i in layer.clone() {
            let (g, _) = search.member(i);
            if excluded.contains(g) {
                continue;
            }
            let image = v.image(g);
            if union.covers(&image) {
                continue;
            }
            union = union.union(&image);
            let word = witness(&search, i);
            pieces.push(CoveragePiece {
                word: labels(spec, &word),
                mapping: g.clone(),
                set: image,
            });
        }
        if done(&union) {
            let certificate = CoverageCertificate::assemble(v, target, closed, pieces);
            return Ok(ClaimOutcome::Covered { depth, certificate });
        }
    }
    Ok(ClaimOutcome::Inconclusive { searched: depth_cap })
}

fn witness(search: &GermSearch<'_>, mut index: usize) -> Vec<usize> {
    let mut word = Vec::new();
    while let Some(parent) = search.member(index).1.parent {
        word.push(parent.generator);
        index = parent.member;
    }
    word.reverse();
    word
}

/// Result of deciding `closure(target) ⊆ ⋃_{i<j} (t_i⁻¹·V ∩ t_j⁻¹·V)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCoverage {
    pub covered: bool,
    /// Each cell of the target closure with the first pair `(i, j)` covering it.
    pub witness: Vec<(Cell, (usize, usize))>,
    pub uncovered: Option<Cell>,
}

pub fn check_pair_coverage(elements: &[GroupElement], v: &ArcSet, target: &ArcSet) -> PairCoverage {
    let pulled: Vec<ArcSet> = elements.iter().map(|t| v.preimage(t)).collect();
    let mut pairs = Vec::new();
    for i in 0..elements.len() {
        for j in i + 1..elements.len() {
            pairs.push(((i, j), pulled[i].intersect(&pulled[j])));
        }
    }
    let sets: Vec<&ArcSet> = pairs.iter().map(|(_, s)| s).collect();
    let mut witness = Vec::new();
    for cell in target.cells_within(&sets, true) {
        match pairs.iter().find(|(_, s)| s.contains(cell.probe())) {
            Some((ij, _)) => witness.push((cell, *ij)),
            None => {
                return PairCoverage {
                    covered: false,
                    witness,
                    uncovered: Some(cell),
                }
            }
        }
    }
    PairCoverage {
        covered: true,
        witness,
        uncovered: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{cayley_ball, GeneratingSystem};

    fn m(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::new(a, b, c, d).unwrap()
    }

    fn pt(s: &str) -> ProjPoint {
        s.parse().unwrap()
    }

    fn arc(a: &str, b: &str) -> ArcSet {
        ArcSet::between(pt(a), pt(b)).unwrap()
    }

    fn spec(g: GroupElement, u: ArcSet, v: ArcSet) -> PseudogroupSpec {
        let sys = GeneratingSystem::new([("g", g)]).unwrap();
        PseudogroupSpec::new(sys, u, Some(v)).unwrap()
    }

    fn rotation() -> GroupElement {
        m(3, -4, 4, 3)
    }

    /// Oracle: smallest N with ⋃_{|k| ≤ N} r^k·V = circle, by direct images.
    fn rotation_oracle(v: &ArcSet) -> u32 {
        let r = rotation();
        (0..50)
            .find(|&n| {
                let union = (-(n as i64)..=n as i64)
                    .fold(ArcSet::empty(), |acc, k| acc.union(&v.image(&r.pow(k))));
                union.is_full()
            })
            .expect("rotation covers the circle")
    }

    #[test]
    fn full_v_needs_no_words() {
        let s = spec(rotation(), ArcSet::full(), ArcSet::full());
        match find_recurrence_n(&s, 5, Caps::default()).unwrap() {
            RecurrenceOutcome::Found { n, certificate } => {
                assert_eq!(n, 0);
                assert!(certificate.reverify());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rotation_recurrence_matches_oracle() {
        let v = arc("-1", "1");
        let s = spec(rotation(), ArcSet::full(), v.clone());
        let expected = rotation_oracle(&v);
        match find_recurrence_n(&s, 10, Caps::default()).unwrap() {
            RecurrenceOutcome::Found { n, certificate } => {
                assert_eq!(n, expected);
                assert!(certificate.verified && certificate.reverify());
            }
            other => panic!("{other:?}"),
        }
        // a thinner V needs more steps
        let thin = arc("-1/10", "1/10");
        let s = spec(rotation(), ArcSet::full(), thin.clone());
        match find_recurrence_n(&s, 20, Caps::default()).unwrap() {
            RecurrenceOutcome::Found { n, .. } => {
                assert_eq!(n, rotation_oracle(&thin));
                assert!(n >= expected);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parabolic_is_inconclusive() {
        let s = spec(m(1, 1, 0, 1), ArcSet::full(), arc("-1", "1"));
        assert_eq!(
            find_recurrence_n(&s, 12, Caps::default()).unwrap(),
            RecurrenceOutcome::NotFound { searched: 12 }
        );
    }

    #[test]
    fn missing_v() {
        let sys = GeneratingSystem::new([("g", rotation())]).unwrap();
        let s = PseudogroupSpec::new(sys, ArcSet::full(), None).unwrap();
        assert_eq!(find_recurrence_n(&s, 3, Caps::default()), Err(Error::MissingV));
        assert_eq!(
            check_claim_b(&s, &HashSet::new(), 3, false, Caps::default()),
            Err(Error::MissingV)
        );
    }

    #[test]
    fn word_domain_matches_prefix_simulation() {
        let sys = GeneratingSystem::new([("a", m(1, 2, 0, 1)), ("b", m(1, 0, 2, 1))]).unwrap();
        let u = arc("-3", "3");
        let s = PseudogroupSpec::new(sys, u.clone(), None).unwrap();
        let probes: Vec<ProjPoint> = (-40..=40).map(|k| ProjPoint::ratio(k, 13)).collect();
        for word in [vec![0], vec![0, 2], vec![1, 1, 3], vec![2, 0, 3, 1], vec![3, 3]] {
            let w = word
                .iter()
                .fold(WordDomain::empty_word(&s), |acc, &g| acc.extend(&s, g));
            for x in &probes {
                let mut p = x.clone();
                let mut inside = u.contains(&p);
                for &g in &word {
                    p = s.generators().element(g).act(&p);
                    inside &= u.contains(&p);
                }
                assert_eq!(w.domain.contains(x), inside, "word {word:?} at {x}");
            }
        }
    }

    #[test]
    fn claim_b_examples() {
        let v = arc("-1", "1");
        let full = ArcSet::full();
        let s = spec(rotation(), full.clone(), full.clone());
        match check_claim_b(&s, &HashSet::new(), 0, false, Caps::default()).unwrap() {
            ClaimOutcome::Covered { depth, certificate } => {
                assert_eq!(depth, 0);
                assert_eq!(certificate.pieces.len(), 1);
                assert!(certificate.pieces[0].mapping.is_identity());
            }
            other => panic!("{other:?}"),
        }

        let s = spec(rotation(), full.clone(), v.clone());
        let sys = GeneratingSystem::new([("g", rotation())]).unwrap();
        let depth_of = |excluded: HashSet<GroupElement>| {
            match check_claim_b(&s, &excluded, 30, false, Caps::default()).unwrap() {
                ClaimOutcome::Covered { depth, certificate } => {
                    assert!(certificate.reverify());
                    assert!(certificate
                        .pieces
                        .iter()
                        .all(|p| !excluded.contains(&p.mapping)));
                    depth
                }
                other => panic!("{other:?}"),
            }
        };
        let plain = depth_of(HashSet::new());
        let no_identity = depth_of([GroupElement::identity()].into_iter().collect());
        let ball3: HashSet<GroupElement> = cayley_ball(&sys, 3, Caps::default())
            .unwrap()
            .into_keys()
            .collect();
        assert_eq!(ball3.len(), 7);
        let no_ball = depth_of(ball3);
        assert!(plain <= no_identity && no_identity < no_ball);
        assert!(no_ball > 3);
    }

    #[test]
    fn claim_b_parabolic_is_inconclusive() {
        let s = spec(m(1, 1, 0, 1), ArcSet::full(), arc("-1", "1"));
        assert_eq!(
            check_claim_b(&s, &HashSet::new(), 10, false, Caps::default()).unwrap(),
            ClaimOutcome::Inconclusive { searched: 10 }
        );
    }

    #[test]
    fn pair_coverage_examples() {
        let a = m(2, 0, 0, 1);
        let b = m(3, 1, 1, 1);
        let target = arc("0", "1");
        let both = check_pair_coverage(&[a.clone(), b], &ArcSet::full(), &target);
        assert!(both.covered);
        assert!(both.witness.iter().all(|(_, ij)| *ij == (0, 1)));
        let single = check_pair_coverage(&[a], &ArcSet::full(), &target);
        assert!(!single.covered);
        assert!(single.uncovered.is_some());
    }

    #[test]
    fn pair_coverage_checks_the_closure() {
        // t⁻¹·V ∩ identity⁻¹·V = (0, 1) misses the endpoints of closure((0, 1))
        let t = m(2, 0, 0, 1);
        let v = arc("0", "2");
        let cov = check_pair_coverage(&[GroupElement::identity(), t.clone()], &v, &arc("0", "1"));
        assert!(!cov.covered);
        assert_eq!(cov.uncovered, Some(Cell::Point(pt("0"))));
        let cov = check_pair_coverage(&[GroupElement::identity(), t], &v, &arc("1/4", "3/4"));
        assert!(cov.covered);
    }

    #[test]
    fn tampered_certificate_fails() {
        let s = spec(rotation(), ArcSet::full(), arc("-1", "1"));
        let RecurrenceOutcome::Found { mut certificate, .. } =
            find_recurrence_n(&s, 10, Caps::default()).unwrap()
        else {
            panic!("expected a certificate")
        };
        certificate.pieces.pop();
        assert!(!certificate.reverify());
    }
}
