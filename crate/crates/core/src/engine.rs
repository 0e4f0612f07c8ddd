//! Constrained breadth-first search over `Γ_{U,x} = {γ : γ·x ∈ U}`.
//!
//! The search runs over group elements rather than words. An element is
//! admitted at length `n + 1` when it is `s·γ` for a generator `s` and an
//! element `γ` admitted at length `n`, and its point `s·γ·x` lies in `U`.
//! Every admitted element therefore carries a word all of whose prefixes keep
//! the base point inside `U`, and BFS order makes the recorded length the
//! minimal such word length `|γ|_{S,U,x}`.

use std::collections::HashSet;

use indexmap::map::Entry;
use indexmap::IndexMap;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moebius::{ArcSet, GroupElement, ProjPoint};

/// Frontiers smaller than this are expanded on the calling thread.
const PARALLEL_FRONTIER: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub label: String,
    pub element: GroupElement,
}

/// A finite symmetric generating set, in declaration order.
///
/// Inverses missing from the input are inserted right after their generator
/// with the label `name^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSystem {
    generators: Vec<Generator>,
    inverse_of: Vec<usize>,
}

fn inverse_label(label: &str) -> String {
    match label.strip_suffix("^-1") {
        Some(base) => base.to_string(),
        None => format!("{label}^-1"),
    }
}

impl GeneratingSystem {
    pub fn new<L: Into<String>>(
        generators: impl IntoIterator<Item = (L, GroupElement)>,
    ) -> Result<GeneratingSystem> {
        let input: Vec<(String, GroupElement)> =
            generators.into_iter().map(|(l, g)| (l.into(), g)).collect();
        let mut seen = HashSet::new();
        for (label, g) in &input {
            if g.is_identity() {
                return Err(Error::IdentityGenerator(label.clone()));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::DuplicateGenerator(label.clone()));
            }
        }
        if input.is_empty() {
            return Err(Error::NoGenerators);
        }
        let declared: HashSet<GroupElement> = input.iter().map(|(_, g)| g.clone()).collect();
        let mut out: Vec<Generator> = Vec::with_capacity(2 * input.len());
        for (label, g) in input {
            let inv = g.invert();
            let add_inverse = !declared.contains(&inv);
            out.push(Generator {
                label: label.clone(),
                element: g,
            });
            if add_inverse {
                out.push(Generator {
                    label: inverse_label(&label),
                    element: inv,
                });
            }
        }
        let inverse_of = out
            .iter()
            .map(|g| {
                let inv = g.element.invert();
                out.iter()
                    .position(|h| h.element == inv)
                    .expect("generating set is symmetric")
            })
            .collect();
        Ok(GeneratingSystem {
            generators: out,
            inverse_of,
        })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn element(&self, i: usize) -> &GroupElement {
        &self.generators[i].element
    }

    pub fn label(&self, i: usize) -> &str {
        &self.generators[i].label
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.inverse_of[i]
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.generators.iter().position(|h| h.element == *g)
    }

    /// `S ∪ S'`, keeping the first label of any shared element.
    pub fn union(&self, other: &GeneratingSystem) -> GeneratingSystem {
        let mut pairs: Vec<(String, GroupElement)> = self
            .generators
            .iter()
            .map(|g| (g.label.clone(), g.element.clone()))
            .collect();
        for g in &other.generators {
            if !pairs.iter().any(|(_, e)| *e == g.element) {
                pairs.push((g.label.clone(), g.element.clone()));
            }
        }
        GeneratingSystem::new(pairs).expect("union of symmetric systems is symmetric")
    }

    /// Product of a word given as generator indices, applied first to last
    /// (the last index is the leftmost factor).
    pub fn evaluate(&self, word: &[usize]) -> GroupElement {
        word.iter().fold(GroupElement::identity(), |acc, &i| {
            self.element(i).compose(&acc)
        })
    }
}

/// Generators `S` restricted to the open set `U`, with an optional smaller
/// `V` whose closure lies in `U`.
#[derive(Clone, Debug)]
pub struct PseudogroupSpec {
    generators: GeneratingSystem,
    u: ArcSet,
    v: Option<ArcSet>,
}

impl PseudogroupSpec {
    pub fn new(generators: GeneratingSystem, u: ArcSet, v: Option<ArcSet>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyDomain);
        }
        if let Some(v) = &v {
            if !u.covers_closure(v) {
                return Err(Error::VNotInsideU);
            }
        }
        Ok(PseudogroupSpec { generators, u, v })
    }

    pub fn generators(&self) -> &GeneratingSystem {
        &self.generators
    }

    pub fn u(&self) -> &ArcSet {
        &self.u
    }

    pub fn v(&self) -> Option<&ArcSet> {
        self.v.as_ref()
    }

    pub fn with_u(&self, u: ArcSet) -> Result<PseudogroupSpec> {
        PseudogroupSpec::new(self.generators.clone(), u, self.v.clone())
    }

    pub fn with_generators(&self, generators: GeneratingSystem) -> PseudogroupSpec {
        PseudogroupSpec {
            generators,
            ..self.clone()
        }
    }

    fn require_in_u(&self, x: &ProjPoint) -> Result<()> {
        if self.u.contains(x) {
            Ok(())
        } else {
            Err(Error::BasePointOutsideU(x.to_string()))
        }
    }
}

/// Search limits. Exceeding `max_nodes` is an error, never a silent cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub max_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_nodes: 2_000_000,
        }
    }
}

/// How an element entered the ball.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parent {
    /// Generator applied last.
    pub generator: usize,
    /// Index of the shorter element in the ball's insertion order.
    pub member: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Member {
    pub length: u32,
    /// `γ·x`.
    pub point: ProjPoint,
    pub parent: Option<Parent>,
}

/// The ball `{γ ∈ Γ_{U,x} : |γ|_{S,U,x} ≤ R}` with exact lengths, in BFS
/// insertion order.
#[derive(Clone, Debug)]
pub struct GermBall {
    base: ProjPoint,
    radius: u32,
    members: IndexMap<GroupElement, Member>,
    sphere_sizes: Vec<usize>,
}

impl GermBall {
    pub fn base(&self) -> &ProjPoint {
        &self.base
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> impl Iterator<Item = (&GroupElement, &Member)> {
        self.members.iter()
    }

    pub fn get(&self, g: &GroupElement) -> Option<&Member> {
        self.members.get(g)
    }

    pub fn length(&self, g: &GroupElement) -> Option<u32> {
        self.members.get(g).map(|m| m.length)
    }

    pub fn member_at(&self, index: usize) -> Option<(&GroupElement, &Member)> {
        self.members.get_index(index)
    }

    /// Counts of elements at each exact length `0..=radius`.
    pub fn sphere_sizes(&self) -> &[usize] {
        &self.sphere_sizes
    }

    /// Cumulative counts `v(r)` for `r = 0..=radius`.
    pub fn cumulative_counts(&self) -> Vec<usize> {
        self.sphere_sizes
            .iter()
            .scan(0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }

    pub fn sphere(&self, n: u32) -> impl Iterator<Item = &GroupElement> {
        self.members
            .iter()
            .filter(move |(_, m)| m.length == n)
            .map(|(g, _)| g)
    }

    /// One admissible word for `g`, as generator indices in application order.
    pub fn witness_word(&self, g: &GroupElement) -> Option<Vec<usize>> {
        let mut member = self.members.get(g)?;
        let mut word = Vec::with_capacity(member.length as usize);
        while let Some(parent) = member.parent {
            word.push(parent.generator);
            member = self.members.get_index(parent.member).expect("parent recorded").1;
        }
        word.reverse();
        Some(word)
    }
}

/// Layer-by-layer constrained BFS, for callers that stop early.
pub struct GermSearch<'a> {
    spec: &'a PseudogroupSpec,
    caps: Caps,
    members: IndexMap<GroupElement, Member>,
    sphere_sizes: Vec<usize>,
    layer_start: usize,
}

impl<'a> GermSearch<'a> {
    pub fn start(spec: &'a PseudogroupSpec, x: &ProjPoint, caps: Caps) -> Result<Self> {
        spec.require_in_u(x)?;
        let mut members = IndexMap::new();
        members.insert(
            GroupElement::identity(),
            Member {
                length: 0,
                point: x.clone(),
                parent: None,
            },
        );
        Ok(GermSearch {
            spec,
            caps,
            members,
            sphere_sizes: vec![1],
            layer_start: 0,
        })
    }

    pub fn depth(&self) -> u32 {
        (self.sphere_sizes.len() - 1) as u32
    }

    fn candidates(&self, index: usize) -> Vec<(GroupElement, ProjPoint, Parent)> {
        let gens = self.spec.generators();
        let (g, m) = self.members.get_index(index).expect("frontier index");
        let skip = m.parent.map(|p| gens.inverse_index(p.generator));
        (0..gens.len())
            .filter(|&s| Some(s) != skip)
            .filter_map(|s| {
                let point = gens.element(s).act(&m.point);
                self.spec.u.contains(&point).then(|| {
                    (
                        gens.element(s).compose(g),
                        point,
                        Parent {
                            generator: s,
                            member: index,
                        },
                    )
                })
            })
            .collect()
    }

    /// Admits the next sphere. Returns its new members' index range.
    pub fn step(&mut self) -> Result<std::ops::Range<usize>> {
        let frontier = self.layer_start..self.members.len();
        let expanded: Vec<Vec<_>> = if frontier.len() >= PARALLEL_FRONTIER {
            frontier.clone().into_par_iter().map(|i| self.candidates(i)).collect()
        } else {
            frontier.clone().map(|i| self.candidates(i)).collect()
        };
        let length = self.depth() + 1;
        let start = self.members.len();
        for (g, point, parent) in expanded.into_iter().flatten() {
            if let Entry::Vacant(slot) = self.members.entry(g) {
                slot.insert(Member {
                    length,
                    point,
                    parent: Some(parent),
                });
                if self.members.len() > self.caps.max_nodes {
                    return Err(Error::ResourceCapExceeded {
                        limit: self.caps.max_nodes,
                    });
                }
            }
        }
        self.sphere_sizes.push(self.members.len() - start);
        self.layer_start = start;
        Ok(start..self.members.len())
    }

    pub fn member(&self, index: usize) -> (&GroupElement, &Member) {
        self.members.get_index(index).expect("member index")
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.members.contains_key(g)
    }

    pub fn finish(self) -> GermBall {
        let base = self.members.get_index(0).expect("identity").1.point.clone();
        GermBall {
            base,
            radius: self.depth(),
            members: self.members,
            sphere_sizes: self.sphere_sizes,
        }
    }
}

/// All `γ` with `|γ|_{S,U,x} ≤ radius`, each with its exact length.
pub fn germ_ball(spec: &PseudogroupSpec, x: &ProjPoint, radius: u32, caps: Caps) -> Result<GermBall> {
    let mut search = GermSearch::start(spec, x, caps)?;
    for _ in 0..radius {
        search.step()?;
    }
    Ok(search.finish())
}

/// Orbit points within word distance `radius` of the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitBall {
    pub base: ProjPoint,
    pub radius: u32,
    /// `d_E(x, y)` for each orbit point `y`, in order of first discovery.
    pub distances: IndexMap<ProjPoint, u32>,
}

impl OrbitBall {
    pub fn from_germ_ball(ball: &GermBall) -> OrbitBall {
        let mut distances = IndexMap::new();
        // BFS order: the first witness of a point is a shortest one
        for (_, m) in ball.members() {
            distances.entry(m.point.clone()).or_insert(m.length);
        }
        OrbitBall {
            base: ball.base().clone(),
            radius: ball.radius(),
            distances,
        }
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn cumulative_counts(&self) -> Vec<usize> {
        let mut spheres = vec![0usize; self.radius as usize + 1];
        for &d in self.distances.values() {
            spheres[d as usize] += 1;
        }
        spheres
            .iter()
            .scan(0, |acc, &s| {
                *acc += s;
                Some(*acc)
            })
            .collect()
    }
}

pub fn orbit_ball(spec: &PseudogroupSpec, x: &ProjPoint, radius: u32, caps: Caps) -> Result<OrbitBall> {
    Ok(OrbitBall::from_germ_ball(&germ_ball(spec, x, radius, caps)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GermDistance {
    Within(u32),
    /// Not found at any length up to the search radius.
    Unreachable { searched: u32 },
}

impl GermDistance {
    pub fn value(self) -> Option<u32> {
        match self {
            GermDistance::Within(n) => Some(n),
            GermDistance::Unreachable { .. } => None,
        }
    }
}

/// `|g|_{S,U,x}`, searching lengths up to `max_radius`.
pub fn constrained_length(
    spec: &PseudogroupSpec,
    x: &ProjPoint,
    g: &GroupElement,
    max_radius: u32,
    caps: Caps,
) -> Result<GermDistance> {
    let mut search = GermSearch::start(spec, x, caps)?;
    if g.is_identity() {
        return Ok(GermDistance::Within(0));
    }
    if !spec.u.contains(&g.act(x)) {
        return Err(Error::NotAdmissible(format!("{g:?} sends {x} outside U")));
    }
    for _ in 0..max_radius {
        let new = search.step()?;
        if new.is_empty() {
            break;
        }
        if search.contains(g) {
            return Ok(GermDistance::Within(search.depth()));
        }
    }
    Ok(GermDistance::Unreachable {
        searched: max_radius,
    })
}

/// `d_{S,U,x}(γ, δ) = |δγ⁻¹|_{S,U,γ·x}`.
pub fn germ_distance(
    spec: &PseudogroupSpec,
    x: &ProjPoint,
    gamma: &GroupElement,
    delta: &GroupElement,
    max_radius: u32,
    caps: Caps,
) -> Result<GermDistance> {
    spec.require_in_u(x)?;
    for (name, g) in [("γ", gamma), ("δ", delta)] {
        if !spec.u.contains(&g.act(x)) {
            return Err(Error::NotAdmissible(format!("{name} = {g:?} sends {x} outside U")));
        }
    }
    let y = gamma.act(x);
    constrained_length(spec, &y, &delta.compose(&gamma.invert()), max_radius, caps)
}

/// Non-identity members of the ball that fix the base point: the germ group
/// part of the ball.
pub fn stabilizer_elements(
    spec: &PseudogroupSpec,
    x: &ProjPoint,
    radius: u32,
    caps: Caps,
) -> Result<Vec<GroupElement>> {
    let ball = germ_ball(spec, x, radius, caps)?;
    Ok(ball
        .members()
        .filter(|(g, m)| !g.is_identity() && m.point == *x)
        .map(|(g, _)| g.clone())
        .collect())
}

/// Unconstrained Cayley ball of the generated group, with word lengths.
pub fn cayley_ball(
    generators: &GeneratingSystem,
    radius: u32,
    caps: Caps,
) -> Result<IndexMap<GroupElement, u32>> {
    let spec = PseudogroupSpec::new(generators.clone(), ArcSet::full(), None)?;
    let ball = germ_ball(&spec, &ProjPoint::zero(), radius, caps)?;
    Ok(ball.members.into_iter().map(|(g, m)| (g, m.length)).collect())
}
