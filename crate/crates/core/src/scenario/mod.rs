//! Scenario files: a TOML description of a pseudogroup experiment.
//!
//! ```toml
//! name = "rotation"
//! base_points = ["0"]
//! u = "full"
//! v = [["-1", "1"]]
//!
//! [[generators]]
//! label = "r"
//! matrix = "3 -4 4 3"
//!
//! [caps]
//! max_radius = 64
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;
use thiserror::Error;

use crate::engine::{Caps, GeneratingSystem, PseudogroupSpec};
use crate::error::Error;
use crate::growth::ClassifierParams;
use crate::moebius::{ArcSet, GroupElement, ProjPoint};
use crate::pingpong::PingPongCertificate;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(#[from] Error),
    #[error("invalid scenario: {0}")]
    Field(String),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorEntry {
    pub label: String,
    pub matrix: GroupElement,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioCaps {
    pub max_radius: u32,
    pub max_nodes: usize,
    pub n_cap: u32,
    pub depth_cap: u32,
}

impl Default for ScenarioCaps {
    fn default() -> Self {
        ScenarioCaps {
            max_radius: 10,
            max_nodes: Caps::default().max_nodes,
            n_cap: 16,
            depth_cap: 12,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PingPongSection {
    /// Certificate elements; the scenario's generators when omitted.
    #[serde(default)]
    pub elements: Option<Vec<GroupElement>>,
    /// Tables for `pingpong verify`.
    #[serde(default)]
    pub tables: Option<Vec<ArcSet>>,
    /// Grid spacing of table endpoints for `pingpong search`.
    #[serde(default = "default_resolution")]
    pub resolution: ProjPoint,
    #[serde(default = "default_max_power")]
    pub max_power: u32,
}

fn default_resolution() -> ProjPoint {
    ProjPoint::ratio(1, 8)
}

fn default_max_power() -> u32 {
    8
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSection {
    /// Elements `t_i`; the scenario's generators when omitted.
    #[serde(default)]
    pub elements: Option<Vec<GroupElement>>,
    /// Set whose closure must be covered; `U` when omitted.
    #[serde(default)]
    pub target: Option<ArcSet>,
}

/// A subset of the orbit piece: explicit points, or the points whose
/// distance from the base is a multiple of `depth_multiple_of`, or
/// everything.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    #[serde(default)]
    pub points: Option<Vec<ProjPoint>>,
    #[serde(default)]
    pub depth_multiple_of: Option<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasiLatticeSection {
    pub radius: u32,
    pub c: u32,
    #[serde(default)]
    pub net1: NetSpec,
    #[serde(default)]
    pub net2: NetSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default = "ArcSet::full")]
    pub u: ArcSet,
    #[serde(default)]
    pub v: Option<ArcSet>,
    pub base_points: Vec<ProjPoint>,
    #[serde(default)]
    pub caps: ScenarioCaps,
    #[serde(default)]
    pub classifier: ClassifierParams,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    #[serde(default)]
    pub pingpong: Option<PingPongSection>,
    #[serde(default)]
    pub coverage: Option<CoverageSection>,
    #[serde(default)]
    pub quasi_lattice: Option<QuasiLatticeSection>,
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl Scenario {
    /// Parses and validates scenario text.
    pub fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            ScenarioError::Syntax {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Scenario::parse(&text)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        let spec = self.spec()?;
        if self.base_points.is_empty() {
            return Err(ScenarioError::Field("base_points is empty".into()));
        }
        for x in &self.base_points {
            if !spec.u().contains(x) {
                return Err(Error::BasePointOutsideU(x.to_string()).into());
            }
        }
        let c = &self.caps;
        if c.max_radius == 0 || c.max_nodes == 0 || c.n_cap == 0 || c.depth_cap == 0 {
            return Err(ScenarioError::Field("caps must be positive".into()));
        }
        if let Some(pp) = &self.pingpong {
            if !matches!(&pp.resolution, ProjPoint::Finite(r) if r > &BigRational::from_integer(0.into())) {
                return Err(ScenarioError::Field("pingpong.resolution must be a positive rational".into()));
            }
        }
        Ok(())
    }

    pub fn generating_system(&self) -> Result<GeneratingSystem, Error> {
        GeneratingSystem::new(
            self.generators
                .iter()
                .map(|g| (g.label.clone(), g.matrix.clone())),
        )
    }

    pub fn spec(&self) -> Result<PseudogroupSpec, Error> {
        PseudogroupSpec::new(self.generating_system()?, self.u.clone(), self.v.clone())
    }

    pub fn engine_caps(&self) -> Caps {
        Caps {
            max_nodes: self.caps.max_nodes,
        }
    }

    /// Elements as written in the scenario, without added inverses.
    pub fn declared_elements(&self) -> Vec<GroupElement> {
        self.generators.iter().map(|g| g.matrix.clone()).collect()
    }

    /// The `[pingpong]` certificate, when its tables are given.
    pub fn pingpong_certificate(&self) -> Option<PingPongCertificate> {
        let pp = self.pingpong.as_ref()?;
        Some(PingPongCertificate {
            elements: pp.elements.clone().unwrap_or_else(|| self.declared_elements()),
            tables: pp.tables.clone()?,
        })
    }
}
