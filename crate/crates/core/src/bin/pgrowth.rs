use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use pgrowth::engine::{cayley_ball, germ_ball, GermBall, OrbitBall, PseudogroupSpec};
use pgrowth::growth::{
    classify_growth, compare_generating_systems, compare_quasi_lattices, search_domination,
    sphere_doubling_check, DominationGrid, GrowthSeries, OrbitMetric,
};
use pgrowth::pingpong::{search_certificate, PingPongCertificate, SearchParams};
use pgrowth::recurrence::{
    check_claim_b, check_pair_coverage, find_recurrence_n, ClaimOutcome, CoverageCertificate,
    RecurrenceOutcome,
};
use pgrowth::scenario::{NetSpec, Scenario, ScenarioError};
use pgrowth::{Error, ProjPoint};

const INVALID_INPUT: u8 = 2;
const INCONCLUSIVE: u8 = 3;
const VERIFICATION_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "pgrowth", version, about = "Growth, recurrence and ping-pong experiments for projective pseudogroups")]
struct Cli {
    /// Worker threads for ball enumeration.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "PGROWTH_OUT", default_value = ".")]
    out: PathBuf,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct ScenarioArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Overrides `caps.max_radius`.
    #[arg(long)]
    max_radius: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Germ and orbit balls, growth series and verdicts for each base point.
    Growth {
        #[command(flatten)]
        input: ScenarioArgs,
        /// Only this base point (zero-based index).
        #[arg(long)]
        point: Option<usize>,
    },
    /// Searches for a recurrence bound and writes its certificate.
    Recurrence {
        #[command(flatten)]
        input: ScenarioArgs,
        /// Instead, check coverage of U by translates of V with the
        /// unconstrained ball of this radius removed.
        #[arg(long)]
        exclude_radius: Option<u32>,
        /// Cover the closure of U rather than U.
        #[arg(long)]
        closed: bool,
    },
    /// Verifies or searches for a ping-pong certificate.
    Pingpong {
        #[command(subcommand)]
        action: PingPongAction,
    },
    /// Pair coverage of the closure of the target by translates of V.
    Coverage {
        #[command(flatten)]
        input: ScenarioArgs,
    },
    /// Comparisons between growth functions, nets and generating systems.
    Compare {
        #[command(subcommand)]
        what: CompareWhat,
    },
    /// Re-checks a certificate file from scratch.
    Reverify { certificate: PathBuf },
}

#[derive(Subcommand)]
enum PingPongAction {
    Verify {
        #[arg(long, required_unless_present = "certificate")]
        scenario: Option<PathBuf>,
        /// A certificate JSON file instead of the scenario's tables.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    Search {
        #[command(flatten)]
        input: ScenarioArgs,
    },
}

#[derive(Subcommand)]
enum CompareWhat {
    Domination {
        #[command(flatten)]
        input: ScenarioArgs,
        #[arg(long)]
        other: PathBuf,
    },
    QuasiLattices {
        #[command(flatten)]
        input: ScenarioArgs,
    },
    GeneratingSystems {
        #[command(flatten)]
        input: ScenarioArgs,
        #[arg(long)]
        other: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Failure {
        Failure {
            code: INVALID_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::ResourceCapExceeded { .. } => INCONCLUSIVE,
            _ => INVALID_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Failure {
        Failure::invalid(e.to_string())
    }
}

/// Files produced by one command, written together once everything has
/// been computed.
struct Outputs {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Outputs {
        Outputs {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        }
    }

    fn add(&mut self, name: String, bytes: Vec<u8>) {
        self.files.push((name, bytes));
    }

    fn add_json<T: Serialize>(&mut self, name: String, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    /// Stages every file as a temporary next to its target, then renames.
    fn commit(self) -> Result<Vec<PathBuf>, Failure> {
        let io = |e: std::io::Error| Failure::invalid(format!("cannot write output: {e}"));
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        let mut staged = Vec::new();
        for (name, bytes) in self.files {
            let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
            tmp.write_all(&bytes).map_err(io)?;
            tmp.as_file().sync_all().map_err(io)?;
            staged.push((tmp, self.dir.join(name)));
        }
        let mut written = Vec::new();
        for (tmp, path) in staged {
            tmp.persist(&path).map_err(|e| io(e.error))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn load(input: &ScenarioArgs) -> Result<Scenario, Failure> {
    let mut scenario = Scenario::load(&input.scenario)?;
    if let Some(r) = input.max_radius {
        if r == 0 {
            return Err(Failure::invalid("--max-radius must be positive"));
        }
        scenario.caps.max_radius = r;
    }
    Ok(scenario)
}

fn table<T: Serialize>(rows: &[T], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).expect("serializable row");
            }
            w.into_inner().expect("in-memory writer")
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(rows).expect("serializable");
            bytes.push(b'\n');
            bytes
        }
    }
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

#[derive(Serialize)]
struct GermRow {
    length: u32,
    a: String,
    b: String,
    c: String,
    d: String,
    point: String,
}

#[derive(Serialize)]
struct OrbitRow {
    distance: u32,
    point: String,
}

#[derive(Serialize)]
struct SeriesRow {
    radius: u32,
    count: u64,
}

fn series_rows(series: &GrowthSeries) -> Vec<SeriesRow> {
    series
        .points()
        .iter()
        .map(|&(radius, count)| SeriesRow { radius, count })
        .collect()
}

fn germ_rows(ball: &GermBall) -> Vec<GermRow> {
    ball.members()
        .map(|(g, m)| {
            let [a, b, c, d] = g.entries();
            GermRow {
                length: m.length,
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                d: d.to_string(),
                point: m.point.to_string(),
            }
        })
        .collect()
}

fn verdict_json(series: &GrowthSeries, scenario: &Scenario) -> (Value, bool) {
    match classify_growth(series, &scenario.classifier) {
        Ok(v) => {
            let conclusive = v.kind != pgrowth::growth::GrowthKind::Inconclusive;
            (serde_json::to_value(v).expect("serializable"), conclusive)
        }
        Err(e) => (json!({ "kind": "INCONCLUSIVE", "error": e.to_string() }), false),
    }
}

fn doubling_json(scenario: &Scenario, spec: &PseudogroupSpec, ball: &GermBall) -> Value {
    let (Some(cert), Some(section), Some(v)) = (
        scenario.pingpong_certificate(),
        scenario.coverage.as_ref(),
        spec.v(),
    ) else {
        return Value::Null;
    };
    let elements = section
        .elements
        .clone()
        .unwrap_or_else(|| scenario.declared_elements());
    let target = section.target.clone().unwrap_or_else(|| spec.u().clone());
    let coverage = check_pair_coverage(&elements, v, &target);
    match sphere_doubling_check(ball, spec, &cert, &coverage) {
        Ok(holds) => json!({ "certified": true, "holds": holds }),
        Err(e) => json!({ "certified": false, "reason": e.to_string() }),
    }
}

fn cmd_growth(cli: &Cli, input: &ScenarioArgs, point: Option<usize>) -> Result<u8, Failure> {
    let scenario = load(input)?;
    let spec = scenario.spec()?;
    let indices: Vec<usize> = match point {
        Some(i) if i < scenario.base_points.len() => vec![i],
        Some(i) => return Err(Failure::invalid(format!("no base point with index {i}"))),
        None => (0..scenario.base_points.len()).collect(),
    };
    let radius = scenario.caps.max_radius;
    let ext = extension(cli.format);
    let mut out = Outputs::new(&cli.out);
    let mut code = 0;
    let mut summary = Vec::new();
    for i in indices {
        let x = &scenario.base_points[i];
        let ball = germ_ball(&spec, x, radius, scenario.engine_caps())?;
        let orbit = OrbitBall::from_germ_ball(&ball);
        let germ_series = GrowthSeries::from_counts(&ball.cumulative_counts()).expect("cumulative");
        let orbit_series = GrowthSeries::from_counts(&orbit.cumulative_counts()).expect("cumulative");
        let (germ_verdict, germ_ok) = verdict_json(&germ_series, &scenario);
        let (orbit_verdict, orbit_ok) = verdict_json(&orbit_series, &scenario);
        if !(germ_ok && orbit_ok) {
            code = INCONCLUSIVE;
        }
        let prefix = format!("{}.p{i}", scenario.name);
        let orbit_rows: Vec<OrbitRow> = orbit
            .distances
            .iter()
            .map(|(p, &distance)| OrbitRow {
                distance,
                point: p.to_string(),
            })
            .collect();
        out.add(format!("{prefix}.germ_ball.{ext}"), table(&germ_rows(&ball), cli.format));
        out.add(format!("{prefix}.orbit_ball.{ext}"), table(&orbit_rows, cli.format));
        out.add(format!("{prefix}.germ_growth.{ext}"), table(&series_rows(&germ_series), cli.format));
        out.add(format!("{prefix}.orbit_growth.{ext}"), table(&series_rows(&orbit_series), cli.format));
        let orbit_spheres: Vec<usize> = std::iter::once(orbit_series.points()[0].1 as usize)
            .chain(orbit_series.points().windows(2).map(|w| (w[1].1 - w[0].1) as usize))
            .collect();
        let record = json!({
            "scenario": scenario.name,
            "base_point": x.to_string(),
            "radius": radius,
            "germ": germ_verdict,
            "orbit": orbit_verdict,
            "germ_sphere_sizes": ball.sphere_sizes(),
            "orbit_sphere_sizes": orbit_spheres,
            "sphere_doubling": doubling_json(&scenario, &spec, &ball),
            "metadata": scenario.metadata,
        });
        summary.push(json!({
            "base_point": x.to_string(),
            "germ": record["germ"]["kind"],
            "orbit": record["orbit"]["kind"],
        }));
        out.add_json(format!("{prefix}.verdict.json"), &record);
    }
    for path in out.commit()? {
        eprintln!("wrote {}", path.display());
    }
    println!("{}", json!({ "scenario": scenario.name, "points": summary }));
    Ok(code)
}

fn cmd_recurrence(
    cli: &Cli,
    input: &ScenarioArgs,
    exclude_radius: Option<u32>,
    closed: bool,
) -> Result<u8, Failure> {
    let scenario = load(input)?;
    let spec = scenario.spec()?;
    let caps = scenario.engine_caps();
    let mut out = Outputs::new(&cli.out);
    let (summary, code) = match exclude_radius {
        None => match find_recurrence_n(&spec, scenario.caps.n_cap, caps)? {
            RecurrenceOutcome::Found { n, certificate } => {
                out.add_json(format!("{}.recurrence.json", scenario.name), &certificate);
                let s = json!({ "outcome": "found", "n": n, "pieces": certificate.pieces.len(), "verified": certificate.verified });
                (s, 0)
            }
            RecurrenceOutcome::NotFound { searched } => {
                (json!({ "outcome": "not-found", "searched": searched }), INCONCLUSIVE)
            }
        },
        Some(k) => {
            let excluded: HashSet<_> = cayley_ball(spec.generators(), k, caps)?.into_keys().collect();
            match check_claim_b(&spec, &excluded, scenario.caps.depth_cap, closed, caps)? {
                ClaimOutcome::Covered { depth, certificate } => {
                    out.add_json(format!("{}.claim_b.json", scenario.name), &certificate);
                    let s = json!({ "outcome": "covered", "excluded": excluded.len(), "depth": depth, "verified": certificate.verified });
                    (s, 0)
                }
                ClaimOutcome::Inconclusive { searched } => (
                    json!({ "outcome": "inconclusive", "excluded": excluded.len(), "searched": searched }),
                    INCONCLUSIVE,
                ),
            }
        }
    };
    out.commit()?;
    println!("{}", json!({ "scenario": scenario.name, "recurrence": summary }));
    Ok(code)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::invalid(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn cmd_pingpong(cli: &Cli, action: &PingPongAction) -> Result<u8, Failure> {
    match action {
        PingPongAction::Verify {
            scenario,
            certificate,
        } => {
            let cert: PingPongCertificate = match (certificate, scenario) {
                (Some(path), _) => read_json(path)?,
                (None, Some(path)) => Scenario::load(path)?
                    .pingpong_certificate()
                    .ok_or_else(|| Failure::invalid("scenario has no [pingpong] tables"))?,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let report = match cert.verify() {
                Ok(()) => json!({ "valid": true }),
                Err(failure) => json!({ "valid": false, "failure": failure, "reason": failure.to_string() }),
            };
            println!("{report}");
            Ok(if cert.is_valid() { 0 } else { VERIFICATION_FAILED })
        }
        PingPongAction::Search { input } => {
            let scenario = load(input)?;
            let section = scenario.pingpong.clone();
            let elements = section
                .as_ref()
                .and_then(|s| s.elements.clone())
                .unwrap_or_else(|| scenario.declared_elements());
            let resolution = section
                .as_ref()
                .and_then(|s| s.resolution.as_rational().cloned())
                .unwrap_or_else(|| num_rational::BigRational::new(1.into(), 8.into()));
            let params = SearchParams {
                max_power: section.as_ref().map_or(8, |s| s.max_power),
                ..SearchParams::default()
            };
            match search_certificate(&elements, &resolution, &params)? {
                Some(cert) => {
                    let mut out = Outputs::new(&cli.out);
                    out.add_json(format!("{}.pingpong.json", scenario.name), &cert);
                    out.commit()?;
                    println!("{}", json!({ "found": true, "certificate": cert }));
                    Ok(0)
                }
                None => {
                    println!("{}", json!({ "found": false }));
                    Ok(INCONCLUSIVE)
                }
            }
        }
    }
}

fn cmd_coverage(cli: &Cli, input: &ScenarioArgs) -> Result<u8, Failure> {
    let scenario = load(input)?;
    let spec = scenario.spec()?;
    let v = spec.v().ok_or(Error::MissingV)?;
    let section = scenario.coverage.clone();
    let elements = section
        .as_ref()
        .and_then(|s| s.elements.clone())
        .unwrap_or_else(|| scenario.declared_elements());
    if elements.len() < 2 {
        return Err(Error::TooFewElements(elements.len()).into());
    }
    let target = section
        .and_then(|s| s.target)
        .unwrap_or_else(|| spec.u().clone());
    let coverage = check_pair_coverage(&elements, v, &target);
    let witness: Vec<Value> = coverage
        .witness
        .iter()
        .map(|(cell, (i, j))| json!({ "cell": cell.to_string(), "pair": [i, j] }))
        .collect();
    let report = json!({
        "scenario": scenario.name,
        "target": target,
        "covered": coverage.covered,
        "witness": witness,
        "uncovered": coverage.uncovered.as_ref().map(|c| c.to_string()),
    });
    let mut out = Outputs::new(&cli.out);
    out.add_json(format!("{}.coverage.json", scenario.name), &report);
    out.commit()?;
    println!("{}", json!({ "scenario": scenario.name, "covered": coverage.covered }));
    Ok(if coverage.covered { 0 } else { VERIFICATION_FAILED })
}

fn germ_series(scenario: &Scenario) -> Result<GrowthSeries, Failure> {
    let ball = germ_ball(
        &scenario.spec()?,
        &scenario.base_points[0],
        scenario.caps.max_radius,
        scenario.engine_caps(),
    )?;
    Ok(GrowthSeries::from_counts(&ball.cumulative_counts()).expect("cumulative"))
}

fn select_net(metric: &OrbitMetric, net: &NetSpec) -> Result<Vec<ProjPoint>, Failure> {
    match (&net.points, net.depth_multiple_of) {
        (Some(_), Some(_)) => Err(Failure::invalid("a net takes either points or depth_multiple_of")),
        (Some(points), None) => Ok(points.clone()),
        (None, Some(0)) => Err(Failure::invalid("depth_multiple_of must be positive")),
        (None, Some(k)) => Ok(metric
            .points()
            .enumerate()
            .filter(|&(i, _)| metric.depth(i) % k == 0)
            .map(|(_, p)| p.clone())
            .collect()),
        (None, None) => Ok(metric.points().cloned().collect()),
    }
}

fn cmd_compare(cli: &Cli, what: &CompareWhat) -> Result<u8, Failure> {
    let mut out = Outputs::new(&cli.out);
    let code;
    let report = match what {
        CompareWhat::Domination { input, other } => {
            let a = load(input)?;
            let b = load(&ScenarioArgs {
                scenario: other.clone(),
                max_radius: input.max_radius,
            })?;
            let (sa, sb) = (germ_series(&a)?, germ_series(&b)?);
            let grid = DominationGrid::default();
            let forward = search_domination(&sa, &sb, &grid);
            let backward = search_domination(&sb, &sa, &grid);
            code = if forward.is_some() && backward.is_some() { 0 } else { INCONCLUSIVE };
            let report = json!({
                "first": a.name,
                "second": b.name,
                "first_dominated_by_second": forward,
                "second_dominated_by_first": backward,
                "equivalent_on_window": code == 0,
            });
            out.add_json(format!("{}.vs.{}.domination.json", a.name, b.name), &report);
            report
        }
        CompareWhat::QuasiLattices { input } => {
            let scenario = load(input)?;
            let section = scenario
                .quasi_lattice
                .clone()
                .ok_or_else(|| Failure::invalid("scenario has no [quasi_lattice] section"))?;
            let metric = OrbitMetric::compute(
                &scenario.spec()?,
                &scenario.base_points[0],
                section.radius,
                scenario.engine_caps(),
            )?;
            let net1 = select_net(&metric, &section.net1)?;
            let net2 = select_net(&metric, &section.net2)?;
            let report = compare_quasi_lattices(&metric, &net1, &net2, section.c)?;
            let rechecked = report.recheck(&metric, &net1, &net2);
            code = if report.verified && rechecked { 0 } else { VERIFICATION_FAILED };
            let report = json!({ "scenario": scenario.name, "report": report, "rechecked": rechecked });
            out.add_json(format!("{}.quasi_lattice.json", scenario.name), &report);
            report
        }
        CompareWhat::GeneratingSystems { input, other } => {
            let a = load(input)?;
            let b = load(&ScenarioArgs {
                scenario: other.clone(),
                max_radius: input.max_radius,
            })?;
            if a.u != b.u {
                return Err(Failure::invalid("generating systems must share U"));
            }
            let d = compare_generating_systems(
                &a.spec()?,
                &b.spec()?,
                &a.base_points[0],
                a.caps.max_radius,
                a.engine_caps(),
            )?;
            code = 0;
            let report = json!({ "first": a.name, "second": b.name, "radius": a.caps.max_radius, "distortion": d });
            out.add_json(format!("{}.vs.{}.distortion.json", a.name, b.name), &report);
            report
        }
    };
    out.commit()?;
    println!("{report}");
    Ok(code)
}

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum AnyCertificate {
    Coverage(CoverageCertificate),
    PingPong(PingPongCertificate),
}

fn cmd_reverify(path: &Path) -> Result<u8, Failure> {
    let (kind, valid) = match read_json::<AnyCertificate>(path)? {
        AnyCertificate::Coverage(c) => ("coverage", c.reverify()),
        AnyCertificate::PingPong(c) => ("pingpong", c.is_valid()),
    };
    println!("{}", json!({ "kind": kind, "valid": valid }));
    Ok(if valid { 0 } else { VERIFICATION_FAILED })
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::invalid("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::invalid(e.to_string()))?;
    }
    match &cli.command {
        Command::Growth { input, point } => cmd_growth(cli, input, *point),
        Command::Recurrence {
            input,
            exclude_radius,
            closed,
        } => cmd_recurrence(cli, input, *exclude_radius, *closed),
        Command::Pingpong { action } => cmd_pingpong(cli, action),
        Command::Coverage { input } => cmd_coverage(cli, input),
        Command::Compare { what } => cmd_compare(cli, what),
        Command::Reverify { certificate } => cmd_reverify(certificate),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
