//! Configuration-driven experiments.
//!
//! A config is a TOML document:
//!
//! ```toml
//! schema_version = 1
//! output_dir = "results"            # relative to the config file
//!
//! [[scenario]]
//! id = "ogda_bilinear_1d"           # [A-Za-z0-9_.-]+, unique
//! solver = "ogda"                   # gda | ogda | eg | pp
//! iterations = 10000
//! certify = true                    # default: true unless solver = "gda"
//! schedule = [1, 10, 100]           # default: 1, 2, 4, ..., iterations
//! problem = { file = "problems/bilinear_1d.json" }
//! # or: problem = { kind = "quadratic", m = 5, n = 5, seed = 3 }
//! stepsize = { rule = "ogda_default" }
//! start = { x = [1.0], y = [1.0] }  # or { radius = 1.0, seed = 7 }
//! ```
//!
//! `pp` scenarios also take `pp_inner = "affine_exact" | "fixed_point"` and,
//! for the latter, optional `fixed_point_tol` and `fixed_point_max_iter`.
//! Omitted stepsizes default to `ogda_default` for OGDA and `eg_sigma` with
//! `sigma = 0.5` for EG; GDA and PP must state one.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, bound_value, certify_with_schedule, corollary_gap, log2_schedule, BoundCertificate, Certification};
use crate::base::{JointPoint, SaddleProblem};
use crate::oracles;
use crate::problems::{generate, random_start, ProblemSpec, QuadraticSaddle};
use crate::solvers::{self, PpInner, SolverKind, StepsizeRule, DEFAULT_FIXED_POINT_MAX_ITER, DEFAULT_FIXED_POINT_TOL};
use crate::trajectory::Trajectory;

pub const SCHEMA_VERSION: u32 = 1;
/// The only setting read from the environment.
pub const THREADS_ENV: &str = "SADDLEPOINT_THREADS";
pub const REPLAY_TOL: f64 = 1e-12;
pub const CERTIFICATES_FILE: &str = "certificates.json";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("{0}")]
    Config(String),
    #[error("scenario {id}: {message}")]
    Run { id: String, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Run { .. } | ExperimentError::Io(_) => 1,
        }
    }
}

fn config_err(id: &str, msg: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Config(format!("scenario `{id}`: {msg}"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: u32,
    output_dir: Option<PathBuf>,
    #[serde(default, rename = "scenario")]
    scenarios: Vec<RawScenario>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SolverName {
    Gda,
    Ogda,
    Eg,
    Pp,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InnerName {
    AffineExact,
    FixedPoint,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    id: String,
    solver: SolverName,
    pp_inner: Option<InnerName>,
    fixed_point_tol: Option<f64>,
    fixed_point_max_iter: Option<usize>,
    iterations: usize,
    certify: Option<bool>,
    schedule: Option<Vec<usize>>,
    problem: toml::Table,
    stepsize: Option<StepsizeRule>,
    start: toml::Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitStart {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomStart {
    radius: f64,
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    file: PathBuf,
}

/// A validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub problem: QuadraticSaddle,
    pub solver: SolverKind,
    pub rule: StepsizeRule,
    pub eta: f64,
    pub z0: JointPoint,
    pub iterations: usize,
    pub certify: bool,
    pub schedule: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub scenarios: Vec<Scenario>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base).map_err(|e| match e {
            ExperimentError::Config(msg) => ExperimentError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Parses and validates a config; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ExperimentError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(ExperimentError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let mut seen = BTreeSet::new();
        let mut scenarios = Vec::with_capacity(raw.scenarios.len());
        for s in raw.scenarios {
            if !seen.insert(s.id.clone()) {
                return Err(config_err(&s.id, "duplicate scenario id"));
            }
            scenarios.push(validate(s, base_dir)?);
        }
        if scenarios.is_empty() {
            return Err(ExperimentError::Config("config declares no [[scenario]] entries".into()));
        }
        let output_dir = base_dir.join(raw.output_dir.unwrap_or_else(|| PathBuf::from("results")));
        Ok(ExperimentConfig { output_dir, scenarios })
    }
}

fn validate(s: RawScenario, base_dir: &Path) -> Result<Scenario, ExperimentError> {
    let id = s.id;
    if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')) {
        return Err(ExperimentError::Config(format!(
            "scenario id `{id}` must be nonempty and use only [A-Za-z0-9_.-]"
        )));
    }
    if s.iterations == 0 {
        return Err(config_err(&id, "iterations must be at least 1"));
    }

    let solver = match (s.solver, s.pp_inner) {
        (SolverName::Pp, inner) => SolverKind::Pp(match inner.unwrap_or(InnerName::AffineExact) {
            InnerName::AffineExact => {
                if s.fixed_point_tol.is_some() || s.fixed_point_max_iter.is_some() {
                    return Err(config_err(&id, "fixed_point_* settings need pp_inner = \"fixed_point\""));
                }
                PpInner::AffineExact
            }
            InnerName::FixedPoint => {
                let tol = s.fixed_point_tol.unwrap_or(DEFAULT_FIXED_POINT_TOL);
                let max_iter = s.fixed_point_max_iter.unwrap_or(DEFAULT_FIXED_POINT_MAX_ITER);
                if !(tol > 0.0 && tol.is_finite()) || max_iter == 0 {
                    return Err(config_err(&id, "fixed_point_tol must be positive and fixed_point_max_iter at least 1"));
                }
                PpInner::FixedPoint { tol, max_iter }
            }
        }),
        (_, Some(_)) => return Err(config_err(&id, "pp_inner only applies to solver = \"pp\"")),
        (SolverName::Gda, None) => SolverKind::Gda,
        (SolverName::Ogda, None) => SolverKind::Ogda,
        (SolverName::Eg, None) => SolverKind::Eg,
    };
    if !matches!(solver, SolverKind::Pp(PpInner::FixedPoint { .. }))
        && (s.fixed_point_tol.is_some() || s.fixed_point_max_iter.is_some())
    {
        return Err(config_err(&id, "fixed_point_* settings need pp_inner = \"fixed_point\""));
    }

    let certify = s.certify.unwrap_or(solver.has_bound());
    if certify && !solver.has_bound() {
        return Err(config_err(&id, format!("no bound defined for solver {solver}")));
    }

    let problem = load_problem(&id, s.problem, base_dir)?;
    let l = problem.profile().l_max;

    let rule = match (s.stepsize, solver) {
        (Some(rule), _) => rule,
        (None, SolverKind::Ogda) => StepsizeRule::OgdaDefault,
        (None, SolverKind::Eg) => StepsizeRule::eg_default(),
        (None, _) => return Err(config_err(&id, format!("solver {solver} needs an explicit stepsize"))),
    };
    let eta = rule.resolve(solver, l).map_err(|e| config_err(&id, e))?;
    if solver == SolverKind::Pp(PpInner::AffineExact) && problem.affine_operator().is_none() {
        return Err(config_err(&id, "affine_exact needs a problem with affine operator"));
    }

    let z0 = load_start(&id, s.start, &problem)?;

    let schedule = match s.schedule {
        None => log2_schedule(s.iterations),
        Some(list) => {
            if list.is_empty() {
                return Err(config_err(&id, "schedule must not be empty"));
            }
            if list.iter().any(|&n| n == 0 || n > s.iterations) {
                return Err(config_err(&id, format!("schedule entries must lie in 1..={}", s.iterations)));
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(config_err(&id, "schedule must be strictly increasing"));
            }
            list
        }
    };

    Ok(Scenario {
        id,
        problem,
        solver,
        rule,
        eta,
        z0,
        iterations: s.iterations,
        certify,
        schedule,
    })
}

fn load_problem(id: &str, table: toml::Table, base_dir: &Path) -> Result<QuadraticSaddle, ExperimentError> {
    if table.contains_key("file") {
        let f: ProblemFile = table.try_into().map_err(|e| config_err(id, format!("problem: {e}")))?;
        let path = base_dir.join(&f.file);
        let text = fs::read_to_string(&path)
            .map_err(|e| config_err(id, format!("problem file {}: {e}", path.display())))?;
        QuadraticSaddle::from_json(&text).map_err(|e| config_err(id, format!("problem file {}: {e}", path.display())))
    } else {
        let spec: ProblemSpec = table.try_into().map_err(|e| config_err(id, format!("problem: {e}")))?;
        generate(&spec).map_err(|e| config_err(id, format!("problem: {e}")))
    }
}

fn load_start(id: &str, table: toml::Table, problem: &QuadraticSaddle) -> Result<JointPoint, ExperimentError> {
    let z0 = if table.contains_key("radius") {
        let r: RandomStart = table.try_into().map_err(|e| config_err(id, format!("start: {e}")))?;
        random_start(problem, r.radius, r.seed)
    } else {
        let e: ExplicitStart = table.try_into().map_err(|e| config_err(id, format!("start: {e}")))?;
        JointPoint::from_slices(&e.x, &e.y)
    }
    .map_err(|e| config_err(id, format!("start: {e}")))?;
    let (m, n) = problem.dims();
    z0.check_dims(m, n).map_err(|e| config_err(id, format!("start: {e}")))?;
    Ok(z0)
}

/// Everything produced by one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub id: String,
    pub solver: SolverKind,
    pub eta: f64,
    pub trajectory: Trajectory,
    /// Corollary gap at each prefix `1..=len`.
    pub gaps: Vec<f64>,
    pub certification: Option<Certification>,
    pub failure: Option<String>,
}

impl ScenarioOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.certification.as_ref().is_none_or(Certification::all_pass)
    }
}

pub fn run_scenario(s: &Scenario) -> ScenarioOutcome {
    let (trajectory, mut failure) = match solvers::run(&s.problem, s.solver, &s.z0, s.iterations, s.rule) {
        Ok(t) => (t, None),
        Err(f) => (*f.partial, Some(f.error.to_string())),
    };
    let mut gaps = Vec::with_capacity(trajectory.len());
    for r in &trajectory.records {
        match corollary_gap(&s.problem, &r.ergodic) {
            Ok(g) => gaps.push(g),
            Err(e) => {
                failure.get_or_insert_with(|| e.to_string());
                break;
            }
        }
    }
    let certification = if s.certify && failure.is_none() {
        match certify_with_schedule(&trajectory, &s.problem, &s.schedule) {
            Ok(c) => Some(c),
            Err(e) => {
                failure = Some(e.to_string());
                None
            }
        }
    } else {
        None
    };
    ScenarioOutcome {
        id: s.id.clone(),
        solver: s.solver,
        eta: s.eta,
        trajectory,
        gaps,
        certification,
        failure,
    }
}

/// Runs every scenario on a pool sized by [`THREADS_ENV`] (default: rayon's choice).
/// Outcomes come back in config order.
pub fn run_all(config: &ExperimentConfig) -> Result<Vec<ScenarioOutcome>, ExperimentError> {
    let pool = thread_pool()?;
    Ok(pool.install(|| config.scenarios.par_iter().map(run_scenario).collect()))
}

fn thread_pool() -> Result<rayon::ThreadPool, ExperimentError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| ExperimentError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| ExperimentError::Io(e.to_string()))
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Trajectory CSV: one row per iterate `z_k`, `k = 1..N`.
pub fn trajectory_csv(s: &Scenario, o: &ScenarioOutcome) -> String {
    let (m, n) = s.problem.dims();
    let mut out = String::from("scenario_id,k");
    for i in 0..m {
        let _ = write!(out, ",x{i}");
    }
    for j in 0..n {
        let _ = write!(out, ",y{j}");
    }
    out.push_str(",f_at_ergodic,corollary_gap,bound_value,in_ball\n");

    let constants = o
        .certification
        .as_ref()
        .and_then(|_| analysis::constants_for(&o.trajectory, &s.problem, 1).ok());
    for (idx, r) in o.trajectory.records.iter().enumerate() {
        let k = idx + 1;
        let _ = write!(out, "{},{k}", s.id);
        for v in r.iterate.iter() {
            let _ = write!(out, ",{}", fmt_f(v));
        }
        let _ = write!(out, ",{}", fmt_f(r.f_at_ergodic));
        match o.gaps.get(idx) {
            Some(g) => {
                let _ = write!(out, ",{}", fmt_f(*g));
            }
            None => out.push(','),
        }
        match (&constants, &o.certification) {
            (Some((theorem, c)), Some(cert)) => {
                let bound = bound_value(*theorem, &analysis::BoundConstants { n: k, ..*c });
                let _ = write!(
                    out,
                    ",{},{}",
                    bound.map(fmt_f).unwrap_or_default(),
                    u8::from(cert.in_ball[idx])
                );
            }
            _ => out.push_str(",,"),
        }
        out.push('\n');
    }
    out
}

/// One certificate row of `certificates.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub scenario_id: String,
    #[serde(flatten)]
    pub certificate: BoundCertificate,
    /// Every iterate up to `n` lies in the scheme's compact ball.
    pub in_ball_through_n: bool,
}

pub fn certificate_rows(outcomes: &[ScenarioOutcome]) -> Vec<CertificateRow> {
    let mut rows: Vec<CertificateRow> = outcomes
        .iter()
        .filter_map(|o| o.certification.as_ref().map(|c| (o, c)))
        .flat_map(|(o, c)| {
            c.bounds.iter().map(move |b| CertificateRow {
                scenario_id: o.id.clone(),
                certificate: b.clone(),
                in_ball_through_n: c.in_ball[..b.n].iter().all(|x| *x),
            })
        })
        .collect();
    rows.sort_by(|a, b| {
        a.scenario_id
            .cmp(&b.scenario_id)
            .then(a.certificate.n.cmp(&b.certificate.n))
    });
    rows
}

pub fn summary_table(outcomes: &[ScenarioOutcome]) -> String {
    let mut sorted: Vec<&ScenarioOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    let mut out = format!(
        "{:<28} {:<6} {:>7} {:>12} {:>9} {:>7} {:>12} {:>12}  status\n",
        "scenario", "solver", "N", "eta", "certs", "outside", "final_gap", "final_bound"
    );
    for o in sorted {
        let (certs, outside, bound) = match &o.certification {
            Some(c) => (
                format!("{}/{}", c.bounds.iter().filter(|b| b.pass).count(), c.bounds.len()),
                c.ball_violations().to_string(),
                c.bounds.last().map(|b| format!("{:.5e}", b.bound)).unwrap_or_default(),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let gap = o.gaps.last().map(|g| format!("{g:.5e}")).unwrap_or_else(|| "-".into());
        let status = match (&o.failure, o.passed()) {
            (Some(f), _) => format!("FAILED: {f}"),
            (None, true) => "ok".into(),
            (None, false) => "CERTIFICATE FAILED".into(),
        };
        let _ = writeln!(
            out,
            "{:<28} {:<6} {:>7} {:>12.6e} {:>9} {:>7} {:>12} {:>12}  {status}",
            o.id,
            o.solver.name(),
            o.trajectory.len(),
            o.eta,
            certs,
            outside,
            gap,
            bound
        );
    }
    out
}

/// Outcome of `run <config>`.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub outcomes: Vec<ScenarioOutcome>,
    pub summary: String,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.outcomes.iter().all(ScenarioOutcome::passed) {
            0
        } else {
            1
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), ExperimentError> {
    fs::write(path, contents).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))
}

/// Runs a config and writes `<id>.csv`, `certificates.json` and `summary.txt`
/// into `out` (or the config's `output_dir`).
pub fn run_experiments(config_path: &Path, out: Option<&Path>) -> Result<RunReport, ExperimentError> {
    let config = ExperimentConfig::load(config_path)?;
    let output_dir = out.map(Path::to_path_buf).unwrap_or_else(|| config.output_dir.clone());
    let outcomes = run_all(&config)?;
    fs::create_dir_all(&output_dir).map_err(|e| ExperimentError::Io(format!("{}: {e}", output_dir.display())))?;
    for (s, o) in config.scenarios.iter().zip(&outcomes) {
        write_file(&output_dir.join(format!("{}.csv", s.id)), &trajectory_csv(s, o))?;
    }
    let json = serde_json::to_string_pretty(&certificate_rows(&outcomes))
        .map_err(|e| ExperimentError::Io(e.to_string()))?;
    write_file(&output_dir.join(CERTIFICATES_FILE), &(json + "\n"))?;
    let summary = summary_table(&outcomes);
    write_file(&output_dir.join(SUMMARY_FILE), &summary)?;
    Ok(RunReport {
        output_dir,
        outcomes,
        summary,
    })
}

/// Solver output against the naive oracle replay for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub id: String,
    pub max_deviation: Option<f64>,
    pub error: Option<String>,
}

impl ReplayOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_deviation.is_some_and(|d| d <= REPLAY_TOL)
    }
}

pub fn replay_scenario(s: &Scenario) -> ReplayOutcome {
    let fail = |msg: String| ReplayOutcome {
        id: s.id.clone(),
        max_deviation: None,
        error: Some(msg),
    };
    let solved = match solvers::run(&s.problem, s.solver, &s.z0, s.iterations, s.rule) {
        Ok(t) => t,
        Err(f) => return fail(format!("solver: {}", f.error)),
    };
    let naive = match oracles::recurrence_replay(s.solver, &s.problem, &s.z0, s.iterations, s.eta) {
        Ok(t) => t,
        Err(e) => return fail(format!("replay: {e}")),
    };
    match oracles::max_deviation(&solved, &naive) {
        Some(d) => ReplayOutcome {
            id: s.id.clone(),
            max_deviation: Some(d),
            error: None,
        },
        None => fail("trajectory shapes differ".into()),
    }
}

pub fn replay_all(config: &ExperimentConfig) -> Result<Vec<ReplayOutcome>, ExperimentError> {
    let pool = thread_pool()?;
    Ok(pool.install(|| config.scenarios.par_iter().map(replay_scenario).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
schema_version = 1
[[scenario]]
id = "s"
solver = "ogda"
iterations = 8
problem = { kind = "bilinear", m = 1, n = 1, seed = 1 }
start = { x = [1.0], y = [1.0] }
"#;

    fn parse(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        ExperimentConfig::parse(text, Path::new("."))
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let c = parse(BASE).unwrap();
        let s = &c.scenarios[0];
        assert_eq!(s.rule, StepsizeRule::OgdaDefault);
        assert!(s.certify);
        assert_eq!(s.schedule, vec![1, 2, 4, 8]);
        assert_eq!(c.output_dir, Path::new("./results"));
    }

    #[test]
    fn rejects_sigma_outside_unit_interval() {
        let text = BASE.replace("\"ogda\"", "\"eg\"") + "stepsize = { rule = \"eg_sigma\", sigma = 1.5 }\n";
        let e = parse(&text).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("sigma must lie in (0,1)"), "{e}");
    }

    #[test]
    fn rejects_certified_gda() {
        let text = BASE.replace("\"ogda\"", "\"gda\"") + "certify = true\nstepsize = { rule = \"explicit\", eta = 0.1 }\n";
        let e = parse(&text).unwrap_err();
        assert!(e.to_string().contains("no bound defined for solver"), "{e}");
        let ok = BASE.replace("\"ogda\"", "\"gda\"") + "stepsize = { rule = \"explicit\", eta = 0.1 }\n";
        assert!(!parse(&ok).unwrap().scenarios[0].certify);
    }

    #[test]
    fn rejects_bad_documents() {
        for (text, needle) in [
            (BASE.replace("schema_version = 1", "schema_version = 2"), "schema_version"),
            (BASE.replace("iterations = 8", "iterations = 0"), "iterations"),
            (BASE.replace("x = [1.0]", "x = [1.0, 2.0]"), "start"),
            (BASE.replace("m = 1", "m = 1, colour = 3"), "colour"),
            (BASE.replace("id = \"s\"", "id = \"a/b\""), "id"),
            (BASE.to_string() + "schedule = [4, 2]\n", "increasing"),
            (BASE.to_string() + "schedule = [16]\n", "schedule"),
            (BASE.to_string() + "pp_inner = \"fixed_point\"\n", "pp_inner"),
            (format!("{BASE}{}", BASE.replace("schema_version = 1", "")), "duplicate"),
            ("schema_version = 1\n".to_string(), "no [[scenario]]"),
        ] {
            let e = parse(&text).unwrap_err();
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains(needle), "{needle}: {e}");
        }
    }

    #[test]
    fn random_start_and_pp_scenarios() {
        let text = BASE
            .replace("\"ogda\"", "\"pp\"")
            .replace("x = [1.0], y = [1.0]", "radius = 1.0, seed = 4")
            + "stepsize = { rule = \"pp_fixed\", eta = 2.0 }\n";
        let c = parse(&text).unwrap();
        let s = &c.scenarios[0];
        assert_eq!(s.solver, SolverKind::Pp(PpInner::AffineExact));
        let d = crate::base::squared_distance(&s.z0, s.problem.saddle()).unwrap();
        assert!(d <= 1.0);
        let o = run_scenario(s);
        assert!(o.passed());
    }

    #[test]
    fn csv_layout() {
        let c = parse(BASE).unwrap();
        let o = run_scenario(&c.scenarios[0]);
        let csv = trajectory_csv(&c.scenarios[0], &o);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "scenario_id,k,x0,y0,f_at_ergodic,corollary_gap,bound_value,in_ball");
        assert_eq!(lines.len(), 9);
        let fields: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(fields[0], "s");
        assert_eq!(fields[1], "1");
        assert_eq!(fields[7], "1");
        assert!(fields[2].contains('e'));
    }

    #[test]
    fn certificate_rows_are_sorted() {
        let two = BASE.replace("id = \"s\"", "id = \"b\"") + &BASE.replace("schema_version = 1", "").replace("id = \"s\"", "id = \"a\"");
        let c = parse(&two).unwrap();
        let outcomes = run_all(&c).unwrap();
        let rows = certificate_rows(&outcomes);
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].scenario_id, "a");
        assert!(rows.windows(2).all(|w| (&w[0].scenario_id, w[0].certificate.n) < (&w[1].scenario_id, w[1].certificate.n)));
    }
}
