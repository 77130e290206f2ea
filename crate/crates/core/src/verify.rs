//! The property battery behind `saddlepoint verify`.
//!
//! Every check runs over a seeded benchmark problem set and reports a row in
//! a pass/fail matrix, keyed by a descriptive check name.

use std::fmt::Write as _;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analysis::{
    certify, ergodic_inequality_check, restricted_gap, CompactBall, GapMethod, REL_TOL,
};
use crate::base::{operator_f, squared_distance, JointPoint, SaddleProblem};
use crate::error::{Error, Result};
use crate::oracles::{self, DEFAULT_FD_STEP};
use crate::problems::{benchmark_specs, generate, random_start, ProblemKind, ProblemSpec, QuadraticSaddle};
use crate::solvers::{run, PpInner, SolverKind, StepsizeRule};
use crate::trajectory::Trajectory;

/// Check names and one-line statements, in report order.
pub const CHECKS: &[(&str, &str)] = &[
    ("gradient_finite_difference", "analytic gradients match central differences"),
    ("saddle_definition", "f(x*, y) <= f* <= f(x, y*) at sampled points"),
    ("saddle_stationary", "F(z*) = 0"),
    ("operator_monotone", "<F(z1) - F(z2), z1 - z2> >= 0"),
    ("operator_lipschitz", "|F(z1) - F(z2)| <= |M|_2 |z1 - z2|"),
    ("ergodic_inequality", "f(x^, y) - f(x, y^) <= mean of F(z_k)'(z_k - z)"),
    ("ogda_bounded", "OGDA iterates stay in the ball of squared radius 2D"),
    ("ogda_rate", "OGDA gap <= D(8L + 1/(2 eta))/N"),
    ("ogda_error_vector", "OGDA perturbed proximal recursion reconstructs"),
    ("eg_energy_decrease", "EG per-step energy decrease"),
    ("eg_summability", "EG sum of |z_{k+1/2} - z_k|^2 <= D/(1 - sigma^2)"),
    ("eg_bounded", "EG iterates and midpoints stay in their ball"),
    ("eg_rate", "EG gap <= DL(9 + 17/(2(1 - sigma^2)))/N"),
    ("eg_error_vector", "EG midpoint recursion reconstructs"),
    ("pp_nonexpansive", "PP distance to z* shrinks by at least the step length"),
    ("pp_rate", "PP gap <= D/(eta N)"),
    ("gda_divergence", "GDA distance to z* strictly increases on bilinear problems"),
    ("replay_agreement", "solver output matches the naive replay"),
    ("restricted_gap_oracle", "analytic restricted gap matches the grid oracle"),
];

pub const DEFAULT_COUNT: usize = 20;
pub const DEFAULT_SEED: u64 = 1000;
pub const DEFAULT_ITERATIONS: usize = 10_000;
pub const GDA_ITERATIONS: usize = 200;
pub const PP_STEPSIZES: [f64; 3] = [0.5, 1.0, 2.0];
pub const START_RADIUS: f64 = 1.0;
pub const STEP_TOL: f64 = 1e-10;
pub const REPLAY_TOL: f64 = 1e-12;
const FD_TOL: f64 = 1e-6;
const SAMPLE_PAIRS: usize = 1000;
const FD_POINTS: usize = 100;
const GRID_MAX_DIM: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub count: usize,
    pub base_seed: u64,
    pub iterations: usize,
    /// Negative control: run OGDA at `η = 2/L`, outside its admissible range.
    pub inject_fault: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            count: DEFAULT_COUNT,
            base_seed: DEFAULT_SEED,
            iterations: DEFAULT_ITERATIONS,
            inject_fault: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub statement: &'static str,
    pub cases: usize,
    /// `"seed <s>: <detail>"` for each failing case.
    pub failures: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    /// Largest sampled `|ΔF|/|Δz|` divided by the block constant `l_max`.
    pub max_block_ratio: f64,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn matrix(&self) -> String {
        let mut out = format!("{:<28} {:>6} {:>6}  {}\n", "check", "cases", "fail", "status");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<28} {:>6} {:>6}  {}",
                c.name,
                c.cases,
                c.failures.len(),
                if c.passed() { "pass" } else { "FAIL" }
            );
        }
        for c in self.checks.iter().filter(|c| !c.passed()) {
            let _ = writeln!(out, "\n{} ({}):", c.name, c.statement);
            for f in &c.failures {
                let _ = writeln!(out, "  {f}");
            }
        }
        let _ = writeln!(
            out,
            "\nlargest sampled |dF|/|dz| relative to the block constant l_max: {:.6}",
            self.max_block_ratio
        );
        out
    }
}

/// Outcome of one check on one problem; `None` means pass.
type Case = (usize, Option<String>);

fn check_index(name: &str) -> usize {
    CHECKS.iter().position(|(n, _)| *n == name).expect("known check")
}

fn case(name: &str, failure: Option<String>) -> Case {
    (check_index(name), failure)
}

fn fail_if(cond: bool, detail: impl FnOnce() -> String) -> Option<String> {
    cond.then(detail)
}

pub fn verify_suite(opts: &VerifyOptions) -> Result<VerifyReport> {
    if opts.count == 0 {
        return Err(Error::Config("nothing to verify".into()));
    }
    if opts.iterations == 0 {
        return Err(Error::Config("iterations must be at least 1".into()));
    }
    let specs = benchmark_specs(opts.count, opts.base_seed);
    let per_problem: Vec<(Vec<Case>, f64)> = specs
        .par_iter()
        .map(|spec| verify_problem(spec, opts))
        .collect::<Result<_>>()?;

    let mut checks: Vec<CheckResult> = CHECKS
        .iter()
        .map(|(name, statement)| CheckResult {
            name,
            statement,
            cases: 0,
            failures: Vec::new(),
        })
        .collect();
    let mut max_block_ratio = 0.0_f64;
    for (spec, (cases, ratio)) in specs.iter().zip(per_problem) {
        max_block_ratio = max_block_ratio.max(ratio);
        for (idx, failure) in cases {
            checks[idx].cases += 1;
            if let Some(detail) = failure {
                checks[idx].failures.push(format!("seed {}: {detail}", spec.seed));
            }
        }
    }
    Ok(VerifyReport {
        checks,
        max_block_ratio,
    })
}

fn gaussian_point(rng: &mut ChaCha8Rng, m: usize, n: usize, scale: f64) -> JointPoint {
    let x = DVector::from_fn(m, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    let y = DVector::from_fn(n, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
    JointPoint { x, y }
}

fn near(rng: &mut ChaCha8Rng, center: &JointPoint, scale: f64) -> JointPoint {
    let (m, n) = center.dims();
    let d = gaussian_point(rng, m, n, scale);
    JointPoint {
        x: &center.x + d.x,
        y: &center.y + d.y,
    }
}

/// Largest `|F_fd − F| / max(1, |F|)` (infinity norms) over `points` samples.
pub fn finite_difference_error(problem: &QuadraticSaddle, rng: &mut ChaCha8Rng, points: usize) -> Result<f64> {
    let mut worst = 0.0_f64;
    for _ in 0..points {
        let z = near(rng, problem.saddle(), 2.0);
        let exact = operator_f(problem, &z)?.stacked();
        let fd = oracles::finite_diff_gradient(problem, &z, DEFAULT_FD_STEP)?.stacked();
        worst = worst.max((fd - &exact).amax() / exact.amax().max(1.0));
    }
    Ok(worst)
}

/// Sampled monotonicity margin and Lipschitz ratio: returns the smallest
/// `⟨ΔF, Δz⟩ / (1 + |Δz|²)` and the largest `|ΔF| / |Δz|`.
pub fn sample_operator(problem: &QuadraticSaddle, rng: &mut ChaCha8Rng, pairs: usize) -> Result<(f64, f64)> {
    let (mut min_inner, mut max_ratio) = (f64::INFINITY, 0.0_f64);
    for _ in 0..pairs {
        let z1 = near(rng, problem.saddle(), 3.0);
        let z2 = near(rng, problem.saddle(), 3.0);
        let df = operator_f(problem, &z1)?.sub(&operator_f(problem, &z2)?)?;
        let dz = z1.sub(&z2)?;
        let dz2 = dz.norm_squared();
        min_inner = min_inner.min(df.dot_point(&dz)? / (1.0 + dz2));
        if dz2 > 0.0 {
            max_ratio = max_ratio.max(df.norm() / dz2.sqrt());
        }
    }
    Ok((min_inner, max_ratio))
}

/// Worst per-step violation of the EG energy inequality
/// `|z_{k+1} − z*|² + (1 − σ²)|z_{k+½} − z_k|² ≤ |z_k − z*|²`
/// and the total `Σ|z_{k+½} − z_k|²`.
pub fn eg_energy(trajectory: &Trajectory, star: &JointPoint, sigma: f64) -> Result<(f64, f64)> {
    let mut worst = f64::NEG_INFINITY;
    let mut total = 0.0;
    let mut prev = &trajectory.z0;
    for r in &trajectory.records {
        let mid = r.midpoint.as_ref().ok_or_else(|| Error::Config("not an EG trajectory".into()))?;
        let step = squared_distance(mid, prev)?;
        let excess = squared_distance(&r.iterate, star)? + (1.0 - sigma * sigma) * step - squared_distance(prev, star)?;
        worst = worst.max(excess);
        total += step;
        prev = &r.iterate;
    }
    Ok((worst, total))
}

/// Largest deviation from the exact EG identity
/// `|z_{k+1} − z*|² + |z_{k+½} − z_k|² − |z_{k+½} − z_{k+1}|² + 2η⟨F(z_{k+½}), z_{k+½} − z*⟩ = |z_k − z*|²`.
pub fn eg_identity_deviation<P: SaddleProblem + ?Sized>(
    problem: &P,
    trajectory: &Trajectory,
    star: &JointPoint,
) -> Result<f64> {
    let eta = trajectory.stepsize;
    let mut worst = 0.0_f64;
    let mut prev = &trajectory.z0;
    for r in &trajectory.records {
        let mid = r.midpoint.as_ref().ok_or_else(|| Error::Config("not an EG trajectory".into()))?;
        let slack = 2.0 * eta * operator_f(problem, mid)?.dot_point(&mid.sub(star)?)?;
        let lhs = squared_distance(&r.iterate, star)? + squared_distance(mid, prev)? - squared_distance(mid, &r.iterate)?
            + slack;
        worst = worst.max((lhs - squared_distance(prev, star)?).abs());
        prev = &r.iterate;
    }
    Ok(worst)
}

/// Worst violation of `|z_{k+1} − z*|² ≤ |z_k − z*|² − |z_{k+1} − z_k|²`.
pub fn pp_nonexpansive_excess(trajectory: &Trajectory, star: &JointPoint) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    let mut prev = &trajectory.z0;
    for r in &trajectory.records {
        let excess = squared_distance(&r.iterate, star)? + squared_distance(&r.iterate, prev)? - squared_distance(prev, star)?;
        worst = worst.max(excess);
        prev = &r.iterate;
    }
    Ok(worst)
}

/// Largest error-vector reconstruction residual recorded along a run.
pub fn max_error_residual(trajectory: &Trajectory) -> Option<f64> {
    trajectory
        .records
        .iter()
        .map(|r| r.error_residual)
        .try_fold(0.0_f64, |acc, r| r.map(|v| acc.max(v)))
}

/// Upper bound on how much `f` can vary across one grid cell when the free
/// block ranges over a ball of radius `R` split into `points_per_dim` points
/// per axis: `δ(|g| + |H|R) + ½|H|δ²` with `δ = h√d`, `h = 2R/(points_per_dim − 1)`,
/// summed over both blocks.
pub fn grid_cell_tolerance(
    problem: &QuadraticSaddle,
    x_hat: &DVector<f64>,
    y_hat: &DVector<f64>,
    ball: &CompactBall,
    points_per_dim: usize,
) -> Result<f64> {
    let r = ball.radius();
    let h = 2.0 * r / (points_per_dim as f64 - 1.0);
    let c = &ball.center;
    let at_yc = JointPoint::new(x_hat.clone(), c.y.clone())?;
    let at_xc = JointPoint::new(c.x.clone(), y_hat.clone())?;
    let q_norm = crate::linalg::spectral_norm_upper(problem.q())?;
    let p_norm = crate::linalg::spectral_norm_upper(problem.p())?;
    let term = |g: f64, hn: f64, d: usize| {
        let delta = h * (d as f64).sqrt();
        delta * (g + hn * r) + 0.5 * hn * delta * delta
    };
    let (m, n) = problem.dims();
    Ok(term(problem.grad_y(&at_yc).norm(), q_norm, n) + term(problem.grad_x(&at_xc).norm(), p_norm, m))
}

fn certificate_failure(t: &Trajectory, problem: &QuadraticSaddle) -> Result<(Option<String>, Option<String>)> {
    let cert = certify(t, problem)?;
    let rate = cert
        .bounds
        .iter()
        .find(|b| !b.pass)
        .map(|b| format!("N = {}: gap {:.6e} exceeds bound {:.6e}", b.n, b.gap, b.bound));
    let ball = (cert.ball_violations() > 0).then(|| {
        let first = cert.in_ball.iter().position(|b| !b).unwrap_or(0);
        format!("{} iterates outside the ball, first at k = {}", cert.ball_violations(), first + 1)
    });
    Ok((rate, ball))
}

fn verify_problem(spec: &ProblemSpec, opts: &VerifyOptions) -> Result<(Vec<Case>, f64)> {
    let problem = generate(spec)?;
    let star = problem.saddle().clone();
    let (m, n) = problem.dims();
    let l = problem.profile().l_max;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let z0 = random_start(&problem, START_RADIUS, spec.seed.wrapping_add(1))?;
    let d = squared_distance(&z0, &star)?;
    let mut cases = Vec::new();

    let fd = finite_difference_error(&problem, &mut rng, FD_POINTS)?;
    cases.push(case("gradient_finite_difference", fail_if(fd > FD_TOL, || format!("relative error {fd:.3e}"))));

    let f_star = problem.value(&star);
    let mut worst_def = 0.0_f64;
    for _ in 0..100 {
        let z = near(&mut rng, &star, 2.0);
        let upper = problem.value(&JointPoint::new(star.x.clone(), z.y.clone())?) - f_star;
        let lower = f_star - problem.value(&JointPoint::new(z.x.clone(), star.y.clone())?);
        worst_def = worst_def.max(upper).max(lower);
    }
    cases.push(case("saddle_definition", fail_if(worst_def > 1e-10, || format!("violation {worst_def:.3e}"))));

    let f_at_star = operator_f(&problem, &star)?.norm();
    cases.push(case(
        "saddle_stationary",
        fail_if(f_at_star > 1e-10 * (1.0 + star.norm()), || format!("|F(z*)| = {f_at_star:.3e}")),
    ));

    let (min_inner, max_ratio) = sample_operator(&problem, &mut rng, SAMPLE_PAIRS)?;
    cases.push(case(
        "operator_monotone",
        fail_if(min_inner < -1e-10, || format!("inner product margin {min_inner:.3e}")),
    ));
    let op_norm = problem.operator_lipschitz()?;
    cases.push(case(
        "operator_lipschitz",
        fail_if(max_ratio > op_norm * (1.0 + 1e-8), || format!("ratio {max_ratio:.9} exceeds {op_norm:.9}")),
    ));

    // OGDA, with the fault hook.
    let ogda_rule = if opts.inject_fault {
        StepsizeRule::Unchecked { eta: 2.0 / l }
    } else {
        StepsizeRule::OgdaDefault
    };
    match run(&problem, SolverKind::Ogda, &z0, opts.iterations, ogda_rule) {
        Ok(t) => {
            let (rate, ball) = certificate_failure(&t, &problem)?;
            cases.push(case("ogda_bounded", ball));
            cases.push(case("ogda_rate", rate));
            let res = max_error_residual(&t).unwrap_or(f64::INFINITY);
            cases.push(case("ogda_error_vector", fail_if(res > STEP_TOL, || format!("residual {res:.3e}"))));

            let prefix: Vec<JointPoint> = t.records.iter().take(50).map(|r| r.iterate.clone()).collect();
            let mut probes: Vec<JointPoint> = (0..10).map(|_| near(&mut rng, &star, 1.0)).collect();
            probes.push(t.ergodic_at(prefix.len()).expect("prefix").clone());
            let mut failure = None;
            for probe in &probes {
                let chk = ergodic_inequality_check(&problem, &prefix, probe)?;
                if !chk.pass {
                    failure = Some(format!("lhs {:.6e} > rhs {:.6e}", chk.lhs, chk.rhs));
                    break;
                }
            }
            cases.push(case("ergodic_inequality", failure));
            cases.push(case("replay_agreement", replay_failure(&problem, &t, &z0)?));

            if m <= GRID_MAX_DIM && n <= GRID_MAX_DIM {
                cases.push(case("restricted_gap_oracle", gap_oracle_failure(&problem, &t, &z0)?));
            }
        }
        Err(f) => {
            let msg = format!("run failed: {f}");
            cases.push(case("ogda_bounded", Some(msg.clone())));
            cases.push(case("ogda_rate", Some(msg)));
        }
    }

    match run(&problem, SolverKind::Eg, &z0, opts.iterations, StepsizeRule::eg_default()) {
        Ok(t) => {
            let sigma = t.rule.sigma(t.stepsize, l);
            let (excess, total) = eg_energy(&t, &star, sigma)?;
            cases.push(case("eg_energy_decrease", fail_if(excess > STEP_TOL, || format!("excess {excess:.3e}"))));
            let cap = d / (1.0 - sigma * sigma);
            cases.push(case(
                "eg_summability",
                fail_if(total > cap + 1e-9, || format!("sum {total:.9e} exceeds {cap:.9e}")),
            ));
            let (rate, ball) = certificate_failure(&t, &problem)?;
            cases.push(case("eg_bounded", ball));
            cases.push(case("eg_rate", rate));
            let res = max_error_residual(&t).unwrap_or(f64::INFINITY);
            cases.push(case("eg_error_vector", fail_if(res > STEP_TOL, || format!("residual {res:.3e}"))));
            cases.push(case("replay_agreement", replay_failure(&problem, &t, &z0)?));
        }
        Err(f) => cases.push(case("eg_rate", Some(format!("run failed: {f}")))),
    }

    for eta in PP_STEPSIZES {
        let solver = SolverKind::Pp(PpInner::AffineExact);
        match run(&problem, solver, &z0, opts.iterations, StepsizeRule::PpFixed { eta }) {
            Ok(t) => {
                let excess = pp_nonexpansive_excess(&t, &star)?;
                cases.push(case(
                    "pp_nonexpansive",
                    fail_if(excess > STEP_TOL, || format!("eta {eta}: excess {excess:.3e}")),
                ));
                let (rate, _) = certificate_failure(&t, &problem)?;
                cases.push(case("pp_rate", rate.map(|r| format!("eta {eta}: {r}"))));
                cases.push(case("replay_agreement", replay_failure(&problem, &t, &z0)?));
            }
            Err(f) => cases.push(case("pp_rate", Some(format!("eta {eta}: run failed: {f}")))),
        }
    }

    if problem.kind() == ProblemKind::Bilinear {
        let eta = 0.5 / l;
        match run(&problem, SolverKind::Gda, &z0, GDA_ITERATIONS, StepsizeRule::Explicit { eta }) {
            Ok(t) => {
                let dists: Vec<f64> = t
                    .iterates()
                    .map(|z| squared_distance(z, &star))
                    .collect::<Result<_>>()?;
                let bad = dists.windows(2).position(|w| w[1] <= w[0]);
                cases.push(case("gda_divergence", bad.map(|k| format!("distance did not grow at k = {k}"))));
                cases.push(case("replay_agreement", replay_failure(&problem, &t, &z0)?));
            }
            Err(f) => cases.push(case("gda_divergence", Some(format!("run failed: {f}")))),
        }
    }

    Ok((cases, max_ratio / l))
}

fn replay_failure(problem: &QuadraticSaddle, t: &Trajectory, z0: &JointPoint) -> Result<Option<String>> {
    let naive = oracles::recurrence_replay(t.solver, problem, z0, t.len(), t.stepsize)?;
    Ok(match oracles::max_deviation(t, &naive) {
        Some(dev) if dev <= REPLAY_TOL => None,
        Some(dev) => Some(format!("{}: deviation {dev:.3e}", t.solver)),
        None => Some(format!("{}: trajectory shapes differ", t.solver)),
    })
}

/// Points per axis for the grid oracle in `d` free dimensions.
pub fn grid_points_for(dim: usize) -> usize {
    if dim <= 1 {
        2001
    } else {
        401
    }
}

fn gap_oracle_failure(problem: &QuadraticSaddle, t: &Trajectory, z0: &JointPoint) -> Result<Option<String>> {
    let ball = CompactBall::ogda(problem.saddle(), z0)?;
    let (m, n) = problem.dims();
    let ppd = grid_points_for(m.max(n));
    for k in [1, t.len()] {
        let e = t.ergodic_at(k).expect("prefix");
        let analytic = restricted_gap(problem, &e.x, &e.y, &ball, GapMethod::AnalyticQuadratic)?;
        let grid = restricted_gap(problem, &e.x, &e.y, &ball, GapMethod::Grid { points_per_dim: ppd })?;
        let tol = grid_cell_tolerance(problem, &e.x, &e.y, &ball, ppd)?;
        if (analytic - grid).abs() > tol + REL_TOL * (1.0 + analytic.abs()) {
            return Ok(Some(format!(
                "N = {k}: analytic {analytic:.9e} vs grid {grid:.9e} (tolerance {tol:.3e})"
            )));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_problem_set_is_rejected() {
        let e = verify_suite(&VerifyOptions {
            count: 0,
            ..Default::default()
        })
        .unwrap_err();
        assert!(e.to_string().contains("nothing to verify"));
    }

    #[test]
    fn short_battery_passes() {
        let report = verify_suite(&VerifyOptions {
            count: 4,
            iterations: 300,
            ..Default::default()
        })
        .unwrap();
        assert!(report.all_pass(), "{}", report.matrix());
        assert!(report.checks.iter().all(|c| c.cases > 0), "{}", report.matrix());
    }

    #[test]
    fn injected_fault_breaks_boundedness() {
        let report = verify_suite(&VerifyOptions {
            count: 2,
            iterations: 300,
            inject_fault: true,
            ..Default::default()
        })
        .unwrap();
        let bounded = report.checks.iter().find(|c| c.name == "ogda_bounded").unwrap();
        assert!(!bounded.passed());
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn check_names_are_unique() {
        let mut names: Vec<&str> = CHECKS.iter().map(|c| c.0).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
    }
}
