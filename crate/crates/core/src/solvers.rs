//! Iteration schemes for `min_x max_y f(x, y)`: gradient descent-ascent
//! (negative control), optimistic GDA, extra-gradient and proximal point.
//!
//! Every scheme is written on the joint operator `F(z) = [∇ₓf; −∇ᵧf]`:
//!
//! | scheme | update |
//! |--------|--------|
//! | GDA  | `z⁺ = z − ηF(z)` |
//! | OGDA | `z_{k+1} = z_k − 2ηF(z_k) + ηF(z_{k−1})` |
//! | EG   | `z_{k+½} = z_k − ηF(z_k)`, `z_{k+1} = z_k − ηF(z_{k+½})` |
//! | PP   | `z_{k+1} = z_k − ηF(z_{k+1})` |
//!
//! Updates are evaluated coordinate by coordinate in a fixed order so that
//! independent re-implementations can reproduce trajectories bit for bit.

use nalgebra::{DMatrix, DVector, LU};
use serde::{Deserialize, Serialize};

use crate::base::{operator_f, squared_distance, JointPoint, OperatorValue, SaddleProblem};
use crate::error::{Error, Result};
use crate::problems::f_value;
use crate::trajectory::{StepRecord, Trajectory};

pub const DEFAULT_EG_SIGMA: f64 = 0.5;
pub const DEFAULT_FIXED_POINT_TOL: f64 = 1e-12;
pub const DEFAULT_FIXED_POINT_MAX_ITER: usize = 200;

/// Relative slack when comparing a stepsize against its admissible maximum.
const STEPSIZE_SLACK: f64 = 2e-9;

/// Inner solver for the implicit proximal point equation.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PpInner {
    /// Dense solve of `(I + ηM) z = z_k − ηq` for affine `F(z) = Mz + q`.
    #[default]
    AffineExact,
    /// Picard iteration `w ← z_k − ηF(w)`; requires `ηL < 1`.
    FixedPoint { tol: f64, max_iter: usize },
}

impl PpInner {
    pub fn fixed_point() -> Self {
        PpInner::FixedPoint {
            tol: DEFAULT_FIXED_POINT_TOL,
            max_iter: DEFAULT_FIXED_POINT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Gda,
    Ogda,
    Eg,
    Pp(PpInner),
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Gda => "gda",
            SolverKind::Ogda => "ogda",
            SolverKind::Eg => "eg",
            SolverKind::Pp(_) => "pp",
        }
    }

    /// Whether a convergence-rate certificate exists for this scheme.
    pub fn has_bound(&self) -> bool {
        !matches!(self, SolverKind::Gda)
    }
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepsizeRule {
    /// `η = 1/(2L)`, the largest stepsize admitted by the OGDA analysis.
    OgdaDefault,
    /// `η = σ/L` with `σ ∈ (0, 1)`.
    EgSigma { sigma: f64 },
    /// Fixed proximal stepsize.
    PpFixed { eta: f64 },
    /// Explicit stepsize, validated against the scheme's admissible range.
    Explicit { eta: f64 },
    /// Explicit stepsize with no range check. Only for negative controls.
    Unchecked { eta: f64 },
}

impl StepsizeRule {
    pub fn eg_default() -> Self {
        StepsizeRule::EgSigma {
            sigma: DEFAULT_EG_SIGMA,
        }
    }

    /// Resolves `η` for `solver` given the problem's `L`.
    pub fn resolve(&self, solver: SolverKind, l: f64) -> Result<f64> {
        let eta = match (*self, solver) {
            (StepsizeRule::Unchecked { eta }, _) => {
                positive(eta)?;
                return Ok(eta);
            }
            (StepsizeRule::OgdaDefault, SolverKind::Ogda) => 1.0 / (2.0 * positive_l(l)?),
            (StepsizeRule::EgSigma { sigma }, SolverKind::Eg) => {
                if !(sigma > 0.0 && sigma < 1.0) {
                    return Err(Error::Config(format!("sigma must lie in (0,1), got {sigma}")));
                }
                sigma / positive_l(l)?
            }
            (StepsizeRule::PpFixed { eta }, SolverKind::Pp(_)) => eta,
            (StepsizeRule::Explicit { eta }, _) => eta,
            (rule, solver) => {
                return Err(Error::Config(format!(
                    "stepsize rule {rule:?} does not apply to solver {solver}"
                )))
            }
        };
        positive(eta)?;
        check_range(solver, eta, l)?;
        Ok(eta)
    }

    /// `σ = ηL` as used by the extra-gradient bound.
    pub fn sigma(&self, eta: f64, l: f64) -> f64 {
        match self {
            StepsizeRule::EgSigma { sigma } => *sigma,
            _ => eta * l,
        }
    }
}

fn positive(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("stepsize must be positive and finite, got {eta}")))
    }
}

fn positive_l(l: f64) -> Result<f64> {
    if l.is_finite() && l > 0.0 {
        Ok(l)
    } else {
        Err(Error::Config(format!("Lipschitz constant must be positive, got {l}")))
    }
}

/// Checks `η` against the precondition of the scheme's convergence analysis.
pub fn check_range(solver: SolverKind, eta: f64, l: f64) -> Result<()> {
    positive(eta)?;
    match solver {
        SolverKind::Ogda => {
            let max = 1.0 / (2.0 * positive_l(l)?);
            if eta > max * (1.0 + STEPSIZE_SLACK) {
                return Err(Error::Config(format!(
                    "OGDA stepsize {eta} exceeds 1/(2L) = {max}"
                )));
            }
        }
        SolverKind::Eg => {
            if eta * positive_l(l)? >= 1.0 {
                return Err(Error::Config(format!("EG stepsize {eta} must satisfy eta*L < 1 (L = {l})")));
            }
        }
        SolverKind::Pp(PpInner::FixedPoint { .. }) => {
            if eta * positive_l(l)? >= 1.0 {
                return Err(Error::Config(format!(
                    "fixed-point proximal step needs eta*L < 1, got {}",
                    eta * l
                )));
            }
        }
        SolverKind::Gda | SolverKind::Pp(PpInner::AffineExact) => {}
    }
    Ok(())
}

/// Iteration state. At iteration `k`:
/// `z = z_k`, `z_prev = z_{k−1}`, `f_prev = F(z_{k−1})`,
/// `mid = z_{k−½}`, `f_mid = F(z_{k−½})`.
///
/// A fresh state uses `z_{−1} = z_{−½} = z_0`; the operator caches are then
/// empty and resolve to `F(z_0)` on the first step.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub k: usize,
    pub z: JointPoint,
    pub z_prev: JointPoint,
    pub f_prev: Option<OperatorValue>,
    pub mid: JointPoint,
    pub f_mid: Option<OperatorValue>,
    /// `F(z_k)` from the most recent step, when the scheme computed it.
    pub f_curr: Option<OperatorValue>,
    /// Operator evaluations performed so far.
    pub evaluations: usize,
}

impl SolverState {
    pub fn new(z0: JointPoint) -> Self {
        SolverState {
            k: 0,
            z_prev: z0.clone(),
            mid: z0.clone(),
            z: z0,
            f_prev: None,
            f_mid: None,
            f_curr: None,
            evaluations: 0,
        }
    }
}

/// `z − s·v`, with the update evaluated per coordinate.
fn axpy(z: &JointPoint, s: f64, v: &OperatorValue, context: &str) -> Result<JointPoint> {
    z.step(s, v).map_err(|e| match e {
        Error::NonFinite { .. } => Error::non_finite(context),
        other => other,
    })
}

fn eval(problem: &(impl SaddleProblem + ?Sized), z: &JointPoint, state: &mut SolverState) -> Result<OperatorValue> {
    state.evaluations += 1;
    operator_f(problem, z)
}

fn l_of(problem: &(impl SaddleProblem + ?Sized)) -> Result<f64> {
    problem
        .lipschitz()
        .map(|l| l.l_max)
        .ok_or_else(|| Error::Config("problem has no Lipschitz profile; stepsize cannot be checked".into()))
}

/// One explicit gradient descent-ascent step.
pub fn gda_step<P: SaddleProblem + ?Sized>(problem: &P, state: &SolverState, eta: f64) -> Result<SolverState> {
    positive(eta)?;
    let mut next = state.clone();
    let f = eval(problem, &state.z, &mut next)?;
    next.z = axpy(&state.z, eta, &f, "GDA iterate")?;
    next.z_prev = state.z.clone();
    next.f_prev = Some(f);
    next.f_curr = None;
    next.k += 1;
    Ok(next)
}

/// One OGDA step, `0 < η ≤ 1/(2L)`.
pub fn ogda_step<P: SaddleProblem + ?Sized>(problem: &P, state: &SolverState, eta: f64) -> Result<SolverState> {
    check_range(SolverKind::Ogda, eta, l_of(problem)?)?;
    ogda_step_unchecked(problem, state, eta)
}

/// OGDA step without the stepsize precondition.
pub fn ogda_step_unchecked<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &SolverState,
    eta: f64,
) -> Result<SolverState> {
    positive(eta)?;
    let mut next = state.clone();
    let f_k = eval(problem, &state.z, &mut next)?;
    let f_prev = state.f_prev.as_ref().unwrap_or(&f_k);
    let z = &state.z;
    let x = DVector::from_fn(z.x.len(), |i, _| z.x[i] - 2.0 * eta * f_k.gx[i] + eta * f_prev.gx[i]);
    let y = DVector::from_fn(z.y.len(), |i, _| {
        z.y[i] - 2.0 * eta * f_k.neg_gy[i] + eta * f_prev.neg_gy[i]
    });
    next.z = JointPoint::new(x, y).map_err(|_| Error::non_finite("OGDA iterate"))?;
    next.z_prev = state.z.clone();
    next.f_prev = Some(f_k);
    next.f_curr = None;
    next.k += 1;
    Ok(next)
}

/// One extra-gradient step, `0 < ηL < 1`. Two operator evaluations.
pub fn eg_step<P: SaddleProblem + ?Sized>(problem: &P, state: &SolverState, eta: f64) -> Result<SolverState> {
    check_range(SolverKind::Eg, eta, l_of(problem)?)?;
    eg_step_unchecked(problem, state, eta)
}

pub fn eg_step_unchecked<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &SolverState,
    eta: f64,
) -> Result<SolverState> {
    positive(eta)?;
    let mut next = state.clone();
    let f_k = eval(problem, &state.z, &mut next)?;
    let mid = axpy(&state.z, eta, &f_k, "EG midpoint")?;
    let f_mid = eval(problem, &mid, &mut next)?;
    next.z = axpy(&state.z, eta, &f_mid, "EG iterate")?;
    next.z_prev = state.z.clone();
    next.f_prev = Some(f_k);
    next.mid = mid;
    next.f_mid = Some(f_mid);
    next.f_curr = None;
    next.k += 1;
    Ok(next)
}

/// Prepared solver for the implicit proximal step.
pub enum ProximalSolver {
    Affine { lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>, q: DVector<f64>, m: usize },
    FixedPoint { tol: f64, max_iter: usize },
}

impl ProximalSolver {
    pub fn new<P: SaddleProblem + ?Sized>(problem: &P, eta: f64, inner: PpInner) -> Result<Self> {
        positive(eta)?;
        match inner {
            PpInner::AffineExact => {
                let (mat, q) = problem.affine_operator().ok_or_else(|| {
                    Error::Config("affine_exact proximal solver requires an affine operator".into())
                })?;
                let d = mat.nrows();
                let system = DMatrix::identity(d, d) + mat * eta;
                let lu = system.lu();
                if !lu.is_invertible() {
                    return Err(Error::Singular("proximal system (I + ηM)".into()));
                }
                Ok(ProximalSolver::Affine { lu, q, m: problem.dims().0 })
            }
            PpInner::FixedPoint { tol, max_iter } => {
                if !(tol > 0.0 && tol.is_finite()) || max_iter == 0 {
                    return Err(Error::Config("fixed-point tolerance and iteration cap must be positive".into()));
                }
                check_range(SolverKind::Pp(inner), eta, l_of(problem)?)?;
                Ok(ProximalSolver::FixedPoint { tol, max_iter })
            }
        }
    }

    /// Solves `w = z − ηF(w)`; returns `w` and `F(w)`.
    fn solve<P: SaddleProblem + ?Sized>(
        &self,
        problem: &P,
        z: &JointPoint,
        eta: f64,
        state: &mut SolverState,
    ) -> Result<(JointPoint, OperatorValue)> {
        match self {
            ProximalSolver::Affine { lu, q, m } => {
                let rhs = z.stacked() - q * eta;
                let w = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Singular("proximal system (I + ηM)".into()))?;
                let w = JointPoint::from_stacked(&w, *m).map_err(|_| Error::non_finite("PP iterate"))?;
                let f = eval(problem, &w, state)?;
                Ok((w, f))
            }
            ProximalSolver::FixedPoint { tol, max_iter } => {
                let scaled_tol = tol * z.norm().max(1.0);
                let mut w = z.clone();
                let mut f = eval(problem, &w, state)?;
                let mut change = f64::INFINITY;
                for _ in 0..*max_iter {
                    let w_new = axpy(z, eta, &f, "PP fixed-point iterate")?;
                    change = squared_distance(&w_new, &w)?.sqrt();
                    w = w_new;
                    f = eval(problem, &w, state)?;
                    if change <= scaled_tol {
                        return Ok((w, f));
                    }
                }
                Err(Error::FixedPoint {
                    iterations: *max_iter,
                    residual: change,
                })
            }
        }
    }
}

/// `‖z⁺ − z + ηF(z⁺)‖`, the residual of the implicit proximal equation.
pub fn proximal_residual(z: &JointPoint, z_next: &JointPoint, f_next: &OperatorValue, eta: f64) -> Result<f64> {
    let d = z_next.sub(z)?;
    let (m, n) = d.dims();
    f_next.check_dims(m, n)?;
    let rx = d.x.iter().zip(f_next.gx.iter()).map(|(a, g)| (a + eta * g).powi(2));
    let ry = d.y.iter().zip(f_next.neg_gy.iter()).map(|(a, g)| (a + eta * g).powi(2));
    Ok(rx.chain(ry).sum::<f64>().sqrt())
}

/// One proximal point step. Prepares the inner solver on every call; use
/// [`run`] for long trajectories.
pub fn pp_step<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &SolverState,
    eta: f64,
    inner: PpInner,
) -> Result<SolverState> {
    let solver = ProximalSolver::new(problem, eta, inner)?;
    pp_step_with(problem, state, eta, &solver)
}

pub fn pp_step_with<P: SaddleProblem + ?Sized>(
    problem: &P,
    state: &SolverState,
    eta: f64,
    solver: &ProximalSolver,
) -> Result<SolverState> {
    let mut next = state.clone();
    let (w, f) = solver.solve(problem, &state.z, eta, &mut next)?;
    if let ProximalSolver::FixedPoint { tol, .. } = solver {
        let residual = proximal_residual(&state.z, &w, &f, eta)?;
        if residual > 10.0 * tol * state.z.norm().max(1.0) {
            return Err(Error::FixedPoint { iterations: 0, residual });
        }
    }
    next.z_prev = state.z.clone();
    next.z = w;
    next.f_curr = Some(f);
    next.k += 1;
    Ok(next)
}

/// OGDA error vector
/// `ε_k = η[(F(z_{k+1}) − F(z_k)) − (F(z_k) − F(z_{k−1}))]`,
/// for which `z_{k+1} = z_k − ηF(z_{k+1}) + ε_k`.
pub fn ogda_error_vector(
    f_km1: &OperatorValue,
    f_k: &OperatorValue,
    f_kp1: &OperatorValue,
    eta: f64,
) -> Result<JointPoint> {
    let (m, n) = f_k.dims();
    f_km1.check_dims(m, n)?;
    f_kp1.check_dims(m, n)?;
    let comb = |a: f64, b: f64, c: f64| eta * ((c - b) - (b - a));
    let x = DVector::from_fn(m, |i, _| comb(f_km1.gx[i], f_k.gx[i], f_kp1.gx[i]));
    let y = DVector::from_fn(n, |i, _| comb(f_km1.neg_gy[i], f_k.neg_gy[i], f_kp1.neg_gy[i]));
    JointPoint::new(x, y)
}

/// Extra-gradient error vector
/// `ε_k = η[(F(z_{k+½}) − F(z_{k−½})) − (F(z_k) − F(z_{k−1}))]`,
/// for which `z_{k+½} = z_{k−½} − ηF(z_{k+½}) + ε_k`.
pub fn eg_error_vector(
    f_mid_prev: &OperatorValue,
    f_mid: &OperatorValue,
    f_prev: &OperatorValue,
    f_curr: &OperatorValue,
    eta: f64,
) -> Result<JointPoint> {
    let (m, n) = f_mid.dims();
    for v in [f_mid_prev, f_prev, f_curr] {
        v.check_dims(m, n)?;
    }
    let comb = |mp: f64, mc: f64, p: f64, c: f64| eta * ((mc - mp) - (c - p));
    let x = DVector::from_fn(m, |i, _| comb(f_mid_prev.gx[i], f_mid.gx[i], f_prev.gx[i], f_curr.gx[i]));
    let y = DVector::from_fn(n, |i, _| {
        comb(f_mid_prev.neg_gy[i], f_mid.neg_gy[i], f_prev.neg_gy[i], f_curr.neg_gy[i])
    });
    JointPoint::new(x, y)
}

/// `‖next − (base − ηF(next) + ε)‖`: residual of a perturbed proximal recursion.
pub fn perturbed_proximal_residual(
    base: &JointPoint,
    next: &JointPoint,
    f_next: &OperatorValue,
    eps: &JointPoint,
    eta: f64,
) -> Result<f64> {
    let lhs = next.sub(base)?;
    let (m, n) = lhs.dims();
    f_next.check_dims(m, n)?;
    eps.check_dims(m, n)?;
    let rx = (0..m).map(|i| (lhs.x[i] + eta * f_next.gx[i] - eps.x[i]).powi(2));
    let ry = (0..n).map(|i| (lhs.y[i] + eta * f_next.neg_gy[i] - eps.y[i]).powi(2));
    Ok(rx.chain(ry).sum::<f64>().sqrt())
}

/// A run that stopped early, with everything produced before the failure.
#[derive(Debug, Clone, thiserror::Error)]
#[error("run aborted after {} completed steps: {error}", partial.len())]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<Trajectory>,
}

impl From<RunFailure> for Error {
    fn from(f: RunFailure) -> Self {
        f.error
    }
}

/// Runs `iterations` steps of `solver` from `z0`.
///
/// The ergodic average runs over `z_1..z_N` for GDA, OGDA and PP, and over
/// the midpoints `z_{½}..z_{N−½}` for extra-gradient.
pub fn run<P: SaddleProblem + ?Sized>(
    problem: &P,
    solver: SolverKind,
    z0: &JointPoint,
    iterations: usize,
    rule: StepsizeRule,
) -> std::result::Result<Trajectory, RunFailure> {
    let fail = |error: Error, partial: Trajectory| RunFailure {
        error,
        partial: Box::new(partial),
    };
    let (m, n) = problem.dims();
    let empty = Trajectory::new(solver, f64::NAN, rule, z0.clone());
    if iterations == 0 {
        return Err(fail(Error::Config("iteration count must be at least 1".into()), empty));
    }
    if let Err(e) = z0.check_dims(m, n) {
        return Err(fail(e, empty));
    }
    let l = problem.lipschitz().map(|p| p.l_max).unwrap_or(f64::NAN);
    let eta = match rule.resolve(solver, l) {
        Ok(eta) => eta,
        Err(e) => return Err(fail(e, empty)),
    };
    let mut traj = Trajectory::new(solver, eta, rule, z0.clone());
    match drive(problem, solver, eta, iterations, &mut traj) {
        Ok(()) => Ok(traj),
        Err(e) => Err(fail(e, traj)),
    }
}

fn drive<P: SaddleProblem + ?Sized>(
    problem: &P,
    solver: SolverKind,
    eta: f64,
    iterations: usize,
    traj: &mut Trajectory,
) -> Result<()> {
    let (m, n) = problem.dims();
    let proximal = match solver {
        SolverKind::Pp(inner) => Some(ProximalSolver::new(problem, eta, inner)?),
        _ => None,
    };
    let mut state = SolverState::new(traj.z0.clone());
    // F(z_{k−2}) and F(z_{k−1}) for the explicit schemes, which learn F(z_k)
    // one step late. z_{−1} = z_0.
    let mut older: Option<OperatorValue> = None;
    let mut old: Option<OperatorValue> = None;

    for k in 0..iterations {
        let prev = state;
        state = match solver {
            SolverKind::Gda => gda_step(problem, &prev, eta)?,
            SolverKind::Ogda => ogda_step_unchecked(problem, &prev, eta)?,
            SolverKind::Eg => eg_step_unchecked(problem, &prev, eta)?,
            SolverKind::Pp(_) => pp_step_with(problem, &prev, eta, proximal.as_ref().expect("prepared"))?,
        };

        if matches!(solver, SolverKind::Gda | SolverKind::Ogda) {
            let f_k = state.f_prev.clone().expect("explicit step caches F(z_k)");
            if let Some(f_km1) = &old {
                let last = traj.records.last_mut().expect("record k-1");
                if solver == SolverKind::Ogda {
                    let f_km2 = older.as_ref().unwrap_or(f_km1);
                    last.error_residual =
                        Some(ogda_residual(&prev.z_prev, &prev.z, f_km2, f_km1, &f_k, eta)?);
                }
                last.operator = f_k.clone();
            }
            older = old.take();
            old = Some(f_k);
        }

        let (midpoint, operator, error_residual) = match solver {
            SolverKind::Eg => {
                let f_mid = state.f_mid.clone().expect("EG midpoint operator");
                let f_k = state.f_prev.as_ref().expect("EG F(z_k)");
                let f_mid_prev = prev.f_mid.as_ref().unwrap_or(f_k);
                let f_km1 = prev.f_prev.as_ref().unwrap_or(f_k);
                let eps = eg_error_vector(f_mid_prev, &f_mid, f_km1, f_k, eta)?;
                let res = perturbed_proximal_residual(&prev.mid, &state.mid, &f_mid, &eps, eta)?;
                (Some(state.mid.clone()), f_mid, Some(res))
            }
            SolverKind::Pp(_) => {
                let f = state.f_curr.clone().expect("PP caches F(z_{k+1})");
                let res = proximal_residual(&prev.z, &state.z, &f, eta)?;
                (None, f, Some(res))
            }
            _ => (None, OperatorValue::zeros(m, n), None),
        };

        let averaged = midpoint.as_ref().unwrap_or(&state.z);
        traj.ergodic.push(averaged)?;
        let ergodic = traj.ergodic.mean.clone().expect("nonempty average");
        let f_at_ergodic = f_value(problem, &ergodic)?;
        if !f_at_ergodic.is_finite() {
            return Err(Error::non_finite("f at ergodic average"));
        }
        traj.records.push(StepRecord {
            k,
            iterate: state.z.clone(),
            midpoint,
            operator,
            ergodic,
            f_at_ergodic,
            error_residual,
        });
    }

    // Close out the explicit schemes with F(z_N).
    if matches!(solver, SolverKind::Gda | SolverKind::Ogda) {
        let f_n = operator_f(problem, &state.z)?;
        let f_km1 = old.as_ref().expect("F(z_{N-1})");
        let f_km2 = older.as_ref().unwrap_or(f_km1);
        let last = traj.records.last_mut().expect("at least one record");
        if solver == SolverKind::Ogda {
            last.error_residual = Some(ogda_residual(&state.z_prev, &state.z, f_km2, f_km1, &f_n, eta)?);
        }
        last.operator = f_n;
    }
    Ok(())
}

/// Residual of `z_{k+1} = z_k − ηF(z_{k+1}) + ε_k` for one OGDA step.
fn ogda_residual(
    z_k: &JointPoint,
    z_kp1: &JointPoint,
    f_km1: &OperatorValue,
    f_k: &OperatorValue,
    f_kp1: &OperatorValue,
    eta: f64,
) -> Result<f64> {
    let eps = ogda_error_vector(f_km1, f_k, f_kp1, eta)?;
    perturbed_proximal_residual(z_k, z_kp1, f_kp1, &eps, eta)
}
