use serde::{Deserialize, Serialize};

use crate::base::{JointPoint, OperatorValue, RunningAverage};
use crate::solvers::{SolverKind, StepsizeRule};

/// One iteration `k → k+1` of a solver run.
///
/// `iterate` is `z_{k+1}`; `midpoint` is `z_{k+1/2}` for extra-gradient.
/// `operator` is `F` at the point that enters the ergodic average
/// (`z_{k+1}`, or `z_{k+1/2}` for extra-gradient).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub k: usize,
    pub iterate: JointPoint,
    pub midpoint: Option<JointPoint>,
    pub operator: OperatorValue,
    /// Ergodic mean over the first `k + 1` averaged points.
    pub ergodic: JointPoint,
    pub f_at_ergodic: f64,
    /// Norm of the error-vector reconstruction residual, where the solver has one.
    pub error_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub solver: SolverKind,
    pub stepsize: f64,
    pub rule: StepsizeRule,
    pub z0: JointPoint,
    pub records: Vec<StepRecord>,
    pub ergodic: RunningAverage,
}

impl Trajectory {
    pub fn new(solver: SolverKind, stepsize: f64, rule: StepsizeRule, z0: JointPoint) -> Self {
        Trajectory {
            solver,
            stepsize,
            rule,
            z0,
            records: Vec::new(),
            ergodic: RunningAverage::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `z_0, z_1, ..., z_N`.
    pub fn iterates(&self) -> impl Iterator<Item = &JointPoint> {
        std::iter::once(&self.z0).chain(self.records.iter().map(|r| &r.iterate))
    }

    /// The points that enter the ergodic average, in order.
    pub fn averaged_points(&self) -> impl Iterator<Item = &JointPoint> {
        self.records
            .iter()
            .map(|r| r.midpoint.as_ref().unwrap_or(&r.iterate))
    }

    /// Ergodic mean after `n` averaged points, `1 ≤ n ≤ len`.
    pub fn ergodic_at(&self, n: usize) -> Option<&JointPoint> {
        n.checked_sub(1)
            .and_then(|i| self.records.get(i))
            .map(|r| &r.ergodic)
    }
}
