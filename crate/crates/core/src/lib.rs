//! First-order methods for smooth convex-concave saddle-point problems
//! `min_x max_y f(x, y)`, together with checks that turn their boundedness
//! and `O(1/N)` rate guarantees into pass/fail certificates on real runs.
//!
//! * [`base`]: joint points, the operator `F`, ergodic averaging.
//! * [`problems`]: quadratic test problems with exact saddle points.
//! * [`solvers`]: GDA, OGDA, extra-gradient and proximal point.
//! * [`analysis`]: gap metrics, bounds and certificates.
//! * [`oracles`]: brute-force references used to validate the above.
//! * [`experiment`]: configuration-driven runs with CSV/JSON output.
//! * [`verify`]: the property battery behind `saddlepoint verify`.
//! * [`cli`]: the `saddlepoint` command-line verbs.

pub mod analysis;
pub mod base;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod oracles;
pub mod problems;
pub mod solvers;
pub mod trajectory;
pub mod verify;

pub use base::{operator_f, squared_distance, update_average, JointPoint, LipschitzProfile, OperatorValue, RunningAverage, SaddleProblem};
pub use error::{Error, Result};
pub use problems::{generate, ProblemKind, ProblemSpec, QuadraticSaddle};
pub use solvers::{run, PpInner, SolverKind, StepsizeRule};
pub use trajectory::{StepRecord, Trajectory};
