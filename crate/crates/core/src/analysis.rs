//! Gap metrics, `O(1/N)` bound certificates and ergodic-inequality checks.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::base::{operator_f, squared_distance, JointPoint, SaddleProblem};
use crate::error::{Error, Result};
use crate::oracles;
use crate::problems::f_value;
use crate::solvers::SolverKind;
use crate::trajectory::Trajectory;

/// Relative slack used by every inequality check.
pub const REL_TOL: f64 = 1e-9;

/// Gaps at or below this value are treated as converged when fitting rates.
pub const RATE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Pp,
    Ogda,
    Eg,
}

impl Theorem {
    pub fn for_solver(solver: SolverKind) -> Result<Self> {
        match solver {
            SolverKind::Pp(_) => Ok(Theorem::Pp),
            SolverKind::Ogda => Ok(Theorem::Ogda),
            SolverKind::Eg => Ok(Theorem::Eg),
            SolverKind::Gda => Err(Error::NoBound(solver.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Pp => "pp",
            Theorem::Ogda => "ogda",
            Theorem::Eg => "eg",
        }
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pp" => Ok(Theorem::Pp),
            "ogda" => Ok(Theorem::Ogda),
            "eg" => Ok(Theorem::Eg),
            other => Err(Error::Config(format!("unknown theorem {other:?} (expected pp, ogda or eg)"))),
        }
    }
}

/// Euclidean ball around a saddle point that provably contains a solver's iterates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactBall {
    pub center: JointPoint,
    pub squared_radius: f64,
}

impl CompactBall {
    pub fn new(center: JointPoint, squared_radius: f64) -> Result<Self> {
        if !(squared_radius.is_finite() && squared_radius >= 0.0) {
            return Err(Error::Config(format!("invalid squared radius {squared_radius}")));
        }
        Ok(CompactBall { center, squared_radius })
    }

    /// OGDA: `‖z − z*‖² ≤ 2D`.
    pub fn ogda(z_star: &JointPoint, z0: &JointPoint) -> Result<Self> {
        Self::new(z_star.clone(), 2.0 * squared_distance(z0, z_star)?)
    }

    /// Extra-gradient: `‖z − z*‖² ≤ (2 + 2/(1 − σ²))D` with `σ = ηL`.
    pub fn eg(z_star: &JointPoint, z0: &JointPoint, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::Config(format!("sigma must lie in (0,1), got {sigma}")));
        }
        let factor = 2.0 + 2.0 / (1.0 - sigma * sigma);
        Self::new(z_star.clone(), factor * squared_distance(z0, z_star)?)
    }

    /// Proximal point: iterates never leave `‖z − z*‖² ≤ D`.
    pub fn pp(z_star: &JointPoint, z0: &JointPoint) -> Result<Self> {
        Self::new(z_star.clone(), squared_distance(z0, z_star)?)
    }

    pub fn radius(&self) -> f64 {
        self.squared_radius.sqrt()
    }

    pub fn contains(&self, z: &JointPoint) -> Result<bool> {
        Ok(squared_distance(z, &self.center)? <= self.squared_radius + REL_TOL * (1.0 + self.squared_radius))
    }
}

/// Constants entering a rate bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// `D = ‖x₀ − x*‖² + ‖y₀ − y*‖²`.
    pub d: f64,
    pub l: f64,
    pub eta: f64,
    pub sigma: Option<f64>,
    pub n: usize,
}

/// Evaluates the rate bound of `theorem`:
///
/// * PP: `D / (ηN)`
/// * OGDA: `D(8L + 1/(2η)) / N`
/// * EG: `DL(9 + 17/(2(1 − σ²))) / N`
pub fn bound_value(theorem: Theorem, c: &BoundConstants) -> Result<f64> {
    if !(c.d.is_finite() && c.d >= 0.0) {
        return Err(Error::Config(format!("D must be finite and nonnegative, got {}", c.d)));
    }
    if c.n == 0 {
        return Err(Error::Config("N must be at least 1".into()));
    }
    if !(c.eta.is_finite() && c.eta > 0.0) && theorem != Theorem::Eg {
        return Err(Error::Config(format!("eta must be positive, got {}", c.eta)));
    }
    if !(c.l.is_finite() && c.l > 0.0) && theorem != Theorem::Pp {
        return Err(Error::Config(format!("L must be positive, got {}", c.l)));
    }
    let n = c.n as f64;
    Ok(match theorem {
        Theorem::Pp => c.d / (c.eta * n),
        Theorem::Ogda => c.d * (8.0 * c.l + 1.0 / (2.0 * c.eta)) / n,
        Theorem::Eg => {
            let sigma = c.sigma.ok_or_else(|| Error::Config("EG bound needs sigma".into()))?;
            if !(sigma > 0.0 && sigma < 1.0) {
                return Err(Error::Config(format!("sigma must lie in (0,1), got {sigma}")));
            }
            c.d * c.l * (9.0 + 17.0 / (2.0 * (1.0 - sigma * sigma))) / n
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub d: f64,
    pub l: f64,
    pub eta: f64,
    pub sigma: Option<f64>,
    pub n: usize,
    pub bound: f64,
    pub gap: f64,
    pub pass: bool,
    /// `bound − gap`; negative when the certificate fails.
    pub margin: f64,
}

impl BoundCertificate {
    pub fn evaluate(theorem: Theorem, constants: BoundConstants, gap: f64) -> Result<Self> {
        let bound = bound_value(theorem, &constants)?;
        Ok(BoundCertificate {
            theorem,
            d: constants.d,
            l: constants.l,
            eta: constants.eta,
            sigma: constants.sigma,
            n: constants.n,
            bound,
            gap,
            pass: gap <= bound + REL_TOL * (1.0 + bound),
            margin: bound - gap,
        })
    }
}

/// `|f(x̂, ŷ) − f(x*, y*)|`.
pub fn corollary_gap<P: SaddleProblem + ?Sized>(problem: &P, ergodic: &JointPoint) -> Result<f64> {
    let star = problem
        .saddle_point()
        .ok_or(Error::NoSaddlePoint { residual: f64::NAN })?;
    Ok((f_value(problem, ergodic)? - problem.value(star)).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMethod {
    /// Exact ball-constrained quadratic maximization (quadratic problems only).
    AnalyticQuadratic,
    /// Brute-force grid over the ball's bounding box (block dimensions ≤ 4).
    Grid { points_per_dim: usize },
}

/// `[max_{y∈Dᵧ} f(x̂, y) − f*] + [f* − min_{x∈Dₓ} f(x, ŷ)]`, where `Dₓ`, `Dᵧ`
/// are the coordinate projections of `ball` (balls of the same radius
/// around `x*` and `y*`).
pub fn restricted_gap<P: SaddleProblem + ?Sized>(
    problem: &P,
    x_hat: &DVector<f64>,
    y_hat: &DVector<f64>,
    ball: &CompactBall,
    method: GapMethod,
) -> Result<f64> {
    let (m, n) = problem.dims();
    ball.center.check_dims(m, n)?;
    let probe = JointPoint::new(x_hat.clone(), y_hat.clone())?;
    probe.check_dims(m, n)?;
    let f_star = problem
        .saddle_point()
        .map(|s| problem.value(s))
        .ok_or(Error::NoSaddlePoint { residual: f64::NAN })?;
    let radius = ball.radius();
    let (y_max, x_min) = match method {
        GapMethod::AnalyticQuadratic => {
            let quad = problem
                .as_quadratic()
                .ok_or_else(|| Error::Unsupported("analytic restricted gap needs a quadratic problem".into()))?;
            let c = &ball.center;
            // max over y: f(x̂, y_c + u) = f(x̂, y_c) + ∇ᵧfᵀu − ½uᵀQu
            let at_yc = JointPoint::new(x_hat.clone(), c.y.clone())?;
            let gy = quad.grad_y(&at_yc);
            let (phi_y, _) = ball_quadratic_min(quad.q(), &(-gy), radius)?;
            let y_max = quad.value(&at_yc) - phi_y;
            // min over x: f(x_c + u, ŷ) = f(x_c, ŷ) + ∇ₓfᵀu + ½uᵀPu
            let at_xc = JointPoint::new(c.x.clone(), y_hat.clone())?;
            let gx = quad.grad_x(&at_xc);
            let (phi_x, _) = ball_quadratic_min(quad.p(), &gx, radius)?;
            let x_min = quad.value(&at_xc) + phi_x;
            (y_max, x_min)
        }
        GapMethod::Grid { points_per_dim } => {
            let y_max = oracles::grid_inner_opt(problem, oracles::FreeBlock::Y, &probe, &ball.center, radius, points_per_dim)?;
            let x_min = oracles::grid_inner_opt(problem, oracles::FreeBlock::X, &probe, &ball.center, radius, points_per_dim)?;
            (y_max, x_min)
        }
    };
    Ok((y_max - f_star) + (f_star - x_min))
}

/// Minimizes `½uᵀHu + gᵀu` over `‖u‖ ≤ radius` for symmetric PSD `H`.
///
/// Returns the optimal value and a minimizer. The interior stationary point
/// is used when it exists inside the ball; otherwise the boundary multiplier
/// `μ` with `‖(H + μI)⁻¹g‖ = radius` is found by bisection.
pub fn ball_quadratic_min(h: &DMatrix<f64>, g: &DVector<f64>, radius: f64) -> Result<(f64, DVector<f64>)> {
    let d = g.len();
    if h.shape() != (d, d) {
        return Err(Error::dims(format!("{d}x{d}"), format!("{:?}", h.shape())));
    }
    if radius == 0.0 || d == 0 {
        return Ok((0.0, DVector::zeros(d)));
    }
    let eig = h.clone().symmetric_eigen();
    let lambda = eig.eigenvalues.map(|l| l.max(0.0));
    let g_rot = eig.eigenvectors.tr_mul(g);
    let tiny = 1e-12 * lambda.max().max(1.0);
    let g_tiny = 1e-14 * g.norm().max(1e-300);

    let objective = |u_rot: &DVector<f64>| -> f64 {
        (0..d)
            .map(|i| 0.5 * lambda[i] * u_rot[i] * u_rot[i] + g_rot[i] * u_rot[i])
            .sum()
    };

    let flat_has_slope = (0..d).any(|i| lambda[i] <= tiny && g_rot[i].abs() > g_tiny);
    if !flat_has_slope {
        let u0 = DVector::from_fn(d, |i, _| if lambda[i] > tiny { -g_rot[i] / lambda[i] } else { 0.0 });
        if u0.norm() <= radius {
            return Ok((objective(&u0), &eig.eigenvectors * u0));
        }
    }

    let norm_at = |mu: f64| -> f64 {
        (0..d)
            .map(|i| (g_rot[i] / (lambda[i] + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let (mut lo, mut hi) = (0.0_f64, g.norm() / radius);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm_at(mid) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * hi {
            break;
        }
    }
    let mu = hi;
    let mut u_rot = DVector::from_fn(d, |i, _| -g_rot[i] / (lambda[i] + mu));
    let len = u_rot.norm();
    if len > radius {
        u_rot *= radius / len;
    }
    Ok((objective(&u_rot), &eig.eigenvectors * u_rot))
}

/// Result of checking `f(x̂_N, y) − f(x, ŷ_N) ≤ (1/N) Σ F(z_k)ᵀ(z_k − z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Evaluates both sides of the ergodic inequality for iterates `z_1..z_N`
/// and a probe point `z = (x, y)`.
pub fn ergodic_inequality_check<P: SaddleProblem + ?Sized>(
    problem: &P,
    iterates: &[JointPoint],
    probe: &JointPoint,
) -> Result<ErgodicInequality> {
    let (m, n) = problem.dims();
    probe.check_dims(m, n)?;
    let count = iterates.len();
    if count == 0 {
        return Err(Error::Config("ergodic inequality needs at least one iterate".into()));
    }
    let mut sum_x = DVector::zeros(m);
    let mut sum_y = DVector::zeros(n);
    let mut rhs = 0.0;
    for z in iterates {
        z.check_dims(m, n)?;
        sum_x += &z.x;
        sum_y += &z.y;
        rhs += operator_f(problem, z)?.dot_point(&z.sub(probe)?)?;
    }
    rhs /= count as f64;
    let x_hat = sum_x / count as f64;
    let y_hat = sum_y / count as f64;
    let lhs = problem.value(&JointPoint::new(x_hat, probe.y.clone())?)
        - problem.value(&JointPoint::new(probe.x.clone(), y_hat)?);
    Ok(ErgodicInequality {
        lhs,
        rhs,
        pass: lhs <= rhs + REL_TOL * (1.0 + rhs.abs()),
    })
}

/// Prefix lengths `1, 2, 4, ...` up to `total`, with `total` itself appended.
pub fn log2_schedule(total: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |n| n.checked_mul(2))
        .take_while(|n| *n <= total)
        .collect();
    if total > 0 && out.last() != Some(&total) {
        out.push(total);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub theorem: Theorem,
    pub ball: CompactBall,
    pub bounds: Vec<BoundCertificate>,
    /// Per record: whether the iterate (and midpoint, for EG) lies in the ball.
    pub in_ball: Vec<bool>,
}

impl Certification {
    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|c| c.pass) && self.in_ball.iter().all(|b| *b)
    }

    pub fn ball_violations(&self) -> usize {
        self.in_ball.iter().filter(|b| !**b).count()
    }
}

/// Bound constants for a trajectory of `problem`.
pub fn constants_for<P: SaddleProblem + ?Sized>(trajectory: &Trajectory, problem: &P, n: usize) -> Result<(Theorem, BoundConstants)> {
    let theorem = Theorem::for_solver(trajectory.solver)?;
    let star = problem
        .saddle_point()
        .ok_or(Error::NoSaddlePoint { residual: f64::NAN })?;
    let l = problem
        .lipschitz()
        .ok_or_else(|| Error::Unsupported("certificates need a Lipschitz profile".into()))?
        .l_max;
    let eta = trajectory.stepsize;
    let sigma = (theorem == Theorem::Eg).then(|| trajectory.rule.sigma(eta, l));
    Ok((
        theorem,
        BoundConstants {
            d: squared_distance(&trajectory.z0, star)?,
            l,
            eta,
            sigma,
            n,
        },
    ))
}

/// Certifies a trajectory on the default `1, 2, 4, ..., N` schedule.
pub fn certify<P: SaddleProblem + ?Sized>(trajectory: &Trajectory, problem: &P) -> Result<Certification> {
    certify_with_schedule(trajectory, problem, &log2_schedule(trajectory.len()))
}

pub fn certify_with_schedule<P: SaddleProblem + ?Sized>(
    trajectory: &Trajectory,
    problem: &P,
    schedule: &[usize],
) -> Result<Certification> {
    let (theorem, base) = constants_for(trajectory, problem, 1)?;
    let star = problem.saddle_point().expect("checked in constants_for");
    let ball = match theorem {
        Theorem::Ogda => CompactBall::ogda(star, &trajectory.z0)?,
        Theorem::Eg => CompactBall::eg(star, &trajectory.z0, base.sigma.expect("EG sigma"))?,
        Theorem::Pp => CompactBall::pp(star, &trajectory.z0)?,
    };

    let mut bounds = Vec::with_capacity(schedule.len());
    for &n in schedule {
        let ergodic = trajectory.ergodic_at(n).ok_or_else(|| {
            Error::Config(format!("schedule entry {n} outside trajectory of length {}", trajectory.len()))
        })?;
        let gap = corollary_gap(problem, ergodic)?;
        bounds.push(BoundCertificate::evaluate(theorem, BoundConstants { n, ..base }, gap)?);
    }

    let in_ball = trajectory
        .records
        .iter()
        .map(|r| {
            let mid_ok = match &r.midpoint {
                Some(mid) => ball.contains(mid)?,
                None => true,
            };
            Ok(mid_ok && ball.contains(&r.iterate)?)
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Certification {
        theorem,
        ball,
        bounds,
        in_ball,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateFit {
    /// Least-squares slope of `log(gap)` against `log(N)`.
    Slope(f64),
    /// Some gap fell to or below [`RATE_FLOOR`]; no meaningful slope.
    ConvergedBelowFloor,
}

pub fn rate_fit(ns: &[usize], gaps: &[f64]) -> Result<RateFit> {
    if ns.len() != gaps.len() {
        return Err(Error::dims(ns.len(), gaps.len()));
    }
    if ns.len() < 5 {
        return Err(Error::Config(format!("rate fit needs at least 5 points, got {}", ns.len())));
    }
    if gaps.iter().any(|g| !g.is_finite()) || ns.contains(&0) {
        return Err(Error::non_finite("rate fit input"));
    }
    if gaps.iter().any(|g| *g <= RATE_FLOOR) {
        return Ok(RateFit::ConvergedBelowFloor);
    }
    let xs: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("rate fit needs distinct N values".into()));
    }
    Ok(RateFit::Slope(sxy / sxx))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::QuadraticSaddle;
    use crate::solvers::{run, PpInner, StepsizeRule};

    fn z(x: f64, y: f64) -> JointPoint {
        JointPoint::from_slices(&[x], &[y]).unwrap()
    }

    fn bilinear() -> QuadraticSaddle {
        QuadraticSaddle::bilinear(DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn bound_value_examples() {
        let c = |d, l, eta, sigma, n| BoundConstants { d, l, eta, sigma, n };
        let pp = bound_value(Theorem::Pp, &c(2.0, 1.0, 1.0, None, 10)).unwrap();
        assert!((pp - 0.2).abs() < 1e-15);
        let ogda = bound_value(Theorem::Ogda, &c(2.0, 1.0, 0.5, None, 100)).unwrap();
        assert!((ogda - 0.18).abs() < 1e-15);
        let eg = bound_value(Theorem::Eg, &c(2.0, 1.0, 0.5, Some(0.5), 100)).unwrap();
        assert!((eg - 0.406_666_666_666_666_7).abs() < 1e-12, "{eg}");
        assert!(bound_value(Theorem::Eg, &c(2.0, 1.0, 0.5, Some(1.0), 100)).is_err());
        assert!(bound_value(Theorem::Ogda, &c(2.0, 1.0, 0.5, None, 0)).is_err());
        assert!(bound_value(Theorem::Pp, &c(-1.0, 1.0, 0.5, None, 3)).is_err());
    }

    #[test]
    fn corollary_gap_examples() {
        let p = bilinear();
        assert_eq!(corollary_gap(&p, &z(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(corollary_gap(&p, &z(0.0, 1.5)).unwrap(), 0.0);
        assert_eq!(corollary_gap(&p, &z(0.5, 1.5)).unwrap(), 0.75);
    }

    #[test]
    fn restricted_gap_examples() {
        let p = bilinear();
        let ball = CompactBall::new(z(0.0, 0.0), 4.0).unwrap();
        let one = |v: f64| DVector::from_element(1, v);
        let g = restricted_gap(&p, &one(0.0), &one(0.0), &ball, GapMethod::AnalyticQuadratic).unwrap();
        assert_eq!(g, 0.0);
        let g = restricted_gap(&p, &one(0.25), &one(1.25), &ball, GapMethod::AnalyticQuadratic).unwrap();
        assert!((g - 3.0).abs() < 1e-12, "{g}");
        let grid = restricted_gap(&p, &one(0.25), &one(1.25), &ball, GapMethod::Grid { points_per_dim: 2001 }).unwrap();
        assert!((grid - 3.0).abs() < 1e-3 * 4.0, "{grid}");
    }

    #[test]
    fn ball_min_interior_and_boundary() {
        let h = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let g = DVector::from_vec(vec![-2.0, 0.0]);
        let (v, u) = ball_quadratic_min(&h, &g, 5.0).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-14 && u[1].abs() < 1e-14);
        assert!((v + 1.0).abs() < 1e-14);
        // Constrained: minimizer on the boundary at u = (0.5, 0).
        let (v, u) = ball_quadratic_min(&h, &g, 0.5).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-10 && u[1].abs() < 1e-12);
        assert!((v - (0.25 - 1.0)).abs() < 1e-10);
        // Flat direction with slope forces the boundary.
        let zero = DMatrix::zeros(1, 1);
        let (v, _) = ball_quadratic_min(&zero, &DVector::from_element(1, 3.0), 2.0).unwrap();
        assert!((v + 6.0).abs() < 1e-10);
    }

    #[test]
    fn analytic_gap_requires_quadratic() {
        struct Opaque(QuadraticSaddle);
        impl SaddleProblem for Opaque {
            fn dims(&self) -> (usize, usize) {
                self.0.dims()
            }
            fn value(&self, z: &JointPoint) -> f64 {
                self.0.value(z)
            }
            fn grad_x(&self, z: &JointPoint) -> DVector<f64> {
                self.0.grad_x(z)
            }
            fn grad_y(&self, z: &JointPoint) -> DVector<f64> {
                self.0.grad_y(z)
            }
            fn saddle_point(&self) -> Option<&JointPoint> {
                self.0.saddle_point()
            }
        }
        let p = Opaque(bilinear());
        let ball = CompactBall::new(z(0.0, 0.0), 1.0).unwrap();
        let one = DVector::from_element(1, 0.1);
        assert!(matches!(
            restricted_gap(&p, &one, &one, &ball, GapMethod::AnalyticQuadratic),
            Err(Error::Unsupported(_))
        ));
        assert!(restricted_gap(&p, &one, &one, &ball, GapMethod::Grid { points_per_dim: 101 }).is_ok());
    }

    #[test]
    fn ergodic_inequality_is_tight_for_bilinear() {
        let p = bilinear();
        let check = ergodic_inequality_check(&p, &[z(0.3, -1.2)], &z(2.0, 0.7)).unwrap();
        assert!((check.lhs - check.rhs).abs() < 1e-15);
        assert!(check.pass);
    }

    #[test]
    fn ergodic_inequality_is_strict_for_strongly_convex_concave() {
        let p = QuadraticSaddle::scalar(1.0, 1.0, 0.5, 0.2, -0.1).unwrap();
        let iterates = [z(1.0, 0.0), z(0.0, 2.0), z(-1.0, 1.0)];
        let check = ergodic_inequality_check(&p, &iterates, &z(0.5, -0.5)).unwrap();
        assert!(check.pass && check.rhs - check.lhs > 1e-3);
        assert!(ergodic_inequality_check(&p, &[], &z(0.0, 0.0)).is_err());
    }

    #[test]
    fn schedule_includes_total() {
        assert_eq!(log2_schedule(1), vec![1]);
        assert_eq!(log2_schedule(8), vec![1, 2, 4, 8]);
        assert_eq!(log2_schedule(10), vec![1, 2, 4, 8, 10]);
        assert!(log2_schedule(0).is_empty());
    }

    #[test]
    fn rate_fit_examples() {
        let ns: Vec<usize> = (1..=6).map(|i| 10usize.pow(i)).collect();
        let exact: Vec<f64> = ns.iter().map(|n| 1.0 / *n as f64).collect();
        match rate_fit(&ns, &exact).unwrap() {
            RateFit::Slope(s) => assert!((s + 1.0).abs() < 1e-10),
            other => panic!("{other:?}"),
        }
        let flat = vec![0.3; ns.len()];
        assert_eq!(rate_fit(&ns, &flat).unwrap(), RateFit::Slope(0.0));
        let mut tiny = exact.clone();
        tiny[5] = 1e-16;
        assert_eq!(rate_fit(&ns, &tiny).unwrap(), RateFit::ConvergedBelowFloor);
        assert!(rate_fit(&ns[..4], &exact[..4]).is_err());
    }

    #[test]
    fn certify_examples() {
        let p = bilinear();
        let t = run(&p, SolverKind::Ogda, &z(1.0, 1.0), 256, StepsizeRule::OgdaDefault).unwrap();
        let cert = certify(&t, &p).unwrap();
        assert!(cert.all_pass());
        assert_eq!(cert.bounds.len(), 9);

        let t = run(&p, SolverKind::Eg, &z(0.0, 0.0), 64, StepsizeRule::eg_default()).unwrap();
        let cert = certify(&t, &p).unwrap();
        assert!(cert.bounds.iter().all(|c| c.gap == 0.0 && c.pass));

        let t = run(&p, SolverKind::Gda, &z(1.0, 1.0), 4, StepsizeRule::Explicit { eta: 0.1 }).unwrap();
        let err = certify(&t, &p).unwrap_err();
        assert!(err.to_string().contains("no bound defined for solver"));

        let t = run(&p, SolverKind::Pp(PpInner::AffineExact), &z(1.0, 1.0), 32, StepsizeRule::PpFixed { eta: 1.0 }).unwrap();
        assert!(certify(&t, &p).unwrap().all_pass());
    }

    proptest::proptest! {
        #[test]
        fn bounds_shrink_with_n_and_grow_with_d(
            d in 0.0f64..100.0,
            l in 0.01f64..10.0,
            eta in 0.01f64..10.0,
            sigma in 0.01f64..0.99,
            n in 1usize..100_000,
        ) {
            for theorem in [Theorem::Pp, Theorem::Ogda, Theorem::Eg] {
                let c = BoundConstants { d, l, eta, sigma: Some(sigma), n };
                let base = bound_value(theorem, &c).unwrap();
                let later = bound_value(theorem, &BoundConstants { n: n + 1, ..c }).unwrap();
                let wider = bound_value(theorem, &BoundConstants { d: d + 1.0, ..c }).unwrap();
                proptest::prop_assert!(later <= base && wider > base);
                proptest::prop_assert!((base * n as f64 - later * (n + 1) as f64).abs() <= 1e-9 * base.max(1.0) * n as f64);
            }
        }
    }
}
