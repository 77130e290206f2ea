//! Brute-force references: finite-difference gradients, grid search over
//! balls, and a naive replay of the solver recurrences.
//!
//! Nothing here calls into `solvers`; the only shared surface is the
//! [`SaddleProblem`] interface.

use nalgebra::DVector;

use crate::base::{JointPoint, OperatorValue, RunningAverage, SaddleProblem};
use crate::error::{Error, Result};
use crate::solvers::{PpInner, SolverKind, StepsizeRule};
use crate::trajectory::{StepRecord, Trajectory};

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const MAX_GRID_DIM: usize = 4;
const MAX_GRID_POINTS: u128 = 200_000_000;

/// Central finite differences of `f`, sign-flipped on the y block to match `F`.
pub fn finite_diff_gradient<P: SaddleProblem + ?Sized>(problem: &P, z: &JointPoint, h: f64) -> Result<OperatorValue> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {h}")));
    }
    let (m, n) = problem.dims();
    z.check_dims(m, n)?;
    let mut probe = z.clone();
    let mut gx = DVector::zeros(m);
    for i in 0..m {
        let orig = probe.x[i];
        probe.x[i] = orig + h;
        let plus = problem.value(&probe);
        probe.x[i] = orig - h;
        let minus = problem.value(&probe);
        probe.x[i] = orig;
        gx[i] = (plus - minus) / (2.0 * h);
    }
    let mut neg_gy = DVector::zeros(n);
    for j in 0..n {
        let orig = probe.y[j];
        probe.y[j] = orig + h;
        let plus = problem.value(&probe);
        probe.y[j] = orig - h;
        let minus = problem.value(&probe);
        probe.y[j] = orig;
        neg_gy[j] = -(plus - minus) / (2.0 * h);
    }
    Ok(OperatorValue { gx, neg_gy })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreeBlock {
    /// Minimize over x with y fixed.
    X,
    /// Maximize over y with x fixed.
    Y,
}

/// Exhaustive search over a regular grid on the bounding box of the ball of
/// `radius` around `center`'s free block, keeping only points inside the ball.
/// The other block is taken from `fixed`.
///
/// Returns the maximum of `f` for [`FreeBlock::Y`] and the minimum for [`FreeBlock::X`].
pub fn grid_inner_opt<P: SaddleProblem + ?Sized>(
    problem: &P,
    block: FreeBlock,
    fixed: &JointPoint,
    center: &JointPoint,
    radius: f64,
    points_per_dim: usize,
) -> Result<f64> {
    let (m, n) = problem.dims();
    fixed.check_dims(m, n)?;
    center.check_dims(m, n)?;
    let dim = match block {
        FreeBlock::X => m,
        FreeBlock::Y => n,
    };
    if dim > MAX_GRID_DIM {
        return Err(Error::Unsupported(format!(
            "grid search limited to {MAX_GRID_DIM} dimensions, got {dim}"
        )));
    }
    if points_per_dim < 2 || !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Config("grid needs at least 2 points per dimension and a finite radius".into()));
    }
    if (points_per_dim as u128).pow(dim as u32) > MAX_GRID_POINTS {
        return Err(Error::Unsupported(format!(
            "grid of {points_per_dim}^{dim} points is too large"
        )));
    }
    let c: Vec<f64> = match block {
        FreeBlock::X => center.x.iter().copied().collect(),
        FreeBlock::Y => center.y.iter().copied().collect(),
    };
    let axis: Vec<f64> = (0..points_per_dim)
        .map(|i| -radius + 2.0 * radius * i as f64 / (points_per_dim - 1) as f64)
        .collect();
    let limit = radius * radius * (1.0 + 1e-12);

    let mut point = fixed.clone();
    let mut best: Option<f64> = None;
    let mut idx = vec![0usize; dim];
    loop {
        let norm2: f64 = idx.iter().map(|&i| axis[i] * axis[i]).sum();
        if norm2 <= limit {
            for (d, &i) in idx.iter().enumerate() {
                match block {
                    FreeBlock::X => point.x[d] = c[d] + axis[i],
                    FreeBlock::Y => point.y[d] = c[d] + axis[i],
                }
            }
            let v = problem.value(&point);
            best = Some(match (best, block) {
                (None, _) => v,
                (Some(b), FreeBlock::Y) => b.max(v),
                (Some(b), FreeBlock::X) => b.min(v),
            });
        }
        // odometer increment
        let mut d = 0;
        loop {
            if d == dim {
                return best.ok_or_else(|| Error::Config("empty grid".into()));
            }
            idx[d] += 1;
            if idx[d] < points_per_dim {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn naive_operator<P: SaddleProblem + ?Sized>(problem: &P, z: &[f64]) -> Result<Vec<f64>> {
    let (m, _) = problem.dims();
    let point = JointPoint::from_slices(&z[..m], &z[m..])?;
    let gx = problem.grad_x(&point);
    let gy = problem.grad_y(&point);
    let out: Vec<f64> = gx.iter().copied().chain(gy.iter().map(|v| -v)).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::non_finite("replay operator"));
    }
    Ok(out)
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
fn gauss_jordan_inverse(mut a: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let d = a.len();
    let mut inv: Vec<Vec<f64>> = (0..d)
        .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Singular("replay proximal system".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..d {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..d {
            if i != col {
                let factor = a[i][col];
                if factor != 0.0 {
                    for j in 0..d {
                        a[i][j] -= factor * a[col][j];
                        inv[i][j] -= factor * inv[col][j];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Replays `solver` for `iterations` steps with plain vectors, storing every
/// iterate and operator value.
pub fn recurrence_replay<P: SaddleProblem + ?Sized>(
    solver: SolverKind,
    problem: &P,
    z0: &JointPoint,
    iterations: usize,
    eta: f64,
) -> Result<Trajectory> {
    let (m, n) = problem.dims();
    z0.check_dims(m, n)?;
    if iterations == 0 || !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::Config("replay needs iterations >= 1 and a positive stepsize".into()));
    }
    let d = m + n;
    let mut zs: Vec<Vec<f64>> = vec![z0.iter().collect()];
    let mut fs: Vec<Vec<f64>> = Vec::new(); // F(z_k)
    let mut mids: Vec<Vec<f64>> = Vec::new();
    let mut f_mids: Vec<Vec<f64>> = Vec::new();

    let inverse = match solver {
        SolverKind::Pp(PpInner::AffineExact) => {
            let zero = vec![0.0; d];
            let q = naive_operator(problem, &zero)?;
            let mut system = vec![vec![0.0; d]; d];
            for j in 0..d {
                let mut e = zero.clone();
                e[j] = 1.0;
                let col = naive_operator(problem, &e)?;
                for i in 0..d {
                    system[i][j] = eta * (col[i] - q[i]) + if i == j { 1.0 } else { 0.0 };
                }
            }
            Some((gauss_jordan_inverse(system)?, q))
        }
        _ => None,
    };

    for k in 0..iterations {
        let z = zs[k].clone();
        let next: Vec<f64> = match solver {
            SolverKind::Gda => {
                let f = naive_operator(problem, &z)?;
                let next = (0..d).map(|i| z[i] - eta * f[i]).collect();
                fs.push(f);
                next
            }
            SolverKind::Ogda => {
                let f = naive_operator(problem, &z)?;
                let f_prev = if k == 0 { f.clone() } else { fs[k - 1].clone() };
                let next = (0..d).map(|i| z[i] - 2.0 * eta * f[i] + eta * f_prev[i]).collect();
                fs.push(f);
                next
            }
            SolverKind::Eg => {
                let f = naive_operator(problem, &z)?;
                let mid: Vec<f64> = (0..d).map(|i| z[i] - eta * f[i]).collect();
                let f_mid = naive_operator(problem, &mid)?;
                let next = (0..d).map(|i| z[i] - eta * f_mid[i]).collect();
                fs.push(f);
                mids.push(mid);
                f_mids.push(f_mid);
                next
            }
            SolverKind::Pp(PpInner::AffineExact) => {
                let (inv, q) = inverse.as_ref().expect("prepared");
                let rhs: Vec<f64> = (0..d).map(|i| z[i] - eta * q[i]).collect();
                (0..d).map(|i| (0..d).map(|j| inv[i][j] * rhs[j]).sum()).collect()
            }
            SolverKind::Pp(PpInner::FixedPoint { tol, max_iter }) => {
                let scaled = tol * z.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
                let mut w = z.clone();
                let mut converged = false;
                for _ in 0..max_iter {
                    let f = naive_operator(problem, &w)?;
                    let w_new: Vec<f64> = (0..d).map(|i| z[i] - eta * f[i]).collect();
                    let change = (0..d).map(|i| (w_new[i] - w[i]).powi(2)).sum::<f64>().sqrt();
                    w = w_new;
                    if change <= scaled {
                        converged = true;
                        break;
                    }
                }
                if !converged {
                    return Err(Error::FixedPoint { iterations: max_iter, residual: f64::NAN });
                }
                w
            }
        };
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::non_finite("replay iterate"));
        }
        zs.push(next);
    }

    let to_point = |v: &[f64]| JointPoint::from_slices(&v[..m], &v[m..]);
    let to_op = |v: &[f64]| OperatorValue {
        gx: DVector::from_column_slice(&v[..m]),
        neg_gy: DVector::from_column_slice(&v[m..]),
    };

    let mut traj = Trajectory::new(solver, eta, StepsizeRule::Explicit { eta }, z0.clone());
    let mut sum = vec![0.0; d];
    for k in 0..iterations {
        let averaged: &Vec<f64> = if solver == SolverKind::Eg { &mids[k] } else { &zs[k + 1] };
        for i in 0..d {
            sum[i] += averaged[i];
        }
        let count = (k + 1) as f64;
        let mean: Vec<f64> = sum.iter().map(|s| s / count).collect();
        let ergodic = to_point(&mean)?;
        let operator = if solver == SolverKind::Eg {
            to_op(&f_mids[k])
        } else {
            to_op(&naive_operator(problem, &zs[k + 1])?)
        };
        traj.ergodic = RunningAverage {
            count: k + 1,
            mean: Some(ergodic.clone()),
        };
        traj.records.push(StepRecord {
            k,
            iterate: to_point(&zs[k + 1])?,
            midpoint: mids.get(k).map(|v| to_point(v)).transpose()?,
            operator,
            f_at_ergodic: problem.value(&ergodic),
            ergodic,
            error_residual: None,
        });
    }
    Ok(traj)
}

/// Largest per-coordinate difference between the iterates (and midpoints)
/// of two trajectories. `None` if their shapes differ.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let diff = |p: &JointPoint, q: &JointPoint| -> Option<f64> {
        (p.dims() == q.dims()).then(|| p.iter().zip(q.iter()).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max))
    };
    let mut worst = 0.0_f64;
    for (ra, rb) in a.records.iter().zip(&b.records) {
        worst = worst.max(diff(&ra.iterate, &rb.iterate)?);
        match (&ra.midpoint, &rb.midpoint) {
            (Some(p), Some(q)) => worst = worst.max(diff(p, q)?),
            (None, None) => {}
            _ => return None,
        }
    }
    Some(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::QuadraticSaddle;
    use nalgebra::DMatrix;

    fn z(x: f64, y: f64) -> JointPoint {
        JointPoint::from_slices(&[x], &[y]).unwrap()
    }

    fn bilinear() -> QuadraticSaddle {
        QuadraticSaddle::bilinear(DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn finite_difference_examples() {
        let g = finite_diff_gradient(&bilinear(), &z(2.0, 3.0), DEFAULT_FD_STEP).unwrap();
        assert!((g.gx[0] - 3.0).abs() < 1e-8 && (g.neg_gy[0] + 2.0).abs() < 1e-8);
        let quad = QuadraticSaddle::scalar(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let g = finite_diff_gradient(&quad, &z(1.0, 0.0), DEFAULT_FD_STEP).unwrap();
        assert!((g.gx[0] - 2.0).abs() < 1e-8);
        assert!(finite_diff_gradient(&quad, &z(1.0, 0.0), 0.0).is_err());
    }

    #[test]
    fn grid_examples() {
        let p = bilinear();
        let origin = z(0.0, 0.0);
        let v = grid_inner_opt(&p, FreeBlock::Y, &z(0.25, 0.0), &origin, 2.0, 2001).unwrap();
        assert!((v - 0.5).abs() <= 0.002 * 0.25, "{v}");
        // At the saddle point the bilinear function is flat in both blocks.
        assert_eq!(grid_inner_opt(&p, FreeBlock::Y, &origin, &origin, 3.0, 101).unwrap(), 0.0);
        assert_eq!(grid_inner_opt(&p, FreeBlock::X, &origin, &origin, 3.0, 101).unwrap(), 0.0);
        let concave = QuadraticSaddle::scalar(0.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let v = grid_inner_opt(&concave, FreeBlock::Y, &origin, &origin, 2.0, 2001).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_high_dimension() {
        let p = QuadraticSaddle::bilinear(DMatrix::identity(5, 5)).unwrap();
        let origin = JointPoint::zeros(5, 5);
        assert!(matches!(
            grid_inner_opt(&p, FreeBlock::X, &origin, &origin, 1.0, 11),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn replay_examples() {
        let p = bilinear();
        let t = recurrence_replay(SolverKind::Ogda, &p, &z(1.0, 1.0), 2, 0.5).unwrap();
        assert_eq!(t.records[0].iterate, z(0.5, 1.5));
        assert_eq!(t.records[1].iterate, z(-0.5, 1.5));
        let t = recurrence_replay(SolverKind::Eg, &p, &z(1.0, 1.0), 1, 0.5).unwrap();
        assert_eq!(t.records[0].midpoint.as_ref().unwrap(), &z(0.5, 1.5));
        assert_eq!(t.records[0].iterate, z(0.25, 1.25));
        for solver in [
            SolverKind::Gda,
            SolverKind::Ogda,
            SolverKind::Eg,
            SolverKind::Pp(PpInner::AffineExact),
            SolverKind::Pp(PpInner::fixed_point()),
        ] {
            let t = recurrence_replay(solver, &p, &z(0.0, 0.0), 20, 0.5).unwrap();
            assert!(t.records.iter().all(|r| r.iterate == z(0.0, 0.0)), "{solver}");
        }
    }

    #[test]
    fn gauss_jordan_inverts() {
        let inv = gauss_jordan_inverse(vec![vec![0.0, 2.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(inv, vec![vec![-0.5, 1.0], vec![0.5, 0.0]]);
        assert!(gauss_jordan_inverse(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).is_err());
    }
}
