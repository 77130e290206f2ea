//! Joint decision vectors, the monotone operator `F(z) = [∇ₓf; −∇ᵧf]`,
//! and the running ergodic average shared by every solver.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stacked decision vector `z = [x; y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointPoint {
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

impl JointPoint {
    /// Builds a point, rejecting NaN and infinite entries.
    pub fn new(x: DVector<f64>, y: DVector<f64>) -> Result<Self> {
        let z = JointPoint { x, y };
        if !z.is_finite() {
            return Err(Error::non_finite("joint point"));
        }
        Ok(z)
    }

    pub fn from_slices(x: &[f64], y: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(x), DVector::from_column_slice(y))
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        JointPoint {
            x: DVector::zeros(m),
            y: DVector::zeros(n),
        }
    }

    /// Splits a stacked vector of length `m + n` at `m`.
    pub fn from_stacked(v: &DVector<f64>, m: usize) -> Result<Self> {
        if m > v.len() {
            return Err(Error::dims(format!("at least {m} entries"), v.len()));
        }
        let n = v.len() - m;
        Self::new(v.rows(0, m).into_owned(), v.rows(m, n).into_owned())
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn len(&self) -> usize {
        self.x.len() + self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.y.iter()).all(|v| v.is_finite())
    }

    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.iter())
    }

    /// Iterates over the stacked coordinates, x block first.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.x.iter().chain(self.y.iter()).copied()
    }

    pub fn norm_squared(&self) -> f64 {
        self.x.norm_squared() + self.y.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        if self.dims() != (m, n) {
            return Err(Error::dims(
                format!("({m}, {n})"),
                format!("{:?}", self.dims()),
            ));
        }
        Ok(())
    }

    /// `self - other`, blockwise.
    pub fn sub(&self, other: &JointPoint) -> Result<JointPoint> {
        let (m, n) = self.dims();
        other.check_dims(m, n)?;
        Ok(JointPoint {
            x: &self.x - &other.x,
            y: &self.y - &other.y,
        })
    }

    /// `⟨self, other⟩` over the stacked vector.
    pub fn dot(&self, other: &JointPoint) -> Result<f64> {
        let (m, n) = self.dims();
        other.check_dims(m, n)?;
        Ok(self.x.dot(&other.x) + self.y.dot(&other.y))
    }

    /// `self - step * v` evaluated coordinate by coordinate.
    pub fn step(&self, step: f64, v: &OperatorValue) -> Result<JointPoint> {
        let (m, n) = self.dims();
        v.check_dims(m, n)?;
        let x = self.x.zip_map(&v.gx, |a, g| a - step * g);
        let y = self.y.zip_map(&v.neg_gy, |a, g| a - step * g);
        JointPoint::new(x, y)
    }
}

/// Value of `F(z) = [∇ₓf(x, y); −∇ᵧf(x, y)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorValue {
    pub gx: DVector<f64>,
    pub neg_gy: DVector<f64>,
}

impl OperatorValue {
    pub fn zeros(m: usize, n: usize) -> Self {
        OperatorValue {
            gx: DVector::zeros(m),
            neg_gy: DVector::zeros(n),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.gx.len(), self.neg_gy.len())
    }

    pub fn check_dims(&self, m: usize, n: usize) -> Result<()> {
        if self.dims() != (m, n) {
            return Err(Error::dims(
                format!("({m}, {n})"),
                format!("{:?}", self.dims()),
            ));
        }
        Ok(())
    }

    pub fn stacked(&self) -> DVector<f64> {
        let m = self.gx.len();
        DVector::from_fn(m + self.neg_gy.len(), |i, _| {
            if i < m {
                self.gx[i]
            } else {
                self.neg_gy[i - m]
            }
        })
    }

    pub fn norm_squared(&self) -> f64 {
        self.gx.norm_squared() + self.neg_gy.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn sub(&self, other: &OperatorValue) -> Result<OperatorValue> {
        let (m, n) = self.dims();
        other.check_dims(m, n)?;
        Ok(OperatorValue {
            gx: &self.gx - &other.gx,
            neg_gy: &self.neg_gy - &other.neg_gy,
        })
    }

    /// `⟨F, z⟩` treating `z` as a direction in the joint space.
    pub fn dot_point(&self, z: &JointPoint) -> Result<f64> {
        let (m, n) = self.dims();
        z.check_dims(m, n)?;
        Ok(self.gx.dot(&z.x) + self.neg_gy.dot(&z.y))
    }

    pub fn is_finite(&self) -> bool {
        self.gx.iter().chain(self.neg_gy.iter()).all(|v| v.is_finite())
    }
}

/// Block Lipschitz constants of the gradients and their maximum `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProfile {
    pub l_xx: f64,
    pub l_xy: f64,
    pub l_yx: f64,
    pub l_yy: f64,
    pub l_max: f64,
}

impl LipschitzProfile {
    pub fn new(l_xx: f64, l_xy: f64, l_yx: f64, l_yy: f64) -> Result<Self> {
        let all = [l_xx, l_xy, l_yx, l_yy];
        if all.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidProblem(format!(
                "Lipschitz constants must be finite and nonnegative, got {all:?}"
            )));
        }
        Ok(LipschitzProfile {
            l_xx,
            l_xy,
            l_yx,
            l_yy,
            l_max: all.into_iter().fold(0.0, f64::max),
        })
    }
}

/// A convex-concave function `f(x, y)` with gradient access.
///
/// Implementors may assume arguments have the dimensions reported by
/// [`SaddleProblem::dims`]; the checked entry points live in
/// [`operator_f`] and [`crate::problems`].
pub trait SaddleProblem: Sync {
    /// `(m, n)`: dimensions of the x and y blocks.
    fn dims(&self) -> (usize, usize);

    fn value(&self, z: &JointPoint) -> f64;

    fn grad_x(&self, z: &JointPoint) -> DVector<f64>;

    fn grad_y(&self, z: &JointPoint) -> DVector<f64>;

    /// A known saddle point, when one is available in closed form.
    fn saddle_point(&self) -> Option<&JointPoint> {
        None
    }

    fn lipschitz(&self) -> Option<LipschitzProfile> {
        None
    }

    /// `(M, q)` with `F(z) = M z + q`, for problems whose operator is affine.
    fn affine_operator(&self) -> Option<(nalgebra::DMatrix<f64>, DVector<f64>)> {
        None
    }

    /// Downcast hook for the quadratic family, used by exact inner maximizations.
    fn as_quadratic(&self) -> Option<&crate::problems::QuadraticSaddle> {
        None
    }
}

/// Evaluates `F(z) = [∇ₓf; −∇ᵧf]`.
pub fn operator_f<P: SaddleProblem + ?Sized>(problem: &P, z: &JointPoint) -> Result<OperatorValue> {
    let (m, n) = problem.dims();
    z.check_dims(m, n)?;
    let gx = problem.grad_x(z);
    let neg_gy = -problem.grad_y(z);
    let value = OperatorValue { gx, neg_gy };
    value.check_dims(m, n)?;
    if !value.is_finite() {
        return Err(Error::non_finite("operator value"));
    }
    Ok(value)
}

/// Euclidean `‖z1 − z2‖²` of the stacked difference.
pub fn squared_distance(z1: &JointPoint, z2: &JointPoint) -> Result<f64> {
    let (m, n) = z1.dims();
    z2.check_dims(m, n)?;
    let dx = z1.x.iter().zip(z2.x.iter()).map(|(a, b)| (a - b) * (a - b));
    let dy = z1.y.iter().zip(z2.y.iter()).map(|(a, b)| (a - b) * (a - b));
    Ok(dx.chain(dy).sum())
}

/// Incremental mean of joint points.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningAverage {
    pub count: usize,
    pub mean: Option<JointPoint>,
}

impl RunningAverage {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds `z` into the mean: `mean += (z - mean) / count`.
    pub fn push(&mut self, z: &JointPoint) -> Result<()> {
        match &mut self.mean {
            None => {
                if !z.is_finite() {
                    return Err(Error::non_finite("running average"));
                }
                self.mean = Some(z.clone());
                self.count = 1;
            }
            Some(mean) => {
                let (m, n) = mean.dims();
                z.check_dims(m, n)?;
                let count = self.count + 1;
                let inv = 1.0 / count as f64;
                mean.x.zip_apply(&z.x, |a, b| *a += (b - *a) * inv);
                mean.y.zip_apply(&z.y, |a, b| *a += (b - *a) * inv);
                if !mean.is_finite() {
                    return Err(Error::non_finite("running average"));
                }
                self.count = count;
            }
        }
        Ok(())
    }
}

/// Functional form of [`RunningAverage::push`].
pub fn update_average(avg: &RunningAverage, z: &JointPoint) -> Result<RunningAverage> {
    let mut next = avg.clone();
    next.push(z)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> JointPoint {
        JointPoint::from_slices(&[x], &[y]).unwrap()
    }

    #[test]
    fn rejects_non_finite_points() {
        assert!(JointPoint::from_slices(&[f64::NAN], &[0.0]).is_err());
        assert!(JointPoint::from_slices(&[0.0], &[f64::INFINITY]).is_err());
    }

    #[test]
    fn average_examples() {
        let avg = update_average(&RunningAverage::new(), &p(1.0, 1.0)).unwrap();
        assert_eq!(avg.count, 1);
        assert_eq!(avg.mean.as_ref().unwrap(), &p(1.0, 1.0));
        let avg = update_average(&avg, &p(0.0, 0.0)).unwrap();
        assert_eq!(avg.count, 2);
        assert_eq!(avg.mean.as_ref().unwrap(), &p(0.5, 0.5));
        let avg = update_average(&avg, &p(2.0, 2.0)).unwrap();
        assert_eq!(avg.count, 3);
        assert_eq!(avg.mean.as_ref().unwrap(), &p(1.0, 1.0));
    }

    #[test]
    fn average_rejects_dimension_mismatch() {
        let mut avg = RunningAverage::new();
        avg.push(&p(1.0, 1.0)).unwrap();
        let other = JointPoint::from_slices(&[1.0, 2.0], &[1.0]).unwrap();
        assert!(matches!(avg.push(&other), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn squared_distance_examples() {
        assert_eq!(squared_distance(&p(1.0, 1.0), &p(0.0, 0.0)).unwrap(), 2.0);
        assert_eq!(squared_distance(&p(0.3, -7.0), &p(0.3, -7.0)).unwrap(), 0.0);
        assert_eq!(squared_distance(&p(0.25, 1.25), &p(0.0, 0.0)).unwrap(), 1.625);
        let wide = JointPoint::zeros(2, 1);
        assert!(squared_distance(&p(0.0, 0.0), &wide).is_err());
    }

    #[test]
    fn lipschitz_max() {
        let l = LipschitzProfile::new(1.0, 3.0, 3.0, 2.0).unwrap();
        assert_eq!(l.l_max, 3.0);
        assert!(LipschitzProfile::new(-1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn stacked_roundtrip() {
        let z = JointPoint::from_slices(&[1.0, 2.0], &[3.0]).unwrap();
        let s = z.stacked();
        assert_eq!(s.as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(JointPoint::from_stacked(&s, 2).unwrap(), z);
    }
}
