//! Dense linear-algebra helpers: spectral norms by power iteration and
//! saddle-system solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const POWER_MAX_ITER: usize = 10_000;
pub const POWER_REL_TOL: f64 = 1e-12;

/// Relative inflation applied to power-iteration estimates so they can be
/// used as upper bounds.
pub const LIPSCHITZ_INFLATION: f64 = 1e-9;

/// Spectral norm `‖A‖₂` by power iteration on the smaller Gram matrix.
///
/// The returned value is the raw Rayleigh-quotient estimate; callers that
/// need an upper bound multiply by `1 + LIPSCHITZ_INFLATION`.
pub fn spectral_norm(a: &DMatrix<f64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let gram = if a.ncols() <= a.nrows() {
        a.transpose() * a
    } else {
        a * a.transpose()
    };
    let dim = gram.nrows();
    // Irrational-ish start vector; never orthogonal to a generic top eigenvector.
    let mut v = DVector::from_fn(dim, |i, _| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_749_895).fract());
    v /= v.norm();

    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        let rayleigh = v.dot(&w);
        let w_norm = w.norm();
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        if !w_norm.is_finite() {
            return Err(Error::non_finite("power iteration"));
        }
        v = w / w_norm;
        if (rayleigh - estimate).abs() <= POWER_REL_TOL * rayleigh.abs() {
            return Ok(rayleigh.max(0.0).sqrt());
        }
        estimate = rayleigh;
    }
    Err(Error::PowerIteration {
        iterations: POWER_MAX_ITER,
        estimate: estimate.max(0.0).sqrt(),
    })
}

/// Spectral norm inflated into a safe upper bound.
pub fn spectral_norm_upper(a: &DMatrix<f64>) -> Result<f64> {
    Ok(spectral_norm(a)? * (1.0 + LIPSCHITZ_INFLATION))
}

/// Minimum-norm least-squares solution of `K u = r` via SVD, with the
/// relative residual `‖K u − r‖ / (1 + ‖u‖)`.
pub fn min_norm_solve(k: &DMatrix<f64>, r: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    let svd = k.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * (k.nrows().max(k.ncols()) as f64) * f64::EPSILON;
    let u = svd
        .solve(r, eps)
        .map_err(|e| Error::Singular(e.to_string()))?;
    let residual = (k * &u - r).norm() / (1.0 + u.norm());
    Ok((u, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_and_diagonal_norms() {
        let one = DMatrix::from_element(1, 1, 1.0);
        assert!((spectral_norm(&one).unwrap() - 1.0).abs() < 1e-15);
        let diag = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 4.0]);
        assert!((spectral_norm(&diag).unwrap() - 4.0).abs() < 1e-10);
        assert_eq!(spectral_norm(&DMatrix::zeros(3, 2)).unwrap(), 0.0);
    }

    #[test]
    fn matches_symmetric_eigen_on_rectangular() {
        let a: DMatrix<f64> = DMatrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 0.3, 0.7, -1.1]);
        let exact = (a.transpose() * &a)
            .symmetric_eigen()
            .eigenvalues
            .max()
            .sqrt();
        let est = spectral_norm(&a).unwrap();
        assert!((est - exact).abs() <= 1e-10 * exact, "{est} vs {exact}");
        assert!(spectral_norm_upper(&a).unwrap() >= exact);
    }

    #[test]
    fn min_norm_solve_singular_consistent() {
        let k = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let r = DVector::from_vec(vec![2.0, 2.0]);
        let (u, res) = min_norm_solve(&k, &r).unwrap();
        assert!(res < 1e-14);
        assert!((u[0] - 1.0).abs() < 1e-14 && (u[1] - 1.0).abs() < 1e-14);
        let bad = DVector::from_vec(vec![2.0, 3.0]);
        let (_, res) = min_norm_solve(&k, &bad).unwrap();
        assert!(res > 0.1);
    }
}
