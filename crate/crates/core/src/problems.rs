//! Quadratic convex-concave test problems
//! `f(x, y) = ½xᵀPx + xᵀAy − ½yᵀQy + bᵀx + cᵀy`
//! with exact saddle points, spectral Lipschitz profiles and seeded generators.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::base::{operator_f, JointPoint, LipschitzProfile, SaddleProblem};
use crate::error::{Error, Result};
use crate::linalg;

pub const SYMMETRY_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-12;
pub const SADDLE_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Bilinear,
    Quadratic,
}

/// Dense quadratic saddle problem. Bilinear problems are the case `P = Q = 0`, `b = c = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSaddle {
    kind: ProblemKind,
    seed: Option<u64>,
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    saddle: JointPoint,
    lipschitz: LipschitzProfile,
}

impl QuadraticSaddle {
    /// Validates convexity-concavity, solves for a saddle point and computes
    /// the Lipschitz profile.
    pub fn new(
        p: DMatrix<f64>,
        q: DMatrix<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        c: DVector<f64>,
    ) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if m == 0 || n == 0 {
            return Err(Error::InvalidProblem("empty block dimension".into()));
        }
        if p.shape() != (m, m) || q.shape() != (n, n) || b.len() != m || c.len() != n {
            return Err(Error::dims(
                format!("P {m}x{m}, Q {n}x{n}, b {m}, c {n}"),
                format!(
                    "P {:?}, Q {:?}, b {}, c {}",
                    p.shape(),
                    q.shape(),
                    b.len(),
                    c.len()
                ),
            ));
        }
        let finite = p.iter().chain(q.iter()).chain(a.iter()).chain(b.iter()).chain(c.iter());
        if !finite.into_iter().all(|v| v.is_finite()) {
            return Err(Error::non_finite("problem data"));
        }
        check_psd("P", &p)?;
        check_psd("Q", &q)?;

        let l_xx = linalg::spectral_norm_upper(&p)?;
        let l_yy = linalg::spectral_norm_upper(&q)?;
        let l_a = linalg::spectral_norm_upper(&a)?;
        let lipschitz = LipschitzProfile::new(l_xx, l_a, l_a, l_yy)?;
        if lipschitz.l_max == 0.0 {
            return Err(Error::InvalidProblem(
                "Lipschitz constant is zero (constant gradient)".into(),
            ));
        }

        let kind = if p.iter().chain(q.iter()).chain(b.iter()).chain(c.iter()).all(|v| *v == 0.0) {
            ProblemKind::Bilinear
        } else {
            ProblemKind::Quadratic
        };

        let mut problem = QuadraticSaddle {
            kind,
            seed: None,
            p,
            q,
            a,
            b,
            c,
            saddle: JointPoint::zeros(m, n),
            lipschitz,
        };
        problem.saddle = problem.solve_saddle()?;
        Ok(problem)
    }

    pub fn bilinear(a: DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        Self::new(
            DMatrix::zeros(m, m),
            DMatrix::zeros(n, n),
            a,
            DVector::zeros(m),
            DVector::zeros(n),
        )
    }

    /// Builds a problem from row-major 1-D data; a convenience for tests and docs.
    pub fn scalar(p: f64, q: f64, a: f64, b: f64, c: f64) -> Result<Self> {
        let m1 = |v| DMatrix::from_element(1, 1, v);
        Self::new(m1(p), m1(q), m1(a), DVector::from_element(1, b), DVector::from_element(1, c))
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn saddle(&self) -> &JointPoint {
        &self.saddle
    }

    pub fn profile(&self) -> LipschitzProfile {
        self.lipschitz
    }

    /// `f(x*, y*)`.
    pub fn optimal_value(&self) -> f64 {
        self.value(&self.saddle)
    }

    /// Stacked operator matrix `M = [[P, A], [−Aᵀ, Q]]`.
    pub fn operator_matrix(&self) -> DMatrix<f64> {
        let (m, n) = self.a.shape();
        let mut mat = DMatrix::zeros(m + n, m + n);
        mat.view_mut((0, 0), (m, m)).copy_from(&self.p);
        mat.view_mut((0, m), (m, n)).copy_from(&self.a);
        mat.view_mut((m, 0), (n, m)).copy_from(&(-self.a.transpose()));
        mat.view_mut((m, m), (n, n)).copy_from(&self.q);
        mat
    }

    /// Upper bound on the Lipschitz constant of `F` itself, `‖M‖₂`.
    ///
    /// Equals `l_max` for bilinear problems and for problems without coupling;
    /// with both curvature and coupling it can exceed `l_max` (by at most 2x).
    pub fn operator_lipschitz(&self) -> Result<f64> {
        linalg::spectral_norm_upper(&self.operator_matrix())
    }

    fn solve_saddle(&self) -> Result<JointPoint> {
        let (m, n) = self.a.shape();
        // [[P, A], [Aᵀ, −Q]] [x; y] = [−b; −c]
        let mut k = DMatrix::zeros(m + n, m + n);
        k.view_mut((0, 0), (m, m)).copy_from(&self.p);
        k.view_mut((0, m), (m, n)).copy_from(&self.a);
        k.view_mut((m, 0), (n, m)).copy_from(&self.a.transpose());
        k.view_mut((m, m), (n, n)).copy_from(&(-&self.q));
        let mut rhs = DVector::zeros(m + n);
        rhs.rows_mut(0, m).copy_from(&(-&self.b));
        rhs.rows_mut(m, n).copy_from(&(-&self.c));
        let (u, _) = linalg::min_norm_solve(&k, &rhs)?;
        let z = JointPoint::from_stacked(&u, m)?;
        let residual = operator_f(self, &z)?.norm();
        if residual > SADDLE_RESIDUAL_TOL * (1.0 + z.norm()) {
            return Err(Error::NoSaddlePoint { residual });
        }
        Ok(z)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProblemDocument::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDocument =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("problem JSON: {e}")))?;
        doc.into_problem()
    }
}

fn check_psd(name: &str, mat: &DMatrix<f64>) -> Result<()> {
    let n = mat.nrows();
    for i in 0..n {
        for j in 0..i {
            if (mat[(i, j)] - mat[(j, i)]).abs() > SYMMETRY_TOL {
                return Err(Error::InvalidProblem(format!("{name} is not symmetric")));
            }
        }
    }
    let min_eig = mat.clone().symmetric_eigen().eigenvalues.min();
    if min_eig < -PSD_TOL {
        return Err(Error::InvalidProblem(format!(
            "{name} is not positive semidefinite (min eigenvalue {min_eig:e})"
        )));
    }
    Ok(())
}

impl SaddleProblem for QuadraticSaddle {
    fn dims(&self) -> (usize, usize) {
        self.a.shape()
    }

    fn value(&self, z: &JointPoint) -> f64 {
        let (x, y) = (&z.x, &z.y);
        0.5 * x.dot(&(&self.p * x)) + x.dot(&(&self.a * y)) - 0.5 * y.dot(&(&self.q * y))
            + self.b.dot(x)
            + self.c.dot(y)
    }

    fn grad_x(&self, z: &JointPoint) -> DVector<f64> {
        &self.p * &z.x + &self.a * &z.y + &self.b
    }

    fn grad_y(&self, z: &JointPoint) -> DVector<f64> {
        self.a.tr_mul(&z.x) - &self.q * &z.y + &self.c
    }

    fn saddle_point(&self) -> Option<&JointPoint> {
        Some(&self.saddle)
    }

    fn lipschitz(&self) -> Option<LipschitzProfile> {
        Some(self.lipschitz)
    }

    fn affine_operator(&self) -> Option<(DMatrix<f64>, DVector<f64>)> {
        let (m, n) = self.a.shape();
        let mut q = DVector::zeros(m + n);
        q.rows_mut(0, m).copy_from(&self.b);
        q.rows_mut(m, n).copy_from(&(-&self.c));
        Some((self.operator_matrix(), q))
    }

    fn as_quadratic(&self) -> Option<&QuadraticSaddle> {
        Some(self)
    }
}

/// `f(x, y)` with a dimension check.
pub fn f_value<P: SaddleProblem + ?Sized>(problem: &P, z: &JointPoint) -> Result<f64> {
    let (m, n) = problem.dims();
    z.check_dims(m, n)?;
    Ok(problem.value(z))
}

pub fn grad_x<P: SaddleProblem + ?Sized>(problem: &P, z: &JointPoint) -> Result<DVector<f64>> {
    let (m, n) = problem.dims();
    z.check_dims(m, n)?;
    Ok(problem.grad_x(z))
}

pub fn grad_y<P: SaddleProblem + ?Sized>(problem: &P, z: &JointPoint) -> Result<DVector<f64>> {
    let (m, n) = problem.dims();
    z.check_dims(m, n)?;
    Ok(problem.grad_y(z))
}

pub fn lipschitz_profile<P: SaddleProblem + ?Sized>(problem: &P) -> Result<LipschitzProfile> {
    problem
        .lipschitz()
        .ok_or_else(|| Error::Unsupported("problem does not declare a Lipschitz profile".into()))
}

pub fn saddle_point<P: SaddleProblem + ?Sized>(problem: &P) -> Result<JointPoint> {
    problem
        .saddle_point()
        .cloned()
        .ok_or(Error::NoSaddlePoint { residual: f64::NAN })
}

/// Closed interval `[lo, hi]` for eigenvalues or singular values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub lo: f64,
    pub hi: f64,
}

impl Spectrum {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Spectrum { lo, hi }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!("{name} spectrum bounds must be finite")));
        }
        if self.lo < 0.0 {
            return Err(Error::Config(format!(
                "{name} spectrum lower bound must be nonnegative, got {}",
                self.lo
            )));
        }
        if self.lo > self.hi {
            return Err(Error::Config(format!(
                "{name} spectrum is empty: [{}, {}]",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        self.lo + (self.hi - self.lo) * u
    }
}

/// Recipe for a seeded random problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_curvature")]
    pub p_spectrum: Spectrum,
    #[serde(default = "default_curvature")]
    pub q_spectrum: Spectrum,
    #[serde(default = "default_coupling")]
    pub a_spectrum: Spectrum,
    /// Scale of the Gaussian linear terms `b`, `c` (quadratic kind only).
    #[serde(default = "default_offset")]
    pub offset_scale: f64,
}

fn default_curvature() -> Spectrum {
    Spectrum::new(0.0, 1.0)
}

fn default_coupling() -> Spectrum {
    Spectrum::new(0.5, 1.0)
}

fn default_offset() -> f64 {
    1.0
}

impl ProblemSpec {
    pub fn bilinear(m: usize, n: usize, seed: u64) -> Self {
        ProblemSpec {
            kind: ProblemKind::Bilinear,
            m,
            n,
            seed,
            p_spectrum: default_curvature(),
            q_spectrum: default_curvature(),
            a_spectrum: default_coupling(),
            offset_scale: default_offset(),
        }
    }

    pub fn quadratic(m: usize, n: usize, seed: u64) -> Self {
        ProblemSpec {
            kind: ProblemKind::Quadratic,
            ..Self::bilinear(m, n, seed)
        }
    }
}

fn random_orthogonal(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn random_psd(dim: usize, spectrum: Spectrum, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let r = random_orthogonal(dim, rng);
    let lambda = DVector::from_fn(dim, |_, _| spectrum.sample(rng));
    let mat = r.transpose() * DMatrix::from_diagonal(&lambda) * &r;
    (&mat + mat.transpose()) * 0.5
}

/// Deterministic problem from a spec: identical specs give bit-identical problems.
pub fn generate(spec: &ProblemSpec) -> Result<QuadraticSaddle> {
    let (m, n) = (spec.m, spec.n);
    if m == 0 || n == 0 {
        return Err(Error::Config("problem dimensions must be positive".into()));
    }
    spec.a_spectrum.validate("A")?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let (p, q, b, c) = match spec.kind {
        ProblemKind::Bilinear => (
            DMatrix::zeros(m, m),
            DMatrix::zeros(n, n),
            DVector::zeros(m),
            DVector::zeros(n),
        ),
        ProblemKind::Quadratic => {
            spec.p_spectrum.validate("P")?;
            spec.q_spectrum.validate("Q")?;
            if !spec.offset_scale.is_finite() {
                return Err(Error::Config("offset_scale must be finite".into()));
            }
            let p = random_psd(m, spec.p_spectrum, &mut rng);
            let q = random_psd(n, spec.q_spectrum, &mut rng);
            let b = DVector::from_fn(m, |_, _| spec.offset_scale * rng.sample::<f64, _>(StandardNormal));
            let c = DVector::from_fn(n, |_, _| spec.offset_scale * rng.sample::<f64, _>(StandardNormal));
            (p, q, b, c)
        }
    };

    let u = random_orthogonal(m, &mut rng);
    let v = random_orthogonal(n, &mut rng);
    let mut sigma = DMatrix::zeros(m, n);
    for i in 0..m.min(n) {
        sigma[(i, i)] = spec.a_spectrum.sample(&mut rng);
    }
    let a = u * sigma * v.transpose();

    let mut problem = QuadraticSaddle::new(p, q, a, b, c)?;
    problem.kind = spec.kind;
    problem.seed = Some(spec.seed);
    Ok(problem)
}

/// Uniform draw from the ball of the given radius around the problem's saddle point.
pub fn random_start(problem: &QuadraticSaddle, radius: f64, seed: u64) -> Result<JointPoint> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::Config(format!("start radius must be nonnegative, got {radius}")));
    }
    let (m, n) = problem.dims();
    let d = m + n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let u: f64 = rng.random();
    let r = radius * u.powf(1.0 / d as f64);
    let offset = dir.normalize() * r;
    let star = problem.saddle().stacked();
    JointPoint::from_stacked(&(star + offset), m)
}

/// The seeded problem set used by the verification battery: alternating
/// bilinear and quadratic problems over a spread of dimensions.
pub fn benchmark_specs(count: usize, base_seed: u64) -> Vec<ProblemSpec> {
    const DIMS: [(usize, usize); 8] = [(1, 1), (2, 2), (3, 2), (5, 5), (4, 7), (8, 8), (13, 11), (20, 20)];
    (0..count)
        .map(|i| {
            let (m, n) = DIMS[(i / 2) % DIMS.len()];
            let seed = base_seed + i as u64;
            if i % 2 == 0 {
                ProblemSpec::bilinear(m, n, seed)
            } else {
                ProblemSpec::quadratic(m, n, seed)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDocument {
    kind: ProblemKind,
    m: usize,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    p: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

fn rows(mat: &DMatrix<f64>) -> Vec<Vec<f64>> {
    mat.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn from_rows(name: &str, data: &[Vec<f64>], nrows: usize, ncols: usize) -> Result<DMatrix<f64>> {
    if data.len() != nrows || data.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!(
            "matrix {name} must be {nrows}x{ncols} (row-major)"
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| data[i][j]))
}

impl From<&QuadraticSaddle> for ProblemDocument {
    fn from(p: &QuadraticSaddle) -> Self {
        let (m, n) = p.dims();
        ProblemDocument {
            kind: p.kind,
            m,
            n,
            seed: p.seed,
            p: rows(&p.p),
            q: rows(&p.q),
            a: rows(&p.a),
            b: p.b.iter().copied().collect(),
            c: p.c.iter().copied().collect(),
        }
    }
}

impl ProblemDocument {
    fn into_problem(self) -> Result<QuadraticSaddle> {
        let (m, n) = (self.m, self.n);
        if self.b.len() != m || self.c.len() != n {
            return Err(Error::Config(format!("vectors b, c must have lengths {m}, {n}")));
        }
        let mut problem = QuadraticSaddle::new(
            from_rows("p", &self.p, m, m)?,
            from_rows("q", &self.q, n, n)?,
            from_rows("a", &self.a, m, n)?,
            DVector::from_vec(self.b),
            DVector::from_vec(self.c),
        )?;
        problem.kind = self.kind;
        problem.seed = self.seed;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(x: &[f64], y: &[f64]) -> JointPoint {
        JointPoint::from_slices(x, y).unwrap()
    }

    fn bilinear_1d() -> QuadraticSaddle {
        QuadraticSaddle::bilinear(DMatrix::from_element(1, 1, 1.0)).unwrap()
    }

    #[test]
    fn f_value_examples() {
        let bl = bilinear_1d();
        assert_eq!(f_value(&bl, &z(&[1.0], &[1.0])).unwrap(), 1.0);
        assert_eq!(f_value(&bl, &z(&[0.0], &[5.0])).unwrap(), 0.0);
        let quad = QuadraticSaddle::scalar(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(f_value(&quad, &z(&[1.0], &[1.0])).unwrap(), 1.0);
        assert!(f_value(&quad, &z(&[1.0, 2.0], &[1.0])).is_err());
    }

    #[test]
    fn gradient_examples() {
        let bl = bilinear_1d();
        let at = z(&[2.0], &[3.0]);
        assert_eq!(grad_x(&bl, &at).unwrap()[0], 3.0);
        assert_eq!(grad_y(&bl, &at).unwrap()[0], 2.0);
        let quad = QuadraticSaddle::scalar(2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let at = z(&[1.0], &[1.0]);
        assert_eq!(grad_x(&quad, &at).unwrap()[0], 2.0);
        assert_eq!(grad_y(&quad, &at).unwrap()[0], -1.0);
    }

    #[test]
    fn operator_examples() {
        let bl = bilinear_1d();
        let f = operator_f(&bl, &z(&[1.0], &[1.0])).unwrap();
        assert_eq!((f.gx[0], f.neg_gy[0]), (1.0, -1.0));
        let f = operator_f(&bl, &z(&[0.0], &[0.0])).unwrap();
        assert_eq!((f.gx[0], f.neg_gy[0]), (0.0, 0.0));
        let quad = QuadraticSaddle::scalar(1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let f = operator_f(&quad, &z(&[2.0], &[3.0])).unwrap();
        assert_eq!((f.gx[0], f.neg_gy[0]), (2.0, 3.0));
        assert!(operator_f(&quad, &z(&[2.0], &[3.0, 1.0])).is_err());
    }

    #[test]
    fn lipschitz_examples() {
        let l = bilinear_1d().profile();
        assert!((l.l_max - 1.0).abs() <= 2e-9 && l.l_max >= 1.0);
        let quad = QuadraticSaddle::new(
            DMatrix::from_element(1, 1, 2.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1e-3),
            DVector::zeros(1),
            DVector::zeros(1),
        )
        .unwrap();
        let l = quad.profile();
        assert!((l.l_xx - 2.0).abs() < 1e-8 && (l.l_yy - 1.0).abs() < 1e-8);
        assert_eq!(l.l_max, l.l_xx);
        let diag = QuadraticSaddle::bilinear(DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 4.0])).unwrap();
        let exact = (diag.a().transpose() * diag.a()).symmetric_eigen().eigenvalues.max().sqrt();
        assert!((diag.profile().l_xy - exact).abs() <= 1e-8 * exact);
        assert!(diag.profile().l_xy >= exact);
    }

    #[test]
    fn zero_coupling_and_curvature_is_rejected() {
        let err = QuadraticSaddle::scalar(0.0, 0.0, 0.0, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidProblem(_)));
    }

    #[test]
    fn saddle_point_examples() {
        assert_eq!(bilinear_1d().saddle(), &z(&[0.0], &[0.0]));
        let quad = QuadraticSaddle::scalar(1.0, 1.0, 1.0, -1.0, 0.0).unwrap();
        let s = quad.saddle();
        assert!((s.x[0] - 0.5).abs() < 1e-14 && (s.y[0] - 0.5).abs() < 1e-14);
        assert!(operator_f(&quad, s).unwrap().norm() < 1e-14);
    }

    #[test]
    fn inconsistent_system_has_no_saddle_point() {
        // f = ½x² + 0·xy + y: linear in y with no curvature, so sup over y is infinite.
        let err = QuadraticSaddle::new(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::zeros(1, 1),
            DMatrix::zeros(1, 1),
            DVector::zeros(1),
            DVector::from_element(1, 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NoSaddlePoint { .. }), "{err:?}");
    }

    #[test]
    fn rejects_indefinite_curvature() {
        let err = QuadraticSaddle::scalar(-1.0, 1.0, 1.0, 0.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidProblem(_)));
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = ProblemSpec::quadratic(5, 4, 42);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let other = generate(&ProblemSpec::quadratic(5, 4, 43)).unwrap();
        assert_ne!(a.a(), other.a());
    }

    #[test]
    fn bilinear_spec_has_no_curvature() {
        let p = generate(&ProblemSpec::bilinear(3, 4, 9)).unwrap();
        assert!(p.p().iter().all(|v| *v == 0.0));
        assert!(p.q().iter().all(|v| *v == 0.0));
        assert_eq!(p.kind(), ProblemKind::Bilinear);
        assert!(p.saddle().iter().all(|v| v == 0.0));
    }

    #[test]
    fn generated_spectrum_is_respected() {
        let mut spec = ProblemSpec::quadratic(6, 3, 5);
        spec.p_spectrum = Spectrum::new(1.0, 2.0);
        let p = generate(&spec).unwrap();
        let l_xx = p.profile().l_xx;
        assert!((1.0..=2.0 * (1.0 + 1e-9)).contains(&l_xx), "{l_xx}");
    }

    #[test]
    fn negative_spectrum_bound_is_rejected() {
        let mut spec = ProblemSpec::quadratic(2, 2, 1);
        spec.q_spectrum = Spectrum::new(-0.5, 1.0);
        assert!(matches!(generate(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn random_seeded_saddle_residual() {
        let p = generate(&ProblemSpec::quadratic(5, 5, 7)).unwrap();
        assert!(operator_f(&p, p.saddle()).unwrap().norm() <= 1e-10);
    }

    #[test]
    fn json_roundtrip_is_bit_exact() {
        let p = generate(&ProblemSpec::quadratic(4, 3, 11)).unwrap();
        let text = p.to_json();
        let back = QuadraticSaddle::from_json(&text).unwrap();
        assert_eq!(p, back);
        assert_eq!(text, back.to_json());
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let text = r#"{"kind":"bilinear","m":1,"n":1,"p":[[0.0]],"q":[[0.0]],"a":[[1.0, 2.0]],"b":[0.0],"c":[0.0]}"#;
        assert!(matches!(QuadraticSaddle::from_json(text), Err(Error::Config(_))));
    }

    #[test]
    fn random_start_stays_in_radius() {
        let p = generate(&ProblemSpec::quadratic(3, 3, 2)).unwrap();
        for seed in 0..20 {
            let z0 = random_start(&p, 1.5, seed).unwrap();
            let d = crate::base::squared_distance(&z0, p.saddle()).unwrap();
            assert!(d <= 1.5 * 1.5 + 1e-12);
        }
    }
}
