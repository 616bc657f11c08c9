//! Test objectives with exact Riemannian gradients and convexity metadata.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::constants::{delta, zeta};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind, Point, TangentVector, Vector};

/// Constants describing an objective, used to pick schedules and bounds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjectiveMeta {
    /// Geodesic smoothness constant (or a step-size proxy for it).
    pub smoothness: f64,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub minimizer: Option<Point>,
    pub f_star: Option<f64>,
}

/// A smooth function on a model space with its Riemannian gradient.
pub trait Objective: Send + Sync {
    fn manifold(&self) -> &Manifold;
    fn value(&self, x: &Point) -> f64;
    fn gradient(&self, x: &Point) -> Result<TangentVector>;
    fn metadata(&self) -> &ObjectiveMeta;

    /// `f(x) - f*` when the optimal value is known.
    fn gap(&self, x: &Point) -> Option<f64> {
        self.metadata().f_star.map(|f| self.value(x) - f)
    }
}

/// `f(x) = ½ d(x, p)²`, with gradient `-log_x(p)`.
#[derive(Debug, Clone)]
pub struct HalfSquaredDistance {
    manifold: Manifold,
    target: Point,
    meta: ObjectiveMeta,
}

impl HalfSquaredDistance {
    pub fn new(manifold: Manifold, target: Point) -> Result<Self> {
        manifold.check_point(&target, 1e-10)?;
        let k = manifold.curvature();
        let d = manifold.diameter();
        let (mu, smoothness) = match manifold.kind() {
            ManifoldKind::Euclidean => (Some(1.0), 1.0),
            ManifoldKind::Hyperboloid => (Some(1.0), zeta(k, d)),
            // Strongly convex on the working ball only while δ(K, D) > 0.
            ManifoldKind::Sphere => {
                let dl = delta(k, d)?;
                ((dl > 0.0).then_some(dl), 1.0)
            }
        };
        let meta = ObjectiveMeta {
            smoothness,
            mu,
            alpha: Some(2.0),
            minimizer: Some(target.clone()),
            f_star: Some(0.0),
        };
        Ok(Self { manifold, target, meta })
    }

    pub fn target(&self) -> &Point {
        &self.target
    }
}

/// Shorthand for [`HalfSquaredDistance::new`].
pub fn half_squared_distance(manifold: &Manifold, p: &Point) -> Result<HalfSquaredDistance> {
    HalfSquaredDistance::new(manifold.clone(), p.clone())
}

impl Objective for HalfSquaredDistance {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn value(&self, x: &Point) -> f64 {
        let d = self.manifold.distance(x, &self.target);
        0.5 * d * d
    }

    fn gradient(&self, x: &Point) -> Result<TangentVector> {
        Ok(self.manifold.log(x, &self.target)?.scaled(-1.0))
    }

    fn metadata(&self) -> &ObjectiveMeta {
        &self.meta
    }
}

/// `f(x) = -xᵀQx` on the unit sphere; minimised by the leading eigenvector.
#[derive(Debug, Clone)]
pub struct Rayleigh {
    manifold: Manifold,
    q: DMatrix<f64>,
    lambda_max: f64,
    meta: ObjectiveMeta,
}

impl Rayleigh {
    /// Builds the objective, computing the leading eigenpair of `q`.
    pub fn new(manifold: Manifold, q: DMatrix<f64>) -> Result<Self> {
        Self::check_inputs(&manifold, &q)?;
        let eig = SymmetricEigen::new(q.clone());
        let (imax, lambda_max) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, l)| if l > best.1 { (i, l) } else { best });
        let leading = eig.eigenvectors.column(imax).into_owned();
        Self::with_leading(manifold, q, lambda_max, leading)
    }

    /// Builds the objective from a known leading eigenpair.
    pub fn with_leading(
        manifold: Manifold,
        q: DMatrix<f64>,
        lambda_max: f64,
        leading: Vector,
    ) -> Result<Self> {
        Self::check_inputs(&manifold, &q)?;
        let n = leading.norm();
        let minimizer = manifold.point(leading / n)?;
        let meta = ObjectiveMeta {
            smoothness: 2.0 * lambda_max,
            mu: None,
            alpha: None,
            minimizer: Some(minimizer),
            f_star: Some(-lambda_max),
        };
        Ok(Self { manifold, q, lambda_max, meta })
    }

    fn check_inputs(manifold: &Manifold, q: &DMatrix<f64>) -> Result<()> {
        if manifold.kind() != ManifoldKind::Sphere || manifold.curvature() != 1.0 {
            return Err(Error::Contract("Rayleigh objective lives on the unit sphere".into()));
        }
        if q.nrows() != q.ncols() || q.nrows() != manifold.ambient_dim() {
            return Err(Error::Dimension { expected: manifold.ambient_dim(), got: q.nrows() });
        }
        let tol = 1e-12 * (1.0 + q.amax());
        if (q - q.transpose()).amax() > tol {
            return Err(Error::Contract("matrix is not symmetric".into()));
        }
        Ok(())
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }
}

/// Shorthand for [`Rayleigh::new`] on the unit sphere `S^{m-1}`.
pub fn rayleigh_objective(q: DMatrix<f64>) -> Result<Rayleigh> {
    let m = q.nrows();
    if m < 2 {
        return Err(Error::Contract("Rayleigh objective needs m ≥ 2".into()));
    }
    let manifold = Manifold::new(crate::manifold::ManifoldSpec::sphere(m - 1, 1.0, 3.0))?;
    Rayleigh::new(manifold, q)
}

impl Objective for Rayleigh {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn value(&self, x: &Point) -> f64 {
        -x.coords().dot(&(&self.q * x.coords()))
    }

    fn gradient(&self, x: &Point) -> Result<TangentVector> {
        let egrad = &self.q * x.coords() * -2.0;
        Ok(self.manifold.project(x, &egrad))
    }

    fn metadata(&self) -> &ObjectiveMeta {
        &self.meta
    }
}

/// Euclidean quadratic `½ (x - c)ᵀ A (x - c)` with `A` symmetric positive
/// semi-definite.
#[derive(Debug, Clone)]
pub struct Quadratic {
    manifold: Manifold,
    a: DMatrix<f64>,
    center: Vector,
    meta: ObjectiveMeta,
}

impl Quadratic {
    pub fn new(manifold: Manifold, a: DMatrix<f64>, center: Vector) -> Result<Self> {
        if manifold.kind() != ManifoldKind::Euclidean {
            return Err(Error::Contract("quadratic objective is Euclidean".into()));
        }
        if a.nrows() != manifold.dim() || a.ncols() != manifold.dim() || center.len() != manifold.dim() {
            return Err(Error::Dimension { expected: manifold.dim(), got: a.nrows() });
        }
        let eig = SymmetricEigen::new(a.clone());
        let lo = eig.eigenvalues.min();
        let hi = eig.eigenvalues.max();
        if lo < -1e-12 * (1.0 + hi.abs()) {
            return Err(Error::Contract("quadratic form must be positive semi-definite".into()));
        }
        let meta = ObjectiveMeta {
            smoothness: hi,
            mu: (lo > 0.0).then_some(lo),
            alpha: Some(1.0),
            minimizer: Some(Point::new(center.clone())),
            f_star: Some(0.0),
        };
        Ok(Self { manifold, a, center, meta })
    }

    /// `(µ/2)‖x‖²` on `R^n`.
    pub fn isotropic(manifold: Manifold, mu: f64) -> Result<Self> {
        let n = manifold.dim();
        Self::new(manifold, DMatrix::identity(n, n) * mu, Vector::zeros(n))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl Objective for Quadratic {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn value(&self, x: &Point) -> f64 {
        let r = x.coords() - &self.center;
        0.5 * r.dot(&(&self.a * &r))
    }

    fn gradient(&self, x: &Point) -> Result<TangentVector> {
        let r = x.coords() - &self.center;
        Ok(TangentVector::new(x.clone(), &self.a * r))
    }

    fn metadata(&self) -> &ObjectiveMeta {
        &self.meta
    }
}

/// Euclidean linear function `cᵀx`: constant gradient, no minimiser.
#[derive(Debug, Clone)]
pub struct Linear {
    manifold: Manifold,
    c: Vector,
    meta: ObjectiveMeta,
}

impl Linear {
    pub fn new(manifold: Manifold, c: Vector) -> Result<Self> {
        if manifold.kind() != ManifoldKind::Euclidean || c.len() != manifold.dim() {
            return Err(Error::Contract("linear objective is Euclidean with matching dimension".into()));
        }
        Ok(Self { manifold, c, meta: ObjectiveMeta::default() })
    }
}

impl Objective for Linear {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn value(&self, x: &Point) -> f64 {
        self.c.dot(x.coords())
    }

    fn gradient(&self, x: &Point) -> Result<TangentVector> {
        Ok(TangentVector::new(x.clone(), self.c.clone()))
    }

    fn metadata(&self) -> &ObjectiveMeta {
        &self.meta
    }
}

/// A constant function on any model space (zero gradient everywhere).
#[derive(Debug, Clone)]
pub struct Flat {
    manifold: Manifold,
    meta: ObjectiveMeta,
}

impl Flat {
    pub fn new(manifold: Manifold) -> Self {
        Self { manifold, meta: ObjectiveMeta::default() }
    }
}

impl Objective for Flat {
    fn manifold(&self) -> &Manifold {
        &self.manifold
    }

    fn value(&self, _x: &Point) -> f64 {
        0.0
    }

    fn gradient(&self, x: &Point) -> Result<TangentVector> {
        Ok(self.manifold.zero(x))
    }

    fn metadata(&self) -> &ObjectiveMeta {
        &self.meta
    }
}

/// Relative spacing of the smallest non-zero gap below `λ_max`.
pub const TOP_GAP_RATIO: f64 = 1e-10;

/// Spectrum in `[1, cond]` with `λ_max = cond`, `λ_min = 1`, and the gaps
/// `cond - λᵢ` log-uniform between `TOP_GAP_RATIO·(cond-1)` and `cond - 1`.
///
/// The clustering near the top is what makes first-order methods on the
/// sphere stay in their sublinear regime for thousands of iterations.
pub fn ill_conditioned_spectrum(m: usize, cond: f64) -> Vec<f64> {
    let span = cond - 1.0;
    let mut out = Vec::with_capacity(m);
    out.push(cond);
    let rest = m - 1;
    for j in 0..rest {
        let frac = if rest == 1 { 1.0 } else { j as f64 / (rest - 1) as f64 };
        let gap = span * TOP_GAP_RATIO.powf(1.0 - frac);
        out.push(if j + 1 == rest { 1.0 } else { cond - gap });
    }
    out
}

/// A seeded symmetric matrix with prescribed spectrum.
#[derive(Debug, Clone)]
pub struct IllConditioned {
    pub matrix: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvector of the largest eigenvalue.
    pub leading: Vector,
}

/// Haar-distributed orthogonal matrix from the QR factorisation of a
/// Gaussian matrix.
pub fn random_rotation(m: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn ill_conditioned(m: usize, cond: f64, seed: u64) -> Result<IllConditioned> {
    if m < 2 {
        return Err(Error::Contract(format!("matrix size must be at least 2, got {m}")));
    }
    if !(cond >= 1.0) || !cond.is_finite() {
        return Err(Error::Contract(format!("condition number must be ≥ 1, got {cond}")));
    }
    let eigenvalues = ill_conditioned_spectrum(m, cond);
    let rot = random_rotation(m, seed);
    let mut scaled = rot.clone();
    for (j, l) in eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*l);
    }
    let mut matrix = scaled * rot.transpose();
    let sym = (&matrix + matrix.transpose()) * 0.5;
    matrix = sym;
    let leading = rot.column(0).into_owned();
    Ok(IllConditioned { matrix, eigenvalues, leading })
}

/// Symmetric positive-definite matrix with `λ_max/λ_min = cond`.
pub fn make_ill_conditioned(m: usize, cond: f64, seed: u64) -> Result<DMatrix<f64>> {
    Ok(ill_conditioned(m, cond, seed)?.matrix)
}
