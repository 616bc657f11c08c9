//! Exact geodesic primitives on the constant-curvature model spaces.
//!
//! Points and tangent vectors are stored in ambient coordinates:
//!
//! * Euclidean space `R^n`: the identity embedding.
//! * Sphere of curvature `K > 0`: the radius-`1/√K` sphere in `R^{n+1}`.
//! * Hyperbolic space of curvature `K < 0`: the upper sheet of the
//!   hyperboloid `⟨x,x⟩_L = 1/K` in Minkowski space `R^{1,n}`, with the
//!   time-like coordinate stored first.
//!
//! Every map (exp, log, distance, parallel transport) is closed form. After
//! each exponential step the result is re-projected onto the manifold; drift
//! above [`HARD_DRIFT`] is reported as an error instead.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::special::{sinc, sinhc, theta_over_sin, theta_over_sinh};

pub type Vector = DVector<f64>;

/// Tolerance for the on-manifold and tangency invariants of user input.
pub const INVARIANT_TOL: f64 = 1e-10;
/// Drift at which re-projection gives up.
pub const HARD_DRIFT: f64 = 1e-6;
/// Distance margin below the cut locus at which the sphere log is refused.
pub const ANTIPODAL_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManifoldKind {
    Euclidean,
    Sphere,
    Hyperboloid,
}

impl ManifoldKind {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldKind::Euclidean => "euclidean",
            ManifoldKind::Sphere => "sphere",
            ManifoldKind::Hyperboloid => "hyperboloid",
        }
    }
}

impl std::str::FromStr for ManifoldKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(ManifoldKind::Euclidean),
            "sphere" => Ok(ManifoldKind::Sphere),
            "hyperboloid" | "hyperbolic" => Ok(ManifoldKind::Hyperboloid),
            other => Err(Error::Contract(format!("unknown manifold kind '{other}'"))),
        }
    }
}

/// Which model space, its intrinsic dimension, curvature and working diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub dim: usize,
    pub curvature: f64,
    pub diameter: f64,
}

impl ManifoldSpec {
    pub fn euclidean(dim: usize, diameter: f64) -> Self {
        Self { kind: ManifoldKind::Euclidean, dim, curvature: 0.0, diameter }
    }

    pub fn sphere(dim: usize, curvature: f64, diameter: f64) -> Self {
        Self { kind: ManifoldKind::Sphere, dim, curvature, diameter }
    }

    pub fn hyperboloid(dim: usize, curvature: f64, diameter: f64) -> Self {
        Self { kind: ManifoldKind::Hyperboloid, dim, curvature, diameter }
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ManifoldKind::Euclidean => self.dim,
            ManifoldKind::Sphere | ManifoldKind::Hyperboloid => self.dim + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Contract("intrinsic dimension must be at least 1".into()));
        }
        if !(self.diameter > 0.0) || !self.diameter.is_finite() {
            return Err(Error::Contract(format!(
                "working diameter must be positive and finite, got {}",
                self.diameter
            )));
        }
        match self.kind {
            ManifoldKind::Euclidean if self.curvature != 0.0 => {
                Err(Error::Contract("Euclidean space requires K = 0".into()))
            }
            ManifoldKind::Sphere if !(self.curvature > 0.0) => {
                Err(Error::Contract("sphere requires K > 0".into()))
            }
            ManifoldKind::Sphere
                if self.diameter >= std::f64::consts::PI / self.curvature.sqrt() =>
            {
                Err(Error::Contract(format!(
                    "sphere working diameter {} must be below π/√K = {}",
                    self.diameter,
                    std::f64::consts::PI / self.curvature.sqrt()
                )))
            }
            ManifoldKind::Hyperboloid if !(self.curvature < 0.0) => {
                Err(Error::Contract("hyperboloid requires K < 0".into()))
            }
            _ => Ok(()),
        }
    }
}

/// A point in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vector,
}

impl Point {
    /// Wraps raw coordinates without checking the manifold constraint.
    /// Use [`Manifold::point`] for validated construction.
    pub fn new(coords: Vector) -> Self {
        Self { coords }
    }

    pub fn from_slice(coords: &[f64]) -> Self {
        Self { coords: Vector::from_column_slice(coords) }
    }

    pub fn coords(&self) -> &Vector {
        &self.coords
    }

    pub fn into_coords(self) -> Vector {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }
}

/// A tangent vector together with the point it is attached to.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: Point,
    vec: Vector,
}

impl TangentVector {
    /// Unchecked constructor; see [`Manifold::tangent`] for the validated one.
    pub fn new(base: Point, vec: Vector) -> Self {
        Self { base, vec }
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn vec(&self) -> &Vector {
        &self.vec
    }

    pub fn into_parts(self) -> (Point, Vector) {
        (self.base, self.vec)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { base: self.base.clone(), vec: &self.vec * s }
    }

    /// `a·self + b·other`, both based at the same point.
    pub fn lin_comb(&self, a: f64, b: f64, other: &TangentVector) -> Result<Self> {
        ensure_same_base(&self.base, &other.base)?;
        let mut vec = &self.vec * a;
        vec.axpy(b, &other.vec, 1.0);
        Ok(Self { base: self.base.clone(), vec })
    }

    pub fn is_finite(&self) -> bool {
        self.vec.iter().all(|c| c.is_finite())
    }
}

fn ensure_same_base(a: &Point, b: &Point) -> Result<()> {
    if a.coords.len() != b.coords.len() {
        return Err(Error::BaseMismatch);
    }
    let scale = 1.0 + a.coords.amax();
    if (&a.coords - &b.coords).amax() > 1e-12 * scale {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// A validated model space, exposing its geodesic maps.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    spec: ManifoldSpec,
    sqrt_abs_k: f64,
}

impl Manifold {
    pub fn new(spec: ManifoldSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec, sqrt_abs_k: spec.curvature.abs().sqrt() })
    }

    pub fn spec(&self) -> &ManifoldSpec {
        &self.spec
    }

    pub fn kind(&self) -> ManifoldKind {
        self.spec.kind
    }

    pub fn curvature(&self) -> f64 {
        self.spec.curvature
    }

    pub fn diameter(&self) -> f64 {
        self.spec.diameter
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.spec.ambient_dim()
    }

    /// `π/√K` on the sphere, infinite elsewhere.
    pub fn injectivity_radius(&self) -> f64 {
        match self.spec.kind {
            ManifoldKind::Sphere => std::f64::consts::PI / self.sqrt_abs_k,
            _ => f64::INFINITY,
        }
    }

    /// Ambient bilinear form: Euclidean dot product, or the Minkowski form
    /// `-u₀w₀ + Σ uᵢwᵢ` on the hyperboloid. Restricted to a tangent space it
    /// is the Riemannian metric.
    pub fn inner(&self, u: &Vector, w: &Vector) -> f64 {
        match self.spec.kind {
            ManifoldKind::Hyperboloid => {
                let spatial: f64 = u.iter().zip(w.iter()).skip(1).map(|(a, b)| a * b).sum();
                spatial - u[0] * w[0]
            }
            _ => u.dot(w),
        }
    }

    pub fn norm(&self, v: &TangentVector) -> f64 {
        self.vec_norm(&v.vec)
    }

    fn vec_norm(&self, v: &Vector) -> f64 {
        match self.spec.kind {
            ManifoldKind::Hyperboloid => self.inner(v, v).max(0.0).sqrt(),
            _ => v.norm(),
        }
    }

    /// Metric inner product of two tangent vectors at the same point.
    pub fn metric(&self, u: &TangentVector, w: &TangentVector) -> Result<f64> {
        ensure_same_base(&u.base, &w.base)?;
        Ok(self.inner(&u.vec, &w.vec))
    }

    /// The canonical base point: the origin, the "north pole" `e_last/√K`,
    /// or the hyperboloid apex `(1/√-K, 0, …, 0)`.
    pub fn origin(&self) -> Point {
        let n = self.ambient_dim();
        let mut c = Vector::zeros(n);
        match self.spec.kind {
            ManifoldKind::Euclidean => {}
            ManifoldKind::Sphere => c[n - 1] = 1.0 / self.sqrt_abs_k,
            ManifoldKind::Hyperboloid => c[0] = 1.0 / self.sqrt_abs_k,
        }
        Point::new(c)
    }

    /// Validated point constructor.
    pub fn point(&self, coords: Vector) -> Result<Point> {
        let p = Point::new(coords);
        self.check_point(&p, INVARIANT_TOL)?;
        Ok(p)
    }

    /// Validated tangent vector constructor.
    pub fn tangent(&self, base: &Point, vec: Vector) -> Result<TangentVector> {
        self.check_dim(base)?;
        if vec.len() != self.ambient_dim() {
            return Err(Error::Dimension { expected: self.ambient_dim(), got: vec.len() });
        }
        let v = TangentVector::new(base.clone(), vec);
        let residual = self.tangency_residual(&v);
        if residual > INVARIANT_TOL {
            return Err(Error::Contract(format!("vector is not tangent (residual {residual:e})")));
        }
        Ok(v)
    }

    pub fn zero(&self, x: &Point) -> TangentVector {
        TangentVector::new(x.clone(), Vector::zeros(x.coords.len()))
    }

    fn check_dim(&self, x: &Point) -> Result<()> {
        if x.coords.len() != self.ambient_dim() {
            return Err(Error::Dimension { expected: self.ambient_dim(), got: x.coords.len() });
        }
        Ok(())
    }

    /// Relative violation of the defining equation of the manifold.
    pub fn drift(&self, x: &Point) -> f64 {
        let k = self.spec.curvature;
        match self.spec.kind {
            ManifoldKind::Euclidean => 0.0,
            ManifoldKind::Sphere => (k * x.coords.norm_squared() - 1.0).abs(),
            ManifoldKind::Hyperboloid => {
                let d = (k * self.inner(&x.coords, &x.coords) - 1.0).abs();
                if x.coords[0] > 0.0 {
                    d
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn check_point(&self, x: &Point, tol: f64) -> Result<()> {
        self.check_dim(x)?;
        let drift = self.drift(x);
        if !(drift <= tol) {
            return Err(Error::OffManifold { drift });
        }
        Ok(())
    }

    /// `|⟨base, v⟩|` normalised by the sizes involved.
    pub fn tangency_residual(&self, v: &TangentVector) -> f64 {
        match self.spec.kind {
            ManifoldKind::Euclidean => 0.0,
            _ => {
                let ip = self.inner(&v.base.coords, &v.vec).abs();
                ip * self.sqrt_abs_k / (1.0 + v.vec.amax())
            }
        }
    }

    fn reproject(&self, mut y: Vector) -> Result<Point> {
        let k = self.spec.curvature;
        match self.spec.kind {
            ManifoldKind::Euclidean => {}
            ManifoldKind::Sphere => {
                let drift = (k * y.norm_squared() - 1.0).abs();
                if !(drift <= HARD_DRIFT) {
                    return Err(Error::OffManifold { drift });
                }
                let n = y.norm();
                y /= n * self.sqrt_abs_k;
            }
            ManifoldKind::Hyperboloid => {
                let drift = (k * self.inner(&y, &y) - 1.0).abs();
                if !(drift <= HARD_DRIFT) || !(y[0] > 0.0) {
                    return Err(Error::OffManifold { drift });
                }
                let spatial: f64 = y.iter().skip(1).map(|c| c * c).sum();
                y[0] = (1.0 / (-k) + spatial).sqrt();
            }
        }
        Ok(Point::new(y))
    }

    /// Orthogonal projection of an ambient vector onto `T_x M`.
    pub fn project(&self, x: &Point, w: &Vector) -> TangentVector {
        match self.spec.kind {
            ManifoldKind::Euclidean => TangentVector::new(x.clone(), w.clone()),
            _ => {
                let k = self.spec.curvature;
                let c = k * self.inner(&x.coords, w);
                let mut v = w.clone();
                v.axpy(-c, &x.coords, 1.0);
                TangentVector::new(x.clone(), v)
            }
        }
    }

    /// `exp_x(v)`: endpoint of the geodesic leaving `x` with velocity `v`.
    pub fn exp(&self, x: &Point, v: &TangentVector) -> Result<Point> {
        ensure_same_base(x, &v.base)?;
        let norm = self.norm(v);
        match self.spec.kind {
            ManifoldKind::Euclidean => Ok(Point::new(&x.coords + &v.vec)),
            ManifoldKind::Sphere => {
                let limit = self.injectivity_radius();
                if !(norm < limit) {
                    return Err(Error::InjectivityRadius { norm, limit });
                }
                let theta = self.sqrt_abs_k * norm;
                let mut y = &x.coords * theta.cos();
                y.axpy(sinc(theta), &v.vec, 1.0);
                self.reproject(y)
            }
            ManifoldKind::Hyperboloid => {
                let theta = self.sqrt_abs_k * norm;
                let mut y = &x.coords * theta.cosh();
                y.axpy(sinhc(theta), &v.vec, 1.0);
                self.reproject(y)
            }
        }
    }

    /// Angle `θ = √|K|·d(x,y)` together with the projection `y - K⟨x,y⟩x`.
    fn angle_and_direction(&self, x: &Point, y: &Point) -> (f64, Vector) {
        let k = self.spec.curvature;
        match self.spec.kind {
            ManifoldKind::Euclidean => {
                let u = &y.coords - &x.coords;
                (u.norm(), u)
            }
            ManifoldKind::Sphere => {
                let c = k * x.coords.dot(&y.coords);
                let mut u = y.coords.clone();
                u.axpy(-c, &x.coords, 1.0);
                let s = self.sqrt_abs_k * u.norm();
                (s.atan2(c), u)
            }
            ManifoldKind::Hyperboloid => {
                let chord = &y.coords - &x.coords;
                let q = self.inner(&chord, &chord).max(0.0);
                let theta = 2.0 * (0.5 * self.sqrt_abs_k * q.sqrt()).asinh();
                let c = k * self.inner(&x.coords, &y.coords);
                let mut u = y.coords.clone();
                u.axpy(-c, &x.coords, 1.0);
                (theta, u)
            }
        }
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        let (theta, _) = self.angle_and_direction(x, y);
        match self.spec.kind {
            ManifoldKind::Euclidean => theta,
            _ => theta / self.sqrt_abs_k,
        }
    }

    /// `log_x(y)`: the initial velocity of the unit-time geodesic from x to y.
    pub fn log(&self, x: &Point, y: &Point) -> Result<TangentVector> {
        self.check_dim(y)?;
        let (theta, u) = self.angle_and_direction(x, y);
        match self.spec.kind {
            ManifoldKind::Euclidean => Ok(TangentVector::new(x.clone(), u)),
            ManifoldKind::Sphere => {
                let limit = self.injectivity_radius();
                let distance = theta / self.sqrt_abs_k;
                if distance > limit - ANTIPODAL_MARGIN {
                    return Err(Error::SingularLog { distance, limit });
                }
                Ok(self.project(x, &(u * theta_over_sin(theta))))
            }
            ManifoldKind::Hyperboloid => Ok(self.project(x, &(u * theta_over_sinh(theta)))),
        }
    }

    /// Parallel transport `Γ_x^y u` along the minimizing geodesic.
    pub fn transport(&self, x: &Point, y: &Point, u: &TangentVector) -> Result<TangentVector> {
        ensure_same_base(x, &u.base)?;
        if self.spec.kind == ManifoldKind::Euclidean {
            self.check_dim(y)?;
            return Ok(TangentVector::new(y.clone(), u.vec.clone()));
        }
        let log = self.log(x, y)?;
        let dist = self.norm(&log);
        if dist == 0.0 {
            return Ok(TangentVector::new(y.clone(), u.vec.clone()));
        }
        let e = &log.vec / dist;
        let along = self.inner(&e, &u.vec);
        let theta = self.sqrt_abs_k * dist;
        let (cos_like, radial) = match self.spec.kind {
            ManifoldKind::Sphere => (theta.cos(), -self.sqrt_abs_k * theta.sin()),
            _ => (theta.cosh(), self.sqrt_abs_k * theta.sinh()),
        };
        // The geodesic direction e rotates to cos·e ∓ √|K|·sin·x; the
        // orthogonal complement is carried along unchanged.
        let mut w = u.vec.clone();
        w.axpy(along * (cos_like - 1.0), &e, 1.0);
        w.axpy(along * radial, &x.coords, 1.0);
        Ok(self.project(y, &w))
    }

    /// Unit tangent vector at `x` in a uniformly random direction.
    pub fn random_unit_tangent<R: Rng + ?Sized>(&self, x: &Point, rng: &mut R) -> TangentVector {
        loop {
            let w = Vector::from_fn(self.ambient_dim(), |_, _| rng.sample(StandardNormal));
            let v = self.project(x, &w);
            let n = self.norm(&v);
            if n > 1e-8 {
                return v.scaled(1.0 / n);
            }
        }
    }

    /// Random point in the geodesic ball of the given radius around `center`,
    /// drawn with the supplied generator.
    pub fn random_point_with<R: Rng + ?Sized>(
        &self,
        center: &Point,
        radius: f64,
        rng: &mut R,
    ) -> Result<Point> {
        if !(radius >= 0.0) {
            return Err(Error::Contract(format!("radius must be non-negative, got {radius}")));
        }
        if radius >= self.injectivity_radius() {
            return Err(Error::InjectivityRadius { norm: radius, limit: self.injectivity_radius() });
        }
        if radius == 0.0 {
            return Ok(center.clone());
        }
        let dir = self.random_unit_tangent(center, rng);
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / self.spec.dim as f64);
        self.exp(center, &dir.scaled(r))
    }

    /// Deterministic random point with `d(center, result) ≤ radius ≤ D/2`.
    pub fn random_point(&self, center: &Point, radius: f64, seed: u64) -> Result<Point> {
        if radius > 0.5 * self.spec.diameter {
            return Err(Error::Contract(format!(
                "radius {radius} exceeds half the working diameter {}",
                self.spec.diameter
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_point_with(center, radius, &mut rng)
    }

    /// Point at exactly the given distance from `center` in a seeded random
    /// direction.
    pub fn point_at_distance(&self, center: &Point, distance: f64, seed: u64) -> Result<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dir = self.random_unit_tangent(center, &mut rng);
        self.exp(center, &dir.scaled(distance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sphere2() -> Manifold {
        Manifold::new(ManifoldSpec::sphere(2, 1.0, 3.0)).unwrap()
    }

    fn hyp2() -> Manifold {
        Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 3.0)).unwrap()
    }

    fn e(m: &Manifold, i: usize) -> Point {
        let mut c = Vector::zeros(m.ambient_dim());
        c[i] = 1.0;
        Point::new(c)
    }

    #[test]
    fn spec_validation() {
        assert!(ManifoldSpec::sphere(2, 1.0, PI).validate().is_err());
        assert!(ManifoldSpec::sphere(2, -1.0, 1.0).validate().is_err());
        assert!(ManifoldSpec::hyperboloid(2, 0.0, 1.0).validate().is_err());
        assert!(ManifoldSpec { curvature: 1.0, ..ManifoldSpec::euclidean(2, 1.0) }
            .validate()
            .is_err());
        assert!(ManifoldSpec::euclidean(0, 1.0).validate().is_err());
        assert!(ManifoldSpec::euclidean(3, 0.0).validate().is_err());
    }

    #[test]
    fn exp_of_zero_is_identity() {
        for m in [sphere2(), hyp2(), Manifold::new(ManifoldSpec::euclidean(3, 1.0)).unwrap()] {
            let x = m.origin();
            assert_eq!(m.exp(&x, &m.zero(&x)).unwrap(), x);
        }
    }

    #[test]
    fn quarter_great_circle() {
        let m = sphere2();
        let x = e(&m, 2);
        let v = m.tangent(&x, Vector::from_vec(vec![FRAC_PI_2, 0.0, 0.0])).unwrap();
        let y = m.exp(&x, &v).unwrap();
        assert!((y.coords() - e(&m, 0).coords()).amax() < 1e-15);
        assert!((m.distance(&x, &e(&m, 0)) - FRAC_PI_2).abs() < 1e-15);
        let l = m.log(&x, &e(&m, 0)).unwrap();
        assert!((l.vec() - v.vec()).amax() < 1e-15);
    }

    #[test]
    fn sphere_exp_refuses_beyond_injectivity_radius() {
        let m = sphere2();
        let x = e(&m, 2);
        let v = TangentVector::new(x.clone(), Vector::from_vec(vec![PI, 0.0, 0.0]));
        assert!(matches!(m.exp(&x, &v), Err(Error::InjectivityRadius { .. })));
    }

    #[test]
    fn base_mismatch_is_reported() {
        let m = sphere2();
        let v = m.zero(&e(&m, 0));
        assert_eq!(m.exp(&e(&m, 2), &v), Err(Error::BaseMismatch));
    }

    #[test]
    fn antipodal_log_is_singular() {
        let m = sphere2();
        let x = e(&m, 2);
        let y = Point::new(-x.coords());
        assert!(matches!(m.log(&x, &y), Err(Error::SingularLog { .. })));
        assert!(m.transport(&x, &y, &m.zero(&x)).is_err());
    }

    #[test]
    fn transport_fixes_normal_to_geodesic_plane() {
        let m = sphere2();
        let x = e(&m, 2);
        let y = e(&m, 0);
        let u = m.tangent(&x, Vector::from_vec(vec![0.0, 1.0, 0.0])).unwrap();
        let w = m.transport(&x, &y, &u).unwrap();
        assert!((w.vec() - u.vec()).amax() < 1e-15);
        assert_eq!(w.base(), &y);
    }

    #[test]
    fn transport_to_self_is_identity() {
        let m = hyp2();
        let x = m.point_at_distance(&m.origin(), 0.7, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = m.random_unit_tangent(&x, &mut rng);
        let w = m.transport(&x, &x, &u).unwrap();
        assert!((w.vec() - u.vec()).amax() < 1e-15);
    }

    #[test]
    fn projection_properties() {
        let m = sphere2();
        let x = e(&m, 2);
        assert!(m.norm(&m.project(&x, x.coords())) < 1e-15);
        let t = Vector::from_vec(vec![0.3, -0.2, 0.0]);
        assert_eq!(m.project(&x, &t).vec(), &t);
    }

    #[test]
    fn random_point_radius_zero_and_determinism() {
        let m = hyp2();
        let c = m.origin();
        assert_eq!(m.random_point(&c, 0.0, 1).unwrap(), c);
        assert_eq!(m.random_point(&c, 1.0, 42).unwrap(), m.random_point(&c, 1.0, 42).unwrap());
        assert!(m.random_point(&c, 2.0, 1).is_err());
    }

    #[test]
    fn small_displacements_are_stable() {
        let m = sphere2();
        let x = e(&m, 2);
        let v = m.tangent(&x, Vector::from_vec(vec![1e-9, 0.0, 0.0])).unwrap();
        let y = m.exp(&x, &v).unwrap();
        assert!((m.distance(&x, &y) - 1e-9).abs() < 1e-20);
        let back = m.log(&x, &y).unwrap();
        assert!((back.vec() - v.vec()).amax() < 1e-20);
    }

    #[test]
    fn hyperboloid_curvature_scaling() {
        // K = -4 halves every distance relative to K = -1.
        let m4 = Manifold::new(ManifoldSpec::hyperboloid(2, -4.0, 3.0)).unwrap();
        let x = m4.origin();
        let v = m4.tangent(&x, Vector::from_vec(vec![0.0, 0.5, 0.0])).unwrap();
        let y = m4.exp(&x, &v).unwrap();
        assert!((m4.distance(&x, &y) - 0.5).abs() < 1e-14);
        assert!(m4.drift(&y) < 1e-14);
    }
}
