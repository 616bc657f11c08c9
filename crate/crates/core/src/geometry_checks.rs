//! Numerical checks of the comparison inequalities behind the convergence
//! analysis: the Hessian bracket for the squared distance, the cosine-law
//! comparison for geodesic triangles, and the fundamental theorem of
//! calculus for vector fields along a geodesic.
//!
//! Covariant derivatives are computed from parallel-transport difference
//! quotients, so only exp/log/transport are needed.

use crate::constants::{delta, zeta};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, ManifoldKind, Point, TangentVector};
use crate::special::{theta_cot, theta_coth};

pub const MIN_FD_STEP: f64 = 1e-7;
pub const MAX_FD_STEP: f64 = 1e-3;
/// Points used to discretise an edge when minimising δ.
pub const EDGE_POINTS: usize = 100;
/// Slack for the comparison inequality.
pub const COSINE_SLACK: f64 = 1e-9;

/// A smooth curve `X(t)` on the manifold.
#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    /// `exp_x(t v)`.
    Geodesic { start: Point, velocity: TangentVector },
    /// `exp_x(t v + t²/2 w)`: a geodesic bent by a constant tangent term.
    Bent { start: Point, velocity: TangentVector, bend: TangentVector },
}

impl Curve {
    pub fn position(&self, m: &Manifold, t: f64) -> Result<Point> {
        match self {
            Curve::Geodesic { start, velocity } => m.exp(start, &velocity.scaled(t)),
            Curve::Bent { start, velocity, bend } => m.exp(start, &velocity.lin_comb(t, 0.5 * t * t, bend)?),
        }
    }

    /// `Ẋ(t)`: exact for geodesics, centred Richardson differences of `log`
    /// otherwise.
    pub fn velocity(&self, m: &Manifold, t: f64, fd_step: f64) -> Result<TangentVector> {
        match self {
            Curve::Geodesic { start, velocity } => {
                let x = self.position(m, t)?;
                m.transport(start, &x, velocity)
            }
            Curve::Bent { .. } => {
                let x = self.position(m, t)?;
                let central = |s: f64| -> Result<TangentVector> {
                    let fwd = m.log(&x, &self.position(m, t + s)?)?;
                    let bwd = m.log(&x, &self.position(m, t - s)?)?;
                    fwd.lin_comb(0.5 / s, -0.5 / s, &bwd)
                };
                let coarse = central(fd_step)?;
                let fine = central(0.5 * fd_step)?;
                fine.lin_comb(4.0 / 3.0, -1.0 / 3.0, &coarse)
            }
        }
    }
}

/// A curve, an evaluation time and a finite-difference step.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSample {
    pub curve: Curve,
    pub t: f64,
    pub fd_step: f64,
}

impl CurveSample {
    pub fn new(curve: Curve, t: f64, fd_step: f64) -> Result<Self> {
        if !(MIN_FD_STEP..=MAX_FD_STEP).contains(&fd_step) {
            return Err(Error::Contract(format!(
                "fd_step must lie in [{MIN_FD_STEP}, {MAX_FD_STEP}], got {fd_step}"
            )));
        }
        Ok(Self { curve, t, fd_step })
    }
}

/// `∇_Ẋ A` at `t` by a one-sided transport-difference quotient with two-level
/// Richardson extrapolation.
fn covariant_forward<F>(m: &Manifold, curve: &Curve, t: f64, s: f64, field: F) -> Result<TangentVector>
where
    F: Fn(&Point) -> Result<TangentVector>,
{
    let x = curve.position(m, t)?;
    let a0 = field(&x)?;
    let quotient = |s: f64| -> Result<TangentVector> {
        let y = curve.position(m, t + s)?;
        let back = m.transport(&y, &x, &field(&y)?)?;
        back.lin_comb(1.0 / s, -1.0 / s, &a0)
    };
    let coarse = quotient(s)?;
    let fine = quotient(0.5 * s)?;
    fine.lin_comb(2.0, -1.0, &coarse)
}

/// Result of [`covariant_log_pairing`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPairing {
    /// `⟨∇_Ẋ log_X(p), -Ẋ⟩`.
    pub value: f64,
    /// `‖Ẋ‖²`.
    pub speed_sq: f64,
    /// `d(X(t), p)`.
    pub distance: f64,
    /// Pointwise lower constant `δ(K, d)`.
    pub delta: f64,
    /// Pointwise upper constant `ζ(K, d)`.
    pub zeta: f64,
}

impl LogPairing {
    /// Signed margins `(value - δ‖Ẋ‖², ζ‖Ẋ‖² - value)`.
    pub fn margins(&self) -> (f64, f64) {
        (self.value - self.delta * self.speed_sq, self.zeta * self.speed_sq - self.value)
    }
}

/// `⟨∇_Ẋ log_X(p), -Ẋ⟩` at the sample time, with the pointwise bracket.
pub fn covariant_log_pairing(m: &Manifold, sample: &CurveSample, p: &Point) -> Result<LogPairing> {
    let x = sample.curve.position(m, sample.t)?;
    let distance = m.distance(&x, p);
    if distance < 1e-8 {
        return Err(Error::SingularLog { distance, limit: m.injectivity_radius() });
    }
    let xdot = sample.curve.velocity(m, sample.t, sample.fd_step)?;
    let cov = covariant_forward(m, &sample.curve, sample.t, sample.fd_step, |y| m.log(y, p))?;
    let value = -m.metric(&cov, &xdot)?;
    let k = m.curvature();
    Ok(LogPairing {
        value,
        speed_sq: m.norm(&xdot).powi(2),
        distance,
        delta: delta(k, distance)?,
        zeta: zeta(k, distance),
    })
}

/// Closed form of the pairing on a constant-curvature space:
/// `m² + ψ(d)(‖Ẋ‖² − m²)` with `m` the component of `Ẋ` along the geodesic
/// to `p` and `ψ = θcotθ`, `θcothθ` or 1.
pub fn exact_log_pairing(m: &Manifold, x: &Point, xdot: &TangentVector, p: &Point) -> Result<f64> {
    let l = m.log(x, p)?;
    let d = m.norm(&l);
    let speed_sq = m.norm(xdot).powi(2);
    if d == 0.0 {
        return Ok(speed_sq);
    }
    let along = m.metric(xdot, &l)? / d;
    let theta = (m.curvature().abs()).sqrt() * d;
    let psi = match m.kind() {
        ManifoldKind::Euclidean => 1.0,
        ManifoldKind::Sphere => theta_cot(theta),
        ManifoldKind::Hyperboloid => theta_coth(theta),
    };
    Ok(along * along + psi * (speed_sq - along * along))
}

/// Result of [`cosine_law_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineLaw {
    /// `d(a,c)²`.
    pub lhs: f64,
    /// `δ d(b,c)² + d(a,b)² − 2 d(a,b) d(b,c) cos B`.
    pub rhs: f64,
    /// Smallest δ over the discretised edge `bc`.
    pub delta_min: f64,
    pub ok: bool,
}

impl CosineLaw {
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }
}

/// Smallest pointwise δ for the distance to `a` over `EDGE_POINTS` points of
/// the geodesic edge `bc`.
pub fn edge_delta_min(m: &Manifold, a: &Point, b: &Point, c: &Point) -> Result<f64> {
    if m.curvature() <= 0.0 {
        return Ok(1.0);
    }
    let bc = m.log(b, c)?;
    let mut best = f64::INFINITY;
    for i in 0..EDGE_POINTS {
        let s = i as f64 / (EDGE_POINTS - 1) as f64;
        let q = m.exp(b, &bc.scaled(s))?;
        best = best.min(delta(m.curvature(), m.distance(&q, a))?);
    }
    Ok(best)
}

/// The comparison law of cosines for the triangle `abc`, angle at `b`.
pub fn cosine_law_check(m: &Manifold, a: &Point, b: &Point, c: &Point) -> Result<CosineLaw> {
    let ab = m.distance(a, b);
    let bc = m.distance(b, c);
    let ac = m.distance(a, c);
    let delta_min = edge_delta_min(m, a, b, c)?;
    let cos_term = if ab > 0.0 && bc > 0.0 {
        let u = m.log(b, a)?;
        let w = m.log(b, c)?;
        let cos_b = (m.metric(&u, &w)? / (m.norm(&u) * m.norm(&w))).clamp(-1.0, 1.0);
        ab * bc * cos_b
    } else {
        0.0
    };
    let lhs = ac * ac;
    let rhs = delta_min * bc * bc + ab * ab - 2.0 * cos_term;
    Ok(CosineLaw { lhs, rhs, delta_min, ok: lhs >= rhs - COSINE_SLACK })
}

/// The same inequality written as a first-order bound for `f = d(·, a)²`:
/// returns the slack of `f(c) ≥ f(b) + ⟨grad f(b), log_b c⟩ + δ‖log_c b‖²`.
pub fn first_order_slack(m: &Manifold, a: &Point, b: &Point, c: &Point) -> Result<f64> {
    let f = |x: &Point| m.distance(x, a).powi(2);
    let grad_b = m.log(b, a)?.scaled(-2.0);
    let lin = m.metric(&grad_b, &m.log(b, c)?)?;
    let back = m.norm(&m.log(c, b)?);
    let delta_min = edge_delta_min(m, a, b, c)?;
    Ok(f(c) - (f(b) + lin + delta_min * back * back))
}

/// For `f = d(·, p)²`: `-⟨grad f(x), log_x p⟩ - (f(x) - f(p))`, which equals
/// `‖log_x p‖²` (so `f` is 1-weakly-quasi-convex with that exact gap).
pub fn wqc_gap(m: &Manifold, x: &Point, p: &Point) -> Result<(f64, f64)> {
    let l = m.log(x, p)?;
    let grad = l.scaled(-2.0);
    let gap = -m.metric(&grad, &l)? - m.distance(x, p).powi(2);
    Ok((gap, m.norm(&l).powi(2)))
}

/// Centred finite difference of `d(X(t), p)²` against `2⟨log_X p, -Ẋ⟩`.
/// Returns `(finite difference, analytic)`.
pub fn squared_distance_derivative(m: &Manifold, sample: &CurveSample, p: &Point) -> Result<(f64, f64)> {
    let (t, s) = (sample.t, sample.fd_step);
    let d2 = |t: f64| -> Result<f64> { Ok(m.distance(&sample.curve.position(m, t)?, p).powi(2)) };
    let fd = (d2(t + s)? - d2(t - s)?) / (2.0 * s);
    let x = sample.curve.position(m, t)?;
    let xdot = sample.curve.velocity(m, t, s.max(1e-4))?;
    let analytic = 2.0 * m.metric(&m.log(&x, p)?, &xdot.scaled(-1.0))?;
    Ok((fd, analytic))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtcResult {
    /// `‖Γ_{X(1)}^{X(0)} A(1) − A(0) − Σ wᵢ Γ_{X(tᵢ)}^{X(0)} ∇A(tᵢ)‖`.
    pub residual: f64,
    /// Grid spacing of the trapezoid rule.
    pub step: f64,
    /// Norm of the left-hand side.
    pub lhs_norm: f64,
}

/// Checks `Γ_{X(1)}^{X(0)} A(1) − A(0) = ∫₀¹ Γ_{X(t)}^{X(0)} ∇A(t) dt` along
/// the geodesic `X(t) = exp_{start}(t v)` with the trapezoid rule on
/// `intervals` sub-intervals. `field(x, t)` returns `A(t)` at `x = X(t)`.
/// `∇A` is a centred transport-difference quotient with Richardson
/// extrapolation at `fd_step`.
pub fn ftc_vector_field_check<F>(
    m: &Manifold,
    start: &Point,
    velocity: &TangentVector,
    field: F,
    intervals: usize,
    fd_step: f64,
) -> Result<FtcResult>
where
    F: Fn(&Point, f64) -> Result<TangentVector>,
{
    if intervals < 99 {
        return Err(Error::Contract(format!("need at least 100 grid points, got {}", intervals + 1)));
    }
    if !(MIN_FD_STEP..=MAX_FD_STEP).contains(&fd_step) {
        return Err(Error::Contract(format!("fd_step out of range: {fd_step}")));
    }
    let curve = Curve::Geodesic { start: start.clone(), velocity: velocity.clone() };
    let at = |t: f64| curve.position(m, t);
    let cov = |t: f64| -> Result<TangentVector> {
        let x = at(t)?;
        let central = |s: f64| -> Result<TangentVector> {
            let yp = at(t + s)?;
            let ym = at(t - s)?;
            let fp = m.transport(&yp, &x, &field(&yp, t + s)?)?;
            let fm = m.transport(&ym, &x, &field(&ym, t - s)?)?;
            fp.lin_comb(0.5 / s, -0.5 / s, &fm)
        };
        let coarse = central(fd_step)?;
        let fine = central(0.5 * fd_step)?;
        fine.lin_comb(4.0 / 3.0, -1.0 / 3.0, &coarse)
    };

    let x0 = start.clone();
    let x1 = at(1.0)?;
    let lhs = m.transport(&x1, &x0, &field(&x1, 1.0)?)?.lin_comb(1.0, -1.0, &field(&x0, 0.0)?)?;

    let step = 1.0 / intervals as f64;
    let mut integral = m.zero(&x0);
    for i in 0..=intervals {
        let t = i as f64 * step;
        let w = if i == 0 || i == intervals { 0.5 * step } else { step };
        let xt = at(t)?;
        let term = m.transport(&xt, &x0, &cov(t)?)?;
        integral = integral.lin_comb(1.0, w, &term)?;
    }
    let diff = lhs.lin_comb(1.0, -1.0, &integral)?;
    Ok(FtcResult { residual: m.norm(&diff), step, lhs_norm: m.norm(&lhs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{ManifoldSpec, Vector};

    fn sphere() -> Manifold {
        Manifold::new(ManifoldSpec::sphere(2, 1.0, 3.0)).unwrap()
    }

    #[test]
    fn fd_step_is_range_checked() {
        let m = sphere();
        let x = m.origin();
        let c = Curve::Geodesic { start: x.clone(), velocity: m.zero(&x) };
        assert!(CurveSample::new(c.clone(), 0.0, 1e-2).is_err());
        assert!(CurveSample::new(c, 0.0, 1e-4).is_ok());
    }

    #[test]
    fn euclidean_pairing_is_speed_squared() {
        let m = Manifold::new(ManifoldSpec::euclidean(3, 10.0)).unwrap();
        let x = Point::from_slice(&[0.0, 1.0, 0.0]);
        let v = TangentVector::new(x.clone(), Vector::from_vec(vec![0.3, -0.4, 1.2]));
        let s = CurveSample::new(Curve::Geodesic { start: x, velocity: v }, 0.2, 1e-4).unwrap();
        let p = Point::from_slice(&[2.0, -1.0, 0.5]);
        let r = covariant_log_pairing(&m, &s, &p).unwrap();
        assert!((r.value - r.speed_sq).abs() < 1e-9);
        assert_eq!((r.delta, r.zeta), (1.0, 1.0));
    }

    #[test]
    fn pairing_on_the_curve_point_is_singular() {
        let m = sphere();
        let x = m.origin();
        let v = m.tangent(&x, Vector::from_vec(vec![0.5, 0.0, 0.0])).unwrap();
        let s = CurveSample::new(Curve::Geodesic { start: x.clone(), velocity: v }, 0.0, 1e-4).unwrap();
        assert!(matches!(covariant_log_pairing(&m, &s, &x), Err(Error::SingularLog { .. })));
    }

    #[test]
    fn right_triangle_equality() {
        let m = Manifold::new(ManifoldSpec::euclidean(2, 10.0)).unwrap();
        let a = Point::from_slice(&[0.0, 3.0]);
        let b = Point::from_slice(&[0.0, 0.0]);
        let c = Point::from_slice(&[4.0, 0.0]);
        let r = cosine_law_check(&m, &a, &b, &c).unwrap();
        assert!((r.lhs - 25.0).abs() < 1e-12 && (r.rhs - 25.0).abs() < 1e-12);
        assert!(r.ok);
    }

    #[test]
    fn degenerate_triangle() {
        let m = sphere();
        let a = m.origin();
        let c = m.point_at_distance(&a, 2.0, 5).unwrap();
        let r = cosine_law_check(&m, &a, &a, &c).unwrap();
        assert!(r.ok);
        assert!(r.delta_min <= 1.0);
    }

    #[test]
    fn euclidean_ftc_for_quadratic_field() {
        let m = Manifold::new(ManifoldSpec::euclidean(2, 10.0)).unwrap();
        let x = Point::from_slice(&[1.0, 2.0]);
        let v = TangentVector::new(x.clone(), Vector::from_vec(vec![1.0, -1.0]));
        let field = |y: &Point, t: f64| {
            Ok(TangentVector::new(y.clone(), Vector::from_vec(vec![1.0 + 2.0 * t - t * t, 3.0 * t * t])))
        };
        let r = ftc_vector_field_check(&m, &x, &v, field, 100, 1e-3).unwrap();
        assert!(r.residual < 1e-10, "{}", r.residual);
        assert!(r.lhs_norm > 1.0);
    }
}
