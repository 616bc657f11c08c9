//! Invariant suites run by `riemann-accel check <suite>`.
//!
//! Each suite draws its samples from fixed seeds, so reports are
//! reproducible. A check passes when every sample has a non-negative margin
//! (tolerance minus error, or inequality slack).

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{beta_schedule, delta, zeta, Regime};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::geometry_checks::{
    cosine_law_check, covariant_log_pairing, exact_log_pairing, first_order_slack,
    ftc_vector_field_check, squared_distance_derivative, wqc_gap, Curve, CurveSample,
};
use crate::manifold::{Manifold, ManifoldKind, ManifoldSpec, Point, TangentVector, Vector};
use crate::objective::{half_squared_distance, Objective, Quadratic};
use crate::optimizer::{run, Momentum, RunConfig, SirnagOption};
use crate::reference::{
    energy_along, gradient_flow, monitor_reference, ode_reference, worst_energy_increase, BoundKind,
};
use crate::shadowing::{analyze, contraction_ratio, loglog_slope, pseudo_orbit_defect, random_pairs, REFINEMENT};

/// Base seed of every suite sample stream.
pub const SUITE_SEED: u64 = 0x5eed;
/// Samples per randomised check.
pub const SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Geometry,
    Lyapunov,
    Shadowing,
    Reduction,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Geometry, Suite::Lyapunov, Suite::Shadowing, Suite::Reduction];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Geometry => "geometry",
            Suite::Lyapunov => "lyapunov",
            Suite::Shadowing => "shadowing",
            Suite::Reduction => "reduction",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Contract(format!("unknown suite `{s}` (expected geometry, lyapunov, shadowing or reduction)")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    /// Smallest margin seen; negative means at least one failure.
    pub worst_margin: f64,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.samples > 0
    }

    fn from_margins(name: impl Into<String>, margins: &[f64], detail: impl Into<String>) -> Self {
        let failures = margins.iter().filter(|m| !(**m >= 0.0)).count();
        let worst = margins.iter().copied().fold(f64::INFINITY, |a, b| if b.is_nan() { f64::NEG_INFINITY } else { a.min(b) });
        Self { name: name.into(), samples: margins.len(), failures, worst_margin: worst, detail: detail.into() }
    }

    fn single(name: impl Into<String>, margin: f64, detail: impl Into<String>) -> Self {
        Self::from_margins(name, &[margin], detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<CheckOutcome>,
    pub elapsed: Duration,
    /// Free-form `key: value` sections appended to the report.
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("suite: {}\n", self.suite);
        for c in &self.checks {
            s.push_str(&format!(
                "check: {} | {} | samples={} failures={} worst_margin={:.3e} | {}\n",
                c.name,
                if c.passed() { "pass" } else { "FAIL" },
                c.samples,
                c.failures,
                c.worst_margin,
                c.detail
            ));
        }
        for n in &self.notes {
            s.push_str(n);
            if !n.ends_with('\n') {
                s.push('\n');
            }
        }
        s.push_str(&format!("checks: {}\nfailed: {}\n", self.checks.len(), self.failed()));
        s.push_str(&format!("elapsed_seconds: {:.3}\n", self.elapsed.as_secs_f64()));
        s.push_str(&format!("status: {}\n", if self.passed() { "pass" } else { "fail" }));
        s
    }
}

/// Runtime knobs for the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub exec: Execution,
    /// Reference step for the Lyapunov suite.
    pub h_ref: f64,
    /// Horizon for the Lyapunov suite.
    pub horizon: f64,
    pub samples: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { exec: Execution::Parallel, h_ref: 1e-4, horizon: 10.0, samples: SAMPLES }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let start = Instant::now();
    let (checks, notes) = match suite {
        Suite::Geometry => (geometry_suite(opts)?, Vec::new()),
        Suite::Lyapunov => (lyapunov_suite(opts)?, Vec::new()),
        Suite::Shadowing => shadowing_suite(opts)?,
        Suite::Reduction => (reduction_suite()?, Vec::new()),
    };
    Ok(SuiteReport { suite, checks, elapsed: start.elapsed(), notes })
}

fn rng_for(seed: u64, stream: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream as u64);
    r
}

fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

/// The three model spaces exercised by the geometry suite.
pub fn geometry_spaces() -> Result<Vec<Manifold>> {
    Ok(vec![
        Manifold::new(ManifoldSpec::euclidean(10, 4.0))?,
        Manifold::new(ManifoldSpec::sphere(3, 1.0, 2.8))?,
        Manifold::new(ManifoldSpec::hyperboloid(3, -1.0, 3.0))?,
    ])
}

fn label(m: &Manifold) -> String {
    format!("{}(n={}, K={})", m.kind().name(), m.dim(), m.curvature())
}

fn random_tangent(m: &Manifold, x: &Point, max_norm: f64, rng: &mut ChaCha8Rng) -> TangentVector {
    let r: f64 = rng.random_range(0.0..max_norm);
    m.random_unit_tangent(x, rng).scaled(r)
}

/// Round trip, exp/log consistency, transport isometry, constant speed,
/// on-manifold invariants and the squared-distance derivative.
pub fn primitive_checks(m: &Manifold, opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let o = m.origin();
    let d = m.diameter();
    let n = opts.samples;
    let tag = label(m);
    let seed = SUITE_SEED ^ (m.kind() as u64 + 1);

    let round_trip = collect(map_range(opts.exec, n, |i| {
        let mut rng = rng_for(seed, i);
        let x = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let y = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let back = m.exp(&x, &m.log(&x, &y)?)?;
        Ok(1e-9 - m.distance(&back, &y))
    }))?;

    let exp_log = collect(map_range(opts.exec, n, |i| {
        let mut rng = rng_for(seed + 1, i);
        let x = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let v = random_tangent(m, &x, d, &mut rng);
        let y = m.exp(&x, &v)?;
        let dist_err = (m.distance(&x, &y) - m.norm(&v)).abs();
        let log_err = (m.log(&x, &y)?.vec() - v.vec()).amax() / (1.0 + v.vec().amax());
        let drift = m.drift(&y);
        Ok((1e-9 - dist_err).min(1e-9 - log_err).min(1e-10 - drift))
    }))?;

    let isometry = collect(map_range(opts.exec, n, |i| {
        let mut rng = rng_for(seed + 2, i);
        let x = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let y = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let u = random_tangent(m, &x, 2.0, &mut rng);
        let w = random_tangent(m, &x, 2.0, &mut rng);
        let tu = m.transport(&x, &y, &u)?;
        let tw = m.transport(&x, &y, &w)?;
        let norm_err = (m.norm(&tu) - m.norm(&u)).abs();
        let inner_err = (m.metric(&tu, &tw)? - m.metric(&u, &w)?).abs();
        let tangency = m.tangency_residual(&tu);
        Ok((1e-10 - norm_err).min(1e-10 - inner_err).min(1e-10 - tangency))
    }))?;

    let speed = collect(map_range(opts.exec, n, |i| {
        let mut rng = rng_for(seed + 3, i);
        let x = m.random_point_with(&o, 0.5 * d, &mut rng)?;
        let v = random_tangent(m, &x, d, &mut rng);
        let (t, s): (f64, f64) = (rng.random(), rng.random());
        let gt = m.exp(&x, &v.scaled(t))?;
        let gs = m.exp(&x, &v.scaled(s))?;
        Ok(1e-9 - (m.distance(&gt, &gs) - (t - s).abs() * m.norm(&v)).abs())
    }))?;

    let derivative = collect(map_range(opts.exec, n, |i| {
        let mut rng = rng_for(seed + 4, i);
        let start = m.random_point_with(&o, 0.25 * d, &mut rng)?;
        let velocity = random_tangent(m, &start, 1.0, &mut rng);
        let bend = random_tangent(m, &start, 0.5, &mut rng);
        let p = m.random_point_with(&o, 0.25 * d, &mut rng)?;
        let sample = CurveSample::new(Curve::Bent { start, velocity, bend }, 0.2, 1e-5)?;
        let (fd, exact) = squared_distance_derivative(m, &sample, &p)?;
        Ok(1e-6 - (fd - exact).abs())
    }))?;

    Ok(vec![
        CheckOutcome::from_margins(format!("round_trip[{tag}]"), &round_trip, "d(exp_x(log_x y), y) < 1e-9"),
        CheckOutcome::from_margins(format!("exp_log[{tag}]"), &exp_log, "d(x, exp_x v) = |v|, log inverts exp, drift < 1e-10"),
        CheckOutcome::from_margins(format!("transport_isometry[{tag}]"), &isometry, "norms and inner products preserved to 1e-10"),
        CheckOutcome::from_margins(format!("constant_speed[{tag}]"), &speed, "d(g(t), g(s)) = |t-s||v| to 1e-9"),
        CheckOutcome::from_margins(format!("sq_distance_derivative[{tag}]"), &derivative, "centred fd (step 1e-5) vs 2<log, -X'> to 1e-6"),
    ])
}

struct PairingDraw {
    sample: CurveSample,
    p: Point,
}

fn pairing_draw(m: &Manifold, rng: &mut ChaCha8Rng, d_max: f64) -> Result<PairingDraw> {
    let o = m.origin();
    let start = m.random_point_with(&o, 0.5, rng)?;
    let speed: f64 = rng.random_range(0.2..1.5);
    let velocity = m.random_unit_tangent(&start, rng).scaled(speed);
    let curve = if rng.random::<bool>() {
        Curve::Geodesic { start, velocity }
    } else {
        let bend = m.random_unit_tangent(&start, rng).scaled(0.5);
        Curve::Bent { start, velocity, bend }
    };
    let t = 0.3;
    let x = curve.position(m, t)?;
    let dist: f64 = rng.random_range(0.05..d_max);
    let p = m.exp(&x, &m.random_unit_tangent(&x, rng).scaled(dist))?;
    Ok(PairingDraw { sample: CurveSample::new(curve, t, 1e-4)?, p })
}

/// The Hessian bracket `δ|X'|² ≤ <∇ log_X p, -X'> ≤ ζ|X'|²` with pointwise
/// constants, its closed form, the domain-wide corollary, and tightness on
/// the sphere.
pub fn lemma_checks(m: &Manifold, opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let tag = label(m);
    let d_max = match m.kind() {
        ManifoldKind::Sphere => 2.8 / m.curvature().sqrt(),
        _ => 3.0 / m.curvature().abs().sqrt(),
    };
    let seed = SUITE_SEED.wrapping_mul(31) ^ (m.kind() as u64);
    let draws = collect(map_range(opts.exec, opts.samples, |i| {
        let mut rng = rng_for(seed, i);
        let draw = pairing_draw(m, &mut rng, d_max)?;
        let r = covariant_log_pairing(m, &draw.sample, &draw.p)?;
        let x = draw.sample.curve.position(m, draw.sample.t)?;
        let xdot = draw.sample.curve.velocity(m, draw.sample.t, draw.sample.fd_step)?;
        let exact = exact_log_pairing(m, &x, &xdot, &draw.p)?;
        Ok((r, exact))
    }))?;
    let bracket: Vec<f64> = draws
        .iter()
        .map(|(r, _)| {
            let (lo, hi) = r.margins();
            (lo + 1e-5).min(hi + 1e-5)
        })
        .collect();
    let closed: Vec<f64> = draws.iter().map(|(r, e)| 1e-6 - (r.value - e).abs()).collect();
    let z_dom = zeta(m.curvature(), d_max);
    let domain: Vec<f64> = draws.iter().map(|(r, _)| z_dom * r.speed_sq + 1e-5 - r.value).collect();

    let mut out = vec![
        CheckOutcome::from_margins(format!("lemma_bracket[{tag}]"), &bracket, "pointwise delta/zeta bracket, tolerance 1e-5"),
        CheckOutcome::from_margins(format!("lemma_closed_form[{tag}]"), &closed, "difference quotient vs closed form to 1e-6"),
        CheckOutcome::from_margins(format!("lemma_domain_zeta[{tag}]"), &domain, "upper bound with the domain-wide zeta"),
    ];

    if m.kind() == ManifoldKind::Sphere {
        let tight = collect(map_range(opts.exec, opts.samples / 5, |i| {
            let mut rng = rng_for(seed + 1, i);
            let x = m.random_point_with(&m.origin(), 0.5, &mut rng)?;
            let u = m.random_unit_tangent(&x, &mut rng);
            let dist: f64 = rng.random_range(0.05..d_max);
            let p = m.exp(&x, &u.scaled(dist))?;
            let w = m.random_unit_tangent(&x, &mut rng);
            let along = m.metric(&w, &u)?;
            let perp = w.lin_comb(1.0, -along, &u)?;
            let speed: f64 = rng.random_range(0.2..1.5);
            let v = perp.scaled(speed / m.norm(&perp));
            let sample = CurveSample::new(Curve::Geodesic { start: x, velocity: v }, 0.0, 1e-4)?;
            let r = covariant_log_pairing(m, &sample, &p)?;
            Ok(1e-5 - (r.value - r.delta * r.speed_sq).abs())
        }))?;
        out.push(CheckOutcome::from_margins(
            format!("lemma_tightness[{tag}]"),
            &tight,
            "log_X p orthogonal to X': pairing equals delta|X'|^2 to 1e-5",
        ));
    }
    Ok(out)
}

/// Comparison law of cosines on random triangles, its first-order form and
/// the weak-quasi-convexity identity for the squared distance.
pub fn triangle_checks(m: &Manifold, opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let tag = label(m);
    let o = m.origin();
    let r = 0.5 * m.diameter();
    let seed = SUITE_SEED.wrapping_mul(97) ^ (m.kind() as u64);
    let rows = collect(map_range(opts.exec, opts.samples, |i| {
        let mut rng = rng_for(seed, i);
        let a = m.random_point_with(&o, r, &mut rng)?;
        let b = m.random_point_with(&o, r, &mut rng)?;
        let c = m.random_point_with(&o, r, &mut rng)?;
        let law = cosine_law_check(m, &a, &b, &c)?;
        let first = first_order_slack(m, &a, &b, &c)?;
        let (gap, l2) = wqc_gap(m, &b, &a)?;
        Ok((law, first, gap, l2))
    }))?;
    let slack: Vec<f64> = rows.iter().map(|(l, ..)| l.slack() + 1e-9).collect();
    let equiv: Vec<f64> = rows.iter().map(|(l, f, ..)| 1e-9 - (l.slack() - f).abs()).collect();
    let wqc: Vec<f64> = rows.iter().map(|(_, _, g, l2)| 1e-9 * (1.0 + l2) - (g - l2).abs()).collect();
    let mut out = vec![
        CheckOutcome::from_margins(format!("cosine_law[{tag}]"), &slack, "slack >= -1e-9 with worst delta on edge bc"),
        CheckOutcome::from_margins(format!("first_order_form[{tag}]"), &equiv, "first-order rearrangement agrees to 1e-9"),
        CheckOutcome::from_margins(format!("wqc_identity[{tag}]"), &wqc, "-<grad f, log> - (f - f*) = |log|^2"),
    ];
    if m.kind() == ManifoldKind::Euclidean {
        let eq = collect(map_range(opts.exec, opts.samples, |i| {
            let mut rng = rng_for(seed + 1, i);
            let b = m.random_point_with(&o, r, &mut rng)?;
            let u = m.random_unit_tangent(&b, &mut rng);
            let w0 = m.random_unit_tangent(&b, &mut rng);
            let w = w0.lin_comb(1.0, -m.metric(&w0, &u)?, &u)?;
            let w = w.scaled(1.0 / m.norm(&w));
            let a = m.exp(&b, &u.scaled(rng.random_range(0.1..1.0)))?;
            let c = m.exp(&b, &w.scaled(rng.random_range(0.1..1.0)))?;
            let l = cosine_law_check(m, &a, &b, &c)?;
            Ok(1e-12 - (l.lhs - l.rhs).abs())
        }))?;
        let e2 = Manifold::new(ManifoldSpec::euclidean(2, 10.0))?;
        let l345 = cosine_law_check(
            &e2,
            &Point::from_slice(&[0.0, 3.0]),
            &Point::from_slice(&[0.0, 0.0]),
            &Point::from_slice(&[4.0, 0.0]),
        )?;
        let mut margins = eq;
        margins.push(1e-12 - (l345.lhs - l345.rhs).abs());
        out.push(CheckOutcome::from_margins(
            format!("right_triangle_equality[{tag}]"),
            &margins,
            "equality to 1e-12 (3-4-5 and random right triangles)",
        ));
    }
    Ok(out)
}

/// Fundamental theorem of calculus for fields along a geodesic.
pub fn ftc_checks(m: &Manifold) -> Result<Vec<CheckOutcome>> {
    let tag = label(m);
    let mut rng = rng_for(SUITE_SEED ^ 0xf7c, m.kind() as usize);
    let x0 = m.random_point_with(&m.origin(), 0.3, &mut rng)?;
    let v = m.random_unit_tangent(&x0, &mut rng).scaled(0.8);
    let out = match m.kind() {
        ManifoldKind::Euclidean => {
            let a = m.random_unit_tangent(&x0, &mut rng);
            let b = m.random_unit_tangent(&x0, &mut rng);
            let c = m.random_unit_tangent(&x0, &mut rng);
            let field = |y: &Point, t: f64| {
                let w = a.vec() + b.vec() * t + c.vec() * (t * t);
                Ok(TangentVector::new(y.clone(), w))
            };
            let r = ftc_vector_field_check(m, &x0, &v, field, 100, 1e-3)?;
            vec![CheckOutcome::single(
                format!("ftc_polynomial[{tag}]"),
                1e-10 - r.residual,
                format!("residual {:.3e} for a quadratic field", r.residual),
            )]
        }
        _ => {
            let p = m.exp(&x0, &m.random_unit_tangent(&x0, &mut rng).scaled(1.0))?;
            let a0 = m.log(&x0, &p)?;
            let parallel = |y: &Point, _t: f64| m.transport(&x0, y, &a0);
            let rp = ftc_vector_field_check(m, &x0, &v, parallel, 100, 1e-3)?;
            let log_field = |y: &Point, _t: f64| m.log(y, &p);
            let r1 = ftc_vector_field_check(m, &x0, &v, log_field, 100, 1e-3)?;
            let r2 = ftc_vector_field_check(m, &x0, &v, log_field, 200, 1e-3)?;
            let ratio = r1.residual / r2.residual;
            vec![
                CheckOutcome::single(
                    format!("ftc_parallel_field[{tag}]"),
                    1e-9 - rp.residual,
                    format!("residual {:.3e} for a parallel field", rp.residual),
                ),
                CheckOutcome::single(
                    format!("ftc_second_order[{tag}]"),
                    (ratio - 3.5).min(4.5 - ratio),
                    format!("residual {:.3e} -> {:.3e} on halving the grid (ratio {ratio:.3})", r1.residual, r2.residual),
                ),
            ]
        }
    };
    Ok(out)
}

fn geometry_suite(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for m in geometry_spaces()? {
        out.extend(primitive_checks(&m, opts)?);
        if m.kind() != ManifoldKind::Euclidean {
            out.extend(lemma_checks(&m, opts)?);
        }
        out.extend(triangle_checks(&m, opts)?);
        out.extend(ftc_checks(&m)?);
    }
    Ok(out)
}

/// Hyperboloid, K = -1, dim 2, D = 1, with `f = ½d(·, p)²` and `x0` at
/// distance 0.5 from `p`: the setting of the accelerated-rate experiments.
pub fn hyperbolic_setting(seed: u64) -> Result<(Manifold, crate::objective::HalfSquaredDistance, Point)> {
    let m = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 1.0))?;
    let p = m.origin();
    let f = half_squared_distance(&m, &p)?;
    let x0 = m.point_at_distance(&p, 0.5, seed)?;
    Ok((m, f, x0))
}

/// Default seed for the initial point of the hyperbolic experiments.
pub const HYPERBOLIC_SEED: u64 = 7;

pub fn lyapunov_regimes() -> [Regime; 3] {
    [Regime::Convex, Regime::WeaklyQuasiConvex { alpha: 2.0 }, Regime::StronglyConvex { mu: 1.0 }]
}

fn lyapunov_suite(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (m, f, x0) = hyperbolic_setting(HYPERBOLIC_SEED)?;
    let z = zeta(m.curvature(), m.diameter());
    let results = collect(map_range(opts.exec, 3, |i| -> Result<Vec<CheckOutcome>> {
        let regime = lyapunov_regimes()[i];
        let name = regime.name();
        let traj = ode_reference(&f, &x0, regime, opts.h_ref, opts.horizon, 1)?;
        let energies = energy_along(&f, &traj, regime, Execution::Sequential)?;
        // Energies are compared from t = h_ref onward.
        let worst = worst_energy_increase(&energies[1..]);
        let acc = monitor_reference(&f, &traj, regime, BoundKind::Accelerated { zeta: z })?;
        let acc_margin: Vec<f64> = acc
            .iter()
            .filter_map(|s| s.bound.filter(|_| s.t >= crate::reference::T_MIN).map(|b| b * (1.0 + 1e-6) - s.gap))
            .collect();
        let flow = gradient_flow(&f, &x0, opts.h_ref, opts.horizon, 1)?;
        let gf = monitor_reference(&f, &flow, regime, BoundKind::GradientFlow)?;
        let gf_margin: Vec<f64> = gf
            .iter()
            .filter_map(|s| s.bound.filter(|_| s.t >= crate::reference::T_MIN).map(|b| b * (1.0 + 1e-6) - s.gap))
            .collect();
        Ok(vec![
            CheckOutcome::single(
                format!("energy_monotone[{name}]"),
                1e-5 - worst,
                format!("worst relative increase {worst:.3e} over {} samples", energies.len() - 1),
            ),
            CheckOutcome::from_margins(format!("rate_bound[{name}]"), &acc_margin, "gap <= bound*(1+1e-6) for t >= 0.1"),
            CheckOutcome::from_margins(
                format!("gradient_flow_bound[{name}]"),
                &gf_margin,
                "gradient-flow gap <= bound*(1+1e-6) for t >= 0.1",
            ),
        ])
    }))?;
    Ok(results.into_iter().flatten().collect())
}

/// Max pseudo-orbit defect of the hyperbolic setting for each step size.
pub fn defect_sweep(hs: &[f64], horizon: f64, exec: Execution) -> Result<Vec<(f64, f64, f64)>> {
    let (_, f, x0) = hyperbolic_setting(HYPERBOLIC_SEED)?;
    collect(map_slice_h(exec, hs, |h| {
        let flow = gradient_flow(&f, &x0, h / REFINEMENT as f64, horizon, REFINEMENT)?;
        let d = pseudo_orbit_defect(&f, &flow, h)?;
        Ok((h, d.max_defect, d.fitted_c))
    }))
}

fn map_slice_h<R: Send>(exec: Execution, hs: &[f64], f: impl Fn(f64) -> R + Sync + Send) -> Vec<R> {
    crate::exec::map_slice(exec, hs, |&h| f(h))
}

fn shadowing_suite(opts: &SuiteOptions) -> Result<(Vec<CheckOutcome>, Vec<String>)> {
    let mut out = Vec::new();
    let mut notes = Vec::new();

    let sweep = defect_sweep(&[0.01, 0.005, 0.0025, 0.00125], 1.0, opts.exec)?;
    let hs: Vec<f64> = sweep.iter().map(|r| r.0).collect();
    let ds: Vec<f64> = sweep.iter().map(|r| r.1).collect();
    let slope = loglog_slope(&hs, &ds);
    out.push(CheckOutcome::single(
        "defect_order",
        0.2 - (slope - 2.0).abs(),
        format!("log-log slope of max defect vs h = {slope:.4}"),
    ));
    let cs: Vec<f64> = sweep.iter().take(3).map(|r| r.2).collect();
    let c_margin: Vec<f64> = cs.iter().map(|c| 0.2 - (c / cs[0] - 1.0).abs()).collect();
    out.push(CheckOutcome::from_margins(
        "fitted_c_stable",
        &c_margin,
        format!("fitted C over h in {{0.01, 0.005, 0.0025}}: {:.5} {:.5} {:.5}", cs[0], cs[1], cs[2]),
    ));

    // Euclidean strongly convex quadratic.
    let e = Manifold::new(ManifoldSpec::euclidean(3, 10.0))?;
    let q = Quadratic::isotropic(e, 1.0)?;
    let y0 = Point::from_slice(&[1.0, -0.5, 0.25]);
    let rep = analyze(&q, &y0, 0.1, 100, opts.exec)?;
    let eps = rep.epsilon.unwrap_or(f64::NAN);
    out.push(CheckOutcome::single(
        "euclidean_shadowing",
        eps - rep.sup_distance,
        format!("sup distance {:.4e} <= C h^2/(1 - rho) = {eps:.4e}", rep.sup_distance),
    ));
    notes.push(format!("[euclidean quadratic, mu = 1, h = 0.1]\n{}", rep.to_text()));

    // Hyperbolic setting: the contraction precondition fails at h = 0.1.
    let (hm, f, x0) = hyperbolic_setting(HYPERBOLIC_SEED)?;
    let rep = analyze(&f, &x0, 0.1, 100, opts.exec)?;
    let stated = rep.to_text().contains("precondition_holds: false");
    out.push(CheckOutcome::single(
        "hyperbolic_precondition_reported",
        if rep.precondition_holds == Some(false) && stated && rep.verdict.is_none() { 1.0 } else { -1.0 },
        format!(
            "mu = 1 vs (lambda*zeta - 1)/(lambda*h) = {:.6}: precondition false, no verdict",
            rep.precondition_threshold
        ),
    ));
    notes.push(format!("[hyperboloid K = -1, D = 1, mu = 1, h = 0.1]\n{}", rep.to_text()));

    // Contraction where the hypotheses hold: hyperboloid at a larger step.
    let pairs = random_pairs(&hm, &hm.origin(), 0.5 * hm.diameter(), opts.samples, SUITE_SEED)?;
    let h_big = 0.5;
    let xi_big = crate::constants::xi(hm.curvature(), hm.diameter(), h_big, 1.0);
    let c = contraction_ratio(&f, h_big, &pairs, opts.exec)?;
    out.push(CheckOutcome::single(
        "contraction_below_xi[hyperboloid]",
        xi_big + 1e-8 - c.rho_hat,
        format!("rho_hat {:.6} <= xi {:.6} at h = {h_big}", c.rho_hat, xi_big),
    ));

    // Sphere inside a small ball: xi = 1 - h mu with mu = delta(K, D).
    let s = Manifold::new(ManifoldSpec::sphere(2, 1.0, 1.0))?;
    let fs = half_squared_distance(&s, &s.origin())?;
    let mu = delta(1.0, 1.0)?;
    let pairs = random_pairs(&s, &s.origin(), 0.5, opts.samples, SUITE_SEED + 1)?;
    let c = contraction_ratio(&fs, 0.1, &pairs, opts.exec)?;
    out.push(CheckOutcome::single(
        "contraction_below_xi[sphere]",
        1.0 - 0.1 * mu + 1e-8 - c.rho_hat,
        format!("rho_hat {:.6} <= 1 - h mu = {:.6}", c.rho_hat, 1.0 - 0.1 * mu),
    ));

    Ok((out, notes))
}

/// Plain Nesterov iteration on a Euclidean objective with the convex
/// schedule `β_k = (k-1)/(k+2)` and step `s`:
/// `x_{k+1} = y_k - s∇f(y_k)`, `y_{k+1} = x_{k+1} + β_{k+1}(x_{k+1} - x_k)`.
pub fn nesterov(obj: &dyn Objective, x0: &Vector, s: f64, steps: usize) -> Result<Vec<Vector>> {
    let mut xs = vec![x0.clone()];
    let mut y = x0.clone();
    for k in 0..steps {
        let g = obj.gradient(&Point::new(y.clone()))?;
        let x_next = &y - g.vec() * s;
        let beta = (k as f64) / (k as f64 + 3.0);
        y = &x_next + (&x_next - &xs[k]) * beta;
        xs.push(x_next);
    }
    Ok(xs)
}

/// A 10-dimensional positive-definite quadratic with a seeded spectrum.
pub fn reduction_quadratic() -> Result<(Quadratic, Vector)> {
    let m = Manifold::new(ManifoldSpec::euclidean(10, 100.0))?;
    let rot = crate::objective::random_rotation(10, 11);
    let diag = DMatrix::from_diagonal(&Vector::from_fn(10, |i, _| 0.1 + i as f64 * 0.2));
    let a = &rot * diag * rot.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let center = Vector::from_fn(10, |i, _| (i as f64 * 0.7).sin());
    let x0 = Vector::from_fn(10, |i, _| 1.0 + (i as f64 * 1.3).cos());
    Ok((Quadratic::new(m, a, center)?, x0))
}

fn reduction_suite() -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let (q, x0) = reduction_quadratic()?;
    let h = 0.5;
    let cfg = RunConfig::sirnag(Regime::Convex, h, 100, SirnagOption::II).with_points();
    let tr = run(&Point::new(x0.clone()), &q, &cfg)?;
    let nest = nesterov(&q, &x0, h * h, 100)?;
    let err = tr
        .points
        .iter()
        .zip(&nest)
        .map(|(p, n)| (p.coords() - n).amax())
        .fold(0.0, f64::max);
    out.push(CheckOutcome::single(
        "option2_equals_nesterov",
        1e-12 - err,
        format!("max coordinate difference {err:.3e} over 100 steps"),
    ));

    // β ≡ 0 with a power-of-two step: h·(h·g) and h²·g round identically.
    let h = 0.125;
    let mut worst_bits = 0usize;
    let mut worst_rel = 0.0f64;
    let (_, hf, hx0) = hyperbolic_setting(HYPERBOLIC_SEED)?;
    for (obj, start, hh) in [
        (&q as &dyn Objective, Point::new(x0.clone()), h),
        (&hf as &dyn Objective, hx0.clone(), h),
        (&q as &dyn Objective, Point::new(x0.clone()), 0.1),
    ] {
        let mut cfg = RunConfig::sirnag(Regime::Convex, hh, 100, SirnagOption::I).with_points();
        cfg.momentum = Momentum::Constant(0.0);
        let s = run(&start, obj, &cfg)?;
        let g = run(&start, obj, &RunConfig::rgd(hh * hh, 100).with_points())?;
        for (a, b) in s.points.iter().zip(&g.points) {
            if hh == h {
                worst_bits += usize::from(a != b);
            } else {
                worst_rel = worst_rel.max((a.coords() - b.coords()).amax() / (1.0 + b.coords().amax()));
            }
        }
    }
    out.push(CheckOutcome::single(
        "zero_momentum_equals_rgd",
        if worst_bits == 0 { 1.0 } else { -(worst_bits as f64) },
        format!("bit-identical iterates at h = 1/8 (Euclidean and hyperboloid), {worst_bits} mismatches"),
    ));
    out.push(CheckOutcome::single(
        "zero_momentum_equals_rgd_rounding",
        1e-14 - worst_rel,
        format!("h = 0.1: relative difference {worst_rel:.3e} (rounding of h*(h*g) vs h^2*g)"),
    ));

    // Euclidean constants and schedule.
    let zeta0 = zeta(0.0, 5.0);
    let sched_err = (0..50)
        .map(|k| {
            let b = beta_schedule(Regime::Convex, k, 0.1, zeta0);
            let classical = if k == 0 { 0.0 } else { (k as f64 - 1.0) / (k as f64 + 2.0) };
            (b - classical).abs()
        })
        .fold(0.0, f64::max);
    let consts = crate::constants::ConstantSet::for_curvature(0.0, 5.0)?;
    let flat = consts.zeta == 1.0 && consts.delta == 1.0 && consts.lambda == 1.0;
    out.push(CheckOutcome::single(
        "euclidean_constants",
        if flat && sched_err == 0.0 { 1.0 } else { -1.0 },
        "zeta = delta = lambda = 1 and beta_k = (k-1)/(k+2) when K = 0",
    ));
    Ok(out)
}
