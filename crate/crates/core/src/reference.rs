//! Fine-step reference solutions of the accelerated ODE and of gradient
//! flow, the Lyapunov energies that certify their rates, and monitors that
//! compare a trajectory against the theoretical bounds.

use crate::constants::{beta_schedule, gradient_flow_bound, rate_bound, zeta, Regime};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::objective::Objective;
use crate::optimizer::{sirnag_step, OptimizerState, SirnagOption, Trajectory};

/// Bound checks start here; earlier samples are reported but never fail.
pub const T_MIN: f64 = 0.1;
/// Multiplicative slack on every bound comparison.
pub const BOUND_SLACK: f64 = 1e-6;
/// Coarsest step accepted for a reference solution.
pub const MAX_REFERENCE_STEP: f64 = 1e-3;

/// Samples of a continuous-time trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTrajectory {
    pub h_ref: f64,
    /// Integrator steps between consecutive samples.
    pub stride: usize,
    pub times: Vec<f64>,
    pub points: Vec<Point>,
    pub velocities: Vec<TangentVector>,
}

impl ReferenceTrajectory {
    /// Spacing of the sample grid.
    pub fn sample_step(&self) -> f64 {
        self.h_ref * self.stride as f64
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn step_count(h_ref: f64, t_end: f64, stride: usize) -> Result<usize> {
    if !(h_ref > 0.0 && h_ref <= MAX_REFERENCE_STEP) {
        return Err(Error::Contract(format!(
            "reference step must lie in (0, {MAX_REFERENCE_STEP}], got {h_ref}"
        )));
    }
    if !(t_end > 0.0) || !t_end.is_finite() {
        return Err(Error::Contract(format!("horizon must be finite and > 0, got {t_end}")));
    }
    if stride == 0 {
        return Err(Error::Contract("output stride must be ≥ 1".into()));
    }
    let n = (t_end / h_ref).round() as usize;
    if ((n as f64) * h_ref - t_end).abs() > 1e-9 * t_end || !n.is_multiple_of(stride) {
        return Err(Error::Contract(format!(
            "horizon {t_end} is not a multiple of the sample step {}",
            h_ref * stride as f64
        )));
    }
    Ok(n)
}

fn check_state(k: usize, x: &Point, v: &TangentVector) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite { step: k, what: "position".into() });
    }
    if !v.is_finite() {
        return Err(Error::NonFinite { step: k, what: "velocity".into() });
    }
    Ok(())
}

/// Reference solution of `∇_Ẋ Ẋ + c(t) Ẋ + grad f(X) = 0`, `X(0) = x0`,
/// `Ẋ(0) = 0`, computed by SIRNAG (Option I) at step `h_ref` and kept every
/// `stride` steps. The stored velocity is the integrator's `v_k`.
pub fn ode_reference(
    obj: &dyn Objective,
    x0: &Point,
    regime: Regime,
    h_ref: f64,
    t_end: f64,
    stride: usize,
) -> Result<ReferenceTrajectory> {
    regime.validate()?;
    let n = step_count(h_ref, t_end, stride)?;
    let m = obj.manifold();
    let zeta_d = zeta(m.curvature(), m.diameter());
    let mut out = ReferenceTrajectory {
        h_ref,
        stride,
        times: Vec::with_capacity(n / stride + 1),
        points: Vec::with_capacity(n / stride + 1),
        velocities: Vec::with_capacity(n / stride + 1),
    };
    let mut state = OptimizerState::at_rest(m, x0.clone());
    for k in 0..=n {
        check_state(k, &state.x, &state.v)?;
        if k % stride == 0 {
            out.times.push(k as f64 * h_ref);
            out.points.push(state.x.clone());
            out.velocities.push(state.v.clone());
        }
        if k < n {
            let beta = beta_schedule(regime, k, h_ref, zeta_d);
            state = sirnag_step(obj, &state, h_ref, beta, SirnagOption::I)?;
        }
    }
    Ok(out)
}

/// Forward-Euler solution of `Ẏ = -grad f(Y)` along geodesics.
/// The stored velocity is `-grad f` at each sample.
pub fn gradient_flow(
    obj: &dyn Objective,
    x0: &Point,
    h_ref: f64,
    t_end: f64,
    stride: usize,
) -> Result<ReferenceTrajectory> {
    let n = step_count(h_ref, t_end, stride)?;
    let m = obj.manifold();
    let mut out = ReferenceTrajectory {
        h_ref,
        stride,
        times: Vec::with_capacity(n / stride + 1),
        points: Vec::with_capacity(n / stride + 1),
        velocities: Vec::with_capacity(n / stride + 1),
    };
    let mut x = x0.clone();
    for k in 0..=n {
        let v = obj.gradient(&x)?.scaled(-1.0);
        check_state(k, &x, &v)?;
        if k % stride == 0 {
            out.times.push(k as f64 * h_ref);
            out.points.push(x.clone());
            out.velocities.push(v.clone());
        }
        if k < n {
            x = m.exp(&x, &v.scaled(h_ref))?;
        }
    }
    Ok(out)
}

/// Lyapunov energy of the accelerated flow for the given regime, with
/// `L = log_x(x*)` and `f_gap = f(x) - f*`:
///
/// * convex: `t² f_gap + 2‖-L + (t/2)Ẋ‖² + 2(ζ-1)‖L‖²`
/// * weakly quasi-convex: `α²t² f_gap + 2‖-L + (αt/2)Ẋ‖² + 2(ζ-1)‖L‖²`
/// * strongly convex: `e^{√(µ/ζ)t} (µ/(2ζ)‖-L + √(ζ/µ)Ẋ‖² + f_gap + µ(ζ-1)/(2ζ)‖L‖²)`
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_energy(
    manifold: &Manifold,
    regime: Regime,
    t: f64,
    x: &Point,
    xdot: &TangentVector,
    x_star: &Point,
    f_gap: f64,
    zeta: f64,
) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("energy needs t ≥ 0, got {t}")));
    }
    let l = manifold.log(x, x_star)?;
    let l2 = manifold.norm(&l).powi(2);
    let energy = match regime {
        Regime::Convex | Regime::WeaklyQuasiConvex { .. } => {
            let a = match regime {
                Regime::WeaklyQuasiConvex { alpha } => alpha,
                _ => 1.0,
            };
            let mix = l.lin_comb(-1.0, 0.5 * a * t, xdot)?;
            a * a * t * t * f_gap + 2.0 * manifold.norm(&mix).powi(2) + 2.0 * (zeta - 1.0) * l2
        }
        Regime::StronglyConvex { mu } => {
            let mix = l.lin_comb(-1.0, (zeta / mu).sqrt(), xdot)?;
            let inner = mu / (2.0 * zeta) * manifold.norm(&mix).powi(2)
                + f_gap
                + mu * (zeta - 1.0) / (2.0 * zeta) * l2;
            ((mu / zeta).sqrt() * t).exp() * inner
        }
    };
    Ok(energy)
}

/// Energies along a reference trajectory, one per sample.
pub fn energy_along(
    obj: &dyn Objective,
    traj: &ReferenceTrajectory,
    regime: Regime,
    exec: Execution,
) -> Result<Vec<f64>> {
    let m = obj.manifold();
    let meta = obj.metadata();
    let (xs, f_star) = match (&meta.minimizer, meta.f_star) {
        (Some(xs), Some(f)) => (xs, f),
        _ => return Err(Error::UnsupportedMonitor("energy needs a known minimiser".into())),
    };
    let zeta_d = zeta(m.curvature(), m.diameter());
    map_range(exec, traj.len(), |j| {
        let x = &traj.points[j];
        lyapunov_energy(m, regime, traj.times[j], x, &traj.velocities[j], xs, obj.value(x) - f_star, zeta_d)
    })
    .into_iter()
    .collect()
}

/// Which continuous-time bound a monitor compares against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundKind {
    /// Accelerated-flow bound with the given ζ.
    Accelerated { zeta: f64 },
    /// Gradient-flow bound.
    GradientFlow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub t: f64,
    pub gap: f64,
    pub bound: Option<f64>,
    pub ok: bool,
}

/// Compares `(t, gap)` samples against the regime's bound, with
/// `r0 = d(x0, x*)` and `gap0 = f(x0) - f*`. Samples before `t_min` are
/// always `ok`.
pub fn rate_monitor(
    samples: &[(f64, f64)],
    regime: Regime,
    kind: BoundKind,
    r0: f64,
    gap0: f64,
    t_min: f64,
) -> Vec<RateSample> {
    samples
        .iter()
        .map(|&(t, gap)| {
            let bound = match kind {
                BoundKind::Accelerated { zeta } => rate_bound(regime, t, r0, zeta, gap0),
                BoundKind::GradientFlow => gradient_flow_bound(regime, t, r0, gap0),
            }
            .ok();
            let ok = t < t_min || bound.is_some_and(|b| gap <= b * (1.0 + BOUND_SLACK));
            RateSample { t, gap, bound, ok }
        })
        .collect()
}

/// `(t, gap)` pairs of a reference trajectory.
pub fn gap_samples(obj: &dyn Objective, traj: &ReferenceTrajectory) -> Result<Vec<(f64, f64)>> {
    let f_star = obj
        .metadata()
        .f_star
        .ok_or_else(|| Error::UnsupportedMonitor("gap needs a known optimal value".into()))?;
    Ok(traj.times.iter().zip(&traj.points).map(|(&t, x)| (t, obj.value(x) - f_star)).collect())
}

/// `(t, gap)` pairs of a discrete trajectory.
pub fn trajectory_gap_samples(traj: &Trajectory) -> Vec<(f64, f64)> {
    traj.records.iter().filter_map(|r| r.gap.map(|g| (r.t, g))).collect()
}

/// Monitor a reference trajectory of `obj` against the bound of `kind`.
pub fn monitor_reference(
    obj: &dyn Objective,
    traj: &ReferenceTrajectory,
    regime: Regime,
    kind: BoundKind,
) -> Result<Vec<RateSample>> {
    let m = obj.manifold();
    let xs = obj
        .metadata()
        .minimizer
        .as_ref()
        .ok_or_else(|| Error::UnsupportedMonitor("bounds need a known minimiser".into()))?;
    let samples = gap_samples(obj, traj)?;
    let r0 = m.distance(&traj.points[0], xs);
    Ok(rate_monitor(&samples, regime, kind, r0, samples[0].1, T_MIN))
}

/// Largest increase between consecutive energies, relative to the first.
pub fn worst_energy_increase(energies: &[f64]) -> f64 {
    let e0 = energies.first().copied().unwrap_or(1.0).abs().max(f64::MIN_POSITIVE);
    energies.windows(2).map(|w| (w[1] - w[0]) / e0).fold(f64::NEG_INFINITY, f64::max)
}
