//! Riemannian gradient descent and the semi-implicit accelerated integrator.

use std::fmt;
use std::str::FromStr;

use crate::constants::{beta_schedule, rate_bound, zeta, Regime};
use crate::error::{Error, Result};
use crate::manifold::{Manifold, Point, TangentVector};
use crate::objective::Objective;
use crate::reference::lyapunov_energy;

/// Where the gradient inside the SIRNAG update is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SirnagOption {
    /// At the current iterate.
    #[default]
    I,
    /// At the momentum look-ahead `exp_x(hβv)`, transported back to the
    /// iterate.
    II,
}

impl fmt::Display for SirnagOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SirnagOption::I => "I",
            SirnagOption::II => "II",
        })
    }
}

impl FromStr for SirnagOption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(SirnagOption::I),
            "II" | "2" => Ok(SirnagOption::II),
            other => Err(Error::Contract(format!("unknown SIRNAG option `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rgd,
    Sirnag,
}

/// Momentum coefficients used by a SIRNAG run.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Momentum {
    /// The regime's schedule, with ζ taken from the manifold's curvature and
    /// diameter.
    #[default]
    Schedule,
    /// The same β at every step (β ≡ 0 turns SIRNAG into gradient descent).
    Constant(f64),
}

/// Iterate and velocity of the accelerated integrator.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub k: usize,
    pub x: Point,
    pub v: TangentVector,
}

impl OptimizerState {
    /// State at `x0` with zero velocity.
    pub fn at_rest(manifold: &Manifold, x0: Point) -> Self {
        let v = manifold.zero(&x0);
        Self { k: 0, x: x0, v }
    }
}

/// `exp_x(-η grad f(x))`.
pub fn rgd_step(obj: &dyn Objective, x: &Point, eta: f64) -> Result<Point> {
    if !(eta > 0.0) {
        return Err(Error::Contract(format!("step size must be > 0, got {eta}")));
    }
    let g = obj.gradient(x)?;
    obj.manifold().exp(x, &g.scaled(-eta))
}

/// The increment `a_k` of the SIRNAG update, based at `state.x`.
pub fn sirnag_increment(
    obj: &dyn Objective,
    state: &OptimizerState,
    h: f64,
    beta: f64,
    option: SirnagOption,
) -> Result<TangentVector> {
    let m = obj.manifold();
    let momentum = state.v.scaled(beta);
    let grad = match option {
        SirnagOption::I => obj.gradient(&state.x)?,
        SirnagOption::II => {
            let look = m.exp(&state.x, &momentum.scaled(h))?;
            let g = obj.gradient(&look)?;
            m.transport(&look, &state.x, &g)?
        }
    };
    momentum.lin_comb(1.0, -h, &grad)
}

/// One step of SIRNAG:
///
/// ```text
/// a  = β v − h grad f(·)
/// x' = exp_x(h a)
/// v' = Γ_x^{x'} a
/// ```
pub fn sirnag_step(
    obj: &dyn Objective,
    state: &OptimizerState,
    h: f64,
    beta: f64,
    option: SirnagOption,
) -> Result<OptimizerState> {
    if !(h > 0.0) {
        return Err(Error::Contract(format!("integration step must be > 0, got {h}")));
    }
    let m = obj.manifold();
    let a = sirnag_increment(obj, state, h, beta, option)?;
    let x = m.exp(&state.x, &a.scaled(h))?;
    let v = m.transport(&state.x, &x, &a)?;
    Ok(OptimizerState { k: state.k + 1, x, v })
}

/// Parameters of a single optimisation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub regime: Regime,
    /// SIRNAG integration step.
    pub h: f64,
    /// RGD step size.
    pub eta: f64,
    pub steps: usize,
    pub option: SirnagOption,
    pub momentum: Momentum,
    /// Keep every iterate (and velocity) in the trajectory.
    pub record_points: bool,
}

impl RunConfig {
    pub fn sirnag(regime: Regime, h: f64, steps: usize, option: SirnagOption) -> Self {
        Self {
            method: Method::Sirnag,
            regime,
            h,
            eta: h * h,
            steps,
            option,
            momentum: Momentum::Schedule,
            record_points: false,
        }
    }

    pub fn rgd(eta: f64, steps: usize) -> Self {
        Self {
            method: Method::Rgd,
            regime: Regime::Convex,
            h: eta.sqrt(),
            eta,
            steps,
            option: SirnagOption::I,
            momentum: Momentum::Constant(0.0),
            record_points: false,
        }
    }

    pub fn with_points(mut self) -> Self {
        self.record_points = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.regime.validate()?;
        let step = match self.method {
            Method::Rgd => self.eta,
            Method::Sirnag => self.h,
        };
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::Contract(format!("step size must be finite and > 0, got {step}")));
        }
        Ok(())
    }

    /// Time elapsed per iteration: `h` for SIRNAG, `η` for RGD.
    pub fn time_step(&self) -> f64 {
        match self.method {
            Method::Rgd => self.eta,
            Method::Sirnag => self.h,
        }
    }
}

/// Per-iteration record.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub t: f64,
    pub value: f64,
    pub gap: Option<f64>,
    pub grad_norm: f64,
    pub dist_to_min: Option<f64>,
    pub energy: Option<f64>,
    pub bound: Option<f64>,
    /// `d(x_0, x_k) > D`.
    pub outside_domain: bool,
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<StepRecord>,
    pub points: Vec<Point>,
    pub velocities: Vec<TangentVector>,
    /// Set when a non-finite value stopped the run early.
    pub diagnostic: Option<Error>,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.diagnostic.is_none()
    }

    pub fn last(&self) -> &StepRecord {
        self.records.last().expect("trajectory always holds the initial record")
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.gap).collect()
    }
}

/// Runs RGD or SIRNAG from `x0` for `config.steps` iterations.
///
/// Geometric errors (leaving the injectivity radius, antipodal points) are
/// returned as `Err`. A non-finite value or gradient stops the loop and is
/// reported in [`Trajectory::diagnostic`] alongside the records so far.
pub fn run(x0: &Point, obj: &dyn Objective, config: &RunConfig) -> Result<Trajectory> {
    config.validate()?;
    let m = obj.manifold();
    m.check_point(x0, crate::manifold::INVARIANT_TOL)?;
    let meta = obj.metadata();
    let zeta_d = zeta(m.curvature(), m.diameter());
    let dt = config.time_step();
    let r0 = meta.minimizer.as_ref().map(|xs| m.distance(x0, xs));
    let gap0 = obj.gap(x0);
    let monitors = config.method == Method::Sirnag && config.momentum == Momentum::Schedule;

    let mut traj = Trajectory { records: Vec::new(), points: Vec::new(), velocities: Vec::new(), diagnostic: None };
    let mut state = OptimizerState::at_rest(m, x0.clone());

    for k in 0..=config.steps {
        let value = obj.value(&state.x);
        let grad = obj.gradient(&state.x)?;
        let grad_norm = m.norm(&grad);
        if !value.is_finite() || !grad_norm.is_finite() || !state.x.is_finite() {
            let what = if !value.is_finite() { "objective value" } else { "gradient" };
            traj.diagnostic = Some(Error::NonFinite { step: k, what: what.into() });
            break;
        }
        let t = k as f64 * dt;
        let gap = obj.gap(&state.x);
        let dist_to_min = meta.minimizer.as_ref().map(|xs| m.distance(&state.x, xs));
        let (energy, bound) = match (monitors, &meta.minimizer, gap, r0, gap0) {
            (true, Some(xs), Some(g), Some(r0), Some(g0)) => {
                let e = lyapunov_energy(m, config.regime, t, &state.x, &state.v, xs, g, zeta_d).ok();
                let b = rate_bound(config.regime, t, r0, zeta_d, g0).ok();
                (e, b)
            }
            _ => (None, None),
        };
        traj.records.push(StepRecord {
            k,
            t,
            value,
            gap,
            grad_norm,
            dist_to_min,
            energy,
            bound,
            outside_domain: m.distance(x0, &state.x) > m.diameter(),
        });
        if config.record_points {
            traj.points.push(state.x.clone());
            traj.velocities.push(state.v.clone());
        }
        if k == config.steps {
            break;
        }
        state = match config.method {
            Method::Rgd => {
                let x = m.exp(&state.x, &grad.scaled(-config.eta))?;
                OptimizerState::at_rest(m, x)
            }
            Method::Sirnag => {
                let beta = match config.momentum {
                    Momentum::Schedule => beta_schedule(config.regime, k, config.h, zeta_d),
                    Momentum::Constant(b) => b,
                };
                sirnag_step(obj, &state, config.h, beta, config.option)?
            }
        };
        state.k = k + 1;
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{ManifoldSpec, Vector};
    use crate::objective::{half_squared_distance, Flat, Quadratic};

    fn plane() -> Manifold {
        Manifold::new(ManifoldSpec::euclidean(2, 10.0)).unwrap()
    }

    #[test]
    fn rgd_contracts_linearly_in_the_plane() {
        let f = Quadratic::isotropic(plane(), 1.0).unwrap();
        let x = rgd_step(&f, &Point::from_slice(&[1.0, 0.0]), 0.1).unwrap();
        assert!((x.coords() - Vector::from_vec(vec![0.9, 0.0])).amax() < 1e-15);
        assert!(rgd_step(&f, &x, 0.0).is_err());
    }

    #[test]
    fn stationary_point_is_fixed() {
        let h = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 1.0)).unwrap();
        let f = half_squared_distance(&h, &h.origin()).unwrap();
        assert_eq!(rgd_step(&f, &h.origin(), 0.3).unwrap(), h.origin());
    }

    #[test]
    fn momentum_only_coasting() {
        let h = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 3.0)).unwrap();
        let f = Flat::new(h.clone());
        let x = h.origin();
        let v = h.tangent(&x, Vector::from_vec(vec![0.0, 0.3, -0.2])).unwrap();
        let s = OptimizerState { k: 3, x: x.clone(), v: v.clone() };
        let next = sirnag_step(&f, &s, 0.5, 0.8, SirnagOption::II).unwrap();
        let expect = h.exp(&x, &v.scaled(0.4)).unwrap();
        assert!((next.x.coords() - expect.coords()).amax() < 1e-14);
        let vt = h.transport(&x, &expect, &v.scaled(0.8)).unwrap();
        assert!((next.v.vec() - vt.vec()).amax() < 1e-14);
        assert_eq!(next.k, 4);
    }

    #[test]
    fn zero_velocity_step_is_gradient_step() {
        let h = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 1.0)).unwrap();
        let f = half_squared_distance(&h, &h.origin()).unwrap();
        let x0 = h.point_at_distance(&h.origin(), 0.5, 2).unwrap();
        let s = OptimizerState::at_rest(&h, x0.clone());
        for opt in [SirnagOption::I, SirnagOption::II] {
            let next = sirnag_step(&f, &s, 0.1, 0.7, opt).unwrap();
            let rgd = rgd_step(&f, &x0, 0.01).unwrap();
            assert!((next.x.coords() - rgd.coords()).amax() < 1e-15);
        }
    }

    #[test]
    fn zero_steps_gives_initial_record() {
        let h = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 1.0)).unwrap();
        let f = half_squared_distance(&h, &h.origin()).unwrap();
        let x0 = h.point_at_distance(&h.origin(), 0.5, 2).unwrap();
        let tr = run(&x0, &f, &RunConfig::sirnag(Regime::Convex, 0.1, 0, SirnagOption::I)).unwrap();
        assert_eq!(tr.records.len(), 1);
        assert!((tr.records[0].gap.unwrap() - 0.125).abs() < 1e-14);
        assert!(tr.records[0].bound.is_none());
        // ε(0) = 2ζ R²
        let zeta1 = 1.313_035_285_499_331_3;
        assert!((tr.records[0].energy.unwrap() - 2.0 * zeta1 * 0.25).abs() < 1e-13);
    }

    #[test]
    fn gap_is_value_minus_optimum() {
        let h = Manifold::new(ManifoldSpec::hyperboloid(2, -1.0, 1.0)).unwrap();
        let f = half_squared_distance(&h, &h.origin()).unwrap();
        let x0 = h.point_at_distance(&h.origin(), 0.5, 2).unwrap();
        let tr = run(&x0, &f, &RunConfig::rgd(0.01, 20)).unwrap();
        assert_eq!(tr.records.len(), 21);
        for r in &tr.records {
            assert_eq!(r.gap, Some(r.value - 0.0));
        }
    }

    #[test]
    fn outside_domain_is_flagged_not_fatal() {
        let e = Manifold::new(ManifoldSpec::euclidean(1, 0.5)).unwrap();
        let f = crate::objective::Linear::new(e, Vector::from_vec(vec![1.0])).unwrap();
        let tr = run(&Point::from_slice(&[0.0]), &f, &RunConfig::rgd(0.1, 10)).unwrap();
        assert!(tr.completed());
        assert!(!tr.records[5].outside_domain);
        assert!(tr.records[10].outside_domain);
    }

    #[test]
    fn non_finite_values_stop_with_diagnostic() {
        let e = Manifold::new(ManifoldSpec::euclidean(1, 1e300)).unwrap();
        let f = Quadratic::new(e, nalgebra::DMatrix::from_element(1, 1, 1e300), Vector::zeros(1)).unwrap();
        let tr = run(&Point::from_slice(&[1.0]), &f, &RunConfig::rgd(1e10, 5)).unwrap();
        assert!(matches!(tr.diagnostic, Some(Error::NonFinite { .. })));
        assert!(tr.records.len() < 6);
    }

    #[test]
    fn option_parsing() {
        assert_eq!("ii".parse::<SirnagOption>().unwrap(), SirnagOption::II);
        assert_eq!("1".parse::<SirnagOption>().unwrap(), SirnagOption::I);
        assert!("III".parse::<SirnagOption>().is_err());
    }
}
