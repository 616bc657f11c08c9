//! The three figure experiments: SIRNAG vs RGD on hyperbolic space, the
//! leading-eigenvector problem on a high-dimensional sphere, and step-size
//! convergence of SIRNAG to the continuous-time trajectory.

use nalgebra::DMatrix;

use crate::constants::{rate_bound, zeta, Regime};
use crate::error::{Error, Result};
use crate::exec::{map_range, map_slice, Execution};
use crate::manifold::{Manifold, ManifoldSpec};
use crate::objective::{half_squared_distance, ill_conditioned, Objective, Rayleigh};
use crate::optimizer::{run, RunConfig, SirnagOption, Trajectory};
use crate::reference::ode_reference;
use crate::shadowing::loglog_slope;

/// Largest matrix the eigenvector experiment accepts.
pub const MAX_MATRIX_SIZE: usize = 20_000;

/// Hyperbolic rate experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Config {
    pub dim: usize,
    pub curvature: f64,
    pub diameter: f64,
    /// `d(x0, p)`.
    pub initial_distance: f64,
    pub h: f64,
    pub steps: usize,
    pub seed: u64,
}

impl Default for Fig1Config {
    fn default() -> Self {
        Self { dim: 2, curvature: -1.0, diameter: 1.0, initial_distance: 0.5, h: 0.1, steps: 1000, seed: 7 }
    }
}

impl Fig1Config {
    pub fn validate(&self) -> Result<()> {
        ManifoldSpec::hyperboloid(self.dim, self.curvature, self.diameter).validate()?;
        if !(self.h > 0.0) || !(self.initial_distance >= 0.0 && self.initial_distance <= self.diameter) {
            return Err(Error::Contract("need h > 0 and 0 ≤ initial distance ≤ D".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Row {
    pub k: usize,
    pub t: f64,
    pub method: &'static str,
    pub gap: f64,
    /// Accelerated convex bound at `t` (absent at `t = 0`).
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Output {
    pub rows: Vec<Fig1Row>,
    /// `d(x0, x*)`.
    pub r0: f64,
    pub zeta: f64,
    pub gap0: f64,
}

pub const FIG1_METHODS: [&str; 3] = ["sirnag_opt1", "sirnag_opt2", "rgd"];

pub fn fig1(cfg: &Fig1Config, exec: Execution) -> Result<Fig1Output> {
    cfg.validate()?;
    let m = Manifold::new(ManifoldSpec::hyperboloid(cfg.dim, cfg.curvature, cfg.diameter))?;
    let p = m.origin();
    let f = half_squared_distance(&m, &p)?;
    let x0 = m.point_at_distance(&p, cfg.initial_distance, cfg.seed)?;
    let z = zeta(m.curvature(), m.diameter());
    let r0 = m.distance(&x0, &p);
    let gap0 = f.value(&x0);
    let configs = [
        RunConfig::sirnag(Regime::Convex, cfg.h, cfg.steps, SirnagOption::I),
        RunConfig::sirnag(Regime::Convex, cfg.h, cfg.steps, SirnagOption::II),
        RunConfig::rgd(cfg.h * cfg.h, cfg.steps),
    ];
    let trajs: Vec<Result<Trajectory>> = map_range(exec, 3, |i| run(&x0, &f, &configs[i]));
    let mut rows = Vec::with_capacity(3 * (cfg.steps + 1));
    for (method, tr) in FIG1_METHODS.iter().zip(trajs) {
        let tr = tr?;
        if let Some(e) = tr.diagnostic {
            return Err(e);
        }
        for r in &tr.records {
            let t = r.k as f64 * cfg.h;
            rows.push(Fig1Row {
                k: r.k,
                t,
                method,
                gap: r.gap.unwrap_or(f64::NAN),
                bound: rate_bound(Regime::Convex, t, r0, z, gap0).ok(),
            });
        }
    }
    Ok(Fig1Output { rows, r0, zeta: z, gap0 })
}

impl Fig1Output {
    pub fn gaps(&self, method: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.method == method).map(|r| r.gap).collect()
    }

    /// First iteration at which `method` is below RGD, and whether it stays
    /// below from there on.
    pub fn below_rgd(&self, method: &str) -> (Option<usize>, bool) {
        let a = self.gaps(method);
        let b = self.gaps("rgd");
        let first = (1..a.len().min(b.len())).find(|&k| a[k] < b[k]);
        let stays = first.is_some_and(|k0| (k0..a.len().min(b.len())).all(|k| a[k] < b[k]));
        (first, stays)
    }

    /// Largest `gap / bound` over rows of `method` with `t ≥ t_min`.
    pub fn worst_bound_ratio(&self, method: &str, t_min: f64) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.t >= t_min)
            .filter_map(|r| r.bound.map(|b| r.gap / b))
            .fold(0.0, f64::max)
    }
}

/// Leading-eigenvector experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Config {
    pub m: usize,
    pub cond: f64,
    pub steps: usize,
    pub seed: u64,
    /// Geodesic distance of `x0` from the leading eigenvector.
    pub initial_distance: f64,
    /// Use this matrix instead of generating one.
    pub matrix: Option<DMatrix<f64>>,
}

impl Default for Fig2Config {
    fn default() -> Self {
        Self { m: 500, cond: 1e4, steps: 5000, seed: 7, initial_distance: 1.0, matrix: None }
    }
}

impl Fig2Config {
    pub fn paper_scale() -> Self {
        Self { m: 5000, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Row {
    pub k: usize,
    pub method: &'static str,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    pub rows: Vec<Fig2Row>,
    pub lambda_max: f64,
    pub r0: f64,
    pub eta: f64,
    pub h: f64,
    pub matrix: DMatrix<f64>,
}

pub const FIG2_METHODS: [&str; 2] = ["sirnag", "rgd"];

pub fn fig2(cfg: &Fig2Config, exec: Execution) -> Result<Fig2Output> {
    let size = cfg.matrix.as_ref().map_or(cfg.m, |q| q.nrows());
    if size > MAX_MATRIX_SIZE {
        return Err(Error::Contract(format!("matrix size {size} exceeds the limit of {MAX_MATRIX_SIZE}")));
    }
    if size < 2 {
        return Err(Error::Contract(format!("matrix size must be at least 2, got {size}")));
    }
    let sphere = Manifold::new(ManifoldSpec::sphere(size - 1, 1.0, 3.0))?;
    let obj = match &cfg.matrix {
        Some(q) => Rayleigh::new(sphere, q.clone())?,
        None => {
            let ic = ill_conditioned(cfg.m, cfg.cond, cfg.seed)?;
            Rayleigh::with_leading(sphere, ic.matrix, ic.eigenvalues[0], ic.leading)?
        }
    };
    let m = obj.manifold();
    let xs = obj.metadata().minimizer.clone().expect("Rayleigh objective knows its minimiser");
    let x0 = m.point_at_distance(&xs, cfg.initial_distance, cfg.seed ^ 0x9e37_79b9)?;
    let lambda_max = obj.lambda_max();
    let eta = 1.0 / lambda_max;
    let h = eta.sqrt();
    let configs = [RunConfig::sirnag(Regime::Convex, h, cfg.steps, SirnagOption::I), RunConfig::rgd(eta, cfg.steps)];
    let trajs: Vec<Result<Trajectory>> = map_range(exec, 2, |i| run(&x0, &obj, &configs[i]));
    let mut rows = Vec::with_capacity(2 * (cfg.steps + 1));
    for (method, tr) in FIG2_METHODS.iter().zip(trajs) {
        let tr = tr?;
        if let Some(e) = tr.diagnostic {
            return Err(e);
        }
        rows.extend(tr.records.iter().map(|r| Fig2Row { k: r.k, method, gap: r.gap.unwrap_or(f64::NAN) }));
    }
    let r0 = m.distance(&x0, &xs);
    Ok(Fig2Output { rows, lambda_max, r0, eta, h, matrix: obj.matrix().clone() })
}

impl Fig2Output {
    /// Least-squares log-log slope of the gap over `k ∈ [k_lo, k_hi]`.
    pub fn slope(&self, method: &str, k_lo: usize, k_hi: usize) -> f64 {
        let (ks, gs): (Vec<f64>, Vec<f64>) = self
            .rows
            .iter()
            .filter(|r| r.method == method && r.k >= k_lo && r.k <= k_hi && r.gap > 0.0)
            .map(|r| (r.k as f64, r.gap))
            .unzip();
        loglog_slope(&ks, &gs)
    }
}

/// Step-size convergence experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Config {
    pub hs: Vec<f64>,
    pub h_ref: f64,
    pub horizon: f64,
    pub fig1: Fig1Config,
}

impl Default for Fig3Config {
    fn default() -> Self {
        Self { hs: vec![0.2, 0.1, 0.05, 0.025], h_ref: 1e-4, horizon: 10.0, fig1: Fig1Config::default() }
    }
}

impl Fig3Config {
    pub fn paper_scale() -> Self {
        Self { h_ref: 1e-5, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Row {
    pub h: f64,
    pub k: usize,
    pub t: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Output {
    pub rows: Vec<Fig3Row>,
    /// `(h, peak error)` in the order of the configured step sizes.
    pub peaks: Vec<(f64, f64)>,
}

impl Fig3Output {
    /// `peak(h_{i+1}) / peak(h_i)` for consecutive step sizes.
    pub fn ratios(&self) -> Vec<f64> {
        self.peaks.windows(2).map(|w| w[1].1 / w[0].1).collect()
    }
}

fn ratio_to(h: f64, h_ref: f64) -> Result<usize> {
    let r = (h / h_ref).round();
    if r < 1.0 || (r * h_ref - h).abs() > 1e-9 * h {
        return Err(Error::Contract(format!("step {h} is not a multiple of the reference step {h_ref}")));
    }
    Ok(r as usize)
}

pub fn fig3(cfg: &Fig3Config, exec: Execution) -> Result<Fig3Output> {
    let c = &cfg.fig1;
    c.validate()?;
    if cfg.hs.is_empty() {
        return Err(Error::Contract("need at least one step size".into()));
    }
    let m = Manifold::new(ManifoldSpec::hyperboloid(c.dim, c.curvature, c.diameter))?;
    let p = m.origin();
    let f = half_squared_distance(&m, &p)?;
    let x0 = m.point_at_distance(&p, c.initial_distance, c.seed)?;

    let ratios: Vec<usize> = cfg.hs.iter().map(|&h| ratio_to(h, cfg.h_ref)).collect::<Result<_>>()?;
    let stride = ratios.iter().copied().min().unwrap_or(1);
    if ratios.iter().any(|r| r % stride != 0) {
        return Err(Error::Contract("step sizes must be multiples of the smallest one".into()));
    }
    let reference = ode_reference(&f, &x0, Regime::Convex, cfg.h_ref, cfg.horizon, stride)?;

    let per_h = map_slice(exec, &cfg.hs, |&h| -> Result<(Vec<Fig3Row>, f64)> {
        let steps = (cfg.horizon / h).round() as usize;
        let tr = run(&x0, &f, &RunConfig::sirnag(Regime::Convex, h, steps, SirnagOption::I).with_points())?;
        if let Some(e) = tr.diagnostic {
            return Err(e);
        }
        let every = ratio_to(h, cfg.h_ref)? / stride;
        let mut rows = Vec::with_capacity(steps + 1);
        let mut peak = 0.0f64;
        for (k, x) in tr.points.iter().enumerate() {
            let err = m.distance(x, &reference.points[k * every]);
            peak = peak.max(err);
            rows.push(Fig3Row { h, k, t: k as f64 * h, error: err });
        }
        Ok((rows, peak))
    });
    let mut rows = Vec::new();
    let mut peaks = Vec::new();
    for (res, &h) in per_h.into_iter().zip(&cfg.hs) {
        let (r, peak) = res?;
        rows.extend(r);
        peaks.push((h, peak));
    }
    Ok(Fig3Output { rows, peaks })
}
