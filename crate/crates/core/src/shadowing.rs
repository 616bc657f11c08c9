//! Shadowing of gradient flow by gradient descent.
//!
//! The time-`h` samples of the gradient flow form a pseudo-orbit of the
//! gradient-descent map `Ψ(x) = exp_x(-h grad f(x))`: each sample is within
//! `C h²` of `Ψ` applied to the previous one. When `Ψ` contracts with factor
//! `ρ < 1`, a true orbit stays within `C h² / (1 - ρ)` of the pseudo-orbit.
//! This module measures each ingredient and reports whether the inequality
//! holds on a concrete run.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::constants::{lambda, xi, zeta};
use crate::error::{Error, Result};
use crate::exec::{map_range, Execution};
use crate::manifold::Point;
use crate::objective::Objective;
use crate::reference::{gradient_flow, ReferenceTrajectory};

/// Reference refinement: the flow is integrated at `h / REFINEMENT`.
pub const REFINEMENT: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct DefectReport {
    pub h: f64,
    /// `d(y_{k+1}, Ψ(y_k))` for each consecutive pair of flow samples.
    pub defects: Vec<f64>,
    pub max_defect: f64,
    /// `max_k defect_k / h²`.
    pub fitted_c: f64,
}

/// Per-step defect of the flow samples under one gradient-descent step.
pub fn pseudo_orbit_defect(obj: &dyn Objective, flow: &ReferenceTrajectory, h: f64) -> Result<DefectReport> {
    let spacing = flow.sample_step();
    if (spacing - h).abs() > 1e-12 * h {
        return Err(Error::Contract(format!("flow is sampled every {spacing}, expected {h}")));
    }
    if flow.h_ref > h / REFINEMENT as f64 * (1.0 + 1e-9) {
        return Err(Error::Contract(format!(
            "flow step {} is coarser than h/{REFINEMENT}",
            flow.h_ref
        )));
    }
    let m = obj.manifold();
    let mut defects = Vec::with_capacity(flow.len().saturating_sub(1));
    for w in flow.points.windows(2) {
        let g = obj.gradient(&w[0])?;
        let step = m.exp(&w[0], &g.scaled(-h))?;
        defects.push(m.distance(&w[1], &step));
    }
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    Ok(DefectReport { h, defects, max_defect, fitted_c: max_defect / (h * h) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionEstimate {
    /// Largest observed `d(Ψ(x1), Ψ(x2)) / d(x1, x2)`.
    pub rho_hat: f64,
    pub pairs_used: usize,
    /// Pairs skipped because the two points coincide.
    pub skipped: usize,
}

/// Empirical Lipschitz constant of the gradient-descent map over `pairs`.
pub fn contraction_ratio(
    obj: &dyn Objective,
    h: f64,
    pairs: &[(Point, Point)],
    exec: Execution,
) -> Result<ContractionEstimate> {
    let m = obj.manifold();
    let ratios = map_range(exec, pairs.len(), |i| -> Result<Option<f64>> {
        let (a, b) = &pairs[i];
        let d = m.distance(a, b);
        if d <= 1e-12 {
            return Ok(None);
        }
        let pa = m.exp(a, &obj.gradient(a)?.scaled(-h))?;
        let pb = m.exp(b, &obj.gradient(b)?.scaled(-h))?;
        Ok(Some(m.distance(&pa, &pb) / d))
    });
    let mut rho_hat = 0.0f64;
    let mut used = 0;
    for r in ratios {
        if let Some(r) = r? {
            rho_hat = rho_hat.max(r);
            used += 1;
        }
    }
    Ok(ContractionEstimate { rho_hat, pairs_used: used, skipped: pairs.len() - used })
}

/// `sup_k d(x_k, y_k)` between a descent orbit and the flow samples.
pub fn shadowing_gap(obj: &dyn Objective, orbit: &[Point], flow_samples: &[Point]) -> Result<f64> {
    if orbit.len() != flow_samples.len() {
        return Err(Error::Contract(format!(
            "orbit has {} points but the flow has {} samples",
            orbit.len(),
            flow_samples.len()
        )));
    }
    if orbit.first() != flow_samples.first() {
        return Err(Error::Contract("orbit and flow must share their initial point".into()));
    }
    let m = obj.manifold();
    Ok(orbit.iter().zip(flow_samples).map(|(x, y)| m.distance(x, y)).fold(0.0, f64::max))
}

/// `n` pairs of independent points in the geodesic ball `B(center, radius)`.
pub fn random_pairs(
    m: &crate::manifold::Manifold,
    center: &Point,
    radius: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<(Point, Point)>> {
    map_range(Execution::Sequential, n, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        Ok((m.random_point_with(center, radius, &mut rng)?, m.random_point_with(center, radius, &mut rng)?))
    })
    .into_iter()
    .collect()
}

/// Everything measured for one `(objective, x0, h)` shadowing experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowingReport {
    pub manifold: String,
    pub curvature: f64,
    pub diameter: f64,
    pub h: f64,
    pub steps: usize,
    pub defects: DefectReport,
    pub contraction: ContractionEstimate,
    pub mu: Option<f64>,
    pub zeta: f64,
    pub lambda: f64,
    /// `λ(ζ - hµ)` when µ is known.
    pub xi: Option<f64>,
    /// `(λζ - 1)/(λh)`: the contraction condition is `µ` above this.
    pub precondition_threshold: f64,
    pub precondition_holds: Option<bool>,
    /// Largest gradient norm along the flow samples.
    pub ell: f64,
    pub sup_distance: f64,
    /// `C h² / (1 - ρ̂)` with the fitted `C`, when `ρ̂ < 1`.
    pub epsilon: Option<f64>,
    /// `C h² / (1 - ξ)` with the fitted `C`, when `ξ < 1`.
    pub epsilon_theory: Option<f64>,
    /// `sup_distance ≤ epsilon`; absent when the map is not contracting.
    pub verdict: Option<bool>,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.10e}"))
}

impl ShadowingReport {
    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "manifold: {}", self.manifold);
        let _ = writeln!(s, "curvature: {}", self.curvature);
        let _ = writeln!(s, "diameter: {}", self.diameter);
        let _ = writeln!(s, "h: {}", self.h);
        let _ = writeln!(s, "steps: {}", self.steps);
        let _ = writeln!(s, "max_defect: {:.10e}", self.defects.max_defect);
        let _ = writeln!(s, "fitted_C: {:.10e}", self.defects.fitted_c);
        let _ = writeln!(s, "C_source: empirical fit (max defect / h^2), not an a-priori constant");
        let _ = writeln!(s, "rho_hat: {:.10e}", self.contraction.rho_hat);
        let _ = writeln!(s, "pairs_used: {}", self.contraction.pairs_used);
        let _ = writeln!(s, "mu: {}", opt(self.mu));
        let _ = writeln!(s, "zeta: {:.10e}", self.zeta);
        let _ = writeln!(s, "lambda: {:.10e}", self.lambda);
        let _ = writeln!(s, "xi: {}", opt(self.xi));
        let _ = writeln!(s, "precondition: mu > (lambda*zeta - 1)/(lambda*h) = {:.10e}", self.precondition_threshold);
        let holds = match self.precondition_holds {
            Some(true) => "true",
            Some(false) => "false",
            None => "unknown (no mu)",
        };
        let _ = writeln!(s, "precondition_holds: {holds}");
        let _ = writeln!(s, "ell: {:.10e}", self.ell);
        let _ = writeln!(s, "sup_distance: {:.10e}", self.sup_distance);
        let _ = writeln!(s, "epsilon: {}", opt(self.epsilon));
        let _ = writeln!(s, "epsilon_theory: {}", opt(self.epsilon_theory));
        let verdict = match self.verdict {
            Some(true) => "shadowed",
            Some(false) => "not shadowed",
            None => "no verdict (not contracting)",
        };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }
}

/// Runs the full comparison: flow at `h/REFINEMENT` for `steps·h` time
/// units, a gradient-descent orbit with step `h`, defects, contraction over
/// the pairs `(x_k, y_k)` and `(y_k, y_{k+1})`, and the theorem quantities.
pub fn analyze(obj: &dyn Objective, x0: &Point, h: f64, steps: usize, exec: Execution) -> Result<ShadowingReport> {
    if steps == 0 {
        return Err(Error::Contract("shadowing needs at least one step".into()));
    }
    let m = obj.manifold();
    let h_ref = h / REFINEMENT as f64;
    let flow = gradient_flow(obj, x0, h_ref, h * steps as f64, REFINEMENT)?;
    let defects = pseudo_orbit_defect(obj, &flow, h)?;

    let mut orbit = Vec::with_capacity(steps + 1);
    orbit.push(x0.clone());
    for k in 0..steps {
        let next = crate::optimizer::rgd_step(obj, &orbit[k], h)?;
        orbit.push(next);
    }
    let sup_distance = shadowing_gap(obj, &orbit, &flow.points)?;

    let mut pairs: Vec<(Point, Point)> = orbit.iter().cloned().zip(flow.points.iter().cloned()).collect();
    pairs.extend(flow.points.windows(2).map(|w| (w[0].clone(), w[1].clone())));
    let contraction = contraction_ratio(obj, h, &pairs, exec)?;

    let k = m.curvature();
    let d = m.diameter();
    let z = zeta(k, d);
    let l = lambda(k, d);
    let mu = obj.metadata().mu;
    let xi_v = mu.map(|mu| xi(k, d, h, mu));
    let threshold = (l * z - 1.0) / (l * h);
    let precondition_holds = mu.map(|mu| mu > threshold);
    let c_h2 = defects.max_defect;
    let epsilon = (contraction.rho_hat < 1.0).then(|| c_h2 / (1.0 - contraction.rho_hat));
    let epsilon_theory = xi_v.filter(|&x| x < 1.0).map(|x| c_h2 / (1.0 - x));
    let verdict = match (precondition_holds, epsilon) {
        (Some(true), Some(eps)) => Some(sup_distance <= eps),
        _ => None,
    };
    let ell = flow.velocities.iter().map(|v| m.norm(v)).fold(0.0, f64::max);

    Ok(ShadowingReport {
        manifold: m.kind().name().to_string(),
        curvature: k,
        diameter: d,
        h,
        steps,
        defects,
        contraction,
        mu,
        zeta: z,
        lambda: l,
        xi: xi_v,
        precondition_threshold: threshold,
        precondition_holds,
        ell,
        sup_distance,
        epsilon,
        epsilon_theory,
        verdict,
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
