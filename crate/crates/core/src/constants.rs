//! Curvature- and diameter-dependent constants, friction coefficients,
//! momentum schedules and the continuous-time rate bounds.
//!
//! Two flavours of the Hessian-comparison constants appear: the pointwise
//! ones evaluated at a distance `d` ([`delta`], [`zeta`] called with `d`)
//! and the domain-wide ones evaluated at the working diameter `D`. The
//! functions are the same; only the argument differs.

use crate::error::{Error, Result};
use crate::special::{sinhc, theta_cot, theta_coth};

/// Convexity class of the objective, selecting friction and schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    Convex,
    WeaklyQuasiConvex { alpha: f64 },
    StronglyConvex { mu: f64 },
}

impl Regime {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Regime::Convex => Ok(()),
            Regime::WeaklyQuasiConvex { alpha } if alpha > 0.0 && alpha.is_finite() => Ok(()),
            Regime::StronglyConvex { mu } if mu > 0.0 && mu.is_finite() => Ok(()),
            Regime::WeaklyQuasiConvex { alpha } => {
                Err(Error::Contract(format!("weak-quasi-convexity constant must be > 0, got {alpha}")))
            }
            Regime::StronglyConvex { mu } => {
                Err(Error::Contract(format!("strong-convexity constant must be > 0, got {mu}")))
            }
        }
    }

    /// α for the time-varying schedules (1 in the convex case).
    fn alpha(&self) -> f64 {
        match *self {
            Regime::WeaklyQuasiConvex { alpha } => alpha,
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Convex => "convex",
            Regime::WeaklyQuasiConvex { .. } => "wqc",
            Regime::StronglyConvex { .. } => "sc",
        }
    }
}

/// `√(-K_min)·D·coth(√(-K_min)·D)` for negative lower curvature, else 1.
pub fn zeta(k_min: f64, d: f64) -> f64 {
    if k_min < 0.0 {
        theta_coth((-k_min).sqrt() * d)
    } else {
        1.0
    }
}

/// `√K_max·d·cot(√K_max·d)` for positive upper curvature, else 1.
pub fn delta(k_max: f64, d: f64) -> Result<f64> {
    if k_max <= 0.0 {
        return Ok(1.0);
    }
    let theta = k_max.sqrt() * d;
    if theta >= std::f64::consts::PI {
        return Err(Error::Domain(format!(
            "delta needs d < π/√K_max = {}, got d = {d}",
            std::f64::consts::PI / k_max.sqrt()
        )));
    }
    if theta == std::f64::consts::FRAC_PI_2 {
        return Ok(0.0);
    }
    Ok(theta_cot(theta))
}

/// `sinh(√-K·D)/(√-K·D)` for negative curvature, else 1.
pub fn lambda(k: f64, d: f64) -> f64 {
    if k < 0.0 {
        sinhc((-k).sqrt() * d)
    } else {
        1.0
    }
}

/// Lipschitz factor of one gradient-descent step: `λ(ζ - hµ)`.
pub fn xi(k: f64, d: f64, h: f64, mu: f64) -> f64 {
    lambda(k, d) * (zeta(k, d) - h * mu)
}

/// The three domain-wide constants for a constant-curvature space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSet {
    pub zeta: f64,
    pub delta: f64,
    pub lambda: f64,
}

impl ConstantSet {
    /// Constants of a constant-curvature space on a domain of diameter `d`.
    ///
    /// `delta` is evaluated at the diameter; on the sphere it is only
    /// meaningful when `d < π/√K`.
    pub fn for_curvature(k: f64, d: f64) -> Result<Self> {
        Ok(Self { zeta: zeta(k, d), delta: delta(k, d)?, lambda: lambda(k, d) })
    }
}

/// Friction `c(t)` multiplying `Ẋ` in the accelerated ODE.
pub fn friction_coefficient(regime: Regime, zeta: f64, t: f64) -> Result<f64> {
    match regime {
        Regime::StronglyConvex { mu } => Ok((1.0 / zeta.sqrt() + zeta.sqrt()) * mu.sqrt()),
        _ if !(t > 0.0) => {
            Err(Error::Domain(format!("time-varying friction needs t > 0, got {t}")))
        }
        r => Ok((1.0 + 2.0 * zeta / r.alpha()) / t),
    }
}

/// Momentum coefficient `β_k` of the discrete integrator.
///
/// `β_0 = 0` in the time-varying regimes: the initial velocity is zero, so
/// the first step is a pure gradient step whatever β_0 is.
pub fn beta_schedule(regime: Regime, k: usize, h: f64, zeta: f64) -> f64 {
    match regime {
        Regime::StronglyConvex { mu } => 1.0 - h * (1.0 + zeta) * mu.sqrt() / zeta.sqrt(),
        _ if k == 0 => 0.0,
        r => (k as f64 - 1.0) / (k as f64 + 2.0 * zeta / r.alpha()),
    }
}

/// True when the constant strongly-convex momentum lies in (0, 1).
pub fn schedule_in_range(regime: Regime, h: f64, zeta: f64) -> bool {
    let b = beta_schedule(regime, 1, h, zeta);
    match regime {
        Regime::StronglyConvex { .. } => b > 0.0 && b < 1.0,
        _ => true,
    }
}

/// Continuous-time suboptimality bound of the accelerated flow at time `t`,
/// where `r0 = ‖log_{x0}(x*)‖` and `gap0 = f(x0) - f*`.
pub fn rate_bound(regime: Regime, t: f64, r0: f64, zeta: f64, gap0: f64) -> Result<f64> {
    match regime {
        Regime::StronglyConvex { mu } => {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("rate bound needs t ≥ 0, got {t}")));
            }
            Ok((0.5 * mu * r0 * r0 + gap0) * (-(mu / zeta).sqrt() * t).exp())
        }
        _ if !(t > 0.0) => Err(Error::Domain(format!("rate bound needs t > 0, got {t}"))),
        r => {
            let a = r.alpha();
            Ok(2.0 * zeta * r0 * r0 / (a * a * t * t))
        }
    }
}

/// Suboptimality bound of the plain gradient flow `Ẋ = -grad f(X)`.
pub fn gradient_flow_bound(regime: Regime, t: f64, r0: f64, gap0: f64) -> Result<f64> {
    match regime {
        Regime::StronglyConvex { mu } => {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("rate bound needs t ≥ 0, got {t}")));
            }
            Ok((-2.0 * mu * t).exp() * gap0)
        }
        _ if !(t > 0.0) => Err(Error::Domain(format!("rate bound needs t > 0, got {t}"))),
        r => Ok(r0 * r0 / (2.0 * r.alpha() * t)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    // High-precision reference values (50-digit evaluation, rounded).
    const COTH_1: f64 = 1.313_035_285_499_331_3;
    const SINH_1: f64 = 1.175_201_193_643_801_4;
    const XI_REF: f64 = 1.425_560_515_450_863_6;

    #[test]
    fn zeta_values() {
        assert!((zeta(-1.0, 1.0) - COTH_1).abs() < 1e-15);
        assert!((zeta(-1.0, 1.0) - 1.3130).abs() < 5e-5);
        assert!((zeta(-4.0, 0.5) - COTH_1).abs() < 1e-15);
        assert_eq!(zeta(0.0, 3.0), 1.0);
        assert_eq!(zeta(2.0, 3.0), 1.0);
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(-1.0, 5.0).unwrap(), 1.0);
        assert_eq!(delta(0.0, 5.0).unwrap(), 1.0);
        assert!(delta(1.0, FRAC_PI_2).unwrap().abs() < 1e-15);
        assert!((delta(1.0, 1e-8).unwrap() - 1.0).abs() < 1e-12);
        assert!(delta(1.0, PI).is_err());
        assert!(delta(4.0, FRAC_PI_2).is_err());
        // Sign pattern across the quarter and three-quarter ball.
        assert!(delta(1.0, FRAC_PI_4).unwrap() > 0.0);
        assert!(delta(1.0, 3.0 * FRAC_PI_4).unwrap() < 0.0);
    }

    #[test]
    fn lambda_and_xi_values() {
        assert_eq!(lambda(0.0, 2.0), 1.0);
        assert_eq!(lambda(1.0, 2.0), 1.0);
        assert!((lambda(-1.0, 1.0) - SINH_1).abs() < 1e-15);
        assert!((lambda(-1.0, 1e-9) - 1.0).abs() < 1e-15);
        assert!((xi(0.0, 1.0, 0.1, 2.0) - 0.8).abs() < 1e-15);
        assert!((xi(1.0, 1.0, 0.1, 2.0) - 0.8).abs() < 1e-15);
        assert!((xi(-1.0, 1.0, 0.0, 1.0) - SINH_1 * COTH_1).abs() < 1e-15);
        assert!((xi(-1.0, 1.0, 0.1, 1.0) - XI_REF).abs() < 1e-14);
    }

    #[test]
    fn friction_values() {
        assert_eq!(friction_coefficient(Regime::Convex, 1.0, 2.0).unwrap(), 1.5);
        assert_eq!(friction_coefficient(Regime::StronglyConvex { mu: 1.0 }, 1.0, 0.0).unwrap(), 2.0);
        assert_eq!(
            friction_coefficient(Regime::WeaklyQuasiConvex { alpha: 2.0 }, 1.0, 1.0).unwrap(),
            2.0
        );
        assert!(friction_coefficient(Regime::Convex, 1.0, 0.0).is_err());
        // √ζ + 1/√ζ ≥ 2 with equality only at ζ = 1.
        assert!(friction_coefficient(Regime::StronglyConvex { mu: 1.0 }, 1.3, 1.0).unwrap() > 2.0);
    }

    #[test]
    fn schedule_values() {
        assert_eq!(beta_schedule(Regime::Convex, 4, 0.1, 1.0), 0.5);
        assert!((beta_schedule(Regime::StronglyConvex { mu: 1.0 }, 7, 0.1, 1.0) - 0.8).abs() < 1e-15);
        assert_eq!(beta_schedule(Regime::WeaklyQuasiConvex { alpha: 2.0 }, 1, 0.1, COTH_1), 0.0);
        assert_eq!(beta_schedule(Regime::Convex, 0, 0.1, COTH_1), 0.0);
        assert!(!schedule_in_range(Regime::StronglyConvex { mu: 1.0 }, 1.0, 1.0));
        assert!(schedule_in_range(Regime::StronglyConvex { mu: 1.0 }, 0.1, 1.0));
    }

    #[test]
    fn rate_bound_values() {
        assert_eq!(rate_bound(Regime::Convex, 2.0, 1.0, 1.0, 0.0).unwrap(), 0.5);
        let sc = Regime::StronglyConvex { mu: 2.0 };
        assert_eq!(rate_bound(sc, 0.0, 1.0, 1.3, 0.25).unwrap(), 1.25);
        let c = rate_bound(Regime::Convex, 3.0, 0.7, 1.2, 0.0).unwrap();
        let w = rate_bound(Regime::WeaklyQuasiConvex { alpha: 2.0 }, 3.0, 0.7, 1.2, 0.0).unwrap();
        assert!((c / w - 4.0).abs() < 1e-14);
        assert!(rate_bound(Regime::Convex, 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(rate_bound(sc, -1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn euclidean_reduction() {
        let c = ConstantSet::for_curvature(0.0, 10.0).unwrap();
        assert_eq!(c, ConstantSet { zeta: 1.0, delta: 1.0, lambda: 1.0 });
        for k in 1..50 {
            assert_eq!(
                beta_schedule(Regime::Convex, k, 0.1, 1.0),
                (k as f64 - 1.0) / (k as f64 + 2.0)
            );
        }
    }

    #[test]
    fn regime_validation() {
        assert!(Regime::WeaklyQuasiConvex { alpha: 0.0 }.validate().is_err());
        assert!(Regime::StronglyConvex { mu: -1.0 }.validate().is_err());
        assert!(Regime::Convex.validate().is_ok());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn zeta_lambda_at_least_one(k in -10.0f64..10.0, d in 1e-6f64..5.0) {
                prop_assert!(zeta(k, d) >= 1.0);
                prop_assert!(lambda(k, d) >= 1.0);
            }

            #[test]
            fn zeta_lambda_tend_to_one(k in -10.0f64..0.0) {
                prop_assert!((zeta(k, 1e-9) - 1.0).abs() < 1e-12);
                prop_assert!((lambda(k, 1e-9) - 1.0).abs() < 1e-12);
            }

            #[test]
            fn delta_decreasing_on_sphere(k in 0.1f64..4.0, a in 0.0f64..0.999, b in 0.0f64..0.999) {
                let lim = std::f64::consts::PI / k.sqrt();
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assume!(hi - lo > 1e-6);
                prop_assert!(delta(k, hi * lim).unwrap() < delta(k, lo * lim).unwrap());
            }

            #[test]
            fn delta_sign_pattern(k in 0.1f64..4.0, frac in 0.001f64..0.999) {
                let lim = std::f64::consts::PI / k.sqrt();
                let d = frac * lim;
                let v = delta(k, d).unwrap();
                if frac < 0.4999 { prop_assert!(v > 0.0); }
                if frac > 0.5001 { prop_assert!(v < 0.0); }
            }
        }
    }
}
