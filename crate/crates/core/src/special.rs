//! Ratios of trigonometric and hyperbolic functions that are 0/0 at the origin.
//!
//! Below `SERIES_CUTOFF` each ratio is evaluated from its four-term Taylor
//! expansion.

pub(crate) const SERIES_CUTOFF: f64 = 1e-6;

/// sin(θ)/θ
pub fn sinc(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0 - t2 * t2 * t2 / 5040.0
    } else {
        theta.sin() / theta
    }
}

/// sinh(θ)/θ
pub fn sinhc(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + t2 * t2 / 120.0 + t2 * t2 * t2 / 5040.0
    } else {
        theta.sinh() / theta
    }
}

/// θ/sin(θ)
pub fn theta_over_sin(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0 + 31.0 * t2 * t2 * t2 / 15120.0
    } else {
        theta / theta.sin()
    }
}

/// θ/sinh(θ)
pub fn theta_over_sinh(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + 7.0 * t2 * t2 / 360.0 - 31.0 * t2 * t2 * t2 / 15120.0
    } else {
        theta / theta.sinh()
    }
}

/// θ·cot(θ)
pub fn theta_cot(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 - t2 / 3.0 - t2 * t2 / 45.0 - 2.0 * t2 * t2 * t2 / 945.0
    } else {
        theta / theta.tan()
    }
}

/// θ·coth(θ)
pub fn theta_coth(theta: f64) -> f64 {
    if theta.abs() < SERIES_CUTOFF {
        let t2 = theta * theta;
        1.0 + t2 / 3.0 - t2 * t2 / 45.0 + 2.0 * t2 * t2 * t2 / 945.0
    } else {
        theta / theta.tanh()
    }
}
