//! Pure pieces of the decision process: kinematics, objective, theoretical
//! heading and the composite reward.

use std::f64::consts::{FRAC_PI_4, PI};

use super::{NavAction, RewardConfig, VehiclePose};
use crate::field::{wrap_pi, GradientVector};

/// Squared-unit floor for the objective's per-parameter denominators.
pub const DENOMINATOR_FLOOR: f64 = 1e-12;

/// Below this `|det|` (squared gradient units) two gradients count as parallel.
pub const PARALLEL_EPS: f64 = 1e-18;

/// Heading rotates by the yaw first, then the vehicle advances `distance`
/// along the new heading.
pub fn motion_update(pose: &VehiclePose, action: &NavAction) -> VehiclePose {
    let theta = pose.theta + action.yaw;
    VehiclePose {
        x: pose.x + action.distance * theta.cos(),
        y: pose.y + action.distance * theta.sin(),
        theta,
        step_index: pose.step_index + 1,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub value: f64,
    /// Some denominator was raised to [`DENOMINATOR_FLOOR`].
    pub floored: bool,
}

/// Normalised objective over `(D, I, B_H)` triples:
/// `Σ (target − current)² / (target − initial)²`.
pub fn objective(current: &[f64; 3], target: &[f64; 3], initial: &[f64; 3]) -> Objective {
    let mut value = 0.0;
    let mut floored = false;
    for k in 0..3 {
        let diff = |a: f64, b: f64| if k == 0 { wrap_pi(a - b) } else { a - b };
        let num = diff(target[k], current[k]).powi(2);
        let mut den = diff(target[k], initial[k]).powi(2);
        if den < DENOMINATOR_FLOOR {
            den = DENOMINATOR_FLOOR;
            floored = true;
        }
        value += num / den;
    }
    Objective { value, floored }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Heading {
    Valid(f64),
    /// Current equals target in both parameters; the heading is taken as 0.
    AtTarget,
    /// The two gradients are (numerically) parallel; no unique heading.
    Parallel,
}

impl Heading {
    pub fn value_or(self, fallback: f64) -> f64 {
        match self {
            Heading::Valid(h) => h,
            Heading::AtTarget => 0.0,
            Heading::Parallel => fallback,
        }
    }
}

/// Parallel-approach heading for two parameters with values `current`,
/// targets `target` and planar gradients `grads`.
///
/// Both `atan2` arguments carry the sign of the gradient determinant, which
/// makes the result point at the target (rather than away from it) whatever
/// the orientation of the gradient pair.
pub fn theoretical_heading(
    current: [f64; 2],
    target: [f64; 2],
    grads: [GradientVector; 2],
) -> Heading {
    let [g1, g2] = grads;
    let det = g1.gx * g2.gy - g1.gy * g2.gx;
    if !(det.abs() >= PARALLEL_EPS) {
        return Heading::Parallel;
    }
    let d1 = current[0] - target[0];
    let d2 = current[1] - target[1];
    let s = det.signum();
    let num = s * (d1 * g2.gx - d2 * g1.gx);
    let den = s * (d2 * g1.gy - d1 * g2.gy);
    if num == 0.0 && den == 0.0 {
        return Heading::AtTarget;
    }
    Heading::Valid(num.atan2(den))
}

/// `|a − b|` folded into `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs().min(PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RewardBreakdown {
    pub destination: f64,
    pub proximity: f64,
    pub alignment: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.destination + self.proximity + self.alignment
    }
}

/// Destination + proximity (with late-episode regression penalty) +
/// alignment with the theoretical heading.
pub fn compute_reward(
    prev_f: f64,
    cur_f: f64,
    pose_after: &VehiclePose,
    lambda_prime: f64,
    config: &RewardConfig,
    reached: bool,
) -> RewardBreakdown {
    let destination = if reached { config.zeta1 } else { 0.0 };
    let delta = cur_f - prev_f;
    let mut proximity = -config.zeta2 * delta;
    let n_max = config.n_max as f64;
    let step = pose_after.step_index as f64;
    if config.decay_enabled && step > 0.5 * n_max {
        proximity -= config.zeta2 * delta.max(0.0) * (step / n_max);
    }
    let alignment =
        config.zeta3 * (FRAC_PI_4 - angular_distance(pose_after.theta, lambda_prime));
    RewardBreakdown {
        destination,
        proximity,
        alignment,
    }
}
