//! Actuator envelopes and friction.
//!
//! Forces are tensions (positive pulls the anchors together). Motor speed is
//! positive when the actuator contracts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActuatorSpec {
    /// Motor radians per output millimetre.
    pub ratio: f64,
    pub f_max_cont: f64,
    pub f_max_peak: f64,
    pub v_max_load: f64,
    pub v_max_peak_load: f64,
    pub pull_only: bool,
}

impl ActuatorSpec {
    /// Ball screw driving joint A.
    pub fn actuator_1() -> Self {
        Self { ratio: 0.63, f_max_cont: 402.0, f_max_peak: 1725.0, v_max_load: 0.72, v_max_peak_load: 0.4, pull_only: false }
    }

    /// Geared high-force output of the dual-speed belt actuator.
    pub fn actuator_2_hf() -> Self {
        Self { ratio: 16.7, f_max_cont: 3120.0, f_max_peak: 3120.0, v_max_load: 0.05, v_max_peak_load: 0.05, pull_only: true }
    }

    /// Direct high-speed output of the dual-speed belt actuator.
    pub fn actuator_2_hs() -> Self {
        Self { ratio: 0.45, f_max_cont: 579.0, f_max_peak: 981.0, v_max_load: 0.55, v_max_peak_load: 0.34, pull_only: true }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.ratio > 0.0) {
            return Err("ratio must be > 0".into());
        }
        if !(self.f_max_cont > 0.0 && self.f_max_cont <= self.f_max_peak) {
            return Err("need 0 < f_max_cont <= f_max_peak".into());
        }
        if !(self.v_max_load > 0.0 && self.v_max_peak_load > 0.0) {
            return Err("velocity limits must be > 0".into());
        }
        Ok(())
    }

    pub fn force_limit(&self, allow_peak: bool) -> f64 {
        if allow_peak {
            self.f_max_peak
        } else {
            self.f_max_cont
        }
    }

    /// Admissible force interval `[lo, hi]`.
    pub fn force_range(&self, allow_peak: bool) -> (f64, f64) {
        let lim = self.force_limit(allow_peak);
        if self.pull_only {
            (0.0, lim)
        } else {
            (-lim, lim)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionModel {
    /// Dry-friction magnitude, N.
    pub a: f64,
    /// tanh slope, s/rad.
    pub b: f64,
}

impl FrictionModel {
    pub const NONE: FrictionModel = FrictionModel { a: 0.0, b: 0.0 };

    pub fn actuator_1() -> Self {
        Self { a: 120.0, b: 0.02 }
    }

    pub fn actuator_2_hs() -> Self {
        Self { a: 60.0, b: 0.05 }
    }

    pub fn actuator_2_hf() -> Self {
        Self { a: 10.0, b: 0.01 }
    }
}

pub fn friction_force(model: &FrictionModel, motor_vel: f64) -> f64 {
    model.a * (model.b * motor_vel).tanh()
}

/// Command that delivers `desired_force` after friction at `motor_vel`.
/// Zero at rest: no stiction kick.
pub fn friction_compensation(model: &FrictionModel, desired_force: f64, motor_vel: f64) -> f64 {
    desired_force + friction_force(model, motor_vel)
}

pub fn motor_speed(spec: &ActuatorSpec, linear_vel: f64) -> f64 {
    spec.ratio * linear_vel * 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Clamped {
    pub force: f64,
    pub saturated: bool,
    pub velocity_exceeded: bool,
}

pub fn clamp_to_capability(spec: &ActuatorSpec, force_cmd: f64, out_vel: f64, allow_peak: bool) -> Clamped {
    let (lo, hi) = spec.force_range(allow_peak);
    let force = force_cmd.clamp(lo, hi);
    let v_lim = if force.abs() > spec.f_max_cont { spec.v_max_peak_load } else { spec.v_max_load };
    Clamped { force, saturated: force != force_cmd, velocity_exceeded: out_vel.abs() > v_lim }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpeedMode {
    HighSpeed,
    HighForce,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Configuration {
    Rehabilitation,
    Transfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualSpeedState {
    pub mode: SpeedMode,
    pub brake_1_engaged: bool,
}

impl DualSpeedState {
    pub fn rehabilitation() -> Self {
        Self { mode: SpeedMode::HighSpeed, brake_1_engaged: false }
    }

    pub fn transfer() -> Self {
        Self { mode: SpeedMode::HighForce, brake_1_engaged: true }
    }

    pub fn configuration(&self) -> Option<Configuration> {
        match (self.mode, self.brake_1_engaged) {
            (SpeedMode::HighSpeed, false) => Some(Configuration::Rehabilitation),
            (SpeedMode::HighForce, true) => Some(Configuration::Transfer),
            _ => None,
        }
    }
}

/// Joint speed below which the arm counts as at rest for a mode switch.
pub const REST_SPEED: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActuatorError {
    #[error("configuration switch refused while moving (|qd| = {0:.4} rad/s)")]
    SwitchWhileMoving(f64),
}

pub fn set_configuration(
    _state: DualSpeedState,
    target: Configuration,
    qd: [f64; 2],
) -> Result<DualSpeedState, ActuatorError> {
    let speed = qd[0].abs().max(qd[1].abs());
    if !(speed < REST_SPEED) {
        return Err(ActuatorError::SwitchWhileMoving(speed));
    }
    Ok(match target {
        Configuration::Rehabilitation => DualSpeedState::rehabilitation(),
        Configuration::Transfer => DualSpeedState::transfer(),
    })
}
