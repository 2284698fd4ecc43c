use serde::{Deserialize, Serialize};
use sts_actuators::{clamp_to_capability, ActuatorSpec};
use sts_kinematics::{transfer_actuator_velocity, RobotGeometry, Vec2};

use crate::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    pub v_z_target: f64,
    pub q_a_locked: f64,
    pub direction: Direction,
    /// Proportional gain on belt-speed error, N·s/m.
    pub kp: f64,
    /// Integral gain, N/m.
    pub ki: f64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self { v_z_target: 0.03, q_a_locked: -0.60, direction: Direction::Up, kp: 2000.0, ki: 200000.0 }
    }
}

impl TransferConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        if !(self.v_z_target > 0.0) {
            return Err(ControlError::InvalidConfig("v_z_target must be > 0".into()));
        }
        if !(self.kp >= 0.0 && self.ki >= 0.0) {
            return Err(ControlError::InvalidConfig("speed gains must be >= 0".into()));
        }
        Ok(())
    }

    pub fn signed_vz(&self) -> f64 {
        match self.direction {
            Direction::Up => self.v_z_target,
            Direction::Down => -self.v_z_target,
        }
    }
}

/// PI belt-speed loop with a frozen integrator while the output saturates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SpeedPi {
    pub integral: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedCommand {
    pub f2: f64,
    pub v2_ref: f64,
    pub saturated: bool,
}

impl SpeedPi {
    /// Start with the integrator holding `tension`, for a bumpless start from rest.
    pub fn preloaded(tension: f64, ki: f64) -> Self {
        Self { integral: if ki > 0.0 { tension / ki } else { 0.0 } }
    }

    /// `v2_measured` is the belt length rate. Tension rises when the belt pays
    /// out faster than the reference, hence the error sign.
    pub fn step(
        &mut self,
        geom: &RobotGeometry,
        spec_hf: &ActuatorSpec,
        transfer: &TransferConfig,
        q_c: f64,
        v2_measured: f64,
        dt: f64,
    ) -> Result<SpeedCommand, ControlError> {
        self.step_at(geom, spec_hf, transfer, transfer.signed_vz(), q_c, v2_measured, dt)
    }

    /// Same loop with an explicit signed effector speed; zero holds position.
    #[allow(clippy::too_many_arguments)]
    pub fn step_at(
        &mut self,
        geom: &RobotGeometry,
        spec_hf: &ActuatorSpec,
        transfer: &TransferConfig,
        v_z: f64,
        q_c: f64,
        v2_measured: f64,
        dt: f64,
    ) -> Result<SpeedCommand, ControlError> {
        let v2_ref = transfer_actuator_velocity(geom, transfer.q_a_locked, q_c, v_z)?;
        let err = v2_measured - v2_ref;
        let raw = transfer.kp * err + transfer.ki * self.integral;
        let k = clamp_to_capability(spec_hf, raw, v2_measured, true);
        if !k.saturated {
            self.integral += err * dt;
        }
        Ok(SpeedCommand { f2: k.force, v2_ref, saturated: k.saturated })
    }
}

/// Arc of E about C with `q_a` fixed, sampled uniformly in `q_c`.
pub fn transfer_trajectory(geom: &RobotGeometry, q_a_locked: f64, q_c_range: Vec2, samples: usize) -> Vec<Vec2> {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let qc = q_c_range[0] + (q_c_range[1] - q_c_range[0]) * i as f64 / (n - 1) as f64;
            geom.effector_position(q_a_locked, qc)
        })
        .collect()
}
