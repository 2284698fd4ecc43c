use sts_actuators::{clamp_to_capability, friction_compensation, ActuatorSpec, FrictionModel};
use sts_kinematics::{
    effector_force_to_actuator_forces, forward_kinematics, gravity_torques_with, joint_torque_to_actuator_forces,
    GravityModel, JointState, LinkMassModel, RobotGeometry, Vec2,
};

use crate::{desired_force_field, AssistMode, AssistModeConfig, ControlError};

/// Controller-side model of the rehabilitation configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceControllerParams {
    pub geom: RobotGeometry,
    pub masses: LinkMassModel,
    pub spec_1: ActuatorSpec,
    pub spec_2: ActuatorSpec,
    pub friction_1: FrictionModel,
    pub friction_2: FrictionModel,
    pub allow_peak: bool,
    pub gravity_model: GravityModel,
}

impl Default for ForceControllerParams {
    fn default() -> Self {
        Self {
            geom: RobotGeometry::default(),
            masses: LinkMassModel::default(),
            spec_1: ActuatorSpec::actuator_1(),
            spec_2: ActuatorSpec::actuator_2_hs(),
            friction_1: FrictionModel::actuator_1(),
            friction_2: FrictionModel::actuator_2_hs(),
            allow_peak: false,
            gravity_model: GravityModel::FirstPrinciples,
        }
    }
}

/// Intermediate values of one controller evaluation, kept for logging.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PipelineStages {
    /// Force on the user requested by the mode.
    pub f_desired: Vec2,
    /// Actuator tensions producing `f_desired`.
    pub mapped: Vec2,
    pub mass_comp: Vec2,
    pub friction_comp: Vec2,
    pub pre_clamp: Vec2,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ForceCommand {
    pub f1: f64,
    pub f2: f64,
    pub saturated_1: bool,
    pub saturated_2: bool,
    pub velocity_exceeded_1: bool,
    pub velocity_exceeded_2: bool,
    pub stages: PipelineStages,
}

/// Desired field, then mass compensation, then the static map to actuator
/// tensions, then friction compensation at the measured motor speeds, then the
/// envelope clamp. `motor_vels` are positive in contraction.
pub fn force_controller_step(
    params: &ForceControllerParams,
    config: &AssistModeConfig,
    q: &JointState,
    motor_vels: Vec2,
) -> Result<ForceCommand, ControlError> {
    if config.mode == AssistMode::Transfer {
        return Err(ControlError::WrongMode(config.mode));
    }
    let geom = &params.geom;
    let eff = forward_kinematics(geom, q);
    let f_desired = desired_force_field(config, &eff)?;
    // the user pushes back with -f_desired at equilibrium
    let (m1, m2) = effector_force_to_actuator_forces(geom, q, [-f_desired[0], -f_desired[1]])?;
    let g = gravity_torques_with(params.gravity_model, geom, &params.masses, q);
    let (c1, c2) = joint_torque_to_actuator_forces(geom, q, [-g[0], -g[1]])?;
    let base = [m1 + c1, m2 + c2];
    let pre_clamp = [
        friction_compensation(&params.friction_1, base[0], motor_vels[0]),
        friction_compensation(&params.friction_2, base[1], motor_vels[1]),
    ];
    let out_vel = |spec: &ActuatorSpec, w: f64| w / (spec.ratio * 1000.0);
    let k1 = clamp_to_capability(&params.spec_1, pre_clamp[0], out_vel(&params.spec_1, motor_vels[0]), params.allow_peak);
    let k2 = clamp_to_capability(&params.spec_2, pre_clamp[1], out_vel(&params.spec_2, motor_vels[1]), params.allow_peak);
    Ok(ForceCommand {
        f1: k1.force,
        f2: k2.force,
        saturated_1: k1.saturated,
        saturated_2: k2.saturated,
        velocity_exceeded_1: k1.velocity_exceeded,
        velocity_exceeded_2: k2.velocity_exceeded,
        stages: PipelineStages {
            f_desired,
            mapped: [m1, m2],
            mass_comp: [c1, c2],
            friction_comp: [pre_clamp[0] - base[0], pre_clamp[1] - base[1]],
            pre_clamp,
        },
    })
}
