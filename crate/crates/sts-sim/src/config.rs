use serde::{Deserialize, Serialize};
use sts_actuators::{ActuatorSpec, FrictionModel};
use sts_control::{AssistMode, AssistModeConfig, Direction, TransferConfig};
use sts_human::{HarnessParams, HumanParams};
use sts_kinematics::{GravityModel, LinkMassModel, RobotGeometry, Vec2};

use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Sts,
    Transfer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActuatorSet {
    pub act1: ActuatorSpec,
    pub act2_hs: ActuatorSpec,
    pub act2_hf: ActuatorSpec,
}

impl Default for ActuatorSet {
    fn default() -> Self {
        Self {
            act1: ActuatorSpec::actuator_1(),
            act2_hs: ActuatorSpec::actuator_2_hs(),
            act2_hf: ActuatorSpec::actuator_2_hf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrictionSet {
    pub act1: FrictionModel,
    pub act2_hs: FrictionModel,
    pub act2_hf: FrictionModel,
}

impl Default for FrictionSet {
    fn default() -> Self {
        Self {
            act1: FrictionModel::actuator_1(),
            act2_hs: FrictionModel::actuator_2_hs(),
            act2_hf: FrictionModel::actuator_2_hf(),
        }
    }
}

impl FrictionSet {
    pub fn none() -> Self {
        Self { act1: FrictionModel::NONE, act2_hs: FrictionModel::NONE, act2_hf: FrictionModel::NONE }
    }

    pub fn scaled(&self, k: f64) -> Self {
        let s = |f: FrictionModel| FrictionModel { a: f.a * k, b: f.b };
        Self { act1: s(self.act1), act2_hs: s(self.act2_hs), act2_hf: s(self.act2_hf) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssistSettings {
    pub mode: AssistMode,
    pub fz_pct: f64,
    pub ky: f64,
    pub forward_only: bool,
}

impl Default for AssistSettings {
    fn default() -> Self {
        Self { mode: AssistMode::FollowMe, fz_pct: 0.0, ky: 0.0, forward_only: false }
    }
}

/// User description; unset fields are derived from height and mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HumanSettings {
    pub height: f64,
    pub mass: f64,
    pub mobility: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seat_height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seated_com: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub standing_com: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harness_offset: Option<Vec2>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seat_depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_taper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chair_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chair_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seated_feet_share: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sit_back_time: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_adaptation: Option<f64>,
}

impl Default for HumanSettings {
    fn default() -> Self {
        Self::user(1.75, 81.13)
    }
}

impl HumanSettings {
    pub fn user(height: f64, mass: f64) -> Self {
        Self {
            height,
            mass,
            mobility: 1.0,
            seat_height: None,
            seated_com: None,
            standing_com: None,
            harness_offset: None,
            seat_depth: None,
            edge_taper: None,
            chair_k: None,
            chair_c: None,
            seated_feet_share: None,
            capacity_factor: None,
            kp: None,
            kd: None,
            sit_back_time: None,
            support_adaptation: None,
        }
    }

    pub fn from_params(p: &HumanParams) -> Self {
        Self {
            height: p.height,
            mass: p.mass,
            mobility: p.mobility,
            seat_height: Some(p.seat_height),
            seated_com: Some(p.seated_com),
            standing_com: Some(p.standing_com),
            harness_offset: Some(p.harness_offset),
            seat_depth: Some(p.seat_depth),
            edge_taper: Some(p.edge_taper),
            chair_k: Some(p.chair_k),
            chair_c: Some(p.chair_c),
            seated_feet_share: Some(p.seated_feet_share),
            capacity_factor: Some(p.capacity_factor),
            kp: Some(p.kp),
            kd: Some(p.kd),
            sit_back_time: Some(p.sit_back_time),
            support_adaptation: Some(p.support_adaptation),
        }
    }

    pub fn resolve(&self) -> HumanParams {
        let mut p = HumanParams::for_user(self.height, self.mass);
        p.mobility = self.mobility;
        if let Some(v) = self.seat_height {
            p.seat_height = v;
            p.seated_com[1] = v + 0.25;
        }
        if let Some(v) = self.seated_com {
            p.seated_com = v;
        }
        p.standing_com = self.standing_com.unwrap_or([p.seated_com[0] + 0.25 * p.height, 0.55 * p.height]);
        if let Some(v) = self.harness_offset {
            p.harness_offset = v;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        take!(seat_depth, edge_taper, chair_k, chair_c, seated_feet_share, capacity_factor, sit_back_time, support_adaptation);
        if let Some(v) = self.kp {
            p.kp = v;
            p.kd = 2.0 * (v * p.mass).sqrt();
        }
        if let Some(v) = self.kd {
            p.kd = v;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransferSettings {
    pub payload: f64,
    pub v_z_target: f64,
    pub q_a_locked: f64,
    pub kp: f64,
    pub ki: f64,
    /// Lower end of the travel (large `q_c`).
    pub q_c_bottom: f64,
    /// Upper end of the travel.
    pub q_c_top: f64,
    pub hold: f64,
}

impl Default for TransferSettings {
    fn default() -> Self {
        let t = TransferConfig::default();
        Self { payload: 0.0, v_z_target: t.v_z_target, q_a_locked: t.q_a_locked, kp: t.kp, ki: t.ki, q_c_bottom: 0.9, q_c_top: 0.0, hold: 2.0 }
    }
}

impl TransferSettings {
    pub fn controller(&self, direction: Direction) -> TransferConfig {
        TransferConfig { v_z_target: self.v_z_target, q_a_locked: self.q_a_locked, direction, kp: self.kp, ki: self.ki }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub geometry: RobotGeometry,
    pub masses: LinkMassModel,
    pub actuators: ActuatorSet,
    /// Friction assumed by the controller.
    pub controller_friction: FrictionSet,
    /// Friction present in the simulated plant.
    pub plant_friction: FrictionSet,
    pub joint_damping: Vec2,
    pub allow_peak: bool,
    pub gravity_model: GravityModel,
    pub assist: AssistSettings,
    pub human: HumanSettings,
    pub harness: HarnessParams,
    pub robot_attached: bool,
    pub repetitions: usize,
    pub pause: f64,
    pub sts_duration: f64,
    /// Relative spread of the STS duration across repetitions.
    pub duration_jitter: f64,
    /// Unlogged settling time before each repetition.
    pub settle: f64,
    pub dt: f64,
    pub seed: u64,
    pub transfer: TransferSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            kind: ScenarioKind::Sts,
            geometry: RobotGeometry::default(),
            masses: LinkMassModel::default(),
            actuators: ActuatorSet::default(),
            controller_friction: FrictionSet::default(),
            plant_friction: FrictionSet::default(),
            joint_damping: [0.5, 0.5],
            allow_peak: false,
            gravity_model: GravityModel::FirstPrinciples,
            assist: AssistSettings::default(),
            human: HumanSettings::default(),
            harness: HarnessParams::default(),
            robot_attached: true,
            repetitions: 5,
            pause: 2.0,
            sts_duration: 2.0,
            duration_jitter: 0.05,
            settle: 1.0,
            dt: 1e-3,
            seed: 0,
            transfer: TransferSettings::default(),
        }
    }
}

impl Scenario {
    pub fn assist_config(&self) -> AssistModeConfig {
        AssistModeConfig {
            mode: self.assist.mode,
            fz_pct: self.assist.fz_pct,
            ky: self.assist.ky,
            user_height: self.human.height,
            user_weight: self.human.mass,
            e_yi: 0.0,
            forward_only: self.assist.forward_only,
        }
    }

    /// Copy with every derived default written out.
    pub fn resolved(&self) -> Self {
        let mut s = self.clone();
        s.human = HumanSettings::from_params(&self.human.resolve());
        s
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let cfg = |field: &str, msg: String| Err(SimError::Config { field: field.to_string(), message: msg });
        if !(self.dt > 0.0 && self.dt <= 5e-3) {
            return cfg("dt", "dt must lie in (0, 0.005] s".into());
        }
        if self.repetitions < 1 {
            return cfg("repetitions", "at least one repetition is required".into());
        }
        if !(self.pause >= 0.0 && self.settle >= 0.0) {
            return cfg("pause", "pause and settle must be >= 0".into());
        }
        if !(self.sts_duration > 0.0) {
            return cfg("sts_duration", "sts_duration must be > 0".into());
        }
        if !(0.0..0.5).contains(&self.duration_jitter) {
            return cfg("duration_jitter", "duration_jitter must lie in [0, 0.5)".into());
        }
        if let Err(e) = self.geometry.validate() {
            return cfg("geometry", e.to_string());
        }
        if !(self.masses.m_h >= 0.0 && self.masses.m_v >= 0.0) {
            return cfg("masses", "masses must be >= 0".into());
        }
        for (name, spec) in [("actuators.act1", &self.actuators.act1), ("actuators.act2_hs", &self.actuators.act2_hs), ("actuators.act2_hf", &self.actuators.act2_hf)] {
            if let Err(e) = spec.validate() {
                return cfg(name, e);
            }
        }
        for set in [&self.controller_friction, &self.plant_friction] {
            for f in [set.act1, set.act2_hs, set.act2_hf] {
                if !(f.a >= 0.0 && f.b >= 0.0) {
                    return cfg("friction", "friction a and b must be >= 0".into());
                }
            }
        }
        let human = self.human.resolve();
        if let Err(e) = human.validate() {
            return cfg("human", e);
        }
        match self.kind {
            ScenarioKind::Sts => {
                if self.assist.mode == AssistMode::Transfer {
                    return cfg("assist.mode", "transfer mode needs kind = \"transfer\"".into());
                }
                if let Err(e) = self.assist_config().validate() {
                    return cfg("assist", e.to_string());
                }
                if self.robot_attached {
                    for (field, com) in [("human.seated_com", human.seated_com), ("human.standing_com", human.standing_com)] {
                        let p = human.harness_point(com);
                        if let Err(e) = sts_kinematics::inverse_kinematics(&self.geometry, p) {
                            return cfg(field, format!("harness point ({:.3}, {:.3}) not reachable: {e}", p[0], p[1]));
                        }
                    }
                }
            }
            ScenarioKind::Transfer => {
                let t = &self.transfer;
                if let Err(e) = t.controller(Direction::Up).validate() {
                    return cfg("transfer", e.to_string());
                }
                if !(t.payload >= 0.0) {
                    return cfg("transfer.payload", "payload must be >= 0".into());
                }
                if !(t.q_c_top < t.q_c_bottom) {
                    return cfg("transfer.q_c_top", "q_c_top must be below q_c_bottom".into());
                }
                let g = &self.geometry;
                for (field, qc) in [("transfer.q_c_top", t.q_c_top), ("transfer.q_c_bottom", t.q_c_bottom)] {
                    if !g.within_limits(t.q_a_locked, qc) {
                        return cfg(field, "transfer travel must lie within the joint limits".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// Non-fatal findings, e.g. a stroke shorter than the `q_a` range needs.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let need = sts_kinematics::stroke_required(&self.geometry, 400);
        if need > self.geometry.stroke_1 {
            out.push(format!(
                "geometry.stroke_1: q_a range needs {need:.4} m of travel, stroke is {:.4} m",
                self.geometry.stroke_1
            ));
        }
        out
    }
}
