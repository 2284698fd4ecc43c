use serde::{Deserialize, Serialize};
use sts_kinematics::{EffectorState, Vec2, GRAVITY};

use crate::ControlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssistMode {
    FollowMe,
    WeightUnloading,
    #[serde(rename = "com_balance")]
    CoMBalance,
    Transfer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssistModeConfig {
    pub mode: AssistMode,
    /// Upward unloading as a fraction of body weight.
    #[serde(default)]
    pub fz_pct: f64,
    /// Virtual spring stiffness, N/m.
    #[serde(default)]
    pub ky: f64,
    pub user_height: f64,
    pub user_weight: f64,
    /// Effector y when the mode was armed.
    #[serde(default)]
    pub e_yi: f64,
    /// Clamp the spring to forward pull only.
    #[serde(default)]
    pub forward_only: bool,
}

impl AssistModeConfig {
    pub fn new(mode: AssistMode, fz_pct: f64, ky: f64, user_height: f64, user_weight: f64) -> Result<Self, ControlError> {
        let cfg = Self { mode, fz_pct, ky, user_height, user_weight, e_yi: 0.0, forward_only: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn follow_me(user_height: f64, user_weight: f64) -> Self {
        Self { mode: AssistMode::FollowMe, fz_pct: 0.0, ky: 0.0, user_height, user_weight, e_yi: 0.0, forward_only: false }
    }

    /// Enforces the parameter pattern each mode allows.
    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |msg: &str| Err(ControlError::InvalidConfig(msg.to_string()));
        if !(self.fz_pct.is_finite() && (0.0..1.0).contains(&self.fz_pct)) {
            return bad("fz_pct must lie in [0, 1)");
        }
        if !(self.ky.is_finite() && self.ky >= 0.0) {
            return bad("ky must be >= 0");
        }
        if !(self.user_height > 0.0 && self.user_weight > 0.0) {
            return bad("user_height and user_weight must be > 0");
        }
        match self.mode {
            AssistMode::FollowMe if self.fz_pct != 0.0 || self.ky != 0.0 => {
                bad("follow_me requires fz_pct = 0 and ky = 0 (mode parameter table)")
            }
            AssistMode::WeightUnloading if !(self.fz_pct > 0.0) || self.ky != 0.0 => {
                bad("weight_unloading requires fz_pct > 0 and ky = 0 (mode parameter table)")
            }
            AssistMode::CoMBalance if !(self.fz_pct > 0.0) || !(self.ky > 0.0) => {
                bad("com_balance requires fz_pct > 0 and ky > 0 (mode parameter table)")
            }
            _ => Ok(()),
        }
    }

    /// Same config with the spring anchored at the current effector y.
    pub fn armed_at(&self, e_yi: f64) -> Self {
        Self { e_yi, ..self.clone() }
    }
}

/// Virtual-spring anchor: start position plus a quarter of the stature.
pub fn anchor_y(config: &AssistModeConfig) -> Result<f64, ControlError> {
    if config.mode != AssistMode::CoMBalance {
        return Err(ControlError::WrongMode(config.mode));
    }
    Ok(config.e_yi + 0.25 * config.user_height)
}

/// Force the effector should apply to the user.
pub fn desired_force_field(config: &AssistModeConfig, effector: &EffectorState) -> Result<Vec2, ControlError> {
    let fz = config.fz_pct * config.user_weight * GRAVITY;
    match config.mode {
        AssistMode::FollowMe => Ok([0.0, 0.0]),
        AssistMode::WeightUnloading => Ok([0.0, fz]),
        AssistMode::CoMBalance => {
            let mut fy = config.ky * (anchor_y(config)? - effector.y);
            if config.forward_only {
                fy = fy.max(0.0);
            }
            Ok([fy, fz])
        }
        AssistMode::Transfer => Err(ControlError::WrongMode(config.mode)),
    }
}
