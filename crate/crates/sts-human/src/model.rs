use serde::{Deserialize, Serialize};
use sts_kinematics::{Vec2, GRAVITY};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumanParams {
    pub height: f64,
    pub mass: f64,
    /// Scales muscle capacity; 0 means no voluntary effort.
    pub mobility: f64,
    pub seat_height: f64,
    pub seated_com: Vec2,
    pub standing_com: Vec2,
    /// Harness attachment relative to the CoM.
    pub harness_offset: Vec2,
    pub seat_depth: f64,
    pub edge_taper: f64,
    pub chair_k: f64,
    pub chair_c: f64,
    /// Share of body weight carried by the feet while fully seated.
    pub seated_feet_share: f64,
    /// Peak leg force as a multiple of body weight at mobility 1.
    pub capacity_factor: f64,
    pub kp: f64,
    pub kd: f64,
    /// Saturated effort before seat-off longer than this aborts the rise.
    pub sit_back_time: f64,
    /// Fraction of felt vertical harness support the user removes from their
    /// own leg effort (a point mass has no knee lock to stop it being lifted).
    pub support_adaptation: f64,
}

impl HumanParams {
    pub fn for_user(height: f64, mass: f64) -> Self {
        let seat_height = 0.43;
        let seated_com = [-0.10, seat_height + 0.25];
        let kp = 800.0 * mass / 80.0;
        Self {
            height,
            mass,
            mobility: 1.0,
            seat_height,
            seated_com,
            standing_com: [seated_com[0] + 0.25 * height, 0.55 * height],
            harness_offset: [0.0, 0.35],
            seat_depth: 0.45,
            edge_taper: 0.10,
            chair_k: 2.0e4,
            chair_c: 2.0e3,
            seated_feet_share: 0.2,
            capacity_factor: 1.3,
            kp,
            kd: 2.0 * (kp * mass).sqrt(),
            sit_back_time: 0.2,
            support_adaptation: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.height > 0.0 && self.mass > 0.0) {
            return Err("human height and mass must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.mobility) {
            return Err("mobility must lie in [0, 1]".into());
        }
        if !(self.standing_com[1] > self.seated_com[1]) {
            return Err("standing_com must be above seated_com".into());
        }
        if !(self.seat_depth > 0.0 && self.edge_taper > 0.0 && self.edge_taper <= self.seat_depth / 2.0) {
            return Err("need seat_depth > 0 and 0 < edge_taper <= seat_depth/2".into());
        }
        if !(self.chair_k > 0.0 && self.chair_c >= 0.0 && self.kp >= 0.0 && self.kd >= 0.0) {
            return Err("chair and effort gains must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.support_adaptation) {
            return Err("support_adaptation must lie in [0, 1]".into());
        }
        if !(0.0..=1.0).contains(&self.seated_feet_share) {
            return Err("seated_feet_share must lie in [0, 1]".into());
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.mass * GRAVITY
    }

    pub fn seat_edge(&self) -> f64 {
        self.seated_com[0] + self.seat_depth / 2.0
    }

    /// Fraction of chair support available at CoM position `y`.
    pub fn chair_support(&self, y: f64) -> f64 {
        let edge = self.seat_edge();
        ((edge - y) / self.edge_taper).clamp(0.0, 1.0)
    }

    /// Height of the unloaded seat contact, chosen so the seated rest state
    /// splits the weight between chair and feet.
    pub fn contact_height(&self) -> f64 {
        self.seated_com[1] + (1.0 - self.seated_feet_share) * self.weight() / self.chair_k
    }

    pub fn harness_point(&self, com: Vec2) -> Vec2 {
        [com[0] + self.harness_offset[0], com[1] + self.harness_offset[1]]
    }
}

/// Minimum-jerk position, velocity and acceleration profile on `[0, 1]`.
pub fn min_jerk(tau: f64) -> (f64, f64, f64) {
    if tau <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if tau >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let t2 = tau * tau;
    let t3 = t2 * tau;
    (
        10.0 * t3 - 15.0 * t3 * tau + 6.0 * t3 * t2,
        30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2,
        60.0 * tau - 180.0 * t2 + 120.0 * t3,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StsReference {
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReferencePoint {
    pub pos: Vec2,
    pub vel: Vec2,
    pub acc: Vec2,
}

pub fn reference_com(params: &HumanParams, reference: &StsReference, t: f64) -> ReferencePoint {
    let (s, sd, sdd) = min_jerk(t / reference.duration);
    let d = [params.standing_com[0] - params.seated_com[0], params.standing_com[1] - params.seated_com[1]];
    let (k1, k2) = (1.0 / reference.duration, 1.0 / (reference.duration * reference.duration));
    ReferencePoint {
        pos: [params.seated_com[0] + s * d[0], params.seated_com[1] + s * d[1]],
        vel: [sd * k1 * d[0], sd * k1 * d[1]],
        acc: [sdd * k2 * d[0], sdd * k2 * d[1]],
    }
}

pub fn seated_reference(params: &HumanParams) -> ReferencePoint {
    ReferencePoint { pos: params.seated_com, ..Default::default() }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HumanState {
    pub com: Vec2,
    pub vel: Vec2,
    pub seat_off: bool,
    /// Reference reverted to seated after a failed rise.
    pub sat_back: bool,
    pub saturated_for: f64,
}

impl HumanState {
    pub fn seated(params: &HumanParams) -> Self {
        Self { com: params.seated_com, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HumanForces {
    pub chair_fz: f64,
    pub feet: Vec2,
    pub effort_saturated: bool,
}

impl HumanForces {
    /// Net external force on the CoM, given the force from the harness.
    pub fn net(&self, params: &HumanParams, harness: Vec2) -> Vec2 {
        [
            self.feet[0] + harness[0],
            self.feet[1] + self.chair_fz + harness[1] - params.weight(),
        ]
    }
}

fn norm_clamp(v: Vec2, limit: f64) -> (Vec2, bool) {
    let n = v[0].hypot(v[1]);
    if n > limit {
        let k = if n > 0.0 { limit / n } else { 0.0 };
        ([v[0] * k, v[1] * k], true)
    } else {
        (v, false)
    }
}

/// Leg effort delivered through the feet: weight-bearing baseline less the felt
/// vertical support, plus PD tracking, clamped to capacity. Feet cannot pull
/// on the floor.
pub fn muscle_effort(params: &HumanParams, state: &HumanState, reference: &ReferencePoint, harness_z: f64) -> (Vec2, bool) {
    let beta = params.seated_feet_share;
    let lambda = 1.0 - params.chair_support(state.com[0]);
    let baseline = params.weight() * (beta + (1.0 - beta) * lambda) - params.support_adaptation * harness_z;
    let raw = [
        params.kp * (reference.pos[0] - state.com[0]) + params.kd * (reference.vel[0] - state.vel[0]),
        baseline + params.kp * (reference.pos[1] - state.com[1]) + params.kd * (reference.vel[1] - state.vel[1]),
    ];
    let capacity = params.mobility * params.capacity_factor * params.weight();
    let (mut f, saturated) = norm_clamp(raw, capacity);
    f[1] = f[1].max(0.0);
    (f, saturated)
}

pub fn chair_force(params: &HumanParams, state: &HumanState) -> f64 {
    if state.seat_off {
        return 0.0;
    }
    let depth = params.contact_height() - state.com[1];
    if depth <= 0.0 {
        return 0.0;
    }
    params.chair_support(state.com[0]) * (params.chair_k * depth - params.chair_c * state.vel[1]).max(0.0)
}

pub fn contact_forces(params: &HumanParams, state: &HumanState, reference: &ReferencePoint, harness: Vec2) -> HumanForces {
    let (feet, effort_saturated) = muscle_effort(params, state, reference, harness[1]);
    HumanForces { chair_fz: chair_force(params, state), feet, effort_saturated }
}

/// CoM acceleration from Newton's law.
pub fn acceleration(params: &HumanParams, forces: &HumanForces, harness: Vec2) -> Vec2 {
    let net = forces.net(params, harness);
    [net[0] / params.mass, net[1] / params.mass]
}

/// Discrete bookkeeping after an integration step: seat-off latch and the
/// sit-back rule. `rising` is false during settling and pauses.
pub fn update_events(params: &HumanParams, state: &mut HumanState, forces: &HumanForces, rising: bool, dt: f64) {
    if !rising || state.seat_off || state.sat_back {
        return;
    }
    if forces.chair_fz <= 0.0 {
        state.seat_off = true;
        return;
    }
    if forces.effort_saturated {
        state.saturated_for += dt;
        if state.saturated_for > params.sit_back_time {
            state.sat_back = true;
        }
    } else {
        state.saturated_for = 0.0;
    }
}

/// Spring-damper strap between the effector and the harness point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessParams {
    pub k: f64,
    pub c: f64,
}

impl Default for HarnessParams {
    fn default() -> Self {
        Self { k: 2.0e4, c: 200.0 }
    }
}

/// Force on the human; the robot receives the negative.
pub fn harness_force(harness: &HarnessParams, effector: Vec2, effector_vel: Vec2, anchor: Vec2, anchor_vel: Vec2) -> Vec2 {
    [
        harness.k * (effector[0] - anchor[0]) + harness.c * (effector_vel[0] - anchor_vel[0]),
        harness.k * (effector[1] - anchor[1]) + harness.c * (effector_vel[1] - anchor_vel[1]),
    ]
}
