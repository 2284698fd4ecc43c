use serde::{Deserialize, Serialize};

use crate::{inverse, mat_mul, mat_vec, transpose, Joint, KinematicsError, Mat2, Vec2, SINGULAR_EPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotGeometry {
    pub l_ab: f64,
    pub l_ac: f64,
    pub l_ce: f64,
    pub l_cd: f64,
    /// Height of joint A above the ground.
    pub base_height: f64,
    /// Actuator-1 base anchor relative to A.
    pub p1: Vec2,
    /// Belt pulley offset beyond C along AC.
    pub d_g: f64,
    pub q_a_limits: Vec2,
    pub q_c_limits: Vec2,
    /// Ball-screw travel.
    pub stroke_1: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        Self {
            l_ab: 0.38,
            l_ac: 0.61,
            l_ce: 0.75,
            l_cd: 0.38,
            base_height: 0.44,
            p1: [0.15, 0.15],
            d_g: 1.0,
            q_a_limits: [-1.60, -0.33],
            q_c_limits: [-0.30, 1.20],
            stroke_1: 0.220,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub q_a: f64,
    pub q_c: f64,
    pub qd_a: f64,
    pub qd_c: f64,
}

impl JointState {
    pub fn at(q_a: f64, q_c: f64) -> Self {
        Self { q_a, q_c, qd_a: 0.0, qd_c: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EffectorState {
    pub y: f64,
    pub z: f64,
    pub vy: f64,
    pub vz: f64,
}

/// Named points of the linkage for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkagePoints {
    pub a: Vec2,
    pub b: Vec2,
    pub c: Vec2,
    pub d: Vec2,
    pub e: Vec2,
    pub g: Vec2,
    pub p1: Vec2,
}

impl RobotGeometry {
    pub fn validate(&self) -> Result<(), KinematicsError> {
        let named = [
            ("l_ab", self.l_ab),
            ("l_ac", self.l_ac),
            ("l_ce", self.l_ce),
            ("l_cd", self.l_cd),
            ("base_height", self.base_height),
            ("d_g", self.d_g),
            ("stroke_1", self.stroke_1),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(KinematicsError::InvalidGeometry(format!("{name} must be > 0")));
            }
        }
        if self.l_cd >= self.l_ce {
            return Err(KinematicsError::InvalidGeometry("l_cd must be < l_ce".into()));
        }
        for (name, lim) in [("q_a_limits", self.q_a_limits), ("q_c_limits", self.q_c_limits)] {
            if !(lim[0].is_finite() && lim[1].is_finite() && lim[0] < lim[1]) {
                return Err(KinematicsError::InvalidGeometry(format!("{name} must be an increasing interval")));
            }
        }
        Ok(())
    }

    pub fn within_limits(&self, q_a: f64, q_c: f64) -> bool {
        (self.q_a_limits[0]..=self.q_a_limits[1]).contains(&q_a)
            && (self.q_c_limits[0]..=self.q_c_limits[1]).contains(&q_c)
    }

    fn along_ac(&self, q_a: f64, d: f64) -> Vec2 {
        [d * q_a.sin(), self.base_height + d * q_a.cos()]
    }

    pub fn points(&self, q_a: f64, q_c: f64) -> LinkagePoints {
        let c = self.along_ac(q_a, self.l_ac);
        let phi = q_a + q_c;
        let dir = [phi.cos(), -phi.sin()];
        LinkagePoints {
            a: [0.0, self.base_height],
            b: self.along_ac(q_a, self.l_ab),
            c,
            d: [c[0] + self.l_cd * dir[0], c[1] + self.l_cd * dir[1]],
            e: [c[0] + self.l_ce * dir[0], c[1] + self.l_ce * dir[1]],
            g: self.along_ac(q_a, self.l_ac + self.d_g),
            p1: [self.p1[0], self.p1[1] + self.base_height],
        }
    }

    pub fn effector_position(&self, q_a: f64, q_c: f64) -> Vec2 {
        let phi = q_a + q_c;
        [
            self.l_ac * q_a.sin() + self.l_ce * phi.cos(),
            self.base_height + self.l_ac * q_a.cos() - self.l_ce * phi.sin(),
        ]
    }
}

pub fn forward_kinematics(geom: &RobotGeometry, q: &JointState) -> EffectorState {
    let [y, z] = geom.effector_position(q.q_a, q.q_c);
    let [vy, vz] = mat_vec(&jacobian_dk(geom, q), [q.qd_a, q.qd_c]);
    EffectorState { y, z, vy, vz }
}

/// Elbow-up solution (`qc` in `[-pi/2, pi/2]`), checked against the joint limits.
pub fn inverse_kinematics(geom: &RobotGeometry, target: Vec2) -> Result<JointState, KinematicsError> {
    let q = inverse_kinematics_unchecked(geom, target)?;
    if !geom.within_limits(q.q_a, q.q_c) {
        return Err(KinematicsError::OutOfJointLimits { q_a: q.q_a, q_c: q.q_c });
    }
    Ok(q)
}

/// Elbow-up solution without the joint-limit check.
pub fn inverse_kinematics_unchecked(geom: &RobotGeometry, target: Vec2) -> Result<JointState, KinematicsError> {
    let (y, dz) = (target[0], target[1] - geom.base_height);
    let r2 = y * y + dz * dz;
    let (lac, lce) = (geom.l_ac, geom.l_ce);
    let s = (lac * lac + lce * lce - r2) / (2.0 * lac * lce);
    // small tolerance so targets produced by FK at the exact boundary still solve
    if !s.is_finite() || s.abs() > 1.0 + 1e-12 {
        return Err(KinematicsError::Unreachable { y: target[0], z: target[1] });
    }
    let q_c = s.clamp(-1.0, 1.0).asin();
    let a_ = lac - lce * q_c.sin();
    let b_ = lce * q_c.cos();
    let q_a = (a_ * y - b_ * dz).atan2(a_ * dz + b_ * y);
    Ok(JointState::at(q_a, q_c))
}

/// `d(E_y, E_z) / d(q_a, q_c)`.
pub fn jacobian_dk(geom: &RobotGeometry, q: &JointState) -> Mat2 {
    let phi = q.q_a + q.q_c;
    let (sp, cp) = phi.sin_cos();
    let (sa, ca) = q.q_a.sin_cos();
    let (lac, lce) = (geom.l_ac, geom.l_ce);
    [
        [lac * ca - lce * sp, -lce * sp],
        [-lac * sa - lce * cp, -lce * cp],
    ]
}

/// `J_dk_dot * qd`, the velocity-product acceleration of E.
pub fn effector_bias_acceleration(geom: &RobotGeometry, q: &JointState) -> Vec2 {
    let phi = q.q_a + q.q_c;
    let phid = q.qd_a + q.qd_c;
    let (sa, ca) = q.q_a.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let wa2 = q.qd_a * q.qd_a;
    let wp2 = phid * phid;
    [
        -geom.l_ac * sa * wa2 - geom.l_ce * cp * wp2,
        -geom.l_ac * ca * wa2 + geom.l_ce * sp * wp2,
    ]
}

pub fn actuator_length_1(geom: &RobotGeometry, q_a: f64) -> f64 {
    let dy = geom.l_ab * q_a.sin() - geom.p1[0];
    let dz = geom.l_ab * q_a.cos() - geom.p1[1];
    dy.hypot(dz)
}

pub fn actuator_length_2(geom: &RobotGeometry, q_c: f64) -> f64 {
    let (dg, lcd) = (geom.d_g, geom.l_cd);
    2.0 * (dg * dg + lcd * lcd + 2.0 * dg * lcd * q_c.sin()).sqrt()
}

pub fn actuator_lengths(geom: &RobotGeometry, q: &JointState) -> (f64, f64) {
    (actuator_length_1(geom, q.q_a), actuator_length_2(geom, q.q_c))
}

pub fn dl1_dqa(geom: &RobotGeometry, q_a: f64) -> f64 {
    let (sa, ca) = q_a.sin_cos();
    let dy = geom.l_ab * sa - geom.p1[0];
    let dz = geom.l_ab * ca - geom.p1[1];
    geom.l_ab * (dy * ca - dz * sa) / dy.hypot(dz)
}

pub fn dl2_dqc(geom: &RobotGeometry, q_c: f64) -> f64 {
    let (dg, lcd) = (geom.d_g, geom.l_cd);
    let (s, c) = q_c.sin_cos();
    2.0 * dg * lcd * c / (dg * dg + lcd * lcd + 2.0 * dg * lcd * s).sqrt()
}

/// Rows `(dL1/dqa, dL1/dqc)` and `(dL2/dqa, dL2/dqc)`; diagonal by construction.
pub fn jacobian_act(geom: &RobotGeometry, q: &JointState) -> Mat2 {
    [[dl1_dqa(geom, q.q_a), 0.0], [0.0, dl2_dqc(geom, q.q_c)]]
}

fn check_transmission(j_act: &Mat2) -> Result<(), KinematicsError> {
    if !(j_act[0][0].abs() > SINGULAR_EPS) {
        return Err(KinematicsError::SingularTransmission(Joint::A));
    }
    if !(j_act[1][1].abs() > SINGULAR_EPS) {
        return Err(KinematicsError::SingularTransmission(Joint::C));
    }
    Ok(())
}

/// `J_Tot = J_dk * J_act^-1`, mapping actuator length rates to effector velocity.
pub fn jacobian_total(geom: &RobotGeometry, q: &JointState) -> Result<Mat2, KinematicsError> {
    let j_act = jacobian_act(geom, q);
    check_transmission(&j_act)?;
    let inv = inverse(&j_act).ok_or(KinematicsError::SingularTransmission(Joint::A))?;
    Ok(mat_mul(&jacobian_dk(geom, q), &inv))
}

/// Actuator tensions that statically balance an external load `f_eff` applied at E.
pub fn effector_force_to_actuator_forces(
    geom: &RobotGeometry,
    q: &JointState,
    f_eff: Vec2,
) -> Result<(f64, f64), KinematicsError> {
    let jt = transpose(&jacobian_total(geom, q)?);
    let [f1, f2] = mat_vec(&jt, f_eff);
    Ok((f1, f2))
}

/// Actuator tensions `F` with `J_act^T F = tau`.
pub fn joint_torque_to_actuator_forces(
    geom: &RobotGeometry,
    q: &JointState,
    tau: Vec2,
) -> Result<(f64, f64), KinematicsError> {
    let j_act = jacobian_act(geom, q);
    check_transmission(&j_act)?;
    Ok((tau[0] / j_act[0][0], tau[1] / j_act[1][1]))
}

pub fn dez_dqc(geom: &RobotGeometry, q_a: f64, q_c: f64) -> f64 {
    -geom.l_ce * (q_a + q_c).cos()
}

/// Belt rate needed for vertical effector speed `v_z` with `q_a` locked.
pub fn transfer_actuator_velocity(geom: &RobotGeometry, q_a: f64, q_c: f64, v_z: f64) -> Result<f64, KinematicsError> {
    let dez = dez_dqc(geom, q_a, q_c);
    if !(dez.abs() > SINGULAR_EPS) {
        return Err(KinematicsError::SingularTransmission(Joint::C));
    }
    Ok(dl2_dqc(geom, q_c) / dez * v_z)
}

/// Travel of actuator 1 over the full `q_a` range (sampled).
pub fn stroke_required(geom: &RobotGeometry, samples: usize) -> f64 {
    let [lo, hi] = geom.q_a_limits;
    let n = samples.max(2);
    let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let qa = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let l = actuator_length_1(geom, qa);
        mn = mn.min(l);
        mx = mx.max(l);
    }
    mx - mn
}
