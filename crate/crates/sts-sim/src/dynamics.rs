//! Rigid-body model of the two-link arm with an optional point payload at E.

use sts_actuators::{friction_force, ActuatorSpec, FrictionModel};
use sts_kinematics::{
    dl1_dqa, dl2_dqc, effector_bias_acceleration, gravity_torques, jacobian_dk, potential_energy, JointState,
    LinkMassModel, Mat2, RobotGeometry, Vec2, GRAVITY,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Plant {
    pub geom: RobotGeometry,
    pub masses: LinkMassModel,
    pub spec_1: ActuatorSpec,
    pub spec_2: ActuatorSpec,
    pub friction_1: FrictionModel,
    pub friction_2: FrictionModel,
    pub damping: Vec2,
    /// Point mass hung at E.
    pub payload: f64,
}

pub fn mass_matrix(geom: &RobotGeometry, m: &LinkMassModel, payload: f64, q: &JointState) -> Mat2 {
    let k = -m.m_v * geom.l_ac * m.l_v * q.q_c.sin();
    let rod_v = m.m_v * m.l_v * m.l_v + m.i_v;
    let m11 = m.m_h * m.l_h * m.l_h + m.i_h + m.m_v * geom.l_ac * geom.l_ac + rod_v + 2.0 * k;
    let mut out = [[m11, rod_v + k], [rod_v + k, rod_v]];
    if payload != 0.0 {
        let j = jacobian_dk(geom, q);
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell += payload * (j[0][r] * j[0][c] + j[1][r] * j[1][c]);
            }
        }
    }
    out
}

/// Coriolis and centrifugal terms `C(q, qd) qd`.
pub fn velocity_bias(geom: &RobotGeometry, m: &LinkMassModel, payload: f64, q: &JointState) -> Vec2 {
    let hp = -m.m_v * geom.l_ac * m.l_v * q.q_c.cos();
    let mut out = [hp * (2.0 * q.qd_a * q.qd_c + q.qd_c * q.qd_c), -hp * q.qd_a * q.qd_a];
    if payload != 0.0 {
        let j = jacobian_dk(geom, q);
        let b = effector_bias_acceleration(geom, q);
        out[0] += payload * (j[0][0] * b[0] + j[1][0] * b[1]);
        out[1] += payload * (j[0][1] * b[0] + j[1][1] * b[1]);
    }
    out
}

pub fn gravity_with_payload(geom: &RobotGeometry, m: &LinkMassModel, payload: f64, q: &JointState) -> Vec2 {
    let mut g = gravity_torques(geom, m, q);
    if payload != 0.0 {
        let j = jacobian_dk(geom, q);
        g[0] += payload * GRAVITY * j[1][0];
        g[1] += payload * GRAVITY * j[1][1];
    }
    g
}

pub fn kinetic_energy(geom: &RobotGeometry, m: &LinkMassModel, payload: f64, q: &JointState) -> f64 {
    let mm = mass_matrix(geom, m, payload, q);
    let v = [q.qd_a, q.qd_c];
    0.5 * (v[0] * (mm[0][0] * v[0] + mm[0][1] * v[1]) + v[1] * (mm[1][0] * v[0] + mm[1][1] * v[1]))
}

pub fn mechanical_energy(geom: &RobotGeometry, m: &LinkMassModel, payload: f64, q: &JointState) -> f64 {
    let mut v = potential_energy(geom, m, q) + kinetic_energy(geom, m, payload, q);
    if payload != 0.0 {
        v += payload * GRAVITY * geom.effector_position(q.q_a, q.q_c)[1];
    }
    v
}

/// Actuator length rates `(dL1/dt, dL2/dt)`.
pub fn actuator_rates(geom: &RobotGeometry, q: &JointState) -> Vec2 {
    [dl1_dqa(geom, q.q_a) * q.qd_a, dl2_dqc(geom, q.q_c) * q.qd_c]
}

/// Motor speeds, positive in contraction.
pub fn motor_speeds(plant: &Plant, q: &JointState) -> Vec2 {
    let r = actuator_rates(&plant.geom, q);
    [-plant.spec_1.ratio * 1000.0 * r[0], -plant.spec_2.ratio * 1000.0 * r[1]]
}

impl Plant {
    /// Tensions reaching the links after plant friction.
    pub fn transmitted(&self, q: &JointState, commanded: Vec2) -> Vec2 {
        let w = motor_speeds(self, q);
        [
            commanded[0] - friction_force(&self.friction_1, w[0]),
            commanded[1] - friction_force(&self.friction_2, w[1]),
        ]
    }

    /// Generalized forces other than inertia: actuators, an external force at E,
    /// gravity, damping and velocity bias.
    pub fn generalized_force(&self, q: &JointState, commanded: Vec2, f_effector: Vec2) -> Vec2 {
        let geom = &self.geom;
        let ft = self.transmitted(q, commanded);
        let j = jacobian_dk(geom, q);
        let g = gravity_with_payload(geom, &self.masses, self.payload, q);
        let b = velocity_bias(geom, &self.masses, self.payload, q);
        let act = [-dl1_dqa(geom, q.q_a) * ft[0], -dl2_dqc(geom, q.q_c) * ft[1]];
        let ext = [
            j[0][0] * f_effector[0] + j[1][0] * f_effector[1],
            j[0][1] * f_effector[0] + j[1][1] * f_effector[1],
        ];
        [
            act[0] + ext[0] - g[0] - self.damping[0] * q.qd_a - b[0],
            act[1] + ext[1] - g[1] - self.damping[1] * q.qd_c - b[1],
        ]
    }

    /// Joint accelerations; with the brake engaged `q_a` is eliminated.
    pub fn acceleration(&self, q: &JointState, commanded: Vec2, f_effector: Vec2, brake: bool) -> Vec2 {
        let tau = self.generalized_force(q, commanded, f_effector);
        let mm = mass_matrix(&self.geom, &self.masses, self.payload, q);
        if brake {
            return [0.0, tau[1] / mm[1][1]];
        }
        sts_kinematics::solve(&mm, tau).unwrap_or([f64::NAN, f64::NAN])
    }

    /// Hard stops: clamp into the limits and zero any outward velocity.
    pub fn enforce_limits(&self, q: &mut JointState) -> bool {
        let mut hit = false;
        let [alo, ahi] = self.geom.q_a_limits;
        let [clo, chi] = self.geom.q_c_limits;
        if q.q_a < alo || q.q_a > ahi {
            q.q_a = q.q_a.clamp(alo, ahi);
            if (q.q_a == alo && q.qd_a < 0.0) || (q.q_a == ahi && q.qd_a > 0.0) {
                q.qd_a = 0.0;
            }
            hit = true;
        }
        if q.q_c < clo || q.q_c > chi {
            q.q_c = q.q_c.clamp(clo, chi);
            if (q.q_c == clo && q.qd_c < 0.0) || (q.q_c == chi && q.qd_c > 0.0) {
                q.qd_c = 0.0;
            }
            hit = true;
        }
        hit
    }
}

/// Generic fixed-step RK4 on a state array.
pub fn rk4<const N: usize>(x: &[f64; N], dt: f64, mut f: impl FnMut(f64, &[f64; N]) -> [f64; N]) -> [f64; N] {
    let add = |a: &[f64; N], k: &[f64; N], h: f64| {
        let mut o = *a;
        for i in 0..N {
            o[i] += h * k[i];
        }
        o
    };
    let k1 = f(0.0, x);
    let k2 = f(0.5 * dt, &add(x, &k1, 0.5 * dt));
    let k3 = f(0.5 * dt, &add(x, &k2, 0.5 * dt));
    let k4 = f(dt, &add(x, &k3, dt));
    let mut out = *x;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}
