use serde::{Deserialize, Serialize};

use crate::{JointState, RobotGeometry, Vec2, GRAVITY};

/// Link masses and centre-of-mass offsets. Inertias are about each link's own CoM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkMassModel {
    pub m_h: f64,
    pub m_v: f64,
    /// CoM of AC measured from A.
    pub l_h: f64,
    /// CoM of CDE measured from C.
    pub l_v: f64,
    pub i_h: f64,
    pub i_v: f64,
}

impl LinkMassModel {
    /// Uniform slender rods on the given geometry.
    pub fn slender(geom: &RobotGeometry, m_h: f64, m_v: f64) -> Self {
        Self {
            m_h,
            m_v,
            l_h: geom.l_ac / 2.0,
            l_v: geom.l_ce / 2.0,
            i_h: m_h * geom.l_ac * geom.l_ac / 12.0,
            i_v: m_v * geom.l_ce * geom.l_ce / 12.0,
        }
    }

    pub fn massless() -> Self {
        Self { m_h: 0.0, m_v: 0.0, l_h: 0.0, l_v: 0.0, i_h: 0.0, i_v: 0.0 }
    }
}

impl Default for LinkMassModel {
    fn default() -> Self {
        Self::slender(&RobotGeometry::default(), 2.65, 4.91)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GravityModel {
    /// Derived from the potential energy of the stated geometry.
    #[default]
    FirstPrinciples,
    /// Printed form with the extra `m_v g l_cd cos(qa)` term.
    Literal,
}

pub fn potential_energy(geom: &RobotGeometry, masses: &LinkMassModel, q: &JointState) -> f64 {
    potential_energy_with(GravityModel::FirstPrinciples, geom, masses, q)
}

pub fn potential_energy_with(model: GravityModel, geom: &RobotGeometry, masses: &LinkMassModel, q: &JointState) -> f64 {
    let (ca, sp) = (q.q_a.cos(), (q.q_a + q.q_c).sin());
    let h = geom.base_height;
    match model {
        GravityModel::FirstPrinciples => {
            masses.m_h * GRAVITY * (h + masses.l_h * ca)
                + masses.m_v * GRAVITY * (h + geom.l_ac * ca - masses.l_v * sp)
        }
        GravityModel::Literal => {
            masses.m_h * GRAVITY * masses.l_h * ca
                + masses.m_v * GRAVITY * (geom.l_ac * ca + geom.l_cd * ca - masses.l_v * sp)
        }
    }
}

/// `g(q) = dV/dq`.
pub fn gravity_torques(geom: &RobotGeometry, masses: &LinkMassModel, q: &JointState) -> Vec2 {
    gravity_torques_with(GravityModel::FirstPrinciples, geom, masses, q)
}

pub fn gravity_torques_with(model: GravityModel, geom: &RobotGeometry, masses: &LinkMassModel, q: &JointState) -> Vec2 {
    let sa = q.q_a.sin();
    let cp = (q.q_a + q.q_c).cos();
    let reach = match model {
        GravityModel::FirstPrinciples => geom.l_ac,
        GravityModel::Literal => geom.l_ac + geom.l_cd,
    };
    let g_c = -masses.m_v * GRAVITY * masses.l_v * cp;
    let g_a = -masses.m_h * GRAVITY * masses.l_h * sa - masses.m_v * GRAVITY * reach * sa + g_c;
    [g_a, g_c]
}
