use serde::Serialize;

/// One logged sample. Flags are stored as 0/1 so every channel is numeric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LogRow {
    pub t: f64,
    pub rep: f64,
    pub t_rep: f64,
    pub phase: f64,
    pub q_a: f64,
    pub q_c: f64,
    pub qd_a: f64,
    pub qd_c: f64,
    pub e_y: f64,
    pub e_z: f64,
    pub e_vy: f64,
    pub e_vz: f64,
    pub f_des_y: f64,
    pub f_des_z: f64,
    pub f1_map: f64,
    pub f2_map: f64,
    pub f1_mass: f64,
    pub f2_mass: f64,
    pub f1_fric: f64,
    pub f2_fric: f64,
    pub f1_pre: f64,
    pub f2_pre: f64,
    pub f1_cmd: f64,
    pub f2_cmd: f64,
    pub f1_tx: f64,
    pub f2_tx: f64,
    pub sat_1: f64,
    pub sat_2: f64,
    pub vel_exc_1: f64,
    pub vel_exc_2: f64,
    pub v2: f64,
    pub v2_ref: f64,
    pub com_y: f64,
    pub com_z: f64,
    pub com_vy: f64,
    pub com_vz: f64,
    pub com_ay: f64,
    pub com_az: f64,
    pub ref_y: f64,
    pub ref_z: f64,
    pub chair_fz: f64,
    pub feet_fy: f64,
    pub feet_fz: f64,
    pub harness_fy: f64,
    pub harness_fz: f64,
    pub seat_off: f64,
    pub sat_back: f64,
    pub limit_hit: f64,
}

macro_rules! channels {
    ($($name:ident : $unit:literal),* $(,)?) => {
        /// Channel names and units in column order.
        pub const CHANNELS: &[(&str, &str)] = &[$((stringify!($name), $unit)),*];

        impl LogRow {
            pub fn values(&self) -> Vec<f64> {
                vec![$(self.$name),*]
            }
        }
    };
}

channels! {
    t: "s", rep: "1", t_rep: "s", phase: "1",
    q_a: "rad", q_c: "rad", qd_a: "rad/s", qd_c: "rad/s",
    e_y: "m", e_z: "m", e_vy: "m/s", e_vz: "m/s",
    f_des_y: "N", f_des_z: "N",
    f1_map: "N", f2_map: "N", f1_mass: "N", f2_mass: "N", f1_fric: "N", f2_fric: "N",
    f1_pre: "N", f2_pre: "N", f1_cmd: "N", f2_cmd: "N", f1_tx: "N", f2_tx: "N",
    sat_1: "1", sat_2: "1", vel_exc_1: "1", vel_exc_2: "1",
    v2: "m/s", v2_ref: "m/s",
    com_y: "m", com_z: "m", com_vy: "m/s", com_vz: "m/s", com_ay: "m/s^2", com_az: "m/s^2",
    ref_y: "m", ref_z: "m",
    chair_fz: "N", feet_fy: "N", feet_fz: "N", harness_fy: "N", harness_fz: "N",
    seat_off: "1", sat_back: "1", limit_hit: "1",
}

/// STS phases.
pub const PHASE_RISE: f64 = 1.0;
pub const PHASE_PAUSE: f64 = 2.0;
/// Transfer phases.
pub const PHASE_HOLD: f64 = 0.0;
pub const PHASE_UP: f64 = 1.0;
pub const PHASE_DOWN: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepetitionInfo {
    pub index: usize,
    pub sts_duration: f64,
    /// Index of the first row of the repetition.
    pub start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SimLog {
    pub dt: f64,
    pub user_mass: f64,
    pub user_height: f64,
    pub rows: Vec<LogRow>,
    pub repetitions: Vec<RepetitionInfo>,
}

impl SimLog {
    pub fn column(&self, f: impl Fn(&LogRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }

    pub fn repetition(&self, i: usize) -> &[LogRow] {
        let r = &self.repetitions[i];
        &self.rows[r.start..r.start + r.len]
    }

    pub fn duration(&self) -> f64 {
        self.rows.len() as f64 * self.dt
    }
}
