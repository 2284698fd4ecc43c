use serde::{Deserialize, Serialize};
use sts_actuators::ActuatorSpec;
use sts_kinematics::{
    gravity_torques, inverse_kinematics_unchecked, jacobian_act, jacobian_dk, LinkMassModel, RobotGeometry, Vec2,
    SINGULAR_EPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapConfiguration {
    /// Ball screw plus the high-speed belt output, both joints free.
    Rehab,
    /// High-force belt output with joint A braked at the cell's pose.
    Transfer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapGrid {
    pub y_range: Vec2,
    pub z_range: Vec2,
    pub resolution: f64,
    /// Forward force that must be delivered alongside the vertical one.
    pub f_y: f64,
}

impl Default for MapGrid {
    fn default() -> Self {
        Self { y_range: [-0.2, 1.0], z_range: [0.2, 1.6], resolution: 0.02, f_y: 0.0 }
    }
}

impl MapGrid {
    fn count(range: Vec2, res: f64) -> usize {
        ((range[1] - range[0]) / res + 1e-9).floor() as usize + 1
    }

    pub fn ny(&self) -> usize {
        Self::count(self.y_range, self.resolution)
    }

    pub fn nz(&self) -> usize {
        Self::count(self.z_range, self.resolution)
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_range[0] + j as f64 * self.resolution
    }

    pub fn z(&self, i: usize) -> f64 {
        self.z_range[0] + i as f64 * self.resolution
    }

    /// Nearest cell `(i_z, j_y)`, if inside the grid.
    pub fn cell_of(&self, p: Vec2) -> Option<(usize, usize)> {
        let j = ((p[0] - self.y_range[0]) / self.resolution).round();
        let i = ((p[1] - self.z_range[0]) / self.resolution).round();
        if j < 0.0 || i < 0.0 || j as usize >= self.ny() || i as usize >= self.nz() {
            return None;
        }
        Some((i as usize, j as usize))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.resolution > 0.0) {
            return Err("resolution must be > 0".into());
        }
        if !(self.y_range[1] >= self.y_range[0] && self.z_range[1] >= self.z_range[0]) {
            return Err("ranges must be ordered [min, max]".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Unreachable,
    OutOfLimits,
    Singular,
    /// Reachable, but the structure's own weight already exceeds the envelope.
    /// The value is 0 and the cell is not masked.
    GravityInfeasible,
}

impl CellStatus {
    pub fn code(self) -> u8 {
        match self {
            CellStatus::Ok => 0,
            CellStatus::Unreachable => 1,
            CellStatus::OutOfLimits => 2,
            CellStatus::Singular => 3,
            CellStatus::GravityInfeasible => 4,
        }
    }

    pub fn masked(self) -> bool {
        matches!(self, CellStatus::Unreachable | CellStatus::OutOfLimits | CellStatus::Singular)
    }

    pub const LEGEND: &'static [(u8, &'static str)] = &[
        (0, "ok"),
        (1, "unreachable"),
        (2, "outside joint limits"),
        (3, "singular transmission"),
        (4, "gravity load exceeds envelope (value 0)"),
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapabilityMap {
    pub grid: MapGrid,
    pub configuration: MapConfiguration,
    pub requirement: f64,
    /// Row-major `[i_z][j_y]`; `None` where masked.
    pub value: Vec<Vec<Option<f64>>>,
    pub status: Vec<Vec<CellStatus>>,
}

impl CapabilityMap {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.value[i][j]
    }

    pub fn reachable(&self, i: usize, j: usize) -> bool {
        !self.status[i][j].masked()
    }
}

/// Everything the map needs besides the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MapInputs<'a> {
    pub geom: &'a RobotGeometry,
    pub masses: &'a LinkMassModel,
    pub act1: &'a ActuatorSpec,
    pub act2_hs: &'a ActuatorSpec,
    pub act2_hf: &'a ActuatorSpec,
}

/// Default requirement per configuration: 650 N for rehabilitation, 200 kg for transfer.
pub fn default_requirement(configuration: MapConfiguration) -> f64 {
    match configuration {
        MapConfiguration::Rehab => 650.0,
        MapConfiguration::Transfer => 1962.0,
    }
}

/// Largest upward force `f_z >= 0` (with forward force `f_y`) deliverable at a
/// pose. Each actuator force is affine in `f_z`, so the feasible set is an
/// interval and the answer is its upper end.
pub fn cell_capability(inputs: &MapInputs, configuration: MapConfiguration, q_a: f64, q_c: f64, f_y: f64) -> Result<f64, CellStatus> {
    let q = sts_kinematics::JointState::at(q_a, q_c);
    let ja = jacobian_act(inputs.geom, &q);
    if (configuration == MapConfiguration::Rehab && ja[0][0].abs() <= SINGULAR_EPS) || ja[1][1].abs() <= SINGULAR_EPS {
        return Err(CellStatus::Singular);
    }
    let jd = jacobian_dk(inputs.geom, &q);
    let g = gravity_torques(inputs.geom, inputs.masses, &q);
    // force on the user is (f_y, f_z); the load on E is its negative.
    // F_k = (J_dk^T (-f) - g)_k / J_act_kk = base_k + slope_k f_z
    let row = |k: usize, lim: &ActuatorSpec| {
        let base = (-jd[0][k] * f_y - g[k]) / ja[k][k];
        let slope = -jd[1][k] / ja[k][k];
        let (lo, hi) = lim.force_range(true);
        (base, slope, lo, hi)
    };
    let mut rows = Vec::with_capacity(2);
    match configuration {
        MapConfiguration::Rehab => {
            rows.push(row(0, inputs.act1));
            rows.push(row(1, inputs.act2_hs));
        }
        MapConfiguration::Transfer => rows.push(row(1, inputs.act2_hf)),
    }
    let (mut lo_f, mut hi_f) = (0.0_f64, f64::INFINITY);
    for (b, a, lo, hi) in rows {
        if a > 0.0 {
            lo_f = lo_f.max((lo - b) / a);
            hi_f = hi_f.min((hi - b) / a);
        } else if a < 0.0 {
            lo_f = lo_f.max((hi - b) / a);
            hi_f = hi_f.min((lo - b) / a);
        } else if b < lo || b > hi {
            return Err(CellStatus::GravityInfeasible);
        }
    }
    if hi_f < lo_f {
        return Err(CellStatus::GravityInfeasible);
    }
    if !hi_f.is_finite() {
        // link aligned with the load: no actuator bounds f_z
        return Err(CellStatus::Singular);
    }
    Ok(hi_f)
}

fn map_row(inputs: &MapInputs, configuration: MapConfiguration, grid: &MapGrid, i: usize) -> (Vec<Option<f64>>, Vec<CellStatus>) {
    let ny = grid.ny();
    let mut values = Vec::with_capacity(ny);
    let mut status = Vec::with_capacity(ny);
    let z = grid.z(i);
    for j in 0..ny {
        let (v, s) = match inverse_kinematics_unchecked(inputs.geom, [grid.y(j), z]) {
            Err(_) => (None, CellStatus::Unreachable),
            Ok(q) if !inputs.geom.within_limits(q.q_a, q.q_c) => (None, CellStatus::OutOfLimits),
            Ok(q) => match cell_capability(inputs, configuration, q.q_a, q.q_c, grid.f_y) {
                Ok(v) => (Some(v), CellStatus::Ok),
                Err(CellStatus::GravityInfeasible) => (Some(0.0), CellStatus::GravityInfeasible),
                Err(s) => (None, s),
            },
        };
        values.push(v);
        status.push(s);
    }
    (values, status)
}

pub fn capability_map(inputs: &MapInputs, configuration: MapConfiguration, grid: &MapGrid) -> CapabilityMap {
    capability_map_parallel(inputs, configuration, grid, 1)
}

/// Same result as [`capability_map`], rows split across `jobs` threads.
pub fn capability_map_parallel(inputs: &MapInputs, configuration: MapConfiguration, grid: &MapGrid, jobs: usize) -> CapabilityMap {
    let nz = grid.nz();
    let jobs = jobs.clamp(1, nz.max(1));
    let mut rows: Vec<(Vec<Option<f64>>, Vec<CellStatus>)> = vec![(Vec::new(), Vec::new()); nz];
    let chunk = nz.div_ceil(jobs).max(1);
    std::thread::scope(|s| {
        for (c, slot) in rows.chunks_mut(chunk).enumerate() {
            s.spawn(move || {
                for (k, r) in slot.iter_mut().enumerate() {
                    *r = map_row(inputs, configuration, grid, c * chunk + k);
                }
            });
        }
    });
    let (value, status) = rows.into_iter().unzip();
    CapabilityMap { grid: grid.clone(), configuration, requirement: default_requirement(configuration), value, status }
}
