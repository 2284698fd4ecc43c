use serde::{Deserialize, Serialize};
use sts_analysis::{MapConfiguration, MapGrid};
use sts_control::AssistMode;
use sts_sim::{Scenario, ScenarioKind};

/// Parameter lists expanded as a cartesian product over the base scenario.
/// Empty lists leave the base value alone.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    /// `[height, mass]` pairs.
    pub users: Vec<[f64; 2]>,
    pub fz_pct: Vec<f64>,
    pub ky: Vec<f64>,
    pub payload: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSettings {
    pub configurations: Vec<MapConfiguration>,
    pub grid: MapGrid,
    /// User whose seated-to-standing harness path defines the checked band.
    pub band_user: [f64; 2],
    pub rehab_requirement: f64,
    pub transfer_requirement: f64,
    pub min_band_coverage: f64,
}

impl Default for MapSettings {
    fn default() -> Self {
        Self {
            configurations: vec![MapConfiguration::Rehab, MapConfiguration::Transfer],
            grid: MapGrid::default(),
            band_user: [1.91, 100.0],
            rehab_requirement: 650.0,
            transfer_requirement: 1962.0,
            min_band_coverage: 0.95,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSettings {
    /// Also run every STS case without the robot and compare.
    pub transparency: bool,
}

/// Top-level config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub sweep: Sweep,
    pub map: MapSettings,
    pub analysis: AnalysisSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub id: String,
    pub fz_pct: f64,
    pub ky: f64,
    pub payload: f64,
    /// Fully resolved; no derived value is left implicit.
    pub scenario: Scenario,
}

/// What a command executes. Stored in the manifest and loadable on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    pub runs: Vec<RunSpec>,
    pub map: MapSettings,
    pub analysis: AnalysisSettings,
}

fn values(list: &[f64]) -> Vec<Option<f64>> {
    if list.is_empty() {
        vec![None]
    } else {
        list.iter().map(|&v| Some(v)).collect()
    }
}

/// Mode implied by the unloading and spring values.
pub fn mode_for(fz_pct: f64, ky: f64) -> AssistMode {
    match (fz_pct > 0.0, ky > 0.0) {
        (false, false) => AssistMode::FollowMe,
        (true, false) => AssistMode::WeightUnloading,
        _ => AssistMode::CoMBalance,
    }
}

impl RunConfig {
    /// Expands the sweep. When the sweep sets `fz_pct` or `ky`, the assist mode
    /// of each run follows from its values.
    pub fn plan(&self, seed: Option<u64>) -> Plan {
        let base = &self.scenario;
        let users: Vec<Option<[f64; 2]>> =
            if self.sweep.users.is_empty() { vec![None] } else { self.sweep.users.iter().map(|&u| Some(u)).collect() };
        let fz = values(&self.sweep.fz_pct);
        let ky = values(&self.sweep.ky);
        let pl = values(&self.sweep.payload);
        let mut runs = Vec::new();
        for u in &users {
            for f in &fz {
                for k in &ky {
                    for p in &pl {
                        let mut s = base.clone();
                        if let Some(seed) = seed {
                            s.seed = seed;
                        }
                        if let Some([h, m]) = *u {
                            s.human.height = h;
                            s.human.mass = m;
                        }
                        if let Some(v) = *f {
                            s.assist.fz_pct = v;
                        }
                        if let Some(v) = *k {
                            s.assist.ky = v;
                        }
                        if (f.is_some() || k.is_some()) && s.kind == ScenarioKind::Sts {
                            s.assist.mode = mode_for(s.assist.fz_pct, s.assist.ky);
                        }
                        if let Some(v) = *p {
                            s.transfer.payload = v;
                        }
                        let id = format!("run_{:03}", runs.len());
                        runs.push(RunSpec {
                            id,
                            fz_pct: s.assist.fz_pct,
                            ky: s.assist.ky,
                            payload: s.transfer.payload,
                            scenario: s.resolved(),
                        });
                    }
                }
            }
        }
        Plan { runs, map: self.map.clone(), analysis: self.analysis.clone() }
    }
}
