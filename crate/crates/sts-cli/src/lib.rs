//! Command-line front end: loads a scenario config, runs simulations, maps and
//! analyses, and writes CSV/JSON outputs plus a manifest that reproduces them.

mod output;
mod plan;

pub use output::*;
pub use plan::*;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sts_analysis::{
    assistance_error_table, assistance_per_repetition, capability_map_parallel, feet_share_before_seat_off,
    mean, rehab_region_report, sts_metrics, transfer_region_report, transfer_speed_table, transparency_report,
    CapabilityMap, MapConfiguration, MapInputs,
};
use sts_sim::{run_scenario, transparency_pair, ScenarioKind, SimError, SimLog};
use thiserror::Error;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "STS_OUT_DIR";
pub const DEFAULT_OUT: &str = "sts-out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical divergence: {0}")]
    Divergence(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Divergence(_) => EXIT_DIVERGENCE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NumericalDivergence { .. } => CliError::Divergence(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sts", version, about = "Sit-to-stand assist robot simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every scenario of the config and write logs.
    Simulate(CommonArgs),
    /// Compute the workspace force-capability maps.
    Map(CommonArgs),
    /// Run the scenarios and write metric and summary tables.
    Analyze(CommonArgs),
    /// Check the config without running anything.
    Validate(ValidateArgs),
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// TOML config, or a manifest.json from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_ENV, default_value = DEFAULT_OUT)]
    pub out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args, Clone)]
pub struct ValidateArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: Option<u64>,
    pub plan: Plan,
}

/// Parses a TOML config or the `plan` of a manifest.
pub fn load_plan(path: Option<&Path>, seed: Option<u64>) -> Result<Plan, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default().plan(seed));
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        #[derive(serde::Deserialize)]
        struct M {
            plan: Plan,
        }
        let m: M = serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let mut plan = m.plan;
        if let Some(s) = seed {
            plan.runs.iter_mut().for_each(|r| r.scenario.seed = s);
        }
        return Ok(plan);
    }
    let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(cfg.plan(seed))
}

/// Errors are fatal, warnings are returned.
pub fn validate_plan(plan: &Plan) -> Result<Vec<String>, CliError> {
    let mut errors = Vec::new();
    let mut warnings = Vec::new();
    for r in &plan.runs {
        if let Err(e) = r.scenario.validate() {
            errors.push(format!("{}: {e}", r.id));
        }
        warnings.extend(r.scenario.warnings().into_iter().map(|w| format!("{}: warning: {w}", r.id)));
    }
    if let Err(e) = plan.map.grid.validate() {
        errors.push(format!("map.grid: {e}"));
    }
    warnings.sort();
    warnings.dedup();
    if errors.is_empty() {
        Ok(warnings)
    } else {
        Err(CliError::Validation(errors.join("\n")))
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Validate(a) => cmd_validate(&a),
        Command::Simulate(a) => cmd_simulate(&a, "simulate").map(|_| ()),
        Command::Map(a) => cmd_map(&a).map(|_| ()),
        Command::Analyze(a) => cmd_analyze(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point taking raw arguments (program name first).
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

fn cmd_validate(a: &ValidateArgs) -> Result<(), CliError> {
    let plan = load_plan(a.config.as_deref(), a.seed)?;
    for w in validate_plan(&plan)? {
        eprintln!("{w}");
    }
    println!("ok: {} run(s) valid", plan.runs.len());
    Ok(())
}

fn prepare(a: &CommonArgs, command: &str) -> Result<Plan, CliError> {
    let plan = load_plan(a.config.as_deref(), a.seed)?;
    for w in validate_plan(&plan)? {
        eprintln!("{w}");
    }
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        config_path: a.config.clone(),
        output_dir: a.out.clone(),
        seed: a.seed,
        plan: plan.clone(),
    };
    write_json(&a.out.join("manifest.json"), &manifest)?;
    Ok(plan)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Debug, Serialize)]
struct RunSummary {
    id: String,
    kind: ScenarioKind,
    rows: usize,
    saturated_steps: [usize; 2],
    limit_hits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sts: Option<StsSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transfer: Option<sts_analysis::TransferSpeedRow>,
}

#[derive(Debug, Serialize)]
struct StsSummary {
    metrics: Vec<sts_analysis::StsMetrics>,
    normalized: Vec<sts_analysis::StsMetrics>,
    measured_assistance: Vec<f64>,
    feet_share_before_seat_off: Vec<f64>,
}

fn summarize(spec: &RunSpec, log: &SimLog) -> Result<RunSummary, CliError> {
    let count = |f: fn(&sts_sim::LogRow) -> f64| log.rows.iter().filter(|r| f(r) > 0.5).count();
    let h = &spec.scenario.human;
    let mut out = RunSummary {
        id: spec.id.clone(),
        kind: spec.scenario.kind,
        rows: log.rows.len(),
        saturated_steps: [count(|r| r.sat_1), count(|r| r.sat_2)],
        limit_hits: count(|r| r.limit_hit),
        sts: None,
        transfer: None,
    };
    let bad = |e: sts_analysis::AnalysisError| CliError::Validation(format!("{}: {e}", spec.id));
    match spec.scenario.kind {
        ScenarioKind::Sts => {
            let metrics = sts_metrics(log).map_err(bad)?;
            out.sts = Some(StsSummary {
                normalized: metrics.iter().map(|m| m.normalized(h.height, h.mass)).collect(),
                metrics,
                measured_assistance: assistance_per_repetition(log).map_err(bad)?,
                feet_share_before_seat_off: feet_share_before_seat_off(log),
            });
        }
        ScenarioKind::Transfer => {
            out.transfer = transfer_speed_table(&[(spec.payload, log)]).map_err(bad)?.pop();
        }
    }
    Ok(out)
}

/// Runs every scenario, writing `<out>/<id>/log.csv` and `summary.json`.
pub fn cmd_simulate(a: &CommonArgs, command: &str) -> Result<(Plan, Vec<SimLog>), CliError> {
    let plan = prepare(a, command)?;
    let logs: Vec<Result<SimLog, CliError>> = pool(a.jobs)?.install(|| {
        plan.runs
            .par_iter()
            .map(|r| {
                let log = run_scenario(&r.scenario)?;
                let dir = a.out.join(&r.id);
                std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
                write_log(&dir.join("log.csv"), &log)?;
                write_json(&dir.join("summary.json"), &summarize(r, &log)?)?;
                Ok(log)
            })
            .collect()
    });
    let logs = logs.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok((plan, logs))
}

/// Map inputs taken from the first run's scenario.
pub fn compute_maps(plan: &Plan, jobs: usize) -> Vec<(CapabilityMap, serde_json::Value)> {
    let s = plan.runs.first().map(|r| r.scenario.clone()).unwrap_or_default();
    let inputs = MapInputs {
        geom: &s.geometry,
        masses: &s.masses,
        act1: &s.actuators.act1,
        act2_hs: &s.actuators.act2_hs,
        act2_hf: &s.actuators.act2_hf,
    };
    let mut user = s.human.clone();
    user.height = plan.map.band_user[0];
    user.mass = plan.map.band_user[1];
    for f in [&mut user.seated_com, &mut user.standing_com] {
        *f = None;
    }
    let p = user.resolve();
    let path = [p.harness_point(p.seated_com), p.harness_point(p.standing_com)];
    plan.map
        .configurations
        .iter()
        .map(|&c| {
            let mut map = capability_map_parallel(&inputs, c, &plan.map.grid, jobs);
            let report = match c {
                MapConfiguration::Rehab => {
                    map.requirement = plan.map.rehab_requirement;
                    serde_json::to_value(rehab_region_report(&map, &path, plan.map.min_band_coverage))
                }
                MapConfiguration::Transfer => {
                    map.requirement = plan.map.transfer_requirement;
                    serde_json::to_value(transfer_region_report(&map, &path))
                }
            }
            .expect("report serializes");
            (map, report)
        })
        .collect()
}

pub fn cmd_map(a: &CommonArgs) -> Result<Vec<CapabilityMap>, CliError> {
    let plan = prepare(a, "map")?;
    let mut out = Vec::new();
    for (map, report) in compute_maps(&plan, a.jobs) {
        let name = match map.configuration {
            MapConfiguration::Rehab => "map_rehab",
            MapConfiguration::Transfer => "map_transfer",
        };
        write_map(&a.out.join(format!("{name}.csv")), &map)?;
        let meta = serde_json::json!({
            "configuration": map.configuration,
            "requirement_n": map.requirement,
            "grid": map.grid,
            "status_legend": map_legend().into_iter().map(|(c, s)| serde_json::json!({"code": c, "meaning": s})).collect::<Vec<_>>(),
            "regions": report,
        });
        write_json(&a.out.join(format!("{name}.json")), &meta)?;
        out.push(map);
    }
    Ok(out)
}

fn cmd_analyze(a: &CommonArgs) -> Result<(), CliError> {
    let (plan, logs) = cmd_simulate(a, "analyze")?;
    let sts: Vec<(&RunSpec, &SimLog)> =
        plan.runs.iter().zip(&logs).filter(|(r, _)| r.scenario.kind == ScenarioKind::Sts).collect();
    let transfer: Vec<(&RunSpec, &SimLog)> =
        plan.runs.iter().zip(&logs).filter(|(r, _)| r.scenario.kind == ScenarioKind::Transfer).collect();
    let bad = |e: sts_analysis::AnalysisError| CliError::Validation(e.to_string());

    if !sts.is_empty() {
        let mut rows = Vec::new();
        for (r, log) in &sts {
            let h = &r.scenario.human;
            for m in sts_metrics(log).map_err(bad)? {
                let n = m.normalized(h.height, h.mass);
                let mut row = vec![r.id.clone(), m.repetition.to_string()];
                for v in [
                    h.height, h.mass, r.fz_pct, r.ky, m.displacement[0], m.displacement[1], m.peak_velocity[0], m.peak_velocity[1],
                    m.peak_acceleration[0], m.peak_acceleration[1], m.peak_feet_grf, m.peak_chair_grf,
                    m.seat_off_time.unwrap_or(f64::NAN), n.peak_velocity[0], n.peak_velocity[1], n.peak_feet_grf, n.peak_chair_grf,
                ] {
                    row.push(num(v));
                }
                rows.push(row);
            }
        }
        write_table(
            &a.out.join("metrics.csv"),
            &[
                "run", "rep", "height[m]", "mass[kg]", "fz_pct[1]", "ky[N/m]", "disp_y[m]", "disp_z[m]", "peak_vy[m/s]",
                "peak_vz[m/s]", "peak_ay[m/s^2]", "peak_az[m/s^2]", "peak_feet_fz[N]", "peak_chair_fz[N]",
                "seat_off_time[s]", "peak_vy_norm[1/s]", "peak_vz_norm[1/s]", "peak_feet_fz_norm[1]", "peak_chair_fz_norm[1]",
            ],
            &rows,
        )?;

        let grouped: Vec<(f64, &SimLog)> = sts.iter().map(|(r, l)| (r.fz_pct, *l)).collect();
        let table = assistance_error_table(&grouped).map_err(bad)?;
        let rows: Vec<Vec<String>> = table
            .iter()
            .map(|t| vec![num(t.target), num(t.mean_error), num(t.sd_error), t.samples.to_string()])
            .collect();
        write_table(&a.out.join("assistance_error.csv"), &["target[1]", "mean_error[1]", "sd_error[1]", "samples"], &rows)?;

        let rows: Vec<Vec<String>> = sts
            .iter()
            .map(|(r, l)| {
                let h = &r.scenario.human;
                vec![r.id.clone(), num(h.height), num(h.mass), num(r.fz_pct), num(r.ky), num(mean(&feet_share_before_seat_off(l)))]
            })
            .collect();
        write_table(
            &a.out.join("feet_share.csv"),
            &["run", "height[m]", "mass[kg]", "fz_pct[1]", "ky[N/m]", "feet_share_pre_seat_off[1]"],
            &rows,
        )?;

        if plan.analysis.transparency {
            let pairs: Vec<Result<Vec<String>, CliError>> = pool(a.jobs)?.install(|| {
                sts.par_iter()
                    .map(|(r, _)| {
                        let mut wor = r.scenario.clone();
                        wor.robot_attached = false;
                        let (wr_log, wor_log) = transparency_pair(&r.scenario, &wor)?;
                        let t = transparency_report(&wr_log, &wor_log).map_err(bad)?;
                        Ok(vec![
                            r.id.clone(),
                            num(t.cmc_vy),
                            num(t.cmc_vz),
                            num(t.peak_feet_grf_diff),
                            num(t.peak_chair_grf_diff),
                            num(t.peak_vz_ratio),
                        ])
                    })
                    .collect()
            });
            let rows = pairs.into_iter().collect::<Result<Vec<_>, _>>()?;
            write_table(
                &a.out.join("transparency.csv"),
                &["run", "cmc_vy[1]", "cmc_vz[1]", "peak_feet_diff_bw[1]", "peak_chair_diff_bw[1]", "peak_vz_ratio[1]"],
                &rows,
            )?;
        }
    }

    if !transfer.is_empty() {
        let pairs: Vec<(f64, &SimLog)> = transfer.iter().map(|(r, l)| (r.payload, *l)).collect();
        let rows: Vec<Vec<String>> = transfer_speed_table(&pairs)
            .map_err(bad)?
            .iter()
            .map(|t| vec![num(t.payload), num(t.lifting), num(t.lowering), num(t.asymmetry)])
            .collect();
        write_table(
            &a.out.join("transfer_speed.csv"),
            &["payload[kg]", "lifting[m/s]", "lowering[m/s]", "asymmetry[1]"],
            &rows,
        )?;
    }
    Ok(())
}
