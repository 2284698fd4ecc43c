use std::path::Path;
use std::process::Command;

fn sts(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_sts"))
        .args(args)
        .env("STS_OUT_DIR", out)
        .output()
        .expect("binary runs");
    (o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into(), String::from_utf8_lossy(&o.stderr).into())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const SHORT: &str = r#"
[scenario]
repetitions = 1
pause = 0.5
settle = 0.3
seed = 4

[scenario.assist]
mode = "weight_unloading"
fz_pct = 0.1

[scenario.human]
height = 1.75
mass = 80.0
"#;

#[test]
fn validate_accepts_defaults_and_rejects_bad_modes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout, _) = sts(&["validate"], dir.path());
    assert_eq!(code, 0);
    assert!(stdout.starts_with("ok:"));

    let bad = write(dir.path(), "bad.toml", "[scenario.assist]\nmode = \"follow_me\"\nfz_pct = 0.1\n");
    let (code, _, stderr) = sts(&["validate", "--config", &bad], dir.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("assist"), "{stderr}");

    let unknown = write(dir.path(), "unknown.toml", "[scenario]\nbogus = 1\n");
    assert_eq!(sts(&["validate", "--config", &unknown], dir.path()).0, 2);
    let missing = dir.path().join("nope.toml");
    assert_eq!(sts(&["validate", "--config", missing.to_str().unwrap()], dir.path()).0, 2);
    assert_eq!(sts(&["frobnicate"], dir.path()).0, 2);
    assert_eq!(sts(&["--help"], dir.path()).0, 0);
}

#[test]
fn diverging_run_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "stiff.toml",
        "[scenario]\nrepetitions = 1\npause = 0.2\nsettle = 0.1\ndt = 0.005\n[scenario.harness]\nk = 1.0e9\nc = 0.0\n",
    );
    let (code, _, stderr) = sts(&["simulate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()], dir.path());
    assert_eq!(code, 3, "{stderr}");
    assert!(stderr.contains("divergence"));
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let cfg = write(dir.path(), "short.toml", SHORT);
    let out = blocker.join("sub");
    assert_eq!(sts(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()], dir.path()).0, 1);
}

#[test]
fn reruns_are_byte_identical_and_manifest_replays() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "short.toml", SHORT);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    assert_eq!(sts(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()], dir.path()).0, 0);
    assert_eq!(sts(&["simulate", "--config", &cfg, "--out", b.to_str().unwrap(), "--jobs", "2"], dir.path()).0, 0);
    let log_a = std::fs::read(a.join("run_000/log.csv")).unwrap();
    assert!(log_a == std::fs::read(b.join("run_000/log.csv")).unwrap(), "rerun log differs");
    assert_eq!(std::fs::read(a.join("run_000/summary.json")).unwrap(), std::fs::read(b.join("run_000/summary.json")).unwrap());

    let text = String::from_utf8(log_a.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema: sts-log/1"));
    let header = lines.next().unwrap();
    assert!(header.starts_with("t[s],"));
    assert!(header.contains("chair_fz[N]") && header.contains("com_vz[m/s]"));
    let width = header.split(',').count();
    assert!(lines.all(|l| l.split(',').count() == width));

    let manifest = a.join("manifest.json");
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(&manifest).unwrap()).unwrap();
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["plan"]["runs"][0]["scenario"]["seed"], 4);
    // resolved human parameters are written out
    assert!(m["plan"]["runs"][0]["scenario"]["human"]["seated_com"].is_array());
    assert_eq!(sts(&["simulate", "--config", manifest.to_str().unwrap(), "--out", c.to_str().unwrap()], dir.path()).0, 0);
    assert!(log_a == std::fs::read(c.join("run_000/log.csv")).unwrap(), "replayed log differs");
}

#[test]
fn out_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "short.toml", SHORT);
    let out = dir.path().join("env_out");
    assert_eq!(sts(&["simulate", "--config", &cfg], &out).0, 0);
    assert!(out.join("run_000/log.csv").exists());
}

#[test]
fn map_command_writes_grids_and_region_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    assert_eq!(sts(&["map", "--out", out.to_str().unwrap(), "--jobs", "2"], dir.path()).0, 0);
    let csv = std::fs::read_to_string(out.join("map_rehab.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema: sts-map/1"));
    assert_eq!(lines.next(), Some("y[m],z[m],f_z_max[N],status[1]"));
    assert_eq!(lines.count(), 61 * 71);
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("map_transfer.json")).unwrap()).unwrap();
    assert_eq!(meta["requirement_n"], 1962.0);
    assert!(meta["regions"]["pass"].is_boolean());
    assert_eq!(meta["status_legend"].as_array().unwrap().len(), 5);
}

#[test]
fn analyze_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        &format!("{SHORT}\n[sweep]\nfz_pct = [0.0, 0.1]\n\n[analysis]\ntransparency = true\n"),
    );
    let out = dir.path().join("an");
    let (code, _, stderr) = sts(&["analyze", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", "2"], dir.path());
    assert_eq!(code, 0, "{stderr}");
    for f in ["metrics.csv", "assistance_error.csv", "feet_share.csv", "transparency.csv", "run_000/log.csv", "run_001/log.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let table = std::fs::read_to_string(out.join("assistance_error.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("run_000/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["kind"], "sts");
}

#[test]
fn sweep_derives_modes_and_ids() {
    let cfg: sts_cli::RunConfig = toml::from_str("[sweep]\nfz_pct = [0.0, 0.05]\nky = [0.0, 200.0]\nusers = [[1.65, 60.0], [1.91, 100.0]]\n").unwrap();
    let plan = cfg.plan(Some(9));
    assert_eq!(plan.runs.len(), 8);
    assert_eq!(plan.runs[7].id, "run_007");
    assert!(plan.runs.iter().all(|r| r.scenario.seed == 9));
    use sts_control::AssistMode::*;
    let modes: Vec<_> = plan.runs[..4].iter().map(|r| r.scenario.assist.mode).collect();
    assert_eq!(modes, vec![FollowMe, CoMBalance, WeightUnloading, CoMBalance]);
    assert_eq!(sts_cli::mode_for(0.0, 200.0), CoMBalance);
    // a spring without unloading has no valid mode
    let err = sts_cli::validate_plan(&plan).unwrap_err().to_string();
    assert!(err.contains("run_001") && !err.contains("run_000"), "{err}");
    let ok: sts_cli::RunConfig = toml::from_str("[sweep]\nfz_pct = [0.05]\nky = [0.0, 200.0, 300.0]\n").unwrap();
    assert!(sts_cli::validate_plan(&ok.plan(None)).is_ok());
}
