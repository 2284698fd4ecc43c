use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sts_actuators::ActuatorSpec;
use sts_analysis::*;
use sts_kinematics::{
    gravity_torques, jacobian_act, jacobian_dk, solve, transpose, JointState, LinkMassModel, RobotGeometry, GRAVITY,
};
use sts_sim::{LogRow, RepetitionInfo, SimLog, PHASE_DOWN, PHASE_HOLD, PHASE_PAUSE, PHASE_RISE, PHASE_UP};

/// Textbook two-pass CMC, written independently of the library.
fn cmc_reference(y: &[Vec<f64>]) -> f64 {
    let (w, t) = (y.len() as f64, y[0].len() as f64);
    let n = y[0].len();
    let col_mean: Vec<f64> = (0..n).map(|k| y.iter().map(|r| r[k]).sum::<f64>() / w).collect();
    let grand = col_mean.iter().sum::<f64>() / t;
    let mut num = 0.0;
    let mut den = 0.0;
    for r in y {
        for k in 0..n {
            num += (r[k] - col_mean[k]).powi(2);
            den += (r[k] - grand).powi(2);
        }
    }
    let ratio = (num / (t * (w - 1.0))) / (den / (w * t - 1.0));
    (1.0 - ratio).max(0.0).sqrt()
}

#[test]
fn cmc_hand_computed_value() {
    // grand mean 2.5, within variance 0.5, total variance 1.1
    let v = cmc(&[vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0]]).unwrap();
    assert!((v - (6.0f64 / 11.0).sqrt()).abs() < 1e-12);
    assert!((v - 0.738_548_945_875_996).abs() < 1e-12);
}

#[test]
fn cmc_matches_reference_on_random_waveforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let w = rng.gen_range(2..6);
        let t = rng.gen_range(2..300);
        let base: Vec<f64> = (0..t).map(|k| (k as f64 * 0.05).sin()).collect();
        let noise = rng.gen_range(0.0..2.0);
        let y: Vec<Vec<f64>> = (0..w).map(|_| base.iter().map(|b| b + noise * rng.gen_range(-1.0..1.0)).collect()).collect();
        let got = cmc(&y).unwrap();
        assert!((got - cmc_reference(&y)).abs() < 1e-12);
    }
}

#[test]
fn cmc_limits() {
    let ramp: Vec<f64> = (0..100).map(|k| k as f64).collect();
    let rev: Vec<f64> = ramp.iter().rev().copied().collect();
    assert!((cmc(&[ramp.clone(), ramp.clone(), ramp.clone()]).unwrap() - 1.0).abs() < 1e-12);
    assert!(cmc(&[ramp.clone(), rev]).unwrap() < 1e-6);
    assert!(matches!(cmc(&[vec![3.0; 10], vec![3.0; 10]]), Err(AnalysisError::DegenerateInput(_))));
    assert!(matches!(cmc(&[ramp.clone()]), Err(AnalysisError::InvalidInput(_))));
    assert!(matches!(cmc(&[ramp.clone(), vec![1.0; 5]]), Err(AnalysisError::InvalidInput(_))));
    assert!(matches!(cmc(&[vec![1.0, f64::NAN], vec![1.0, 2.0]]), Err(AnalysisError::InvalidInput(_))));
}

proptest! {
    #[test]
    fn cmc_is_affine_invariant(a in 0.1f64..10.0, b in -100.0f64..100.0, seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<Vec<f64>> = (0..3).map(|_| (0..50).map(|k| (k as f64 * 0.1).cos() + 0.3 * rng.gen_range(-1.0..1.0)).collect()).collect();
        let z: Vec<Vec<f64>> = y.iter().map(|r| r.iter().map(|v| a * v + b).collect()).collect();
        prop_assert!((cmc(&y).unwrap() - cmc(&z).unwrap()).abs() < 1e-9);
    }
}

struct Setup {
    geom: RobotGeometry,
    masses: LinkMassModel,
    act1: ActuatorSpec,
    hs: ActuatorSpec,
    hf: ActuatorSpec,
}

impl Setup {
    fn new() -> Self {
        Self {
            geom: RobotGeometry::default(),
            masses: LinkMassModel::default(),
            act1: ActuatorSpec::actuator_1(),
            hs: ActuatorSpec::actuator_2_hs(),
            hf: ActuatorSpec::actuator_2_hf(),
        }
    }

    fn inputs(&self) -> MapInputs<'_> {
        MapInputs { geom: &self.geom, masses: &self.masses, act1: &self.act1, act2_hs: &self.hs, act2_hf: &self.hf }
    }
}

/// Actuator tensions holding the arm against gravity and the user's reaction
/// to `(f_y, f_z)`, found with a general 2x2 solve.
fn feasible(s: &Setup, cfg: MapConfiguration, q: &JointState, f: [f64; 2]) -> bool {
    let jd = jacobian_dk(&s.geom, q);
    let g = gravity_torques(&s.geom, &s.masses, q);
    let rhs = [-(jd[0][0] * f[0] + jd[1][0] * f[1]) - g[0], -(jd[0][1] * f[0] + jd[1][1] * f[1]) - g[1]];
    let ja = jacobian_act(&s.geom, q);
    match cfg {
        MapConfiguration::Rehab => {
            let t = solve(&transpose(&ja), rhs).unwrap();
            let (l1, h1) = s.act1.force_range(true);
            let (l2, h2) = s.hs.force_range(true);
            t[0] >= l1 - 1e-9 && t[0] <= h1 + 1e-9 && t[1] >= l2 - 1e-9 && t[1] <= h2 + 1e-9
        }
        MapConfiguration::Transfer => {
            let t = rhs[1] / ja[1][1];
            let (l, h) = s.hf.force_range(true);
            t >= l - 1e-9 && t <= h + 1e-9
        }
    }
}

#[test]
fn cell_capability_is_the_feasibility_boundary() {
    let s = Setup::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for _ in 0..300 {
        let q = JointState::at(rng.gen_range(-1.6..-0.33), rng.gen_range(-0.3..1.2));
        let f_y = rng.gen_range(-100.0..100.0);
        for cfg in [MapConfiguration::Rehab, MapConfiguration::Transfer] {
            match cell_capability(&s.inputs(), cfg, q.q_a, q.q_c, f_y) {
                Ok(v) => {
                    checked += 1;
                    assert!(feasible(&s, cfg, &q, [f_y, v * (1.0 - 1e-9)]));
                    assert!(!feasible(&s, cfg, &q, [f_y, v + 1e-3 * v.max(1.0)]));
                }
                Err(CellStatus::GravityInfeasible) => {
                    for fz in [0.0, 10.0, 100.0, 1000.0, 5000.0] {
                        assert!(!feasible(&s, cfg, &q, [f_y, fz]));
                    }
                }
                Err(other) => panic!("unexpected status {other:?}"),
            }
        }
    }
    assert!(checked > 400);
}

fn small_grid() -> MapGrid {
    MapGrid { resolution: 0.05, ..Default::default() }
}

#[test]
fn map_grows_with_actuator_limits() {
    let s = Setup::new();
    let mut strong = Setup::new();
    strong.act1.f_max_peak *= 1.5;
    strong.hs.f_max_peak *= 1.5;
    strong.hf.f_max_peak *= 1.5;
    for cfg in [MapConfiguration::Rehab, MapConfiguration::Transfer] {
        let a = capability_map(&s.inputs(), cfg, &small_grid());
        let b = capability_map(&strong.inputs(), cfg, &small_grid());
        for i in 0..a.grid.nz() {
            for j in 0..a.grid.ny() {
                if let (Some(x), Some(y)) = (a.get(i, j), b.get(i, j)) {
                    assert!(y >= x - 1e-9);
                }
                assert_eq!(a.reachable(i, j), b.reachable(i, j));
            }
        }
    }
}

#[test]
fn zero_limits_give_zero_capability() {
    let mut s = Setup::new();
    s.masses = LinkMassModel::massless();
    for spec in [&mut s.act1, &mut s.hs, &mut s.hf] {
        spec.f_max_cont = 0.0;
        spec.f_max_peak = 0.0;
    }
    for cfg in [MapConfiguration::Rehab, MapConfiguration::Transfer] {
        let m = capability_map(&s.inputs(), cfg, &small_grid());
        let vals: Vec<f64> = m.value.iter().flatten().flatten().copied().collect();
        assert!(!vals.is_empty());
        assert!(vals.iter().all(|v| v.abs() < 1e-9));
    }
}

#[test]
fn parallel_map_equals_serial() {
    let s = Setup::new();
    let a = capability_map(&s.inputs(), MapConfiguration::Rehab, &small_grid());
    let b = capability_map_parallel(&s.inputs(), MapConfiguration::Rehab, &small_grid(), 4);
    assert_eq!(a, b);
}

#[test]
fn map_masks_cells_outside_the_workspace() {
    let s = Setup::new();
    let m = capability_map(&s.inputs(), MapConfiguration::Rehab, &MapGrid { y_range: [3.0, 3.1], ..small_grid() });
    assert!(m.status.iter().flatten().all(|&st| st == CellStatus::Unreachable));
    assert!(m.value.iter().flatten().all(Option::is_none));
    let codes: Vec<u8> = CellStatus::LEGEND.iter().map(|(c, _)| *c).collect();
    assert_eq!(codes, vec![0, 1, 2, 3, 4]);
    assert!(!CellStatus::GravityInfeasible.masked() && CellStatus::Singular.masked());
}

#[test]
fn grid_indexing() {
    let g = MapGrid::default();
    assert_eq!((g.ny(), g.nz()), (61, 71));
    assert_eq!(g.cell_of([0.0, 1.0]), Some((40, 10)));
    assert_eq!(g.cell_of([2.0, 1.0]), None);
    assert!(MapGrid { resolution: 0.0, ..g.clone() }.validate().is_err());
}

#[test]
fn connected_components_use_eight_neighbours() {
    let blobs = [(0, 0), (0, 1), (3, 3), (4, 4), (7, 0)];
    let comps = components(8, 8, |i, j| blobs.contains(&(i, j)));
    assert_eq!(comps.len(), 3);
    assert_eq!(comps[1], vec![(3, 3), (4, 4)]);
    assert!(components(4, 4, |_, _| false).is_empty());
}

#[test]
fn band_follows_the_path() {
    let g = MapGrid { y_range: [0.0, 1.0], z_range: [0.0, 1.0], resolution: 0.1, f_y: 0.0 };
    let cells = band_cells(&g, &[[0.0, 0.0], [0.0, 0.5]]);
    assert_eq!(cells, (0..=5).map(|i| (i, 0)).collect::<Vec<_>>());
}

fn synthetic_map(values: Vec<Vec<Option<f64>>>, requirement: f64) -> CapabilityMap {
    let nz = values.len();
    let ny = values[0].len();
    let status = values
        .iter()
        .map(|r| r.iter().map(|v| if v.is_some() { CellStatus::Ok } else { CellStatus::Unreachable }).collect())
        .collect();
    CapabilityMap {
        grid: MapGrid { y_range: [0.0, (ny - 1) as f64], z_range: [0.0, (nz - 1) as f64], resolution: 1.0, f_y: 0.0 },
        configuration: MapConfiguration::Rehab,
        requirement,
        value: values,
        status,
    }
}

#[test]
fn region_predicates_on_synthetic_maps() {
    let (lo, hi) = (Some(1.0), Some(10.0));
    // deficit on the bottom row only, band in the upper rows
    let m = synthetic_map(vec![vec![lo, lo, lo, None], vec![hi, hi, hi, None], vec![hi, hi, hi, hi]], 5.0);
    let r = rehab_region_report(&m, &[[0.0, 1.0], [2.0, 2.0]], 0.95);
    assert!(r.pass, "{r:?}");
    assert_eq!(r.deficit_top_z, Some(0.0));
    let t = transfer_region_report(&m, &[[0.0, 2.0], [3.0, 2.0]]);
    assert!(t.pass && t.touches_forward_reach && !t.intersects_band, "{t:?}");
    let t = transfer_region_report(&m, &[[0.0, 0.0], [0.0, 2.0]]);
    assert!(!t.pass && t.intersects_band);

    // two separate deficit patches
    let m = synthetic_map(vec![vec![lo, hi, lo], vec![hi, hi, hi], vec![hi, hi, hi]], 5.0);
    assert_eq!(rehab_region_report(&m, &[[0.0, 2.0], [2.0, 2.0]], 0.95).deficit_components, 2);
    // deficit reaching the band height
    let m = synthetic_map(vec![vec![lo, hi], vec![lo, hi]], 5.0);
    assert!(!rehab_region_report(&m, &[[1.0, 1.0], [1.0, 1.0]], 0.5).pass);
}

#[test]
fn motion_windows_ignore_short_blips() {
    let dt = 0.01;
    let mut v = vec![0.0; 300];
    for x in &mut v[50..60] {
        *x = 1.0; // shorter than the hold
    }
    for x in &mut v[100..200] {
        *x = 1.0;
    }
    v[150] = 0.0;
    let w = motion_windows(&v, dt, 0.02, 0.2);
    assert_eq!(w, vec![(100, 200)]);
    let w = motion_windows(&v[..180], dt, 0.02, 0.2);
    assert_eq!(w, vec![(100, 180)]);
    assert!(motion_windows(&[0.0; 10], dt, 0.02, 0.1).is_empty());
}

fn min_jerk_log(dz: f64, t_move: f64, dt: f64, mass: f64) -> SimLog {
    let n = ((t_move + 1.0) / dt).round() as usize;
    let rows = (0..n)
        .map(|k| {
            let t = k as f64 * dt - 0.5;
            let (s, sd, sdd) = sts_human::min_jerk(t / t_move);
            LogRow {
                t: k as f64 * dt,
                t_rep: k as f64 * dt,
                phase: PHASE_RISE,
                com_y: 0.2 * s * dz,
                com_vy: 0.2 * sd * dz / t_move,
                com_z: 0.7 + s * dz,
                com_vz: sd * dz / t_move,
                com_az: sdd * dz / (t_move * t_move),
                feet_fz: mass * GRAVITY * (0.5 + 0.5 * s),
                chair_fz: mass * GRAVITY * 0.5 * (1.0 - s),
                seat_off: if s > 0.5 { 1.0 } else { 0.0 },
                ..Default::default()
            }
        })
        .collect();
    SimLog {
        dt,
        user_mass: mass,
        user_height: 1.75,
        rows,
        repetitions: vec![RepetitionInfo { index: 0, sts_duration: t_move, start: 0, len: n }],
    }
}

#[test]
fn metrics_of_a_min_jerk_rise() {
    let (dz, tm, dt) = (0.3, 2.0, 1e-3);
    let log = min_jerk_log(dz, tm, dt, 80.0);
    let m = &sts_metrics(&log).unwrap()[0];
    assert!((m.peak_velocity[1] - 1.875 * dz / tm).abs() < 1e-6);
    assert!((m.peak_acceleration[1] - 10.0 / 3f64.sqrt() * dz / (tm * tm)).abs() < 1e-4);
    // the window trims both tails where the speed is under the threshold
    let c = (MOTION_THRESHOLD * tm / (30.0 * dz)).sqrt();
    let tau = (1.0 - (1.0 - 4.0 * c).sqrt()) / 2.0;
    let trimmed = dz * (1.0 - 2.0 * sts_human::min_jerk(tau).0);
    assert!((m.displacement[1] - trimmed).abs() < 1e-4, "{} vs {trimmed}", m.displacement[1]);
    assert!(m.window_start > 0.5 && m.window_start < 0.8);
    assert!((m.seat_off_time.unwrap() + m.window_start - 1.5).abs() < 2e-3);
    let s_end = 1.0 - sts_human::min_jerk(tau).0;
    assert!((m.peak_feet_grf - 80.0 * GRAVITY * (0.5 + 0.5 * s_end)).abs() < 0.05);

    let n = m.normalized(1.75, 80.0);
    assert!((n.peak_velocity[1] - m.peak_velocity[1] / 1.75).abs() < 1e-15);
    assert!((n.peak_feet_grf - m.peak_feet_grf / (80.0 * GRAVITY)).abs() < 1e-15);
    assert_eq!(n.window_start, m.window_start);
    assert_eq!(sts_metrics_normalized(&log, 1.75, 80.0).unwrap()[0].1, n);
}

#[test]
fn feet_share_until_seat_off() {
    let log = min_jerk_log(0.3, 2.0, 1e-3, 80.0);
    let share = feet_share_before_seat_off(&log);
    assert_eq!(share.len(), 1);
    // share = 0.5 + 0.5 s, averaged over rows before s passes 0.5
    assert!(share[0] > 0.5 && share[0] < 0.75);
}

#[test]
fn summary_statistics() {
    assert!((mean(&[1.0, 2.0, 6.0]) - 3.0).abs() < 1e-15);
    assert!((sample_sd(&[1.0, 2.0, 3.0, 4.0]) - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert_eq!(sample_sd(&[4.0]), 0.0);
    assert!(mean(&[]).is_nan());
}

fn unloaded_log(target: f64, mass: f64, reps: usize) -> SimLog {
    let w = mass * GRAVITY;
    let mut rows = Vec::new();
    let mut repetitions = Vec::new();
    for r in 0..reps {
        let start = rows.len();
        for k in 0..100 {
            let rise = k < 60;
            let split = k as f64 / 100.0;
            rows.push(LogRow {
                rep: r as f64,
                phase: if rise { PHASE_RISE } else { PHASE_PAUSE },
                chair_fz: if rise { (1.0 - target) * w * (1.0 - split) } else { 0.0 },
                feet_fz: if rise { (1.0 - target) * w * split } else { w },
                ..Default::default()
            });
        }
        repetitions.push(RepetitionInfo { index: r, sts_duration: 0.06, start, len: 100 });
    }
    SimLog { dt: 1e-3, user_mass: mass, user_height: 1.7, rows, repetitions }
}

#[test]
fn assistance_table_from_force_plates() {
    let a = unloaded_log(0.1, 70.0, 3);
    let b = unloaded_log(0.1, 90.0, 2);
    let c = unloaded_log(0.0, 80.0, 4);
    let per = assistance_per_repetition(&a).unwrap();
    assert_eq!(per.len(), 3);
    assert!(per.iter().all(|v| (v - 0.1).abs() < 1e-12));
    let table = assistance_error_table(&[(0.1, &a), (0.0, &c), (0.1, &b)]).unwrap();
    assert_eq!(table.len(), 2);
    assert_eq!((table[0].target, table[0].samples), (0.0, 4));
    assert_eq!((table[1].target, table[1].samples), (0.1, 5));
    assert!(table.iter().all(|r| r.mean_error.abs() < 1e-12 && r.sd_error < 1e-12));
}

fn transfer_log(up: f64, down: f64) -> SimLog {
    let dt = 0.01;
    let mut rows = Vec::new();
    for (phase, v, n) in [(PHASE_UP, up, 500), (PHASE_HOLD, 0.0, 100), (PHASE_DOWN, -down, 500), (PHASE_HOLD, 0.0, 100)] {
        for k in 0..n {
            // transient during the first second
            let e_vz = if (k as f64) * dt < TRANSFER_SETTLE { 5.0 * v } else { v };
            rows.push(LogRow { phase, e_vz, ..Default::default() });
        }
    }
    let len = rows.len();
    SimLog { dt, user_mass: 51.0, user_height: 0.0, rows, repetitions: vec![RepetitionInfo { index: 0, sts_duration: 0.0, start: 0, len }] }
}

#[test]
fn transfer_speed_table_skips_transients() {
    let log = transfer_log(0.031, 0.029);
    assert!((mean_phase_speed(&log, PHASE_UP).unwrap() - 0.031).abs() < 1e-12);
    let t = transfer_speed_table(&[(51.0, &log)]).unwrap();
    assert!((t[0].lowering - 0.029).abs() < 1e-12);
    assert!((t[0].asymmetry - 0.002 / 0.030).abs() < 1e-9);
    let empty = SimLog { dt: 0.01, ..Default::default() };
    assert!(transfer_speed_table(&[(0.0, &empty)]).is_err());
}

#[test]
fn transparency_of_identical_logs() {
    let log = min_jerk_log(0.3, 2.0, 1e-3, 80.0);
    let r = transparency_report(&log, &log).unwrap();
    assert!((r.cmc_vz - 1.0).abs() < 1e-12 && (r.cmc_vy - 1.0).abs() < 1e-12);
    assert_eq!(r.peak_feet_grf_diff, 0.0);
    assert!((r.peak_vz_ratio - 1.0).abs() < 1e-12);
    let still = SimLog { rows: log.rows.iter().map(|r| LogRow { com_vy: 0.0, ..*r }).collect(), ..log.clone() };
    assert!(matches!(transparency_report(&still, &still), Err(AnalysisError::DegenerateInput(_))));
}
