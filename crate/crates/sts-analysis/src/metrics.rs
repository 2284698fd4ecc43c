use serde::Serialize;
use sts_kinematics::GRAVITY;
use sts_sim::{LogRow, SimLog, PHASE_RISE};

use crate::{cmc, AnalysisError};

/// CoM speed above which the user counts as moving.
pub const MOTION_THRESHOLD: f64 = 0.02;
/// A change of moving/still state must persist this long to register.
pub const MOTION_HOLD: f64 = 0.1;

/// Half-open index windows `[start, end)` where `speed > threshold`, with
/// hysteresis: a switch registers only once the new state has lasted `hold`
/// seconds, and is dated to the first sample of that run.
pub fn motion_windows(speed: &[f64], dt: f64, threshold: f64, hold: f64) -> Vec<(usize, usize)> {
    let need = ((hold / dt).round() as usize).max(1);
    let mut out = Vec::new();
    let mut moving = false;
    let mut start = 0;
    let mut run_start = 0;
    let mut run = 0;
    for (k, &v) in speed.iter().enumerate() {
        let m = v.abs() > threshold;
        if m != moving {
            if run == 0 {
                run_start = k;
            }
            run += 1;
            if run >= need {
                if m {
                    start = run_start;
                } else {
                    out.push((start, run_start));
                }
                moving = m;
                run = 0;
            }
        } else {
            run = 0;
        }
    }
    if moving {
        out.push((start, speed.len()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StsMetrics {
    pub repetition: usize,
    /// Window bounds relative to the repetition start.
    pub window_start: f64,
    pub window_end: f64,
    pub displacement: [f64; 2],
    pub peak_velocity: [f64; 2],
    pub peak_acceleration: [f64; 2],
    pub peak_feet_grf: f64,
    pub peak_chair_grf: f64,
    /// Seat-off relative to the window start; `None` if it never happened inside it.
    pub seat_off_time: Option<f64>,
}

impl StsMetrics {
    /// Lengths, velocities and accelerations divided by stature, forces by body weight.
    pub fn normalized(&self, height: f64, mass: f64) -> Self {
        let w = mass * GRAVITY;
        let l = |v: [f64; 2]| [v[0] / height, v[1] / height];
        Self {
            displacement: l(self.displacement),
            peak_velocity: l(self.peak_velocity),
            peak_acceleration: l(self.peak_acceleration),
            peak_feet_grf: self.peak_feet_grf / w,
            peak_chair_grf: self.peak_chair_grf / w,
            ..*self
        }
    }
}

fn speed(r: &LogRow) -> f64 {
    r.com_vy.hypot(r.com_vz)
}

pub fn metrics_for_rows(rows: &[LogRow], dt: f64, repetition: usize) -> Result<StsMetrics, AnalysisError> {
    if rows.len() < 2 {
        return Err(AnalysisError::InvalidInput(format!("repetition {repetition} has fewer than two samples")));
    }
    let sp: Vec<f64> = rows.iter().map(speed).collect();
    let (a, b) = motion_windows(&sp, dt, MOTION_THRESHOLD, MOTION_HOLD).first().copied().unwrap_or((0, rows.len()));
    let w = &rows[a..b.max(a + 1).min(rows.len())];
    let first = w.first().expect("non-empty window");
    let last = w.last().expect("non-empty window");
    let peak = |f: &dyn Fn(&LogRow) -> f64| w.iter().map(|r| f(r).abs()).fold(0.0, f64::max);
    let seat_off_time = w.iter().position(|r| r.seat_off > 0.5).map(|k| k as f64 * dt);
    Ok(StsMetrics {
        repetition,
        window_start: a as f64 * dt,
        window_end: b as f64 * dt,
        displacement: [last.com_y - first.com_y, last.com_z - first.com_z],
        peak_velocity: [peak(&|r| r.com_vy), peak(&|r| r.com_vz)],
        peak_acceleration: [peak(&|r| r.com_ay), peak(&|r| r.com_az)],
        peak_feet_grf: peak(&|r| r.feet_fz),
        peak_chair_grf: peak(&|r| r.chair_fz),
        seat_off_time,
    })
}

/// Per-repetition metrics inside the first motion window of each repetition.
pub fn sts_metrics(log: &SimLog) -> Result<Vec<StsMetrics>, AnalysisError> {
    if log.repetitions.is_empty() {
        return Err(AnalysisError::InvalidInput("log has no repetitions".into()));
    }
    (0..log.repetitions.len()).map(|i| metrics_for_rows(log.repetition(i), log.dt, i)).collect()
}

/// Raw and normalized metrics side by side.
pub fn sts_metrics_normalized(log: &SimLog, height: f64, mass: f64) -> Result<Vec<(StsMetrics, StsMetrics)>, AnalysisError> {
    Ok(sts_metrics(log)?.into_iter().map(|m| (m, m.normalized(height, mass))).collect())
}

/// Mean feet share of the vertical ground reaction from the start of the rise
/// until seat-off, one value per repetition.
pub fn feet_share_before_seat_off(log: &SimLog) -> Vec<f64> {
    (0..log.repetitions.len())
        .filter_map(|i| {
            let shares: Vec<f64> = log
                .repetition(i)
                .iter()
                .filter(|r| r.phase == PHASE_RISE)
                .take_while(|r| r.seat_off < 0.5)
                .filter(|r| r.feet_fz + r.chair_fz > 0.0)
                .map(|r| r.feet_fz / (r.feet_fz + r.chair_fz))
                .collect();
            (!shares.is_empty()).then(|| shares.iter().sum::<f64>() / shares.len() as f64)
        })
        .collect()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample standard deviation (`n - 1`); 0 for fewer than two values.
pub fn sample_sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransparencyReport {
    /// Mean over repetitions of the paired CMC.
    pub cmc_vy: f64,
    pub cmc_vz: f64,
    /// |mean peak (with robot) - mean peak (without)| over body weight.
    pub peak_feet_grf_diff: f64,
    pub peak_chair_grf_diff: f64,
    /// Mean peak vertical CoM speed with robot over without.
    pub peak_vz_ratio: f64,
}

pub fn transparency_report(with_robot: &SimLog, without_robot: &SimLog) -> Result<TransparencyReport, AnalysisError> {
    let n = with_robot.repetitions.len();
    if n == 0 || n != without_robot.repetitions.len() {
        return Err(AnalysisError::InvalidInput("paired logs need the same non-zero repetition count".into()));
    }
    let (mut cy, mut cz) = (Vec::new(), Vec::new());
    for i in 0..n {
        let (a, b) = (with_robot.repetition(i), without_robot.repetition(i));
        let len = a.len().min(b.len());
        let wave = |rows: &[LogRow], f: fn(&LogRow) -> f64| rows[..len].iter().map(f).collect::<Vec<_>>();
        cy.push(cmc(&[wave(a, |r| r.com_vy), wave(b, |r| r.com_vy)])?);
        cz.push(cmc(&[wave(a, |r| r.com_vz), wave(b, |r| r.com_vz)])?);
    }
    let ma = sts_metrics(with_robot)?;
    let mb = sts_metrics(without_robot)?;
    let avg = |m: &[StsMetrics], f: fn(&StsMetrics) -> f64| mean(&m.iter().map(f).collect::<Vec<_>>());
    let w = without_robot.user_mass * GRAVITY;
    Ok(TransparencyReport {
        cmc_vy: mean(&cy),
        cmc_vz: mean(&cz),
        peak_feet_grf_diff: (avg(&ma, |m| m.peak_feet_grf) - avg(&mb, |m| m.peak_feet_grf)).abs() / w,
        peak_chair_grf_diff: (avg(&ma, |m| m.peak_chair_grf) - avg(&mb, |m| m.peak_chair_grf)).abs() / w,
        peak_vz_ratio: avg(&ma, |m| m.peak_velocity[1]) / avg(&mb, |m| m.peak_velocity[1]),
    })
}
