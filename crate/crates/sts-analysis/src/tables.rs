use serde::Serialize;
use sts_human::measured_assistance;
use sts_sim::{SimLog, PHASE_DOWN, PHASE_RISE, PHASE_UP};

use crate::{mean, sample_sd, AnalysisError};

/// Measured unloading of each repetition, averaged over its rise phase.
pub fn assistance_per_repetition(log: &SimLog) -> Result<Vec<f64>, AnalysisError> {
    (0..log.repetitions.len())
        .map(|i| {
            let rise: Vec<_> = log.repetition(i).iter().filter(|r| r.phase == PHASE_RISE).collect();
            let chair: Vec<f64> = rise.iter().map(|r| r.chair_fz).collect();
            let feet: Vec<f64> = rise.iter().map(|r| r.feet_fz).collect();
            measured_assistance(&chair, &feet, log.user_mass).map_err(|e| AnalysisError::InvalidInput(e.to_string()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssistanceRow {
    pub target: f64,
    /// Measured minus target, fraction of body weight.
    pub mean_error: f64,
    pub sd_error: f64,
    pub samples: usize,
}

/// Rows ordered by target. Every repetition of every log is one sample.
pub fn assistance_error_table(logs: &[(f64, &SimLog)]) -> Result<Vec<AssistanceRow>, AnalysisError> {
    let mut targets: Vec<f64> = logs.iter().map(|(t, _)| *t).collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets
        .into_iter()
        .map(|target| {
            let mut errs = Vec::new();
            for (t, log) in logs.iter().filter(|(t, _)| *t == target) {
                errs.extend(assistance_per_repetition(log)?.into_iter().map(|a| a - t));
            }
            Ok(AssistanceRow { target, mean_error: mean(&errs), sd_error: sample_sd(&errs), samples: errs.len() })
        })
        .collect()
}

/// Seconds skipped at the start of every regulated segment.
pub const TRANSFER_SETTLE: f64 = 1.0;

/// Mean |v_z| over contiguous runs of `phase`, each with its first
/// [`TRANSFER_SETTLE`] seconds dropped.
pub fn mean_phase_speed(log: &SimLog, phase: f64) -> Option<f64> {
    let skip = (TRANSFER_SETTLE / log.dt).round() as usize;
    let mut vals = Vec::new();
    let mut k = 0;
    while k < log.rows.len() {
        if log.rows[k].phase != phase {
            k += 1;
            continue;
        }
        let start = k;
        while k < log.rows.len() && log.rows[k].phase == phase {
            k += 1;
        }
        vals.extend(log.rows[start..k].iter().skip(skip).map(|r| r.e_vz.abs()));
    }
    (!vals.is_empty()).then(|| mean(&vals))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSpeedRow {
    pub payload: f64,
    pub lifting: f64,
    pub lowering: f64,
    /// |lifting - lowering| / mean of the two.
    pub asymmetry: f64,
}

pub fn transfer_speed_table(logs: &[(f64, &SimLog)]) -> Result<Vec<TransferSpeedRow>, AnalysisError> {
    logs.iter()
        .map(|(payload, log)| {
            let lifting = mean_phase_speed(log, PHASE_UP)
                .ok_or_else(|| AnalysisError::InvalidInput(format!("payload {payload}: no regulated ascent")))?;
            let lowering = mean_phase_speed(log, PHASE_DOWN)
                .ok_or_else(|| AnalysisError::InvalidInput(format!("payload {payload}: no regulated descent")))?;
            let asymmetry = (lifting - lowering).abs() / (0.5 * (lifting + lowering));
            Ok(TransferSpeedRow { payload: *payload, lifting, lowering, asymmetry })
        })
        .collect()
}
