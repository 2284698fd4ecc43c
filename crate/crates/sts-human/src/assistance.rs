use sts_kinematics::GRAVITY;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssistanceError {
    #[error("motion window is empty")]
    EmptyWindow,
}

/// Mean vertical GRF (chair + feet) over the window as a fraction of body weight.
pub fn grf_fraction(chair_fz: &[f64], feet_fz: &[f64], mass: f64) -> Result<f64, AssistanceError> {
    let n = chair_fz.len().min(feet_fz.len());
    if n == 0 {
        return Err(AssistanceError::EmptyWindow);
    }
    let sum: f64 = chair_fz.iter().zip(feet_fz).map(|(c, f)| c + f).sum();
    Ok(sum / n as f64 / (mass * GRAVITY))
}

/// Body-weight fraction taken off the force plates.
pub fn measured_assistance(chair_fz: &[f64], feet_fz: &[f64], mass: f64) -> Result<f64, AssistanceError> {
    Ok(1.0 - grf_fraction(chair_fz, feet_fz, mass)?)
}

/// Mean over participants of the mean over their repetitions.
pub fn nested_mean(per_participant: &[Vec<f64>]) -> Option<f64> {
    let means: Vec<f64> = per_participant
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.iter().sum::<f64>() / r.len() as f64)
        .collect();
    if means.is_empty() {
        None
    } else {
        Some(means.iter().sum::<f64>() / means.len() as f64)
    }
}
