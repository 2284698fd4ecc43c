//! Fixed-step simulation of the arm, its actuators and a surrogate user.

mod config;
mod dynamics;
mod engine;
mod log;

pub use config::*;
pub use dynamics::*;
pub use engine::*;
pub use log::*;

pub use sts_kinematics::LinkMassModel;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid config `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("numerical divergence at t = {t:.3} s: {detail}")]
    NumericalDivergence { t: f64, detail: String },
    #[error(transparent)]
    Control(#[from] sts_control::ControlError),
    #[error(transparent)]
    Kinematics(#[from] sts_kinematics::KinematicsError),
    #[error(transparent)]
    Actuator(#[from] sts_actuators::ActuatorError),
}
