//! Assist modes, the force-controller pipeline and the transfer speed loop.

mod force;
mod modes;
mod speed;

pub use force::*;
pub use modes::*;
pub use speed::*;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("operation not defined for mode {0:?}")]
    WrongMode(AssistMode),
    #[error("{0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Kinematics(#[from] sts_kinematics::KinematicsError),
}
