//! Post-processing: workspace force capability, STS metrics, waveform
//! similarity and the summary tables built from simulation logs.

mod capability;
mod cmc;
mod metrics;
mod regions;
mod tables;

pub use capability::*;
pub use cmc::*;
pub use metrics::*;
pub use regions::*;
pub use tables::*;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
