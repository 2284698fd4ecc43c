//! Geometry of the two-link sit-to-stand arm.
//!
//! World frame: origin on the ground under joint A, `+y` forward, `+z` up.
//! A point at distance `d` along AC sits at `(d sin qa, h + d cos qa)`; link CDE
//! points along `(cos(qa+qc), -sin(qa+qc))`. Actuator 1 is a ball screw between
//! the base anchor `p1` and B; actuator 2 is a belt from D around a pulley G
//! that sits `d_g` beyond C along AC, doubled by the pulley.
//!
//! Force convention used throughout the workspace: actuator force is positive
//! in tension (pulling its anchors together), so the generalized force it
//! produces on the joints is `-J_act^T F`.

mod geometry;
mod gravity;
mod mat2;

pub use geometry::*;
pub use gravity::*;
pub use mat2::*;

use thiserror::Error;

/// Minimum transmission derivative magnitude (m/rad) before a mapping is refused.
pub const SINGULAR_EPS: f64 = 1e-6;

pub const GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Joint {
    A,
    C,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("target ({y:.4}, {z:.4}) is outside the reachable annulus")]
    Unreachable { y: f64, z: f64 },
    #[error("IK solution qa={q_a:.4}, qc={q_c:.4} violates joint limits")]
    OutOfJointLimits { q_a: f64, q_c: f64 },
    #[error("transmission singular at joint {0:?}")]
    SingularTransmission(Joint),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
}
