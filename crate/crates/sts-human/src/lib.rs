//! Point-mass CoM model of a person rising from a chair.
//!
//! The legs act through the feet as a capacity-limited PD tracker of a
//! minimum-jerk reference, on top of a weight-bearing baseline that shifts from
//! the chair to the feet as the CoM moves over the seat edge. The chair is a
//! unilateral spring-damper.

mod assistance;
mod model;

pub use assistance::*;
pub use model::*;
