//! Proprioception for cable-driven notched-tube continuum robots.
//!
//! Estimates backbone shape, contact force and contact location from cable
//! tensions, cable displacements and a force/torque sensor at the base.

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod io;
pub mod model;
pub mod optim;
pub mod perception;
pub mod simulator;
pub mod units;

pub use error::{Error, Result};
