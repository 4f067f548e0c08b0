use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::geometry::cable_side;
use crate::model::params::{RobotParams, CABLES};

/// Six-axis force/torque at the proximal mount, global frame (N, N·mm).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaseWrench {
    pub force: [f64; 3],
    pub torque: [f64; 3],
}

impl BaseWrench {
    pub fn force_vector(&self) -> Vector3<f64> {
        Vector3::from(self.force)
    }

    pub fn torque_vector(&self) -> Vector3<f64> {
        Vector3::from(self.torque)
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(&self.torque).all(|v| v.is_finite())
    }
}

/// One sample of proximal sensing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximalFrame {
    /// Sample time, s.
    pub timestamp: f64,
    pub wrench: BaseWrench,
    /// Input cable tensions, N.
    pub tensions: [f64; CABLES],
    /// Commanded cable lengths, mm.
    pub set_lengths: [f64; CABLES],
}

impl ProximalFrame {
    pub fn validate(&self) -> Result<()> {
        if !self.timestamp.is_finite() || !self.wrench.is_finite() {
            return Err(Error::InvalidConfiguration(format!("frame at t = {} has non-finite values", self.timestamp)));
        }
        if self.tensions.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidConfiguration(format!("frame at t = {} has negative tension", self.timestamp)));
        }
        if self.set_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidConfiguration(format!("frame at t = {} has non-positive set length", self.timestamp)));
        }
        Ok(())
    }
}

/// Direction of each cable where it leaves the base: along the proximal axis.
pub const CABLE_BASE_DIRECTIONS: [[f64; 3]; CABLES] = [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]];

/// Point where `cable` passes the base plane.
pub fn cable_base_point(cable: usize, params: &RobotParams) -> Vector3<f64> {
    Vector3::new(cable_side(cable) * params.half_pitch(), 0.0, 0.0)
}

/// Moment of the cable input forces about the sensor origin.
pub fn cable_base_moment(tensions: &[f64; CABLES], params: &RobotParams) -> Vector3<f64> {
    (0..CABLES)
        .map(|a| cable_base_point(a, params).cross(&(Vector3::from(CABLE_BASE_DIRECTIONS[a]) * tensions[a])))
        .sum()
}
