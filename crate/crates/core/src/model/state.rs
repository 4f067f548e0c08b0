use serde::{Deserialize, Serialize};

use super::params::{RobotParams, CABLES};

/// Tip displacement and rotation of one flexure in its base frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointDeflection {
    /// Lateral tip displacement, mm.
    pub r: f64,
    /// Axial tip coordinate, mm.
    pub z: f64,
    /// Tip rotation, rad.
    pub theta: f64,
}

impl JointDeflection {
    pub fn straight(beam_length: f64) -> Self {
        Self {
            r: 0.0,
            z: beam_length,
            theta: 0.0,
        }
    }

    pub fn is_valid(&self, beam_length: f64) -> bool {
        self.r.is_finite() && self.theta.is_finite() && self.z > 0.0 && self.z <= beam_length * (1.0 + 1e-9)
    }

    pub fn mirrored(&self) -> Self {
        Self {
            r: -self.r,
            z: self.z,
            theta: -self.theta,
        }
    }
}

/// Configuration of the whole joint chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub joints: Vec<JointDeflection>,
}

impl JointState {
    pub fn straight(params: &RobotParams) -> Self {
        Self {
            joints: vec![JointDeflection::straight(params.beam_length); params.joint_count],
        }
    }

    pub fn len(&self) -> usize {
        self.joints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.joints.is_empty()
    }

    pub fn tip_angle(&self) -> f64 {
        self.joints.iter().map(|j| j.theta).sum()
    }

    pub fn max_theta_difference(&self, other: &JointState) -> f64 {
        self.joints
            .iter()
            .zip(&other.joints)
            .map(|(a, b)| (a.theta - b.theta).abs())
            .fold(0.0, f64::max)
    }
}

/// Quasi-static friction coefficient per joint and cable, each in `[-u, u]`.
///
/// Positive values mean the cable segment is shortening, negative that it is
/// lengthening, and zero means slack or not yet determined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionSigns {
    pub signs: Vec<[f64; CABLES]>,
}

impl FrictionSigns {
    pub fn zeros(joint_count: usize) -> Self {
        Self {
            signs: vec![[0.0; CABLES]; joint_count],
        }
    }

    pub fn uniform(joint_count: usize, per_cable: [f64; CABLES]) -> Self {
        Self {
            signs: vec![per_cable; joint_count],
        }
    }

    pub fn get(&self, joint: usize, cable: usize) -> f64 {
        self.signs[joint][cable]
    }

    pub fn set_cable(&mut self, cable: usize, value: f64) {
        for s in &mut self.signs {
            s[cable] = value;
        }
    }

    pub fn within_bounds(&self, u: f64) -> bool {
        self.signs.iter().flatten().all(|s| s.abs() <= u * (1.0 + 1e-12))
    }
}
