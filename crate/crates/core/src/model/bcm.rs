//! Closed-form intermediate-deflection beam model for a single flexure.
//!
//! Loads are normalized by the flexure length `L` and bending stiffness `EI`:
//! `f = F_r L²/EI`, `p = F_z L²/EI` (tension positive) and `m = M L/EI`.
//! The transverse response solves `(A + p·B) [r̂; θ] = [f; m]` and the axial
//! tip coordinate follows from two quadratic forms in `[r̂; θ]`.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::params::RobotParams;
use super::state::JointDeflection;
use crate::error::{Error, Result};

const A: [[f64; 2]; 2] = [[12.0, -6.0], [-6.0, 4.0]];
const B: [[f64; 2]; 2] = [[1.2, -0.1], [-0.1, 0.13]];
const C: [[f64; 2]; 2] = [[-0.6, 0.05], [0.05, -0.067]];
const D: [[f64; 2]; 2] = [[1.0 / 700.0, -1.0 / 1400.0], [-1.0 / 1400.0, 11.0 / 6300.0]];

fn mat(m: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

/// Loads acting on a flexure tip, expressed in the flexure base frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamLoads {
    /// Transverse force, N.
    pub f_r: f64,
    /// Axial force, N (tension positive).
    pub f_z: f64,
    /// Bending moment about the local y axis, N·mm.
    pub m_y: f64,
    /// Effective Young's modulus, GPa.
    pub modulus: f64,
}

impl BeamLoads {
    pub fn zero(modulus: f64) -> Self {
        Self {
            f_r: 0.0,
            f_z: 0.0,
            m_y: 0.0,
            modulus,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.f_r.is_finite() && self.f_z.is_finite() && self.m_y.is_finite() && self.modulus.is_finite()
    }
}

/// Normalized load triple `(f, p, m)`.
pub fn normalized_loads(loads: &BeamLoads, beam_length: f64, params: &RobotParams) -> (f64, f64, f64) {
    let ei = params.bending_stiffness(loads.modulus);
    let l2 = beam_length * beam_length;
    (loads.f_r * l2 / ei, loads.f_z * l2 / ei, loads.m_y * beam_length / ei)
}

/// Most compressive normalized axial load for which `A + p·B` stays positive definite.
pub fn critical_axial_load() -> f64 {
    // det(A + pB) = a p² + b p + c
    let a = B[0][0] * B[1][1] - B[0][1] * B[1][0];
    let b = A[0][0] * B[1][1] + B[0][0] * A[1][1] - A[0][1] * B[1][0] - B[0][1] * A[1][0];
    let c = A[0][0] * A[1][1] - A[0][1] * A[1][0];
    (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
}

/// Flexure tip deflection under `loads`.
pub fn bcm_deflection(loads: &BeamLoads, beam_length: f64, params: &RobotParams) -> Result<JointDeflection> {
    let (f, p, m) = normalized_loads(loads, beam_length, params);
    let k = mat(A) + mat(B) * p;
    let det = k.determinant();
    if !(det > 1e-9) || p <= critical_axial_load() || !det.is_finite() {
        return Err(Error::NonPhysicalLoad {
            joint: 0,
            axial_load: loads.f_z,
        });
    }
    let inv = Matrix2::new(k[(1, 1)], -k[(0, 1)], -k[(1, 0)], k[(0, 0)]) / det;
    let q = inv * Vector2::new(f, m);
    let z_hat = params.axial_compliance * p + q.dot(&(mat(C) * q)) - p * q.dot(&(mat(D) * q)) + 1.0;
    Ok(JointDeflection {
        r: q[0] * beam_length,
        z: z_hat * beam_length,
        theta: q[1],
    })
}

/// Phase-mixed modulus of the flexure at bending angle `theta`, GPa.
pub fn effective_modulus(theta: f64, params: &RobotParams) -> f64 {
    let xi = params.xi_curve.as_ref().map_or(1.0, |c| c.eval(theta));
    params.austenite_modulus * xi + params.martensite_modulus * (1.0 - xi)
}
