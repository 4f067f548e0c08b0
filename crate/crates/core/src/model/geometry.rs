//! Cable path geometry across each flexure.
//!
//! In the base frame of flexure `i` the cable of side `s` (±1) leaves the
//! rigid channel at `A = (s·d_c/2, 0)` and enters the tip plate at `B`.

use serde::{Deserialize, Serialize};

use super::params::{RobotParams, CABLES};
use super::state::{JointDeflection, JointState};
use crate::error::{Error, Result};

/// Lateral side of a cable: cable 0 sits at `+d_c/2`, cable 1 at `-d_c/2`.
pub fn cable_side(cable: usize) -> f64 {
    if cable == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Position of the cable entry point on the flexure tip plate.
pub fn cable_attach_point(joint: &JointDeflection, side: f64, params: &RobotParams) -> [f64; 2] {
    let h = params.half_pitch();
    let (s, c) = joint.theta.sin_cos();
    [joint.r + side * c * h, joint.z - side * s * h]
}

/// Deflection angles of the cable at the base point `A` and tip point `B`.
pub fn cable_wrap_angles(b: [f64; 2], theta: f64, side: f64, params: &RobotParams) -> Result<(f64, f64)> {
    if !(b[1] > 0.0) {
        return Err(Error::InvalidConfiguration(format!(
            "cable tip point has non-positive axial coordinate {:.6} mm",
            b[1]
        )));
    }
    let phi_a = ((b[0] - side * params.half_pitch()) / b[1]).atan();
    Ok((phi_a, theta - phi_a))
}

/// Straight-line cable length between `A` and `B`.
pub fn segment_length(b: [f64; 2], side: f64, params: &RobotParams) -> f64 {
    (b[0] - side * params.half_pitch()).hypot(b[1])
}

/// Per-cable geometry of one flexure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CableSpan {
    pub attach: [f64; 2],
    pub length: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

/// Cable spans for every joint and cable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CableGeometry {
    pub spans: Vec<[CableSpan; CABLES]>,
}

impl CableGeometry {
    pub fn from_state(state: &JointState, params: &RobotParams) -> Result<Self> {
        let spans = state
            .joints
            .iter()
            .map(|j| {
                let span = |cable: usize| -> Result<CableSpan> {
                    let side = cable_side(cable);
                    let attach = cable_attach_point(j, side, params);
                    let (phi_a, phi_b) = cable_wrap_angles(attach, j.theta, side, params)?;
                    Ok(CableSpan {
                        attach,
                        length: segment_length(attach, side, params),
                        phi_a,
                        phi_b,
                    })
                };
                Ok([span(0)?, span(1)?])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spans })
    }

    /// Path length of `cable` through the tube, channels included.
    pub fn path_length(&self, cable: usize, params: &RobotParams) -> f64 {
        self.spans
            .iter()
            .map(|s| s[cable].length + params.channel_length)
            .sum()
    }

    pub fn segment_lengths(&self, cable: usize) -> Vec<f64> {
        self.spans.iter().map(|s| s[cable].length).collect()
    }
}

/// Elastic elongation of a cable under input tension `tension`.
pub fn cable_elongation(tension: f64, params: &RobotParams) -> f64 {
    tension * params.unloaded_cable_length / params.cable_axial_stiffness
}

/// Path length through the tube plus elastic elongation.
pub fn total_cable_length(geometry: &CableGeometry, cable: usize, tension: f64, params: &RobotParams) -> f64 {
    geometry.path_length(cable, params) + cable_elongation(tension, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Vector2};

    fn params() -> RobotParams {
        RobotParams::default()
    }

    #[test]
    fn attach_point_straight() {
        let j = JointDeflection { r: 0.0, z: 2.1, theta: 0.0 };
        let b = cable_attach_point(&j, 1.0, &params());
        assert!((b[0] - 1.3).abs() < 1e-15 && (b[1] - 2.1).abs() < 1e-15);
        let b = cable_attach_point(&j, -1.0, &params());
        assert!((b[0] + 1.3).abs() < 1e-15 && (b[1] - 2.1).abs() < 1e-15);
    }

    #[test]
    fn attach_point_matches_matrix_form() {
        // [r_B; z_B] = [r; z] + [[sθ, ±cθ], [cθ, ∓sθ]] [0; d_c/2]
        let j = JointDeflection { r: 0.21, z: 2.08, theta: 0.2 };
        for side in [1.0, -1.0] {
            let (s, c) = (0.2f64.sin(), 0.2f64.cos());
            let m = Matrix2::new(s, side * c, c, -side * s);
            let expect = Vector2::new(0.21, 2.08) + m * Vector2::new(0.0, 1.3);
            let b = cable_attach_point(&j, side, &params());
            assert!((b[0] - expect[0]).abs() < 1e-15);
            assert!((b[1] - expect[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn wrap_angles() {
        let p = params();
        let (a, b) = cable_wrap_angles([1.3, 2.1], 0.0, 1.0, &p).unwrap();
        assert_eq!((a, b), (0.0, 0.0));

        let j = JointDeflection { r: 0.21, z: 2.08, theta: 0.2 };
        let pt = cable_attach_point(&j, 1.0, &p);
        let (pa, pb) = cable_wrap_angles(pt, 0.2, 1.0, &p).unwrap();
        let expect = ((0.21 + 1.3 * 0.2f64.cos() - 1.3) / (2.08 - 1.3 * 0.2f64.sin())).atan();
        assert!((pa - expect).abs() < 1e-15);
        assert_eq!(pa + pb, 0.2);

        let m = j.mirrored();
        let pt_m = cable_attach_point(&m, -1.0, &p);
        let (ma, mb) = cable_wrap_angles(pt_m, m.theta, -1.0, &p).unwrap();
        assert!((ma + pa).abs() < 1e-15 && (mb + pb).abs() < 1e-15);

        assert!(cable_wrap_angles([0.5, 0.0], 0.1, 1.0, &p).is_err());
    }

    #[test]
    fn straight_cable_length() {
        let p = params();
        let state = JointState::straight(&p);
        let g = CableGeometry::from_state(&state, &p).unwrap();
        assert!((total_cable_length(&g, 0, 0.0, &p) - 21.0).abs() < 1e-12);
        let f = 3.0;
        let grow = total_cable_length(&g, 1, f, &p) - total_cable_length(&g, 1, 0.0, &p);
        assert!((grow - f * p.unloaded_cable_length / p.cable_axial_stiffness).abs() < 1e-15);
    }

    #[test]
    fn bent_length_matches_polyline() {
        // Walk the cable waypoints A_i -> B_i in global coordinates and sum the
        // polyline, adding the channel runs.
        let p = params();
        let state = JointState {
            joints: (0..p.joint_count)
                .map(|i| {
                    let th = 0.05 + 0.02 * i as f64;
                    let l = p.beam_length;
                    JointDeflection { r: l * (1.0 - th.cos()) / th, z: l * th.sin() / th, theta: th }
                })
                .collect(),
        };
        let g = CableGeometry::from_state(&state, &p).unwrap();
        for cable in 0..2 {
            let side = cable_side(cable);
            let h = p.half_pitch();
            // base frame of the current flexure: origin (x, z) and heading angle
            let (mut x, mut z, mut ang) = (0.0f64, 0.0f64, 0.0f64);
            let mut len = 0.0;
            let mut prev = [side * h, 0.0];
            for j in &state.joints {
                // channel: from previous tip-plate point straight to A of this flexure
                x += p.channel_length * ang.sin();
                z += p.channel_length * ang.cos();
                let to_global = |lx: f64, lz: f64| [x + lx * ang.cos() + lz * ang.sin(), z - lx * ang.sin() + lz * ang.cos()];
                let a = to_global(side * h, 0.0);
                len += (a[0] - prev[0]).hypot(a[1] - prev[1]);
                let b_local = cable_attach_point(j, side, &p);
                let b = to_global(b_local[0], b_local[1]);
                len += (b[0] - a[0]).hypot(b[1] - a[1]);
                prev = b;
                let tip = to_global(j.r, j.z);
                x = tip[0];
                z = tip[1];
                ang += j.theta;
            }
            let path = g.path_length(cable, &p);
            assert!((len - path).abs() < 1e-12, "cable {cable}: {len} vs {path}");
        }
    }
}
