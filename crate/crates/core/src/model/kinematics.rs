//! Forward kinematics of the joint chain.
//!
//! Each joint composes `Trz(L_c) · Tr(r, 0, z) · Ry(θ)`: a rigid channel
//! followed by the flexure tip displacement and rotation. All flexures bend
//! about the shared y axis.

use nalgebra::{Matrix3, Vector3};

use super::params::RobotParams;
use super::state::JointState;
use crate::error::{Error, Result};

/// Rigid transform: rotation plus translation in the global frame (mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub position: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            position: Vector3::zeros(),
        }
    }

    pub fn translation(x: f64, y: f64, z: f64) -> Self {
        Self {
            rotation: Matrix3::identity(),
            position: Vector3::new(x, y, z),
        }
    }

    pub fn trz(d: f64) -> Self {
        Self::translation(0.0, 0.0, d)
    }

    pub fn ry(angle: f64) -> Self {
        Self {
            rotation: ry(angle),
            position: Vector3::zeros(),
        }
    }

    pub fn rz(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            rotation: Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            position: Vector3::zeros(),
        }
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            position: self.position + self.rotation * other.position,
        }
    }

    /// Local z axis (backbone tangent) in the global frame.
    pub fn tangent(&self) -> Vector3<f64> {
        self.rotation.column(2).into_owned()
    }

    /// Largest deviation of `R·Rᵀ` from identity and of `det R` from one.
    pub fn orthonormality_error(&self) -> f64 {
        let e = (self.rotation * self.rotation.transpose() - Matrix3::identity()).abs().max();
        e.max((self.rotation.determinant() - 1.0).abs())
    }
}

pub fn ry(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

/// Tip frame of every flexure, proximal to distal.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPoses {
    pub tips: Vec<Pose>,
    /// Accumulated bending angle at each tip.
    pub headings: Vec<f64>,
}

impl ChainPoses {
    /// Frame at the tip of flexure `k` (1-based); `k = 0` is the robot base.
    pub fn tip_frame(&self, k: usize) -> Pose {
        if k == 0 {
            Pose::identity()
        } else {
            self.tips[k - 1]
        }
    }

    pub fn heading(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.headings[k - 1]
        }
    }

    /// Base frame of flexure `i` (0-based index).
    pub fn flexure_base(&self, i: usize, params: &RobotParams) -> Pose {
        self.tip_frame(i).compose(&Pose::trz(params.channel_length))
    }

    pub fn distal_tip(&self) -> Pose {
        *self.tips.last().expect("chain has at least one joint")
    }
}

/// Tip pose of every flexure.
pub fn chain_forward_kinematics(state: &JointState, params: &RobotParams) -> ChainPoses {
    let mut tips = Vec::with_capacity(state.len());
    let mut headings = Vec::with_capacity(state.len());
    let (mut x, mut z, mut heading) = (0.0f64, 0.0f64, 0.0f64);
    for j in &state.joints {
        let (s, c) = heading.sin_cos();
        let lz = params.channel_length + j.z;
        x += c * j.r + s * lz;
        z += -s * j.r + c * lz;
        heading += j.theta;
        tips.push(Pose {
            rotation: ry(heading),
            position: Vector3::new(x, 0.0, z),
        });
        headings.push(heading);
    }
    ChainPoses { tips, headings }
}

/// Locates arc length `s_c` on the chain.
///
/// Returns the 1-based index `k` of the flexure whose tip frame carries the
/// point and the signed offset from that tip along its tangent. Points on a
/// flexure get a non-positive offset; points on the channel following tip `k`
/// get a non-negative one. `k = 0` is the base channel.
pub fn locate_arc_length(s_c: f64, params: &RobotParams) -> Result<(usize, f64)> {
    let length = params.backbone_length();
    let tol = 1e-9 * length.max(1.0);
    if !(s_c >= -tol && s_c <= length + tol) {
        return Err(Error::OutOfRange { s_c, length });
    }
    let s = s_c.clamp(0.0, length);
    let pitch = params.joint_pitch();
    let k = ((s - params.channel_length) / pitch).ceil().clamp(0.0, params.joint_count as f64) as usize;
    Ok((k, s - k as f64 * pitch))
}

/// Pose of the contact point at arc length `s_c`, offset radially by `d_c/2`
/// in the direction `theta_c` around the backbone tangent.
pub fn contact_pose_on_chain(s_c: f64, theta_c: f64, chain: &ChainPoses, params: &RobotParams) -> Result<Pose> {
    let (k, offset) = locate_arc_length(s_c, params)?;
    Ok(chain
        .tip_frame(k)
        .compose(&Pose::trz(offset))
        .compose(&Pose::rz(theta_c))
        .compose(&Pose::ry(std::f64::consts::FRAC_PI_2))
        .compose(&Pose::trz(params.half_pitch())))
}

pub fn contact_pose(s_c: f64, theta_c: f64, state: &JointState, params: &RobotParams) -> Result<Pose> {
    contact_pose_on_chain(s_c, theta_c, &chain_forward_kinematics(state, params), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::JointDeflection;
    use nalgebra::Matrix4;

    fn params() -> RobotParams {
        RobotParams::default()
    }

    fn homogeneous(p: &Pose) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&p.rotation);
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&p.position);
        m
    }

    fn joint_matrix(j: &JointDeflection, lc: f64) -> Matrix4<f64> {
        let mut t = Matrix4::identity();
        t[(2, 3)] = lc;
        let mut d = Matrix4::identity();
        d[(0, 3)] = j.r;
        d[(2, 3)] = j.z;
        let (s, c) = j.theta.sin_cos();
        let mut r = Matrix4::identity();
        r[(0, 0)] = c;
        r[(0, 2)] = s;
        r[(2, 0)] = -s;
        r[(2, 2)] = c;
        t * d * r
    }

    #[test]
    fn straight_chain_tip() {
        let p = params();
        let chain = chain_forward_kinematics(&JointState::straight(&p), &p);
        let tip = chain.distal_tip();
        assert!((tip.position - Vector3::new(0.0, 0.0, 21.0)).norm() < 1e-12);
        assert_eq!(tip.rotation, Matrix3::identity());
    }

    #[test]
    fn quarter_arc_single_joint() {
        let p = RobotParams { joint_count: 1, ..params() };
        let l = p.beam_length;
        let th = std::f64::consts::FRAC_PI_2;
        let state = JointState {
            joints: vec![JointDeflection { r: l * (1.0 - th.cos()) / th, z: l * th.sin() / th, theta: th }],
        };
        let tip = chain_forward_kinematics(&state, &p).distal_tip();
        assert!((tip.rotation - ry(th)).abs().max() < 1e-15);
        assert!((tip.position.x - l / th).abs() < 1e-12);
    }

    #[test]
    fn matches_matrix_chain_oracle() {
        let p = params();
        let l = p.beam_length;
        let th: f64 = 0.1;
        let j = JointDeflection { r: l * (1.0 - th.cos()) / th, z: l * th.sin() / th, theta: th };
        let state = JointState { joints: vec![j; 7] };
        let chain = chain_forward_kinematics(&state, &p);
        let mut m = Matrix4::<f64>::identity();
        for (i, tip) in chain.tips.iter().enumerate() {
            m *= joint_matrix(&j, p.channel_length);
            assert!((homogeneous(tip) - m).abs().max() < 1e-12, "joint {i}");
        }
    }

    #[test]
    fn deep_chain_stays_orthonormal() {
        let p = RobotParams { joint_count: 500, ..params() };
        let state = JointState {
            joints: (0..500).map(|i| JointDeflection { r: 0.01, z: 2.0, theta: 0.37 * (i as f64).sin() }).collect(),
        };
        let chain = chain_forward_kinematics(&state, &p);
        assert!(chain.tips.iter().all(|t| t.orthonormality_error() < 1e-9));
    }

    #[test]
    fn contact_at_base_and_tip() {
        let p = params();
        let state = JointState::straight(&p);
        let base = contact_pose(0.0, 0.0, &state, &p).unwrap();
        assert!((base.position - Vector3::new(1.3, 0.0, 0.0)).norm() < 1e-12);
        let tip = contact_pose(21.0, 0.0, &state, &p).unwrap();
        assert!((tip.position - Vector3::new(1.3, 0.0, 21.0)).norm() < 1e-12);
        let side = contact_pose(21.0, std::f64::consts::FRAC_PI_2, &state, &p).unwrap();
        assert!((side.position - Vector3::new(0.0, 1.3, 21.0)).norm() < 1e-12);
        assert!(matches!(contact_pose(21.5, 0.0, &state, &p), Err(Error::OutOfRange { .. })));
        assert!(contact_pose(-0.1, 0.0, &state, &p).is_err());
    }

    #[test]
    fn locate_segments() {
        let p = params();
        assert_eq!(locate_arc_length(0.0, &p).unwrap(), (0, 0.0));
        assert_eq!(locate_arc_length(0.9, &p).unwrap(), (0, 0.9));
        let (k, off) = locate_arc_length(2.0, &p).unwrap();
        assert_eq!(k, 1);
        assert!((off + 1.0).abs() < 1e-12);
        let (k, off) = locate_arc_length(3.5, &p).unwrap();
        assert_eq!(k, 1);
        assert!((off - 0.5).abs() < 1e-12);
        assert_eq!(locate_arc_length(21.0, &p).unwrap(), (7, 0.0));
    }

    #[test]
    fn bent_contact_matches_backbone_walk() {
        // Contact inside the channel after tip 3 lies exactly on the rigid
        // extension of tip 3, so a walk along the composed transforms must
        // land on the same point.
        let p = params();
        let state = JointState {
            joints: (0..7)
                .map(|i| {
                    let th: f64 = 0.08 + 0.01 * i as f64;
                    let l = p.beam_length;
                    JointDeflection { r: l * (1.0 - th.cos()) / th, z: l * th.sin() / th, theta: th }
                })
                .collect(),
        };
        let s_c = 3.0 * p.joint_pitch() + 0.4;
        let pose = contact_pose(s_c, 0.0, &state, &p).unwrap();
        let mut m = Matrix4::<f64>::identity();
        for j in &state.joints[..3] {
            m *= joint_matrix(j, p.channel_length);
        }
        let mut step = Matrix4::identity();
        step[(2, 3)] = 0.4;
        let mut radial = Matrix4::identity();
        radial[(0, 3)] = p.half_pitch();
        let walk = m * step * radial;
        let expect = Vector3::new(walk[(0, 3)], walk[(1, 3)], walk[(2, 3)]);
        assert!((pose.position - expect).norm() < 1e-12);
    }
}
