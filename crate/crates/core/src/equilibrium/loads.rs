//! Tip loads on each flexure from cable tension and external contact.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::bcm::BeamLoads;
use crate::model::friction::{capstan_propagate, Wrap};
use crate::model::geometry::{cable_side, CableGeometry};
use crate::model::kinematics::{contact_pose_on_chain, locate_arc_length, ChainPoses};
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::FrictionSigns;

/// A point load on the robot surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactSpec {
    /// Contact force in the global frame, N.
    pub force: [f64; 3],
    /// Arc length of the contact from the proximal end, mm.
    pub arc_length: f64,
    /// Direction of the contact point around the backbone. When absent it is
    /// taken from the transverse force components in the local frame.
    pub theta_c: Option<f64>,
}

impl ContactSpec {
    pub fn new(force: [f64; 3], arc_length: f64) -> Self {
        Self {
            force,
            arc_length,
            theta_c: None,
        }
    }

    pub fn at_tip(force: [f64; 3], params: &RobotParams) -> Self {
        Self::new(force, params.backbone_length())
    }

    pub fn force_vector(&self) -> Vector3<f64> {
        Vector3::from(self.force)
    }

    pub fn is_zero(&self) -> bool {
        self.force.iter().all(|&f| f == 0.0)
    }

    pub fn validate(&self, params: &RobotParams) -> Result<()> {
        if !self.force.iter().all(|f| f.is_finite()) {
            return Err(Error::InvalidConfiguration("contact force must be finite".into()));
        }
        locate_arc_length(self.arc_length, params).map(|_| ())
    }
}

/// A contact resolved against a chain configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedContact {
    pub force: Vector3<f64>,
    pub point: Vector3<f64>,
    /// Tip frame index carrying the contact; flexures `1..=joint` see the load.
    pub joint: usize,
    pub theta_c: f64,
}

/// Direction of the transverse contact force in the frame at tip `k`.
pub fn contact_direction(force: &Vector3<f64>, chain: &ChainPoses, k: usize) -> f64 {
    let local = chain.tip_frame(k).rotation.transpose() * force;
    if local.x == 0.0 && local.y == 0.0 {
        0.0
    } else {
        local.y.atan2(local.x)
    }
}

pub fn resolve_contact(contact: &ContactSpec, chain: &ChainPoses, params: &RobotParams) -> Result<AppliedContact> {
    let (joint, _) = locate_arc_length(contact.arc_length, params)?;
    let force = contact.force_vector();
    let theta_c = contact.theta_c.unwrap_or_else(|| contact_direction(&force, chain, joint));
    let pose = contact_pose_on_chain(contact.arc_length, theta_c, chain, params)?;
    Ok(AppliedContact {
        force,
        point: pose.position,
        joint,
        theta_c,
    })
}

/// Cable tension inside the span of every flexure, per cable.
///
/// The input tension enters at the base and crosses each wrap point in turn;
/// flexure `i` sees the tension after the base-side wrap of its own span.
pub fn span_tensions(
    input: [f64; CABLES],
    geometry: &CableGeometry,
    signs: &FrictionSigns,
) -> Vec<[f64; CABLES]> {
    let mut out = Vec::with_capacity(geometry.spans.len());
    let mut exponent = [0.0f64; CABLES];
    for (i, spans) in geometry.spans.iter().enumerate() {
        let mut row = [0.0; CABLES];
        for a in 0..CABLES {
            let s = signs.get(i, a);
            let wraps = [Wrap::new(spans[a].phi_a.abs(), s)];
            row[a] = capstan_propagate(input[a], &wraps) * exponent[a].exp();
            exponent[a] += s * (spans[a].phi_a.abs() + spans[a].phi_b.abs());
        }
        out.push(row);
    }
    out
}

/// Loads on the tip of flexure `joint` (0-based) in its base frame.
///
/// The free body is everything distal of a cut through the flexure and its
/// cable spans: each cable pulls the tip plate back towards its base-side
/// exit point, and every contact carried on this flexure or a more distal one
/// adds its force and its moment about the flexure tip.
pub fn beam_tip_loads(
    joint: usize,
    tensions: &[f64; CABLES],
    geometry: &CableGeometry,
    contacts: &[AppliedContact],
    chain: &ChainPoses,
    modulus: f64,
    params: &RobotParams,
) -> BeamLoads {
    let h = params.half_pitch();
    let mut loads = BeamLoads::zero(modulus);
    for (a, &t) in tensions.iter().enumerate() {
        let span = &geometry.spans[joint][a];
        let (sa, ca) = span.phi_a.sin_cos();
        loads.f_r -= t * sa;
        loads.f_z -= t * ca;
        loads.m_y += cable_side(a) * t * h * span.phi_b.cos();
    }
    if contacts.is_empty() {
        return loads;
    }
    let base = chain.tip_frame(joint).rotation;
    let tip = chain.tip_frame(joint + 1).position;
    for c in contacts.iter().filter(|c| joint < c.joint) {
        let local = base.transpose() * c.force;
        let arm = c.point - tip;
        loads.f_r += local.x;
        loads.f_z += local.z;
        loads.m_y += arm.z * c.force.x - arm.x * c.force.z;
    }
    loads
}

/// Normal force and tangential imbalance of the capstan balance at one wrap.
///
/// With the support force on the bisector of the two cable directions,
/// `N = (T⁻ − T⁺)·sin(θ/2)` and the tangential residual
/// `(T⁺ − T⁻)·cos(θ/2) − u·N` vanishes only for a consistent tension jump.
pub fn wrap_balance(t_before: f64, t_after: f64, theta: f64, u: f64) -> (f64, f64) {
    let (s, c) = (theta / 2.0).sin_cos();
    let normal = (t_before - t_after) * s;
    (normal, (t_after - t_before) * c - u * normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::kinematics::chain_forward_kinematics;
    use crate::model::state::{JointDeflection, JointState};

    fn params() -> RobotParams {
        RobotParams::default()
    }

    fn setup(state: &JointState, p: &RobotParams) -> (CableGeometry, ChainPoses) {
        (CableGeometry::from_state(state, p).unwrap(), chain_forward_kinematics(state, p))
    }

    #[test]
    fn symmetric_tensions_cancel() {
        let p = params();
        let state = JointState::straight(&p);
        let (g, chain) = setup(&state, &p);
        let l = beam_tip_loads(2, &[1.5, 1.5], &g, &[], &chain, p.austenite_modulus, &p);
        assert_eq!(l.f_r, 0.0);
        assert_eq!(l.m_y, 0.0);
        assert_eq!(l.f_z, -3.0);
    }

    #[test]
    fn tip_contact_on_straight_robot() {
        let p = params();
        let state = JointState::straight(&p);
        let (g, chain) = setup(&state, &p);
        let f = 0.2;
        let c = resolve_contact(&ContactSpec::at_tip([-f, 0.0, 0.0], &p), &chain, &p).unwrap();
        assert_eq!(c.joint, 7);
        // theta_c = π puts the point at x = -d_c/2
        assert!((c.point - Vector3::new(-1.3, 0.0, 21.0)).norm() < 1e-12);
        for i in 0..7 {
            let l = beam_tip_loads(i, &[0.0, 0.0], &g, &[c], &chain, p.austenite_modulus, &p);
            assert_eq!(l.f_r, -f);
            assert_eq!(l.f_z, 0.0);
            let lever = 21.0 - 3.0 * (i + 1) as f64;
            assert!((l.m_y - (-lever * f)).abs() < 1e-12, "joint {i}");
        }
    }

    #[test]
    fn distal_joints_unloaded_by_contact() {
        let p = params();
        let state = JointState::straight(&p);
        let (g, chain) = setup(&state, &p);
        let c = resolve_contact(&ContactSpec::new([0.1, 0.0, 0.0], 7.5), &chain, &p).unwrap();
        assert_eq!(c.joint, 3);
        for i in 3..7 {
            let l = beam_tip_loads(i, &[0.0, 0.0], &g, &[c], &chain, p.austenite_modulus, &p);
            assert_eq!((l.f_r, l.m_y), (0.0, 0.0));
        }
        let l = beam_tip_loads(2, &[0.0, 0.0], &g, &[c], &chain, p.austenite_modulus, &p);
        assert_eq!(l.f_r, 0.1);
        assert!((l.m_y - 0.1 * (7.5 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn single_cable_bent_matches_terms() {
        let p = params();
        let th: f64 = 0.15;
        let j = JointDeflection { r: 2.1 * (1.0 - th.cos()) / th, z: 2.1 * th.sin() / th, theta: th };
        let state = JointState { joints: vec![j; 7] };
        let (g, chain) = setup(&state, &p);
        let t = 2.0;
        let l = beam_tip_loads(4, &[t, 0.0], &g, &[], &chain, p.austenite_modulus, &p);
        // independent evaluation: B from the rotation form, force along B→A
        let (s, c) = th.sin_cos();
        let b = [j.r + c * 1.3, j.z - s * 1.3];
        let a = [1.3, 0.0];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let f = [t * (a[0] - b[0]) / len, t * (a[1] - b[1]) / len];
        let d = [b[0] - j.r, b[1] - j.z];
        assert!((l.f_r - f[0]).abs() < 1e-12);
        assert!((l.f_z - f[1]).abs() < 1e-12);
        assert!((l.m_y - (d[1] * f[0] - d[0] * f[1])).abs() < 1e-12);
    }

    #[test]
    fn frictionless_spans_carry_input() {
        let p = params();
        let th: f64 = 0.1;
        let j = JointDeflection { r: 2.1 * (1.0 - th.cos()) / th, z: 2.1 * th.sin() / th, theta: th };
        let state = JointState { joints: vec![j; 7] };
        let g = CableGeometry::from_state(&state, &p).unwrap();
        let t = span_tensions([2.0, 1.0], &g, &FrictionSigns::zeros(7));
        assert!(t.iter().all(|r| r == &[2.0, 1.0]));
        let up = span_tensions([2.0, 1.0], &g, &FrictionSigns::uniform(7, [0.33, 0.33]));
        let down = span_tensions([2.0, 1.0], &g, &FrictionSigns::uniform(7, [-0.33, -0.33]));
        for i in 0..7 {
            for a in 0..2 {
                assert!(down[i][a] <= t[i][a] && t[i][a] <= up[i][a]);
            }
        }
    }

    #[test]
    fn wrap_balance_consistent_jump() {
        // frictionless: no tension jump, zero normal force and residual
        assert_eq!(wrap_balance(2.0, 2.0, 0.3, 0.0), (0.0, 0.0));
        let (n, res) = wrap_balance(2.0, 1.5, 0.3, 0.2);
        assert!((n - 0.5 * 0.15f64.sin()).abs() < 1e-15);
        assert!((res - (-0.5 * 0.15f64.cos() - 0.2 * n)).abs() < 1e-15);
    }
}
