//! Kinematic and mechanical model of the notched-tube joint chain.

pub mod bcm;
pub mod friction;
pub mod geometry;
pub mod kinematics;
pub mod params;
pub mod state;

pub use bcm::{bcm_deflection, critical_axial_load, effective_modulus, normalized_loads, BeamLoads};
pub use friction::{capstan_propagate, friction_sign_update, Wrap};
pub use geometry::{cable_side, total_cable_length, CableGeometry, CableSpan};
pub use kinematics::{chain_forward_kinematics, contact_pose, contact_pose_on_chain, locate_arc_length, ChainPoses, Pose};
pub use params::{RobotParams, XiCurve, CABLES};
pub use state::{FrictionSigns, JointDeflection, JointState};
