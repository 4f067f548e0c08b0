use nalgebra::Vector3;

use crate::equilibrium::{resolve_contact, ContactSpec, EquilibriumResult};
use crate::error::Result;
use crate::model::kinematics::chain_forward_kinematics;
use crate::model::params::RobotParams;
use crate::perception::frame::{cable_base_moment, BaseWrench, CABLE_BASE_DIRECTIONS};

/// Base wrench a force/torque sensor at the proximal mount would read.
///
/// Force is the cable input forces along their base directions plus every
/// contact force; torque is the contact moments about the sensor origin plus
/// the moments of the offset cable forces.
pub fn synthesize_base_wrench(result: &EquilibriumResult, contacts: &[ContactSpec], params: &RobotParams) -> Result<BaseWrench> {
    let chain = chain_forward_kinematics(&result.state, params);
    let mut force = Vector3::zeros();
    let mut torque = cable_base_moment(&result.input_tensions, params);
    for (t, d) in result.input_tensions.iter().zip(CABLE_BASE_DIRECTIONS) {
        force += Vector3::from(d) * *t;
    }
    for c in contacts.iter().filter(|c| !c.is_zero()) {
        let applied = resolve_contact(c, &chain, params)?;
        force += applied.force;
        torque += applied.point.cross(&applied.force);
    }
    Ok(BaseWrench {
        force: force.into(),
        torque: torque.into(),
    })
}
