use nalgebra::Vector3;

use super::frame::{ProximalFrame, CABLE_BASE_DIRECTIONS};
use crate::model::params::CABLES;

/// Contact force left after removing the cable input forces from the measured base force.
pub fn decouple_contact_force(frame: &ProximalFrame, directions: &[[f64; 3]; CABLES]) -> Vector3<f64> {
    let mut f = frame.wrench.force_vector();
    for (t, d) in frame.tensions.iter().zip(directions) {
        f -= Vector3::from(*d) * *t;
    }
    f
}

/// [`decouple_contact_force`] with cables leaving the base along +Z.
pub fn decouple(frame: &ProximalFrame) -> Vector3<f64> {
    decouple_contact_force(frame, &CABLE_BASE_DIRECTIONS)
}
