use super::EquilibriumResult;
use crate::model::params::CABLES;

/// Set length minus model cable length, per cable. Slack cables contribute zero.
pub fn cable_length_residual(result: &EquilibriumResult, set_lengths: &[f64; CABLES]) -> [f64; CABLES] {
    let mut out = [0.0; CABLES];
    for a in 0..CABLES {
        if result.input_tensions[a] > 0.0 {
            out[a] = set_lengths[a] - result.cable_lengths[a];
        }
    }
    out
}
