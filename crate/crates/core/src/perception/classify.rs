//! Active/passive contact labelling from the onset of the decoupled force.

use super::decouple::decouple;
use super::estimate::ContactMode;
use super::frame::ProximalFrame;
use crate::model::friction::LENGTH_HOLD_TOLERANCE;

/// True when any commanded cable length differs between the two frames.
pub fn commanded_motion(prev: &ProximalFrame, next: &ProximalFrame) -> bool {
    prev.set_lengths
        .iter()
        .zip(&next.set_lengths)
        .any(|(a, b)| (a - b).abs() > LENGTH_HOLD_TOLERANCE)
}

/// Labels the contact present at the end of `history`.
///
/// The onset is the last frame where the decoupled force crosses `threshold`
/// from below. Contact whose onset coincides with a commanded length change is
/// active; contact that appears while the set lengths hold is passive. A
/// contact already present in the first frame has no observable onset and is
/// labelled passive.
pub fn classify_contact_mode(history: &[ProximalFrame], threshold: f64) -> ContactMode {
    let detected: Vec<bool> = history.iter().map(|f| decouple(f).norm() >= threshold).collect();
    if !detected.last().copied().unwrap_or(false) {
        return ContactMode::None;
    }
    let onset = detected.iter().rposition(|d| !d).map_or(0, |k| k + 1);
    if onset == 0 {
        return ContactMode::Passive;
    }
    if commanded_motion(&history[onset - 1], &history[onset]) {
        ContactMode::Active
    } else {
        ContactMode::Passive
    }
}
