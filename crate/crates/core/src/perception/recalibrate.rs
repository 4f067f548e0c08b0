//! Reciprocation maneuver that drives cable friction into a known state.

use serde::{Deserialize, Serialize};

use nalgebra::Vector3;

use super::decouple::decouple;
use super::estimate::{ContactEstimate, ContactMode, EstimatorConfig};
use super::estimator::{EstimateMode, Estimator};
use super::frame::ProximalFrame;
use crate::error::{Error, Result};
use crate::model::friction::LENGTH_HOLD_TOLERANCE;
use crate::model::params::CABLES;

/// Shape of the back-and-forth pull on the taut cable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reciprocation {
    /// Extra pull on the taut cable at the turning point, mm.
    pub amplitude: f64,
    pub cycles: usize,
    /// Commands per half cycle.
    pub steps: usize,
}

impl Default for Reciprocation {
    fn default() -> Self {
        Self {
            amplitude: 0.2,
            cycles: 1,
            steps: 4,
        }
    }
}

/// Pulls the taut cable by `amplitude` and returns it to the starting set
/// length, `cycles` times, then re-estimates at the settled state.
///
/// `controller` commands set lengths and returns the frame measured once the
/// robot has settled. Every frame passes through the estimator so friction
/// signs follow the motion; after the final release every taut segment is
/// known to be paying out. The maneuver aborts when the decoupled force drifts
/// beyond the configured tolerance, since the load is then not the one being
/// localized.
pub fn reciprocation_recalibrate<C>(
    controller: &mut C,
    estimator: &mut Estimator,
    maneuver: &Reciprocation,
    mode: EstimateMode,
) -> Result<ContactEstimate>
where
    C: FnMut([f64; CABLES]) -> Result<ProximalFrame>,
{
    let start = *estimator
        .last_frame()
        .ok_or_else(|| Error::EstimationFailed("reciprocation needs an observed frame".into()))?;
    if !(maneuver.amplitude.is_finite() && maneuver.amplitude >= 0.0) || maneuver.steps == 0 {
        return Err(Error::InvalidConfiguration("reciprocation amplitude must be ≥ 0 and steps > 0".into()));
    }
    let tensions = estimator.config().effective_tensions(&start);
    let taut = if tensions[1] > tensions[0] { 1 } else { 0 };
    if tensions[taut] <= 0.0 {
        return Err(Error::EstimationFailed("reciprocation needs a taut cable".into()));
    }
    let reference = decouple(&start);
    let tolerance = estimator.config().drift_tolerance;
    if maneuver.amplitude > 0.0 {
        let n = maneuver.steps;
        for _ in 0..maneuver.cycles {
            let offsets = (1..=n).chain((0..n).rev()).map(|k| maneuver.amplitude * k as f64 / n as f64);
            for offset in offsets {
                let mut set = start.set_lengths;
                set[taut] -= offset;
                let frame = controller(set)?;
                let drift = (decouple(&frame) - reference).norm();
                if drift > tolerance {
                    return Err(Error::RecalibrationAborted { drift, tolerance });
                }
                estimator.observe(&frame)?;
            }
        }
    }
    let mut est = estimator.estimate_current(mode)?;
    est.flags.recalibrated = true;
    Ok(est)
}

/// Finds completed reciprocation maneuvers in a recorded frame sequence.
///
/// A maneuver starts at a contact onset with both set lengths held, pulls the
/// taut cable further, and returns it to the onset length while the other
/// cable stays put and the decoupled force stays within the drift tolerance.
/// Any other motion, a drift or loss of contact restarts the search.
#[derive(Debug, Clone, Default)]
pub struct ReciprocationDetector {
    onset: Option<Onset>,
}

#[derive(Debug, Clone)]
struct Onset {
    index: usize,
    set_lengths: [f64; CABLES],
    taut: usize,
    force: Vector3<f64>,
    pulled: bool,
}

impl ReciprocationDetector {
    pub fn new() -> Self {
        Self::default()
    }

    fn start(index: usize, frame: &ProximalFrame, config: &EstimatorConfig) -> Onset {
        let t = config.effective_tensions(frame);
        Onset {
            index,
            set_lengths: frame.set_lengths,
            taut: usize::from(t[1] > t[0]),
            force: decouple(frame),
            pulled: false,
        }
    }

    /// Feeds frame `index` with its estimate. Returns the onset index when this
    /// frame completes a maneuver under a passive contact.
    pub fn update(
        &mut self,
        index: usize,
        frame: &ProximalFrame,
        estimate: Option<&ContactEstimate>,
        config: &EstimatorConfig,
    ) -> Option<usize> {
        let Some(est) = estimate.filter(|e| e.mode != ContactMode::None) else {
            self.onset = None;
            return None;
        };
        let Some(on) = self.onset.as_mut() else {
            self.onset = Some(Self::start(index, frame, config));
            return None;
        };
        let other = 1 - on.taut;
        let pull = on.set_lengths[on.taut] - frame.set_lengths[on.taut];
        let drift = (decouple(frame) - on.force).norm();
        let other_moved = (frame.set_lengths[other] - on.set_lengths[other]).abs() > LENGTH_HOLD_TOLERANCE;
        if drift > config.drift_tolerance || other_moved || pull < -LENGTH_HOLD_TOLERANCE {
            self.onset = Some(Self::start(index, frame, config));
            return None;
        }
        if pull > LENGTH_HOLD_TOLERANCE {
            on.pulled = true;
            return None;
        }
        if on.pulled {
            let start = on.index;
            self.onset = Some(Self::start(index, frame, config));
            return (est.mode == ContactMode::Passive).then_some(start);
        }
        None
    }
}
