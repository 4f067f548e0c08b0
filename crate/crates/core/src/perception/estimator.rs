//! Time-series estimator: friction tracking, contact mode and warm starts.

use serde::{Deserialize, Serialize};

use super::classify::commanded_motion;
use super::decouple::decouple;
use super::estimate::{estimate_contact, estimate_tip_force, ContactEstimate, ContactMode, EstimatorConfig};
use super::frame::ProximalFrame;
use crate::error::{Error, Result};
use crate::model::friction::friction_sign_update;
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::FrictionSigns;

/// Which contact model an estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EstimateMode {
    /// Full s_c search; an optimum at the distal end is reported as a tip contact.
    #[default]
    Auto,
    /// Contact pinned to the distal tip.
    Tip,
    /// Full s_c search, always labelled as a body contact.
    Body,
}

impl std::str::FromStr for EstimateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(EstimateMode::Auto),
            "tip" => Ok(EstimateMode::Tip),
            "body" => Ok(EstimateMode::Body),
            _ => Err(Error::InvalidConfiguration(format!("unknown estimate mode `{s}`"))),
        }
    }
}

/// Single-writer estimator state carried across frames.
///
/// Cable friction is tracked from the commanded set lengths: a cable being
/// pulled takes `+u` on every segment, one being paid out `-u`, a held cable
/// keeps its signs and a slack cable carries none.
#[derive(Debug, Clone)]
pub struct Estimator {
    params: RobotParams,
    config: EstimatorConfig,
    signs: FrictionSigns,
    last_frame: Option<ProximalFrame>,
    onset_mode: ContactMode,
    last: Option<ContactEstimate>,
}

impl Estimator {
    pub fn new(params: RobotParams, config: EstimatorConfig) -> Result<Self> {
        params.validate()?;
        let signs = FrictionSigns::zeros(params.joint_count);
        Ok(Self {
            params,
            config,
            signs,
            last_frame: None,
            onset_mode: ContactMode::None,
            last: None,
        })
    }

    pub fn params(&self) -> &RobotParams {
        &self.params
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn friction_signs(&self) -> &FrictionSigns {
        &self.signs
    }

    pub fn set_friction_signs(&mut self, signs: FrictionSigns) -> Result<()> {
        if signs.signs.len() != self.params.joint_count || !signs.within_bounds(self.params.friction_coeff) {
            return Err(Error::InvalidConfiguration("friction signs do not match the robot".into()));
        }
        self.signs = signs;
        Ok(())
    }

    pub fn last_frame(&self) -> Option<&ProximalFrame> {
        self.last_frame.as_ref()
    }

    pub fn last_estimate(&self) -> Option<&ContactEstimate> {
        self.last.as_ref()
    }

    /// Contact mode fixed at the most recent onset.
    pub fn contact_mode(&self) -> ContactMode {
        self.onset_mode
    }

    /// Advances friction and contact state by one frame without estimating.
    pub fn observe(&mut self, frame: &ProximalFrame) -> Result<()> {
        frame.validate()?;
        let tensions = self.config.effective_tensions(frame);
        let u = self.params.friction_coeff;
        let detected = self.config.detects(&decouple(frame));
        match &self.last_frame {
            Some(prev) => {
                for a in 0..CABLES {
                    for row in &mut self.signs.signs {
                        row[a] = friction_sign_update(row[a], frame.set_lengths[a], prev.set_lengths[a], tensions[a], u);
                    }
                }
                let was = self.config.detects(&decouple(prev));
                self.onset_mode = match (was, detected) {
                    (_, false) => ContactMode::None,
                    (false, true) if commanded_motion(prev, frame) => ContactMode::Active,
                    (false, true) => ContactMode::Passive,
                    (true, true) => self.onset_mode,
                };
            }
            None => {
                for a in 0..CABLES {
                    if tensions[a] <= 0.0 {
                        self.signs.set_cable(a, 0.0);
                    }
                }
                self.onset_mode = if detected { ContactMode::Passive } else { ContactMode::None };
            }
        }
        if !detected {
            self.last = None;
        }
        self.last_frame = Some(*frame);
        Ok(())
    }

    /// Estimates at the most recently observed frame.
    pub fn estimate_current(&mut self, mode: EstimateMode) -> Result<ContactEstimate> {
        let frame = self
            .last_frame
            .ok_or_else(|| Error::EstimationFailed("no frame observed yet".into()))?;
        let prior = self.last.as_ref();
        let mut est = match mode {
            EstimateMode::Tip => estimate_tip_force(&frame, &self.signs, &self.params, prior, &self.config)?,
            EstimateMode::Auto | EstimateMode::Body => estimate_contact(&frame, &self.signs, &self.params, prior, &self.config)?,
        };
        est.mode = match (est.mode, mode) {
            (ContactMode::None, _) => ContactMode::None,
            (_, EstimateMode::Tip) => ContactMode::Tip,
            (ContactMode::Tip, EstimateMode::Auto) => ContactMode::Tip,
            _ => self.onset_mode,
        };
        if est.mode != ContactMode::None {
            self.last = Some(est.clone());
        }
        Ok(est)
    }

    /// Observes `frame` and estimates contact and shape there.
    pub fn process(&mut self, frame: &ProximalFrame, mode: EstimateMode) -> Result<ContactEstimate> {
        self.observe(frame)?;
        self.estimate_current(mode)
    }

    /// Forgets all history; friction returns to unknown (zero).
    pub fn reset(&mut self) {
        self.signs = FrictionSigns::zeros(self.params.joint_count);
        self.last_frame = None;
        self.onset_mode = ContactMode::None;
        self.last = None;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::frame::BaseWrench;

    fn frame(t: f64, len: [f64; 2], tension: [f64; 2]) -> ProximalFrame {
        ProximalFrame {
            timestamp: t,
            wrench: BaseWrench {
                force: [0.0, 0.0, tension[0] + tension[1]],
                torque: [0.0; 3],
            },
            tensions: tension,
            set_lengths: len,
        }
    }

    #[test]
    fn friction_follows_commanded_motion() {
        let p = RobotParams::default();
        let u = p.friction_coeff;
        let mut e = Estimator::new(p, EstimatorConfig::default()).unwrap();
        e.observe(&frame(0.0, [30.0, 30.0], [1.0, 0.0])).unwrap();
        assert!(e.friction_signs().signs.iter().all(|r| r == &[0.0, 0.0]));
        e.observe(&frame(0.1, [29.9, 30.2], [1.1, 0.0])).unwrap();
        assert!(e.friction_signs().signs.iter().all(|r| r == &[u, 0.0]));
        e.observe(&frame(0.2, [29.9, 30.2], [1.1, 0.0])).unwrap();
        assert!(e.friction_signs().signs.iter().all(|r| r == &[u, 0.0]));
        e.observe(&frame(0.3, [30.0, 30.2], [1.0, 0.0])).unwrap();
        assert!(e.friction_signs().signs.iter().all(|r| r == &[-u, 0.0]));
    }

    #[test]
    fn no_contact_yields_none() {
        let p = RobotParams::default();
        let rest = p.rest_path_length();
        let mut e = Estimator::new(p, EstimatorConfig::default()).unwrap();
        let est = e.process(&frame(0.0, [rest, rest], [0.0, 0.0]), EstimateMode::Auto).unwrap();
        assert_eq!(est.mode, ContactMode::None);
        assert_eq!(est.s_c, None);
        assert!(est.state.joints.iter().all(|j| j.theta == 0.0));
    }

    #[test]
    fn rejects_mismatched_signs() {
        let p = RobotParams::default();
        let mut e = Estimator::new(p, EstimatorConfig::default()).unwrap();
        assert!(e.set_friction_signs(FrictionSigns::zeros(3)).is_err());
        assert!(e.set_friction_signs(FrictionSigns::uniform(7, [5.0, 0.0])).is_err());
    }
}
