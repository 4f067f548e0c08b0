use serde::{Deserialize, Serialize};

use super::noise::NoiseModel;
use crate::equilibrium::ContactSpec;
use crate::error::{Error, Result};
use crate::model::params::{RobotParams, CABLES};
use crate::units::gf_to_newtons;

/// Piecewise-linear cable pull (shortening of the set length) over time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActuationProfile {
    pub cable: usize,
    /// `(t_s, pull_mm)` breakpoints, strictly increasing in time. The value is
    /// held before the first and after the last breakpoint.
    pub points: Vec<(f64, f64)>,
}

impl ActuationProfile {
    pub fn pull_at(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        let (t0, v0) = pts[k - 1];
        let (t1, v1) = pts[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContactLocation {
    Tip,
    ArcLength(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ContactLoad {
    /// Force in the global frame, N.
    Force([f64; 3]),
    /// Hanging weight in grams, pulling along −Z.
    SuspendedMass(f64),
}

impl ContactLoad {
    pub fn force(&self) -> [f64; 3] {
        match *self {
            ContactLoad::Force(f) => f,
            ContactLoad::SuspendedMass(g) => [0.0, 0.0, -gf_to_newtons(g)],
        }
    }
}

/// A load applied over the half-open interval `[start_s, end_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub start_s: f64,
    pub end_s: f64,
    pub location: ContactLocation,
    pub load: ContactLoad,
}

impl ContactEvent {
    pub fn is_active(&self, t: f64) -> bool {
        t >= self.start_s && t < self.end_s
    }

    pub fn arc_length(&self, params: &RobotParams) -> f64 {
        match self.location {
            ContactLocation::Tip => params.backbone_length(),
            ContactLocation::ArcLength(s) => s,
        }
    }

    pub fn spec(&self, params: &RobotParams) -> ContactSpec {
        ContactSpec::new(self.load.force(), self.arc_length(params))
    }
}

/// Scripted actuation and contact sequence for the forward simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub seed: u64,
    pub actuation: Vec<ActuationProfile>,
    pub contacts: Vec<ContactEvent>,
    pub noise: NoiseModel,
}

impl Scenario {
    pub fn validate(&self, params: &RobotParams) -> Result<()> {
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(Error::param("duration_s", "must be positive"));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(Error::param("sample_rate_hz", "must be positive"));
        }
        if self.sample_count() == 0 {
            return Err(Error::param("duration_s", "shorter than one sample period"));
        }
        let mut seen = [false; CABLES];
        for a in &self.actuation {
            if a.cable >= CABLES {
                return Err(Error::param("actuation.cable", format!("cable {} does not exist", a.cable + 1)));
            }
            if std::mem::replace(&mut seen[a.cable], true) {
                return Err(Error::param("actuation.cable", format!("cable {} has more than one profile", a.cable + 1)));
            }
            if a.points.is_empty() {
                return Err(Error::param("actuation.points", "needs at least one point"));
            }
            if a.points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                return Err(Error::param("actuation.points", "must be finite"));
            }
            if a.points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                return Err(Error::param("actuation.points", "times must be strictly increasing"));
            }
            if a.points.iter().any(|&(_, pull)| pull >= params.rest_path_length()) {
                return Err(Error::param("actuation.points", "pull exceeds the cable path length"));
            }
        }
        for c in &self.contacts {
            if !(c.start_s >= 0.0 && c.end_s > c.start_s && c.start_s <= self.duration_s) {
                return Err(Error::param("contact", format!("interval [{}, {}) is not within the scenario", c.start_s, c.end_s)));
            }
            match c.load {
                ContactLoad::SuspendedMass(g) if !(g.is_finite() && g >= 0.0) => {
                    return Err(Error::param("contact.mass_g", "must be non-negative"));
                }
                ContactLoad::Force(f) if !f.iter().all(|v| v.is_finite()) => {
                    return Err(Error::param("contact.force_N", "must be finite"));
                }
                _ => {}
            }
            let s = c.arc_length(params);
            if !(0.0..=params.backbone_length()).contains(&s) {
                return Err(Error::param("contact.arc_length_mm", format!("{s} mm is outside the backbone")));
            }
        }
        if !self.noise.is_valid() {
            return Err(Error::param("noise", "standard deviations must be non-negative"));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).round() as usize
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.sample_rate_hz
    }

    /// Commanded cable lengths at time `t`: rest path length minus pull.
    pub fn set_lengths(&self, t: f64, params: &RobotParams) -> [f64; CABLES] {
        let rest = params.rest_path_length();
        let mut out = [rest; CABLES];
        for a in &self.actuation {
            out[a.cable] = rest - a.pull_at(t);
        }
        out
    }

    pub fn active_contacts(&self, t: f64, params: &RobotParams) -> Vec<ContactSpec> {
        self.contacts.iter().filter(|c| c.is_active(t)).map(|c| c.spec(params)).collect()
    }
}
