//! Scenario files for the simulator.
//!
//! ```toml
//! duration_s = 4.0
//! sample_rate_hz = 25.0
//! seed = 7
//!
//! [noise]
//! preset = "hardware"
//!
//! [[actuation]]
//! cable = 1
//! pull = [[0.0, "0 mm"], [2.0, "1 mm"]]
//!
//! [[contact]]
//! start_s = 2.0
//! end_s = 4.0
//! arc_length = "12 mm"
//! mass_g = 20.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::line_column;
use super::quantity::{Force, Length, Torque};
use crate::error::{Error, Result};
use crate::simulator::{ActuationProfile, ContactEvent, ContactLoad, ContactLocation, NoiseModel, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    force: Option<Force>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    torque: Option<Torque>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tension: Option<Force>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActuationSection {
    /// 1-based cable number.
    cable: usize,
    /// `[t_s, pull]` breakpoints.
    pull: Vec<(f64, Length)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactSection {
    start_s: f64,
    end_s: f64,
    /// `"tip"` or absent when `arc_length` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    location: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arc_length: Option<Length>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    force: Option<[Force; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mass_g: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    duration_s: f64,
    sample_rate_hz: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    actuation: Vec<ActuationSection>,
    #[serde(default, rename = "contact", skip_serializing_if = "Vec::is_empty")]
    contacts: Vec<ContactSection>,
}

fn invalid(message: impl Into<String>) -> Error {
    Error::Parse {
        line: 0,
        column: 0,
        message: message.into(),
    }
}

fn noise_from(n: NoiseSection) -> Result<NoiseModel> {
    let base = match n.preset.as_deref() {
        None | Some("none") => NoiseModel::none(),
        Some("hardware") => NoiseModel::hardware(),
        Some(other) => return Err(invalid(format!("unknown noise preset `{other}`, expected none or hardware"))),
    };
    Ok(NoiseModel {
        force: n.force.map_or(base.force, |f| f.0),
        torque: n.torque.map_or(base.torque, |t| t.0),
        tension: n.tension.map_or(base.tension, |t| t.0),
    })
}

fn contact_from(c: ContactSection, index: usize) -> Result<ContactEvent> {
    let location = match (c.location.as_deref(), c.arc_length) {
        (Some("tip"), None) => ContactLocation::Tip,
        (None, Some(s)) => ContactLocation::ArcLength(s.0),
        _ => return Err(invalid(format!("contact {}: give either location = \"tip\" or arc_length", index + 1))),
    };
    let load = match (c.force, c.mass_g) {
        (Some(f), None) => ContactLoad::Force(f.map(|f| f.0)),
        (None, Some(m)) => ContactLoad::SuspendedMass(m),
        _ => return Err(invalid(format!("contact {}: give either force or mass_g", index + 1))),
    };
    Ok(ContactEvent {
        start_s: c.start_s,
        end_s: c.end_s,
        location,
        load,
    })
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let actuation = file
        .actuation
        .into_iter()
        .map(|a| {
            if a.cable == 0 {
                return Err(invalid("actuation cable numbers start at 1"));
            }
            Ok(ActuationProfile {
                cable: a.cable - 1,
                points: a.pull.into_iter().map(|(t, p)| (t, p.0)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let contacts = file
        .contacts
        .into_iter()
        .enumerate()
        .map(|(k, c)| contact_from(c, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scenario {
        duration_s: file.duration_s,
        sample_rate_hz: file.sample_rate_hz,
        seed: file.seed,
        actuation,
        contacts,
        noise: file.noise.map(noise_from).transpose()?.unwrap_or_default(),
    })
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfiguration(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn scenario_to_toml(sc: &Scenario) -> String {
    let file = ScenarioFile {
        duration_s: sc.duration_s,
        sample_rate_hz: sc.sample_rate_hz,
        seed: sc.seed,
        noise: (!sc.noise.is_zero()).then(|| NoiseSection {
            preset: None,
            force: Some(Force(sc.noise.force)),
            torque: Some(Torque(sc.noise.torque)),
            tension: Some(Force(sc.noise.tension)),
        }),
        actuation: sc
            .actuation
            .iter()
            .map(|a| ActuationSection {
                cable: a.cable + 1,
                pull: a.points.iter().map(|&(t, p)| (t, Length(p))).collect(),
            })
            .collect(),
        contacts: sc
            .contacts
            .iter()
            .map(|c| {
                let (location, arc_length) = match c.location {
                    ContactLocation::Tip => (Some("tip".to_string()), None),
                    ContactLocation::ArcLength(s) => (None, Some(Length(s))),
                };
                let (force, mass_g) = match c.load {
                    ContactLoad::Force(f) => (Some(f.map(Force)), None),
                    ContactLoad::SuspendedMass(m) => (None, Some(m)),
                };
                ContactSection {
                    start_s: c.start_s,
                    end_s: c.end_s,
                    location,
                    arc_length,
                    force,
                    mass_g,
                }
            })
            .collect(),
    };
    toml::to_string(&file).expect("scenario serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAMP: &str = include_str!("../../data/ramp.toml");

    #[test]
    fn bundled_ramp_parses() {
        let sc = parse_scenario(RAMP).unwrap();
        assert_eq!(sc.actuation.len(), 2);
        assert_eq!(sc.actuation[0].cable, 0);
        assert!(sc.noise.is_zero());
        assert!(sc.validate(&crate::model::params::RobotParams::default()).is_ok());
    }

    #[test]
    fn round_trip() {
        let mut sc = parse_scenario(RAMP).unwrap();
        sc.noise = NoiseModel::hardware();
        sc.contacts = vec![
            ContactEvent {
                start_s: 0.5,
                end_s: 1.0,
                location: ContactLocation::Tip,
                load: ContactLoad::Force([-0.1, 0.0, 0.05]),
            },
            ContactEvent {
                start_s: 1.0,
                end_s: 2.0,
                location: ContactLocation::ArcLength(12.5),
                load: ContactLoad::SuspendedMass(20.0),
            },
        ];
        assert_eq!(parse_scenario(&scenario_to_toml(&sc)).unwrap(), sc);
    }

    #[test]
    fn ambiguous_contact_rejected() {
        let text = format!("{RAMP}\n[[contact]]\nstart_s = 0.0\nend_s = 1.0\nlocation = \"tip\"\narc_length = \"3 mm\"\nmass_g = 1.0\n");
        assert!(parse_scenario(&text).unwrap_err().to_string().contains("either"));
    }

    #[test]
    fn typo_reports_line() {
        let text = RAMP.replace("sample_rate_hz", "sample_rate");
        match parse_scenario(&text) {
            Err(Error::Parse { line, .. }) => assert!(line > 0),
            other => panic!("{other:?}"),
        }
    }
}
