//! Robot configuration files: TOML with explicit units on every dimensional value.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::quantity::{Force, Length, Modulus, SecondMoment, Torque};
use crate::error::{Error, Result};
use crate::model::params::{rectangular_second_moment, RobotParams, XiCurve};
use crate::perception::EstimatorConfig;
use crate::simulator::NoiseModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotSection {
    outer_diameter: Length,
    inner_diameter: Length,
    cable_pitch_diameter: Length,
    beam_width: Length,
    notch_height: Length,
    beam_length: Length,
    channel_length: Length,
    joint_count: usize,
    austenite_modulus: Modulus,
    martensite_modulus: Modulus,
    friction_coeff: f64,
    /// Computed from the rectangular-spine approximation when omitted.
    #[serde(default)]
    second_moment: Option<SecondMoment>,
    cable_axial_stiffness: Force,
    unloaded_cable_length: Length,
    #[serde(default = "default_cable_count")]
    cable_count: usize,
    #[serde(default)]
    axial_compliance: f64,
}

fn default_cable_count() -> usize {
    2
}

/// `(angle rad, austenite ratio)` breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct XiSection {
    points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NoiseSection {
    force: Force,
    torque: Torque,
    tension: Force,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    robot: RobotSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xi_curve: Option<XiSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseSection>,
}

/// Robot parameters plus the optional sensor noise block.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotConfig {
    pub params: RobotParams,
    /// Sensor noise standard deviations, when characterized.
    pub noise: Option<NoiseModel>,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self {
            params: RobotParams::default(),
            noise: None,
        }
    }
}

/// 1-based line and column of byte offset `pos` in `text`.
pub(crate) fn line_column(text: &str, pos: usize) -> (usize, usize) {
    let before = &text[..pos.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Line of the first `key = ...` assignment, 0 when absent.
fn key_line(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| l.trim_start().strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('=')))
        .map_or(0, |k| k + 1)
}

impl RobotConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::Parse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        Self::from_file(file).map_err(|e| match e {
            Error::InvalidParameter { field, reason } => Error::Parse {
                line: key_line(text, field),
                column: 0,
                message: format!("invalid `{field}`: {reason}"),
            },
            e => e,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfiguration(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn from_file(f: ConfigFile) -> Result<Self> {
        let r = f.robot;
        let xi_curve = f
            .xi_curve
            .map(|x| XiCurve::new(x.points.iter().map(|p| (p[0], p[1])).collect()))
            .transpose()?;
        let params = RobotParams {
            outer_diameter: r.outer_diameter.0,
            inner_diameter: r.inner_diameter.0,
            cable_pitch_diameter: r.cable_pitch_diameter.0,
            beam_width: r.beam_width.0,
            notch_height: r.notch_height.0,
            beam_length: r.beam_length.0,
            channel_length: r.channel_length.0,
            joint_count: r.joint_count,
            austenite_modulus: r.austenite_modulus.0,
            martensite_modulus: r.martensite_modulus.0,
            friction_coeff: r.friction_coeff,
            second_moment: r.second_moment.map_or_else(
                || rectangular_second_moment(r.beam_width.0, r.outer_diameter.0, r.inner_diameter.0),
                |i| i.0,
            ),
            cable_axial_stiffness: r.cable_axial_stiffness.0,
            unloaded_cable_length: r.unloaded_cable_length.0,
            cable_count: r.cable_count,
            axial_compliance: r.axial_compliance,
            xi_curve,
        };
        params.validate()?;
        let noise = f.noise.map(|n| NoiseModel {
            force: n.force.0,
            torque: n.torque.0,
            tension: n.tension.0,
        });
        if noise.is_some_and(|n| !n.is_valid()) {
            return Err(Error::param("noise", "standard deviations must be non-negative"));
        }
        Ok(Self { params, noise })
    }

    fn to_file(&self) -> ConfigFile {
        let p = &self.params;
        ConfigFile {
            robot: RobotSection {
                outer_diameter: Length(p.outer_diameter),
                inner_diameter: Length(p.inner_diameter),
                cable_pitch_diameter: Length(p.cable_pitch_diameter),
                beam_width: Length(p.beam_width),
                notch_height: Length(p.notch_height),
                beam_length: Length(p.beam_length),
                channel_length: Length(p.channel_length),
                joint_count: p.joint_count,
                austenite_modulus: Modulus(p.austenite_modulus),
                martensite_modulus: Modulus(p.martensite_modulus),
                friction_coeff: p.friction_coeff,
                second_moment: Some(SecondMoment(p.second_moment)),
                cable_axial_stiffness: Force(p.cable_axial_stiffness),
                unloaded_cable_length: Length(p.unloaded_cable_length),
                cable_count: p.cable_count,
                axial_compliance: p.axial_compliance,
            },
            xi_curve: p.xi_curve.as_ref().map(|c| XiSection {
                points: c.points().iter().map(|&(t, x)| [t, x]).collect(),
            }),
            noise: self.noise.map(|n| NoiseSection {
                force: Force(n.force),
                torque: Torque(n.torque),
                tension: Force(n.tension),
            }),
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_file()).expect("config serializes")
    }

    /// Estimator tuning matched to the configured sensor noise.
    ///
    /// Without a noise block the defaults apply (1 gf detection noise, no
    /// slack threshold). With one, the decoupled-force noise along the base
    /// axis combines the force channel with both tension channels, slack is declared below
    /// three tension sigmas and the torque floor covers the force noise acting
    /// over the full backbone length.
    pub fn estimator_config(&self) -> EstimatorConfig {
        let mut c = EstimatorConfig::default();
        if let Some(n) = self.noise.filter(|n| !n.is_zero()) {
            let decoupled = (n.force.powi(2) + 2.0 * n.tension.powi(2)).sqrt();
            c.force_noise = c.force_noise.max(n.force);
            c.axial_force_noise = c.axial_force_noise.max(decoupled);
            c.slack_tension = 3.0 * n.tension;
            let lever = self.params.backbone_length();
            let floor = (n.torque.powi(2) + (lever * decoupled).powi(2) + (self.params.half_pitch() * n.tension).powi(2)).sqrt();
            c.torque_floor = c.torque_floor.max(floor);
            c.drift_tolerance = c.drift_tolerance.max(5.0 * decoupled);
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE2: &str = include_str!("../../data/table2.toml");

    #[test]
    fn bundled_config_is_the_default_robot() {
        let c = RobotConfig::parse(TABLE2).unwrap();
        assert_eq!(c.params, RobotParams::default());
        assert_eq!(c.noise, Some(NoiseModel::hardware()));
    }

    #[test]
    fn round_trip() {
        let c = RobotConfig::parse(TABLE2).unwrap();
        assert_eq!(RobotConfig::parse(&c.to_toml_string()).unwrap(), c);
        let mut p = RobotParams::default();
        p.xi_curve = Some(XiCurve::new(vec![(0.0, 1.0), (0.3, 0.4)]).unwrap());
        let c = RobotConfig { params: p, noise: None };
        assert_eq!(RobotConfig::parse(&c.to_toml_string()).unwrap(), c);
    }

    #[test]
    fn unknown_key_reports_location() {
        let text = TABLE2.replace("joint_count = 7", "joint_count = 7\nbogus = 1");
        match RobotConfig::parse(&text) {
            Err(Error::Parse { line, message, .. }) => {
                assert!(line > 0);
                assert!(message.contains("bogus"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_value_names_field() {
        let text = TABLE2.replace("cable_pitch_diameter = \"2.6 mm\"", "cable_pitch_diameter = \"-2.6 mm\"");
        let err = RobotConfig::parse(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cable_pitch_diameter"), "{msg}");
        assert!(matches!(err, Error::Parse { line, .. } if line == key_line(&text, "cable_pitch_diameter")));
    }

    #[test]
    fn bad_unit_reports_line() {
        let text = TABLE2.replace("beam_length = \"2.1 mm\"", "beam_length = \"2.1 GPa\"");
        match RobotConfig::parse(&text) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!(line, key_line(&text, "beam_length"));
                assert!(column > 0);
                assert!(message.contains("unknown length unit"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }
}
