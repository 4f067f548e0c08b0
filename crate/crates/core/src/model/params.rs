use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::MPA_PER_GPA;

/// Number of cables in the planar antagonistic pair.
pub const CABLES: usize = 2;

/// Monotone piecewise-linear map from joint bending angle to austenite ratio.
///
/// If every breakpoint angle is non-negative the curve is evaluated at `|θ|`,
/// otherwise at the signed angle. Outside the table the end values are held.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiCurve {
    points: Vec<(f64, f64)>,
}

impl XiCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::param("xi_curve", "needs at least one point"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::param("xi_curve", "angles must be strictly increasing"));
            }
        }
        if points.iter().any(|&(t, x)| !t.is_finite() || !(0.0..=1.0).contains(&x)) {
            return Err(Error::param("xi_curve", "ratios must lie in [0, 1]"));
        }
        let increasing = points.windows(2).all(|w| w[1].1 >= w[0].1);
        let decreasing = points.windows(2).all(|w| w[1].1 <= w[0].1);
        if !(increasing || decreasing) {
            return Err(Error::param("xi_curve", "ratio must be monotone in angle"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let pts = &self.points;
        let t = if pts[0].0 >= 0.0 { theta.abs() } else { theta };
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts[pts.len() - 1];
        if t >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        let (t0, x0) = pts[k - 1];
        let (t1, x1) = pts[k];
        x0 + (x1 - x0) * (t - t0) / (t1 - t0)
    }
}

/// Geometry, stiffness and friction constants of a notched-tube joint chain.
///
/// Lengths are in mm, moduli in GPa, forces in N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotParams {
    pub outer_diameter: f64,
    pub inner_diameter: f64,
    /// Distance between the two cable channels.
    pub cable_pitch_diameter: f64,
    pub beam_width: f64,
    pub notch_height: f64,
    /// Flexure length of one joint.
    pub beam_length: f64,
    /// Rigid channel length preceding each flexure.
    pub channel_length: f64,
    pub joint_count: usize,
    pub austenite_modulus: f64,
    pub martensite_modulus: f64,
    pub friction_coeff: f64,
    /// Second moment of area of the flexure cross-section, mm⁴.
    pub second_moment: f64,
    /// Axial stiffness of a cable, N (elongation = F·L_os / k).
    pub cable_axial_stiffness: f64,
    pub unloaded_cable_length: f64,
    pub cable_count: usize,
    /// Dimensionless axial-compliance coefficient of the flexure centroid.
    pub axial_compliance: f64,
    pub xi_curve: Option<XiCurve>,
}

impl Default for RobotParams {
    /// The 3.5 mm notched-tube robot.
    fn default() -> Self {
        let (w, d_o, d_i) = (0.4, 3.5, 3.2);
        Self {
            outer_diameter: d_o,
            inner_diameter: d_i,
            cable_pitch_diameter: 2.6,
            beam_width: w,
            notch_height: 2.5,
            beam_length: 2.1,
            channel_length: 0.9,
            joint_count: 7,
            austenite_modulus: 47.05,
            martensite_modulus: 0.08,
            friction_coeff: 0.33,
            second_moment: 0.0016,
            cable_axial_stiffness: 5000.0,
            unloaded_cable_length: 150.0,
            cable_count: CABLES,
            axial_compliance: 0.0,
            xi_curve: None,
        }
    }
}

/// Second moment of two rectangular spine strips, each one wall thick and
/// `beam_width` wide in the bending direction.
pub fn rectangular_second_moment(beam_width: f64, outer_diameter: f64, inner_diameter: f64) -> f64 {
    let wall = 0.5 * (outer_diameter - inner_diameter);
    2.0 * wall * beam_width.powi(3) / 12.0
}

impl RobotParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |field: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(field, format!("must be positive and finite, got {v}")))
            }
        };
        positive("outer_diameter", self.outer_diameter)?;
        positive("inner_diameter", self.inner_diameter)?;
        positive("cable_pitch_diameter", self.cable_pitch_diameter)?;
        positive("beam_width", self.beam_width)?;
        positive("notch_height", self.notch_height)?;
        positive("beam_length", self.beam_length)?;
        positive("austenite_modulus", self.austenite_modulus)?;
        positive("martensite_modulus", self.martensite_modulus)?;
        positive("second_moment", self.second_moment)?;
        positive("cable_axial_stiffness", self.cable_axial_stiffness)?;
        positive("unloaded_cable_length", self.unloaded_cable_length)?;
        if self.inner_diameter >= self.outer_diameter {
            return Err(Error::param("inner_diameter", "must be smaller than outer_diameter"));
        }
        if self.cable_pitch_diameter >= self.inner_diameter {
            return Err(Error::param("cable_pitch_diameter", "must be smaller than inner_diameter"));
        }
        if !(self.channel_length.is_finite() && self.channel_length >= 0.0) {
            return Err(Error::param("channel_length", "must be non-negative"));
        }
        if self.joint_count < 1 {
            return Err(Error::param("joint_count", "must be at least 1"));
        }
        if self.martensite_modulus > self.austenite_modulus {
            return Err(Error::param("martensite_modulus", "must not exceed austenite_modulus"));
        }
        if !(self.friction_coeff.is_finite() && self.friction_coeff >= 0.0) {
            return Err(Error::param("friction_coeff", "must be non-negative"));
        }
        if self.cable_count != CABLES {
            return Err(Error::param("cable_count", "only the planar antagonistic pair (2) is supported"));
        }
        if !(self.axial_compliance.is_finite() && self.axial_compliance >= 0.0) {
            return Err(Error::param("axial_compliance", "must be non-negative"));
        }
        Ok(())
    }

    /// Channel plus flexure length of one joint.
    pub fn joint_pitch(&self) -> f64 {
        self.channel_length + self.beam_length
    }

    pub fn backbone_length(&self) -> f64 {
        self.joint_count as f64 * self.joint_pitch()
    }

    pub fn half_pitch(&self) -> f64 {
        0.5 * self.cable_pitch_diameter
    }

    /// Rest path length of one cable through the robot.
    pub fn rest_path_length(&self) -> f64 {
        self.backbone_length()
    }

    /// Flexure bending stiffness EI at modulus `modulus_gpa`, in N·mm².
    pub fn bending_stiffness(&self, modulus_gpa: f64) -> f64 {
        modulus_gpa * MPA_PER_GPA * self.second_moment
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let p = RobotParams::default();
        p.validate().unwrap();
        assert!((p.backbone_length() - 21.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_geometry() {
        let p = RobotParams {
            cable_pitch_diameter: -2.6,
            ..Default::default()
        };
        let err = p.validate().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { field: "cable_pitch_diameter", .. }));

        let p = RobotParams {
            inner_diameter: 3.6,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = RobotParams {
            martensite_modulus: 50.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn xi_curve_interpolates_and_clamps() {
        let c = XiCurve::new(vec![(0.0, 1.0), (0.2, 0.5), (0.4, 0.0)]).unwrap();
        assert_eq!(c.eval(0.0), 1.0);
        assert!((c.eval(0.1) - 0.75).abs() < 1e-12);
        assert!((c.eval(-0.1) - 0.75).abs() < 1e-12);
        assert_eq!(c.eval(1.0), 0.0);
        assert!(XiCurve::new(vec![(0.0, 0.2), (0.1, 0.8), (0.2, 0.1)]).is_err());
        assert!(XiCurve::new(vec![(0.0, 1.2)]).is_err());
    }
}
