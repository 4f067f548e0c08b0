//! Estimate and shape CSV output with ground-truth scoring.

use std::io::Write;

use nalgebra::Vector3;

use super::trace_csv::format_number;
use crate::error::{Error, Result};
use crate::model::kinematics::ChainPoses;
use crate::perception::ContactEstimate;
use crate::simulator::GroundTruth;
use crate::units::newtons_to_gf;

/// Outcome of estimating one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub timestamp: f64,
    pub outcome: std::result::Result<ContactEstimate, String>,
    /// Wall-clock solve time, reported only on request since it is not reproducible.
    pub solve_ms: Option<f64>,
}

pub const ESTIMATE_COLUMNS: [&str; 19] = [
    "t_s",
    "mode",
    "fx_gf",
    "fy_gf",
    "fz_gf",
    "s_c_mm",
    "px_mm",
    "py_mm",
    "pz_mm",
    "theta_c_rad",
    "residual_mm",
    "torque_residual_Nmm",
    "tip_x_mm",
    "tip_y_mm",
    "tip_z_mm",
    "low_confidence",
    "multi_contact",
    "recalibrated",
    "error",
];

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidConfiguration(format!("write failed: {e}"))
}

fn opt(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

/// Error statistics of a set of estimates against ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimateSummary {
    pub frames: usize,
    pub failed: usize,
    /// Frames with a true contact that were estimated with a contact.
    pub scored: usize,
    pub missed: usize,
    pub false_alarms: usize,
    pub mean_force_error_gf: f64,
    pub max_force_error_gf: f64,
    /// Over frames with exactly one true contact.
    pub location_scored: usize,
    pub mean_s_c_error_mm: f64,
    pub max_s_c_error_mm: f64,
}

impl EstimateSummary {
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("frames = {}", self.frames),
            format!("failed = {}", self.failed),
            format!("scored = {}", self.scored),
            format!("missed = {}", self.missed),
            format!("false_alarms = {}", self.false_alarms),
        ];
        if self.scored > 0 {
            out.push(format!("mean_force_error_gf = {:.6}", self.mean_force_error_gf));
            out.push(format!("max_force_error_gf = {:.6}", self.max_force_error_gf));
        }
        if self.location_scored > 0 {
            out.push(format!("mean_s_c_error_mm = {:.6}", self.mean_s_c_error_mm));
            out.push(format!("max_s_c_error_mm = {:.6}", self.max_s_c_error_mm));
        }
        out
    }
}

pub fn summarize_estimates(rows: &[EstimateRow], truth: &[GroundTruth]) -> EstimateSummary {
    let mut s = EstimateSummary {
        frames: rows.len(),
        ..Default::default()
    };
    let (mut force_sum, mut loc_sum) = (0.0, 0.0);
    for (row, gt) in rows.iter().zip(truth) {
        let Ok(est) = &row.outcome else {
            s.failed += 1;
            continue;
        };
        let detected = est.s_c.is_some();
        match (gt.contact_count > 0, detected) {
            (true, false) => s.missed += 1,
            (false, true) => s.false_alarms += 1,
            (true, true) => {
                let e = newtons_to_gf((Vector3::from(est.force_global) - Vector3::from(gt.contact_force)).norm());
                s.scored += 1;
                force_sum += e;
                s.max_force_error_gf = s.max_force_error_gf.max(e);
                if let (Some(a), Some(b)) = (est.s_c, gt.contact_arc_length) {
                    let d = (a - b).abs();
                    s.location_scored += 1;
                    loc_sum += d;
                    s.max_s_c_error_mm = s.max_s_c_error_mm.max(d);
                }
            }
            (false, false) => {}
        }
    }
    if s.scored > 0 {
        s.mean_force_error_gf = force_sum / s.scored as f64;
    }
    if s.location_scored > 0 {
        s.mean_s_c_error_mm = loc_sum / s.location_scored as f64;
    }
    s
}

/// Writes one row per frame, then the summary as `#` comment lines.
pub fn write_estimates<W: Write>(out: W, rows: &[EstimateRow], summary: Option<&EstimateSummary>, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<&str> = ESTIMATE_COLUMNS.to_vec();
    if timing {
        head.push("solve_ms");
    }
    w.write_record(&head).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    for row in rows {
        let mut rec = vec![format_number(row.timestamp)];
        match &row.outcome {
            Ok(e) => {
                let tip = e.tip_position();
                rec.push(e.mode.as_str().to_string());
                rec.extend(e.force_grams.map(format_number));
                rec.push(opt(e.s_c));
                for k in 0..3 {
                    rec.push(opt(e.contact_point.map(|p| p[k])));
                }
                rec.push(opt(e.theta_c));
                rec.push(format_number(e.residual));
                rec.push(format_number(e.torque_residual));
                rec.extend(tip.map(format_number));
                rec.extend([e.flags.low_confidence, e.flags.multi_contact, e.flags.recalibrated].map(flag));
                rec.push(String::new());
            }
            Err(msg) => {
                rec.push("failed".into());
                rec.extend(std::iter::repeat_n(String::new(), ESTIMATE_COLUMNS.len() - 3));
                rec.push(msg.clone());
            }
        }
        if timing {
            rec.push(opt(row.solve_ms));
        }
        w.write_record(&rec).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    }
    let mut inner = w.into_inner().map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    if let Some(s) = summary {
        for line in s.lines() {
            writeln!(inner, "# {line}").map_err(io_error)?;
        }
    }
    inner.flush().map_err(io_error)
}

/// Backbone of one frame: base plus every flexure tip.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeRow {
    pub timestamp: f64,
    pub outcome: std::result::Result<ChainPoses, String>,
}

pub const SHAPE_COLUMNS: [&str; 7] = ["t_s", "joint", "x_mm", "y_mm", "z_mm", "theta_rad", "error"];

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ShapeSummary {
    pub frames: usize,
    pub failed: usize,
    pub mean_tip_error_mm: f64,
    pub max_tip_error_mm: f64,
}

impl ShapeSummary {
    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("frames = {}", self.frames),
            format!("failed = {}", self.failed),
            format!("mean_tip_error_mm = {:e}", self.mean_tip_error_mm),
            format!("max_tip_error_mm = {:e}", self.max_tip_error_mm),
        ]
    }
}

pub fn summarize_shapes(rows: &[ShapeRow], truth: &[GroundTruth]) -> ShapeSummary {
    let mut s = ShapeSummary {
        frames: rows.len(),
        ..Default::default()
    };
    let mut sum = 0.0;
    let mut n = 0;
    for (row, gt) in rows.iter().zip(truth) {
        match &row.outcome {
            Ok(chain) => {
                let e = (chain.distal_tip().position - Vector3::from(gt.tip_position)).norm();
                sum += e;
                n += 1;
                s.max_tip_error_mm = s.max_tip_error_mm.max(e);
            }
            Err(_) => s.failed += 1,
        }
    }
    if n > 0 {
        s.mean_tip_error_mm = sum / n as f64;
    }
    s
}

pub fn write_shapes<W: Write>(out: W, rows: &[ShapeRow], summary: Option<&ShapeSummary>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SHAPE_COLUMNS).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    for row in rows {
        let t = format_number(row.timestamp);
        match &row.outcome {
            Ok(chain) => {
                for k in 0..=chain.tips.len() {
                    let p = chain.tip_frame(k).position;
                    let rec = [
                        t.clone(),
                        k.to_string(),
                        format_number(p.x),
                        format_number(p.y),
                        format_number(p.z),
                        format_number(chain.heading(k)),
                        String::new(),
                    ];
                    w.write_record(&rec).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
                }
            }
            Err(msg) => {
                let rec = [t, String::new(), String::new(), String::new(), String::new(), String::new(), msg.clone()];
                w.write_record(&rec).map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
            }
        }
    }
    let mut inner = w.into_inner().map_err(|e| Error::InvalidConfiguration(e.to_string()))?;
    if let Some(s) = summary {
        for line in s.lines() {
            writeln!(inner, "# {line}").map_err(io_error)?;
        }
    }
    inner.flush().map_err(io_error)
}
