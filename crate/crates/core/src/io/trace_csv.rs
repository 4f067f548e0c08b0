//! Sensor-trace CSV: one frame per row, optional ground-truth columns.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so a written trace reads back bitwise identical. Missing values
//! (for example the contact location of a contact-free frame) are empty cells.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::params::CABLES;
use crate::model::state::{JointDeflection, JointState};
use crate::perception::frame::{BaseWrench, ProximalFrame};
use crate::simulator::GroundTruth;

pub const FRAME_COLUMNS: [&str; 11] = [
    "t_s",
    "fx_N",
    "fy_N",
    "fz_N",
    "tx_Nmm",
    "ty_Nmm",
    "tz_Nmm",
    "tension_1_N",
    "tension_2_N",
    "setlen_1_mm",
    "setlen_2_mm",
];

const TRUTH_COLUMNS: [&str; 14] = [
    "gt_fx_N",
    "gt_fy_N",
    "gt_fz_N",
    "gt_contacts",
    "gt_s_c_mm",
    "gt_px_mm",
    "gt_py_mm",
    "gt_pz_mm",
    "gt_tip_x_mm",
    "gt_tip_y_mm",
    "gt_tip_z_mm",
    "gt_tip_theta_rad",
    "gt_tension_1_N",
    "gt_tension_2_N",
];

// the fixed column layout carries exactly two cables
const _: () = assert!(CABLES == 2);

/// Frames read from or written to a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub frames: Vec<ProximalFrame>,
    pub truth: Option<Vec<GroundTruth>>,
}

pub fn format_number(v: f64) -> String {
    format!("{v}")
}

fn format_optional(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

fn header(joints: Option<usize>) -> Vec<String> {
    let mut h: Vec<String> = FRAME_COLUMNS.iter().map(|s| s.to_string()).collect();
    if let Some(n) = joints {
        h.extend(TRUTH_COLUMNS.iter().map(|s| s.to_string()));
        for k in 1..=n {
            h.push(format!("gt_r_{k}_mm"));
            h.push(format!("gt_z_{k}_mm"));
            h.push(format!("gt_theta_{k}_rad"));
        }
    }
    h
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

pub fn write_trace<W: Write>(out: W, frames: &[ProximalFrame], truth: Option<&[GroundTruth]>) -> Result<()> {
    if let Some(t) = truth {
        if t.len() != frames.len() {
            return Err(Error::InvalidConfiguration("ground truth must cover every frame".into()));
        }
    }
    let joints = truth.map(|t| t.first().map_or(0, |g| g.state.len()));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(joints)).map_err(csv_error)?;
    for (k, f) in frames.iter().enumerate() {
        let mut row: Vec<String> = std::iter::once(f.timestamp)
            .chain(f.wrench.force)
            .chain(f.wrench.torque)
            .chain(f.tensions)
            .chain(f.set_lengths)
            .map(format_number)
            .collect();
        if let Some(truth) = truth {
            let g = &truth[k];
            if g.state.len() != joints.unwrap_or(0) {
                return Err(Error::InvalidConfiguration("ground-truth joint count changes within the trace".into()));
            }
            row.extend(g.contact_force.map(format_number));
            row.push(g.contact_count.to_string());
            row.push(format_optional(g.contact_arc_length));
            for i in 0..3 {
                row.push(format_optional(g.contact_point.map(|p| p[i])));
            }
            row.extend(g.tip_position.map(format_number));
            row.push(format_number(g.tip_angle));
            row.extend(g.tensions.map(format_number));
            for j in &g.state.joints {
                row.extend([j.r, j.z, j.theta].map(format_number));
            }
        }
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::InvalidConfiguration(format!("write failed: {e}")))?;
    Ok(())
}

fn cell(record: &csv::StringRecord, k: usize, line: usize, name: &str) -> Result<Option<f64>> {
    let text = record.get(k).unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|_| Error::Parse {
        line,
        column: k + 1,
        message: format!("column `{name}`: `{text}` is not a number"),
    })
}

pub fn read_trace<R: Read>(input: R) -> Result<TraceFile> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).comment(Some(b'#')).from_reader(input);
    let head = r.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = head.iter().collect();
    if names.len() < FRAME_COLUMNS.len() || names[..FRAME_COLUMNS.len()] != FRAME_COLUMNS {
        return Err(Error::Parse {
            line: 1,
            column: 0,
            message: format!("trace header must start with {}", FRAME_COLUMNS.join(",")),
        });
    }
    let joints = if names.len() == FRAME_COLUMNS.len() {
        None
    } else {
        let extra = names.len() - FRAME_COLUMNS.len() - TRUTH_COLUMNS.len();
        let n = extra / 3;
        let expected = header(Some(n));
        if names.len() < FRAME_COLUMNS.len() + TRUTH_COLUMNS.len() || extra % 3 != 0 || names != expected {
            return Err(Error::Parse {
                line: 1,
                column: 0,
                message: "unrecognized ground-truth columns".into(),
            });
        }
        Some(n)
    };
    let mut frames = Vec::new();
    let mut truth = joints.map(|_| Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let values = (0..names.len())
            .map(|k| cell(&rec, k, line, names[k]))
            .collect::<Result<Vec<Option<f64>>>>()?;
        let req = |k: usize| {
            values[k].ok_or_else(|| Error::Parse {
                line,
                column: k + 1,
                message: format!("column `{}` is empty", names[k]),
            })
        };
        let v = (0..FRAME_COLUMNS.len()).map(req).collect::<Result<Vec<f64>>>()?;
        let frame = ProximalFrame {
            timestamp: v[0],
            wrench: BaseWrench {
                force: [v[1], v[2], v[3]],
                torque: [v[4], v[5], v[6]],
            },
            tensions: [v[7], v[8]],
            set_lengths: [v[9], v[10]],
        };
        if let Some(prev) = frames.last().map(|f: &ProximalFrame| f.timestamp) {
            if !(frame.timestamp > prev) {
                return Err(Error::Parse {
                    line,
                    column: 1,
                    message: format!("t_s must increase, got {} after {prev}", frame.timestamp),
                });
            }
        }
        frame.validate().map_err(|e| Error::Parse {
            line,
            column: 0,
            message: e.to_string(),
        })?;
        frames.push(frame);
        if let (Some(n), Some(truth)) = (joints, truth.as_mut()) {
            let o = FRAME_COLUMNS.len();
            let g = |k: usize| req(o + k);
            let count = g(3)?;
            let point = match (values[o + 5], values[o + 6], values[o + 7]) {
                (Some(x), Some(y), Some(z)) => Some([x, y, z]),
                _ => None,
            };
            let base = o + TRUTH_COLUMNS.len();
            let joints = (0..n)
                .map(|j| {
                    Ok(JointDeflection {
                        r: req(base + 3 * j)?,
                        z: req(base + 3 * j + 1)?,
                        theta: req(base + 3 * j + 2)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            truth.push(GroundTruth {
                contact_force: [g(0)?, g(1)?, g(2)?],
                contact_arc_length: values[o + 4],
                contact_count: count as usize,
                contact_point: point,
                tip_position: [g(8)?, g(9)?, g(10)?],
                tip_angle: g(11)?,
                tensions: [g(12)?, g(13)?],
                state: JointState { joints },
            });
        }
    }
    Ok(TraceFile { frames, truth })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(t: f64) -> ProximalFrame {
        ProximalFrame {
            timestamp: t,
            wrench: BaseWrench {
                force: [0.1, -1.0 / 3.0, 2.5e-17],
                torque: [-0.0, 1e300, 7.0],
            },
            tensions: [1.0 / 7.0, 0.0],
            set_lengths: [20.9, 21.0],
        }
    }

    #[test]
    fn frames_round_trip_bitwise() {
        let frames = vec![frame(0.0), frame(0.02), frame(0.04)];
        let mut buf = Vec::new();
        write_trace(&mut buf, &frames, None).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.truth, None);
        for (a, b) in frames.iter().zip(&back.frames) {
            assert_eq!(a.wrench.torque[0].to_bits(), b.wrench.torque[0].to_bits());
            assert_eq!(a, b);
        }
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t_s,fx_N,fy_N,fz_N,tx_Nmm,ty_Nmm,tz_Nmm,tension_1_N,tension_2_N,setlen_1_mm,setlen_2_mm\n"));
    }

    #[test]
    fn truth_round_trip() {
        let frames = vec![frame(0.0), frame(0.5)];
        let g = |s: Option<f64>| GroundTruth {
            contact_force: [0.0, 0.1, -0.2],
            contact_arc_length: s,
            contact_count: usize::from(s.is_some()),
            contact_point: s.map(|s| [0.3, 0.0, s]),
            tip_position: [1.0, 0.0, 20.5],
            tip_angle: 0.3,
            tensions: [2.0, 0.0],
            state: JointState {
                joints: vec![JointDeflection { r: 0.01, z: 2.1, theta: 0.02 }; 3],
            },
        };
        let truth = vec![g(None), g(Some(12.25))];
        let mut buf = Vec::new();
        write_trace(&mut buf, &frames, Some(&truth)).unwrap();
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.frames, frames);
        assert_eq!(back.truth.unwrap(), truth);
    }

    #[test]
    fn rejects_non_monotone_time() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &[frame(0.5), frame(0.25)], None).unwrap();
        match read_trace(buf.as_slice()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_cell_with_location() {
        let text = format!("{}\n0,0,0,0,0,0,0,1,0,21,21\n0.1,0,abc,0,0,0,0,1,0,21,21\n", FRAME_COLUMNS.join(","));
        match read_trace(text.as_bytes()) {
            Err(Error::Parse { line, column, message }) => {
                assert_eq!((line, column), (3, 3));
                assert!(message.contains("fy_N"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_trace("t,fx\n0,0\n".as_bytes()).is_err());
    }
}
