//! C ABI over the estimator.
//!
//! Handles are opaque heap objects created by `*_new`/`*_from_*` and released
//! with the matching `*_free`. Every fallible call returns an [`NcrStatus`];
//! the message of the most recent failure on the calling thread is available
//! from [`ncr_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ncr_proprio::io::RobotConfig;
use ncr_proprio::model::RobotParams;
use ncr_proprio::perception::{BaseWrench, ContactEstimate, ContactMode, EstimateMode, Estimator, EstimatorConfig, ProximalFrame};
use ncr_proprio::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    NotConverged = 5,
    EstimationFailed = 6,
    Panic = 7,
}

/// Contact mode codes used in [`NcrEstimate::mode`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcrMode {
    None = 0,
    Active = 1,
    Passive = 2,
    Tip = 3,
}

/// How [`ncr_estimator_process`] locates the contact.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcrEstimateMode {
    Auto = 0,
    Tip = 1,
    Body = 2,
}

pub const NCR_FLAG_LOW_CONFIDENCE: u32 = 1;
pub const NCR_FLAG_MULTI_CONTACT: u32 = 2;
pub const NCR_FLAG_RECALIBRATED: u32 = 4;

/// One sample of proximal sensing. Forces in N, torques in N·mm, lengths in mm.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NcrFrame {
    pub timestamp: f64,
    pub force: [f64; 3],
    pub torque: [f64; 3],
    pub tensions: [f64; 2],
    pub set_lengths: [f64; 2],
}

/// Estimate for one frame. Quantities that do not exist without a contact are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NcrEstimate {
    pub timestamp: f64,
    pub mode: NcrMode,
    /// Contact force in the base frame, N.
    pub force: [f64; 3],
    pub arc_length: f64,
    pub contact_point: [f64; 3],
    pub tip_position: [f64; 3],
    pub residual: f64,
    pub torque_residual: f64,
    /// Bitwise OR of the `NCR_FLAG_*` constants.
    pub flags: u32,
}

impl Default for NcrEstimate {
    fn default() -> Self {
        Self {
            timestamp: f64::NAN,
            mode: NcrMode::None,
            force: [f64::NAN; 3],
            arc_length: f64::NAN,
            contact_point: [f64::NAN; 3],
            tip_position: [f64::NAN; 3],
            residual: f64::NAN,
            torque_residual: f64::NAN,
            flags: 0,
        }
    }
}

/// Robot description plus the estimator tuning derived from it.
pub struct NcrRobot {
    params: RobotParams,
    config: EstimatorConfig,
}

/// Streaming estimator with its friction and contact history.
pub struct NcrEstimator {
    inner: Estimator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NcrStatus {
    match e.root() {
        Error::Parse { .. } => NcrStatus::Parse,
        Error::InvalidParameter { .. } | Error::InvalidConfiguration(_) | Error::OutOfRange { .. } => NcrStatus::InvalidArgument,
        Error::InfeasibleDisplacement { .. } | Error::NonPhysicalLoad { .. } => NcrStatus::Infeasible,
        Error::NotConverged { .. } | Error::OracleFailure(_) => NcrStatus::NotConverged,
        _ => NcrStatus::EstimationFailed,
    }
}

/// Runs `f`, recording its error or panic for [`ncr_last_error`].
fn guard(f: impl FnOnce() -> Result<(), (NcrStatus, String)>) -> NcrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NcrStatus::Ok,
        Ok(Err((status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            NcrStatus::Panic
        }
    }
}

fn fail(e: Error) -> (NcrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NcrStatus, String) {
    (NcrStatus::NullPointer, format!("{what} is null"))
}

fn convert(e: &ContactEstimate) -> NcrEstimate {
    let mut flags = 0;
    if e.flags.low_confidence {
        flags |= NCR_FLAG_LOW_CONFIDENCE;
    }
    if e.flags.multi_contact {
        flags |= NCR_FLAG_MULTI_CONTACT;
    }
    if e.flags.recalibrated {
        flags |= NCR_FLAG_RECALIBRATED;
    }
    NcrEstimate {
        timestamp: e.timestamp,
        mode: match e.mode {
            ContactMode::None => NcrMode::None,
            ContactMode::Active => NcrMode::Active,
            ContactMode::Passive => NcrMode::Passive,
            ContactMode::Tip => NcrMode::Tip,
        },
        force: e.force_global,
        arc_length: e.s_c.unwrap_or(f64::NAN),
        contact_point: e.contact_point.unwrap_or([f64::NAN; 3]),
        tip_position: e.tip_position(),
        residual: e.residual,
        torque_residual: e.torque_residual,
        flags,
    }
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ncr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ncr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The bundled reference robot with default estimator tuning.
#[no_mangle]
pub extern "C" fn ncr_robot_default() -> *mut NcrRobot {
    Box::into_raw(Box::new(NcrRobot {
        params: RobotParams::default(),
        config: EstimatorConfig::default(),
    }))
}

/// Parses a robot configuration document. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncr_robot_from_toml(text: *const c_char, out: *mut *mut NcrRobot) -> NcrStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| (NcrStatus::InvalidArgument, "configuration is not UTF-8".to_string()))?;
        let config = RobotConfig::parse(text).map_err(fail)?;
        let robot = NcrRobot {
            config: config.estimator_config(),
            params: config.params,
        };
        *out = Box::into_raw(Box::new(robot));
        Ok(())
    })
}

/// Number of joints of the robot, or 0 for a null handle.
///
/// # Safety
/// `robot` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncr_robot_joint_count(robot: *const NcrRobot) -> usize {
    robot.as_ref().map_or(0, |r| r.params.joint_count)
}

/// Releases a robot handle. Null is ignored.
///
/// # Safety
/// `robot` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncr_robot_free(robot: *mut NcrRobot) {
    if !robot.is_null() {
        drop(Box::from_raw(robot));
    }
}

/// Creates an estimator for `robot`. The robot handle may be freed afterwards.
///
/// # Safety
/// `robot` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ncr_estimator_new(robot: *const NcrRobot, out: *mut *mut NcrEstimator) -> NcrStatus {
    guard(|| {
        let robot = robot.as_ref().ok_or_else(|| null("robot"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Estimator::new(robot.params.clone(), robot.config).map_err(fail)?;
        *out = Box::into_raw(Box::new(NcrEstimator { inner }));
        Ok(())
    })
}

/// Feeds one frame and estimates contact and shape for it. `mode` is one of
/// the `NcrEstimateMode` values; anything else is an invalid argument.
///
/// # Safety
/// `estimator` must be a live handle; `frame` and `out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ncr_estimator_process(
    estimator: *mut NcrEstimator,
    frame: *const NcrFrame,
    mode: u32,
    out: *mut NcrEstimate,
) -> NcrStatus {
    guard(|| {
        let est = estimator.as_mut().ok_or_else(|| null("estimator"))?;
        let f = frame.as_ref().ok_or_else(|| null("frame"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let frame = ProximalFrame {
            timestamp: f.timestamp,
            wrench: BaseWrench { force: f.force, torque: f.torque },
            tensions: f.tensions,
            set_lengths: f.set_lengths,
        };
        let mode = match mode {
            m if m == NcrEstimateMode::Auto as u32 => EstimateMode::Auto,
            m if m == NcrEstimateMode::Tip as u32 => EstimateMode::Tip,
            m if m == NcrEstimateMode::Body as u32 => EstimateMode::Body,
            m => return Err((NcrStatus::InvalidArgument, format!("unknown estimate mode {m}"))),
        };
        let e = est.inner.process(&frame, mode).map_err(fail)?;
        *out = convert(&e);
        Ok(())
    })
}

/// Backbone of the last estimate as `x, y, z` triples, base first then every
/// joint tip. Writes at most `capacity` points and stores the number available
/// in `*count`; call with `capacity = 0` to size the buffer.
///
/// # Safety
/// `estimator` must be a live handle, `count` valid, and `points` valid for
/// `3 * capacity` doubles when `capacity > 0`.
#[no_mangle]
pub unsafe extern "C" fn ncr_estimator_shape(
    estimator: *const NcrEstimator,
    points: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> NcrStatus {
    guard(|| {
        let est = estimator.as_ref().ok_or_else(|| null("estimator"))?;
        let count = count.as_mut().ok_or_else(|| null("count"))?;
        let last = est
            .inner
            .last_estimate()
            .ok_or_else(|| (NcrStatus::InvalidArgument, "no frame has been processed".to_string()))?;
        let mut pts = vec![[0.0; 3]];
        pts.extend(last.shape.tips.iter().map(|p| <[f64; 3]>::from(p.position)));
        *count = pts.len();
        if capacity > 0 {
            if points.is_null() {
                return Err(null("points"));
            }
            let dst = std::slice::from_raw_parts_mut(points, 3 * capacity);
            for (chunk, p) in dst.chunks_exact_mut(3).zip(&pts) {
                chunk.copy_from_slice(p);
            }
        }
        Ok(())
    })
}

/// Forgets all history: friction state, contact onset and warm starts.
///
/// # Safety
/// `estimator` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ncr_estimator_reset(estimator: *mut NcrEstimator) -> NcrStatus {
    guard(|| {
        estimator.as_mut().ok_or_else(|| null("estimator"))?.inner.reset();
        Ok(())
    })
}

/// Releases an estimator handle. Null is ignored.
///
/// # Safety
/// `estimator` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ncr_estimator_free(estimator: *mut NcrEstimator) {
    if !estimator.is_null() {
        drop(Box::from_raw(estimator));
    }
}
