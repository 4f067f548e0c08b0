//! Unit conversions used at the reporting boundary.
//!
//! Everything internal is N, mm, rad and N·mm. Moduli are stored in GPa and
//! converted to N/mm² (= MPa) where a stiffness is formed.

/// Standard gravity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Newtons per gram-force.
pub const NEWTONS_PER_GF: f64 = STANDARD_GRAVITY * 1e-3;

/// Newtons per pound-force.
pub const NEWTONS_PER_LBF: f64 = 4.448_221_615_260_5;

/// N/mm² per GPa.
pub const MPA_PER_GPA: f64 = 1e3;

pub fn newtons_to_gf(f: f64) -> f64 {
    f / NEWTONS_PER_GF
}

pub fn gf_to_newtons(g: f64) -> f64 {
    g * NEWTONS_PER_GF
}
