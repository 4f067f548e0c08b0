//! Shooting solution of the large-deflection cantilever ODE.
//!
//! `EI·θ'' = F_z·sin θ − F_r·cos θ` on `[0, L]` with `θ(0) = 0` and
//! `θ'(L) = M/EI`. The unknown base curvature is found by a bracketed
//! secant/bisection search; each trial integrates the ODE with an adaptive
//! Dormand–Prince scheme.

use nalgebra::Vector4;
use ode_solvers::dop_shared::OutputType;
use ode_solvers::{Dopri5, System};

use crate::error::{Error, Result};
use crate::model::bcm::BeamLoads;
use crate::model::params::RobotParams;
use crate::model::state::JointDeflection;
use crate::optim::decreasing_root;

/// Relative tolerance of the adaptive integrator.
pub const INTEGRATION_RTOL: f64 = 1e-9;

type State = Vector4<f64>;

struct Elastica {
    f_r: f64,
    f_z: f64,
    ei: f64,
}

impl System<f64, State> for Elastica {
    // y = [θ, θ', x, z]
    fn system(&self, _s: f64, y: &State, dy: &mut State) {
        let (s, c) = y[0].sin_cos();
        dy[0] = y[1];
        dy[1] = (self.f_z * s - self.f_r * c) / self.ei;
        dy[2] = s;
        dy[3] = c;
    }
}

fn integrate(sys: Elastica, length: f64, kappa0: f64) -> Option<State> {
    let y0 = State::new(0.0, kappa0, 0.0, 0.0);
    // sparse output: the last sample is the accepted step that lands on the tip
    let mut solver = Dopri5::from_param(
        sys,
        0.0,
        length,
        length,
        y0,
        INTEGRATION_RTOL,
        1e-12,
        0.9,
        0.04,
        0.2,
        10.0,
        length,
        0.0,
        100_000,
        1000,
        OutputType::Sparse,
    );
    solver.integrate().ok()?;
    solver.y_out().last().copied().filter(|y| y.iter().all(|v| v.is_finite()))
}

/// Tip deflection of a flexure under `loads` from the Bernoulli–Euler ODE.
pub fn ode_shooting_deflection(loads: &BeamLoads, beam_length: f64, params: &RobotParams) -> Result<JointDeflection> {
    if !loads.is_finite() {
        return Err(Error::OracleFailure("loads must be finite".into()));
    }
    let ei = params.bending_stiffness(loads.modulus);
    let l = beam_length;
    let kappa_tip = loads.m_y / ei;
    let sys = || Elastica { f_r: loads.f_r, f_z: loads.f_z, ei };
    // tip-curvature mismatch; decreasing in the trial base curvature
    let h = |k0: f64| integrate(sys(), l, k0).map(|y| kappa_tip - y[1]);

    let guess = (loads.m_y + loads.f_r * l) / ei;
    let h0 = h(guess).ok_or_else(|| Error::OracleFailure("integration failed at initial guess".into()))?;
    if h0 == 0.0 {
        return tip(sys(), l, guess);
    }
    let scale = guess.abs().max(kappa_tip.abs()).max(1e-6 / l);
    let up = h0 > 0.0;
    let (mut near, mut h_near) = (guess, h0);
    let mut far = None;
    let mut step = scale;
    for _ in 0..60 {
        let x = if up { near + step } else { near - step };
        let hx = h(x).ok_or_else(|| Error::OracleFailure("integration failed while bracketing".into()))?;
        if (hx > 0.0) != up || hx == 0.0 {
            far = Some((x, hx));
            break;
        }
        (near, h_near) = (x, hx);
        step *= 2.0;
    }
    let (far, h_far) = far.ok_or_else(|| Error::OracleFailure("could not bracket the base curvature".into()))?;
    let ((lo, h_lo), hi) = if up { ((near, h_near), far) } else { ((far, h_far), near) };
    if h_lo == 0.0 {
        return tip(sys(), l, lo);
    }
    let ftol = 1e-13 * (1.0 / l + kappa_tip.abs());
    let (k0, _) = decreasing_root(h, lo, h_lo, hi, None, ftol, 1e-15 * scale, 300)
        .ok_or_else(|| Error::OracleFailure("shooting did not converge".into()))?;
    tip(sys(), l, k0)
}

fn tip(sys: Elastica, l: f64, k0: f64) -> Result<JointDeflection> {
    let y = integrate(sys, l, k0).ok_or_else(|| Error::OracleFailure("integration failed".into()))?;
    Ok(JointDeflection { r: y[2], z: y[3], theta: y[0] })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RobotParams {
        RobotParams::default()
    }

    #[test]
    fn zero_load_is_straight() {
        let p = params();
        let d = ode_shooting_deflection(&BeamLoads::zero(p.austenite_modulus), 2.1, &p).unwrap();
        assert_eq!((d.r, d.theta), (0.0, 0.0));
        assert!((d.z - 2.1).abs() < 1e-12);
    }

    #[test]
    fn pure_moment_closed_form() {
        let p = params();
        let ei = p.bending_stiffness(p.austenite_modulus);
        let m = 20.0;
        let d = ode_shooting_deflection(&BeamLoads { f_r: 0.0, f_z: 0.0, m_y: m, modulus: p.austenite_modulus }, 2.1, &p).unwrap();
        let th = m * 2.1 / ei;
        let rho = ei / m;
        assert!((d.theta - th).abs() < 1e-9);
        assert!((d.r - rho * (1.0 - th.cos())).abs() < 1e-8);
        assert!((d.z - rho * th.sin()).abs() < 1e-8);
    }

    /// Integral of `g(φ)/sqrt(sin θ_L − sin φ)` over `[0, θ_L]` via `φ = θ_L − t²`.
    fn elastica_integral(theta_l: f64, g: impl Fn(f64) -> f64) -> f64 {
        let n = 20_000;
        let b = theta_l.sqrt();
        let h = b / n as f64;
        let f = |t: f64| {
            if t == 0.0 {
                2.0 * g(theta_l) / theta_l.cos().sqrt()
            } else {
                let phi = theta_l - t * t;
                2.0 * t * g(phi) / (theta_l.sin() - phi.sin()).sqrt()
            }
        };
        let mut sum = f(0.0) + f(b);
        for k in 1..n {
            sum += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    #[test]
    fn large_deflection_matches_elastica() {
        let p = params();
        let ei = p.bending_stiffness(p.austenite_modulus);
        let l = 2.1;
        let theta_l: f64 = 1.0;
        let root_c = elastica_integral(theta_l, |_| 1.0) / l;
        let force = root_c * root_c * ei / 2.0;
        let x_tip = elastica_integral(theta_l, f64::sin) / root_c;
        let z_tip = 2.0 * theta_l.sin().sqrt() / root_c;
        let d = ode_shooting_deflection(&BeamLoads { f_r: force, f_z: 0.0, m_y: 0.0, modulus: p.austenite_modulus }, l, &p).unwrap();
        assert!(((d.theta - theta_l) / theta_l).abs() < 5e-3, "{}", d.theta);
        assert!(((d.r - x_tip) / x_tip).abs() < 5e-3, "{} vs {x_tip}", d.r);
        assert!(((d.z - z_tip) / z_tip).abs() < 5e-3, "{} vs {z_tip}", d.z);
        // the quadrature and the integrator agree far tighter than the oracle tolerance
        assert!((d.theta - theta_l).abs() < 1e-6);
    }

    #[test]
    fn compressive_and_tensile_axial_load() {
        let p = params();
        let e = p.austenite_modulus;
        let base = ode_shooting_deflection(&BeamLoads { f_r: 0.5, f_z: 0.0, m_y: 0.0, modulus: e }, 2.1, &p).unwrap();
        let tens = ode_shooting_deflection(&BeamLoads { f_r: 0.5, f_z: 10.0, m_y: 0.0, modulus: e }, 2.1, &p).unwrap();
        let comp = ode_shooting_deflection(&BeamLoads { f_r: 0.5, f_z: -10.0, m_y: 0.0, modulus: e }, 2.1, &p).unwrap();
        assert!(tens.theta < base.theta && base.theta < comp.theta);
    }
}
