//! Model health checks against independent oracles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{solve_displacement_control, solve_force_control, ContactSpec, SolverOptions};
use crate::model::bcm::{bcm_deflection, BeamLoads};
use crate::model::friction::{capstan_propagate, friction_sign_update, Wrap};
use crate::model::params::RobotParams;
use crate::model::state::FrictionSigns;
use crate::perception::{decouple, ProximalFrame};
use crate::simulator::{ode_shooting_deflection, synthesize_base_wrench};

/// Largest joint angle for which the beam model is trusted, rad.
pub const VALIDITY_BAND: f64 = 0.35;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Joint loads spanning the operating envelope: cable tension up to 5 N and a
/// lateral contact force up to ±0.3 N acting one to four joint pitches away.
/// On the reference robot every load stays inside the validity band.
pub fn envelope_loads(params: &RobotParams) -> Vec<BeamLoads> {
    let mut out = Vec::with_capacity(100);
    for i in 0..5 {
        let t = 1.25 * i as f64;
        for j in 0..5 {
            let f = -0.3 + 0.15 * j as f64;
            for k in 1..=4 {
                let lever = k as f64 * params.joint_pitch();
                out.push(BeamLoads {
                    f_r: f,
                    f_z: -t,
                    m_y: t * params.half_pitch() + f * lever,
                    modulus: params.austenite_modulus,
                });
            }
        }
    }
    out
}

/// Tip position error (fraction of the flexure length) and relative tip angle
/// error of the beam model against the shooting oracle.
pub fn bcm_ode_discrepancy(loads: &BeamLoads, params: &RobotParams) -> crate::Result<(f64, f64, f64)> {
    let l = params.beam_length;
    let b = bcm_deflection(loads, l, params)?;
    let o = ode_shooting_deflection(loads, l, params)?;
    let pos = (b.r - o.r).hypot(b.z - o.z) / l;
    let dt = (b.theta - o.theta).abs();
    let ang = if o.theta == 0.0 { dt } else { dt / o.theta.abs() };
    Ok((pos, ang, b.theta))
}

fn bcm_check(params: &RobotParams) -> Vec<Check> {
    let loads = envelope_loads(params);
    let (mut pos, mut ang, mut theta) = (0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for l in &loads {
        match bcm_ode_discrepancy(l, params) {
            Ok((p, a, t)) => {
                pos = pos.max(p);
                ang = ang.max(a);
                theta = theta.max(t.abs());
            }
            Err(_) => failures += 1,
        }
    }
    vec![
        check(
            "validity-band",
            failures == 0 && theta <= VALIDITY_BAND,
            format!("max joint angle {theta:.4} rad over {} envelope loads (band {VALIDITY_BAND} rad), {failures} singular", loads.len()),
        ),
        check(
            "bcm-ode",
            failures == 0 && pos <= 0.01 && ang <= 0.01,
            format!("max tip position error {:.4}% of flexure length, max tip angle error {:.4}%", 100.0 * pos, 100.0 * ang),
        ),
    ]
}

fn capstan_check(params: &RobotParams) -> Check {
    let u = params.friction_coeff;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=12);
        let dir = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let wraps: Vec<Wrap> = (0..n).map(|_| Wrap::new(rng.random_range(0.0..0.5), dir * u)).collect();
        let t0 = rng.random_range(0.0..10.0);
        let whole = capstan_propagate(t0, &wraps);
        let mut stepwise = t0;
        for w in &wraps {
            let next = capstan_propagate(stepwise, std::slice::from_ref(w));
            ok &= if dir > 0.0 { next >= stepwise } else { next <= stepwise };
            stepwise = next;
        }
        let split = rng.random_range(0..=n);
        let halves = capstan_propagate(capstan_propagate(t0, &wraps[..split]), &wraps[split..]);
        let scale = whole.abs().max(1.0);
        worst = worst.max((whole - stepwise).abs() / scale).max((whole - halves).abs() / scale);
        let total: f64 = wraps.iter().map(|w| w.angle).sum();
        ok &= whole <= t0 * (u * total).exp() * (1.0 + 1e-12) && whole >= t0 * (-u * total).exp() * (1.0 - 1e-12);
    }
    check(
        "capstan",
        ok && worst <= 1e-12,
        format!("10000 random wrap sequences, telescoping error {worst:.2e}, monotone and bounded: {ok}"),
    )
}

fn sign_check(params: &RobotParams) -> Check {
    let u = params.friction_coeff;
    let ok = friction_sign_update(0.0, 2.0, 2.1, 1.0, u) == u
        && friction_sign_update(0.0, 2.1, 2.0, 1.0, u) == -u
        && friction_sign_update(u, 2.0, 2.1, 0.0, u) == 0.0
        && friction_sign_update(-u, 2.1, 2.1, 1.0, u) == -u;
    check("friction-sign", ok, format!("shortening, lengthening, slack and hold branches with u = {u}"))
}

fn statics_check(params: &RobotParams) -> Vec<Check> {
    let opts = SolverOptions::precise();
    let signs = FrictionSigns::uniform(params.joint_count, [params.friction_coeff, 0.0]);
    let mut worst = 0.0f64;
    let mut failed = None;
    for k in 1..=5 {
        let t = 0.5 * k as f64;
        let result = solve_force_control([t, 0.0], &[], &signs, params, None, &opts).and_then(|fwd| {
            let set = [fwd.cable_lengths[0], fwd.cable_lengths[1] + 1.0];
            solve_displacement_control(set, &[], &signs, params, None, &opts)
        });
        match result {
            Ok(back) => worst = worst.max((back.input_tensions[0] - t).abs()),
            Err(e) => failed = Some(e.to_string()),
        }
    }
    let duality = check(
        "force-displacement",
        failed.is_none() && worst <= 1e-6,
        match &failed {
            Some(e) => format!("solve failed: {e}"),
            None => format!("tension recovered from cable length within {worst:.2e} N"),
        },
    );

    let contact = [ContactSpec::new([0.1, -0.05, 0.02], 0.6 * params.backbone_length())];
    let decoupling = solve_force_control([1.0, 0.0], &contact, &signs, params, None, &SolverOptions::default())
        .and_then(|r| Ok((synthesize_base_wrench(&r, &contact, params)?, r)))
        .map(|(w, r)| {
            let frame = ProximalFrame {
                timestamp: 0.0,
                wrench: w,
                tensions: r.input_tensions,
                set_lengths: r.cable_lengths,
            };
            (decouple(&frame) - contact[0].force_vector()).norm()
        });
    let decoupling = match decoupling {
        Ok(e) => check("decoupling", e <= 1e-12, format!("contact force recovered within {e:.2e} N")),
        Err(e) => check("decoupling", false, format!("solve failed: {e}")),
    };
    vec![duality, decoupling]
}

pub fn run_validation(params: &RobotParams) -> Vec<Check> {
    let mut out = bcm_check(params);
    out.push(capstan_check(params));
    out.push(sign_check(params));
    out.extend(statics_check(params));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_robot_passes() {
        let checks = run_validation(&RobotParams::default());
        for c in &checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn soft_flexure_leaves_validity_band() {
        let mut p = RobotParams::default();
        p.second_moment /= 100.0;
        let checks = run_validation(&p);
        let band = checks.iter().find(|c| c.name == "validity-band").unwrap();
        assert!(!band.passed, "{}", band.detail);
    }

    #[test]
    fn frictionless_passes() {
        let mut p = RobotParams::default();
        p.friction_coeff = 0.0;
        assert!(run_validation(&p).iter().filter(|c| c.name == "capstan" || c.name == "friction-sign").all(|c| c.passed));
    }
}
