//! Force control: input tensions given, joint deflections unknown.

use super::loads::{beam_tip_loads, resolve_contact, span_tensions, AppliedContact, ContactSpec};
use super::{EquilibriumResult, SolverOptions};
use crate::error::{Error, Result};
use crate::model::bcm::{bcm_deflection, effective_modulus};
use crate::model::geometry::{total_cable_length, CableGeometry};
use crate::model::kinematics::chain_forward_kinematics;
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::{FrictionSigns, JointDeflection, JointState};

/// One pass of the load–deflection map: loads from `state`, deflections from the beam model.
fn bcm_update(
    state: &JointState,
    input: [f64; CABLES],
    contacts: &[ContactSpec],
    signs: &FrictionSigns,
    params: &RobotParams,
) -> Result<(JointState, CableGeometry, Vec<[f64; CABLES]>)> {
    let geometry = CableGeometry::from_state(state, params)?;
    let chain = chain_forward_kinematics(state, params);
    let applied = contacts
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| resolve_contact(c, &chain, params))
        .collect::<Result<Vec<AppliedContact>>>()?;
    let tensions = span_tensions(input, &geometry, signs);
    let joints = state
        .joints
        .iter()
        .enumerate()
        .map(|(i, j)| {
            let modulus = effective_modulus(j.theta, params);
            let loads = beam_tip_loads(i, &tensions[i], &geometry, &applied, &chain, modulus, params);
            bcm_deflection(&loads, params.beam_length, params).map_err(|e| match e {
                Error::NonPhysicalLoad { axial_load, .. } => Error::NonPhysicalLoad { joint: i + 1, axial_load },
                e => e,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((JointState { joints }, geometry, tensions))
}

fn relax(old: &JointDeflection, new: &JointDeflection, lambda: f64) -> JointDeflection {
    JointDeflection {
        r: old.r + lambda * (new.r - old.r),
        z: old.z + lambda * (new.z - old.z),
        theta: old.theta + lambda * (new.theta - old.theta),
    }
}

/// Damped fixed-point solve of the chain for given input tensions.
///
/// Each iteration recomputes cable geometry, span tensions and tip loads from
/// the current state and moves every joint a fraction of the way towards its
/// beam-model deflection. The fraction is halved whenever the residual grows.
pub fn solve_force_control(
    input: [f64; CABLES],
    contacts: &[ContactSpec],
    signs: &FrictionSigns,
    params: &RobotParams,
    init: Option<&JointState>,
    options: &SolverOptions,
) -> Result<EquilibriumResult> {
    if input.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidConfiguration(format!("input tensions must be finite and non-negative, got {input:?}")));
    }
    for c in contacts {
        c.validate(params)?;
    }
    let mut state = match init {
        Some(s) if s.len() == params.joint_count && s.joints.iter().all(|j| j.is_valid(params.beam_length)) => s.clone(),
        _ => JointState::straight(params),
    };
    let mut lambda = options.damping;
    let mut prev_residual = f64::INFINITY;
    let mut residual = f64::INFINITY;
    for iteration in 1..=options.max_iterations {
        let (target, geometry, tensions) = bcm_update(&state, input, contacts, signs, params)?;
        residual = target.max_theta_difference(&state);
        if residual < options.angle_tolerance {
            let (geometry, tensions) = if target == state {
                (geometry, tensions)
            } else {
                let g = CableGeometry::from_state(&target, params)?;
                let t = span_tensions(input, &g, signs);
                (g, t)
            };
            return Ok(finish(target, geometry, tensions, input, iteration, true, residual, params));
        }
        if residual > prev_residual {
            lambda = (lambda * 0.5).max(options.min_damping);
        }
        prev_residual = residual;
        state = JointState {
            joints: state.joints.iter().zip(&target.joints).map(|(o, n)| relax(o, n, lambda)).collect(),
        };
    }
    Err(Error::NotConverged {
        iterations: options.max_iterations,
        residual,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    state: JointState,
    geometry: CableGeometry,
    span_tensions: Vec<[f64; CABLES]>,
    input: [f64; CABLES],
    iterations: usize,
    converged: bool,
    residual_norm: f64,
    params: &RobotParams,
) -> EquilibriumResult {
    let cable_lengths = [0, 1].map(|a| total_cable_length(&geometry, a, input[a], params));
    EquilibriumResult {
        state,
        geometry,
        span_tensions,
        input_tensions: input,
        cable_lengths,
        iterations,
        converged,
        residual_norm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RobotParams {
        RobotParams::default()
    }

    fn solve(input: [f64; 2], contacts: &[ContactSpec], signs: &FrictionSigns) -> EquilibriumResult {
        let p = params();
        solve_force_control(input, contacts, signs, &p, None, &SolverOptions::precise()).unwrap()
    }

    #[test]
    fn rest_is_immediate_fixed_point() {
        let p = params();
        let r = solve([0.0, 0.0], &[], &FrictionSigns::zeros(7));
        assert_eq!(r.iterations, 1);
        assert_eq!(r.state, JointState::straight(&p));
        assert_eq!(r.residual_norm, 0.0);
    }

    #[test]
    fn antagonistic_equal_tensions_stay_straight() {
        let r = solve([2.0, 2.0], &[], &FrictionSigns::zeros(7));
        assert!(r.state.joints.iter().all(|j| j.theta == 0.0 && j.r == 0.0));
        assert_eq!(r.state.joints[0].z, 2.1);
    }

    #[test]
    fn single_cable_ramp_is_monotone() {
        let mut last = 0.0;
        for k in 1..=10 {
            let r = solve([0.5 * k as f64, 0.0], &[], &FrictionSigns::zeros(7));
            assert!(r.converged);
            assert!(r.tip_angle() > last);
            last = r.tip_angle();
        }
    }

    #[test]
    fn mirrored_cable_mirrors_shape() {
        let a = solve([3.0, 0.0], &[], &FrictionSigns::zeros(7));
        let b = solve([0.0, 3.0], &[], &FrictionSigns::zeros(7));
        for (x, y) in a.state.joints.iter().zip(&b.state.joints) {
            assert!((x.theta + y.theta).abs() < 1e-10);
            assert!((x.z - y.z).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_contact_changes_nothing() {
        let signs = FrictionSigns::uniform(7, [0.33, 0.0]);
        let a = solve([2.0, 0.0], &[], &signs);
        let b = solve([2.0, 0.0], &[ContactSpec::new([0.0, 0.0, 0.0], 10.0)], &signs);
        assert_eq!(a, b);
    }

    #[test]
    fn tip_contact_bends_against_force() {
        let p = params();
        let r = solve([0.0, 0.0], &[ContactSpec::at_tip([-0.2, 0.0, 0.0], &p)], &FrictionSigns::zeros(7));
        assert!(r.tip_angle() < 0.0);
        assert!(r.state.joints.windows(2).all(|w| w[0].theta.abs() > w[1].theta.abs()));
    }

    #[test]
    fn buckling_load_reported() {
        let p = params();
        let err = solve_force_control([200.0, 200.0], &[], &FrictionSigns::zeros(7), &p, None, &SolverOptions::default());
        assert!(matches!(err, Err(Error::NonPhysicalLoad { joint: 1, .. })));
    }

    #[test]
    fn warm_start_reaches_same_state() {
        let p = params();
        let opts = SolverOptions::precise();
        let signs = FrictionSigns::zeros(7);
        let cold = solve([3.0, 0.0], &[], &signs);
        let warm_init = solve([2.5, 0.0], &[], &signs);
        let warm = solve_force_control([3.0, 0.0], &[], &signs, &p, Some(&warm_init.state), &opts).unwrap();
        assert!(warm.state.max_theta_difference(&cold.state) < 1e-9);
        assert!(warm.iterations < cold.iterations);
    }
}
