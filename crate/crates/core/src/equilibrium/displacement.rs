//! Displacement control: set cable lengths given, input tensions unknown.

use super::force::solve_force_control;
use super::loads::ContactSpec;
use super::{EquilibriumResult, SolverOptions};
use crate::error::{Error, Result};
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::FrictionSigns;
use crate::optim::decreasing_root;

/// Consecutive sweeps a cable may end away from its set length before giving up.
const STUCK_SWEEPS: usize = 3;

/// Finds input tensions whose equilibrium cable lengths match `set_lengths`.
///
/// Cables are handled one at a time (Gauss–Seidel) with the other tension held
/// fixed. A cable that is already at least as long as its path at zero tension
/// goes slack and its length constraint is dropped. Solves that fail inside
/// the tension bracket (typically buckling) are treated as overshoot.
pub fn solve_displacement_control(
    set_lengths: [f64; CABLES],
    contacts: &[ContactSpec],
    signs: &FrictionSigns,
    params: &RobotParams,
    init: Option<&EquilibriumResult>,
    options: &SolverOptions,
) -> Result<EquilibriumResult> {
    if set_lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::InvalidConfiguration(format!("set lengths must be positive, got {set_lengths:?}")));
    }
    let tol = options.length_tolerance;
    let mut tensions = init.map_or([0.0; CABLES], |r| r.input_tensions);
    let mut current = match init {
        Some(r) => solve_force_control(tensions, contacts, signs, params, Some(&r.state), options)?,
        None => solve_force_control(tensions, contacts, signs, params, None, options)?,
    };
    let mut stuck = [0usize; CABLES];
    for _ in 0..options.max_sweeps {
        if satisfied(&current, &set_lengths, tol) {
            return Ok(current);
        }
        for cable in 0..CABLES {
            let base = tensions;
            let with = |t: f64, warm: &EquilibriumResult| -> Result<EquilibriumResult> {
                let mut input = base;
                input[cable] = t;
                solve_force_control(input, contacts, signs, params, Some(&warm.state), options)
            };
            let gap = |r: &EquilibriumResult| r.cable_lengths[cable] - set_lengths[cable];
            let slack = if tensions[cable] == 0.0 { current.clone() } else { with(0.0, &current)? };
            let g0 = gap(&slack);
            if g0 <= tol {
                tensions[cable] = 0.0;
                current = slack;
                continue;
            }
            let mut warm = current.clone();
            let mut found: Option<EquilibriumResult> = None;
            let guess = (tensions[cable] > 0.0).then_some(tensions[cable]);
            let root = decreasing_root(
                |t| match with(t, &warm) {
                    Err(_) => None,
                    Ok(r) => {
                        let g = gap(&r);
                        // continue from the slack side so every solve tracks the same branch
                        if g > 0.0 {
                            warm = r.clone();
                        }
                        found = Some(r);
                        Some(g)
                    }
                },
                0.0,
                g0,
                options.max_tension,
                guess,
                tol,
                1e-12,
                200,
            );
            let Some((t, g)) = root else {
                return Err(Error::InfeasibleDisplacement {
                    cable,
                    max_tension: options.max_tension,
                });
            };
            if t == 0.0 {
                return Err(Error::InfeasibleDisplacement {
                    cable,
                    max_tension: options.max_tension,
                });
            }
            if g.abs() > tol && t < options.max_tension * (1.0 - 1e-9) {
                // the gap jumps across zero: no equilibrium on this branch meets the set length
                stuck[cable] += 1;
                if stuck[cable] >= STUCK_SWEEPS {
                    return Err(Error::InfeasibleDisplacement {
                        cable,
                        max_tension: options.max_tension,
                    });
                }
            } else {
                stuck[cable] = 0;
            }
            tensions[cable] = t;
            current = match found {
                Some(r) if r.input_tensions[cable] == t => r,
                _ => with(t, &warm)?,
            };
            if gap(&current) > tol && t >= options.max_tension * (1.0 - 1e-9) {
                return Err(Error::InfeasibleDisplacement {
                    cable,
                    max_tension: options.max_tension,
                });
            }
        }
    }
    if satisfied(&current, &set_lengths, tol) {
        return Ok(current);
    }
    Err(Error::NotConverged {
        iterations: options.max_sweeps,
        residual: current.residual_norm,
    })
}

fn satisfied(r: &EquilibriumResult, set_lengths: &[f64; CABLES], tol: f64) -> bool {
    (0..CABLES).all(|a| {
        let gap = r.cable_lengths[a] - set_lengths[a];
        if r.input_tensions[a] == 0.0 {
            gap <= tol
        } else {
            gap.abs() <= tol
        }
    })
}
