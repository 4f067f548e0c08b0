//! Single-frame contact estimation.

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::decouple::decouple;
use super::frame::{cable_base_moment, ProximalFrame};
use crate::equilibrium::{
    cable_length_residual, resolve_contact, solve_displacement_control, solve_force_control, ContactSpec,
    EquilibriumResult, SolverOptions,
};
use crate::error::{Error, Result};
use crate::model::kinematics::{chain_forward_kinematics, locate_arc_length, ChainPoses};
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::{FrictionSigns, JointState};
use crate::optim::brent_minimize;
use crate::units::{gf_to_newtons, newtons_to_gf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ContactMode {
    None,
    Active,
    Passive,
    Tip,
}

impl ContactMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContactMode::None => "none",
            ContactMode::Active => "active",
            ContactMode::Passive => "passive",
            ContactMode::Tip => "tip",
        }
    }
}

impl std::str::FromStr for ContactMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ContactMode::None),
            "active" => Ok(ContactMode::Active),
            "passive" => Ok(ContactMode::Passive),
            "tip" => Ok(ContactMode::Tip),
            _ => Err(Error::InvalidConfiguration(format!("unknown contact mode `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EstimateFlags {
    /// The cable-length residual barely changes over the search range.
    pub low_confidence: bool,
    /// The measured base torque is inconsistent with a single point contact.
    pub multi_contact: bool,
    /// Produced after a reciprocation maneuver.
    pub recalibrated: bool,
}

/// Estimated contact and shape for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactEstimate {
    pub timestamp: f64,
    /// Contact force, global frame, N.
    pub force_global: [f64; 3],
    /// Contact force, global frame, gf.
    pub force_grams: [f64; 3],
    /// Contact arc length, mm; absent when no contact is detected.
    pub s_c: Option<f64>,
    pub contact_point: Option<[f64; 3]>,
    pub theta_c: Option<f64>,
    /// Euclidean norm of the cable-length residual, mm.
    pub residual: f64,
    pub mode: ContactMode,
    pub state: JointState,
    /// Tip frame of every flexure.
    pub shape: ChainPoses,
    /// Input tensions the estimate was computed with, N.
    pub tensions: [f64; CABLES],
    /// Norm of measured minus predicted base torque, N·mm.
    pub torque_residual: f64,
    pub flags: EstimateFlags,
    /// Equilibrium solves spent on this estimate.
    pub evaluations: usize,
}

impl ContactEstimate {
    pub fn force_magnitude(&self) -> f64 {
        Vector3::from(self.force_global).norm()
    }

    pub fn tip_position(&self) -> [f64; 3] {
        self.shape.distal_tip().position.into()
    }
}

/// Tuning of the estimator; defaults follow the sensor-resolution noise model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Equilibrium solver used inside the s_c search.
    pub solver: SolverOptions,
    /// Solver for displacement-controlled shape estimates.
    pub shape_solver: SolverOptions,
    /// Standard deviation of the decoupled force across the base axis, N.
    pub force_noise: f64,
    /// Standard deviation of the decoupled force along the base axis, N. Cable
    /// tension noise lands on this axis only.
    pub axial_force_noise: f64,
    /// Measured tensions at or below this are treated as a slack cable, N.
    pub slack_tension: f64,
    /// Coarse s_c grid step, mm; defaults to a quarter of the flexure length.
    pub grid_step: Option<f64>,
    /// Bracket width at which the s_c refinement stops, mm.
    pub refine_tolerance: f64,
    /// Residual contrast over the search range below which the estimate is flagged, mm.
    pub flat_residual: f64,
    /// Single-contact floor of the torque consistency residual, N·mm.
    pub torque_floor: f64,
    /// Largest decoupled-force change tolerated during a reciprocation maneuver, N.
    pub drift_tolerance: f64,
    /// Number of coarse-grid basins refined; the cable-length cost can have
    /// several exact zeros when the force has an axial component.
    pub basins: usize,
    /// Refined candidates whose length residual is within this of the best are
    /// treated as ties and separated by the base torque they predict, mm.
    pub ambiguity_band: f64,
    /// Evaluate the coarse grid on the rayon pool.
    pub parallel: bool,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            shape_solver: SolverOptions::default(),
            force_noise: gf_to_newtons(1.0),
            axial_force_noise: gf_to_newtons(1.0),
            slack_tension: 0.0,
            grid_step: None,
            refine_tolerance: 1e-3,
            flat_residual: 1e-4,
            torque_floor: 1.0 / 64.0,
            drift_tolerance: gf_to_newtons(5.0),
            basins: 3,
            ambiguity_band: 1e-3,
            parallel: true,
        }
    }
}

impl EstimatorConfig {
    /// Decoupled force in units of its noise, per axis.
    pub fn force_significance(&self, force: &Vector3<f64>) -> f64 {
        (force.x.hypot(force.y) / self.force_noise).hypot(force.z / self.axial_force_noise)
    }

    /// Contact is declared once the decoupled force exceeds three sigmas.
    pub fn detects(&self, force: &Vector3<f64>) -> bool {
        self.force_significance(force) >= DETECTION_SIGMAS
    }

    /// Measured tensions with slack cables snapped to zero.
    pub fn effective_tensions(&self, frame: &ProximalFrame) -> [f64; CABLES] {
        frame.tensions.map(|t| if t <= self.slack_tension { 0.0 } else { t })
    }
}

fn empty_estimate(frame: &ProximalFrame, force: Vector3<f64>, result: &EquilibriumResult, params: &RobotParams) -> ContactEstimate {
    ContactEstimate {
        timestamp: frame.timestamp,
        force_global: force.into(),
        force_grams: force.map(newtons_to_gf).into(),
        s_c: None,
        contact_point: None,
        theta_c: None,
        residual: 0.0,
        mode: ContactMode::None,
        state: result.state.clone(),
        shape: chain_forward_kinematics(&result.state, params),
        tensions: result.input_tensions,
        torque_residual: 0.0,
        flags: EstimateFlags::default(),
        evaluations: 1,
    }
}

/// Shape under the commanded cable lengths with the given (possibly empty) contacts.
pub fn estimate_shape(
    frame: &ProximalFrame,
    contacts: &[ContactSpec],
    signs: &FrictionSigns,
    params: &RobotParams,
    init: Option<&EquilibriumResult>,
    config: &EstimatorConfig,
) -> Result<EquilibriumResult> {
    solve_displacement_control(frame.set_lengths, contacts, signs, params, init, &config.shape_solver)
}

/// Base torque a single contact `force` at `point` would produce, plus the cable moments.
fn predicted_torque(point: &Vector3<f64>, force: &Vector3<f64>, tensions: &[f64; CABLES], params: &RobotParams) -> Vector3<f64> {
    point.cross(force) + cable_base_moment(tensions, params)
}

struct Candidate {
    s_c: f64,
    cost: f64,
    result: Option<EquilibriumResult>,
}

fn evaluate(
    s_c: f64,
    force: &Vector3<f64>,
    frame: &ProximalFrame,
    tensions: [f64; CABLES],
    signs: &FrictionSigns,
    params: &RobotParams,
    init: Option<&JointState>,
    config: &EstimatorConfig,
) -> Candidate {
    let contact = ContactSpec::new((*force).into(), s_c);
    match solve_force_control(tensions, &[contact], signs, params, init, &config.solver) {
        Ok(r) => {
            let d = cable_length_residual(&r, &frame.set_lengths);
            Candidate {
                s_c,
                cost: d.iter().map(|x| x * x).sum(),
                result: Some(r),
            }
        }
        Err(_) => Candidate {
            s_c,
            cost: f64::INFINITY,
            result: None,
        },
    }
}

/// Coarse grid over `[L_c, L]`, endpoints included.
///
/// The contact is carried by the next joint's frame once it passes a joint
/// boundary, so the cost jumps there. Both sides of every boundary are
/// sampled so that no basin straddles a jump.
pub fn search_grid(params: &RobotParams, config: &EstimatorConfig) -> Vec<f64> {
    let lo = params.channel_length;
    let hi = params.backbone_length();
    let step = config.grid_step.unwrap_or(params.beam_length / 4.0);
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    for j in 1..params.joint_count {
        let b = lo + j as f64 * params.joint_pitch();
        grid.extend([b, b + BOUNDARY_OFFSET]);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < BOUNDARY_OFFSET / 2.0);
    grid
}

const DETECTION_SIGMAS: f64 = 3.0;

/// Distance past a joint boundary at which the distal side is sampled, mm.
const BOUNDARY_OFFSET: f64 = 1e-6;

fn segment(s: f64, params: &RobotParams) -> usize {
    locate_arc_length(s, params).map_or(usize::MAX, |(k, _)| k)
}

/// Locates a single point contact from one frame.
///
/// The contact force comes from decoupling the base wrench. For every
/// candidate arc length the chain is solved under the measured tensions plus
/// that force, and the squared mismatch between model and commanded cable
/// lengths is scored. A coarse grid picks the basin, Brent's method refines it.
pub fn estimate_contact(
    frame: &ProximalFrame,
    signs: &FrictionSigns,
    params: &RobotParams,
    prior: Option<&ContactEstimate>,
    config: &EstimatorConfig,
) -> Result<ContactEstimate> {
    frame.validate()?;
    let force = decouple(frame);
    let tensions = config.effective_tensions(frame);
    let init = prior.map(|p| &p.state);
    if !config.detects(&force) {
        let r = estimate_shape(frame, &[], signs, params, None, config)?;
        return Ok(empty_estimate(frame, force, &r, params));
    }

    let grid = search_grid(params, config);
    let eval = |s: f64| evaluate(s, &force, frame, tensions, signs, params, init, config);
    let mut candidates: Vec<Candidate> = if config.parallel {
        grid.par_iter().map(|&s| eval(s)).collect()
    } else {
        grid.iter().map(|&s| eval(s)).collect()
    };
    let mut evaluations = candidates.len();
    let finite: Vec<f64> = candidates.iter().map(|c| c.cost).filter(|c| c.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::EstimationFailed("no contact candidate reached equilibrium".into()));
    }
    let worst = finite.iter().cloned().fold(0.0, f64::max);

    // local minima of the grid within each joint segment, best first
    let seg: Vec<usize> = grid.iter().map(|&s| segment(s, params)).collect();
    let cost = |k: usize| candidates[k].cost;
    let lower = |k: usize, n: Option<usize>| n.is_none_or(|n| seg[n] != seg[k] || cost(k) <= cost(n));
    let mut minima: Vec<usize> = (0..grid.len())
        .filter(|&k| cost(k).is_finite() && lower(k, k.checked_sub(1)) && lower(k, (k + 1 < grid.len()).then_some(k + 1)))
        .collect();
    minima.sort_by(|&a, &b| cost(a).total_cmp(&cost(b)).then(a.cmp(&b)));
    minima.truncate(config.basins.max(1));

    let mut refined_basins = Vec::with_capacity(minima.len());
    for &k in &minima {
        let a = if k > 0 && seg[k - 1] == seg[k] { grid[k - 1] } else { grid[k] };
        let b = if k + 1 < grid.len() && seg[k + 1] == seg[k] { grid[k + 1] } else { grid[k] };
        let mut best = std::mem::replace(
            &mut candidates[k],
            Candidate {
                s_c: 0.0,
                cost: f64::INFINITY,
                result: None,
            },
        );
        let warm = best.result.as_ref().map(|r| r.state.clone());
        if b > a {
            let mut refined: Option<Candidate> = None;
            brent_minimize(
                |s| {
                    evaluations += 1;
                    let c = evaluate(s, &force, frame, tensions, signs, params, warm.as_ref(), config);
                    let cost = c.cost;
                    if refined.as_ref().is_none_or(|r| cost < r.cost) {
                        refined = Some(c);
                    }
                    cost
                },
                a,
                b,
                best.s_c,
                best.cost,
                config.refine_tolerance / 2.0,
                100,
            );
            if let Some(r) = refined.filter(|r| r.cost < best.cost) {
                best = r;
            }
        }
        let result = best.result.take().expect("finite cost has a solution");
        let chain = chain_forward_kinematics(&result.state, params);
        let applied = resolve_contact(&ContactSpec::new(force.into(), best.s_c), &chain, params)?;
        let torque = predicted_torque(&applied.point, &force, &tensions, params);
        let torque_residual = (frame.wrench.torque_vector() - torque).norm();
        refined_basins.push((best, result, chain, applied, torque_residual));
    }
    let lowest = refined_basins.iter().map(|b| b.0.cost.sqrt()).fold(f64::INFINITY, f64::min);
    let (best, result, chain, applied, torque_residual) = refined_basins
        .into_iter()
        .filter(|b| b.0.cost.sqrt() <= lowest + config.ambiguity_band)
        .min_by(|x, y| x.4.total_cmp(&y.4))
        .expect("at least one basin");
    let s_end = params.backbone_length();
    Ok(ContactEstimate {
        timestamp: frame.timestamp,
        force_global: force.into(),
        force_grams: force.map(newtons_to_gf).into(),
        s_c: Some(best.s_c),
        contact_point: Some(applied.point.into()),
        theta_c: Some(applied.theta_c),
        residual: best.cost.sqrt(),
        mode: if s_end - best.s_c <= config.refine_tolerance { ContactMode::Tip } else { ContactMode::Passive },
        state: result.state.clone(),
        shape: chain,
        tensions,
        torque_residual,
        flags: EstimateFlags {
            low_confidence: worst.sqrt() - best.cost.sqrt() < config.flat_residual,
            multi_contact: torque_residual > 10.0 * config.torque_floor,
            recalibrated: false,
        },
        evaluations,
    })
}

/// Contact force with the contact pinned to the distal tip.
pub fn estimate_tip_force(
    frame: &ProximalFrame,
    signs: &FrictionSigns,
    params: &RobotParams,
    prior: Option<&ContactEstimate>,
    config: &EstimatorConfig,
) -> Result<ContactEstimate> {
    frame.validate()?;
    let force = decouple(frame);
    let _ = prior;
    if !config.detects(&force) {
        let r = estimate_shape(frame, &[], signs, params, None, config)?;
        return Ok(empty_estimate(frame, force, &r, params));
    }
    let s_end = params.backbone_length();
    let contact = ContactSpec::new(force.into(), s_end);
    let result = estimate_shape(frame, &[contact], signs, params, None, config)?;
    let chain = chain_forward_kinematics(&result.state, params);
    let applied = resolve_contact(&contact, &chain, params)?;
    let torque = predicted_torque(&applied.point, &force, &result.input_tensions, params);
    let torque_residual = (frame.wrench.torque_vector() - torque).norm();
    Ok(ContactEstimate {
        timestamp: frame.timestamp,
        force_global: force.into(),
        force_grams: force.map(newtons_to_gf).into(),
        s_c: Some(s_end),
        contact_point: Some(applied.point.into()),
        theta_c: Some(applied.theta_c),
        residual: cable_length_residual(&result, &frame.set_lengths).iter().map(|d| d * d).sum::<f64>().sqrt(),
        mode: ContactMode::Tip,
        state: result.state.clone(),
        shape: chain,
        tensions: result.input_tensions,
        torque_residual,
        flags: EstimateFlags {
            multi_contact: torque_residual > 10.0 * config.torque_floor,
            ..EstimateFlags::default()
        },
        evaluations: 1,
    })
}
