use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::wrench::synthesize_base_wrench;
use crate::equilibrium::{resolve_contact, solve_displacement_control, ContactSpec, EquilibriumResult, SolverOptions};
use crate::error::{Error, Result};
use crate::model::friction::friction_sign_update;
use crate::model::kinematics::chain_forward_kinematics;
use crate::model::params::{RobotParams, CABLES};
use crate::model::state::{FrictionSigns, JointState};
use crate::perception::frame::ProximalFrame;

/// Friction re-evaluation passes per sample.
const FRICTION_PASSES: usize = 3;

/// True values behind one simulated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Resultant of all active contact forces, N.
    pub contact_force: [f64; 3],
    /// Arc length of the contact when exactly one is active, mm.
    pub contact_arc_length: Option<f64>,
    pub contact_count: usize,
    pub contact_point: Option<[f64; 3]>,
    pub tip_position: [f64; 3],
    pub tip_angle: f64,
    /// Noise-free input tensions, N.
    pub tensions: [f64; CABLES],
    pub state: JointState,
}

/// Simulated sensor stream with its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorTrace {
    pub frames: Vec<ProximalFrame>,
    pub truth: Vec<GroundTruth>,
}

/// Quasi-static robot under displacement control with friction history.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: RobotParams,
    options: SolverOptions,
    signs: FrictionSigns,
    distal: Vec<[f64; CABLES]>,
    last: Option<EquilibriumResult>,
}

impl Simulator {
    pub fn new(params: &RobotParams) -> Self {
        Self::with_options(params, SolverOptions::precise())
    }

    pub fn with_options(params: &RobotParams, options: SolverOptions) -> Self {
        Self {
            params: params.clone(),
            options,
            signs: FrictionSigns::zeros(params.joint_count),
            distal: (0..params.joint_count).map(|i| [(params.joint_count - i) as f64 * params.beam_length; CABLES]).collect(),
            last: None,
        }
    }

    pub fn params(&self) -> &RobotParams {
        &self.params
    }

    pub fn friction_signs(&self) -> &FrictionSigns {
        &self.signs
    }

    pub fn last(&self) -> Option<&EquilibriumResult> {
        self.last.as_ref()
    }

    /// Advances to new set lengths and contacts, updating friction from how
    /// the cable moved through every guide since the previous step.
    pub fn step(&mut self, set_lengths: [f64; CABLES], contacts: &[ContactSpec]) -> Result<EquilibriumResult> {
        let u = self.params.friction_coeff;
        let mut signs = self.signs.clone();
        let mut result = None;
        for _ in 0..FRICTION_PASSES {
            let r = solve_displacement_control(set_lengths, contacts, &signs, &self.params, self.last.as_ref(), &self.options)?;
            let mut next = signs.clone();
            for (i, distal) in distal_lengths(&r).iter().enumerate() {
                for a in 0..CABLES {
                    next.signs[i][a] = friction_sign_update(
                        self.signs.signs[i][a],
                        distal[a],
                        self.distal[i][a],
                        r.span_tensions[i][a],
                        u,
                    );
                }
            }
            let done = next == signs;
            signs = next;
            result = Some(r);
            if done {
                break;
            }
        }
        let r = result.expect("at least one pass");
        self.signs = signs;
        self.distal = distal_lengths(&r);
        self.last = Some(r.clone());
        Ok(r)
    }
}

/// Cable length between each guide and the distal anchor. The cable is tied
/// off at the tip, so it slides through a guide exactly as this length changes.
fn distal_lengths(r: &EquilibriumResult) -> Vec<[f64; CABLES]> {
    let mut out = vec![[0.0; CABLES]; r.geometry.spans.len()];
    let mut acc = [0.0; CABLES];
    for (i, spans) in r.geometry.spans.iter().enumerate().rev() {
        for a in 0..CABLES {
            acc[a] += spans[a].length;
        }
        out[i] = acc;
    }
    out
}

pub fn ground_truth(result: &EquilibriumResult, contacts: &[ContactSpec], params: &RobotParams) -> Result<GroundTruth> {
    let chain = chain_forward_kinematics(&result.state, params);
    let tip = chain.distal_tip();
    let active: Vec<_> = contacts.iter().filter(|c| !c.is_zero()).collect();
    let mut force = [0.0; 3];
    for c in &active {
        for k in 0..3 {
            force[k] += c.force[k];
        }
    }
    let single = (active.len() == 1).then(|| active[0]);
    let point = match single {
        Some(c) => Some(resolve_contact(c, &chain, params)?.point.into()),
        None => None,
    };
    Ok(GroundTruth {
        contact_force: force,
        contact_arc_length: single.map(|c| c.arc_length),
        contact_count: active.len(),
        contact_point: point,
        tip_position: tip.position.into(),
        tip_angle: result.state.tip_angle(),
        tensions: result.input_tensions,
        state: result.state.clone(),
    })
}

/// Runs a scenario sample by sample and synthesizes the sensor stream.
pub fn run_scenario(scenario: &Scenario, params: &RobotParams) -> Result<SensorTrace> {
    params.validate()?;
    scenario.validate(params)?;
    let mut sim = Simulator::new(params);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let n = scenario.sample_count();
    let mut trace = SensorTrace {
        frames: Vec::with_capacity(n),
        truth: Vec::with_capacity(n),
    };
    for k in 0..n {
        let t = scenario.time(k);
        let set_lengths = scenario.set_lengths(t, params);
        let contacts = scenario.active_contacts(t, params);
        let at = |e: Error| Error::AtSample { index: k, source: Box::new(e) };
        let r = sim.step(set_lengths, &contacts).map_err(at)?;
        let wrench = synthesize_base_wrench(&r, &contacts, params).map_err(at)?;
        let mut frame = ProximalFrame {
            timestamp: t,
            wrench,
            tensions: r.input_tensions,
            set_lengths,
        };
        scenario.noise.apply(&mut frame, &mut rng);
        trace.truth.push(ground_truth(&r, &contacts, params).map_err(at)?);
        trace.frames.push(frame);
    }
    Ok(trace)
}
