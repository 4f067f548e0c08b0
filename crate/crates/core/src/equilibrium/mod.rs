//! Quasi-static equilibrium of the joint chain under cable actuation and contact.

pub mod displacement;
pub mod force;
pub mod loads;
pub mod residual;

use serde::{Deserialize, Serialize};

use crate::model::geometry::CableGeometry;
use crate::model::params::CABLES;
use crate::model::state::JointState;

pub use displacement::solve_displacement_control;
pub use force::solve_force_control;
pub use loads::{beam_tip_loads, resolve_contact, span_tensions, wrap_balance, AppliedContact, ContactSpec};
pub use residual::cable_length_residual;

/// Iteration controls shared by the force- and displacement-control solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Initial relaxation factor of the fixed-point update.
    pub damping: f64,
    /// Lower bound on the relaxation factor after repeated halving.
    pub min_damping: f64,
    /// Convergence threshold on the largest joint-angle update, rad.
    pub angle_tolerance: f64,
    pub max_iterations: usize,
    /// Cable length tolerance of the displacement-control root finder, mm.
    pub length_tolerance: f64,
    /// Upper end of the tension bracket, N.
    pub max_tension: f64,
    /// Outer sweeps over the cables in displacement control.
    pub max_sweeps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            damping: 0.5,
            min_damping: 1.0 / 64.0,
            angle_tolerance: 1e-6,
            max_iterations: 200,
            length_tolerance: 1e-4,
            max_tension: 50.0,
            max_sweeps: 50,
        }
    }
}

impl SolverOptions {
    /// Tight tolerances for ground-truth generation and oracles.
    pub fn precise() -> Self {
        Self {
            angle_tolerance: 1e-11,
            max_iterations: 2000,
            length_tolerance: 1e-9,
            max_sweeps: 200,
            ..Self::default()
        }
    }
}

/// Converged (or last) state of an equilibrium solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub state: JointState,
    pub geometry: CableGeometry,
    /// Tension inside the span of each flexure, N.
    pub span_tensions: Vec<[f64; CABLES]>,
    /// Tension applied at the proximal end of each cable, N.
    pub input_tensions: [f64; CABLES],
    /// Path length plus elastic elongation of each cable, mm.
    pub cable_lengths: [f64; CABLES],
    pub iterations: usize,
    pub converged: bool,
    /// Largest joint-angle change of the final iteration, rad.
    pub residual_norm: f64,
}

impl EquilibriumResult {
    pub fn tip_angle(&self) -> f64 {
        self.state.tip_angle()
    }
}
