//! Forward simulation of sensor streams and the beam ODE oracle.

pub mod noise;
pub mod run;
pub mod scenario;
pub mod shooting;
pub mod wrench;

pub use noise::NoiseModel;
pub use run::{ground_truth, run_scenario, GroundTruth, SensorTrace, Simulator};
pub use scenario::{ActuationProfile, ContactEvent, ContactLoad, ContactLocation, Scenario};
pub use shooting::ode_shooting_deflection;
pub use wrench::synthesize_base_wrench;
