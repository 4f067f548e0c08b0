//! Contact force, contact location and shape estimation from proximal sensing.

pub mod classify;
pub mod decouple;
pub mod estimate;
pub mod estimator;
pub mod frame;
pub mod recalibrate;

pub use classify::classify_contact_mode;
pub use decouple::{decouple, decouple_contact_force};
pub use estimate::{
    estimate_contact, estimate_shape, estimate_tip_force, search_grid, ContactEstimate, ContactMode, EstimateFlags,
    EstimatorConfig,
};
pub use estimator::{EstimateMode, Estimator};
pub use frame::{BaseWrench, ProximalFrame};
pub use recalibrate::{reciprocation_recalibrate, Reciprocation, ReciprocationDetector};
