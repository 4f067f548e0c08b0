//! File formats: robot configuration, scenarios and CSV traces.

pub mod config;
pub mod quantity;
pub mod report;
pub mod scenario_file;
pub mod trace_csv;

pub use config::RobotConfig;
pub use scenario_file::{load_scenario, parse_scenario, scenario_to_toml};
pub use trace_csv::{read_trace, write_trace, TraceFile};
