//! Configuration, CSV output, sweeps and the n_crit search.

pub mod config;
pub mod csv;
pub mod ncrit;
pub mod scenario;
pub mod sweep;

pub use config::{Mode, Overrides, ScenarioConfig, SweepSpec};
pub use csv::{emit_trace_csv, parse_trace_csv, TraceRow};
pub use ncrit::{find_n_crit, find_n_crit_with, NCritResult};
pub use scenario::{execute, run_config, run_scenario, run_with, Summary};
pub use sweep::{sweep, SweepAxis, SweepPoint, SweepResult};
