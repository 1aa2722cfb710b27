//! Orchestration layer: scenario files, profiling, tuning, baseline
//! comparison, and trade-off report emission.

pub mod commands;
pub mod pareto;
pub mod report;
pub mod scenario;

pub use commands::{cmd_compare, cmd_profile, cmd_tradeoff, cmd_tune, Method};
pub use pareto::pareto_flags;
pub use report::{ComparisonReport, ReportRow};
pub use scenario::{BackendChoice, Scenario};
