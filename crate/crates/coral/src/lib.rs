//! Online throughput-power co-optimization for edge-inference hardware
//! configurations.
//!
//! The tuner searches a discrete 5-dimensional space (CPU frequency, CPU
//! core count, GPU frequency, memory frequency, concurrency level) for a
//! configuration meeting a throughput target within a power budget, guided
//! by distance-correlation weights computed online from a sliding window of
//! measurements. Baseline methods (exhaustive oracle, budget-matched random
//! search, manufacturer presets) and a benchmark harness ship alongside.
//!
//! See the `examples/` directory for one runnable example per capability,
//! or the `coral` binary for the `profile` / `tune` / `compare` /
//! `tradeoff` subcommands.

pub mod baselines;
pub mod config_space;
pub mod dcov;
pub mod device;
pub mod harness;
pub mod optimizer;

pub use config_space::{Configuration, DeviceSpec, Dimension, ParameterAxis, ProhibitedSet};
pub use device::{
    Backend, MeasurementProtocol, MeasurementSample, ProfileRecord, SyntheticBackend,
    SyntheticSurfaceParams, TableBackend,
};
pub use optimizer::{
    HeuristicMode, InitPolicy, RunOptions, ScenarioConstraints, TuningResult,
};
