//! Scenario files: constraints, device spec reference, backend selection,
//! and run options, in TOML.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::config_space::{DeviceSpec, SpecError};
use crate::device::{
    Backend, MeasurementProtocol, ProfileError, SyntheticBackend, SyntheticParamsError,
    SyntheticSurfaceParams, TableBackend,
};
use crate::optimizer::{ConstraintsError, HeuristicMode, InitPolicy, ScenarioConstraints};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario file: {0}")]
    Io(#[from] std::io::Error),
    #[error("scenario file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("constraints: {0}")]
    Constraints(#[from] ConstraintsError),
    #[error("device spec: {0}")]
    Spec(#[from] SpecError),
    #[error("profile table: {0}")]
    Profile(#[from] ProfileError),
    #[error("synthetic params: {0}")]
    Synthetic(#[from] SyntheticParamsError),
    #[error("backend spec `{0}` must be `table:<path>` or `synthetic:<params-file>`")]
    BadBackendSpec(String),
    #[error("synthetic backend needs a `device_spec`")]
    MissingDeviceSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintsFile {
    throughput_target_fps: f64,
    power_budget_mw: f64,
    #[serde(default)]
    power_floor_mw: f64,
    #[serde(default = "default_window")]
    window_size: usize,
    #[serde(default = "default_budget")]
    iteration_budget: usize,
}

fn default_window() -> usize {
    5
}

fn default_budget() -> usize {
    10
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum BackendFile {
    Table {
        path: PathBuf,
    },
    Synthetic {
        /// Path to a TOML file of surface parameters; defaults apply if absent.
        params: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    device_spec: Option<String>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    init_policy: InitPolicy,
    #[serde(default)]
    heuristic: HeuristicMode,
    constraints: ConstraintsFile,
    backend: BackendFile,
    #[serde(default = "MeasurementProtocol::default")]
    protocol: MeasurementProtocol,
}

/// The backend half of a scenario, before instantiation.
#[derive(Debug, Clone)]
pub enum BackendChoice {
    Table { path: PathBuf },
    Synthetic { params: SyntheticSurfaceParams },
}

impl BackendChoice {
    /// Parse a CLI-style `table:<path>` / `synthetic:<params-file>` string.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        match text.split_once(':') {
            Some(("table", path)) => Ok(BackendChoice::Table { path: PathBuf::from(path) }),
            Some(("synthetic", params)) if !params.is_empty() => {
                Ok(BackendChoice::Synthetic { params: load_params(Path::new(params))? })
            }
            None if text == "synthetic" => {
                Ok(BackendChoice::Synthetic { params: SyntheticSurfaceParams::default() })
            }
            _ => Err(ScenarioError::BadBackendSpec(text.to_string())),
        }
    }
}

fn load_params(path: &Path) -> Result<SyntheticSurfaceParams, ScenarioError> {
    let text = std::fs::read_to_string(path)?;
    let params: SyntheticSurfaceParams = toml::from_str(&text)?;
    params.validate()?;
    Ok(params)
}

/// A fully parsed tuning scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub constraints: ScenarioConstraints,
    pub device_spec: Option<String>,
    pub backend: BackendChoice,
    pub seed: u64,
    pub init_policy: InitPolicy,
    pub heuristic: HeuristicMode,
    pub protocol: MeasurementProtocol,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        let f: ScenarioFile = toml::from_str(text)?;
        let constraints = ScenarioConstraints {
            throughput_target: f.constraints.throughput_target_fps,
            power_budget: f.constraints.power_budget_mw,
            power_floor: f.constraints.power_floor_mw,
            window_size: f.constraints.window_size,
            iteration_budget: f.constraints.iteration_budget,
        };
        constraints.validate()?;
        let backend = match f.backend {
            BackendFile::Table { path } => BackendChoice::Table { path },
            BackendFile::Synthetic { params } => BackendChoice::Synthetic {
                params: match params {
                    Some(p) => load_params(&p)?,
                    None => SyntheticSurfaceParams::default(),
                },
            },
        };
        Ok(Scenario {
            constraints,
            device_spec: f.device_spec,
            backend,
            seed: f.seed,
            init_policy: f.init_policy,
            heuristic: f.heuristic,
            protocol: f.protocol,
        })
    }

    /// Instantiate the backend. Table backends get the scenario's device
    /// spec attached when one is named (it carries the default preset).
    pub fn build_backend(&self) -> Result<Box<dyn Backend>, ScenarioError> {
        match &self.backend {
            BackendChoice::Table { path } => {
                let table = TableBackend::load(path)?;
                let table = match &self.device_spec {
                    Some(reference) => table.with_spec(DeviceSpec::resolve(reference)?),
                    None => table,
                };
                Ok(Box::new(table))
            }
            BackendChoice::Synthetic { params } => {
                let reference =
                    self.device_spec.as_deref().ok_or(ScenarioError::MissingDeviceSpec)?;
                let spec = DeviceSpec::resolve(reference)?;
                Ok(Box::new(SyntheticBackend::new(spec, *params)?))
            }
        }
    }
}
