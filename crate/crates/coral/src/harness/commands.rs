//! The four harness commands: profile a grid, run the tuner, compare
//! methods, and emit Pareto trade-off data.

use std::io::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::baselines::{oracle_search, preset_eval, random_search, PresetMode};
use crate::config_space::DeviceSpec;
use crate::device::{profile_grid, MeasurementProtocol, SyntheticBackend, TableBackend};
use crate::harness::pareto::pareto_flags;
use crate::harness::report::ComparisonReport;
use crate::harness::scenario::{BackendChoice, Scenario};
use crate::optimizer::{self, RunOptions, TuningResult};

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_file_or_literal(reference: &str) -> String {
    match std::fs::read(reference) {
        Ok(bytes) => sha256_hex(&bytes),
        Err(_) => sha256_hex(reference.as_bytes()),
    }
}

/// Enumerate the grid, measure every configuration, and write a profile
/// CSV (failed configurations get valid=0).
pub fn cmd_profile(
    spec_ref: &str,
    backend: &BackendChoice,
    seed: Option<u64>,
    protocol: &MeasurementProtocol,
    out_csv: &Path,
) -> Result<()> {
    let spec = DeviceSpec::resolve(spec_ref).context("resolving device spec")?;
    let device_name = spec.device_name.clone();
    let records = match backend {
        BackendChoice::Synthetic { params } => {
            let mut params = *params;
            if let Some(s) = seed {
                params.seed = s;
            }
            let backend = SyntheticBackend::new(spec, params)?;
            profile_grid(&backend, protocol)
        }
        BackendChoice::Table { path } => {
            // re-profiling a table normalizes row order
            let table = TableBackend::load(path)?.with_spec(spec);
            profile_grid(&table, protocol)
        }
    };
    let table = TableBackend::from_records(device_name, records)?;
    table.dump(out_csv).context("writing profile CSV")?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct TuneOutput {
    pub seed: u64,
    pub spec_hash: String,
    pub scenario_hash: String,
    pub result: TuningResult,
}

/// Run the tuner for one scenario and write the result (with the full
/// per-iteration trace) as JSON.
pub fn cmd_tune(
    scenario_path: &Path,
    seed_override: Option<u64>,
    out_json: Option<&Path>,
) -> Result<TuneOutput> {
    let mut scenario = Scenario::load(scenario_path)?;
    if let Some(s) = seed_override {
        scenario.seed = s;
    }
    let backend = scenario.build_backend()?;
    let options = RunOptions {
        init_policy: scenario.init_policy,
        heuristic: scenario.heuristic,
        protocol: scenario.protocol,
        seed: scenario.seed,
    };
    let result = optimizer::run(backend.as_ref(), &scenario.constraints, &options)?;

    let output = TuneOutput {
        seed: scenario.seed,
        spec_hash: hash_file_or_literal(
            scenario.device_spec.as_deref().unwrap_or("(table-derived)"),
        ),
        scenario_hash: sha256_hex(&std::fs::read(scenario_path)?),
        result,
    };
    if let Some(path) = out_json {
        let mut f = std::fs::File::create(path)
            .with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(&mut f, &output)?;
        writeln!(f)?;
    }
    Ok(output)
}

/// A comparison method selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Coral,
    Oracle,
    Random(usize),
    MaxPower,
    Default,
}

impl Method {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "coral" => Ok(Method::Coral),
            "oracle" => Ok(Method::Oracle),
            "random" => Ok(Method::Random(10)),
            "max_power" => Ok(Method::MaxPower),
            "default" => Ok(Method::Default),
            _ => {
                if let Some(n) = text.strip_prefix("random") {
                    let n: usize = n.parse().context("trial count after `random`")?;
                    return Ok(Method::Random(n));
                }
                bail!("unknown method {text:?} (expected coral, oracle, randomN, max_power, default)")
            }
        }
    }
}

/// Run each requested method on the same backend and constraints and emit
/// a comparison report.
pub fn cmd_compare(
    scenario_path: &Path,
    methods: &[Method],
    seed_override: Option<u64>,
    out_report: Option<&Path>,
) -> Result<ComparisonReport> {
    let mut scenario = Scenario::load(scenario_path)?;
    if let Some(s) = seed_override {
        scenario.seed = s;
    }
    let backend = scenario.build_backend()?;
    if methods.contains(&Method::Oracle) && !backend.enumerable() {
        bail!("oracle requires an enumerable backend (profile table or noiseless surface)");
    }

    let mut results = Vec::new();
    for method in methods {
        let result = match method {
            Method::Coral => {
                let options = RunOptions {
                    init_policy: scenario.init_policy,
                    heuristic: scenario.heuristic,
                    protocol: scenario.protocol,
                    seed: scenario.seed,
                };
                optimizer::run(backend.as_ref(), &scenario.constraints, &options)?
            }
            Method::Oracle => {
                oracle_search(backend.as_ref(), &scenario.constraints, &scenario.protocol)?
            }
            Method::Random(trials) => {
                let mut r = random_search(
                    backend.as_ref(),
                    &scenario.constraints,
                    *trials,
                    scenario.seed,
                    &scenario.protocol,
                )?;
                r.method = format!("random{trials}");
                r
            }
            Method::MaxPower => {
                preset_eval(backend.as_ref(), PresetMode::MaxPower, &scenario.constraints, &scenario.protocol)?
            }
            Method::Default => {
                preset_eval(backend.as_ref(), PresetMode::Default, &scenario.constraints, &scenario.protocol)?
            }
        };
        results.push(result);
    }

    let report = ComparisonReport::new(
        scenario.seed,
        hash_file_or_literal(scenario.device_spec.as_deref().unwrap_or("(table-derived)")),
        sha256_hex(&std::fs::read(scenario_path)?),
        &results,
    );
    if let Some(path) = out_report {
        std::fs::write(path, report.to_csv_string())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(report)
}

pub const TRADEOFF_CSV_HEADER: &str =
    "device,cpu_cores,cpu_freq_mhz,gpu_freq_mhz,mem_freq_mhz,concurrency,throughput_fps,power_mw,pareto";

/// Emit (power, throughput) scatter rows with a Pareto-frontier flag.
pub fn cmd_tradeoff(profile_csv: &Path, out_csv: &Path) -> Result<()> {
    let table = TableBackend::load(profile_csv)?;
    let valid: Vec<_> = table.records().filter(|r| r.valid).collect();
    if valid.is_empty() {
        bail!("profile has no valid rows");
    }
    let points: Vec<(f64, f64)> = valid
        .iter()
        .map(|r| (r.power.unwrap(), r.throughput.unwrap()))
        .collect();
    let flags = pareto_flags(&points);

    let mut out = Vec::new();
    writeln!(out, "{TRADEOFF_CSV_HEADER}")?;
    for (r, flag) in valid.iter().zip(&flags) {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            table.device_name(),
            r.config.cpu_cores,
            r.config.cpu_freq,
            r.config.gpu_freq,
            r.config.mem_freq,
            r.config.concurrency,
            r.throughput.unwrap(),
            r.power.unwrap(),
            u8::from(*flag),
        )?;
    }
    std::fs::write(out_csv, out)?;
    Ok(())
}
