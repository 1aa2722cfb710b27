//! Device backends: mapping a configuration to measured throughput and power.
//!
//! Two concrete backends ship here. [`TableBackend`] replays a recorded
//! profile table (the exhaustive-profiling substrate), and
//! [`SyntheticBackend`] evaluates a deterministic non-linear response
//! surface with optional seeded measurement noise. A real-device adapter
//! implements the same [`Backend`] contract; none is shipped.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write as _;
use std::path::Path;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config_space::{Configuration, DeviceSpec, Dimension, ParameterAxis, SpecError};

/// One observed (throughput, power) pair for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSample {
    pub config: Configuration,
    /// fps, averaged over `sample_count` readings.
    pub throughput: f64,
    /// mW, averaged over `sample_count` readings.
    pub power: f64,
    pub sample_count: u32,
}

/// Measurement timing: a warm-up period whose readings are discarded,
/// then `sample_count` one-second readings averaged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasurementProtocol {
    pub warmup_secs: u32,
    pub sample_count: u32,
    /// Sleep for real wall-clock seconds instead of simulating them.
    /// Only useful with adapter backends driving actual hardware.
    pub realtime: bool,
}

impl Default for MeasurementProtocol {
    fn default() -> Self {
        MeasurementProtocol { warmup_secs: 2, sample_count: 3, realtime: false }
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    /// The configuration cannot run on this device (OOM, runtime failure).
    /// Callers treat this like a constraint violation: prohibit and continue.
    #[error("configuration {0} is infeasible on this hardware")]
    InfeasibleHardware(Configuration),
    #[error("configuration {0} is not in the profile table")]
    NotInTable(Configuration),
    #[error("configuration {config} does not validate: {violation}")]
    InvalidConfig {
        config: Configuration,
        violation: crate::config_space::Violation,
    },
}

pub trait Backend {
    fn spec(&self) -> &DeviceSpec;

    fn measure(
        &self,
        config: &Configuration,
        protocol: &MeasurementProtocol,
    ) -> Result<MeasurementSample, MeasureError>;

    /// True when the full grid can be evaluated exhaustively (table replay,
    /// noiseless synthetic surface).
    fn enumerable(&self) -> bool;
}

// ---------------------------------------------------------------------------
// Profile table replay
// ---------------------------------------------------------------------------

/// One profiled configuration. Invalid records carry no metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRecord {
    pub config: Configuration,
    pub throughput: Option<f64>,
    pub power: Option<f64>,
    pub valid: bool,
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
    #[error("row {row}: duplicate configuration {config}")]
    Duplicate { row: usize, config: Configuration },
    #[error("profile table is empty")]
    Empty,
    #[error("derived device spec: {0}")]
    Spec(#[from] SpecError),
}

pub const PROFILE_CSV_HEADER: &str =
    "device,cpu_cores,cpu_freq_mhz,gpu_freq_mhz,mem_freq_mhz,concurrency,throughput_fps,power_mw,valid";

/// Replays a recorded profile table. Never fabricates: querying a
/// configuration absent from the table is an error, not an interpolation.
#[derive(Debug, Clone)]
pub struct TableBackend {
    device_name: String,
    records: BTreeMap<Configuration, ProfileRecord>,
    spec: DeviceSpec,
}

impl TableBackend {
    pub fn from_records(
        device_name: impl Into<String>,
        records: Vec<ProfileRecord>,
    ) -> Result<Self, ProfileError> {
        if records.is_empty() {
            return Err(ProfileError::Empty);
        }
        let mut map = BTreeMap::new();
        for (i, r) in records.into_iter().enumerate() {
            if map.insert(r.config, r).is_some() {
                return Err(ProfileError::Duplicate { row: i + 2, config: r.config });
            }
        }
        let device_name = device_name.into();
        let spec = derive_spec(&device_name, map.keys())?;
        Ok(TableBackend { device_name, records: map, spec })
    }

    pub fn device_name(&self) -> &str {
        &self.device_name
    }

    /// Replace the spec derived from the table rows with a full device spec
    /// (carries the default preset and any axis values the table never hit).
    pub fn with_spec(mut self, spec: DeviceSpec) -> Self {
        self.spec = spec;
        self
    }

    pub fn records(&self) -> impl Iterator<Item = &ProfileRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn load(path: &Path) -> Result<Self, ProfileError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_path(path)?;
        let mut records = Vec::new();
        let mut device_name: Option<String> = None;
        for (i, result) in reader.records().enumerate() {
            let row = i + 2; // 1-based, after the header line
            let rec = result.map_err(|e| ProfileError::Malformed { row, message: e.to_string() })?;
            if rec.len() != 9 {
                return Err(ProfileError::Malformed {
                    row,
                    message: format!("expected 9 columns, got {}", rec.len()),
                });
            }
            let device = rec[0].to_string();
            match &device_name {
                None => device_name = Some(device),
                Some(d) if *d != device => {
                    return Err(ProfileError::Malformed {
                        row,
                        message: format!("device changed from {d} to {device}"),
                    });
                }
                _ => {}
            }
            let parse_u32 = |idx: usize, name: &str| -> Result<u32, ProfileError> {
                rec[idx].parse().map_err(|_| ProfileError::Malformed {
                    row,
                    message: format!("non-numeric {name}: {:?}", &rec[idx]),
                })
            };
            let config = Configuration {
                cpu_cores: parse_u32(1, "cpu_cores")?,
                cpu_freq: parse_u32(2, "cpu_freq_mhz")?,
                gpu_freq: parse_u32(3, "gpu_freq_mhz")?,
                mem_freq: parse_u32(4, "mem_freq_mhz")?,
                concurrency: parse_u32(5, "concurrency")?,
            };
            let valid = match &rec[8] {
                "1" => true,
                "0" => false,
                other => {
                    return Err(ProfileError::Malformed {
                        row,
                        message: format!("valid must be 0 or 1, got {other:?}"),
                    });
                }
            };
            let parse_metric = |idx: usize, name: &str| -> Result<Option<f64>, ProfileError> {
                if rec[idx].is_empty() {
                    if valid {
                        return Err(ProfileError::Malformed {
                            row,
                            message: format!("valid row missing {name}"),
                        });
                    }
                    return Ok(None);
                }
                let v: f64 = rec[idx].parse().map_err(|_| ProfileError::Malformed {
                    row,
                    message: format!("non-numeric {name}: {:?}", &rec[idx]),
                })?;
                if !v.is_finite() {
                    return Err(ProfileError::Malformed {
                        row,
                        message: format!("non-finite {name}"),
                    });
                }
                Ok(Some(v))
            };
            let throughput = parse_metric(6, "throughput_fps")?;
            let power = parse_metric(7, "power_mw")?;
            let rec = ProfileRecord { config, throughput, power, valid };
            if let Some(prev_row) =
                records.iter().position(|r: &ProfileRecord| r.config == rec.config)
            {
                let _ = prev_row;
                return Err(ProfileError::Duplicate { row, config: rec.config });
            }
            records.push(rec);
        }
        Self::from_records(device_name.ok_or(ProfileError::Empty)?, records)
    }

    /// Write the table in lexicographic configuration order.
    pub fn dump(&self, path: &Path) -> Result<(), ProfileError> {
        let mut out = Vec::new();
        writeln!(out, "{PROFILE_CSV_HEADER}").unwrap();
        for r in self.records.values() {
            writeln!(out, "{}", format_profile_row(&self.device_name, r)).unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

pub fn format_profile_row(device: &str, r: &ProfileRecord) -> String {
    let metric = |m: Option<f64>| m.map(|v| format!("{v}")).unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{}",
        device,
        r.config.cpu_cores,
        r.config.cpu_freq,
        r.config.gpu_freq,
        r.config.mem_freq,
        r.config.concurrency,
        metric(r.throughput),
        metric(r.power),
        u8::from(r.valid),
    )
}

fn derive_spec<'a>(
    device_name: &str,
    configs: impl Iterator<Item = &'a Configuration>,
) -> Result<DeviceSpec, SpecError> {
    let mut values: [std::collections::BTreeSet<u32>; 5] = Default::default();
    for c in configs {
        for dim in Dimension::ALL {
            values[dim.index()].insert(c.get(dim));
        }
    }
    let mut axes = Vec::with_capacity(5);
    for dim in Dimension::ALL {
        axes.push(ParameterAxis::new(
            dim,
            values[dim.index()].iter().copied().collect(),
        )?);
    }
    let axes: [ParameterAxis; 5] = axes.try_into().unwrap();
    DeviceSpec::new(device_name, axes, None)
}

impl Backend for TableBackend {
    fn spec(&self) -> &DeviceSpec {
        &self.spec
    }

    fn measure(
        &self,
        config: &Configuration,
        protocol: &MeasurementProtocol,
    ) -> Result<MeasurementSample, MeasureError> {
        simulate_wait(protocol);
        match self.records.get(config) {
            None => Err(MeasureError::NotInTable(*config)),
            Some(r) if !r.valid => Err(MeasureError::InfeasibleHardware(*config)),
            Some(r) => Ok(MeasurementSample {
                config: *config,
                throughput: r.throughput.unwrap(),
                power: r.power.unwrap(),
                sample_count: protocol.sample_count,
            }),
        }
    }

    fn enumerable(&self) -> bool {
        true
    }
}

fn simulate_wait(protocol: &MeasurementProtocol) {
    if protocol.realtime {
        std::thread::sleep(Duration::from_secs(
            (protocol.warmup_secs + protocol.sample_count) as u64,
        ));
    }
}

// ---------------------------------------------------------------------------
// Synthetic response surface
// ---------------------------------------------------------------------------

/// Parameters of the synthetic throughput/power response surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSurfaceParams {
    pub peak_throughput: f64,
    pub idle_power: f64,
    pub cpu_power_coeff: f64,
    pub gpu_power_coeff: f64,
    pub mem_power_coeff: f64,
    pub concurrency_power_coeff: f64,
    /// GPU demand is capped at this multiple of normalized CPU capacity:
    /// raising GPU frequency past the cap yields no throughput gain.
    pub bottleneck_ratio: f64,
    /// Rate of the concurrency saturation factor 1 - exp(-k * c).
    pub concurrency_saturation: f64,
    /// Relative stddev of multiplicative Gaussian noise per reading; 0 disables.
    pub noise_stddev_fraction: f64,
    pub seed: u64,
    /// Fail configurations with concurrency at axis max and memory frequency
    /// at axis min, emulating out-of-memory failures.
    pub failure_predicate: bool,
}

impl Default for SyntheticSurfaceParams {
    fn default() -> Self {
        SyntheticSurfaceParams {
            peak_throughput: 46.0,
            idle_power: 2000.0,
            cpu_power_coeff: 2200.0,
            gpu_power_coeff: 3000.0,
            mem_power_coeff: 800.0,
            concurrency_power_coeff: 400.0,
            bottleneck_ratio: 3.5,
            concurrency_saturation: 0.5,
            noise_stddev_fraction: 0.0,
            seed: 0,
            failure_predicate: false,
        }
    }
}

#[derive(Debug, Error)]
pub enum SyntheticParamsError {
    #[error("{0} must be nonnegative")]
    NegativeCoeff(&'static str),
    #[error("noise_stddev_fraction must be in [0, 0.2]")]
    NoiseOutOfRange,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

impl SyntheticSurfaceParams {
    pub fn validate(&self) -> Result<(), SyntheticParamsError> {
        let coeffs = [
            ("cpu_power_coeff", self.cpu_power_coeff),
            ("gpu_power_coeff", self.gpu_power_coeff),
            ("mem_power_coeff", self.mem_power_coeff),
            ("concurrency_power_coeff", self.concurrency_power_coeff),
            ("bottleneck_ratio", self.bottleneck_ratio),
            ("concurrency_saturation", self.concurrency_saturation),
        ];
        for (name, v) in coeffs {
            if !(v >= 0.0) {
                return Err(SyntheticParamsError::NegativeCoeff(name));
            }
        }
        if !(0.0..=0.2).contains(&self.noise_stddev_fraction) {
            return Err(SyntheticParamsError::NoiseOutOfRange);
        }
        if !(self.peak_throughput > 0.0) {
            return Err(SyntheticParamsError::NonPositive("peak_throughput"));
        }
        if !(self.idle_power > 0.0) {
            return Err(SyntheticParamsError::NonPositive("idle_power"));
        }
        Ok(())
    }
}

/// Noiseless core of the response surface. Axis values are normalized
/// against the axis maximum before mixing.
pub fn synthetic_surface(
    params: &SyntheticSurfaceParams,
    spec: &DeviceSpec,
    config: &Configuration,
) -> (f64, f64) {
    let norm = |dim: Dimension| config.get(dim) as f64 / spec.axis(dim).max() as f64;
    let cores_n = norm(Dimension::CpuCores);
    let cpu_n = norm(Dimension::CpuFreq);
    let gpu_n = norm(Dimension::GpuFreq);
    let mem_n = norm(Dimension::MemFreq);
    let conc_n = norm(Dimension::Concurrency);

    let cpu_capacity = cpu_n * cores_n;
    let effective_gpu = gpu_n.min(params.bottleneck_ratio * cpu_capacity);
    let conc_factor =
        1.0 - (-params.concurrency_saturation * config.concurrency as f64).exp();
    let mem_factor = 0.5 + 0.5 * mem_n;
    let throughput = params.peak_throughput * effective_gpu * mem_factor * conc_factor;

    let power = params.idle_power
        + params.cpu_power_coeff * cpu_n * cores_n
        + params.gpu_power_coeff * gpu_n.powf(1.8)
        + params.mem_power_coeff * mem_n
        + params.concurrency_power_coeff * conc_n;

    (throughput, power)
}

/// Evaluates the synthetic surface under the measurement protocol.
/// Noise readings are derived from (seed, config, reading index), so
/// measurements are deterministic regardless of query order and the
/// backend is reentrant.
#[derive(Debug, Clone)]
pub struct SyntheticBackend {
    spec: DeviceSpec,
    params: SyntheticSurfaceParams,
}

impl SyntheticBackend {
    pub fn new(spec: DeviceSpec, params: SyntheticSurfaceParams) -> Result<Self, SyntheticParamsError> {
        params.validate()?;
        Ok(SyntheticBackend { spec, params })
    }

    pub fn params(&self) -> &SyntheticSurfaceParams {
        &self.params
    }

    fn fails(&self, config: &Configuration) -> bool {
        self.params.failure_predicate
            && config.concurrency == self.spec.axis(Dimension::Concurrency).max()
            && config.mem_freq == self.spec.axis(Dimension::MemFreq).min()
    }

    fn reading(&self, base: f64, config: &Configuration, metric: u64, idx: u32) -> f64 {
        if self.params.noise_stddev_fraction == 0.0 {
            return base;
        }
        let mut h = self.params.seed;
        for v in [
            config.cpu_cores as u64,
            config.cpu_freq as u64,
            config.gpu_freq as u64,
            config.mem_freq as u64,
            config.concurrency as u64,
            metric,
            idx as u64,
        ] {
            h = splitmix64(h ^ v);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h);
        let normal = Normal::new(1.0, self.params.noise_stddev_fraction).unwrap();
        (base * normal.sample(&mut rng)).max(0.0)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl Backend for SyntheticBackend {
    fn spec(&self) -> &DeviceSpec {
        &self.spec
    }

    fn measure(
        &self,
        config: &Configuration,
        protocol: &MeasurementProtocol,
    ) -> Result<MeasurementSample, MeasureError> {
        if let Err(violation) = self.spec.validate(config) {
            return Err(MeasureError::InvalidConfig { config: *config, violation });
        }
        if self.fails(config) {
            return Err(MeasureError::InfeasibleHardware(*config));
        }
        simulate_wait(protocol);
        let (tau, p) = synthetic_surface(&self.params, &self.spec, config);
        // warm-up readings are taken and discarded
        for i in 0..protocol.warmup_secs {
            let _ = self.reading(tau, config, 0, i);
            let _ = self.reading(p, config, 1, i);
        }
        let n = protocol.sample_count.max(1);
        let mut tau_sum = 0.0;
        let mut p_sum = 0.0;
        for i in 0..n {
            tau_sum += self.reading(tau, config, 0, protocol.warmup_secs + i);
            p_sum += self.reading(p, config, 1, protocol.warmup_secs + i);
        }
        Ok(MeasurementSample {
            config: *config,
            throughput: tau_sum / n as f64,
            power: (p_sum / n as f64).max(f64::MIN_POSITIVE),
            sample_count: n,
        })
    }

    fn enumerable(&self) -> bool {
        self.params.noise_stddev_fraction == 0.0
    }
}

/// Measure every grid configuration and collect profile records
/// (failed configurations are recorded with valid = 0).
pub fn profile_grid(backend: &dyn Backend, protocol: &MeasurementProtocol) -> Vec<ProfileRecord> {
    backend
        .spec()
        .enumerate_grid()
        .into_iter()
        .map(|config| match backend.measure(&config, protocol) {
            Ok(s) => ProfileRecord {
                config,
                throughput: Some(s.throughput),
                power: Some(s.power),
                valid: true,
            },
            Err(_) => ProfileRecord { config, throughput: None, power: None, valid: false },
        })
        .collect()
}

impl fmt::Display for MeasurementSample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} fps @ {:.0} mW {}", self.throughput, self.power, self.config)
    }
}
