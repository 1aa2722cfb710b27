//! Tunable hardware parameter space: axes, device specs, grid enumeration,
//! value snapping and the prohibited-configuration set.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The five tunable dimensions, in the order used for grid enumeration
/// and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    CpuCores,
    CpuFreq,
    GpuFreq,
    MemFreq,
    Concurrency,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::CpuCores,
        Dimension::CpuFreq,
        Dimension::GpuFreq,
        Dimension::MemFreq,
        Dimension::Concurrency,
    ];

    pub fn index(self) -> usize {
        match self {
            Dimension::CpuCores => 0,
            Dimension::CpuFreq => 1,
            Dimension::GpuFreq => 2,
            Dimension::MemFreq => 3,
            Dimension::Concurrency => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Dimension::CpuCores => "cpu_cores",
            Dimension::CpuFreq => "cpu_freq",
            Dimension::GpuFreq => "gpu_freq",
            Dimension::MemFreq => "mem_freq",
            Dimension::Concurrency => "concurrency",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("axis {0}: allowed values must be non-empty")]
    EmptyAxis(Dimension),
    #[error("axis {0}: values must be strictly ascending positive integers")]
    BadAxisValues(Dimension),
    #[error("device spec file: {0}")]
    Io(#[from] std::io::Error),
    #[error("device spec file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("axis {0}: give either explicit `values` or `min`/`max`/`step`, not both")]
    AmbiguousAxis(Dimension),
    #[error("axis {0}: min/max/step must satisfy min <= max and step > 0")]
    BadRange(Dimension),
    #[error("default preset is invalid: {0}")]
    BadDefaultPreset(String),
}

/// One tunable parameter with its discrete allowed values, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterAxis {
    pub dimension: Dimension,
    values: Vec<u32>,
}

impl ParameterAxis {
    pub fn new(dimension: Dimension, values: Vec<u32>) -> Result<Self, SpecError> {
        if values.is_empty() {
            return Err(SpecError::EmptyAxis(dimension));
        }
        let ascending = values.windows(2).all(|w| w[0] < w[1]);
        if !ascending || values[0] == 0 {
            return Err(SpecError::BadAxisValues(dimension));
        }
        Ok(ParameterAxis { dimension, values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn min(&self) -> u32 {
        self.values[0]
    }

    pub fn max(&self) -> u32 {
        *self.values.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: u32) -> bool {
        self.values.binary_search(&v).is_ok()
    }

    /// Lower median allowed value (lower of the two middles on even length).
    pub fn median(&self) -> u32 {
        self.values[(self.values.len() - 1) / 2]
    }

    /// Nearest allowed value. Exact midpoints resolve to the lower value;
    /// out-of-range input clamps to the nearest end.
    pub fn snap(&self, value: f64) -> u32 {
        if !value.is_finite() || value <= self.min() as f64 {
            return self.min();
        }
        if value >= self.max() as f64 {
            return self.max();
        }
        let mut best = self.values[0];
        let mut best_dist = (value - best as f64).abs();
        for &v in &self.values[1..] {
            let d = (value - v as f64).abs();
            // strict `<` keeps the lower value on an exact midpoint tie
            if d < best_dist {
                best = v;
                best_dist = d;
            }
        }
        best
    }

    /// The allowed value one grid step away from `from` in the given
    /// direction (+1 ascending, -1 descending); None at the boundary.
    pub fn step_from(&self, from: u32, ascending: bool) -> Option<u32> {
        let idx = self.values.iter().position(|&v| v >= from)?;
        if ascending {
            self.values.get(idx + 1).copied()
        } else {
            idx.checked_sub(1).map(|i| self.values[i])
        }
    }
}

/// One point in the 5-dimensional hardware setting space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub cpu_cores: u32,
    pub cpu_freq: u32,
    pub gpu_freq: u32,
    pub mem_freq: u32,
    pub concurrency: u32,
}

impl Configuration {
    pub fn get(&self, dim: Dimension) -> u32 {
        match dim {
            Dimension::CpuCores => self.cpu_cores,
            Dimension::CpuFreq => self.cpu_freq,
            Dimension::GpuFreq => self.gpu_freq,
            Dimension::MemFreq => self.mem_freq,
            Dimension::Concurrency => self.concurrency,
        }
    }

    pub fn set(&mut self, dim: Dimension, value: u32) {
        match dim {
            Dimension::CpuCores => self.cpu_cores = value,
            Dimension::CpuFreq => self.cpu_freq = value,
            Dimension::GpuFreq => self.gpu_freq = value,
            Dimension::MemFreq => self.mem_freq = value,
            Dimension::Concurrency => self.concurrency = value,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(cores={}, cpu={}MHz, gpu={}MHz, mem={}MHz, conc={})",
            self.cpu_cores, self.cpu_freq, self.gpu_freq, self.mem_freq, self.concurrency
        )
    }
}

/// Per-device parameter axes plus an optional default preset.
#[derive(Debug, Clone)]
pub struct DeviceSpec {
    pub device_name: String,
    axes: [ParameterAxis; 5],
    default_preset: Option<Configuration>,
}

#[derive(Debug, Deserialize)]
struct AxisFile {
    values: Option<Vec<u32>>,
    min: Option<u32>,
    max: Option<u32>,
    step: Option<u32>,
}

#[derive(Debug, Deserialize)]
struct DeviceSpecFile {
    device_name: String,
    cpu_cores: AxisFile,
    cpu_freq: AxisFile,
    gpu_freq: AxisFile,
    mem_freq: AxisFile,
    concurrency: AxisFile,
    default_preset: Option<Configuration>,
}

fn axis_from_file(dim: Dimension, f: &AxisFile) -> Result<ParameterAxis, SpecError> {
    match (&f.values, f.min, f.max, f.step) {
        (Some(vals), None, None, None) => ParameterAxis::new(dim, vals.clone()),
        (None, Some(min), Some(max), Some(step)) => {
            if min > max || step == 0 {
                return Err(SpecError::BadRange(dim));
            }
            let values = (min..=max).step_by(step as usize).collect();
            ParameterAxis::new(dim, values)
        }
        _ => Err(SpecError::AmbiguousAxis(dim)),
    }
}

impl DeviceSpec {
    pub fn new(
        device_name: impl Into<String>,
        axes: [ParameterAxis; 5],
        default_preset: Option<Configuration>,
    ) -> Result<Self, SpecError> {
        let spec = DeviceSpec { device_name: device_name.into(), axes, default_preset };
        if let Some(p) = spec.default_preset {
            if let Err(v) = spec.validate(&p) {
                return Err(SpecError::BadDefaultPreset(v.to_string()));
            }
        }
        Ok(spec)
    }

    pub fn axis(&self, dim: Dimension) -> &ParameterAxis {
        &self.axes[dim.index()]
    }

    pub fn default_preset(&self) -> Option<Configuration> {
        self.default_preset
    }

    /// All-maximum configuration (the manufacturer max-power style preset).
    pub fn max_config(&self) -> Configuration {
        self.config_from(|axis| axis.max())
    }

    /// Per-axis lower-median configuration, used as a search bootstrap point.
    pub fn mid_config(&self) -> Configuration {
        self.config_from(|axis| axis.median())
    }

    pub fn min_config(&self) -> Configuration {
        self.config_from(|axis| axis.min())
    }

    fn config_from(&self, f: impl Fn(&ParameterAxis) -> u32) -> Configuration {
        Configuration {
            cpu_cores: f(self.axis(Dimension::CpuCores)),
            cpu_freq: f(self.axis(Dimension::CpuFreq)),
            gpu_freq: f(self.axis(Dimension::GpuFreq)),
            mem_freq: f(self.axis(Dimension::MemFreq)),
            concurrency: f(self.axis(Dimension::Concurrency)),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    /// Cartesian product of all axes in (cores, cpu, gpu, mem, concurrency)
    /// lexicographic order.
    pub fn enumerate_grid(&self) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.grid_size());
        for &cores in self.axis(Dimension::CpuCores).values() {
            for &cpu in self.axis(Dimension::CpuFreq).values() {
                for &gpu in self.axis(Dimension::GpuFreq).values() {
                    for &mem in self.axis(Dimension::MemFreq).values() {
                        for &conc in self.axis(Dimension::Concurrency).values() {
                            out.push(Configuration {
                                cpu_cores: cores,
                                cpu_freq: cpu,
                                gpu_freq: gpu,
                                mem_freq: mem,
                                concurrency: conc,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self, config: &Configuration) -> Result<(), Violation> {
        let bad: Vec<Dimension> = Dimension::ALL
            .into_iter()
            .filter(|&d| !self.axis(d).contains(config.get(d)))
            .collect();
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Violation { fields: bad })
        }
    }

    /// Snap every field to its nearest allowed value.
    pub fn snap_config(&self, raw: [f64; 5]) -> Configuration {
        let mut c = self.min_config();
        for dim in Dimension::ALL {
            c.set(dim, self.axis(dim).snap(raw[dim.index()]));
        }
        c
    }

    pub fn load(path: &Path) -> Result<Self, SpecError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, SpecError> {
        let f: DeviceSpecFile = toml::from_str(text)?;
        let axes = [
            axis_from_file(Dimension::CpuCores, &f.cpu_cores)?,
            axis_from_file(Dimension::CpuFreq, &f.cpu_freq)?,
            axis_from_file(Dimension::GpuFreq, &f.gpu_freq)?,
            axis_from_file(Dimension::MemFreq, &f.mem_freq)?,
            axis_from_file(Dimension::Concurrency, &f.concurrency)?,
        ];
        DeviceSpec::new(f.device_name, axes, f.default_preset)
    }

    /// Xavier NX grid: 5 x 8 x 6 x 3 x 3 = 2,160 configurations.
    pub fn xavier_nx() -> Self {
        let axes = [
            ParameterAxis::new(Dimension::CpuCores, (2..=6).collect()).unwrap(),
            ParameterAxis::new(Dimension::CpuFreq, (0..8).map(|i| 1190 + 100 * i).collect())
                .unwrap(),
            ParameterAxis::new(Dimension::GpuFreq, (0..6).map(|i| 510 + 100 * i).collect())
                .unwrap(),
            ParameterAxis::new(Dimension::MemFreq, vec![1500, 1666, 1866]).unwrap(),
            ParameterAxis::new(Dimension::Concurrency, vec![1, 2, 3]).unwrap(),
        ];
        let default_preset = Some(Configuration {
            cpu_cores: 4,
            cpu_freq: 1390,
            gpu_freq: 710,
            mem_freq: 1666,
            concurrency: 1,
        });
        DeviceSpec::new("xavier-nx", axes, default_preset).unwrap()
    }

    /// Orin Nano grid: 5 x 8 x 4 x 2 x 5 = 1,600 configurations.
    pub fn orin_nano() -> Self {
        let axes = [
            ParameterAxis::new(Dimension::CpuCores, (2..=6).collect()).unwrap(),
            ParameterAxis::new(Dimension::CpuFreq, (0..8).map(|i| 806 + 100 * i).collect())
                .unwrap(),
            ParameterAxis::new(Dimension::GpuFreq, (0..4).map(|i| 306 + 100 * i).collect())
                .unwrap(),
            ParameterAxis::new(Dimension::MemFreq, vec![2133, 3199]).unwrap(),
            ParameterAxis::new(Dimension::Concurrency, vec![1, 2, 3, 4, 5]).unwrap(),
        ];
        let default_preset = Some(Configuration {
            cpu_cores: 4,
            cpu_freq: 1106,
            gpu_freq: 406,
            mem_freq: 2133,
            concurrency: 1,
        });
        DeviceSpec::new("orin-nano", axes, default_preset).unwrap()
    }

    /// Resolve `builtin:<name>` or a filesystem path.
    pub fn resolve(reference: &str) -> Result<Self, SpecError> {
        match reference {
            "builtin:xavier-nx" | "xavier-nx" => Ok(Self::xavier_nx()),
            "builtin:orin-nano" | "orin-nano" => Ok(Self::orin_nano()),
            path => Self::load(Path::new(path)),
        }
    }
}

/// Named out-of-range fields from a failed validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub fields: Vec<Dimension>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.fields.iter().map(|d| d.name()).collect();
        write!(f, "out-of-range fields: {}", names.join(", "))
    }
}

impl std::error::Error for Violation {}

/// Configurations proven infeasible during a run. Grows monotonically.
#[derive(Debug, Clone, Default)]
pub struct ProhibitedSet {
    entries: BTreeSet<Configuration>,
}

impl ProhibitedSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, config: Configuration) {
        self.entries.insert(config);
    }

    pub fn contains(&self, config: &Configuration) -> bool {
        self.entries.contains(config)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Configuration> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_grid_cardinalities() {
        assert_eq!(DeviceSpec::xavier_nx().enumerate_grid().len(), 2160);
        assert_eq!(DeviceSpec::orin_nano().enumerate_grid().len(), 1600);
    }

    #[test]
    fn singleton_axes_give_one_config() {
        let axes = [
            ParameterAxis::new(Dimension::CpuCores, vec![2]).unwrap(),
            ParameterAxis::new(Dimension::CpuFreq, vec![1000]).unwrap(),
            ParameterAxis::new(Dimension::GpuFreq, vec![500]).unwrap(),
            ParameterAxis::new(Dimension::MemFreq, vec![1500]).unwrap(),
            ParameterAxis::new(Dimension::Concurrency, vec![1]).unwrap(),
        ];
        let spec = DeviceSpec::new("tiny", axes, None).unwrap();
        assert_eq!(spec.enumerate_grid().len(), 1);
    }

    #[test]
    fn snap_nearest_and_clamp() {
        let spec = DeviceSpec::xavier_nx();
        let cpu = spec.axis(Dimension::CpuFreq);
        assert_eq!(cpu.snap(1494.0), 1490);
        assert_eq!(spec.axis(Dimension::Concurrency).snap(-50.0), 1);
        // midpoint between 1390 and 1490 resolves to the lower value
        assert_eq!(cpu.snap(1440.0), 1390);
        assert_eq!(cpu.snap(1445.0), 1490);
    }

    #[test]
    fn snap_idempotent_and_in_range() {
        let spec = DeviceSpec::orin_nano();
        for dim in Dimension::ALL {
            let axis = spec.axis(dim);
            for v in [-1e9, 0.0, 3.7, 805.9, 1000.0, 1e9] {
                let s = axis.snap(v);
                assert!(axis.contains(s));
                assert_eq!(axis.snap(s as f64), s);
            }
        }
    }

    #[test]
    fn validate_names_offending_fields() {
        let spec = DeviceSpec::xavier_nx();
        let ok = Configuration {
            cpu_cores: 2,
            cpu_freq: 1190,
            gpu_freq: 510,
            mem_freq: 1500,
            concurrency: 1,
        };
        assert!(spec.validate(&ok).is_ok());

        let mut bad = ok;
        bad.gpu_freq = 9999;
        let v = spec.validate(&bad).unwrap_err();
        assert_eq!(v.fields, vec![Dimension::GpuFreq]);
    }

    #[test]
    fn every_grid_config_validates() {
        let spec = DeviceSpec::orin_nano();
        assert!(spec.enumerate_grid().iter().all(|c| spec.validate(c).is_ok()));
    }

    #[test]
    fn prohibited_set_is_idempotent() {
        let mut ps = ProhibitedSet::new();
        let c = DeviceSpec::xavier_nx().min_config();
        assert!(!ps.contains(&c));
        ps.add(c);
        ps.add(c);
        assert!(ps.contains(&c));
        assert_eq!(ps.len(), 1);
    }

    #[test]
    fn spec_file_round_trip() {
        let text = r#"
device_name = "custom"
cpu_cores = { values = [2, 4, 6] }
cpu_freq = { min = 1000, max = 1400, step = 200 }
gpu_freq = { values = [500, 600] }
mem_freq = { values = [1500] }
concurrency = { min = 1, max = 2, step = 1 }
"#;
        let spec = DeviceSpec::from_toml(text).unwrap();
        assert_eq!(spec.device_name, "custom");
        assert_eq!(spec.axis(Dimension::CpuFreq).values(), &[1000, 1200, 1400]);
        assert_eq!(spec.grid_size(), 3 * 3 * 2 * 1 * 2);
    }

    #[test]
    fn spec_file_rejects_ambiguous_axis() {
        let text = r#"
device_name = "bad"
cpu_cores = { values = [2], min = 2, max = 6, step = 1 }
cpu_freq = { values = [1000] }
gpu_freq = { values = [500] }
mem_freq = { values = [1500] }
concurrency = { values = [1] }
"#;
        assert!(matches!(DeviceSpec::from_toml(text), Err(SpecError::AmbiguousAxis(_))));
    }

    #[test]
    fn step_from_walks_the_grid() {
        let spec = DeviceSpec::xavier_nx();
        let cpu = spec.axis(Dimension::CpuFreq);
        assert_eq!(cpu.step_from(1190, true), Some(1290));
        assert_eq!(cpu.step_from(1190, false), None);
        assert_eq!(cpu.step_from(1890, true), None);
        assert_eq!(cpu.step_from(1890, false), Some(1790));
    }
}
