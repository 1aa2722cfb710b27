//! Comparison report: one row per method, scored on the shared reward
//! scale, with percent-of-oracle columns when an oracle row is present.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::config_space::Configuration;
use crate::optimizer::TuningResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub config: Configuration,
    pub throughput_fps: Option<f64>,
    pub power_mw: Option<f64>,
    pub efficiency: f64,
    pub feasible: bool,
    pub reward: f64,
    pub evaluations: usize,
    pub percent_of_oracle_throughput: Option<f64>,
    pub percent_of_oracle_efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub seed: u64,
    pub spec_hash: String,
    pub scenario_hash: String,
    pub rows: Vec<ReportRow>,
}

impl ComparisonReport {
    pub fn new(
        seed: u64,
        spec_hash: String,
        scenario_hash: String,
        results: &[TuningResult],
    ) -> Self {
        let oracle = results.iter().find(|r| r.method == "oracle");
        let oracle_metrics = oracle.and_then(|o| {
            o.best_sample.map(|s| (s.throughput, o.efficiency))
        });
        let rows = results
            .iter()
            .map(|r| {
                let (pct_tau, pct_eff) = match (oracle_metrics, r.best_sample) {
                    (Some((otau, oeff)), Some(s)) => (
                        Some(100.0 * s.throughput / otau),
                        Some(100.0 * r.efficiency / oeff),
                    ),
                    (Some(_), None) => (Some(0.0), Some(0.0)),
                    (None, _) => (None, None),
                };
                ReportRow {
                    method: r.method.clone(),
                    config: r.best_config,
                    throughput_fps: r.best_sample.map(|s| s.throughput),
                    power_mw: r.best_sample.map(|s| s.power),
                    efficiency: r.efficiency,
                    feasible: r.feasible,
                    reward: r.best_reward,
                    evaluations: r.iterations_used,
                    percent_of_oracle_throughput: pct_tau,
                    percent_of_oracle_efficiency: pct_eff,
                }
            })
            .collect();
        ComparisonReport { seed, spec_hash, scenario_hash, rows }
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# seed={}", self.seed).unwrap();
        writeln!(out, "# spec_sha256={}", self.spec_hash).unwrap();
        writeln!(out, "# scenario_sha256={}", self.scenario_hash).unwrap();
        writeln!(
            out,
            "method,feasible,cpu_cores,cpu_freq_mhz,gpu_freq_mhz,mem_freq_mhz,concurrency,\
             throughput_fps,power_mw,efficiency_fps_per_mw,reward,evaluations,\
             percent_of_oracle_throughput,percent_of_oracle_efficiency"
        )
        .unwrap();
        let opt = |v: Option<f64>| v.map(|x| format!("{x}")).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.method,
                u8::from(r.feasible),
                r.config.cpu_cores,
                r.config.cpu_freq,
                r.config.gpu_freq,
                r.config.mem_freq,
                r.config.concurrency,
                opt(r.throughput_fps),
                opt(r.power_mw),
                r.efficiency,
                r.reward,
                r.evaluations,
                opt(r.percent_of_oracle_throughput),
                opt(r.percent_of_oracle_efficiency),
            )
            .unwrap();
        }
        out
    }

    /// Human-readable comparison table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:>4} {:>9} {:>9} {:>10} {:>6} {:>6} {:>7}",
            "method", "ok", "fps", "mW", "fps/mW", "evals", "%tau", "%eff"
        )
        .unwrap();
        let pct = |v: Option<f64>| v.map(|x| format!("{x:.0}")).unwrap_or_else(|| "-".into());
        for r in &self.rows {
            writeln!(
                out,
                "{:<10} {:>4} {:>9} {:>9} {:>10.6} {:>6} {:>6} {:>7}",
                r.method,
                if r.feasible { "yes" } else { "no" },
                r.throughput_fps.map(|t| format!("{t:.1}")).unwrap_or_else(|| "-".into()),
                r.power_mw.map(|p| format!("{p:.0}")).unwrap_or_else(|| "-".into()),
                r.efficiency,
                r.evaluations,
                pct(r.percent_of_oracle_throughput),
                pct(r.percent_of_oracle_efficiency),
            )
            .unwrap();
        }
        out
    }
}
