//! Run the online tuner against a dual-constraint scenario and walk
//! through its per-iteration trace.

use coral::optimizer::{self, MeasurementOutcome, ScenarioConstraints};
use coral::{DeviceSpec, RunOptions, SyntheticBackend, SyntheticSurfaceParams};

fn main() {
    // 30 fps within 6.5 W on the Xavier NX grid: under 1% of the 2,160
    // configurations satisfy both constraints on the default surface.
    let backend =
        SyntheticBackend::new(DeviceSpec::xavier_nx(), SyntheticSurfaceParams::default()).unwrap();
    let constraints = ScenarioConstraints::new(30.0, 6500.0);
    let options = RunOptions { seed: 42, ..Default::default() };

    let result = optimizer::run(&backend, &constraints, &options).unwrap();

    println!("iter  configuration                    fps     mW    reward    flags");
    for entry in &result.trace {
        let metrics = match &entry.outcome {
            MeasurementOutcome::Sample(s) => format!("{:6.2} {:6.0}", s.throughput, s.power),
            MeasurementOutcome::Failure(e) => format!("failed: {e}"),
        };
        let mut flags = Vec::new();
        if entry.aside {
            flags.push("aside");
        }
        if entry.heuristic_applied {
            flags.push("heuristic");
        }
        if entry.collision_steps > 0 {
            flags.push("collision");
        }
        println!(
            "{:4}  ({},{},{},{},{})  {metrics}  {:+.5}  {}",
            entry.iteration,
            entry.config.cpu_cores,
            entry.config.cpu_freq,
            entry.config.gpu_freq,
            entry.config.mem_freq,
            entry.config.concurrency,
            entry.reward,
            flags.join("+")
        );
    }

    println!(
        "\nbest: {} feasible={} efficiency={:.6} fps/mW ({} iterations)",
        result.best_config, result.feasible, result.efficiency, result.iterations_used
    );
}
