//! Benchmark the tuner against the exhaustive oracle, budget-matched
//! random search, and the two preset policies on one scenario.

use coral::baselines::{oracle_search, preset_eval, random_search, PresetMode};
use coral::harness::ComparisonReport;
use coral::optimizer::{self, ScenarioConstraints};
use coral::{DeviceSpec, MeasurementProtocol, RunOptions, SyntheticBackend, SyntheticSurfaceParams};

fn main() {
    let backend =
        SyntheticBackend::new(DeviceSpec::xavier_nx(), SyntheticSurfaceParams::default()).unwrap();
    let constraints = ScenarioConstraints::new(30.0, 6500.0);
    let protocol = MeasurementProtocol::default();
    let seed = 42;

    let results = vec![
        optimizer::run(&backend, &constraints, &RunOptions { seed, ..Default::default() })
            .unwrap(),
        oracle_search(&backend, &constraints, &protocol).unwrap(),
        random_search(&backend, &constraints, 10, seed, &protocol).unwrap(),
        preset_eval(&backend, PresetMode::MaxPower, &constraints, &protocol).unwrap(),
        preset_eval(&backend, PresetMode::Default, &constraints, &protocol).unwrap(),
    ];

    let report = ComparisonReport::new(
        seed,
        "(in-memory)".to_string(),
        "(in-memory)".to_string(),
        &results,
    );
    print!("{}", report.render_table());
}
