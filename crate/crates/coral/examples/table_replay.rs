//! Replay a recorded profile table as a measurement backend: profile
//! once, tune many times without touching the (simulated) hardware again.

use coral::device::profile_grid;
use coral::optimizer::{self, ScenarioConstraints};
use coral::{
    Backend, DeviceSpec, MeasurementProtocol, RunOptions, SyntheticBackend,
    SyntheticSurfaceParams, TableBackend,
};

fn main() {
    // Record the grid once.
    let spec = DeviceSpec::xavier_nx();
    let live = SyntheticBackend::new(spec.clone(), SyntheticSurfaceParams::default()).unwrap();
    let records = profile_grid(&live, &MeasurementProtocol::default());
    let path = std::env::temp_dir().join("coral_replay_profile.csv");
    TableBackend::from_records("xavier-nx", records).unwrap().dump(&path).unwrap();
    println!("recorded {} -> {}", live.spec().device_name, path.display());

    // Reload and tune against the replay. Attaching the original spec
    // keeps the exact axis grid (a table alone only reveals the values it
    // happens to contain).
    let table = TableBackend::load(&path).unwrap().with_spec(spec);
    let constraints = ScenarioConstraints::new(30.0, 6500.0);

    for seed in 0..3 {
        let result = optimizer::run(
            &table,
            &constraints,
            &RunOptions { seed, ..Default::default() },
        )
        .unwrap();
        println!(
            "seed {seed}: best {} feasible={} efficiency={:.6}",
            result.best_config, result.feasible, result.efficiency
        );
    }

    // The table never fabricates: asking for an off-grid configuration is
    // an error rather than an interpolation.
    let off_grid = coral::Configuration {
        cpu_cores: 4,
        cpu_freq: 1234,
        gpu_freq: 710,
        mem_freq: 1666,
        concurrency: 1,
    };
    let err = table.measure(&off_grid, &MeasurementProtocol::default()).unwrap_err();
    println!("off-grid query: {err}");
}
