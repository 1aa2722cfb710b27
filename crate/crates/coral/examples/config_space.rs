//! Device specs: built-in grids, TOML-defined grids, snapping, and
//! validation.

use coral::config_space::Dimension;
use coral::{Configuration, DeviceSpec};

fn main() {
    let spec = DeviceSpec::xavier_nx();
    println!("{}: {} configurations", spec.device_name, spec.grid_size());
    for dim in Dimension::ALL {
        let axis = spec.axis(dim);
        println!("  {:12} {} values, {}..{}", dim.name(), axis.len(), axis.min(), axis.max());
    }

    // Continuous proposals snap to the nearest allowed value per axis.
    let snapped = spec.snap_config([3.7, 1402.0, 964.9, 1700.0, 2.5]);
    println!("\nsnap([3.7, 1402, 964.9, 1700, 2.5]) = {snapped}");

    // Validation names the offending field.
    let bad = Configuration {
        cpu_cores: 4,
        cpu_freq: 1234,
        gpu_freq: 710,
        mem_freq: 1666,
        concurrency: 1,
    };
    println!("validate(cpu_freq=1234): {}", spec.validate(&bad).unwrap_err());

    // Specs also load from TOML, with axes given either as explicit value
    // lists or min/max/step ranges.
    let toml = r#"
        device_name = "demo-board"
        cpu_cores = { values = [2, 4] }
        cpu_freq = { min = 1000, max = 1400, step = 200 }
        gpu_freq = { values = [600, 800] }
        mem_freq = { values = [1600] }
        concurrency = { values = [1, 2] }

        [default_preset]
        cpu_cores = 4
        cpu_freq = 1200
        gpu_freq = 600
        mem_freq = 1600
        concurrency = 1
    "#;
    let demo = DeviceSpec::from_toml(toml).unwrap();
    println!("\n{}: {} configurations, first four of the grid:", demo.device_name, demo.grid_size());
    for config in demo.enumerate_grid().iter().take(4) {
        println!("  {config}");
    }
}
