//! Compute the power-throughput Pareto frontier of a fully profiled grid.

use coral::device::profile_grid;
use coral::harness::pareto_flags;
use coral::{DeviceSpec, MeasurementProtocol, SyntheticBackend, SyntheticSurfaceParams};

fn main() {
    let backend =
        SyntheticBackend::new(DeviceSpec::xavier_nx(), SyntheticSurfaceParams::default()).unwrap();
    let records = profile_grid(&backend, &MeasurementProtocol::default());

    let valid: Vec<_> = records.iter().filter(|r| r.valid).collect();
    let points: Vec<(f64, f64)> =
        valid.iter().map(|r| (r.power.unwrap(), r.throughput.unwrap())).collect();
    let flags = pareto_flags(&points);

    let mut frontier: Vec<_> = valid
        .iter()
        .zip(&flags)
        .filter(|(_, &on)| on)
        .map(|(r, _)| r)
        .collect();
    frontier.sort_by(|a, b| a.power.partial_cmp(&b.power).unwrap());

    println!(
        "{} of {} configurations are Pareto-optimal:",
        frontier.len(),
        points.len()
    );
    println!("    mW     fps  configuration");
    for r in frontier {
        println!(
            "{:6.0}  {:6.2}  {}",
            r.power.unwrap(),
            r.throughput.unwrap(),
            r.config
        );
    }
}
