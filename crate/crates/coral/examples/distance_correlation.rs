//! Distance correlation on raw vectors and per-dimension tuning weights
//! derived from a window of measurements.

use coral::config_space::Dimension;
use coral::dcov::{correlation_weights, distance_correlation};
use coral::optimizer::SampleWindow;
use coral::{Configuration, MeasurementSample};

fn main() {
    // Throughput, power, and CPU-frequency readings from five consecutive
    // measurements: how strongly does each metric track the frequency?
    let tau = [15.2, 16.1, 15.8, 14.9, 15.5];
    let power = [9800.0, 10100.0, 10050.0, 9500.0, 9750.0];
    let cpu_freq = [1200.0, 1400.0, 1400.0, 1000.0, 1200.0];

    let alpha = distance_correlation(&tau, &cpu_freq).unwrap();
    let beta = distance_correlation(&power, &cpu_freq).unwrap();
    println!("dCor(throughput, cpu_freq) = {alpha:.4}");
    println!("dCor(power,      cpu_freq) = {beta:.4}");

    // The same statistic unlike Pearson's r catches nonlinear coupling:
    let x = [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
    let x_squared: Vec<f64> = x.iter().map(|v| v * v).collect();
    println!("dCor(x, x^2)             = {:.4}", distance_correlation(&x, &x_squared).unwrap());

    // In the tuner the statistic is computed per configuration dimension
    // over a sliding window of samples.
    let mut window = SampleWindow::new(5);
    for (i, (&t, &p)) in tau.iter().zip(&power).enumerate() {
        let config = Configuration {
            cpu_cores: 4,
            cpu_freq: cpu_freq[i] as u32,
            gpu_freq: 710 + 100 * (i as u32 % 3),
            mem_freq: 1666,
            concurrency: 1 + i as u32 % 2,
        };
        window.push(MeasurementSample { config, throughput: t, power: p, sample_count: 3 });
    }
    let weights = correlation_weights(&window).unwrap();
    println!("\nper-dimension weights (alpha = vs throughput, beta = vs power):");
    for dim in Dimension::ALL {
        let i = dim.index();
        println!(
            "  {:12} alpha={:.3} beta={:.3} gamma={:.3}",
            dim.name(),
            weights.alpha[i],
            weights.beta[i],
            weights.gamma()[i]
        );
    }
}
