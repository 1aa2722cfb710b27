//! Distance covariance and distance correlation over paired scalar samples.
//!
//! Distance correlation detects arbitrary (including non-linear) dependence
//! between two variables: pairwise absolute-difference matrices are
//! double-centered and the normalized cross-product yields a statistic in
//! [0, 1], where 0 means independence. The tuner uses it to weight each
//! hardware parameter by how strongly it drives throughput and power.

use thiserror::Error;

use crate::config_space::Dimension;
use crate::optimizer::SampleWindow;

/// Negative dCov^2 values above this magnitude are real errors, below it
/// they are double-centering round-off and get clamped to zero.
const NEG_CLAMP_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DcovError {
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("empty sample window")]
    EmptyWindow,
}

fn check_vector(v: &[f64]) -> Result<(), DcovError> {
    if v.len() < 2 {
        return Err(DcovError::TooFewSamples(v.len()));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(DcovError::NonFinite(i));
    }
    Ok(())
}

/// Pairwise absolute-difference matrix: out[i][j] = |v[i] - v[j]|.
pub fn pairwise_distance_matrix(v: &[f64]) -> Result<Vec<Vec<f64>>, DcovError> {
    check_vector(v)?;
    let n = v.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = (v[i] - v[j]).abs();
        }
    }
    Ok(out)
}

/// A double-centered distance matrix. Row sums and column sums are zero.
#[derive(Debug, Clone)]
pub struct CenteredDistanceMatrix {
    entries: Vec<Vec<f64>>,
}

impl CenteredDistanceMatrix {
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }
}

/// Subtract row mean and column mean, add back the grand mean.
pub fn double_center(m: &[Vec<f64>]) -> Result<CenteredDistanceMatrix, DcovError> {
    let n = m.len();
    if n < 2 {
        return Err(DcovError::TooFewSamples(n));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            return Err(DcovError::NotSquare { rows: n, row: i, len: row.len() });
        }
    }
    let nf = n as f64;
    let row_means: Vec<f64> = m.iter().map(|r| r.iter().sum::<f64>() / nf).collect();
    let col_means: Vec<f64> = (0..n)
        .map(|j| m.iter().map(|r| r[j]).sum::<f64>() / nf)
        .collect();
    let grand_mean = row_means.iter().sum::<f64>() / nf;

    let mut entries = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            entries[i][j] = m[i][j] - row_means[i] - col_means[j] + grand_mean;
        }
    }
    Ok(CenteredDistanceMatrix { entries })
}

/// Squared distance covariance: (1/n^2) sum_ij A_ij B_ij.
pub fn distance_covariance_sq(x: &[f64], y: &[f64]) -> Result<f64, DcovError> {
    check_vector(x)?;
    check_vector(y)?;
    if x.len() != y.len() {
        return Err(DcovError::LengthMismatch(x.len(), y.len()));
    }
    let a = double_center(&pairwise_distance_matrix(x)?)?;
    let b = double_center(&pairwise_distance_matrix(y)?)?;
    let n = x.len() as f64;
    let mut sum = 0.0;
    for (ra, rb) in a.entries.iter().zip(&b.entries) {
        for (&ea, &eb) in ra.iter().zip(rb) {
            sum += ea * eb;
        }
    }
    let v = sum / (n * n);
    if v < 0.0 && v > -NEG_CLAMP_EPS {
        Ok(0.0)
    } else {
        Ok(v)
    }
}

/// Distance correlation, clamped into [0, 1].
///
/// Returns 0 when either marginal distance covariance is zero (constant
/// vector); the normalization is undefined there and a constant setting
/// carries no dependency information.
pub fn distance_correlation(x: &[f64], y: &[f64]) -> Result<f64, DcovError> {
    let vxy = distance_covariance_sq(x, y)?;
    let vxx = distance_covariance_sq(x, x)?;
    let vyy = distance_covariance_sq(y, y)?;
    if vxx <= 0.0 || vyy <= 0.0 {
        return Ok(0.0);
    }
    let r = (vxy.max(0.0)).sqrt() / (vxx * vyy).sqrt().sqrt();
    Ok(r.clamp(0.0, 1.0))
}

/// Per-dimension correlation weights over a sample window.
///
/// `alpha[i]` correlates throughput with dimension `i`, `beta[i]` correlates
/// power. A dimension that never changed across the window (or a window too
/// short to correlate) gets weight 1.0, so the search treats unexplored
/// dimensions as maximally influential instead of freezing them.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CorrelationWeights {
    pub alpha: [f64; 5],
    pub beta: [f64; 5],
}

impl CorrelationWeights {
    /// Dominant weight per dimension: max(alpha, beta).
    pub fn gamma(&self) -> [f64; 5] {
        let mut g = [0.0; 5];
        for i in 0..5 {
            g[i] = self.alpha[i].max(self.beta[i]);
        }
        g
    }

    pub fn uniform(v: f64) -> Self {
        CorrelationWeights { alpha: [v; 5], beta: [v; 5] }
    }
}

pub fn correlation_weights(window: &SampleWindow) -> Result<CorrelationWeights, DcovError> {
    if window.is_empty() {
        return Err(DcovError::EmptyWindow);
    }
    let throughputs: Vec<f64> = window.iter().map(|s| s.throughput).collect();
    let powers: Vec<f64> = window.iter().map(|s| s.power).collect();

    let mut alpha = [1.0; 5];
    let mut beta = [1.0; 5];
    if window.len() >= 2 {
        for dim in Dimension::ALL {
            let settings: Vec<f64> = window
                .iter()
                .map(|s| s.config.get(dim) as f64)
                .collect();
            let constant = settings.windows(2).all(|w| w[0] == w[1]);
            if constant {
                continue; // keep the 1.0 fallback
            }
            alpha[dim.index()] = distance_correlation(&throughputs, &settings)?;
            beta[dim.index()] = distance_correlation(&powers, &settings)?;
        }
    }
    Ok(CorrelationWeights { alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Worked-example vectors: five window observations of throughput (fps),
    // power (mW) and CPU frequency (MHz).
    pub const TAU: [f64; 5] = [15.2, 16.1, 15.8, 14.9, 15.5];
    pub const POWER: [f64; 5] = [9800.0, 10100.0, 10050.0, 9500.0, 9750.0];
    pub const S_CPU: [f64; 5] = [1200.0, 1400.0, 1400.0, 1000.0, 1200.0];

    #[test]
    fn pairwise_two_points() {
        let m = pairwise_distance_matrix(&[1.0, 3.0]).unwrap();
        assert_eq!(m, vec![vec![0.0, 2.0], vec![2.0, 0.0]]);
    }

    #[test]
    fn pairwise_constant_vector_is_zero() {
        let m = pairwise_distance_matrix(&[5.0, 5.0, 5.0]).unwrap();
        assert!(m.iter().flatten().all(|&e| e == 0.0));
    }

    #[test]
    fn pairwise_throughput_example_entries() {
        let m = pairwise_distance_matrix(&TAU).unwrap();
        assert_abs_diff_eq!(m[0][1], 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(m[0][3], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn pairwise_rejects_short_and_nonfinite() {
        assert_eq!(pairwise_distance_matrix(&[1.0]), Err(DcovError::TooFewSamples(1)));
        assert_eq!(
            pairwise_distance_matrix(&[1.0, f64::NAN]),
            Err(DcovError::NonFinite(1))
        );
    }

    #[test]
    fn double_center_two_by_two() {
        let c = double_center(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(c.entries(), &[vec![-1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn double_center_zero_preserved() {
        let c = double_center(&vec![vec![0.0; 4]; 4]).unwrap();
        assert!(c.entries().iter().flatten().all(|&e| e == 0.0));
    }

    #[test]
    fn double_center_row_sums_vanish() {
        let m = pairwise_distance_matrix(&TAU).unwrap();
        let c = double_center(&m).unwrap();
        for row in c.entries() {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
        }
        for j in 0..c.n() {
            let col: f64 = c.entries().iter().map(|r| r[j]).sum();
            assert_abs_diff_eq!(col, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn double_center_rejects_non_square() {
        assert!(matches!(
            double_center(&[vec![0.0, 1.0], vec![1.0]]),
            Err(DcovError::NotSquare { .. })
        ));
    }

    #[test]
    fn dcov_constant_vectors() {
        assert_eq!(distance_covariance_sq(&[5.0, 5.0, 5.0], &[5.0, 5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn dcov_two_point_identity() {
        // Hand check: A = B = [[-0.5, 0.5], [0.5, -0.5]], (1/4) * 4 * 0.25 = 0.25.
        let v = distance_covariance_sq(&[1.0, 2.0], &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn dcov_example_positive() {
        let v = distance_covariance_sq(&TAU, &S_CPU).unwrap();
        assert!(v > 0.0);
        assert_abs_diff_eq!(v, 36.48, epsilon = 1e-9);
    }

    #[test]
    fn dcov_length_mismatch() {
        assert_eq!(
            distance_covariance_sq(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(DcovError::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn dcor_worked_example() {
        let a = distance_correlation(&TAU, &S_CPU).unwrap();
        let b = distance_correlation(&POWER, &S_CPU).unwrap();
        assert_abs_diff_eq!(a, 0.94, epsilon = 0.01);
        assert_abs_diff_eq!(b, 0.99, epsilon = 0.01);
    }

    #[test]
    fn dcor_self_correlation() {
        let x = [3.0, 1.0, 4.0, 1.5, 9.2];
        assert_abs_diff_eq!(distance_correlation(&x, &x).unwrap(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn dcor_constant_convention() {
        let x = [1.0, 2.0, 3.0];
        let c = [7.0, 7.0, 7.0];
        assert_eq!(distance_correlation(&x, &c).unwrap(), 0.0);
        assert_eq!(distance_correlation(&c, &x).unwrap(), 0.0);
    }
}
