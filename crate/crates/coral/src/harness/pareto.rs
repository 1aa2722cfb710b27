//! Pareto-frontier flags over (power, throughput) scatter points.

/// Flag each point that no other point dominates. A point is dominated
/// when some other point has strictly higher throughput at strictly
/// lower power.
pub fn pareto_flags(points: &[(f64, f64)]) -> Vec<bool> {
    // sort indices by power ascending; among strictly-lower-power points
    // only the maximum throughput matters
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].0.partial_cmp(&points[b].0).unwrap());

    let mut flags = vec![true; points.len()];
    let mut best_tau_below = f64::NEG_INFINITY;
    let mut i = 0;
    while i < order.len() {
        // group of equal power
        let mut j = i;
        while j < order.len() && points[order[j]].0 == points[order[i]].0 {
            j += 1;
        }
        for &idx in &order[i..j] {
            // dominated iff some strictly-lower-power point has strictly
            // higher throughput
            flags[idx] = best_tau_below <= points[idx].1;
        }
        for &idx in &order[i..j] {
            best_tau_below = best_tau_below.max(points[idx].1);
        }
        i = j;
    }
    flags
}

/// Quadratic-time reference used by the test suite.
pub fn pareto_flags_naive(points: &[(f64, f64)]) -> Vec<bool> {
    points
        .iter()
        .map(|&(p, t)| !points.iter().any(|&(p2, t2)| t2 > t && p2 < p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn three_point_example() {
        let pts = [(5.0, 10.0), (6.0, 20.0), (7.0, 15.0)];
        assert_eq!(pareto_flags(&pts), vec![true, true, false]);
    }

    #[test]
    fn single_point_is_pareto() {
        assert_eq!(pareto_flags(&[(5.0, 1.0)]), vec![true]);
    }

    #[test]
    fn equal_points_are_all_pareto() {
        // domination needs strict inequality in both coordinates
        let pts = [(5.0, 10.0), (5.0, 10.0)];
        assert_eq!(pareto_flags(&pts), vec![true, true]);
    }

    #[test]
    fn matches_naive_scan_on_random_clouds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(1..200);
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    (
                        (rng.gen_range(0..50) as f64) * 100.0,
                        (rng.gen_range(0..40) as f64) * 0.5,
                    )
                })
                .collect();
            assert_eq!(pareto_flags(&pts), pareto_flags_naive(&pts));
        }
    }

    #[test]
    fn frontier_is_monotone_in_power() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let pts: Vec<(f64, f64)> = (0..500)
            .map(|_| (rng.gen_range(1000.0..9000.0), rng.gen_range(1.0..40.0)))
            .collect();
        let flags = pareto_flags(&pts);
        let mut frontier: Vec<(f64, f64)> = pts
            .iter()
            .zip(&flags)
            .filter(|(_, &f)| f)
            .map(|(&p, _)| p)
            .collect();
        frontier.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert!(frontier.windows(2).all(|w| w[0].1 <= w[1].1));
    }
}
