//! Permutation null distributions for arbitrary statistics.

use rand::seq::SliceRandom;

use crate::rng::cell_rng;

use super::StatsError;

/// Result of a permutation test: observed statistic, null moments, the
/// z-score (absent when the null is degenerate), and the one-sided empirical
/// p-value with add-one smoothing (`larger observed = more extreme`).
#[derive(Debug, Clone)]
pub struct PermutationNull {
    pub observed: f64,
    pub z: Option<f64>,
    pub p: f64,
    pub null_mean: f64,
    pub null_std: f64,
    pub degenerate: bool,
}

/// Shuffle `items` `permutations` times, recomputing `statistic` each time.
pub fn permutation_null_z<T: Clone>(
    statistic: impl Fn(&[T]) -> f64,
    items: &[T],
    permutations: usize,
    seed: u64,
) -> Result<PermutationNull, StatsError> {
    if items.len() < 2 {
        return Err(StatsError::TooFew {
            needed: 2,
            got: items.len(),
        });
    }
    if permutations == 0 {
        return Err(StatsError::InvalidParam("permutations must be positive".into()));
    }
    let observed = statistic(items);
    let mut rng = cell_rng("permutation_null", seed, "shuffle");
    let mut shuffled: Vec<T> = items.to_vec();
    let mut null = Vec::with_capacity(permutations);
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        null.push(statistic(&shuffled));
    }
    let mean = null.iter().sum::<f64>() / permutations as f64;
    let var = null.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / permutations as f64;
    let std = var.sqrt();
    let degenerate = std == 0.0;
    let z = if degenerate {
        None
    } else {
        Some((observed - mean) / std)
    };
    let exceed = null.iter().filter(|&&v| v >= observed).count();
    let p = (exceed + 1) as f64 / (permutations + 1) as f64;
    Ok(PermutationNull {
        observed,
        z,
        p,
        null_mean: mean,
        null_std: std,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_invariant_statistic_is_degenerate() {
        let r = permutation_null_z(|xs: &[f64]| xs.iter().sum(), &[1.0, 2.0, 3.0], 100, 0).unwrap();
        assert!(r.degenerate);
        assert!(r.z.is_none());
    }

    #[test]
    fn strong_signal_yields_large_z() {
        // statistic: agreement between position parity and value sign
        let items: Vec<(usize, f64)> = (0..40)
            .map(|i| (i, if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        let stat = |xs: &[(usize, f64)]| {
            xs.iter()
                .enumerate()
                .filter(|(pos, (_, v))| (pos % 2 == 0) == (*v > 0.0))
                .count() as f64
        };
        let r = permutation_null_z(stat, &items, 500, 1).unwrap();
        assert!(r.z.unwrap() > 2.0, "z = {:?}", r.z);
        assert!(r.p < 0.05);
    }

    #[test]
    fn null_input_is_calibrated() {
        // pre-shuffled labels: |z| should usually be small
        let items: Vec<f64> = (0..30).map(|i| ((i * 7919) % 13) as f64).collect();
        let stat = |xs: &[f64]| xs.iter().take(10).sum::<f64>();
        let mut small = 0;
        for seed in 0..10 {
            let r = permutation_null_z(stat, &items, 400, seed).unwrap();
            if r.z.unwrap().abs() < 2.0 {
                small += 1;
            }
        }
        assert!(small >= 9, "only {small}/10 calibrated");
    }

    #[test]
    fn add_one_smoothing_avoids_zero_p() {
        let items: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let stat = |xs: &[f64]| xs[0];
        let r = permutation_null_z(stat, &items, 200, 3).unwrap();
        assert!(r.p > 0.0);
    }
}
