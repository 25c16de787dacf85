//! Percentile bootstrap over per-dataset paired differences.

use rand::Rng;

use crate::rng::cell_rng;

use super::StatsError;

/// Percentile confidence interval of the mean of `per_dataset_deltas` under
/// resampling with replacement. Deterministic in `seed`.
pub fn paired_bootstrap_ci(
    per_dataset_deltas: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), StatsError> {
    let n = per_dataset_deltas.len();
    if n < 2 {
        return Err(StatsError::TooFew { needed: 2, got: n });
    }
    if !(0.0 < level && level < 1.0) {
        return Err(StatsError::InvalidParam(format!(
            "confidence level must lie in (0,1), got {level}"
        )));
    }
    let mut rng = cell_rng("paired_bootstrap", seed, "resample");
    let mut means = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += per_dataset_deltas[rng.random_range(0..n)];
        }
        means.push(sum / n as f64);
    }
    means.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok((quantile(&means, alpha), quantile(&means, 1.0 - alpha)))
}

/// Linear-interpolation quantile on a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}
