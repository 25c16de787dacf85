//! Label-flipping attacks: hub poisoning and boundary poisoning.

use rand::Rng;

use crate::data::Standardizer;
use crate::readout::{distance_l2, linear_probe};
use crate::rng::cell_rng;

use super::{AttackError, Instance, PoisonedInstance, Provenance};

/// Flip the labels of the `ceil(hub_frac * n)` context rows with the
/// smallest mean distance to their `k` nearest other context points, in
/// standardized input space. Binary contexts flip deterministically to the
/// complement; multiclass flips draw uniformly over the other classes.
pub fn hub_poison(
    instance: &Instance,
    hub_frac: f64,
    k: usize,
    seed: u64,
) -> Result<PoisonedInstance, AttackError> {
    if !(0.0 < hub_frac && hub_frac <= 1.0) {
        return Err(AttackError::InvalidParam(format!(
            "hub_frac must lie in (0,1], got {hub_frac}"
        )));
    }
    let ctx = &instance.context;
    let labels = ctx.labels().ok_or(AttackError::NeedsLabels)?;
    let classes = ctx.class_count();
    if classes < 2 {
        return Err(AttackError::SingleClassContext);
    }
    let n = ctx.n_rows();
    let k = k.min(n.saturating_sub(1)).max(1);

    let std = Standardizer::fit(ctx.values()).transform(ctx.values());
    let mut scored: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let mut dists: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| distance_l2(std.row(i), std.row(j)))
                .collect();
            dists.sort_by(f64::total_cmp);
            let mean = dists[..k].iter().sum::<f64>() / k as f64;
            (mean, i)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let flip_count = (hub_frac * n as f64).ceil() as usize;

    let mut rng = cell_rng(ctx.name(), seed, "hub_poison");
    let mut new_labels = labels.to_vec();
    let mut original = Vec::with_capacity(flip_count);
    for &(_, i) in scored.iter().take(flip_count) {
        let old = labels[i];
        let new = if classes == 2 {
            1 - old
        } else {
            // uniform over the other classes
            let r = rng.random_range(0..classes - 1);
            if r >= old {
                r + 1
            } else {
                r
            }
        };
        new_labels[i] = new;
        original.push((i, old));
    }
    Ok(PoisonedInstance {
        context: ctx.with_labels(new_labels)?,
        query: instance.query.clone(),
        provenance: Provenance::RelabeledRows { original },
    })
}

/// Flip context rows the probe places within the margin of the decision
/// boundary.
///
/// A linear probe is fitted on a held-out half of the context (seeded). For
/// each row, take its top-two probe classes `(c1, c2)` and the normalized
/// probability gap `g = (p1 - p2) / (p1 + p2)`. In the two-class restriction
/// `g = tanh(delta/2)` for logit gap `delta`, so the margin — a fraction of
/// the inter-centroid distance in the probe's standardized feature space —
/// maps to the threshold `tanh(margin * w_gap . mu_gap / 2)` with
/// `w_gap = w_c1 - w_c2` and `mu_gap = mu_c1 - mu_c2`. Rows below threshold
/// flip to the runner-up class. A zero margin flips nothing.
pub fn boundary_poison(
    instance: &Instance,
    margin: f64,
    seed: u64,
) -> Result<PoisonedInstance, AttackError> {
    if !(0.0..=1.0).contains(&margin) {
        return Err(AttackError::InvalidParam(format!(
            "margin must lie in [0,1], got {margin}"
        )));
    }
    let ctx = &instance.context;
    let labels = ctx.labels().ok_or(AttackError::NeedsLabels)?;
    let classes = ctx.class_count();
    if classes < 2 {
        return Err(AttackError::SingleClassContext);
    }
    let n = ctx.n_rows();

    // held-out fold for the probe fit
    let mut order: Vec<usize> = (0..n).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut cell_rng(ctx.name(), seed, "boundary_fold"));
    let half = (n / 2).max(2).min(n);
    let fold = &order[..half];
    let fold_reps = ctx.values().select_rows(fold);
    let fold_labels: Vec<usize> = fold.iter().map(|&i| labels[i]).collect();
    let fit = linear_probe(&fold_reps, &fold_labels, Some((&fold_reps, &fold_labels)), 1.0, seed)?;

    let probs = fit.probabilities(ctx.values())?;
    let std_all = fit.standardizer.transform(ctx.values());

    // class centroids in the probe's standardized space
    let d = std_all.n_cols();
    let mut centroids = vec![vec![0.0; d]; classes];
    let mut counts = vec![0usize; classes];
    for i in 0..n {
        counts[labels[i]] += 1;
        for j in 0..d {
            centroids[labels[i]][j] += std_all.get(i, j);
        }
    }
    for (c, &k) in counts.iter().enumerate() {
        if k == 0 {
            return Err(AttackError::EmptyClass(c));
        }
        for v in &mut centroids[c] {
            *v /= k as f64;
        }
    }

    let mut new_labels = labels.to_vec();
    let mut original = Vec::new();
    for i in 0..n {
        let row = probs.row(i);
        let (c1, c2) = top_two(row);
        let gap = (row[c1] - row[c2]) / (row[c1] + row[c2]).max(f64::MIN_POSITIVE);
        // logit swing induced by a margin-sized displacement along the
        // centroid axis (weights exclude the intercept row)
        let mut swing = 0.0;
        for j in 0..d {
            let w_gap = fit.weights.get(j + 1, c1) - fit.weights.get(j + 1, c2);
            swing += w_gap * (centroids[c1][j] - centroids[c2][j]);
        }
        let threshold = (margin * swing.max(0.0) / 2.0).tanh();
        if gap < threshold {
            original.push((i, labels[i]));
            new_labels[i] = c2;
        }
    }
    Ok(PoisonedInstance {
        context: ctx.with_labels(new_labels)?,
        query: instance.query.clone(),
        provenance: Provenance::RelabeledRows { original },
    })
}

fn top_two(row: &[f64]) -> (usize, usize) {
    let mut first = 0;
    for (c, &p) in row.iter().enumerate() {
        if p > row[first] {
            first = c;
        }
    }
    let mut second = usize::MAX;
    for (c, &p) in row.iter().enumerate() {
        if c == first {
            continue;
        }
        if second == usize::MAX || p > row[second] {
            second = c;
        }
    }
    (first, second)
}
