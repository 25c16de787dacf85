//! Row-appending attacks: noise padding and centroid injection.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{ColumnKind, Matrix, Table};
use crate::rng::cell_rng;

use super::{AttackError, Instance, PoisonedInstance, Provenance};

/// Append `ceil(pad_frac * n)` noisy rows. Numeric features draw an
/// empirical column value plus Gaussian noise at `sigma_mult` column stds;
/// categorical features draw an empirical code unchanged. Padded labels draw
/// uniformly from the context label set unless `labels_empirical`.
pub fn noise_pad(
    instance: &Instance,
    sigma_mult: f64,
    pad_frac: f64,
    labels_empirical: bool,
    seed: u64,
) -> Result<PoisonedInstance, AttackError> {
    if !(0.0 < pad_frac && pad_frac <= 1.0) {
        return Err(AttackError::InvalidParam(format!(
            "pad_frac must lie in (0,1], got {pad_frac}"
        )));
    }
    let ctx = &instance.context;
    let labels = ctx.labels().ok_or(AttackError::NeedsLabels)?;
    let n = ctx.n_rows();
    let d = ctx.n_cols();
    let count = (pad_frac * n as f64).ceil() as usize;
    let mut rng = cell_rng(ctx.name(), seed, "noise_pad");

    // column statistics
    let mut stds = Vec::with_capacity(d);
    for j in 0..d {
        let col = ctx.values().column(j);
        let mean: f64 = col.iter().sum::<f64>() / n as f64;
        let var: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        stds.push(var.sqrt());
    }
    let label_set: Vec<usize> = {
        let mut s = labels.to_vec();
        s.sort_unstable();
        s.dedup();
        s
    };

    let mut values = ctx.values().clone();
    let mut new_labels = labels.to_vec();
    for _ in 0..count {
        let mut row = Vec::with_capacity(d);
        for j in 0..d {
            let base = ctx.values().get(rng.random_range(0..n), j);
            let v = match ctx.column_kinds()[j] {
                ColumnKind::Numeric => {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    base + noise * sigma_mult * stds[j]
                }
                ColumnKind::Categorical => base,
            };
            row.push(v);
        }
        values.push_row(&row);
        let label = if labels_empirical {
            labels[rng.random_range(0..n)]
        } else {
            label_set[rng.random_range(0..label_set.len())]
        };
        new_labels.push(label);
    }

    let context = rebuild(ctx, values, new_labels)?;
    Ok(PoisonedInstance {
        context,
        query: instance.query.clone(),
        provenance: Provenance::AppendedRows { count },
    })
}

/// For each class `c`, inject `max(per_class_min, floor(n / divisor))`
/// copies of that class's centroid labeled with the next class
/// `(c + 1) mod C`.
pub fn centroid_inj(
    instance: &Instance,
    per_class_min: usize,
    per_class_divisor: usize,
    _seed: u64,
) -> Result<PoisonedInstance, AttackError> {
    let ctx = &instance.context;
    let labels = ctx.labels().ok_or(AttackError::NeedsLabels)?;
    let classes = ctx.class_count();
    if classes < 2 {
        return Err(AttackError::SingleClassContext);
    }
    let n = ctx.n_rows();
    let d = ctx.n_cols();
    let per_class = per_class_min.max(n / per_class_divisor.max(1));

    // class centroids
    let mut centroids = Matrix::zeros(classes, d);
    let mut counts = vec![0usize; classes];
    for (i, &y) in labels.iter().enumerate() {
        counts[y] += 1;
        for j in 0..d {
            centroids.set(y, j, centroids.get(y, j) + ctx.values().get(i, j));
        }
    }
    for (c, &k) in counts.iter().enumerate() {
        if k == 0 {
            return Err(AttackError::EmptyClass(c));
        }
        for j in 0..d {
            centroids.set(c, j, centroids.get(c, j) / k as f64);
        }
    }

    let mut values = ctx.values().clone();
    let mut new_labels = labels.to_vec();
    let mut injected = 0;
    for c in 0..classes {
        for _ in 0..per_class {
            values.push_row(centroids.row(c));
            new_labels.push((c + 1) % classes);
            injected += 1;
        }
    }
    let context = rebuild(ctx, values, new_labels)?;
    Ok(PoisonedInstance {
        context,
        query: instance.query.clone(),
        provenance: Provenance::AppendedRows { count: injected },
    })
}

fn rebuild(ctx: &Table, values: Matrix, labels: Vec<usize>) -> Result<Table, AttackError> {
    let mut t = Table::classification(
        ctx.name(),
        values,
        ctx.column_kinds().to_vec(),
        labels,
    )?;
    t.set_name(ctx.name());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, stratified_split, SyntheticSpec};

    fn instance() -> Instance {
        let t = generate_synthetic(&SyntheticSpec::new("xor_2d").with("n", 100.0), 0).unwrap();
        let s = stratified_split(&t, 0, 0.8).unwrap();
        Instance::from_split(&t, &s)
    }

    #[test]
    fn pad_counts_and_originals_untouched() {
        let inst = instance();
        let n = inst.context.n_rows();
        let p = noise_pad(&inst, 4.0, 0.2, false, 0).unwrap();
        assert_eq!(p.context.n_rows(), n + (0.2 * n as f64).ceil() as usize);
        for i in 0..n {
            assert_eq!(p.context.values().row(i), inst.context.values().row(i));
            assert_eq!(p.context.labels().unwrap()[i], inst.context.labels().unwrap()[i]);
        }
        assert_eq!(p.query, inst.query);
    }

    #[test]
    fn constant_column_pads_the_constant() {
        let t = Table::classification(
            "const",
            Matrix::new(6, 2, vec![7.0, 0.0, 7.0, 1.0, 7.0, 2.0, 7.0, 3.0, 7.0, 4.0, 7.0, 5.0])
                .unwrap(),
            vec![ColumnKind::Numeric; 2],
            vec![0, 1, 0, 1, 0, 1],
        )
        .unwrap();
        let inst = Instance {
            context: t.clone(),
            query: t,
        };
        let p = noise_pad(&inst, 4.0, 0.5, false, 1).unwrap();
        for i in 6..p.context.n_rows() {
            assert_eq!(p.context.values().get(i, 0), 7.0);
        }
    }

    #[test]
    fn seed_determinism() {
        let inst = instance();
        let a = noise_pad(&inst, 4.0, 0.2, false, 3).unwrap();
        let b = noise_pad(&inst, 4.0, 0.2, false, 3).unwrap();
        assert_eq!(a, b);
        let c = noise_pad(&inst, 4.0, 0.2, false, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn un_apply_recovers_clean() {
        let inst = instance();
        let p = noise_pad(&inst, 4.0, 0.2, false, 0).unwrap();
        assert_eq!(p.un_apply().unwrap(), inst);
        let p = centroid_inj(&inst, 3, 100, 0).unwrap();
        assert_eq!(p.un_apply().unwrap(), inst);
    }

    #[test]
    fn centroid_counts_follow_the_formula() {
        let inst = instance(); // n = 80 context rows, C = 2
        let p = centroid_inj(&inst, 3, 100, 0).unwrap();
        // max(3, 80/100) = 3 per class, 6 total
        assert_eq!(p.context.n_rows(), inst.context.n_rows() + 6);
    }

    #[test]
    fn injected_rows_sit_at_class_centroids_with_next_label() {
        let inst = instance();
        let n = inst.context.n_rows();
        let labels = inst.context.labels().unwrap();
        let d = inst.context.n_cols();
        let mut centroid0 = vec![0.0; d];
        let k = labels.iter().filter(|&&y| y == 0).count();
        for (i, &y) in labels.iter().enumerate() {
            if y == 0 {
                for j in 0..d {
                    centroid0[j] += inst.context.values().get(i, j) / k as f64;
                }
            }
        }
        let p = centroid_inj(&inst, 3, 100, 0).unwrap();
        // first injected row: class 0 centroid labeled 1
        let row: Vec<f64> = p.context.values().row(n).to_vec();
        for j in 0..d {
            approx::assert_abs_diff_eq!(row[j], centroid0[j], epsilon = 1e-12);
        }
        assert_eq!(p.context.labels().unwrap()[n], 1);
    }

    #[test]
    fn larger_contexts_scale_the_injection() {
        let t = generate_synthetic(&SyntheticSpec::new("xor_2d").with("n", 1250.0), 0).unwrap();
        let s = stratified_split(&t, 0, 0.8).unwrap();
        let inst = Instance::from_split(&t, &s); // 1000 context rows
        let p = centroid_inj(&inst, 3, 100, 0).unwrap();
        assert_eq!(p.context.n_rows(), 1000 + 2 * 10); // max(3, 10) per class
    }
}
