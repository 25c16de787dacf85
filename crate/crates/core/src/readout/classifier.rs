//! Table-level classifier interface shared by the invariance harness and the
//! attack grid.
//!
//! Representation-level rules (`knn_classify`, `prototype_classify`, ...)
//! operate on raw matrices; these wrappers bind them to a `(Table, Split)`
//! pair, standardizing features on the context rows only.

use crate::data::{Matrix, Split, Standardizer, Table};

use super::distance::DistanceKernel;
use super::{
    knn_classify, linear_probe, majority_baseline, ova_wrap, prototype_classify, ridge_fit,
    soft_knn, AttentionTensor, Metric, ProbabilityMatrix, ReadoutError, RidgeTargets,
};

/// A deterministic rule mapping a labeled context and query features to
/// per-query class distributions.
pub trait TableClassifier {
    fn name(&self) -> String;
    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError>;
}

/// Fraction of queries whose argmax matches the true label.
pub fn accuracy(probs: &ProbabilityMatrix, labels: &[usize]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let correct = labels
        .iter()
        .enumerate()
        .filter(|(i, &y)| probs.argmax(*i) == y)
        .count();
    correct as f64 / labels.len() as f64
}

/// Context indices sorted into a canonical order — lexicographic on the
/// feature row, then the label. Every classifier reads its context through
/// this order, so shuffling context rows cannot change any downstream
/// floating-point result (identical inputs, bit for bit); only exact
/// duplicate rows, covered by the documented tie rules, escape the argument.
fn canonical_context_order(table: &Table, split: &Split) -> Vec<usize> {
    let labels = table.labels();
    let mut order = split.context_idx.clone();
    order.sort_by(|&a, &b| {
        let ra = table.values().row(a);
        let rb = table.values().row(b);
        for (x, y) in ra.iter().zip(rb) {
            match x.total_cmp(y) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        match labels {
            Some(l) => l[a].cmp(&l[b]),
            None => std::cmp::Ordering::Equal,
        }
    });
    order
}

fn context_query_views(
    table: &Table,
    split: &Split,
) -> Result<(Matrix, Vec<usize>, Matrix), ReadoutError> {
    let labels = table.labels().ok_or(ReadoutError::NeedsLabels)?;
    let order = canonical_context_order(table, split);
    let ctx = table.values().select_rows(&order);
    let qry = table.values().select_rows(&split.query_idx);
    let standardizer = Standardizer::fit(&ctx);
    let ctx_labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
    Ok((
        standardizer.transform(&ctx),
        ctx_labels,
        standardizer.transform(&qry),
    ))
}

/// Hard kNN on standardized features.
#[derive(Debug, Clone)]
pub struct KnnClassifier {
    pub k: usize,
    pub metric: Metric,
}

impl TableClassifier for KnnClassifier {
    fn name(&self) -> String {
        match self.metric {
            Metric::L2 => format!("knn{}", self.k),
            m => format!("knn{}_{}", self.k, m.name()),
        }
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let (ctx, labels, qry) = context_query_views(table, split)?;
        knn_classify(&ctx, &labels, &qry, self.k.min(ctx.n_rows()), self.metric)
    }
}

/// Nearest class prototype on standardized features.
#[derive(Debug, Clone)]
pub struct PrototypeClassifier {
    pub metric: Metric,
}

impl TableClassifier for PrototypeClassifier {
    fn name(&self) -> String {
        match self.metric {
            Metric::L2 => "prototype".into(),
            m => format!("prototype_{}", m.name()),
        }
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let (ctx, labels, qry) = context_query_views(table, split)?;
        prototype_classify(&ctx, &labels, &qry, self.metric)
    }
}

/// Attention-weighted vote with a single distance-derived head: weights
/// `softmax(-d_l2 / T)` over context rows.
#[derive(Debug, Clone)]
pub struct SoftVoteClassifier {
    pub temperature: f64,
}

impl TableClassifier for SoftVoteClassifier {
    fn name(&self) -> String {
        "vote".into()
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let (ctx, labels, qry) = context_query_views(table, split)?;
        let kernel = DistanceKernel::new(Metric::L2, &ctx)?;
        let mut head = Matrix::zeros(qry.n_rows(), ctx.n_rows());
        for (i, z) in qry.rows_iter().enumerate() {
            let dists: Result<Vec<f64>, _> =
                ctx.rows_iter().map(|row| kernel.distance(z, row)).collect();
            let dists = dists?;
            let min = dists.iter().copied().fold(f64::INFINITY, f64::min);
            let mut sum = 0.0;
            for (c, &d) in dists.iter().enumerate() {
                let w = (-(d - min) / self.temperature).exp();
                head.set(i, c, w);
                sum += w;
            }
            for c in 0..ctx.n_rows() {
                head.set(i, c, head.get(i, c) / sum);
            }
        }
        let attn = AttentionTensor::new(vec![head])?;
        super::attention_vote(&attn, &labels)
    }
}

/// Soft kNN with the temperature fitted per split seed.
#[derive(Debug, Clone)]
pub struct SoftKnnClassifier {
    pub metric: Metric,
    pub grid: Vec<f64>,
}

impl Default for SoftKnnClassifier {
    fn default() -> Self {
        Self {
            metric: Metric::L2,
            grid: vec![0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0],
        }
    }
}

impl TableClassifier for SoftKnnClassifier {
    fn name(&self) -> String {
        "soft_knn".into()
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let (ctx, labels, qry) = context_query_views(table, split)?;
        Ok(soft_knn(&ctx, &labels, &qry, self.metric, &self.grid, split.seed)?.probs)
    }
}

/// Context-frequency constant baseline.
#[derive(Debug, Clone, Default)]
pub struct MajorityClassifier;

impl TableClassifier for MajorityClassifier {
    fn name(&self) -> String {
        "majority".into()
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let labels = table.labels().ok_or(ReadoutError::NeedsLabels)?;
        let ctx_labels: Vec<usize> = split.context_idx.iter().map(|&i| labels[i]).collect();
        majority_baseline(&ctx_labels, split.query_idx.len())
    }
}

/// One-hot ridge classifier refit on the (possibly poisoned) context.
#[derive(Debug, Clone)]
pub struct RidgeClassifier {
    pub lambda: f64,
}

impl TableClassifier for RidgeClassifier {
    fn name(&self) -> String {
        "ridge".into()
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let labels = table.labels().ok_or(ReadoutError::NeedsLabels)?;
        let order = canonical_context_order(table, split);
        let ctx = table.values().select_rows(&order);
        let ctx_labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        let qry = table.values().select_rows(&split.query_idx);
        let model = ridge_fit(&ctx, RidgeTargets::Labels(&ctx_labels), self.lambda)?;
        model.soft_probs(&qry)
    }
}

/// Multiclass logistic head trained on the context rows.
#[derive(Debug, Clone)]
pub struct ProbeClassifier {
    pub regularization: f64,
}

impl TableClassifier for ProbeClassifier {
    fn name(&self) -> String {
        "probe".into()
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        let labels = table.labels().ok_or(ReadoutError::NeedsLabels)?;
        let order = canonical_context_order(table, split);
        let ctx = table.values().select_rows(&order);
        let ctx_labels: Vec<usize> = order.iter().map(|&i| labels[i]).collect();
        let qry = table.values().select_rows(&split.query_idx);
        let fit = linear_probe(&ctx, &ctx_labels, None, self.regularization, split.seed)?;
        fit.probabilities(&qry)
    }
}

/// One-vs-All wrapper around any base classifier.
pub struct OvaClassifier {
    pub base: Box<dyn TableClassifier>,
}

impl TableClassifier for OvaClassifier {
    fn name(&self) -> String {
        format!("ova:{}", self.base.name())
    }

    fn classify(&self, table: &Table, split: &Split) -> Result<ProbabilityMatrix, ReadoutError> {
        ova_wrap(self.base.as_ref(), table, split)
    }
}

/// Resolve a readout by its CLI name: `knn<k>[_cosine|_mahalanobis]`,
/// `prototype[_cosine]`, `vote`, `soft_knn`, `ridge`, `probe`, `majority`,
/// or `ova:<name>`.
pub fn readout_by_name(name: &str) -> Result<Box<dyn TableClassifier>, ReadoutError> {
    if let Some(inner) = name.strip_prefix("ova:") {
        return Ok(Box::new(OvaClassifier {
            base: readout_by_name(inner)?,
        }));
    }
    if let Some(rest) = name.strip_prefix("knn") {
        let (k_str, metric) = match rest.split_once('_') {
            Some((k, "cosine")) => (k, Metric::Cosine),
            Some((k, "mahalanobis")) => (k, Metric::Mahalanobis),
            Some(_) => return Err(ReadoutError::UnknownReadout(name.to_owned())),
            None => (rest, Metric::L2),
        };
        let k: usize = k_str
            .parse()
            .map_err(|_| ReadoutError::UnknownReadout(name.to_owned()))?;
        if k == 0 {
            return Err(ReadoutError::UnknownReadout(name.to_owned()));
        }
        return Ok(Box::new(KnnClassifier { k, metric }));
    }
    match name {
        "prototype" => Ok(Box::new(PrototypeClassifier { metric: Metric::L2 })),
        "prototype_cosine" => Ok(Box::new(PrototypeClassifier {
            metric: Metric::Cosine,
        })),
        "vote" => Ok(Box::new(SoftVoteClassifier { temperature: 1.0 })),
        "soft_knn" => Ok(Box::new(SoftKnnClassifier::default())),
        "ridge" => Ok(Box::new(RidgeClassifier { lambda: 1.0 })),
        "probe" => Ok(Box::new(ProbeClassifier {
            regularization: 1.0,
        })),
        "majority" => Ok(Box::new(MajorityClassifier)),
        other => Err(ReadoutError::UnknownReadout(other.to_owned())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, stratified_split, SyntheticSpec};

    #[test]
    fn names_round_trip() {
        for name in [
            "knn5",
            "knn3_cosine",
            "prototype",
            "vote",
            "soft_knn",
            "ridge",
            "probe",
            "majority",
            "ova:prototype",
        ] {
            let c = readout_by_name(name).unwrap();
            assert_eq!(c.name(), name);
        }
        assert!(readout_by_name("knn0").is_err());
        assert!(readout_by_name("mystery").is_err());
    }

    #[test]
    fn classifiers_run_on_a_synthetic_table() {
        let t = generate_synthetic(&SyntheticSpec::new("xor_2d").with("n", 60.0), 0).unwrap();
        let split = stratified_split(&t, 0, 0.8).unwrap();
        let labels = t.labels().unwrap();
        let qy: Vec<usize> = split.query_idx.iter().map(|&i| labels[i]).collect();
        for name in ["knn5", "prototype", "vote", "ridge", "majority", "probe"] {
            let c = readout_by_name(name).unwrap();
            let p = c.classify(&t, &split).unwrap();
            assert_eq!(p.n_queries(), qy.len(), "{name}");
            let acc = accuracy(&p, &qy);
            assert!((0.0..=1.0).contains(&acc));
        }
    }
}
