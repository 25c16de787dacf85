//! The faithful-surrogate verdict.

use crate::stats::{cohen_kappa, correlation, CorrelationKind};

use super::{accuracy, ProbabilityMatrix, ReadoutError};

/// Pass thresholds; the defaults are the fixed criteria, and each can be
/// shifted for sensitivity sweeps.
#[derive(Debug, Clone, Copy)]
pub struct VerdictThresholds {
    pub min_pearson: f64,
    pub max_gap_pp: f64,
    pub min_kappa: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        Self {
            min_pearson: 0.85,
            max_gap_pp: 3.0,
            min_kappa: 0.8,
        }
    }
}

/// The three-part faithfulness check of a candidate rule against the model
/// it claims to explain. `pearson_r` is `None` when either flattened
/// probability vector has zero variance (the pass flag is then false and
/// `r_missing` is set).
#[derive(Debug, Clone)]
pub struct SurrogateVerdict {
    pub pearson_r: Option<f64>,
    pub acc_gap_pp: f64,
    pub kappa: f64,
    pub pass_r: bool,
    pub pass_gap: bool,
    pub pass_kappa: bool,
    pub joint_pass: bool,
    pub r_missing: bool,
}

/// Compare rule probabilities against model probabilities: Pearson r over
/// the flattened per-query per-class probabilities, the absolute accuracy
/// gap in percentage points, and Cohen's kappa on argmax agreement.
pub fn surrogate_verdict(
    model_probs: &ProbabilityMatrix,
    rule_probs: &ProbabilityMatrix,
    true_labels: &[usize],
    thresholds: VerdictThresholds,
) -> Result<SurrogateVerdict, ReadoutError> {
    if model_probs.n_queries() != rule_probs.n_queries()
        || model_probs.class_count() != rule_probs.class_count()
    {
        return Err(ReadoutError::Shape(
            "model and rule probability shapes differ".into(),
        ));
    }
    if true_labels.len() != model_probs.n_queries() {
        return Err(ReadoutError::LabelSizeMismatch {
            labels: true_labels.len(),
            context: model_probs.n_queries(),
        });
    }

    let pearson_r = correlation(
        model_probs.flattened(),
        rule_probs.flattened(),
        CorrelationKind::Pearson,
    )
    .ok();
    let r_missing = pearson_r.is_none();

    let acc_model = accuracy(model_probs, true_labels);
    let acc_rule = accuracy(rule_probs, true_labels);
    let acc_gap_pp = (acc_model - acc_rule).abs() * 100.0;

    let kappa = cohen_kappa(&model_probs.argmax_all(), &rule_probs.argmax_all())
        .map_err(|e| ReadoutError::Shape(e.to_string()))?
        .kappa;

    let pass_r = pearson_r.is_some_and(|r| r >= thresholds.min_pearson);
    let pass_gap = acc_gap_pp <= thresholds.max_gap_pp;
    let pass_kappa = kappa >= thresholds.min_kappa;
    Ok(SurrogateVerdict {
        pearson_r,
        acc_gap_pp,
        kappa,
        pass_r,
        pass_gap,
        pass_kappa,
        joint_pass: pass_r && pass_gap && pass_kappa,
        r_missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Matrix;

    fn pm(rows: Vec<Vec<f64>>) -> ProbabilityMatrix {
        ProbabilityMatrix::new(Matrix::from_rows(&rows).unwrap()).unwrap()
    }

    #[test]
    fn identical_probabilities_pass_jointly() {
        let p = pm(vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.6, 0.4]]);
        let v = surrogate_verdict(&p, &p.clone(), &[0, 1, 0], VerdictThresholds::default())
            .unwrap();
        assert_eq!(v.pearson_r, Some(1.0));
        assert_eq!(v.acc_gap_pp, 0.0);
        assert_eq!(v.kappa, 1.0);
        assert!(v.joint_pass);
    }

    #[test]
    fn constant_rule_has_chance_kappa() {
        // model alternates, rule always predicts class 0; agreement equals
        // the product of marginals, so kappa = 0
        let model = pm(vec![
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
        ]);
        let rule = pm(vec![vec![0.9, 0.1]; 4]);
        let v = surrogate_verdict(&model, &rule, &[0, 1, 0, 1], VerdictThresholds::default())
            .unwrap();
        assert!((v.kappa - 0.0).abs() < 1e-12);
        assert!(!v.joint_pass);
    }

    #[test]
    fn constant_probability_vector_flags_missing_r() {
        let model = pm(vec![vec![0.5, 0.5]; 3]);
        let rule = pm(vec![vec![0.9, 0.1], vec![0.1, 0.9], vec![0.9, 0.1]]);
        let v = surrogate_verdict(&model, &rule, &[0, 1, 0], VerdictThresholds::default())
            .unwrap();
        assert!(v.r_missing);
        assert!(!v.pass_r);
    }

    /// Hand-constructed pair expected to pass: small probability noise, one
    /// argmax disagreement in many queries, tight accuracy gap.
    #[test]
    fn near_faithful_pair_passes() {
        let n = 40;
        let mut model_rows = Vec::new();
        let mut rule_rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let y = i % 2;
            labels.push(y);
            let p = if y == 0 { 0.85 } else { 0.15 };
            model_rows.push(vec![p, 1.0 - p]);
            // rule tracks the model except for one flipped row
            if i == 7 {
                rule_rows.push(vec![1.0 - p, p]);
            } else {
                rule_rows.push(vec![p - 0.03, 1.0 - p + 0.03]);
            }
        }
        let v = surrogate_verdict(
            &pm(model_rows),
            &pm(rule_rows),
            &labels,
            VerdictThresholds::default(),
        )
        .unwrap();
        assert!(v.pearson_r.unwrap() > 0.9);
        assert!(v.acc_gap_pp <= 3.0);
        assert!(v.kappa >= 0.8);
        assert!(v.joint_pass);
    }
}
