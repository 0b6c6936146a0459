use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::fit::{count_le, eer_point, threshold_at_fpr_sorted};
use super::{classify, DetectorModel, Label, ScoredSample};
use crate::error::{Error, Result};

/// Area under the ROC curve with generated as the positive class at low
/// scores: `P(gen < human) + P(gen == human) / 2` over all pairs.
pub fn roc_auc(human: &[f64], generated: &[f64]) -> Result<f64> {
    if human.is_empty() || generated.is_empty() {
        return Err(Error::Data(format!(
            "ROC-AUC needs both classes, got {} human and {} generated",
            human.len(),
            generated.len()
        )));
    }
    if human.iter().chain(generated).any(|s| !s.is_finite()) {
        return Err(Error::Data("non-finite score".into()));
    }
    let mut h = human.to_vec();
    h.sort_by(f64::total_cmp);
    Ok(auc_sorted(&h, generated))
}

fn auc_sorted(human_sorted: &[f64], generated: &[f64]) -> f64 {
    let n = human_sorted.len() as u128;
    // twice the Mann–Whitney U, kept integral
    let twice_u: u128 = generated
        .iter()
        .map(|&g| {
            let below = human_sorted.partition_point(|&x| x < g) as u128;
            let at_or_below = count_le(human_sorted, g) as u128;
            let above = n - at_or_below;
            2 * above + (at_or_below - below)
        })
        .sum();
    twice_u as f64 / (2 * n * generated.len() as u128) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FprAccuracy {
    pub target_fpr: f64,
    /// Threshold fixed on the evaluation humans.
    pub threshold: f64,
    /// Fraction of humans flagged at that threshold.
    pub achieved_fpr: f64,
    /// Fraction of generated samples detected (TPR).
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub accuracy: f64,
    pub tpr: f64,
    pub fpr: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounts {
    pub human: usize,
    pub generated: usize,
    /// Samples without a finite score (failed estimates).
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub key: String,
    pub value: String,
    /// The group had no human samples of its own and was scored against
    /// every human sample.
    pub shared_human_pool: bool,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub roc_auc: f64,
    pub eer: f64,
    pub eer_threshold: f64,
    pub accuracy_at_fpr: Vec<FprAccuracy>,
    /// Performance of the supplied model's own rule.
    pub model: ModelMetrics,
    pub counts: EvalCounts,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdowns: Vec<Breakdown>,
}

/// Metrics of `model` on `samples`, plus detection rate at each requested
/// FPR with the threshold re-derived from the evaluation humans.
///
/// Samples with non-finite scores are excluded and counted. When samples
/// carry meta keys, a breakdown is added per key and value; groups without
/// humans of their own use every human sample.
pub fn evaluate(model: &DetectorModel, samples: &[ScoredSample], fprs: &[f64]) -> Result<EvalReport> {
    model.validate()?;
    if let Some(bad) = fprs.iter().find(|f| !(**f > 0.0 && **f < 1.0)) {
        return Err(Error::Param(format!("FPR levels must lie in (0, 1), got {bad}")));
    }
    let scored: Vec<&ScoredSample> = samples.iter().filter(|s| s.score.is_finite()).collect();
    let excluded = samples.len() - scored.len();

    let mut report = summarize(model, &scored, fprs, excluded)?;

    let keys: BTreeSet<&str> = scored.iter().flat_map(|s| s.meta.keys().map(String::as_str)).collect();
    for key in keys {
        let mut groups: BTreeMap<&str, Vec<&ScoredSample>> = BTreeMap::new();
        for s in &scored {
            if let Some(v) = s.meta.get(key) {
                groups.entry(v.as_str()).or_default().push(s);
            }
        }
        for (value, mut group) in groups {
            if !group.iter().any(|s| s.label == Label::Generated) {
                continue;
            }
            let shared = !group.iter().any(|s| s.label == Label::Human);
            if shared {
                group.extend(scored.iter().filter(|s| s.label == Label::Human));
            }
            report.breakdowns.push(Breakdown {
                key: key.to_string(),
                value: value.to_string(),
                shared_human_pool: shared,
                report: summarize(model, &group, fprs, 0)?,
            });
        }
    }
    Ok(report)
}

fn summarize(
    model: &DetectorModel,
    samples: &[&ScoredSample],
    fprs: &[f64],
    excluded: usize,
) -> Result<EvalReport> {
    let mut human: Vec<f64> = Vec::new();
    let mut generated: Vec<f64> = Vec::new();
    for s in samples {
        match s.label {
            Label::Human => human.push(s.score),
            Label::Generated => generated.push(s.score),
        }
    }
    if human.is_empty() || generated.is_empty() {
        return Err(Error::Data(format!(
            "evaluation needs both classes, got {} human and {} generated",
            human.len(),
            generated.len()
        )));
    }
    human.sort_by(f64::total_cmp);
    generated.sort_by(f64::total_cmp);
    let (nh, ng) = (human.len() as f64, generated.len() as f64);

    let accuracy_at_fpr = fprs
        .iter()
        .map(|&target_fpr| {
            let threshold = threshold_at_fpr_sorted(&human, target_fpr);
            FprAccuracy {
                target_fpr,
                threshold,
                achieved_fpr: count_le(&human, threshold) as f64 / nh,
                accuracy: count_le(&generated, threshold) as f64 / ng,
            }
        })
        .collect();

    let op = eer_point(&human, &generated);

    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut correct = 0usize;
    for s in samples {
        let predicted = classify(model, s.score);
        if predicted == s.label {
            correct += 1;
        }
        match (predicted, s.label) {
            (Label::Generated, Label::Generated) => tp += 1,
            (Label::Generated, Label::Human) => fp += 1,
            _ => {}
        }
    }

    Ok(EvalReport {
        roc_auc: auc_sorted(&human, &generated),
        eer: op.eer(human.len(), generated.len()),
        eer_threshold: op.threshold,
        accuracy_at_fpr,
        model: ModelMetrics {
            accuracy: correct as f64 / samples.len() as f64,
            tpr: tp as f64 / ng,
            fpr: fp as f64 / nh,
        },
        counts: EvalCounts {
            human: human.len(),
            generated: generated.len(),
            excluded,
        },
        breakdowns: Vec::new(),
    })
}
