//! One-feature artificial-text detection on dimension scores.
//!
//! Generated text has lower intrinsic dimension than human text, so every
//! rule here predicts `generated` at low scores.

mod fit;
mod metrics;

pub use fit::{fit_logistic_1d, fit_threshold_at_fpr, fit_threshold_eer};
pub use metrics::{evaluate, roc_auc, Breakdown, EvalCounts, EvalReport, FprAccuracy, ModelMetrics};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Human,
    Generated,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Human => "human",
            Label::Generated => "generated",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "human" => Ok(Label::Human),
            "generated" => Ok(Label::Generated),
            other => Err(Error::Data(format!(
                "unknown label {other:?} (expected human or generated)"
            ))),
        }
    }
}

/// A dimension score with its ground-truth label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub id: String,
    pub score: f64,
    pub label: Label,
    /// Free-form grouping keys such as `language`, `generator`, `domain`.
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

impl ScoredSample {
    pub fn new(id: impl Into<String>, score: f64, label: Label) -> Self {
        Self {
            id: id.into(),
            score,
            label,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.meta.insert(key.into(), value.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "lowercase")]
pub enum DecisionRule {
    /// Generated iff `score <= threshold`.
    Threshold { threshold: f64 },
    /// Generated iff `weight * score + bias > 0`.
    Logistic { weight: f64, bias: f64 },
}

/// The only supported orientation: low scores are generated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    LowerIsGenerated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum CalibrationMethod {
    TargetFpr { target_fpr: f64 },
    Eer { eer: f64 },
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(flatten)]
    pub method: CalibrationMethod,
    /// Identifier of the data the rule was fitted on.
    #[serde(default)]
    pub training_set: Option<String>,
    pub n_human: usize,
    pub n_generated: usize,
    /// Set when the fit could not proceed as requested, e.g. a logistic fit
    /// on perfectly separated data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    #[serde(flatten)]
    pub rule: DecisionRule,
    #[serde(default)]
    pub direction: Direction,
    pub calibration: Calibration,
}

impl DetectorModel {
    pub fn threshold(threshold: f64, calibration: Calibration) -> Self {
        Self {
            rule: DecisionRule::Threshold { threshold },
            direction: Direction::LowerIsGenerated,
            calibration,
        }
    }

    pub fn with_training_set(mut self, id: impl Into<String>) -> Self {
        self.calibration.training_set = Some(id.into());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.rule {
            DecisionRule::Threshold { threshold } => !threshold.is_nan(),
            DecisionRule::Logistic { weight, bias } => weight.is_finite() && bias.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Data(format!("invalid decision rule {:?}", self.rule)))
        }
    }
}

/// Applies the model's decision rule. Threshold ties are generated.
pub fn classify(model: &DetectorModel, score: f64) -> Label {
    let generated = match model.rule {
        DecisionRule::Threshold { threshold } => score <= threshold,
        DecisionRule::Logistic { weight, bias } => weight * score + bias > 0.0,
    };
    if generated {
        Label::Generated
    } else {
        Label::Human
    }
}
