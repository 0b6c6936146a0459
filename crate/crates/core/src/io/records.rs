use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::detector::Label;
use crate::error::{Error, Result};
use crate::estimators::{mle_estimate, phd_estimate, Method, PhdParams};

/// An estimator together with its full parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase")]
pub enum Estimator {
    Phd(PhdParams),
    Mle { k_neighbors: usize },
}

impl Estimator {
    pub fn method(&self) -> Method {
        match self {
            Estimator::Phd(_) => Method::Phd,
            Estimator::Mle { .. } => Method::Mle,
        }
    }

    /// Returns the dimension and, for PHD, the per-round slopes.
    pub fn estimate(&self, cloud: &PointCloud) -> Result<(f64, Option<Vec<f64>>)> {
        match self {
            Estimator::Phd(p) => phd_estimate(cloud, p).map(|e| (e.value, Some(e.slopes))),
            Estimator::Mle { k_neighbors } => mle_estimate(cloud, *k_neighbors).map(|v| (v, None)),
        }
    }
}

/// One line of an `estimate` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub id: String,
    pub method: Method,
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
    pub params: Estimator,
}

impl EstimateRecord {
    pub fn new(id: impl Into<String>, estimator: &Estimator, outcome: Result<(f64, Option<Vec<f64>>)>) -> Self {
        let (value, slopes, error, error_detail) = match outcome {
            Ok((v, s)) => (Some(v), s, None, None),
            Err(e) => (None, None, Some(e.kind().to_string()), Some(e.to_string())),
        };
        Self {
            id: id.into(),
            method: estimator.method(),
            value,
            slopes,
            error,
            error_detail,
            label: None,
            meta: BTreeMap::new(),
            params: estimator.clone(),
        }
    }
}

/// Scores read from a file, with the number of entries that carried no
/// value (failed estimates).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreList {
    pub scores: Vec<f64>,
    pub skipped: usize,
}

/// Reads scores, one per line: either a bare number or a JSON object with a
/// `value` (as written by `estimate`) or `score` field. Objects whose value
/// is null are counted as skipped.
pub fn read_scores(path: impl AsRef<Path>) -> Result<ScoreList> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = ScoreList::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let value = if line.starts_with('{') {
            let v: serde_json::Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
            match v.get("value").or_else(|| v.get("score")) {
                Some(serde_json::Value::Null) | None => None,
                Some(x) => Some(
                    x.as_f64()
                        .ok_or_else(|| parse_err(format!("score {x} is not a number")))?,
                ),
            }
        } else {
            Some(line.parse::<f64>().map_err(|e| parse_err(e.to_string()))?)
        };
        match value {
            Some(v) if v.is_finite() => out.scores.push(v),
            Some(v) => return Err(parse_err(format!("non-finite score {v}"))),
            None => out.skipped += 1,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_score_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        fs::write(
            &p,
            "9.5\n{\"id\":\"a\",\"value\":8.25}\n{\"id\":\"b\",\"value\":null,\"error\":\"TooFewPoints\"}\n\n{\"score\":7}\n",
        )
        .unwrap();
        let s = read_scores(&p).unwrap();
        assert_eq!(s.scores, vec![9.5, 8.25, 7.0]);
        assert_eq!(s.skipped, 1);
    }

    #[test]
    fn bad_score_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        fs::write(&p, "1.0\nabc\n").unwrap();
        assert!(matches!(read_scores(&p).unwrap_err(), Error::Parse { line: 2, .. }));
    }

    #[test]
    fn estimator_tagging() {
        let e = Estimator::Mle { k_neighbors: 20 };
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"method":"mle","k_neighbors":20}"#);
        let p = Estimator::Phd(PhdParams::default());
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["method"], "phd");
        assert_eq!(v["k_grid"], 8);
        assert_eq!(serde_json::from_value::<Estimator>(v).unwrap(), p);
    }
}
