//! Intrinsic-dimension estimators: the persistent-homology dimension (PHD)
//! and the Levina–Bickel maximum-likelihood baseline.

mod mle;
mod phd;
pub(crate) mod streams;

pub use mle::{mle_estimate, DEFAULT_MLE_NEIGHBORS};
pub use phd::{phd_estimate, slope_to_dimension, subsample_sizes, DimensionEstimate, PhdParams};

use serde::{Deserialize, Serialize};

/// Which estimator produced a score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Phd,
    Mle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Phd => "phd",
            Method::Mle => "mle",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phd" => Ok(Method::Phd),
            "mle" => Ok(Method::Mle),
            other => Err(format!("unknown method {other:?} (expected phd or mle)")),
        }
    }
}
