//! Intrinsic dimension of point clouds via the persistent-homology (MST)
//! estimator and the Levina–Bickel MLE, and a one-feature detector of
//! generated text built on those scores.

pub mod cli;
pub mod cloud;
pub mod detector;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod io;
pub mod synth;

pub use cloud::{DistanceMatrix, PointCloud};
pub use detector::{
    classify, evaluate, fit_logistic_1d, fit_threshold_at_fpr, fit_threshold_eer, roc_auc, DetectorModel,
    EvalReport, Label, ScoredSample,
};
pub use error::{Error, Result};
pub use estimators::{
    mle_estimate, phd_estimate, slope_to_dimension, subsample_sizes, DimensionEstimate, Method, PhdParams,
};
pub use geometry::{euclidean_mst, persistence_score, zeroth_barcode, MstResult};
pub use synth::{run_benchmark, sample_manifold, BenchmarkReport, ManifoldKind, ManifoldSpec};
