//! File formats: EMB1 point clouds, JSON-lines manifests, score lists and
//! report records.

pub mod emb;
pub mod manifest;
pub mod records;

pub use emb::{decode_embeddings, encode_embeddings, read_embeddings, write_embeddings, EMB1_MAGIC};
pub use manifest::{read_manifest, ManifestRecord};
pub use records::{read_scores, Estimator, EstimateRecord, ScoreList};
