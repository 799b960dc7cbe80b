//! Online boosting over Hoeffding trees that copes with class imbalance and
//! keeps cumulative discrimination in check, with the tooling to evaluate
//! it on streams: prequential evaluation, synthetic generators, CSV
//! ingestion and an experiment harness.

pub mod ensemble;
pub mod error;
pub mod fairness;
pub mod harness;
pub mod imbalance;
pub mod metrics;
pub mod prequential;
pub mod rng;
pub mod stream;
pub mod synth;
pub mod tree;

pub use ensemble::{Fabboo, FabbooConfig, Method, WeakOutput};
pub use error::{ConfigError, DataError, Error};
pub use fairness::{FairnessLedger, FairnessNotion, LedgerMode};
pub use imbalance::ImbalanceMonitor;
pub use metrics::{ConfusionCounts, Metrics};
pub use prequential::{run_prequential, EvalConfig, OnlineClassifier, Prediction};
pub use stream::{Dataset, DatasetSchema, Group, Instance, Label, StreamSource, Value};
pub use tree::{HoeffdingTree, TreeParams};
