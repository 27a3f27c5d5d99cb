//! Synthetic corpora and the insertion/deletion faithfulness protocol.

mod curve;
mod sweep;
mod synth;


pub use curve::{
    intervene, run_curve, select_top_k, select_top_k_paired, CurveConfig, CurveRow,
    InterventionMode, InterventionReport,
};
pub use sweep::{frequency_ig_sweep, pearson, SweepPoint};
pub use synth::{generate_dataset, generate_trend_seasonal, generate_two_class, DatasetSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("trend exponent t/alpha = {value:.1} would overflow (limit 700)")]
    TrendOverflow { value: f64 },
    #[error("k_percent {k} outside [0, 100]")]
    BadKPercent { k: f64 },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("selection indices out of range for {len} features")]
    BadIndices { len: usize },
    #[error("sample and baseline live in different domains")]
    MixedDomains,
    #[error("model has no conv layer to probe")]
    NotConvModel,
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Attribution(#[from] crate::attribution::AttributionError),
    #[error(transparent)]
    Transform(#[from] crate::transforms::TransformError),
    #[error(transparent)]
    Graph(#[from] crate::autodiff::GraphError),
}
