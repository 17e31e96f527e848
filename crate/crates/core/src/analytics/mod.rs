//! Time-series features, PCA, forecast metrics and baseline forecasters.

mod features;
mod forecast;
mod lstsq;
mod metrics;
mod pca;

pub use features::{
    excess_kurtosis, extract_features, lempel_ziv_complexity, linear_trend_r, lz76_phrase_count,
    median, permutation_entropy, skewness, FeatureVector, FEATURE_NAMES,
};
pub use forecast::{
    autoregressive_forecast, fit_autoregressive, persistence_forecast, split_index, ArModel,
    Forecast,
};
pub use metrics::{evaluate_forecast, MetricReport};
pub use pca::{pca_on_features, PcaResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("contract error: {0}")]
    Contract(String),
}
