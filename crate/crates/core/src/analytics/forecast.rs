use nalgebra::{DMatrix, DVector};

use super::lstsq::min_norm_lstsq;
use super::AnalyticsError;

/// Predictions for the test segment `series[test_start..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    pub test_start: usize,
    pub predictions: Vec<f64>,
}

impl Forecast {
    pub fn actual<'a>(&self, series: &'a [f64]) -> &'a [f64] {
        &series[self.test_start..]
    }
}

/// `floor(n · split)`, rejected unless it leaves a non-empty training and
/// test segment.
pub fn split_index(n: usize, split: f64) -> Result<usize, AnalyticsError> {
    if !(split > 0.0 && split < 1.0) {
        return Err(AnalyticsError::Contract(format!(
            "split fraction {split} not in (0, 1)"
        )));
    }
    let s = (n as f64 * split).floor() as usize;
    if s == 0 || s >= n {
        return Err(AnalyticsError::Contract(format!(
            "split {split} of {n} values leaves an empty segment"
        )));
    }
    Ok(s)
}

pub fn persistence_forecast(series: &[f64], split: f64) -> Result<Forecast, AnalyticsError> {
    let s = split_index(series.len(), split)?;
    Ok(Forecast {
        test_start: s,
        predictions: series[s - 1..series.len() - 1].to_vec(),
    })
}

/// Linear autoregression `x[t] = intercept + Σ coefficients[j]·x[t−lookback+j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    pub intercept: f64,
    /// Oldest lag first.
    pub coefficients: Vec<f64>,
}

impl ArModel {
    pub fn lookback(&self) -> usize {
        self.coefficients.len()
    }

    /// Prediction from the `lookback` values preceding the target.
    pub fn predict(&self, history: &[f64]) -> f64 {
        debug_assert_eq!(history.len(), self.coefficients.len());
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(history)
                .map(|(c, x)| c * x)
                .sum::<f64>()
    }
}

/// Minimum-norm least-squares fit over every window of `train`.
pub fn fit_autoregressive(train: &[f64], lookback: usize) -> Result<ArModel, AnalyticsError> {
    if lookback == 0 {
        return Err(AnalyticsError::Contract("lookback must be positive".into()));
    }
    if train.len() <= lookback + 1 {
        return Err(AnalyticsError::Contract(format!(
            "training segment of {} values too short for lookback {lookback}",
            train.len()
        )));
    }
    let rows = train.len() - lookback;
    let design = DMatrix::from_fn(rows, lookback + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            train[r + c - 1]
        }
    });
    let target = DVector::from_iterator(rows, train[lookback..].iter().copied());

    let beta = min_norm_lstsq(&design, &target);
    Ok(ArModel {
        intercept: beta[0],
        coefficients: beta.iter().skip(1).copied().collect(),
    })
}

/// One-step-ahead predictions over the test segment using the true history.
pub fn autoregressive_forecast(
    series: &[f64],
    lookback: usize,
    split: f64,
) -> Result<Forecast, AnalyticsError> {
    if series.len() < lookback + 2 {
        return Err(AnalyticsError::Contract(format!(
            "series of {} values shorter than lookback + 2",
            series.len()
        )));
    }
    let s = split_index(series.len(), split)?;
    let model = fit_autoregressive(&series[..s], lookback)?;
    let predictions = (s..series.len())
        .map(|t| model.predict(&series[t - lookback..t]))
        .collect();
    Ok(Forecast {
        test_start: s,
        predictions,
    })
}
