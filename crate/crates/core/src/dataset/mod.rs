//! Turns simulation traces into uniform time series and CSV files.

mod export;

pub use export::{
    component_series, export_scenario, exported_components, write_events_csv, write_series_csv,
    ComponentSeries, SERIES_HEADER,
};

use crate::kernel::EventTrace;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("lookup error: {0}")]
    Lookup(String),
    #[error("contract error: {0}")]
    Contract(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// `(time, value)` observations in increasing time order.
pub type SparseSeries = Vec<(f64, f64)>;

/// Observations of one scalar variable of one component. When several
/// records share a time, the last one in trace order is kept.
pub fn extract_variable(
    trace: &EventTrace,
    component: &str,
    variable: &str,
) -> Result<SparseSeries, DatasetError> {
    if trace.is_empty() {
        return Ok(Vec::new());
    }
    let mut seen_component = false;
    let mut out: SparseSeries = Vec::new();
    for r in trace.for_component(component) {
        seen_component = true;
        if r.variable != variable {
            continue;
        }
        let Some(v) = r.value.as_scalar() else {
            continue;
        };
        let t = r.time.minutes();
        match out.last_mut() {
            Some(last) if last.0 == t => last.1 = v,
            _ => out.push((t, v)),
        }
    }
    if !seen_component {
        return Err(DatasetError::Lookup(format!(
            "no records for component {component:?}"
        )));
    }
    if out.is_empty() {
        return Err(DatasetError::Lookup(format!(
            "component {component:?} never recorded {variable:?}"
        )));
    }
    Ok(out)
}

/// Uniformly sampled series starting at time zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub step_minutes: f64,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Piecewise-constant resampling: sample `k` takes the value of the latest
/// observation at or before `k·step`, or `initial` before the first one.
/// The result has `floor(horizon / step) + 1` samples.
pub fn front_fill(
    sparse: &[(f64, f64)],
    step_minutes: f64,
    horizon: f64,
    initial: f64,
) -> Result<TimeSeries, DatasetError> {
    if step_minutes.is_nan() || step_minutes <= 0.0 || horizon.is_nan() || horizon < 0.0 {
        return Err(DatasetError::Contract(
            "step must be positive and horizon non-negative".into(),
        ));
    }
    if sparse.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(DatasetError::Contract(
            "sparse series is not time-sorted".into(),
        ));
    }
    if let Some(&(t, _)) = sparse.last() {
        if t > horizon {
            return Err(DatasetError::Contract(format!(
                "observation at {t} beyond horizon {horizon}"
            )));
        }
    }
    let samples = (horizon / step_minutes).floor() as usize + 1;
    let mut values = Vec::with_capacity(samples);
    let mut next = 0;
    let mut current = initial;
    for k in 0..samples {
        let t = k as f64 * step_minutes;
        while next < sparse.len() && sparse[next].0 <= t {
            current = sparse[next].1;
            next += 1;
        }
        values.push(current);
    }
    Ok(TimeSeries {
        step_minutes,
        values,
    })
}
