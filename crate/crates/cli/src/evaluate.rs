use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use minifab::analytics::{
    autoregressive_forecast, evaluate_forecast, persistence_forecast, Forecast, MetricReport,
};
use serde::Serialize;

use crate::series::read_column;

pub const METRICS_FILE: &str = "metrics.toml";
pub const PREDICTIONS_FILE: &str = "predictions.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Persistence,
    Ar,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Persistence => "persistence",
            Model::Ar => "ar",
        }
    }
}

pub struct EvaluateArgs<'a> {
    pub series: &'a Path,
    pub column: &'a str,
    pub model: Model,
    pub lookback: usize,
    pub split: f64,
    pub out: &'a Path,
}

pub fn evaluate(args: &EvaluateArgs<'_>) -> Result<MetricReport> {
    let (times, values) = read_column(args.series, args.column)?;
    let forecast: Forecast = match args.model {
        Model::Persistence => persistence_forecast(&values, args.split),
        Model::Ar => autoregressive_forecast(&values, args.lookback, args.split),
    }
    .with_context(|| {
        format!(
            "{} forecast of {}",
            args.model.name(),
            args.series.display()
        )
    })?;
    let actual = forecast.actual(&values);
    let report = evaluate_forecast(actual, &forecast.predictions)?;

    fs::create_dir_all(args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut csv = String::from("time_min,actual,predicted\n");
    for (k, (a, p)) in actual.iter().zip(&forecast.predictions).enumerate() {
        let _ = writeln!(csv, "{},{a},{p}", times[forecast.test_start + k]);
    }
    let predictions = args.out.join(PREDICTIONS_FILE);
    fs::write(&predictions, csv).with_context(|| format!("writing {}", predictions.display()))?;
    let metrics = args.out.join(METRICS_FILE);
    fs::write(&metrics, metrics_toml(args, &report)?)
        .with_context(|| format!("writing {}", metrics.display()))?;
    Ok(report)
}

/// Undefined metrics are left out of the file.
#[derive(Serialize)]
struct MetricsFile<'a> {
    series: String,
    column: &'a str,
    model: &'static str,
    lookback: usize,
    split: f64,
    n: usize,
    n_nonzero_actuals: usize,
    mse: f64,
    r2: Option<f64>,
    mfe: f64,
    mape: Option<f64>,
}

fn metrics_toml(args: &EvaluateArgs<'_>, r: &MetricReport) -> Result<String> {
    Ok(toml::to_string(&MetricsFile {
        series: args.series.display().to_string(),
        column: args.column,
        model: args.model.name(),
        lookback: args.lookback,
        split: args.split,
        n: r.n,
        n_nonzero_actuals: r.n_nonzero_actuals,
        mse: r.mse,
        r2: r.r2,
        mfe: r.mfe,
        mape: r.mape,
    })?)
}

pub fn summary(model: Model, r: &MetricReport) -> String {
    let show = |v: Option<f64>| v.map_or_else(|| "undefined".to_owned(), |x| format!("{x:.6e}"));
    format!(
        "model={} n={} mse={:.6e} r2={} mfe={:.6e} mape={}",
        model.name(),
        r.n,
        r.mse,
        show(r.r2),
        r.mfe,
        show(r.mape)
    )
}
