use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::fab::vars;
use crate::factory::{stage_transducer_path, ScenarioConfig, CASCADE_TRANSDUCER_PATH};
use crate::kernel::EventTrace;

use super::{extract_variable, front_fill, DatasetError, TimeSeries};

pub const SERIES_HEADER: &str = "time_min,throughput,turnaround,cumulative_completed,wip";

/// Front-filled 1-minute series of the four exported variables.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSeries {
    pub throughput: TimeSeries,
    pub turnaround: TimeSeries,
    pub cumulative_completed: TimeSeries,
    pub wip: TimeSeries,
}

/// `(file stem, transducer path)` for every stage and the cascade.
pub fn exported_components(stages: u32) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = (1..=stages)
        .map(|i| (format!("stage{i}"), stage_transducer_path(i)))
        .collect();
    out.push(("cascade".to_owned(), CASCADE_TRANSDUCER_PATH.to_owned()));
    out
}

pub fn component_series(
    trace: &EventTrace,
    component: &str,
    horizon: f64,
) -> Result<ComponentSeries, DatasetError> {
    let series = |var: &str| -> Result<TimeSeries, DatasetError> {
        front_fill(&extract_variable(trace, component, var)?, 1.0, horizon, 0.0)
    };
    Ok(ComponentSeries {
        throughput: series(vars::THROUGHPUT)?,
        turnaround: series(vars::TURNAROUND)?,
        cumulative_completed: series(vars::CUMULATIVE_COMPLETED)?,
        wip: series(vars::WIP)?,
    })
}

/// `time_min,variable,value` rows for the scalar records of `component`.
pub fn write_events_csv<W: Write>(
    trace: &EventTrace,
    component: &str,
    out: W,
) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "time_min,variable,value")?;
    for r in trace.for_component(component) {
        if let Some(v) = r.value.as_scalar() {
            writeln!(w, "{},{},{}", r.time, r.variable, v)?;
        }
    }
    w.flush()
}

pub fn write_series_csv<W: Write>(series: &ComponentSeries, out: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{SERIES_HEADER}")?;
    let rows = series.throughput.len();
    for k in 0..rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            k,
            series.throughput.values[k],
            series.turnaround.values[k],
            series.cumulative_completed.values[k],
            series.wip.values[k]
        )?;
    }
    w.flush()
}

/// Writes `<component>_events.csv` and `<component>_series.csv` for every
/// stage and the cascade, plus `scenario.meta`. Returns the written paths in
/// a fixed order.
pub fn export_scenario(
    trace: &EventTrace,
    config: &ScenarioConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, DatasetError> {
    fs::create_dir_all(out_dir)?;
    let horizon = f64::from(config.horizon_minutes);
    let mut written = Vec::new();

    for (stem, path) in exported_components(config.stages) {
        let series = component_series(trace, &path, horizon)?;

        let events_path = out_dir.join(format!("{stem}_events.csv"));
        write_events_csv(trace, &path, File::create(&events_path)?)?;
        written.push(events_path);

        let series_path = out_dir.join(format!("{stem}_series.csv"));
        write_series_csv(&series, File::create(&series_path)?)?;
        written.push(series_path);
    }

    let meta_path = out_dir.join("scenario.meta");
    fs::write(&meta_path, config.to_meta())?;
    written.push(meta_path);
    Ok(written)
}
