use std::fs;
use std::path::Path;

use minifab::dataset::{export_scenario, exported_components, front_fill, SERIES_HEADER};
use minifab::fab::GenerationPattern;
use minifab::factory::{run_scenario, BuildOptions, RepairMode, ScenarioConfig};
use proptest::prelude::*;

fn config(repair: RepairMode) -> ScenarioConfig {
    ScenarioConfig {
        index: 7,
        pa: 45,
        pb: 30,
        tw: 12,
        repair,
        pattern: GenerationPattern::Uniform,
        stages: 8,
        horizon_minutes: 25_000,
        seed: 4242,
    }
}

fn export(config: &ScenarioConfig, dir: &Path) -> Vec<std::path::PathBuf> {
    let trace = run_scenario(config, &BuildOptions::default()).unwrap();
    export_scenario(&trace, config, dir).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SERIES_HEADER));
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn export_writes_every_component_with_one_row_per_minute() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(RepairMode::Mtbf);
    let written = export(&cfg, dir.path());
    assert_eq!(exported_components(8).len(), 9);
    assert_eq!(written.len(), 19);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 19);
    for (stem, _) in exported_components(8) {
        let series = rows(&dir.path().join(format!("{stem}_series.csv")));
        assert_eq!(series.len(), 25_001, "{stem}");
        for (k, row) in series.iter().enumerate() {
            assert_eq!(row[0], k as f64);
            assert_eq!(row.len(), 5);
        }
        assert!(dir.path().join(format!("{stem}_events.csv")).is_file());
    }
    let meta = fs::read_to_string(dir.path().join("scenario.meta")).unwrap();
    assert_eq!(ScenarioConfig::from_meta(&meta).unwrap(), cfg);
}

#[test]
fn cascade_completions_follow_the_last_stage() {
    let dir = tempfile::tempdir().unwrap();
    export(&config(RepairMode::ProcessingSteps), dir.path());
    let cascade = rows(&dir.path().join("cascade_series.csv"));
    let stages: Vec<Vec<Vec<f64>>> = (1..=8)
        .map(|i| rows(&dir.path().join(format!("stage{i}_series.csv"))))
        .collect();
    for k in 0..cascade.len() {
        assert_eq!(cascade[k][3], stages[7][k][3], "row {k}");
        for i in 1..8 {
            assert!(
                stages[i][k][3] <= stages[i - 1][k][3],
                "row {k} stage {}",
                i + 1
            );
        }
        if k > 0 {
            assert!(cascade[k][3] >= cascade[k - 1][3]);
        }
    }
    assert!(cascade.last().unwrap()[3] > 0.0);
}

#[test]
fn export_is_byte_identical_across_runs() {
    let cfg = config(RepairMode::Mtbf);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = export(&cfg, a.path());
    let second = export(&cfg, b.path());
    for (x, y) in first.iter().zip(&second) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{x:?}");
    }
}

#[test]
fn front_fill_reference_cases() {
    let s = front_fill(&[(0.0, 1.0), (2.5, 4.0), (2.5, 5.0)], 1.0, 4.0, 0.0).unwrap();
    assert_eq!(s.values, [1.0, 1.0, 1.0, 5.0, 5.0]);
    let s = front_fill(&[(3.0, 2.0)], 1.0, 5.0, -1.0).unwrap();
    assert_eq!(s.values, [-1.0, -1.0, -1.0, 2.0, 2.0, 2.0]);
    assert!(front_fill(&[(2.0, 1.0), (1.0, 1.0)], 1.0, 5.0, 0.0).is_err());
    assert!(front_fill(&[(6.0, 1.0)], 1.0, 5.0, 0.0).is_err());
}

proptest! {
    #[test]
    fn front_fill_takes_the_latest_observation(
        mut times in prop::collection::vec(0u32..2000, 0..40),
        horizon in 0u32..2000,
        step in prop::sample::select(vec![0.5, 1.0, 3.0, 7.5]),
    ) {
        times.retain(|&t| t <= horizon);
        times.sort_unstable();
        let sparse: Vec<(f64, f64)> = times.iter().enumerate().map(|(i, &t)| (f64::from(t), i as f64)).collect();
        let series = front_fill(&sparse, step, f64::from(horizon), -1.0).unwrap();
        prop_assert_eq!(series.len(), (f64::from(horizon) / step).floor() as usize + 1);
        for (k, v) in series.values.iter().enumerate() {
            let t = k as f64 * step;
            let expected = sparse.iter().rev().find(|o| o.0 <= t).map_or(-1.0, |o| o.1);
            prop_assert_eq!(*v, expected);
        }
    }
}
