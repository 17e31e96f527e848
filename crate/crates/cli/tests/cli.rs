use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn minifab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minifab"))
        .args(args)
        .env_remove("MINIFAB_OUT")
        .output()
        .expect("spawn minifab")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn enumerate(dir: &Path, name: &str, filters: &[&str], extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join(name);
    let mut args = vec!["enumerate", "--out", s(&path)];
    for f in filters {
        args.extend(["--filter", f]);
    }
    args.extend(extra);
    let out = minifab(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

fn scenario_count(path: &Path) -> usize {
    fs::read_to_string(path)
        .unwrap()
        .matches("[[scenario]]")
        .count()
}

#[test]
fn enumerate_writes_the_benchmark_and_honours_filters() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        scenario_count(&enumerate(dir.path(), "all.toml", &[], &[])),
        372
    );
    assert_eq!(
        scenario_count(&enumerate(dir.path(), "nr.toml", &["repair=NoRepair"], &[])),
        186
    );
    assert_eq!(
        scenario_count(&enumerate(
            dir.path(),
            "sin.toml",
            &["pattern=Sinusoidal"],
            &[]
        )),
        93
    );
    assert_eq!(
        scenario_count(&enumerate(
            dir.path(),
            "both.toml",
            &["repair=NoRepair", "pattern=Uniform"],
            &[]
        )),
        93
    );
    let out = minifab(&["enumerate", "--filter", "colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seeds_depend_only_on_the_master_seed_and_index() {
    let dir = tempfile::tempdir().unwrap();
    let all = fs::read_to_string(enumerate(dir.path(), "all.toml", &[], &[])).unwrap();
    let one = fs::read_to_string(enumerate(dir.path(), "one.toml", &["index=200"], &[])).unwrap();
    let block = one.split("[[scenario]]").nth(1).unwrap();
    assert!(all.contains(block));
    let other = fs::read_to_string(enumerate(
        dir.path(),
        "other.toml",
        &["index=200"],
        &["--seed", "7"],
    ))
    .unwrap();
    assert_ne!(one, other);
}

#[test]
fn simulate_is_identical_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let file = enumerate(
        dir.path(),
        "s.toml",
        &["tw=27", "pb=90"],
        &["--stages", "2", "--horizon", "3000"],
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "3")] {
        let o = minifab(&["simulate", s(&file), "--out", s(out), "--jobs", jobs]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let ma = fs::read_to_string(a.join("manifest.toml")).unwrap();
    assert_eq!(ma, fs::read_to_string(b.join("manifest.toml")).unwrap());
    assert!(ma.contains("sha256"));
    let dirs: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().is_dir())
        .collect();
    assert_eq!(dirs.len(), scenario_count(&file));
    let first = dirs[0].as_ref().unwrap().path();
    let files = fs::read_dir(&first).unwrap().count();
    assert_eq!(files, 2 * 3 + 1);
    let rows = fs::read_to_string(first.join("cascade_series.csv"))
        .unwrap()
        .lines()
        .count();
    assert_eq!(rows, 3001 + 1);
}

#[test]
fn empty_scenario_file_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.toml");
    fs::write(&file, "master_seed = \"1\"\n").unwrap();
    let out = dir.path().join("out");
    let o = minifab(&["simulate", s(&file), "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no scenarios"));
    assert!(!out.exists());
}

#[test]
fn invalid_scenario_is_named_and_nothing_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let file = enumerate(dir.path(), "s.toml", &["pa=90", "pb=90"], &[]);
    let text = fs::read_to_string(&file)
        .unwrap()
        .replacen("tw = 27", "tw = 2", 1);
    fs::write(&file, text).unwrap();
    let out = dir.path().join("out");
    let o = minifab(&["simulate", s(&file), "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("tw27"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn failed_run_removes_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let file = enumerate(
        dir.path(),
        "s.toml",
        &["pa=90", "pb=90"],
        &["--stages", "1", "--horizon", "2000"],
    );
    let out = dir.path().join("out");
    fs::create_dir(&out).unwrap();
    let text = fs::read_to_string(&file).unwrap();
    let id = text
        .lines()
        .find_map(|l| l.strip_prefix("id = "))
        .unwrap()
        .trim_matches('"');
    fs::write(out.join(id), "in the way").unwrap();
    let o = minifab(&["simulate", s(&file), "--out", s(&out), "--jobs", "2"]);
    assert!(!o.status.success());
    let left: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(left, [id.to_owned()]);
}

#[test]
fn output_root_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let file = enumerate(
        dir.path(),
        "s.toml",
        &["index=0"],
        &["--stages", "1", "--horizon", "1000"],
    );
    let out = dir.path().join("env_out");
    let o = Command::new(env!("CARGO_BIN_EXE_minifab"))
        .args(["simulate", s(&file)])
        .env("MINIFAB_OUT", &out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("manifest.toml").is_file());
}

fn write_series(path: &Path, values: &[f64]) {
    let mut text = String::from("time_min,throughput,turnaround,cumulative_completed,wip\n");
    for (k, v) in values.iter().enumerate() {
        text.push_str(&format!("{k},{v},0,0,0\n"));
    }
    fs::write(path, text).unwrap();
}

#[test]
fn evaluate_writes_metrics_and_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("constant.csv");
    write_series(&series, &[3.0; 50]);
    let out = dir.path().join("eval");
    let o = minifab(&[
        "evaluate",
        s(&series),
        "--model",
        "persistence",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let metrics: toml::Table = fs::read_to_string(out.join("metrics.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(metrics["mse"].as_float(), Some(0.0));
    assert!(!metrics.contains_key("r2"));
    let predictions = fs::read_to_string(out.join("predictions.csv")).unwrap();
    assert_eq!(
        predictions.lines().next(),
        Some("time_min,actual,predicted")
    );
    assert_eq!(predictions.lines().count(), 1 + 10);
    assert!(predictions.lines().nth(1).unwrap().starts_with("40,3,3"));

    let line: Vec<f64> = (0..100).map(|k| 2.0 * k as f64 + 1.0).collect();
    write_series(&series, &line);
    let o = minifab(&[
        "evaluate",
        s(&series),
        "--model",
        "ar",
        "--lookback",
        "5",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let metrics: toml::Table = fs::read_to_string(out.join("metrics.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert!(metrics["r2"].as_float().unwrap() > 0.999);
}

#[test]
fn evaluate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("short.csv");
    write_series(&series, &[1.0, 2.0, 3.0]);
    let out = dir.path().join("eval");
    let o = minifab(&["evaluate", s(&series), "--model", "ar", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let o = minifab(&["evaluate", s(&series), "--model", "lstm", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("lstm"));
}

fn fake_scenario(root: &Path, index: usize, throughput: Option<&[f64]>) {
    let meta = format!(
        "id=x\nindex={index}\npa=12\npb=36\ntw=9\nrepair=NoRepair\npattern=Uniform\nstages=1\nhorizon_minutes=20\nseed={index}\n"
    );
    let dir = root.join(format!("s{index}"));
    fs::create_dir_all(&dir).unwrap();
    fs::write(dir.join("scenario.meta"), meta).unwrap();
    if let Some(values) = throughput {
        write_series(&dir.join("cascade_series.csv"), values);
    }
}

#[test]
fn analyze_names_missing_series_and_constant_features() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    let series: Vec<f64> = (0..20).map(|k| (k * k) as f64).collect();
    fake_scenario(&data, 0, Some(&series));
    fake_scenario(&data, 1, None);
    let o = minifab(&["analyze", s(&data), "--out", s(&dir.path().join("a"))]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("s1/cascade_series.csv"),
        "{}",
        stderr(&o)
    );

    fake_scenario(&data, 1, Some(&series));
    let o = minifab(&["analyze", s(&data), "--out", s(&dir.path().join("a"))]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("\"skewness\" is constant"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn analyze_writes_features_and_loadings() {
    let dir = tempfile::tempdir().unwrap();
    let file = enumerate(dir.path(), "s.toml", &["pa=90"], &["--stages", "2"]);
    let data = dir.path().join("data");
    assert!(minifab(&["simulate", s(&file), "--out", s(&data)])
        .status
        .success());
    let out = dir.path().join("analysis");
    let o = minifab(&["analyze", s(&data), "--out", s(&out), "--components", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let features = fs::read_to_string(out.join("features.csv")).unwrap();
    assert_eq!(features.lines().count(), 1 + scenario_count(&file));
    let loadings = fs::read_to_string(out.join("pca_loadings.csv")).unwrap();
    let rows: Vec<&str> = loadings.lines().collect();
    assert_eq!(rows[0], "feature,PC1,PC2");
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().skip(1).all(|r| r.split(',').count() == 3));

    let victim = fs::read_dir(&data)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.is_dir())
        .unwrap();
    fs::write(victim.join("cascade_series.csv"), "tampered").unwrap();
    let o = minifab(&["analyze", s(&data), "--out", s(&out)]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("manifest"), "{}", stderr(&o));
}
