use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use minifab::analytics::{
    extract_features, pca_on_features, FeatureVector, PcaResult, FEATURE_NAMES,
};
use minifab::factory::ScenarioConfig;
use nalgebra::DMatrix;

use crate::series::read_column;
use crate::simulate::{RunManifest, MANIFEST_FILE};

pub const FEATURES_FILE: &str = "features.csv";
pub const EIGENVALUES_FILE: &str = "pca_eigenvalues.csv";
pub const LOADINGS_FILE: &str = "pca_loadings.csv";
pub const SCORES_FILE: &str = "pca_scores.csv";

/// Series analysed per scenario.
pub const SERIES_FILE: &str = "cascade_series.csv";
pub const SERIES_COLUMN: &str = "throughput";

/// Scenario directories under `root`, ordered by scenario index.
fn scenario_dirs(root: &Path) -> Result<Vec<(ScenarioConfig, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(root)
        .with_context(|| format!("reading dataset directory {}", root.display()))?
    {
        let dir = entry?.path();
        let meta = dir.join("scenario.meta");
        if !meta.is_file() {
            continue;
        }
        let text =
            fs::read_to_string(&meta).with_context(|| format!("reading {}", meta.display()))?;
        let config = ScenarioConfig::from_meta(&text)
            .with_context(|| format!("parsing {}", meta.display()))?;
        out.push((config, dir));
    }
    out.sort_by_key(|(c, _)| c.index);
    Ok(out)
}

pub struct Analysis {
    pub features: Vec<FeatureVector>,
    pub pca: PcaResult,
}

/// Features of every scenario's cascade throughput plus their PCA. When a
/// manifest is present its checksums are verified first.
pub fn analyze(dataset: &Path, out: &Path, components: Option<usize>) -> Result<Analysis> {
    if dataset.join(MANIFEST_FILE).is_file() {
        let stale = RunManifest::load(dataset)?.verify(dataset)?;
        if !stale.is_empty() {
            bail!("files differ from {MANIFEST_FILE}: {}", stale.join(", "));
        }
    }
    let scenarios = scenario_dirs(dataset)?;
    if scenarios.len() < 2 {
        bail!(
            "{} holds {} scenario directories; PCA needs at least 2",
            dataset.display(),
            scenarios.len()
        );
    }
    let p = FEATURE_NAMES.len();
    let k = components.unwrap_or(p);
    if k == 0 || k > p {
        bail!("--components must be between 1 and {p}");
    }

    let mut features = Vec::with_capacity(scenarios.len());
    for (config, dir) in scenarios {
        let path = dir.join(SERIES_FILE);
        if !path.is_file() {
            bail!("missing series file {}", path.display());
        }
        let (_, values) = read_column(&path, SERIES_COLUMN)?;
        let id = config.id();
        let fv =
            extract_features(&values, Some(config)).with_context(|| format!("features of {id}"))?;
        features.push(fv);
    }

    let data = DMatrix::from_fn(features.len(), p, |i, j| features[i].values()[j]);
    let names: Vec<String> = FEATURE_NAMES.iter().map(|s| s.to_string()).collect();
    let pca = pca_on_features(&data, &names).context("PCA of the feature matrix")?;

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write(out, FEATURES_FILE, &features_csv(&features))?;
    write(out, EIGENVALUES_FILE, &eigenvalues_csv(&pca))?;
    write(out, LOADINGS_FILE, &loadings_csv(&pca, k))?;
    write(out, SCORES_FILE, &scores_csv(&pca, &features, k))?;
    Ok(Analysis { features, pca })
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
}

fn pc_header(k: usize) -> String {
    (1..=k).map(|i| format!(",PC{i}")).collect()
}

fn features_csv(features: &[FeatureVector]) -> String {
    let mut s = format!(
        "id,index,pa,pb,tw,repair,pattern,{}\n",
        FEATURE_NAMES.join(",")
    );
    for fv in features {
        let c = fv
            .source_scenario
            .as_ref()
            .expect("features carry their scenario");
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            c.id(),
            c.index,
            c.pa,
            c.pb,
            c.tw,
            c.repair,
            c.pattern.name()
        );
        for v in fv.values() {
            let _ = write!(s, ",{v}");
        }
        s.push('\n');
    }
    s
}

fn eigenvalues_csv(pca: &PcaResult) -> String {
    let mut s = String::from("component,eigenvalue,explained_variance_ratio\n");
    for (i, (l, r)) in pca
        .eigenvalues
        .iter()
        .zip(pca.explained_variance_ratio())
        .enumerate()
    {
        let _ = writeln!(s, "PC{},{l},{r}", i + 1);
    }
    s
}

fn loadings_csv(pca: &PcaResult, k: usize) -> String {
    let mut s = format!("feature{}\n", pc_header(k));
    for (i, name) in pca.feature_names.iter().enumerate() {
        s.push_str(name);
        for j in 0..k {
            let _ = write!(s, ",{}", pca.loadings[(i, j)]);
        }
        s.push('\n');
    }
    s
}

fn scores_csv(pca: &PcaResult, features: &[FeatureVector], k: usize) -> String {
    let mut s = format!("id{}\n", pc_header(k));
    for (i, fv) in features.iter().enumerate() {
        s.push_str(
            &fv.source_scenario
                .as_ref()
                .map(ScenarioConfig::id)
                .unwrap_or_default(),
        );
        for j in 0..k {
            let _ = write!(s, ",{}", pca.scores[(i, j)]);
        }
        s.push('\n');
    }
    s
}
