use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use minifab::dataset::export_scenario;
use minifab::factory::{run_scenario, BuildOptions, ScenarioConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scenarios::ScenarioFile;

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub scenario_digest: String,
    pub master_seed: String,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub index: usize,
    /// Relative to the dataset root.
    pub dir: String,
    #[serde(rename = "file")]
    pub files: Vec<FileChecksum>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileChecksum {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn load(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST_FILE);
        let text =
            fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Files whose on-disk checksum differs from the manifest.
    pub fn verify(&self, root: &Path) -> Result<Vec<String>> {
        let mut stale = Vec::new();
        for entry in &self.scenarios {
            for f in &entry.files {
                let path = root.join(&entry.dir).join(&f.path);
                if sha256_file(&path)? != f.sha256 {
                    stale.push(format!("{}/{}", entry.dir, f.path));
                }
            }
        }
        Ok(stale)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn run_one(config: &ScenarioConfig, root: &Path) -> Result<ManifestEntry> {
    let dir = root.join(config.id());
    let trace = run_scenario(config, &BuildOptions::default())
        .with_context(|| format!("simulating {}", config.id()))?;
    let written = export_scenario(&trace, config, &dir)
        .with_context(|| format!("exporting {}", config.id()))?;
    let files = written
        .iter()
        .map(|p| {
            Ok(FileChecksum {
                path: p
                    .file_name()
                    .expect("exported file name")
                    .to_string_lossy()
                    .into_owned(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ManifestEntry {
        id: config.id(),
        index: config.index,
        dir: config.id(),
        files,
    })
}

/// Removes what a failed run created.
struct Cleanup {
    root: PathBuf,
    created_root: bool,
    dirs: Vec<PathBuf>,
    armed: bool,
}

impl Drop for Cleanup {
    fn drop(&mut self) {
        if !self.armed {
            return;
        }
        if self.created_root {
            let _ = fs::remove_dir_all(&self.root);
            return;
        }
        for d in &self.dirs {
            let _ = fs::remove_dir_all(d);
        }
        let _ = fs::remove_file(self.root.join(MANIFEST_FILE));
    }
}

pub fn simulate(scenario_file: &Path, out: &Path, jobs: usize) -> Result<RunManifest> {
    let file = ScenarioFile::load(scenario_file)?;
    let configs = file.configs()?;
    if configs.is_empty() {
        bail!(
            "scenario file {} contains no scenarios",
            scenario_file.display()
        );
    }
    let created_root = !out.exists();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut cleanup = Cleanup {
        root: out.to_path_buf(),
        created_root,
        dirs: configs
            .iter()
            .map(|c| out.join(c.id()))
            .filter(|d| !d.exists())
            .collect(),
        armed: true,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("starting worker pool")?;
    let started = Instant::now();
    let results: Vec<Result<ManifestEntry>> =
        pool.install(|| configs.par_iter().map(|c| run_one(c, out)).collect());
    let scenarios = results.into_iter().collect::<Result<Vec<_>>>()?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_owned(),
        scenario_digest: file.digest()?,
        master_seed: file.master_seed.clone(),
        scenarios,
    };
    let path = out.join(MANIFEST_FILE);
    fs::write(&path, toml::to_string(&manifest)?)
        .with_context(|| format!("writing {}", path.display()))?;
    cleanup.armed = false;
    eprintln!(
        "simulated {} scenarios with {} jobs in {:.2?}",
        manifest.scenarios.len(),
        jobs.max(1),
        started.elapsed()
    );
    Ok(manifest)
}
