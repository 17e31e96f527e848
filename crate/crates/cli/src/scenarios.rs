//! Scenario files: a TOML document with one `[[scenario]]` table per run.
//!
//! ```toml
//! master_seed = "20240501"
//!
//! [[scenario]]
//! id = "s000_pa0_pb18_tw27_ProcessingSteps_Uniform"
//! index = 0
//! pa = 0
//! pb = 18
//! tw = 27
//! repair = "ProcessingSteps"
//! pattern = "Uniform"
//! stages = 8
//! horizon_minutes = 25000
//! seed = "9165839274519583214"
//! ```
//!
//! Seeds are full-range `u64` values written as decimal strings.

use std::path::Path;

use anyhow::{bail, Context, Result};
use minifab::factory::{parse_pattern, RepairMode, ScenarioConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub master_seed: String,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub id: String,
    pub index: usize,
    pub pa: u32,
    pub pb: u32,
    pub tw: u32,
    pub repair: String,
    pub pattern: String,
    pub stages: u32,
    pub horizon_minutes: u32,
    pub seed: String,
}

impl From<&ScenarioConfig> for ScenarioEntry {
    fn from(c: &ScenarioConfig) -> Self {
        Self {
            id: c.id(),
            index: c.index,
            pa: c.pa,
            pb: c.pb,
            tw: c.tw,
            repair: c.repair.name().to_owned(),
            pattern: c.pattern.name().to_owned(),
            stages: c.stages,
            horizon_minutes: c.horizon_minutes,
            seed: c.seed.to_string(),
        }
    }
}

impl ScenarioEntry {
    pub fn to_config(&self) -> Result<ScenarioConfig> {
        let ctx = || format!("scenario {:?}", self.id);
        let repair = RepairMode::parse(&self.repair)
            .with_context(|| format!("unknown repair mode {:?}", self.repair))
            .with_context(ctx)?;
        let pattern = parse_pattern(&self.pattern)
            .with_context(|| format!("unknown pattern {:?}", self.pattern))
            .with_context(ctx)?;
        let seed = self
            .seed
            .parse()
            .with_context(|| format!("seed {:?} is not an unsigned integer", self.seed))
            .with_context(ctx)?;
        let config = ScenarioConfig {
            index: self.index,
            pa: self.pa,
            pb: self.pb,
            tw: self.tw,
            repair,
            pattern,
            stages: self.stages,
            horizon_minutes: self.horizon_minutes,
            seed,
        };
        config.validate().with_context(ctx)?;
        Ok(config)
    }
}

impl ScenarioFile {
    pub fn new(master_seed: u64, configs: &[ScenarioConfig]) -> Self {
        Self {
            master_seed: master_seed.to_string(),
            scenarios: configs.iter().map(ScenarioEntry::from).collect(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing scenario file {}", path.display()))
    }

    /// Validated configurations; fails on the first invalid entry, naming it.
    pub fn configs(&self) -> Result<Vec<ScenarioConfig>> {
        let configs: Vec<ScenarioConfig> = self
            .scenarios
            .iter()
            .map(ScenarioEntry::to_config)
            .collect::<Result<_>>()?;
        let mut ids: Vec<String> = configs.iter().map(ScenarioConfig::id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            bail!("scenario {:?} appears more than once", w[0]);
        }
        Ok(configs)
    }

    /// SHA-256 of the canonical serialization of the scenario list.
    pub fn digest(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }
}

/// One `key=value` constraint from `--filter`.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter {
    key: String,
    value: String,
}

const FILTER_KEYS: [&str; 7] = ["repair", "pattern", "pa", "pb", "tw", "index", "id"];

impl std::str::FromStr for Filter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (key, value) = s
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
        let key = key.trim();
        if !FILTER_KEYS.contains(&key) {
            return Err(format!(
                "unknown filter key {key:?}; expected one of {}",
                FILTER_KEYS.join(", ")
            ));
        }
        Ok(Self {
            key: key.to_owned(),
            value: value.trim().to_owned(),
        })
    }
}

impl Filter {
    pub fn matches(&self, c: &ScenarioConfig) -> bool {
        if self.key == "repair" {
            return RepairMode::parse(&self.value).is_some_and(|r| r == c.repair);
        }
        let actual = match self.key.as_str() {
            "pattern" => c.pattern.name().to_owned(),
            "pa" => c.pa.to_string(),
            "pb" => c.pb.to_string(),
            "tw" => c.tw.to_string(),
            "index" => c.index.to_string(),
            _ => c.id(),
        };
        actual == self.value
    }
}
