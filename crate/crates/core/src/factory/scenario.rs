use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fab::GenerationPattern;
use crate::kernel::derive_component_seed;

use super::BuildError;

/// Permitted Pa and Pb lot counts.
pub const PRODUCT_LOT_SET: [u32; 18] = [
    0, 2, 3, 6, 9, 12, 18, 24, 27, 30, 36, 45, 48, 54, 60, 72, 81, 90,
];

/// Permitted test-wafer lot counts.
pub const TEST_WAFER_LOT_SET: [u32; 9] = [0, 1, 3, 6, 9, 12, 15, 18, 27];

pub const BENCHMARK_STAGES: u32 = 8;
pub const BENCHMARK_HORIZON: u32 = 25_000;
pub const DEFAULT_MASTER_SEED: u64 = 20_240_501;

const LOT_CONFIGURATIONS: &str = include_str!("../../data/lot_configurations.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepairMode {
    ProcessingSteps,
    #[serde(rename = "MTBF")]
    Mtbf,
    NoRepair,
}

impl RepairMode {
    pub fn name(self) -> &'static str {
        match self {
            RepairMode::ProcessingSteps => "ProcessingSteps",
            RepairMode::Mtbf => "MTBF",
            RepairMode::NoRepair => "NoRepair",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ProcessingSteps" => Some(RepairMode::ProcessingSteps),
            "MTBF" | "Mtbf" => Some(RepairMode::Mtbf),
            "NoRepair" => Some(RepairMode::NoRepair),
            _ => None,
        }
    }
}

impl fmt::Display for RepairMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn parse_pattern(s: &str) -> Option<GenerationPattern> {
    match s {
        "Uniform" => Some(GenerationPattern::Uniform),
        "Sinusoidal" => Some(GenerationPattern::Sinusoidal),
        _ => None,
    }
}

/// The four repair/generation combinations of the benchmark suite.
pub const BENCHMARK_ROWS: [(RepairMode, GenerationPattern); 4] = [
    (RepairMode::ProcessingSteps, GenerationPattern::Uniform),
    (RepairMode::Mtbf, GenerationPattern::Uniform),
    (RepairMode::NoRepair, GenerationPattern::Uniform),
    (RepairMode::NoRepair, GenerationPattern::Sinusoidal),
];

/// One experiment definition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Position in the canonical enumeration; names the output directory.
    pub index: usize,
    pub pa: u32,
    pub pb: u32,
    pub tw: u32,
    pub repair: RepairMode,
    pub pattern: GenerationPattern,
    pub stages: u32,
    pub horizon_minutes: u32,
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn total_lots(&self) -> u32 {
        self.pa + self.pb + self.tw
    }

    pub fn id(&self) -> String {
        format!(
            "s{:03}_pa{}_pb{}_tw{}_{}_{}",
            self.index,
            self.pa,
            self.pb,
            self.tw,
            self.repair.name(),
            self.pattern.name()
        )
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let bad = |msg: String| Err(BuildError::InvalidScenario(format!("{}: {msg}", self.id())));
        if !PRODUCT_LOT_SET.contains(&self.pa) {
            return bad(format!("pa={} not in permitted set", self.pa));
        }
        if !PRODUCT_LOT_SET.contains(&self.pb) {
            return bad(format!("pb={} not in permitted set", self.pb));
        }
        if !TEST_WAFER_LOT_SET.contains(&self.tw) {
            return bad(format!("tw={} not in permitted set", self.tw));
        }
        if self.stages < 1 {
            return bad("stages must be at least 1".into());
        }
        if self.horizon_minutes < 1 {
            return bad("horizon must be positive".into());
        }
        Ok(())
    }

    /// Flat `key=value` description, one pair per line.
    pub fn to_meta(&self) -> String {
        format!(
            "id={}\nindex={}\npa={}\npb={}\ntw={}\nrepair={}\npattern={}\nstages={}\nhorizon_minutes={}\nseed={}\n",
            self.id(),
            self.index,
            self.pa,
            self.pb,
            self.tw,
            self.repair,
            self.pattern.name(),
            self.stages,
            self.horizon_minutes,
            self.seed
        )
    }

    pub fn from_meta(text: &str) -> Result<Self, BuildError> {
        let mut get = std::collections::HashMap::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line.split_once('=').ok_or_else(|| {
                BuildError::InvalidScenario(format!("malformed meta line {line:?}"))
            })?;
            get.insert(k.trim(), v.trim());
        }
        let field = |k: &str| {
            get.get(k)
                .copied()
                .ok_or_else(|| BuildError::InvalidScenario(format!("meta is missing {k}")))
        };
        let num = |k: &str| -> Result<u64, BuildError> {
            field(k)?
                .parse()
                .map_err(|_| BuildError::InvalidScenario(format!("meta field {k} is not a number")))
        };
        let repair = RepairMode::parse(field("repair")?)
            .ok_or_else(|| BuildError::InvalidScenario("unknown repair mode".into()))?;
        let pattern = parse_pattern(field("pattern")?)
            .ok_or_else(|| BuildError::InvalidScenario("unknown pattern".into()))?;
        Ok(Self {
            index: num("index")? as usize,
            pa: num("pa")? as u32,
            pb: num("pb")? as u32,
            tw: num("tw")? as u32,
            repair,
            pattern,
            stages: num("stages")? as u32,
            horizon_minutes: num("horizon_minutes")? as u32,
            seed: num("seed")?,
        })
    }
}

/// Parses `pa,pb,tw` lines; `#` starts a comment.
pub fn parse_lot_configurations(text: &str) -> Result<Vec<(u32, u32, u32)>, BuildError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<u32>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[pa, pb, tw]) => {
                if !PRODUCT_LOT_SET.contains(&pa)
                    || !PRODUCT_LOT_SET.contains(&pb)
                    || !TEST_WAFER_LOT_SET.contains(&tw)
                {
                    return Err(BuildError::InvalidScenario(format!(
                        "line {}: ({pa},{pb},{tw}) outside the permitted lot sets",
                        lineno + 1
                    )));
                }
                out.push((pa, pb, tw));
            }
            _ => {
                return Err(BuildError::InvalidScenario(format!(
                    "line {}: expected pa,pb,tw",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

/// The bundled canonical list of 93 lot configurations.
pub fn lot_configurations() -> Vec<(u32, u32, u32)> {
    parse_lot_configurations(LOT_CONFIGURATIONS).expect("bundled lot configurations are valid")
}

/// Per-scenario seed; depends only on the master seed and the scenario's
/// canonical index.
pub fn scenario_seed(master_seed: u64, index: usize) -> u64 {
    derive_component_seed(master_seed, &format!("scenario/{index}"))
}

/// The benchmark suite: every lot configuration under each of the four
/// repair/generation rows.
pub fn enumerate_scenarios() -> Vec<ScenarioConfig> {
    enumerate_scenarios_with(DEFAULT_MASTER_SEED, BENCHMARK_STAGES, BENCHMARK_HORIZON)
}

pub fn enumerate_scenarios_with(
    master_seed: u64,
    stages: u32,
    horizon_minutes: u32,
) -> Vec<ScenarioConfig> {
    let tuples = lot_configurations();
    let mut out = Vec::with_capacity(tuples.len() * BENCHMARK_ROWS.len());
    for (row, (repair, pattern)) in BENCHMARK_ROWS.iter().enumerate() {
        for (k, &(pa, pb, tw)) in tuples.iter().enumerate() {
            let index = row * tuples.len() + k;
            out.push(ScenarioConfig {
                index,
                pa,
                pb,
                tw,
                repair: *repair,
                pattern: *pattern,
                stages,
                horizon_minutes,
                seed: scenario_seed(master_seed, index),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn canonical_file_has_93_distinct_valid_tuples() {
        let tuples = lot_configurations();
        assert_eq!(tuples.len(), 93);
        let unique: HashSet<_> = tuples.iter().collect();
        assert_eq!(unique.len(), 93);
    }

    #[test]
    fn enumeration_shape() {
        let all = enumerate_scenarios();
        assert_eq!(all.len(), 372);
        for (repair, pattern) in BENCHMARK_ROWS {
            let n = all
                .iter()
                .filter(|s| s.repair == repair && s.pattern == pattern)
                .count();
            assert_eq!(n, 93);
        }
        for (i, s) in all.iter().enumerate() {
            assert_eq!(s.index, i);
            s.validate().unwrap();
        }
    }

    #[test]
    fn seeds_depend_on_index_only() {
        let a = enumerate_scenarios_with(5, 8, 25_000);
        let b = enumerate_scenarios_with(5, 2, 1000);
        assert!(a.iter().zip(&b).all(|(x, y)| x.seed == y.seed));
        let c = enumerate_scenarios_with(6, 8, 25_000);
        assert!(a.iter().zip(&c).all(|(x, y)| x.seed != y.seed));
    }

    #[test]
    fn meta_round_trip() {
        let s = enumerate_scenarios()[200].clone();
        assert_eq!(ScenarioConfig::from_meta(&s.to_meta()).unwrap(), s);
    }

    #[test]
    fn rejects_out_of_set_counts() {
        let mut s = enumerate_scenarios()[0].clone();
        s.pa = 10;
        assert!(s.validate().is_err());
        assert!(parse_lot_configurations("10,90,20\n").is_err());
        assert!(parse_lot_configurations("1,2\n").is_err());
        assert_eq!(
            parse_lot_configurations("# c\n\n9, 90, 18 # medium\n").unwrap(),
            vec![(9, 90, 18)]
        );
    }
}
