//! Machine, generator and repair configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::entities::{LotType, MachineId, MachineKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot parse parameters: {0}")]
    Parse(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

/// Durations, in minutes, of the four non-interruptible phases of a step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDurations {
    pub load: f64,
    pub process: f64,
    pub unload: f64,
    pub transport: f64,
}

impl PhaseDurations {
    pub fn new(load: f64, process: f64, unload: f64, transport: f64) -> Self {
        Self {
            load,
            process,
            unload,
            transport,
        }
    }

    pub fn total(&self) -> f64 {
        self.load + self.process + self.unload + self.transport
    }

    fn as_array(&self) -> [f64; 4] {
        [self.load, self.process, self.unload, self.transport]
    }
}

/// Multiplicative duration noise: each phase lasts `d * (1 + u)` with
/// `u ~ Uniform(-amplitude, amplitude)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jitter {
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RepairPolicy {
    NoRepair,
    /// Repair for `duration` minutes after every `count`-th completed batch.
    AfterLots {
        count: u32,
        duration: f64,
    },
    /// Exponential time between failures with mean `mean_time`, counted
    /// outside repair; the repair starts at the next batch boundary.
    Mtbf {
        mean_time: f64,
        duration: f64,
    },
}

impl RepairPolicy {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match *self {
            RepairPolicy::NoRepair => Ok(()),
            RepairPolicy::AfterLots { count, duration } => {
                if count < 1 {
                    return invalid("repair count must be at least 1");
                }
                if duration.is_nan() || duration <= 0.0 {
                    return invalid("repair duration must be positive");
                }
                Ok(())
            }
            RepairPolicy::Mtbf {
                mean_time,
                duration,
            } => {
                if mean_time.is_nan() || mean_time <= 0.0 {
                    return invalid("mean time between failures must be positive");
                }
                if duration.is_nan() || duration <= 0.0 {
                    return invalid("repair duration must be positive");
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MachineConfig {
    pub machine: MachineId,
    pub steps: BTreeMap<u8, PhaseDurations>,
    pub jitter: Option<Jitter>,
    pub repair: RepairPolicy,
}

impl MachineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let expected = self.machine.steps();
        let configured: Vec<u8> = self.steps.keys().copied().collect();
        if configured != expected {
            return invalid(format!(
                "machine {} must be configured for steps {:?}, got {:?}",
                self.machine, expected, configured
            ));
        }
        for (step, d) in &self.steps {
            if d.as_array().iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return invalid(format!(
                    "machine {} step {step}: durations must be positive",
                    self.machine
                ));
            }
        }
        if let Some(j) = self.jitter {
            if !(0.0..1.0).contains(&j.amplitude) {
                return invalid("jitter amplitude must lie in [0, 1)");
            }
        }
        self.repair.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GenerationPattern {
    Uniform,
    Sinusoidal,
}

impl GenerationPattern {
    pub fn name(self) -> &'static str {
        match self {
            GenerationPattern::Uniform => "Uniform",
            GenerationPattern::Sinusoidal => "Sinusoidal",
        }
    }
}

/// Release sizes of the sinusoidal pattern, repeated.
pub const SINUSOIDAL_CYCLE: [u32; 5] = [1, 2, 3, 2, 1];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub lot_type: LotType,
    pub period: f64,
    pub total_lots: u32,
    pub pattern: GenerationPattern,
}

impl GeneratorConfig {
    pub fn new(lot_type: LotType, total_lots: u32, pattern: GenerationPattern) -> Self {
        Self {
            lot_type,
            period: lot_type.release_period(),
            total_lots,
            pattern,
        }
    }
}

/// Timing of one process step in the parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepTiming {
    pub step: u8,
    #[serde(flatten)]
    pub durations: PhaseDurations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepairDefaults {
    /// Completed batches between repairs for the processing-steps policy.
    pub after_batches: u32,
    pub after_batches_duration: f64,
    pub mtbf_mean: f64,
    pub mtbf_duration: f64,
}

/// Factory-wide timing parameters shared by every machine of a kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FabParameters {
    pub timing: Vec<StepTiming>,
    /// 0 disables jitter.
    pub jitter_amplitude: f64,
    pub repair: RepairDefaults,
}

const DEFAULT_PARAMETERS: &str = include_str!("../../data/fab_defaults.toml");

impl Default for FabParameters {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_PARAMETERS).expect("bundled defaults are valid")
    }
}

impl FabParameters {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let params: FabParameters =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut steps: Vec<u8> = self.timing.iter().map(|t| t.step).collect();
        steps.sort_unstable();
        if steps != [1, 2, 3, 4, 5, 6] {
            return invalid(format!(
                "timing must cover steps 1..=6 exactly once, got {steps:?}"
            ));
        }
        if !(0.0..1.0).contains(&self.jitter_amplitude) {
            return invalid("jitter amplitude must lie in [0, 1)");
        }
        RepairPolicy::AfterLots {
            count: self.repair.after_batches,
            duration: self.repair.after_batches_duration,
        }
        .validate()?;
        RepairPolicy::Mtbf {
            mean_time: self.repair.mtbf_mean,
            duration: self.repair.mtbf_duration,
        }
        .validate()
    }

    pub fn durations(&self, step: u8) -> Option<PhaseDurations> {
        self.timing
            .iter()
            .find(|t| t.step == step)
            .map(|t| t.durations)
    }

    pub fn machine_config(&self, machine: MachineId, repair: RepairPolicy) -> MachineConfig {
        let steps = machine
            .steps()
            .iter()
            .map(|&s| (s, self.durations(s).expect("validated timing")))
            .collect();
        let jitter = (self.jitter_amplitude > 0.0).then_some(Jitter {
            amplitude: self.jitter_amplitude,
        });
        MachineConfig {
            machine,
            steps,
            jitter,
            repair,
        }
    }

    /// Raw processing time of the six steps, excluding queueing.
    pub fn route_minutes(&self) -> f64 {
        (1..=6)
            .filter_map(|s| self.durations(s))
            .map(|d| d.total())
            .sum()
    }

    pub fn kind_of_step(step: u8) -> Option<MachineKind> {
        MachineKind::for_step(step)
    }
}
