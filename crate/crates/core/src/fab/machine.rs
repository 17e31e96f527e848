//! Processing machine with load/process/unload/transport phases and repair.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::kernel::{component_rng, Atomic, Context, EventBag, ModelError};

use super::entities::{Batch, FabMessage, BATCH_SIZE};
use super::params::{MachineConfig, PhaseDurations, RepairPolicy};

pub const MACHINE_IN: &str = "in";
pub const MACHINE_STATUS: &str = "status";

/// Output port carrying batches that finished `step`.
pub fn done_port(step: u8) -> String {
    format!("done{step}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MachinePhase {
    Idle,
    Loading,
    Processing,
    Unloading,
    Transporting,
    Repair,
}

impl MachinePhase {
    pub fn name(self) -> &'static str {
        match self {
            MachinePhase::Idle => "Idle",
            MachinePhase::Loading => "Loading",
            MachinePhase::Processing => "Processing",
            MachinePhase::Unloading => "Unloading",
            MachinePhase::Transporting => "Transporting",
            MachinePhase::Repair => "Repair",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        [
            MachinePhase::Idle,
            MachinePhase::Loading,
            MachinePhase::Processing,
            MachinePhase::Unloading,
            MachinePhase::Transporting,
            MachinePhase::Repair,
        ]
        .into_iter()
        .find(|p| p.name() == name)
    }

    /// Phases that hold a batch and cannot be interrupted.
    pub fn is_working(self) -> bool {
        matches!(
            self,
            MachinePhase::Loading
                | MachinePhase::Processing
                | MachinePhase::Unloading
                | MachinePhase::Transporting
        )
    }

    /// Successors allowed by the machine's phase cycle. Idle may last zero
    /// time when work is already queued.
    pub fn may_follow(self, next: MachinePhase) -> bool {
        use MachinePhase::*;
        matches!(
            (self, next),
            (Idle, Loading)
                | (Idle, Repair)
                | (Loading, Processing)
                | (Processing, Unloading)
                | (Unloading, Transporting)
                | (Transporting, Idle)
                | (Transporting, Repair)
                | (Repair, Idle)
        )
    }
}

impl fmt::Display for MachinePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// FIFO single-server machine.
///
/// Queue-length changes are published on `status` in the same instant they
/// happen so dispatchers can balance load.
pub struct Machine {
    config: MachineConfig,
    rng: ChaCha8Rng,
    queue: VecDeque<Batch>,
    current: Option<Batch>,
    phase: MachinePhase,
    phase_end: f64,
    now: f64,
    batches_since_repair: u32,
    failure_at: f64,
    outbox: Vec<(String, Batch)>,
    status_dirty: bool,
}

impl Machine {
    pub fn new(config: MachineConfig) -> Self {
        Self {
            config,
            rng: component_rng(0),
            queue: VecDeque::new(),
            current: None,
            phase: MachinePhase::Idle,
            phase_end: f64::INFINITY,
            now: 0.0,
            batches_since_repair: 0,
            failure_at: f64::INFINITY,
            outbox: Vec::new(),
            status_dirty: false,
        }
    }

    pub fn config(&self) -> &MachineConfig {
        &self.config
    }

    fn pending(&self) -> usize {
        self.queue.len() + usize::from(self.current.is_some())
    }

    fn sample_duration(&mut self, nominal: f64) -> f64 {
        match self.config.jitter {
            Some(j) if j.amplitude > 0.0 => {
                nominal * (1.0 + self.rng.random_range(-j.amplitude..j.amplitude))
            }
            _ => nominal,
        }
    }

    fn sample_failure_clock(&mut self) {
        if let RepairPolicy::Mtbf { mean_time, .. } = self.config.repair {
            let exp = Exp::new(1.0 / mean_time).expect("validated mean");
            self.failure_at = self.now + exp.sample(&mut self.rng);
        }
    }

    fn durations(&self) -> PhaseDurations {
        let step = self
            .current
            .as_ref()
            .expect("working phase has a batch")
            .step;
        self.config.steps[&step]
    }

    fn enter(&mut self, phase: MachinePhase, minutes: f64, ctx: &mut Context<'_>) {
        self.phase = phase;
        self.phase_end = self.now + minutes;
        ctx.record("phase", phase.name());
    }

    fn start_loading(&mut self, ctx: &mut Context<'_>) {
        if let Some(batch) = self.queue.pop_front() {
            ctx.record(
                "batch_start",
                format!("batch={} step={}", batch.id, batch.step),
            );
            self.current = Some(batch);
            let load = self.sample_duration(self.durations().load);
            self.enter(MachinePhase::Loading, load, ctx);
        }
    }

    fn become_idle(&mut self, ctx: &mut Context<'_>) {
        self.phase = MachinePhase::Idle;
        self.phase_end = f64::INFINITY;
        ctx.record("phase", MachinePhase::Idle.name());
        self.start_loading(ctx);
    }

    fn enter_repair(&mut self, duration: f64, ctx: &mut Context<'_>) {
        self.batches_since_repair = 0;
        self.enter(MachinePhase::Repair, duration, ctx);
    }

    fn finish_batch(&mut self, ctx: &mut Context<'_>) {
        let mut batch = self.current.take().expect("transporting a batch");
        let step = batch.step;
        if step == 6 {
            for lot in &mut batch.lots {
                lot.completed_at = Some(self.now);
            }
        } else {
            batch.set_step(step + 1);
        }
        ctx.record("batch_done", format!("batch={} step={step}", batch.id));
        self.outbox.push((done_port(step), batch));
        self.status_dirty = true;
        self.batches_since_repair += 1;

        match self.config.repair {
            RepairPolicy::AfterLots { count, duration } if self.batches_since_repair >= count => {
                self.enter_repair(duration, ctx)
            }
            RepairPolicy::Mtbf { duration, .. } if self.now >= self.failure_at => {
                self.enter_repair(duration, ctx)
            }
            _ => self.become_idle(ctx),
        }
    }

    fn record_held(&self, ctx: &mut Context<'_>) {
        ctx.record("lots_held", self.pending() * BATCH_SIZE);
    }
}

impl Atomic<FabMessage> for Machine {
    fn input_ports(&self) -> Vec<String> {
        vec![MACHINE_IN.to_owned()]
    }

    fn output_ports(&self) -> Vec<String> {
        let mut ports: Vec<String> = self
            .config
            .machine
            .steps()
            .iter()
            .map(|&s| done_port(s))
            .collect();
        ports.push(MACHINE_STATUS.to_owned());
        ports
    }

    fn initialize(&mut self, seed: u64, ctx: &mut Context<'_>) {
        self.rng = component_rng(seed);
        self.now = ctx.now();
        self.sample_failure_clock();
        ctx.record("phase", MachinePhase::Idle.name());
        self.record_held(ctx);
    }

    fn time_advance(&self) -> f64 {
        if !self.outbox.is_empty() || self.status_dirty {
            return 0.0;
        }
        match self.phase {
            MachinePhase::Idle if self.failure_at.is_finite() => {
                (self.failure_at - self.now).max(0.0)
            }
            MachinePhase::Idle => f64::INFINITY,
            _ => (self.phase_end - self.now).max(0.0),
        }
    }

    fn output(&self) -> EventBag<FabMessage> {
        let mut bag: EventBag<FabMessage> = self
            .outbox
            .iter()
            .map(|(port, b)| (port.clone(), FabMessage::Batch(b.clone())))
            .collect();
        if self.status_dirty {
            bag.push(
                MACHINE_STATUS,
                FabMessage::QueueStatus {
                    machine: self.config.machine,
                    pending: self.pending(),
                },
            );
        }
        bag
    }

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.now = ctx.now();
        if !self.outbox.is_empty() || self.status_dirty {
            self.outbox.clear();
            self.status_dirty = false;
            return Ok(());
        }
        match self.phase {
            MachinePhase::Loading => {
                let d = self.sample_duration(self.durations().process);
                self.enter(MachinePhase::Processing, d, ctx);
            }
            MachinePhase::Processing => {
                let d = self.sample_duration(self.durations().unload);
                self.enter(MachinePhase::Unloading, d, ctx);
            }
            MachinePhase::Unloading => {
                let d = self.sample_duration(self.durations().transport);
                self.enter(MachinePhase::Transporting, d, ctx);
            }
            MachinePhase::Transporting => self.finish_batch(ctx),
            MachinePhase::Repair => {
                self.sample_failure_clock();
                self.become_idle(ctx);
            }
            MachinePhase::Idle => {
                // Failure clock expired while idle.
                if let RepairPolicy::Mtbf { duration, .. } = self.config.repair {
                    self.enter_repair(duration, ctx);
                }
            }
        }
        self.record_held(ctx);
        Ok(())
    }

    fn external(
        &mut self,
        elapsed: f64,
        bag: &EventBag<FabMessage>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        debug_assert!(elapsed >= 0.0);
        self.now = ctx.now();
        for msg in bag.on_port(MACHINE_IN) {
            let FabMessage::Batch(batch) = msg else {
                return Err(ModelError::new("machine accepts only batches"));
            };
            if !self.config.machine.serves(batch.step) {
                return Err(ModelError::new(format!(
                    "machine {} does not serve step {} (batch {})",
                    self.config.machine, batch.step, batch.id
                )));
            }
            self.queue.push_back(batch.clone());
            self.status_dirty = true;
        }
        if self.phase == MachinePhase::Idle {
            self.start_loading(ctx);
        }
        self.record_held(ctx);
        Ok(())
    }
}
