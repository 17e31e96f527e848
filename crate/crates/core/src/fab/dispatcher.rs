use crate::kernel::{Atomic, Context, EventBag, ModelError};

use super::entities::{Batch, FabMessage, MachineId, BATCH_SIZE};

pub const DISPATCHER_IN: &str = "in";

pub fn status_port(machine: MachineId) -> String {
    format!("status_{machine}")
}

pub fn route_port(machine: MachineId) -> String {
    format!("to_{machine}")
}

/// Zero-time coordinator in front of two machines of the same kind.
///
/// Each batch goes to the machine with fewer pending batches, ties to the
/// first target. The estimate is refreshed from machine status messages and
/// bumped locally for every assignment, so several batches arriving together
/// are spread over both machines.
pub struct Dispatcher {
    targets: [MachineId; 2],
    pending: [usize; 2],
    outbox: Vec<(MachineId, Batch)>,
}

impl Dispatcher {
    pub fn new(targets: [MachineId; 2]) -> Self {
        assert_eq!(
            targets[0].kind(),
            targets[1].kind(),
            "dispatcher targets must be machines of the same kind"
        );
        Self {
            targets,
            pending: [0, 0],
            outbox: Vec::new(),
        }
    }

    pub fn targets(&self) -> [MachineId; 2] {
        self.targets
    }

    fn held(&self) -> usize {
        self.outbox.len() * BATCH_SIZE
    }
}

impl Atomic<FabMessage> for Dispatcher {
    fn input_ports(&self) -> Vec<String> {
        let mut ports = vec![DISPATCHER_IN.to_owned()];
        ports.extend(self.targets.iter().map(|&m| status_port(m)));
        ports
    }

    fn output_ports(&self) -> Vec<String> {
        self.targets.iter().map(|&m| route_port(m)).collect()
    }

    fn initialize(&mut self, _seed: u64, ctx: &mut Context<'_>) {
        ctx.record("lots_held", 0usize);
    }

    fn time_advance(&self) -> f64 {
        if self.outbox.is_empty() {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn output(&self) -> EventBag<FabMessage> {
        self.outbox
            .iter()
            .map(|(m, b)| (route_port(*m), FabMessage::Batch(b.clone())))
            .collect()
    }

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.outbox.clear();
        ctx.record("lots_held", 0usize);
        Ok(())
    }

    fn external(
        &mut self,
        _elapsed: f64,
        bag: &EventBag<FabMessage>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        for (i, machine) in self.targets.iter().enumerate() {
            if let Some(FabMessage::QueueStatus { pending, .. }) =
                bag.on_port(&status_port(*machine)).last()
            {
                self.pending[i] = *pending;
            }
        }
        for msg in bag.on_port(DISPATCHER_IN) {
            let FabMessage::Batch(batch) = msg else {
                return Err(ModelError::new("dispatcher accepts only batches"));
            };
            let idx = if self.pending[1] < self.pending[0] {
                1
            } else {
                0
            };
            self.pending[idx] += 1;
            ctx.record(
                "dispatch",
                format!("batch={} to={}", batch.id, self.targets[idx]),
            );
            self.outbox.push((self.targets[idx], batch.clone()));
        }
        ctx.record("lots_held", self.held());
        Ok(())
    }
}
