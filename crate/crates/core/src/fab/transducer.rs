use crate::kernel::{Atomic, Context, EventBag, ModelError};

use super::entities::FabMessage;

pub const TRANSDUCER_ARRIVED: &str = "arrived";
pub const TRANSDUCER_COMPLETED: &str = "completed";

/// Names of the variables a transducer records.
pub mod vars {
    pub const LOTS_GENERATED: &str = "lots_generated";
    pub const WIP: &str = "wip";
    pub const CUMULATIVE_COMPLETED: &str = "cumulative_completed";
    pub const THROUGHPUT: &str = "throughput";
    pub const TURNAROUND: &str = "turnaround";

    pub const ALL: [&str; 5] = [
        LOTS_GENERATED,
        WIP,
        CUMULATIVE_COMPLETED,
        THROUGHPUT,
        TURNAROUND,
    ];
}

/// Passive observer of lot arrivals and completions.
///
/// Records a variable whenever an observation changes it: arrivals update
/// `lots_generated` and `wip`; completions update `cumulative_completed`,
/// `throughput` (completed lots per elapsed minute), `turnaround` (mean
/// creation-to-completion time) and `wip`. At the horizon every variable is
/// recorded once more so the final values are evaluated at that instant.
/// It has no output ports.
pub struct Transducer {
    horizon: f64,
    arrived: u64,
    completed: u64,
    turnaround_sum: f64,
    now: f64,
    closed: bool,
}

impl Transducer {
    pub fn new(horizon: f64) -> Self {
        Self {
            horizon,
            arrived: 0,
            completed: 0,
            turnaround_sum: 0.0,
            now: 0.0,
            closed: false,
        }
    }

    pub fn throughput(&self) -> f64 {
        if self.now > 0.0 {
            self.completed as f64 / self.now
        } else {
            0.0
        }
    }

    pub fn turnaround(&self) -> f64 {
        if self.completed == 0 {
            0.0
        } else {
            self.turnaround_sum / self.completed as f64
        }
    }

    fn wip(&self) -> u64 {
        self.arrived - self.completed
    }

    fn record_all(&self, ctx: &mut Context<'_>) {
        ctx.record(vars::LOTS_GENERATED, self.arrived);
        ctx.record(vars::WIP, self.wip());
        ctx.record(vars::CUMULATIVE_COMPLETED, self.completed);
        ctx.record(vars::THROUGHPUT, self.throughput());
        ctx.record(vars::TURNAROUND, self.turnaround());
    }
}

impl Atomic<FabMessage> for Transducer {
    fn input_ports(&self) -> Vec<String> {
        vec![TRANSDUCER_ARRIVED.into(), TRANSDUCER_COMPLETED.into()]
    }

    fn output_ports(&self) -> Vec<String> {
        Vec::new()
    }

    fn initialize(&mut self, _seed: u64, ctx: &mut Context<'_>) {
        self.now = ctx.now();
        self.record_all(ctx);
    }

    fn time_advance(&self) -> f64 {
        if self.closed {
            f64::INFINITY
        } else {
            (self.horizon - self.now).max(0.0)
        }
    }

    fn output(&self) -> EventBag<FabMessage> {
        EventBag::new()
    }

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.now = ctx.now();
        self.closed = true;
        self.record_all(ctx);
        Ok(())
    }

    fn external(
        &mut self,
        _elapsed: f64,
        bag: &EventBag<FabMessage>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        self.now = ctx.now();
        let arrivals: usize = bag
            .on_port(TRANSDUCER_ARRIVED)
            .map(FabMessage::lot_count)
            .sum();
        let mut completions = 0;
        for msg in bag.on_port(TRANSDUCER_COMPLETED) {
            for lot in msg.lots() {
                completions += 1;
                self.turnaround_sum += lot.completed_at.unwrap_or(self.now) - lot.created_at;
            }
        }
        self.arrived += arrivals as u64;
        self.completed += completions;
        if arrivals > 0 {
            ctx.record(vars::LOTS_GENERATED, self.arrived);
        }
        if completions > 0 {
            ctx.record(vars::CUMULATIVE_COMPLETED, self.completed);
            ctx.record(vars::THROUGHPUT, self.throughput());
            ctx.record(vars::TURNAROUND, self.turnaround());
        }
        if arrivals > 0 || completions > 0 {
            ctx.record(vars::WIP, self.wip());
        }
        Ok(())
    }

    fn confluent(
        &mut self,
        bag: &EventBag<FabMessage>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        self.external(0.0, bag, ctx)?;
        self.internal(ctx)
    }
}
