use std::collections::VecDeque;

use crate::kernel::{Atomic, Context, EventBag, ModelError};

use super::entities::{Batch, FabMessage, WaferLot, BATCH_SIZE};

pub const BATCHER_IN: &str = "in";
pub const BATCHER_OUT: &str = "out";

/// Groups arriving lots, first come first served and regardless of type,
/// into batches of three and releases each batch at step 1 in the same
/// instant. Incoming batches (from an upstream stage) are dissolved into
/// their lots first.
pub struct Batcher {
    id_base: u64,
    formed: u64,
    queue: VecDeque<WaferLot>,
    ready: Vec<Batch>,
}

impl Batcher {
    pub fn new(id_base: u64) -> Self {
        Self {
            id_base,
            formed: 0,
            queue: VecDeque::new(),
            ready: Vec::new(),
        }
    }

    fn held(&self) -> usize {
        self.queue.len() + self.ready.len() * BATCH_SIZE
    }
}

impl Atomic<FabMessage> for Batcher {
    fn input_ports(&self) -> Vec<String> {
        vec![BATCHER_IN.into()]
    }

    fn output_ports(&self) -> Vec<String> {
        vec![BATCHER_OUT.into()]
    }

    fn initialize(&mut self, _seed: u64, ctx: &mut Context<'_>) {
        ctx.record("lots_held", 0usize);
    }

    fn time_advance(&self) -> f64 {
        if self.ready.is_empty() {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn output(&self) -> EventBag<FabMessage> {
        self.ready
            .iter()
            .map(|b| (BATCHER_OUT.to_owned(), FabMessage::Batch(b.clone())))
            .collect()
    }

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.ready.clear();
        ctx.record("lots_held", self.held());
        Ok(())
    }

    fn external(
        &mut self,
        _elapsed: f64,
        bag: &EventBag<FabMessage>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        let now = ctx.now();
        for msg in bag.on_port(BATCHER_IN) {
            match msg {
                FabMessage::Lot(_) | FabMessage::Batch(_) => {
                    for lot in msg.lots() {
                        let mut lot = lot.clone();
                        lot.stage_entered_at = now;
                        lot.completed_at = None;
                        lot.current_step = 0;
                        self.queue.push_back(lot);
                    }
                }
                FabMessage::QueueStatus { .. } => {
                    return Err(ModelError::new("batcher received a status message"))
                }
            }
        }
        while self.queue.len() >= BATCH_SIZE {
            let lots: [WaferLot; BATCH_SIZE] =
                std::array::from_fn(|_| self.queue.pop_front().expect("length checked"));
            let batch = Batch::new(self.id_base + self.formed, lots);
            self.formed += 1;
            ctx.record("batch_formed", batch.id);
            self.ready.push(batch);
        }
        ctx.record("lots_held", self.held());
        Ok(())
    }
}
