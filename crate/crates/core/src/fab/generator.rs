use crate::kernel::{Atomic, Context, EventBag, ModelError};

use super::entities::{FabMessage, WaferLot};
use super::params::{GenerationPattern, GeneratorConfig, SINUSOIDAL_CYCLE};

pub const GENERATOR_OUT: &str = "out";

/// Releases wafer lots of one type at `period`, `2·period`, … until the
/// configured total is reached, then stays passive.
///
/// Uniform releases one lot per period; sinusoidal releases 1, 2, 3, 2, 1, …
/// lots, truncating the last release at the total.
pub struct Generator {
    config: GeneratorConfig,
    id_base: u64,
    emitted: u32,
    releases: u32,
    now: f64,
}

impl Generator {
    /// `id_base` keeps lot ids unique across generators.
    pub fn new(config: GeneratorConfig, id_base: u64) -> Self {
        Self {
            config,
            id_base,
            emitted: 0,
            releases: 0,
            now: 0.0,
        }
    }

    fn next_release_size(&self) -> u32 {
        let remaining = self.config.total_lots - self.emitted;
        let size = match self.config.pattern {
            GenerationPattern::Uniform => 1,
            GenerationPattern::Sinusoidal => {
                SINUSOIDAL_CYCLE[self.releases as usize % SINUSOIDAL_CYCLE.len()]
            }
        };
        size.min(remaining)
    }

    fn next_release_time(&self) -> f64 {
        f64::from(self.releases + 1) * self.config.period
    }
}

impl Atomic<FabMessage> for Generator {
    fn input_ports(&self) -> Vec<String> {
        Vec::new()
    }

    fn output_ports(&self) -> Vec<String> {
        vec![GENERATOR_OUT.into()]
    }

    fn time_advance(&self) -> f64 {
        if self.emitted >= self.config.total_lots {
            f64::INFINITY
        } else {
            self.next_release_time() - self.now
        }
    }

    fn output(&self) -> EventBag<FabMessage> {
        let mut bag = EventBag::new();
        let at = self.next_release_time();
        for k in 0..self.next_release_size() {
            let id = self.id_base + u64::from(self.emitted + k);
            bag.push(
                GENERATOR_OUT,
                FabMessage::Lot(WaferLot::new(id, self.config.lot_type, at)),
            );
        }
        bag
    }

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.now = ctx.now();
        self.emitted += self.next_release_size();
        self.releases += 1;
        ctx.record("lots_generated", u64::from(self.emitted));
        Ok(())
    }

    fn external(
        &mut self,
        elapsed: f64,
        _bag: &EventBag<FabMessage>,
        _ctx: &mut Context<'_>,
    ) -> Result<(), ModelError> {
        self.now += elapsed;
        Ok(())
    }
}
