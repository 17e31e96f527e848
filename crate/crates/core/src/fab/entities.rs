use std::fmt;

use serde::{Deserialize, Serialize};

use crate::kernel::Payload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LotType {
    Pa,
    Pb,
    Tw,
}

impl LotType {
    pub const ALL: [LotType; 3] = [LotType::Pa, LotType::Pb, LotType::Tw];

    /// Minutes between uniform releases: 8, 16 and 24 hours.
    pub fn release_period(self) -> f64 {
        match self {
            LotType::Pa => 480.0,
            LotType::Pb => 960.0,
            LotType::Tw => 1440.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LotType::Pa => "Pa",
            LotType::Pb => "Pb",
            LotType::Tw => "Tw",
        }
    }
}

impl fmt::Display for LotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MachineId {
    A,
    B,
    C,
    D,
    E,
}

impl MachineId {
    pub const ALL: [MachineId; 5] = [
        MachineId::A,
        MachineId::B,
        MachineId::C,
        MachineId::D,
        MachineId::E,
    ];

    /// Process steps this machine is qualified for.
    pub fn steps(self) -> [u8; 2] {
        match self {
            MachineId::A | MachineId::B => [1, 5],
            MachineId::C | MachineId::D => [2, 4],
            MachineId::E => [3, 6],
        }
    }

    pub fn serves(self, step: u8) -> bool {
        self.steps().contains(&step)
    }

    pub fn kind(self) -> MachineKind {
        match self {
            MachineId::A | MachineId::B => MachineKind::Diffusion,
            MachineId::C | MachineId::D => MachineKind::Implantation,
            MachineId::E => MachineKind::Lithography,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MachineId::A => "A",
            MachineId::B => "B",
            MachineId::C => "C",
            MachineId::D => "D",
            MachineId::E => "E",
        }
    }
}

impl fmt::Display for MachineId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MachineKind {
    Diffusion,
    Implantation,
    Lithography,
}

impl MachineKind {
    /// Machine type responsible for each of the six process steps.
    pub fn for_step(step: u8) -> Option<MachineKind> {
        match step {
            1 | 5 => Some(MachineKind::Diffusion),
            2 | 4 => Some(MachineKind::Implantation),
            3 | 6 => Some(MachineKind::Lithography),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaferLot {
    pub id: u64,
    pub lot_type: LotType,
    pub created_at: f64,
    pub stage_entered_at: f64,
    pub completed_at: Option<f64>,
    /// 0 until batched, then the step currently assigned (1..=6).
    pub current_step: u8,
}

impl WaferLot {
    pub fn new(id: u64, lot_type: LotType, created_at: f64) -> Self {
        Self {
            id,
            lot_type,
            created_at,
            stage_entered_at: created_at,
            completed_at: None,
            current_step: 0,
        }
    }

    pub fn turnaround(&self) -> Option<f64> {
        self.completed_at.map(|c| c - self.created_at)
    }
}

pub const BATCH_SIZE: usize = 3;

/// Three lots processed together; `step` is the next step to run (1..=6),
/// or 6 once the batch has left the last machine.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub id: u64,
    pub lots: [WaferLot; BATCH_SIZE],
    pub step: u8,
}

impl Batch {
    pub fn new(id: u64, mut lots: [WaferLot; BATCH_SIZE]) -> Self {
        for lot in &mut lots {
            lot.current_step = 1;
        }
        Self { id, lots, step: 1 }
    }

    pub(crate) fn set_step(&mut self, step: u8) {
        self.step = step;
        for lot in &mut self.lots {
            lot.current_step = step;
        }
    }
}

/// Messages exchanged inside the factory network.
#[derive(Debug, Clone, PartialEq)]
pub enum FabMessage {
    Lot(WaferLot),
    Batch(Batch),
    /// Pending batches (queued plus in service) at a machine.
    QueueStatus {
        machine: MachineId,
        pending: usize,
    },
}

impl FabMessage {
    /// Number of wafer lots carried.
    pub fn lot_count(&self) -> usize {
        match self {
            FabMessage::Lot(_) => 1,
            FabMessage::Batch(_) => BATCH_SIZE,
            FabMessage::QueueStatus { .. } => 0,
        }
    }

    pub fn lots(&self) -> &[WaferLot] {
        match self {
            FabMessage::Lot(l) => std::slice::from_ref(l),
            FabMessage::Batch(b) => &b.lots,
            FabMessage::QueueStatus { .. } => &[],
        }
    }
}

impl Payload for FabMessage {
    fn describe(&self) -> String {
        match self {
            FabMessage::Lot(l) => format!("lot={} type={}", l.id, l.lot_type),
            FabMessage::Batch(b) => format!(
                "batch={} step={} lots={},{},{}",
                b.id, b.step, b.lots[0].id, b.lots[1].id, b.lots[2].id
            ),
            FabMessage::QueueStatus { machine, pending } => {
                format!("machine={machine} pending={pending}")
            }
        }
    }
}
