//! Wires the atomic models into the single-stage factory and the cascade.

use crate::fab::{
    done_port, route_port, status_port, Batcher, Dispatcher, FabMessage, FabParameters, Generator,
    GeneratorConfig, LotType, Machine, MachineId, RepairPolicy, Transducer, BATCHER_IN,
    BATCHER_OUT, DISPATCHER_IN, GENERATOR_OUT, MACHINE_IN, MACHINE_STATUS, TRANSDUCER_ARRIVED,
    TRANSDUCER_COMPLETED,
};
use crate::kernel::CoupledSpec;

use super::scenario::{RepairMode, ScenarioConfig};
use super::BuildError;

pub const STAGE_IN: &str = "in";
pub const STAGE_OUT: &str = "out";
/// Stage-1 port echoing every released lot, for the cascade transducer.
pub const STAGE_RELEASES: &str = "releases";

pub const BATCHER: &str = "batcher";
pub const DIFFUSION_DISPATCHER: &str = "dispatch_diffusion";
pub const IMPLANTATION_DISPATCHER: &str = "dispatch_implantation";
pub const TRANSDUCER: &str = "transducer";

pub fn generator_name(lot_type: LotType) -> String {
    format!("gen_{lot_type}")
}

pub fn stage_name(stage: u32) -> String {
    format!("stage{stage}")
}

/// Path of the transducer observing `stage` inside a cascade.
pub fn stage_transducer_path(stage: u32) -> String {
    format!("{}/{TRANSDUCER}", stage_name(stage))
}

/// Path of the cascade-level transducer.
pub const CASCADE_TRANSDUCER_PATH: &str = TRANSDUCER;

#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub params: FabParameters,
    /// Observers can be left out to check they do not affect the factory.
    pub transducers: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            params: FabParameters::default(),
            transducers: true,
        }
    }
}

fn repair_policy(mode: RepairMode, params: &FabParameters) -> RepairPolicy {
    match mode {
        RepairMode::NoRepair => RepairPolicy::NoRepair,
        RepairMode::ProcessingSteps => RepairPolicy::AfterLots {
            count: params.repair.after_batches,
            duration: params.repair.after_batches_duration,
        },
        RepairMode::Mtbf => RepairPolicy::Mtbf {
            mean_time: params.repair.mtbf_mean,
            duration: params.repair.mtbf_duration,
        },
    }
}

const LOT_ID_STRIDE: u64 = 1_000_000;

/// One MiniFab stage.
///
/// Stage 1 owns the three lot generators; later stages receive lots on
/// their `in` port. Batches follow Diffusion(1) → Implantation(2) →
/// Lithography(3) → Implantation(4) → Diffusion(5) → Lithography(6) and
/// leave on `out`; the dispatchers choose the machine for steps 1/5 and 2/4.
pub fn build_single_stage(
    config: &ScenarioConfig,
    stage_index: u32,
    options: &BuildOptions,
) -> Result<CoupledSpec<FabMessage>, BuildError> {
    config.validate()?;
    if stage_index < 1 {
        return Err(BuildError::InvalidScenario(
            "stage index starts at 1".into(),
        ));
    }
    let params = &options.params;
    let repair = repair_policy(config.repair, params);
    let horizon = f64::from(config.horizon_minutes);

    let mut stage = CoupledSpec::new();
    stage.add_output_port(STAGE_OUT);

    if stage_index == 1 {
        stage.add_output_port(STAGE_RELEASES);
        let counts = [config.pa, config.pb, config.tw];
        for (i, (lot_type, total)) in LotType::ALL.into_iter().zip(counts).enumerate() {
            let name = generator_name(lot_type);
            let gen_cfg = GeneratorConfig::new(lot_type, total, config.pattern);
            stage.add_atomic(
                &name,
                Generator::new(gen_cfg, (i as u64 + 1) * LOT_ID_STRIDE),
            );
            stage.couple(&name, GENERATOR_OUT, BATCHER, BATCHER_IN);
            stage.couple_output(&name, GENERATOR_OUT, STAGE_RELEASES);
            if options.transducers {
                stage.couple(&name, GENERATOR_OUT, TRANSDUCER, TRANSDUCER_ARRIVED);
            }
        }
    } else {
        stage.add_input_port(STAGE_IN);
        stage.couple_input(STAGE_IN, BATCHER, BATCHER_IN);
        if options.transducers {
            stage.couple_input(STAGE_IN, TRANSDUCER, TRANSDUCER_ARRIVED);
        }
    }

    stage.add_atomic(
        BATCHER,
        Batcher::new(u64::from(stage_index) * LOT_ID_STRIDE),
    );
    stage.couple(BATCHER, BATCHER_OUT, DIFFUSION_DISPATCHER, DISPATCHER_IN);

    for (dispatcher, pair) in [
        (DIFFUSION_DISPATCHER, [MachineId::A, MachineId::B]),
        (IMPLANTATION_DISPATCHER, [MachineId::C, MachineId::D]),
    ] {
        stage.add_atomic(dispatcher, Dispatcher::new(pair));
        for m in pair {
            stage.couple(dispatcher, route_port(m), m.name(), MACHINE_IN);
            stage.couple(m.name(), MACHINE_STATUS, dispatcher, status_port(m));
        }
    }

    for m in MachineId::ALL {
        let cfg = params.machine_config(m, repair);
        cfg.validate()?;
        stage.add_atomic(m.name(), Machine::new(cfg));
    }

    // Feedforward and feedback routing between steps.
    for m in [MachineId::A, MachineId::B] {
        stage.couple(
            m.name(),
            done_port(1),
            IMPLANTATION_DISPATCHER,
            DISPATCHER_IN,
        );
        stage.couple(m.name(), done_port(5), MachineId::E.name(), MACHINE_IN);
    }
    for m in [MachineId::C, MachineId::D] {
        stage.couple(m.name(), done_port(2), MachineId::E.name(), MACHINE_IN);
        stage.couple(m.name(), done_port(4), DIFFUSION_DISPATCHER, DISPATCHER_IN);
    }
    stage.couple(
        MachineId::E.name(),
        done_port(3),
        IMPLANTATION_DISPATCHER,
        DISPATCHER_IN,
    );
    stage.couple_output(MachineId::E.name(), done_port(6), STAGE_OUT);

    if options.transducers {
        stage.add_atomic(TRANSDUCER, Transducer::new(horizon));
        stage.couple(
            MachineId::E.name(),
            done_port(6),
            TRANSDUCER,
            TRANSDUCER_COMPLETED,
        );
    }

    Ok(stage)
}

/// Linear chain of `config.stages` stages. Lots completed by stage `i`
/// enter stage `i + 1` and are batched again; a cascade-level transducer
/// observes releases into stage 1 and completions of the last stage.
pub fn build_cascade(
    config: &ScenarioConfig,
    options: &BuildOptions,
) -> Result<CoupledSpec<FabMessage>, BuildError> {
    config.validate()?;
    let mut root = CoupledSpec::new();
    root.add_output_port(STAGE_OUT);
    for i in 1..=config.stages {
        root.add_coupled(stage_name(i), build_single_stage(config, i, options)?);
        if i > 1 {
            root.couple(stage_name(i - 1), STAGE_OUT, stage_name(i), STAGE_IN);
        }
    }
    let last = stage_name(config.stages);
    root.couple_output(&last, STAGE_OUT, STAGE_OUT);
    if options.transducers {
        root.add_atomic(
            CASCADE_TRANSDUCER_PATH,
            Transducer::new(f64::from(config.horizon_minutes)),
        );
        root.couple(
            stage_name(1),
            STAGE_RELEASES,
            CASCADE_TRANSDUCER_PATH,
            TRANSDUCER_ARRIVED,
        );
        root.couple(
            &last,
            STAGE_OUT,
            CASCADE_TRANSDUCER_PATH,
            TRANSDUCER_COMPLETED,
        );
    }
    Ok(root)
}
