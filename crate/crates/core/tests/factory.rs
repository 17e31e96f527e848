use std::collections::{BTreeMap, HashMap, VecDeque};

use minifab::fab::{
    done_port, route_port, vars, GenerationPattern, LotType, MachineId, MachinePhase,
};
use minifab::factory::{
    enumerate_scenarios, generator_name, lot_configurations, run_scenario, stage_name,
    stage_transducer_path, BuildOptions, RepairMode, ScenarioConfig, BATCHER, BENCHMARK_ROWS,
    CASCADE_TRANSDUCER_PATH, DIFFUSION_DISPATCHER, IMPLANTATION_DISPATCHER, PRODUCT_LOT_SET,
    TEST_WAFER_LOT_SET,
};
use minifab::kernel::{EventTrace, RecordKind};

fn scenario(
    pa: u32,
    pb: u32,
    tw: u32,
    repair: RepairMode,
    pattern: GenerationPattern,
    stages: u32,
) -> ScenarioConfig {
    ScenarioConfig {
        index: 0,
        pa,
        pb,
        tw,
        repair,
        pattern,
        stages,
        horizon_minutes: 25_000,
        seed: 17,
    }
}

/// Latest scalar value of every (component, variable), sampled at the end of
/// each instant.
fn for_each_instant(
    trace: &EventTrace,
    mut check: impl FnMut(f64, &HashMap<(String, String), f64>),
) {
    let mut state = HashMap::new();
    let records = trace.records();
    for (i, r) in records.iter().enumerate() {
        if let Some(v) = r.value.as_scalar() {
            state.insert((r.component.to_string(), r.variable.clone()), v);
        }
        let last_in_instant = records.get(i + 1).is_none_or(|n| n.time != r.time);
        if last_in_instant {
            check(r.time.minutes(), &state);
        }
    }
}

fn holders(stage: u32) -> Vec<String> {
    let prefix = stage_name(stage);
    [BATCHER, DIFFUSION_DISPATCHER, IMPLANTATION_DISPATCHER]
        .into_iter()
        .chain(MachineId::ALL.iter().map(|m| m.name()))
        .map(|c| format!("{prefix}/{c}"))
        .collect()
}

fn get(state: &HashMap<(String, String), f64>, component: &str, variable: &str) -> f64 {
    state
        .get(&(component.to_owned(), variable.to_owned()))
        .copied()
        .unwrap_or(0.0)
}

fn assert_conserved(config: &ScenarioConfig) {
    let trace = run_scenario(config, &BuildOptions::default()).unwrap();
    let mut previous: BTreeMap<u32, f64> = BTreeMap::new();
    let mut violations = Vec::new();
    for_each_instant(&trace, |t, s| {
        let generated: f64 = LotType::ALL
            .iter()
            .map(|l| {
                get(
                    s,
                    &format!("{}/{}", stage_name(1), generator_name(*l)),
                    "lots_generated",
                )
            })
            .sum();
        let held: f64 = (1..=config.stages)
            .flat_map(holders)
            .map(|c| get(s, &c, "lots_held"))
            .sum();
        let cascade_done = get(s, CASCADE_TRANSDUCER_PATH, vars::CUMULATIVE_COMPLETED);
        if generated != held + cascade_done {
            violations.push(format!(
                "t={t}: generated {generated} != held {held} + done {cascade_done}"
            ));
        }
        for path in (1..=config.stages)
            .map(stage_transducer_path)
            .chain([CASCADE_TRANSDUCER_PATH.to_owned()])
        {
            let arrived = get(s, &path, vars::LOTS_GENERATED);
            let wip = get(s, &path, vars::WIP);
            let done = get(s, &path, vars::CUMULATIVE_COMPLETED);
            if arrived != wip + done {
                violations.push(format!(
                    "t={t}: {path} arrived {arrived} != wip {wip} + done {done}"
                ));
            }
        }
        for stage in 1..=config.stages {
            let done = get(s, &stage_transducer_path(stage), vars::CUMULATIVE_COMPLETED);
            let prev = previous.insert(stage, done).unwrap_or(0.0);
            if done < prev {
                violations.push(format!("t={t}: stage {stage} completions decreased"));
            }
            if stage > 1 {
                let upstream = get(
                    s,
                    &stage_transducer_path(stage - 1),
                    vars::CUMULATIVE_COMPLETED,
                );
                if done > upstream {
                    violations.push(format!("t={t}: stage {stage} ahead of stage {}", stage - 1));
                }
                let arrived = get(s, &stage_transducer_path(stage), vars::LOTS_GENERATED);
                if arrived != upstream {
                    violations.push(format!(
                        "t={t}: stage {stage} arrivals differ from upstream completions"
                    ));
                }
            }
        }
    });
    assert!(
        violations.is_empty(),
        "{}: {:?}",
        config.id(),
        &violations[..violations.len().min(5)]
    );
}

#[test]
fn lots_are_conserved_in_every_repair_mode() {
    for (repair, pattern) in BENCHMARK_ROWS {
        assert_conserved(&scenario(27, 18, 9, repair, pattern, 3));
    }
    assert_conserved(&scenario(
        90,
        90,
        27,
        RepairMode::Mtbf,
        GenerationPattern::Uniform,
        8,
    ));
}

#[test]
fn small_workload_completes_before_the_horizon() {
    let config = scenario(
        27,
        18,
        9,
        RepairMode::NoRepair,
        GenerationPattern::Uniform,
        8,
    );
    let trace = run_scenario(&config, &BuildOptions::default()).unwrap();
    let last = |v: &str| {
        trace
            .for_component(CASCADE_TRANSDUCER_PATH)
            .filter(|r| r.variable == v)
            .last()
            .unwrap()
            .value
            .as_scalar()
            .unwrap()
    };
    assert_eq!(last(vars::CUMULATIVE_COMPLETED), 54.0);
    assert_eq!(last(vars::THROUGHPUT), 54.0 / 25_000.0);
    assert_eq!(last(vars::WIP), 0.0);
}

#[test]
fn machine_phases_follow_the_cycle() {
    for (repair, pattern) in BENCHMARK_ROWS {
        let config = scenario(45, 45, 27, repair, pattern, 2);
        let trace = run_scenario(&config, &BuildOptions::default()).unwrap();
        for stage in 1..=2 {
            for m in MachineId::ALL {
                let path = format!("{}/{}", stage_name(stage), m.name());
                let phases: Vec<MachinePhase> = trace
                    .for_component(&path)
                    .filter(|r| r.variable == "phase")
                    .map(|r| MachinePhase::parse(&r.value.to_string()).unwrap())
                    .collect();
                assert_eq!(phases.first(), Some(&MachinePhase::Idle));
                for w in phases.windows(2) {
                    assert!(
                        w[0].may_follow(w[1]),
                        "{path} {repair}: {:?} -> {:?}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    }
}

/// Parses "batch=<id> step=<s>" records.
fn batch_step(value: &str) -> (u64, u8) {
    let mut it = value.split(' ');
    let id = it
        .next()
        .unwrap()
        .trim_start_matches("batch=")
        .parse()
        .unwrap();
    let step = it
        .next()
        .unwrap()
        .trim_start_matches("step=")
        .parse()
        .unwrap();
    (id, step)
}

#[test]
fn batches_visit_the_six_steps_in_order_on_the_right_machines() {
    let config = scenario(
        45,
        45,
        27,
        RepairMode::ProcessingSteps,
        GenerationPattern::Uniform,
        1,
    );
    let trace = run_scenario(&config, &BuildOptions::default()).unwrap();
    let mut visits: BTreeMap<u64, Vec<(u8, MachineId)>> = BTreeMap::new();
    for m in MachineId::ALL {
        let path = format!("{}/{}", stage_name(1), m.name());
        for r in trace
            .for_component(&path)
            .filter(|r| r.variable == "batch_start")
        {
            let (id, step) = batch_step(&r.value.to_string());
            visits.entry(id).or_default().push((step, m));
        }
    }
    assert!(!visits.is_empty() && visits.len() <= 39);
    let mut completed = 0;
    for (id, v) in &visits {
        let steps: Vec<u8> = v.iter().map(|s| s.0).collect();
        let mut sorted = steps.clone();
        sorted.sort_unstable();
        assert_eq!(steps.len(), sorted.len());
        assert_eq!(
            sorted,
            (1..=sorted.len() as u8).collect::<Vec<_>>(),
            "batch {id}"
        );
        for (step, m) in v {
            assert!(m.serves(*step), "batch {id} step {step} on {m:?}");
        }
        if sorted.len() == 6 {
            completed += 1;
        }
    }
    assert!(completed > 0);
}

/// (source component, port) pairs feeding each machine's input queue.
fn feeders(m: MachineId) -> Vec<(String, String)> {
    match m {
        MachineId::A | MachineId::B => vec![(DIFFUSION_DISPATCHER.into(), route_port(m))],
        MachineId::C | MachineId::D => vec![(IMPLANTATION_DISPATCHER.into(), route_port(m))],
        MachineId::E => vec![
            ("A".into(), done_port(5)),
            ("B".into(), done_port(5)),
            ("C".into(), done_port(2)),
            ("D".into(), done_port(2)),
        ],
    }
}

#[test]
fn machines_serve_batches_first_in_first_out() {
    let config = scenario(
        90,
        90,
        27,
        RepairMode::NoRepair,
        GenerationPattern::Uniform,
        1,
    );
    let trace = run_scenario(&config, &BuildOptions::default()).unwrap();
    let prefix = stage_name(1);
    let mut starts = 0;
    for m in MachineId::ALL {
        let sources: Vec<(String, String)> = feeders(m)
            .into_iter()
            .map(|(c, p)| (format!("{prefix}/{c}"), p))
            .collect();
        let path = format!("{prefix}/{}", m.name());
        let mut queue = VecDeque::new();
        let records = trace.records();
        let mut i = 0;
        while i < records.len() {
            let t = records[i].time;
            let end = records[i..]
                .iter()
                .position(|r| r.time != t)
                .map_or(records.len(), |k| i + k);
            let instant = &records[i..end];
            for r in instant {
                let fed = r.kind == RecordKind::Output
                    && sources
                        .iter()
                        .any(|(c, p)| *r.component == **c && r.variable == *p);
                if fed {
                    queue.push_back(batch_step(&r.value.to_string()));
                }
            }
            for r in instant
                .iter()
                .filter(|r| *r.component == *path && r.variable == "batch_start")
            {
                assert_eq!(
                    queue.pop_front(),
                    Some(batch_step(&r.value.to_string())),
                    "{path}"
                );
                starts += 1;
            }
            i = end;
        }
    }
    assert!(starts > 0);
}

#[test]
fn batches_keep_their_three_lots() {
    let config = scenario(
        27,
        18,
        9,
        RepairMode::NoRepair,
        GenerationPattern::Sinusoidal,
        1,
    );
    let trace = run_scenario(&config, &BuildOptions::default()).unwrap();
    let mut members: HashMap<String, String> = HashMap::new();
    for r in trace
        .records()
        .iter()
        .filter(|r| r.kind == RecordKind::Output && r.value.to_string().starts_with("batch="))
    {
        let text = r.value.to_string();
        let (head, lots) = text.split_once(" lots=").unwrap();
        let id = head.split(' ').next().unwrap().to_owned();
        assert_eq!(lots.split(',').count(), 3);
        let known = members.entry(id).or_insert_with(|| lots.to_owned());
        assert_eq!(known, lots);
    }
    assert!(!members.is_empty());
}

#[test]
fn transducers_do_not_change_the_factory() {
    for (repair, pattern) in BENCHMARK_ROWS {
        let config = scenario(30, 30, 12, repair, pattern, 2);
        let observed = run_scenario(&config, &BuildOptions::default()).unwrap();
        let options = BuildOptions {
            transducers: false,
            ..BuildOptions::default()
        };
        let bare = run_scenario(&config, &options).unwrap();
        let strip = |t: &EventTrace| {
            t.records()
                .iter()
                .filter(|r| !r.component.ends_with("transducer"))
                .cloned()
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&observed), strip(&bare), "{repair} {pattern:?}");
    }
}

#[test]
fn scenario_suite_has_four_rows_of_ninety_three() {
    let all = enumerate_scenarios();
    assert_eq!(all.len(), 372);
    for (repair, pattern) in BENCHMARK_ROWS {
        assert_eq!(
            all.iter()
                .filter(|s| s.repair == repair && s.pattern == pattern)
                .count(),
            93
        );
    }
    let configs = lot_configurations();
    assert_eq!(configs.len(), 93);
    for (pa, pb, tw) in configs {
        assert!(PRODUCT_LOT_SET.contains(&pa) && PRODUCT_LOT_SET.contains(&pb));
        assert!(TEST_WAFER_LOT_SET.contains(&tw));
    }
    for (i, s) in all.iter().enumerate() {
        assert_eq!(s.index, i);
        s.validate().unwrap();
    }
    let mut seeds: Vec<u64> = all.iter().map(|s| s.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 372);
}

#[test]
fn invalid_lot_counts_are_rejected() {
    let bad = scenario(
        15,
        36,
        9,
        RepairMode::NoRepair,
        GenerationPattern::Uniform,
        1,
    );
    assert!(run_scenario(&bad, &BuildOptions::default()).is_err());
    let bad = scenario(
        12,
        36,
        2,
        RepairMode::NoRepair,
        GenerationPattern::Uniform,
        1,
    );
    assert!(run_scenario(&bad, &BuildOptions::default()).is_err());
}
