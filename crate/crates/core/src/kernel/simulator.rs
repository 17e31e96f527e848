//! Hierarchical Parallel DEVS simulator.
//!
//! Each coupled model is driven by a coordinator and each atomic model by a
//! simulator holding its `last`/`next` event times. One cycle at the global
//! next-event time `t` first collects outputs of every imminent atomic and
//! routes them through the couplings, then applies exactly one of the
//! internal, external or confluent transitions to every component that is
//! imminent or has input.
//!
//! Input bags are ordered by (source path, output index, port) before they
//! reach a model so the result does not depend on how the hierarchy routes
//! messages.

use std::collections::HashMap;
use std::sync::Arc;

use super::bag::EventBag;
use super::model::{join_path, Atomic, Component, Context, CoupledSpec, Payload};
use super::seed::derive_component_seed;
use super::time::VirtualTime;
use super::trace::{EventTrace, EventTraceRecord, RecordKind, TraceBuffer, TraceValue};
use super::SimError;

#[derive(Clone)]
struct Delivery<M> {
    source: Arc<str>,
    seq: u32,
    port: String,
    payload: M,
}

struct AtomicSim<M> {
    path: Arc<str>,
    model: Box<dyn Atomic<M>>,
    t_last: VirtualTime,
    t_next: VirtualTime,
    inbox: Vec<Delivery<M>>,
}

struct CoupledSim<M> {
    children: Vec<Node<M>>,
    ic: HashMap<(usize, String), Vec<(usize, String)>>,
    eoc: HashMap<(usize, String), Vec<String>>,
    eic: HashMap<String, Vec<(usize, String)>>,
    t_next: VirtualTime,
    has_input: bool,
}

enum Node<M> {
    Atomic(AtomicSim<M>),
    Coupled(CoupledSim<M>),
}

impl<M: Payload> Node<M> {
    fn build(component: Component<M>, path: String) -> Node<M> {
        match component {
            Component::Atomic(model) => Node::Atomic(AtomicSim {
                path: Arc::from(path),
                model,
                t_last: VirtualTime::ZERO,
                t_next: VirtualTime::INFINITY,
                inbox: Vec::new(),
            }),
            Component::Coupled(spec) => Node::Coupled(CoupledSim::build(spec, &path)),
        }
    }

    fn t_next(&self) -> VirtualTime {
        match self {
            Node::Atomic(a) => a.t_next,
            Node::Coupled(c) => c.t_next,
        }
    }

    fn has_input(&self) -> bool {
        match self {
            Node::Atomic(a) => !a.inbox.is_empty(),
            Node::Coupled(c) => c.has_input,
        }
    }

    fn initialize(&mut self, seed: u64, trace: &mut TraceBuffer) -> Result<(), SimError> {
        match self {
            Node::Atomic(a) => a.initialize(seed, trace),
            Node::Coupled(c) => {
                for child in &mut c.children {
                    child.initialize(seed, trace)?;
                }
                c.refresh_next();
                Ok(())
            }
        }
    }

    fn deliver(&mut self, port: &str, delivery: Delivery<M>) {
        match self {
            Node::Atomic(a) => a.inbox.push(Delivery {
                port: port.to_owned(),
                ..delivery
            }),
            Node::Coupled(c) => {
                if let Some(targets) = c.eic.get(port) {
                    c.has_input = true;
                    for (idx, target_port) in targets {
                        c.children[*idx].deliver(target_port, delivery.clone());
                    }
                }
            }
        }
    }

    fn collect(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Vec<Delivery<M>> {
        match self {
            Node::Atomic(a) => a.collect(t, trace),
            Node::Coupled(c) => c.collect(t, trace),
        }
    }

    fn transition(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Result<(), SimError> {
        match self {
            Node::Atomic(a) => a.transition(t, trace),
            Node::Coupled(c) => c.transition(t, trace),
        }
    }
}

impl<M: Payload> AtomicSim<M> {
    fn schedule(&mut self, t: VirtualTime) -> Result<(), SimError> {
        let ta = self.model.time_advance();
        if ta.is_nan() || ta < 0.0 {
            return Err(SimError::Model {
                path: self.path.to_string(),
                time: t.minutes(),
                message: format!("time advance {ta} is negative"),
            });
        }
        self.t_last = t;
        self.t_next = t + ta;
        Ok(())
    }

    fn initialize(&mut self, master_seed: u64, trace: &mut TraceBuffer) -> Result<(), SimError> {
        let seed = derive_component_seed(master_seed, &self.path);
        let mut ctx = Context {
            time: VirtualTime::ZERO,
            path: &self.path,
            trace,
        };
        self.model.initialize(seed, &mut ctx);
        self.schedule(VirtualTime::ZERO)
    }

    fn collect(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Vec<Delivery<M>> {
        if self.t_next != t {
            return Vec::new();
        }
        self.model
            .output()
            .into_entries()
            .into_iter()
            .enumerate()
            .map(|(seq, (port, payload))| {
                trace.push(EventTraceRecord {
                    time: t,
                    component: Arc::clone(&self.path),
                    kind: RecordKind::Output,
                    variable: port.clone(),
                    value: TraceValue::Text(payload.describe()),
                });
                Delivery {
                    source: Arc::clone(&self.path),
                    seq: seq as u32,
                    port,
                    payload,
                }
            })
            .collect()
    }

    fn transition(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Result<(), SimError> {
        let imminent = self.t_next == t;
        if !imminent && self.inbox.is_empty() {
            return Ok(());
        }
        let mut inbox = std::mem::take(&mut self.inbox);
        inbox.sort_by(|a, b| (&a.source, a.seq, &a.port).cmp(&(&b.source, b.seq, &b.port)));
        let bag: EventBag<M> = inbox.into_iter().map(|d| (d.port, d.payload)).collect();

        let mut ctx = Context {
            time: t,
            path: &self.path,
            trace,
        };
        let result = match (imminent, bag.is_empty()) {
            (true, true) => self.model.internal(&mut ctx),
            (true, false) => self.model.confluent(&bag, &mut ctx),
            (false, _) => {
                let elapsed = t - self.t_last;
                self.model.external(elapsed, &bag, &mut ctx)
            }
        };
        result.map_err(|e| SimError::Model {
            path: self.path.to_string(),
            time: t.minutes(),
            message: e.0,
        })?;
        self.schedule(t)
    }
}

impl<M: Payload> CoupledSim<M> {
    fn build(spec: CoupledSpec<M>, path: &str) -> Self {
        let index: HashMap<String, usize> = spec
            .components
            .keys()
            .enumerate()
            .map(|(i, name)| (name.clone(), i))
            .collect();

        let mut ic: HashMap<(usize, String), Vec<(usize, String)>> = HashMap::new();
        for (src, dst) in spec.ic {
            ic.entry((index[&src.component], src.port))
                .or_default()
                .push((index[&dst.component], dst.port));
        }
        let mut eoc: HashMap<(usize, String), Vec<String>> = HashMap::new();
        for (src, port) in spec.eoc {
            eoc.entry((index[&src.component], src.port))
                .or_default()
                .push(port);
        }
        let mut eic: HashMap<String, Vec<(usize, String)>> = HashMap::new();
        for (port, dst) in spec.eic {
            eic.entry(port)
                .or_default()
                .push((index[&dst.component], dst.port));
        }

        let children = spec
            .components
            .into_iter()
            .map(|(name, c)| {
                let child_path = join_path(path, &name);
                Node::build(c, child_path)
            })
            .collect();

        Self {
            children,
            ic,
            eoc,
            eic,
            t_next: VirtualTime::INFINITY,
            has_input: false,
        }
    }

    fn refresh_next(&mut self) {
        self.t_next = self
            .children
            .iter()
            .map(Node::t_next)
            .min()
            .unwrap_or(VirtualTime::INFINITY);
    }

    fn collect(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Vec<Delivery<M>> {
        let mut own_outputs = Vec::new();
        if self.t_next != t {
            return own_outputs;
        }
        for idx in 0..self.children.len() {
            if self.children[idx].t_next() != t {
                continue;
            }
            let outputs = self.children[idx].collect(t, trace);
            for delivery in outputs {
                let key = (idx, delivery.port.clone());
                if let Some(targets) = self.ic.get(&key) {
                    for (target, port) in targets {
                        self.children[*target].deliver(port, delivery.clone());
                    }
                }
                if let Some(ports) = self.eoc.get(&key) {
                    for port in ports {
                        own_outputs.push(Delivery {
                            port: port.clone(),
                            ..delivery.clone()
                        });
                    }
                }
            }
        }
        own_outputs
    }

    fn transition(&mut self, t: VirtualTime, trace: &mut TraceBuffer) -> Result<(), SimError> {
        if self.t_next != t && !self.has_input {
            return Ok(());
        }
        for child in &mut self.children {
            if child.t_next() == t || child.has_input() {
                child.transition(t, trace)?;
            }
        }
        self.has_input = false;
        self.refresh_next();
        Ok(())
    }
}

/// Runs `root` from time zero until the next event would fall after
/// `end_time`, returning every recorded observation.
///
/// The network is validated before any model code runs.
pub fn simulate<M: Payload>(
    root: CoupledSpec<M>,
    end_time: VirtualTime,
    seed: u64,
) -> Result<EventTrace, SimError> {
    if !end_time.is_finite() {
        return Err(SimError::Construction("end time must be finite".into()));
    }
    root.validate()?;

    let mut trace = TraceBuffer::default();
    let mut node = Node::Coupled(CoupledSim::build(root, ""));
    node.initialize(seed, &mut trace)?;

    loop {
        let t = node.t_next();
        if t > end_time {
            break;
        }
        // Outputs leaving the root have no receiver.
        let _ = node.collect(t, &mut trace);
        node.transition(t, &mut trace)?;
    }
    Ok(trace.finish())
}
