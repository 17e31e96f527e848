use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use super::bag::EventBag;
use super::time::VirtualTime;
use super::trace::{EventTraceRecord, RecordKind, TraceBuffer, TraceValue};
use super::SimError;

/// Message carried between components.
///
/// `describe` renders the payload for output records in the trace.
pub trait Payload: Clone + Send + 'static {
    fn describe(&self) -> String;
}

/// Error raised by a model transition.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ModelError(pub String);

impl ModelError {
    pub fn new(message: impl Into<String>) -> Self {
        ModelError(message.into())
    }
}

/// Handle given to transitions: the current instant and a way to record
/// state-change observations under the component's path.
pub struct Context<'a> {
    pub(crate) time: VirtualTime,
    pub(crate) path: &'a Arc<str>,
    pub(crate) trace: &'a mut TraceBuffer,
}

impl Context<'_> {
    pub fn now(&self) -> f64 {
        self.time.minutes()
    }

    pub fn path(&self) -> &str {
        self.path
    }

    pub fn record(&mut self, variable: &str, value: impl Into<TraceValue>) {
        self.trace.push(EventTraceRecord {
            time: self.time,
            component: Arc::clone(self.path),
            kind: RecordKind::StateChange,
            variable: variable.to_owned(),
            value: value.into(),
        });
    }
}

/// Behavior of an atomic Parallel DEVS model.
///
/// The simulator calls `output` only when the component is imminent, right
/// before its internal or confluent transition. `time_advance` returns the
/// minutes until the next internal event (`f64::INFINITY` when passive).
pub trait Atomic<M>: Send {
    fn input_ports(&self) -> Vec<String>;

    fn output_ports(&self) -> Vec<String>;

    /// Called once at time zero with the component's derived seed.
    fn initialize(&mut self, _seed: u64, _ctx: &mut Context<'_>) {}

    fn time_advance(&self) -> f64;

    fn output(&self) -> EventBag<M>;

    fn internal(&mut self, ctx: &mut Context<'_>) -> Result<(), ModelError>;

    fn external(
        &mut self,
        elapsed: f64,
        bag: &EventBag<M>,
        ctx: &mut Context<'_>,
    ) -> Result<(), ModelError>;

    /// Defaults to the internal transition followed by the external one with
    /// zero elapsed time.
    fn confluent(&mut self, bag: &EventBag<M>, ctx: &mut Context<'_>) -> Result<(), ModelError> {
        self.internal(ctx)?;
        self.external(0.0, bag, ctx)
    }
}

/// A `component.port` reference inside a coupled model.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    pub component: String,
    pub port: String,
}

impl Endpoint {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Self {
            component: component.into(),
            port: port.into(),
        }
    }
}

pub enum Component<M> {
    Atomic(Box<dyn Atomic<M>>),
    Coupled(CoupledSpec<M>),
}

impl<M> Component<M> {
    pub(crate) fn has_input(&self, port: &str) -> bool {
        match self {
            Component::Atomic(a) => a.input_ports().iter().any(|p| p == port),
            Component::Coupled(c) => c.input_ports.iter().any(|p| p == port),
        }
    }

    pub(crate) fn has_output(&self, port: &str) -> bool {
        match self {
            Component::Atomic(a) => a.output_ports().iter().any(|p| p == port),
            Component::Coupled(c) => c.output_ports.iter().any(|p| p == port),
        }
    }
}

/// Network of named components and the couplings between their ports.
///
/// Components are kept sorted by name, which fixes the traversal order of
/// the simulator.
pub struct CoupledSpec<M> {
    pub(crate) input_ports: Vec<String>,
    pub(crate) output_ports: Vec<String>,
    pub(crate) components: BTreeMap<String, Component<M>>,
    /// Own input port → child input port.
    pub(crate) eic: Vec<(String, Endpoint)>,
    /// Child output port → own output port.
    pub(crate) eoc: Vec<(Endpoint, String)>,
    /// Child output port → child input port.
    pub(crate) ic: Vec<(Endpoint, Endpoint)>,
}

impl<M> Default for CoupledSpec<M> {
    fn default() -> Self {
        Self {
            input_ports: Vec::new(),
            output_ports: Vec::new(),
            components: BTreeMap::new(),
            eic: Vec::new(),
            eoc: Vec::new(),
            ic: Vec::new(),
        }
    }
}

impl<M> CoupledSpec<M> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_input_port(&mut self, port: impl Into<String>) -> &mut Self {
        self.input_ports.push(port.into());
        self
    }

    pub fn add_output_port(&mut self, port: impl Into<String>) -> &mut Self {
        self.output_ports.push(port.into());
        self
    }

    pub fn add_atomic(
        &mut self,
        name: impl Into<String>,
        model: impl Atomic<M> + 'static,
    ) -> &mut Self {
        self.components
            .insert(name.into(), Component::Atomic(Box::new(model)));
        self
    }

    pub fn add_boxed(&mut self, name: impl Into<String>, model: Box<dyn Atomic<M>>) -> &mut Self {
        self.components
            .insert(name.into(), Component::Atomic(model));
        self
    }

    pub fn add_coupled(&mut self, name: impl Into<String>, model: CoupledSpec<M>) -> &mut Self {
        self.components
            .insert(name.into(), Component::Coupled(model));
        self
    }

    /// External input coupling: `self.port → component.target_port`.
    pub fn couple_input(
        &mut self,
        port: impl Into<String>,
        component: impl Into<String>,
        target_port: impl Into<String>,
    ) -> &mut Self {
        self.eic
            .push((port.into(), Endpoint::new(component, target_port)));
        self
    }

    /// External output coupling: `component.source_port → self.port`.
    pub fn couple_output(
        &mut self,
        component: impl Into<String>,
        source_port: impl Into<String>,
        port: impl Into<String>,
    ) -> &mut Self {
        self.eoc
            .push((Endpoint::new(component, source_port), port.into()));
        self
    }

    /// Internal coupling between two children.
    pub fn couple(
        &mut self,
        from: impl Into<String>,
        from_port: impl Into<String>,
        to: impl Into<String>,
        to_port: impl Into<String>,
    ) -> &mut Self {
        self.ic
            .push((Endpoint::new(from, from_port), Endpoint::new(to, to_port)));
        self
    }

    pub fn input_ports(&self) -> &[String] {
        &self.input_ports
    }

    pub fn output_ports(&self) -> &[String] {
        &self.output_ports
    }

    pub fn component_names(&self) -> impl Iterator<Item = &str> {
        self.components.keys().map(String::as_str)
    }

    pub fn component(&self, name: &str) -> Option<&Component<M>> {
        self.components.get(name)
    }

    pub fn internal_couplings(&self) -> &[(Endpoint, Endpoint)] {
        &self.ic
    }

    pub fn input_couplings(&self) -> &[(String, Endpoint)] {
        &self.eic
    }

    pub fn output_couplings(&self) -> &[(Endpoint, String)] {
        &self.eoc
    }

    /// Number of atomic models in the whole hierarchy.
    pub fn atomic_count(&self) -> usize {
        self.components
            .values()
            .map(|c| match c {
                Component::Atomic(_) => 1,
                Component::Coupled(inner) => inner.atomic_count(),
            })
            .sum()
    }

    /// Full paths of every atomic model, `/`-separated, in traversal order.
    pub fn atomic_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_paths("", &mut out);
        out
    }

    fn collect_paths(&self, prefix: &str, out: &mut Vec<String>) {
        for (name, c) in &self.components {
            let path = join_path(prefix, name);
            match c {
                Component::Atomic(_) => out.push(path),
                Component::Coupled(inner) => inner.collect_paths(&path, out),
            }
        }
    }

    /// Checks the structural rules of a well-formed network, recursively.
    pub fn validate(&self) -> Result<(), SimError> {
        self.validate_at("")
    }

    fn validate_at(&self, prefix: &str) -> Result<(), SimError> {
        let here = if prefix.is_empty() { "<root>" } else { prefix };
        let err = |msg: String| Err(SimError::Construction(format!("{here}: {msg}")));

        let own_in: HashSet<&str> = self.input_ports.iter().map(String::as_str).collect();
        let own_out: HashSet<&str> = self.output_ports.iter().map(String::as_str).collect();

        for name in self.components.keys() {
            if name.is_empty() {
                return err("empty component name".to_owned());
            }
        }
        if prefix.is_empty() {
            let paths = self.atomic_paths();
            let unique: HashSet<&String> = paths.iter().collect();
            if unique.len() != paths.len() {
                return err("atomic component paths are not unique".to_owned());
            }
        }

        let child = |ep: &Endpoint| self.components.get(&ep.component);

        for (port, target) in &self.eic {
            if !own_in.contains(port.as_str()) {
                return err(format!("input coupling from unknown port {port:?}"));
            }
            match child(target) {
                Some(c) if c.has_input(&target.port) => {}
                Some(_) => {
                    return err(format!(
                        "unknown input port {}.{}",
                        target.component, target.port
                    ))
                }
                None => return err(format!("unknown component {:?}", target.component)),
            }
        }
        for (source, port) in &self.eoc {
            if !own_out.contains(port.as_str()) {
                return err(format!("output coupling to unknown port {port:?}"));
            }
            match child(source) {
                Some(c) if c.has_output(&source.port) => {}
                Some(_) => {
                    return err(format!(
                        "unknown output port {}.{}",
                        source.component, source.port
                    ))
                }
                None => return err(format!("unknown component {:?}", source.component)),
            }
        }
        for (source, target) in &self.ic {
            if source.component == target.component {
                return err(format!("self-loop on component {:?}", source.component));
            }
            match child(source) {
                Some(c) if c.has_output(&source.port) => {}
                Some(_) => {
                    return err(format!(
                        "unknown output port {}.{}",
                        source.component, source.port
                    ))
                }
                None => return err(format!("unknown component {:?}", source.component)),
            }
            match child(target) {
                Some(c) if c.has_input(&target.port) => {}
                Some(_) => {
                    return err(format!(
                        "unknown input port {}.{}",
                        target.component, target.port
                    ))
                }
                None => return err(format!("unknown component {:?}", target.component)),
            }
        }

        // A child coupled model must forward whatever reaches it.
        let fed_inputs: BTreeSet<&Endpoint> = self
            .eic
            .iter()
            .map(|(_, t)| t)
            .chain(self.ic.iter().map(|(_, t)| t))
            .collect();
        for ep in fed_inputs {
            if let Some(Component::Coupled(inner)) = child(ep) {
                if !inner.eic.iter().any(|(p, _)| *p == ep.port) {
                    return err(format!(
                        "dangling coupling chain: {}.{} is fed but forwards nowhere",
                        ep.component, ep.port
                    ));
                }
            }
        }
        let used_outputs: BTreeSet<&Endpoint> = self
            .eoc
            .iter()
            .map(|(s, _)| s)
            .chain(self.ic.iter().map(|(s, _)| s))
            .collect();
        for ep in used_outputs {
            if let Some(Component::Coupled(inner)) = child(ep) {
                if !inner.eoc.iter().any(|(_, p)| *p == ep.port) {
                    return err(format!(
                        "dangling coupling chain: {}.{} is consumed but never produced",
                        ep.component, ep.port
                    ));
                }
            }
        }

        for (name, c) in &self.components {
            if let Component::Coupled(inner) = c {
                inner.validate_at(&join_path(prefix, name))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn join_path(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_owned()
    } else {
        format!("{prefix}/{name}")
    }
}
