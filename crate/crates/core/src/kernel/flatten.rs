//! Collapses a hierarchical network into one level of atomic models.
//!
//! Atomic components keep their full hierarchical path as their name, so a
//! flattened network produces the same trace paths as the original.

use std::collections::HashMap;

use super::model::{join_path, Component, CoupledSpec, Endpoint};
use super::SimError;

/// Port reference in the global namespace of the hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum PortNode {
    AtomicIn(String, String),
    AtomicOut(String, String),
    CoupledIn(String, String),
    CoupledOut(String, String),
    RootIn(String),
    RootOut(String),
}

#[derive(Default)]
struct Graph {
    edges: HashMap<PortNode, Vec<PortNode>>,
    atomic_outputs: Vec<PortNode>,
}

impl Graph {
    fn add(&mut self, from: PortNode, to: PortNode) {
        self.edges.entry(from).or_default().push(to);
    }

    /// Atomic inputs and root outputs reachable from `start`, in coupling order.
    fn terminals(&self, start: &PortNode) -> Vec<PortNode> {
        let mut out = Vec::new();
        let mut stack = vec![start.clone()];
        while let Some(node) = stack.pop() {
            let Some(next) = self.edges.get(&node) else {
                continue;
            };
            for n in next.iter().rev() {
                match n {
                    PortNode::AtomicIn(..) | PortNode::RootOut(_) => out.push(n.clone()),
                    _ => stack.push(n.clone()),
                }
            }
        }
        out
    }
}

fn input_node<M>(c: &Component<M>, path: &str, port: &str) -> PortNode {
    match c {
        Component::Atomic(_) => PortNode::AtomicIn(path.to_owned(), port.to_owned()),
        Component::Coupled(_) => PortNode::CoupledIn(path.to_owned(), port.to_owned()),
    }
}

fn output_node<M>(c: &Component<M>, path: &str, port: &str) -> PortNode {
    match c {
        Component::Atomic(_) => PortNode::AtomicOut(path.to_owned(), port.to_owned()),
        Component::Coupled(_) => PortNode::CoupledOut(path.to_owned(), port.to_owned()),
    }
}

fn gather<M>(
    spec: CoupledSpec<M>,
    prefix: &str,
    graph: &mut Graph,
    atomics: &mut Vec<(String, Component<M>)>,
) {
    let own_in = |port: &str| {
        if prefix.is_empty() {
            PortNode::RootIn(port.to_owned())
        } else {
            PortNode::CoupledIn(prefix.to_owned(), port.to_owned())
        }
    };
    let own_out = |port: &str| {
        if prefix.is_empty() {
            PortNode::RootOut(port.to_owned())
        } else {
            PortNode::CoupledOut(prefix.to_owned(), port.to_owned())
        }
    };
    let child_path = |name: &str| join_path(prefix, name);

    for (port, dst) in &spec.eic {
        let c = &spec.components[&dst.component];
        graph.add(
            own_in(port),
            input_node(c, &child_path(&dst.component), &dst.port),
        );
    }
    for (src, port) in &spec.eoc {
        let c = &spec.components[&src.component];
        graph.add(
            output_node(c, &child_path(&src.component), &src.port),
            own_out(port),
        );
    }
    for (src, dst) in &spec.ic {
        let s = &spec.components[&src.component];
        let d = &spec.components[&dst.component];
        graph.add(
            output_node(s, &child_path(&src.component), &src.port),
            input_node(d, &child_path(&dst.component), &dst.port),
        );
    }

    for (name, c) in spec.components {
        let path = child_path(&name);
        match c {
            Component::Atomic(model) => {
                for port in model.output_ports() {
                    graph
                        .atomic_outputs
                        .push(PortNode::AtomicOut(path.clone(), port));
                }
                atomics.push((path, Component::Atomic(model)));
            }
            Component::Coupled(inner) => gather(inner, &path, graph, atomics),
        }
    }
}

/// Returns an equivalent single-level network of atomic models.
pub fn flatten<M>(root: CoupledSpec<M>) -> Result<CoupledSpec<M>, SimError> {
    root.validate()?;

    let input_ports = root.input_ports.clone();
    let output_ports = root.output_ports.clone();
    let mut graph = Graph::default();
    let mut atomics = Vec::new();
    gather(root, "", &mut graph, &mut atomics);

    let mut flat = CoupledSpec::new();
    flat.input_ports = input_ports.clone();
    flat.output_ports = output_ports;
    for (path, c) in atomics {
        flat.components.insert(path, c);
    }

    for port in &input_ports {
        for t in graph.terminals(&PortNode::RootIn(port.clone())) {
            if let PortNode::AtomicIn(path, p) = t {
                flat.eic.push((port.clone(), Endpoint::new(path, p)));
            }
        }
    }
    for source in &graph.atomic_outputs {
        let PortNode::AtomicOut(src_path, src_port) = source else {
            unreachable!()
        };
        for t in graph.terminals(source) {
            let from = Endpoint::new(src_path.clone(), src_port.clone());
            match t {
                PortNode::AtomicIn(path, p) => flat.ic.push((from, Endpoint::new(path, p))),
                PortNode::RootOut(p) => flat.eoc.push((from, p)),
                _ => unreachable!(),
            }
        }
    }

    flat.validate()?;
    Ok(flat)
}
