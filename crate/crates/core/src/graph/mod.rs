//! Switch graphs: every vertex has an even and an odd successor, and a run
//! alternates between them starting with the even one.

mod analysis;
mod document;
mod dot;

pub use analysis::{analyze, DeadEndReport};
pub use document::{parse_instance, serialize_instance};
pub use dot::export_dot;

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a vertex in its instance's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A directed edge identified by its endpoints. Parallel successor slots
/// with the same head are the same edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Edge {
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Edge { tail, head }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

/// Which of a vertex's two successor slots an edge comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Even,
    Odd,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("instance has no vertices")]
    NoVertices,
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("missing {slot} successor for vertex `{vertex}`")]
    MissingSuccessor { vertex: String, slot: &'static str },
    #[error("unknown vertex `{vertex}` referenced by {context}")]
    UnknownVertex { vertex: String, context: String },
    #[error("origin equals destination (`{0}`)")]
    OriginEqualsDestination(String),
}

/// A switch graph together with its origin and destination.
///
/// Successor maps are total and refer to declared vertices; the origin and
/// destination differ. These invariants are established by [`Instance::new`]
/// and never change afterwards.
#[derive(Debug, Clone)]
pub struct Instance {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    even: Vec<VertexId>,
    odd: Vec<VertexId>,
    origin: VertexId,
    destination: VertexId,
    edges: Vec<Edge>,
    // position of the even-slot edge of each vertex in `edges`; the odd slot
    // follows it when the two successors differ
    edge_base: Vec<usize>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.even == other.even
            && self.odd == other.odd
            && self.origin == other.origin
            && self.destination == other.destination
    }
}

impl Eq for Instance {}

impl Instance {
    pub fn new(
        names: Vec<String>,
        even: Vec<VertexId>,
        odd: Vec<VertexId>,
        origin: VertexId,
        destination: VertexId,
    ) -> Result<Self, InstanceError> {
        if names.is_empty() {
            return Err(InstanceError::NoVertices);
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), VertexId(i)).is_some() {
                return Err(InstanceError::DuplicateVertex(name.clone()));
            }
        }
        let n = names.len();
        for (slot, succ) in [("even", &even), ("odd", &odd)] {
            if succ.len() < n {
                return Err(InstanceError::MissingSuccessor {
                    vertex: names[succ.len()].clone(),
                    slot,
                });
            }
            if succ.len() > n {
                return Err(InstanceError::Malformed(format!(
                    "{slot} successor list longer than vertex list"
                )));
            }
            for (v, w) in succ.iter().enumerate() {
                if w.0 >= n {
                    return Err(InstanceError::UnknownVertex {
                        vertex: format!("#{}", w.0),
                        context: format!("{slot} successor of `{}`", names[v]),
                    });
                }
            }
        }
        for (what, v) in [("origin", origin), ("destination", destination)] {
            if v.0 >= n {
                return Err(InstanceError::UnknownVertex {
                    vertex: format!("#{}", v.0),
                    context: what.to_string(),
                });
            }
        }
        if origin == destination {
            return Err(InstanceError::OriginEqualsDestination(
                names[origin.0].clone(),
            ));
        }

        let mut edges = Vec::with_capacity(2 * n);
        let mut edge_base = Vec::with_capacity(n);
        for v in 0..n {
            edge_base.push(edges.len());
            edges.push(Edge::new(VertexId(v), even[v]));
            if odd[v] != even[v] {
                edges.push(Edge::new(VertexId(v), odd[v]));
            }
        }

        Ok(Instance {
            names,
            index,
            even,
            odd,
            origin,
            destination,
            edges,
            edge_base,
        })
    }

    /// Builds an instance from vertex names, resolving successor names.
    pub fn from_names<S: AsRef<str>>(
        vertices: &[S],
        successors: &[(S, S, S)],
        origin: &str,
        destination: &str,
    ) -> Result<Self, InstanceError> {
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_string()).collect();
        let mut lookup = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if lookup.insert(name.as_str(), VertexId(i)).is_some() {
                return Err(InstanceError::DuplicateVertex(name.clone()));
            }
        }
        let resolve = |name: &str, context: &str| {
            lookup
                .get(name)
                .copied()
                .ok_or_else(|| InstanceError::UnknownVertex {
                    vertex: name.to_string(),
                    context: context.to_string(),
                })
        };
        let mut even: Vec<Option<VertexId>> = vec![None; names.len()];
        let mut odd: Vec<Option<VertexId>> = vec![None; names.len()];
        for (v, e, o) in successors {
            let v = v.as_ref();
            let vi = resolve(v, "successor table")?;
            even[vi.0] = Some(resolve(e.as_ref(), &format!("even successor of `{v}`"))?);
            odd[vi.0] = Some(resolve(o.as_ref(), &format!("odd successor of `{v}`"))?);
        }
        let collect = |slots: Vec<Option<VertexId>>, slot: &'static str| {
            slots
                .into_iter()
                .enumerate()
                .map(|(i, s)| {
                    s.ok_or_else(|| InstanceError::MissingSuccessor {
                        vertex: names[i].clone(),
                        slot,
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let even = collect(even, "even")?;
        let odd = collect(odd, "odd")?;
        let origin = resolve(origin, "origin")?;
        let destination = resolve(destination, "destination")?;
        Instance::new(names, even, odd, origin, destination)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn even(&self, v: VertexId) -> VertexId {
        self.even[v.0]
    }

    pub fn odd(&self, v: VertexId) -> VertexId {
        self.odd[v.0]
    }

    pub fn successor(&self, v: VertexId, slot: Slot) -> VertexId {
        match slot {
            Slot::Even => self.even(v),
            Slot::Odd => self.odd(v),
        }
    }

    /// True when the vertex's two successors differ, i.e. it is a real switch.
    pub fn is_switch(&self, v: VertexId) -> bool {
        self.even[v.0] != self.odd[v.0]
    }

    pub fn origin(&self) -> VertexId {
        self.origin
    }

    pub fn destination(&self) -> VertexId {
        self.destination
    }

    /// All edges in declaration order: per vertex the even edge, then the
    /// odd edge if it is distinct.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of `edge` in [`Instance::edges`], if it is an edge.
    pub fn edge_index(&self, edge: Edge) -> Option<usize> {
        let v = edge.tail.0;
        if v >= self.names.len() {
            return None;
        }
        if edge.head == self.even[v] {
            Some(self.edge_base[v])
        } else if edge.head == self.odd[v] {
            Some(self.edge_base[v] + 1)
        } else {
            None
        }
    }

    /// Edge index used by the given successor slot of `v`.
    pub fn slot_edge_index(&self, v: VertexId, slot: Slot) -> usize {
        match slot {
            Slot::Odd if self.is_switch(v) => self.edge_base[v.0] + 1,
            _ => self.edge_base[v.0],
        }
    }

    pub fn out_edges(&self, v: VertexId) -> &[Edge] {
        let start = self.edge_base[v.0];
        let len = if self.is_switch(v) { 2 } else { 1 };
        &self.edges[start..start + len]
    }

    pub fn contains_edge(&self, edge: Edge) -> bool {
        self.edge_index(edge).is_some()
    }

    /// Renders an edge as `tail->head`, the key format of flow documents.
    pub fn edge_key(&self, edge: Edge) -> String {
        format!("{}->{}", self.name(edge.tail), self.name(edge.head))
    }

    /// Resolves a `tail->head` key. Vertex names may themselves contain
    /// `->`, so every split point is tried.
    pub fn parse_edge_key(&self, key: &str) -> Option<Edge> {
        key.match_indices("->").find_map(|(at, _)| {
            let tail = self.vertex(&key[..at])?;
            let head = self.vertex(&key[at + 2..])?;
            let edge = Edge::new(tail, head);
            self.contains_edge(edge).then_some(edge)
        })
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "switch graph with {} vertices, {} edges, {} -> {}",
            self.vertex_count(),
            self.edge_count(),
            self.name(self.origin),
            self.name(self.destination)
        )
    }
}
