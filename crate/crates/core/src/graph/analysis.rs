use std::collections::{BTreeMap, VecDeque};

use super::{Edge, Instance, VertexId};

/// Dead ends and edge desperations, computed by breadth-first search from
/// the destination along reversed edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadEndReport {
    // shortest distance to the destination; None for dead ends
    distance: Vec<Option<u64>>,
    desperation: BTreeMap<Edge, u64>,
}

impl DeadEndReport {
    pub fn is_dead(&self, v: VertexId) -> bool {
        self.distance[v.0].is_none()
    }

    /// Dead ends in declaration order.
    pub fn dead(&self) -> Vec<VertexId> {
        (0..self.distance.len())
            .map(VertexId)
            .filter(|&v| self.is_dead(v))
            .collect()
    }

    /// Length of the shortest path from `v` to the destination.
    pub fn distance(&self, v: VertexId) -> Option<u64> {
        self.distance[v.0]
    }

    /// Desperation of a hopeful edge; `None` if the edge is dead.
    pub fn desperation(&self, edge: Edge) -> Option<u64> {
        self.desperation.get(&edge).copied()
    }

    /// All hopeful edges with their desperation, ordered by edge.
    pub fn desperations(&self) -> &BTreeMap<Edge, u64> {
        &self.desperation
    }

    pub fn is_dead_edge(&self, edge: Edge) -> bool {
        self.is_dead(edge.head)
    }
}

/// Classifies every vertex as dead or hopeful in O(|V| + |E|).
pub fn analyze(instance: &Instance) -> DeadEndReport {
    let n = instance.vertex_count();
    let mut reverse: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for edge in instance.edges() {
        reverse[edge.head.0].push(edge.tail);
    }

    let mut distance = vec![None; n];
    let mut queue = VecDeque::new();
    distance[instance.destination().0] = Some(0);
    queue.push_back(instance.destination());
    while let Some(w) = queue.pop_front() {
        let next = distance[w.0].expect("queued vertices have a distance") + 1;
        for &v in &reverse[w.0] {
            if distance[v.0].is_none() {
                distance[v.0] = Some(next);
                queue.push_back(v);
            }
        }
    }

    let desperation = instance
        .edges()
        .iter()
        .filter_map(|&e| distance[e.head.0].map(|k| (e, k)))
        .collect();

    DeadEndReport {
        distance,
        desperation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zig() -> Instance {
        Instance::from_names(
            &["o", "w", "u", "d"],
            &[
                ("o", "w", "w"),
                ("w", "u", "d"),
                ("u", "w", "w"),
                ("d", "d", "d"),
            ],
            "o",
            "d",
        )
        .unwrap()
    }

    #[test]
    fn trap_has_two_dead_ends() {
        let inst = Instance::from_names(
            &["o", "t", "d"],
            &[("o", "t", "t"), ("t", "t", "t"), ("d", "d", "d")],
            "o",
            "d",
        )
        .unwrap();
        let report = analyze(&inst);
        let names: Vec<_> = report.dead().into_iter().map(|v| inst.name(v)).collect();
        assert_eq!(names, ["o", "t"]);
        assert!(!report.is_dead(inst.destination()));
        assert_eq!(report.desperations().len(), 1);
    }

    #[test]
    fn zig_desperations() {
        let inst = zig();
        let report = analyze(&inst);
        assert!(report.dead().is_empty());
        let k = |t: &str, h: &str| {
            let e = Edge::new(inst.vertex(t).unwrap(), inst.vertex(h).unwrap());
            report.desperation(e)
        };
        assert_eq!(k("w", "d"), Some(0));
        assert_eq!(k("o", "w"), Some(1));
        assert_eq!(k("u", "w"), Some(1));
        assert_eq!(k("w", "u"), Some(2));
        assert_eq!(k("d", "d"), Some(0));
    }
}
