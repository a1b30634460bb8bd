use crate::graph::{analyze, Instance, VertexId};

/// Builds the instance whose run terminates exactly when the original's
/// does not.
///
/// A new destination is appended (named after the old one with apostrophes
/// added until the name is fresh, and looping to itself). Every dead end of
/// the original is rewired so both successors lead to the new destination,
/// and the old destination loops to itself. All other successors are kept.
pub fn complement(instance: &Instance) -> Instance {
    let report = analyze(instance);
    let old = instance.destination();

    let mut fresh = format!("{}'", instance.name(old));
    while instance.vertex(&fresh).is_some() {
        fresh.push('\'');
    }
    let sink = VertexId(instance.vertex_count());

    let mut names = instance.names().to_vec();
    names.push(fresh);
    let mut even = Vec::with_capacity(names.len());
    let mut odd = Vec::with_capacity(names.len());
    for v in instance.vertices() {
        if report.is_dead(v) {
            even.push(sink);
            odd.push(sink);
        } else if v == old {
            even.push(old);
            odd.push(old);
        } else {
            even.push(instance.even(v));
            odd.push(instance.odd(v));
        }
    }
    even.push(sink);
    odd.push(sink);

    Instance::new(names, even, odd, instance.origin(), sink)
        .expect("complement of a valid instance is valid")
}
