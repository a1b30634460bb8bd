//! Search for instances whose run cycles although the relaxed constraints
//! are feasible.
//!
//! Exhaustive mode walks canonical instances by increasing vertex count
//! `n`: vertices `x0..x{n-1}`, origin `x0`, destination `x{n-1}` looping to
//! itself (its successors never influence the run), and the successors of
//! `x0..x{n-2}` enumerated as base-`n` digits `even(x0), odd(x0), even(x1),
//! ...` with the last digit varying fastest.

use super::{build_constraints, feasible_with, format_rational, EliminationConfig, RationalPoint, RelaxError};
use crate::flow::edge_values_json;
use crate::engine::decide;
use crate::generators::gen_random;
use crate::graph::{analyze, serialize_instance, Instance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapMode {
    Exhaustive,
    /// For `n = 3..=max_vertices` in turn, `gen_random(n, seed + i)` for
    /// consecutive `i`, sharing the budget evenly.
    SeededRandom { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapWitness {
    pub instance: Instance,
    pub point: RationalPoint,
    /// Instances examined up to and including the witness.
    pub examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GapOutcome {
    Found(GapWitness),
    NotFound { examined: u64 },
}

fn canonical(n: usize, digits: &[usize]) -> Instance {
    let last = VertexId(n - 1);
    let mut even = Vec::with_capacity(n);
    let mut odd = Vec::with_capacity(n);
    for pair in digits.chunks(2) {
        even.push(VertexId(pair[0]));
        odd.push(VertexId(pair[1]));
    }
    even.push(last);
    odd.push(last);
    let names = (0..n).map(|i| format!("x{i}")).collect();
    Instance::new(names, even, odd, VertexId(0), last).expect("canonical instances are valid")
}

fn try_witness(instance: &Instance) -> Result<Option<RationalPoint>, RelaxError> {
    if decide(instance, None).expect("unbounded").terminates() {
        return Ok(None);
    }
    // any feasible point carries flow along some path from the origin to
    // the destination
    if analyze(instance).is_dead(instance.origin()) {
        return Ok(None);
    }
    let system = build_constraints(instance);
    let config = EliminationConfig {
        max_variables: system.variables.len(),
        ..Default::default()
    };
    Ok(feasible_with(&system, &config)?.witness().cloned())
}

/// Looks for an integrality-gap witness among instances with at most
/// `max_vertices` vertices, examining at most `budget` instances.
pub fn gap_search(max_vertices: usize, mode: GapMode, budget: u64) -> Result<GapOutcome, RelaxError> {
    if max_vertices > 12 {
        return Err(RelaxError::TooLarge(format!(
            "gap search over {max_vertices} vertices"
        )));
    }
    let mut examined = 0u64;
    match mode {
        GapMode::Exhaustive => {
            for n in 2..=max_vertices {
                let mut digits = vec![0usize; 2 * (n - 1)];
                loop {
                    if examined >= budget {
                        return Ok(GapOutcome::NotFound { examined });
                    }
                    examined += 1;
                    let instance = canonical(n, &digits);
                    if let Some(point) = try_witness(&instance)? {
                        return Ok(GapOutcome::Found(GapWitness {
                            instance,
                            point,
                            examined,
                        }));
                    }
                    // odometer increment
                    let mut i = digits.len();
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < n {
                            break;
                        }
                        digits[i] = 0;
                    }
                    if digits.iter().all(|&d| d == 0) {
                        break;
                    }
                }
            }
        }
        GapMode::SeededRandom { seed } => {
            let sizes = max_vertices.saturating_sub(2) as u64;
            if sizes == 0 {
                return Ok(GapOutcome::NotFound { examined });
            }
            let per_size = budget / sizes;
            for n in 3..=max_vertices {
                for i in 0..per_size {
                    examined += 1;
                    let instance = gen_random(n, seed.wrapping_add(i)).expect("n >= 3");
                    if let Some(point) = try_witness(&instance)? {
                        return Ok(GapOutcome::Found(GapWitness {
                            instance,
                            point,
                            examined,
                        }));
                    }
                }
            }
        }
    }
    Ok(GapOutcome::NotFound { examined })
}

/// Bundles a witness as `{"instance": ..., "point": {"edges": ...}}`.
pub fn witness_document(witness: &GapWitness) -> String {
    let instance: serde_json::Value =
        serde_json::from_str(&serialize_instance(&witness.instance)).expect("valid json");
    let point = edge_values_json(&witness.instance, |e| format_rational(&witness.point.get(e)));
    let mut out = serde_json::to_string_pretty(&serde_json::json!({
        "instance": instance,
        "point": point,
    }))
    .expect("witness documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relaxation::check_point;

    #[test]
    fn two_vertices_admit_no_witness() {
        assert_eq!(
            gap_search(2, GapMode::Exhaustive, u64::MAX).unwrap(),
            GapOutcome::NotFound { examined: 4 }
        );
    }

    #[test]
    fn canonical_enumeration_covers_every_assignment() {
        // n = 3: two free vertices, 3^4 assignments
        let outcome = gap_search(3, GapMode::Exhaustive, u64::MAX).unwrap();
        assert_eq!(outcome, GapOutcome::NotFound { examined: 4 + 81 });
    }

    #[test]
    fn dead_origin_is_infeasible() {
        for seed in 0..300 {
            let inst = gen_random(2 + (seed % 5) as usize, seed).unwrap();
            if analyze(&inst).is_dead(inst.origin()) {
                assert!(!crate::relaxation::feasible(&build_constraints(&inst)).unwrap().is_feasible());
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_not_found() {
        assert_eq!(
            gap_search(8, GapMode::Exhaustive, 10).unwrap(),
            GapOutcome::NotFound { examined: 10 }
        );
    }

    #[test]
    fn exhaustive_witness_verifies() {
        let GapOutcome::Found(w) = gap_search(8, GapMode::Exhaustive, u64::MAX).unwrap() else {
            panic!("no witness");
        };
        assert!(!decide(&w.instance, None).unwrap().terminates());
        let system = build_constraints(&w.instance);
        assert!(check_point(&system, &w.point).unwrap().feasible);
        assert!(!w.point.is_integral());
        let doc = witness_document(&w);
        assert!(doc.contains("\"instance\"") && doc.contains("\"point\""));
    }
}
