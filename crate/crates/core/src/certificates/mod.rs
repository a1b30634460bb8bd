//! Certificates for both answers.
//!
//! A YES answer is certified by a switching flow: a nonnegative integer
//! edge labeling that conserves one unit of flow from origin to destination
//! and splits each switch's outflow evenly, the even edge taking the extra
//! unit when the total is odd. A NO answer is certified by a switching flow
//! of the [`complement`] instance.

mod complement;
mod enumerate;
mod minimality;

pub use complement::complement;
pub use enumerate::{
    enumerate_switching_flows, enumerate_switching_flows_with_budget, DEFAULT_SEARCH_BUDGET,
};
pub use minimality::{check_minimality, Counterexample, MinimalityReport};

pub use crate::flow::Flow;

use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use thiserror::Error;

use crate::graph::Instance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertificateError {
    #[error("`{0}` is not an edge of the instance")]
    NonEdge(String),
    #[error("enumeration budget of {0} search nodes exceeded")]
    BudgetExceeded(u64),
    #[error("cap {0} is too large to enumerate")]
    CapTooLarge(u64),
    #[error("the run does not terminate, so there is no profile to compare against")]
    RunCycles,
    #[error("cap {cap} is below the largest profile entry {max}")]
    CapBelowProfile { cap: u64, max: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    Conservation,
    Balance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub vertex: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub valid: bool,
    pub violations: Vec<Violation>,
    /// Entries larger than n·2ⁿ. They never occur in run profiles but do
    /// not invalidate the certificate.
    pub warnings: Vec<String>,
}

impl Verdict {
    /// `VALID` or `INVALID`, followed by one line per violation and warning.
    pub fn render_text(&self) -> String {
        let mut out = String::from(if self.valid { "VALID\n" } else { "INVALID\n" });
        for v in &self.violations {
            let kind = match v.kind {
                ViolationKind::Conservation => "CONSERVATION",
                ViolationKind::Balance => "BALANCE",
            };
            out.push_str(&format!("{kind} at {}: {}\n", v.vertex, v.detail));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("verdicts serialize");
        out.push('\n');
        out
    }
}

/// Net outflow required at each vertex: +1 at the origin, −1 at the
/// destination, 0 elsewhere.
pub(crate) fn required_divergence(instance: &Instance, v: crate::graph::VertexId) -> i64 {
    if v == instance.origin() {
        1
    } else if v == instance.destination() {
        -1
    } else {
        0
    }
}

/// Checks flow conservation at every vertex and the balancing condition
/// `x(odd) ≤ x(even) ≤ x(odd) + 1` at every switch. A self-loop counts on
/// both sides of its vertex's balance.
///
/// Flows mentioning a non-edge are rejected as malformed input rather than
/// judged invalid.
pub fn verify_switching_flow(instance: &Instance, flow: &Flow) -> Result<Verdict, CertificateError> {
    if let Some((e, _)) = flow.iter().find(|(e, _)| !instance.contains_edge(*e)) {
        let name = |v: crate::graph::VertexId| {
            instance
                .names()
                .get(v.0)
                .cloned()
                .unwrap_or_else(|| format!("#{}", v.0))
        };
        return Err(CertificateError::NonEdge(format!(
            "{}->{}",
            name(e.tail),
            name(e.head)
        )));
    }

    let n = instance.vertex_count();
    let mut divergence = vec![BigInt::default(); n];
    for &e in instance.edges() {
        let x = BigInt::from(flow.get(e));
        divergence[e.tail.0] += &x;
        divergence[e.head.0] -= &x;
    }

    let mut violations = Vec::new();
    for v in instance.vertices() {
        let expected = BigInt::from(required_divergence(instance, v));
        if divergence[v.0] != expected {
            violations.push(Violation {
                kind: ViolationKind::Conservation,
                vertex: instance.name(v).to_string(),
                detail: format!("net outflow {}, expected {expected}", divergence[v.0]),
            });
        }
        if instance.is_switch(v) {
            let even = flow.get(crate::graph::Edge::new(v, instance.even(v)));
            let odd = flow.get(crate::graph::Edge::new(v, instance.odd(v)));
            if odd > even {
                violations.push(Violation {
                    kind: ViolationKind::Balance,
                    vertex: instance.name(v).to_string(),
                    detail: format!("odd edge carries {odd} > even edge {even}"),
                });
            } else if even > &odd + 1u32 {
                violations.push(Violation {
                    kind: ViolationKind::Balance,
                    vertex: instance.name(v).to_string(),
                    detail: format!("even edge carries {even} > odd edge {odd} + 1"),
                });
            }
        }
    }

    let bound = BigUint::from(n) << n;
    let warnings = instance
        .edges()
        .iter()
        .filter_map(|&e| {
            let x = flow.get(e);
            (x > bound).then(|| {
                format!(
                    "{} carries {x}, more than n·2^n = {bound}",
                    instance.edge_key(e)
                )
            })
        })
        .collect();

    Ok(Verdict {
        valid: violations.is_empty(),
        violations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_direct, gen_trap, gen_zigzag};
    use crate::graph::{Edge, VertexId};

    fn e(inst: &Instance, t: &str, h: &str) -> Edge {
        Edge::new(inst.vertex(t).unwrap(), inst.vertex(h).unwrap())
    }

    #[test]
    fn direct_unit_flow_is_valid() {
        let inst = gen_direct();
        let flow = Flow::new().with(e(&inst, "o", "d"), 1u32);
        let verdict = verify_switching_flow(&inst, &flow).unwrap();
        assert!(verdict.valid);
        assert_eq!(verdict.render_text(), "VALID\n");
    }

    #[test]
    fn zigzag_fake_flow_is_valid() {
        let inst = gen_zigzag();
        let fake = Flow::new()
            .with(e(&inst, "o", "w"), 1u32)
            .with(e(&inst, "w", "u"), 2u32)
            .with(e(&inst, "u", "w"), 2u32)
            .with(e(&inst, "w", "d"), 1u32);
        assert!(verify_switching_flow(&inst, &fake).unwrap().valid);
    }

    #[test]
    fn zigzag_odd_before_even_violates_balance_only() {
        let inst = gen_zigzag();
        let flow = Flow::new()
            .with(e(&inst, "o", "w"), 1u32)
            .with(e(&inst, "w", "d"), 1u32);
        let verdict = verify_switching_flow(&inst, &flow).unwrap();
        assert!(!verdict.valid);
        assert_eq!(
            verdict.violations,
            vec![Violation {
                kind: ViolationKind::Balance,
                vertex: "w".into(),
                detail: "odd edge carries 1 > even edge 0".into(),
            }]
        );
    }

    #[test]
    fn even_excess_beyond_one_violates_balance() {
        let inst = gen_zigzag();
        let flow = Flow::new()
            .with(e(&inst, "o", "w"), 1u32)
            .with(e(&inst, "w", "u"), 2u32)
            .with(e(&inst, "u", "w"), 3u32)
            .with(e(&inst, "w", "d"), 0u32);
        let verdict = verify_switching_flow(&inst, &flow).unwrap();
        assert!(verdict
            .violations
            .iter()
            .any(|v| v.kind == ViolationKind::Balance && v.detail.contains("+ 1")));
    }

    #[test]
    fn trap_rejects_unit_flows() {
        let inst = gen_trap();
        for x in 0u32..4 {
            for y in 0u32..4 {
                let flow = Flow::new()
                    .with(e(&inst, "o", "t"), x)
                    .with(e(&inst, "t", "t"), y);
                let verdict = verify_switching_flow(&inst, &flow).unwrap();
                assert!(!verdict.valid);
                assert!(verdict
                    .violations
                    .iter()
                    .all(|v| v.kind == ViolationKind::Conservation));
            }
        }
    }

    #[test]
    fn non_edges_are_input_errors() {
        let inst = gen_zigzag();
        let bogus = Flow::new().with(e(&inst, "o", "d"), 1u32);
        assert_eq!(
            verify_switching_flow(&inst, &bogus).unwrap_err(),
            CertificateError::NonEdge("o->d".into())
        );
        let out_of_range = Flow::new().with(Edge::new(VertexId(0), VertexId(99)), 1u32);
        assert!(verify_switching_flow(&inst, &out_of_range).is_err());
    }

    #[test]
    fn large_values_warn_but_stay_valid() {
        let inst = gen_direct();
        // a big circulation on the destination loop
        let flow = Flow::new()
            .with(e(&inst, "o", "d"), 1u32)
            .with(e(&inst, "d", "d"), 1000u32);
        let verdict = verify_switching_flow(&inst, &flow).unwrap();
        assert!(verdict.valid);
        assert_eq!(verdict.warnings.len(), 1);
        assert!(verdict.render_json().contains("\"valid\": true"));
    }
}
