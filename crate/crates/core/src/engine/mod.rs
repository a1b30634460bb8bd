//! Simulation of the train run and the two deciders built on it.
//!
//! [`decide`] cuts the run as soon as it enters a dead end: a run that
//! never terminates must eventually get stuck in the dead set, and one that
//! enters it can never leave. [`oracle_decide_staterep`] instead looks for a
//! repeated state and serves as an independent check.

mod oracle;

pub use oracle::{oracle_decide_staterep, OracleRun, StateRepConfig, DEFAULT_STATE_CAP};

use num_bigint::BigUint;
use thiserror::Error;

use crate::flow::{EdgeCounters, Flow, StepCounter};
use crate::graph::{analyze, Instance, Slot, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("cannot step from the destination `{0}`")]
    SteppedFromDestination(String),
    #[error("budget exhausted after {steps} steps")]
    BudgetExhausted { steps: u64 },
    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: String, cap: u128 },
}

/// Current vertex and, per vertex, which successor the next visit takes
/// (`false` = even, `true` = odd).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunState {
    pub current: VertexId,
    pub parity: Vec<bool>,
}

impl RunState {
    pub fn initial(instance: &Instance) -> Self {
        RunState {
            current: instance.origin(),
            parity: vec![false; instance.vertex_count()],
        }
    }

    pub fn next_slot(&self, v: VertexId) -> Slot {
        if self.parity[v.0] {
            Slot::Odd
        } else {
            Slot::Even
        }
    }
}

/// One iteration of the run: leave the current vertex through its next
/// successor and flip that vertex's switch.
pub fn step(instance: &Instance, state: &RunState) -> Result<RunState, EngineError> {
    let v = state.current;
    if v == instance.destination() {
        return Err(EngineError::SteppedFromDestination(
            instance.name(v).to_string(),
        ));
    }
    let mut next = state.clone();
    next.current = instance.successor(v, state.next_slot(v));
    next.parity[v.0] = !next.parity[v.0];
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Terminates,
    Cycles,
}

/// Result of deciding an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decision {
    /// The run reached the destination after `steps` traversals; `profile`
    /// counts traversals per edge.
    Terminates { steps: BigUint, profile: Flow },
    /// The run entered the dead end `dead_end` after `steps` traversals and
    /// will never reach the destination. `traversed` counts the traversals
    /// up to and including the entering step.
    Cycles {
        steps: BigUint,
        dead_end: VertexId,
        traversed: Flow,
    },
}

impl Decision {
    pub fn outcome(&self) -> Outcome {
        match self {
            Decision::Terminates { .. } => Outcome::Terminates,
            Decision::Cycles { .. } => Outcome::Cycles,
        }
    }

    pub fn terminates(&self) -> bool {
        self.outcome() == Outcome::Terminates
    }

    pub fn steps(&self) -> &BigUint {
        match self {
            Decision::Terminates { steps, .. } | Decision::Cycles { steps, .. } => steps,
        }
    }

    pub fn profile(&self) -> Option<&Flow> {
        match self {
            Decision::Terminates { profile, .. } => Some(profile),
            Decision::Cycles { .. } => None,
        }
    }

    pub fn dead_end(&self) -> Option<VertexId> {
        match self {
            Decision::Cycles { dead_end, .. } => Some(*dead_end),
            Decision::Terminates { .. } => None,
        }
    }

    /// Traversal counts of the simulated part of the run.
    pub fn traversals(&self) -> &Flow {
        match self {
            Decision::Terminates { profile, .. } => profile,
            Decision::Cycles { traversed, .. } => traversed,
        }
    }

    /// One-line summary, e.g. `YES steps=4` or `NO dead_end=t steps=2`.
    pub fn summary(&self, instance: &Instance) -> String {
        match self {
            Decision::Terminates { steps, .. } => format!("YES steps={steps}"),
            Decision::Cycles {
                steps, dead_end, ..
            } => format!("NO dead_end={} steps={steps}", instance.name(*dead_end)),
        }
    }
}

/// Successor and edge index per (vertex, parity), flattened for the hot loop.
struct Transitions {
    next: Vec<[usize; 2]>,
    edge: Vec<[usize; 2]>,
}

impl Transitions {
    fn new(instance: &Instance) -> Self {
        let next = instance
            .vertices()
            .map(|v| [instance.even(v).0, instance.odd(v).0])
            .collect();
        let edge = instance
            .vertices()
            .map(|v| {
                [
                    instance.slot_edge_index(v, Slot::Even),
                    instance.slot_edge_index(v, Slot::Odd),
                ]
            })
            .collect();
        Transitions { next, edge }
    }
}

enum Stop {
    Destination,
    DeadEnd(usize),
}

fn run(
    instance: &Instance,
    dead: Option<&[bool]>,
    max_steps: Option<u64>,
    mut on_visit: impl FnMut(VertexId),
) -> Result<Decision, EngineError> {
    let table = Transitions::new(instance);
    let destination = instance.destination().0;
    let mut parity = vec![0usize; instance.vertex_count()];
    let mut counters = EdgeCounters::new(instance.edge_count());
    let mut steps = StepCounter::default();
    let mut v = instance.origin().0;

    let stop = loop {
        on_visit(VertexId(v));
        if v == destination {
            break Stop::Destination;
        }
        if dead.is_some_and(|dead| dead[v]) {
            break Stop::DeadEnd(v);
        }
        if let Some(max) = max_steps {
            if steps.as_u64().is_some_and(|s| s >= max) {
                return Err(EngineError::BudgetExhausted { steps: max });
            }
        }
        let p = parity[v];
        parity[v] = p ^ 1;
        counters.bump(table.edge[v][p]);
        steps.bump();
        v = table.next[v][p];
    };

    let steps = steps.value();
    let counts = counters.into_flow(instance);
    Ok(match stop {
        Stop::Destination => Decision::Terminates {
            steps,
            profile: counts,
        },
        Stop::DeadEnd(w) => Decision::Cycles {
            steps,
            dead_end: VertexId(w),
            traversed: counts,
        },
    })
}

/// Decides whether the run from the origin reaches the destination.
///
/// Always halts without a budget. With `max_steps`, more than that many
/// traversals yield [`EngineError::BudgetExhausted`].
pub fn decide(instance: &Instance, max_steps: Option<u64>) -> Result<Decision, EngineError> {
    let report = analyze(instance);
    let dead: Vec<bool> = instance.vertices().map(|v| report.is_dead(v)).collect();
    run(instance, Some(&dead), max_steps, |_| {})
}

/// Raw simulation with no dead-end cut. A run that does not reach the
/// destination within `max_steps` traversals exhausts the budget.
pub fn simulate(instance: &Instance, max_steps: u64) -> Result<Decision, EngineError> {
    run(instance, None, Some(max_steps), |_| {})
}

/// [`simulate`] that reports every visited vertex, starting with the origin.
pub fn simulate_traced(
    instance: &Instance,
    max_steps: u64,
    on_visit: impl FnMut(VertexId),
) -> Result<Decision, EngineError> {
    run(instance, None, Some(max_steps), on_visit)
}
