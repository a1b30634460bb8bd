use num_bigint::BigUint;

use super::{Decision, EngineError};
use crate::flow::EdgeCounters;
use crate::graph::{analyze, Instance, Slot, VertexId};

/// Largest state bound n·2ⁿ accepted by default (admits n ≤ 25).
pub const DEFAULT_STATE_CAP: u128 = 1 << 30;

#[derive(Debug, Clone, Copy)]
pub struct StateRepConfig {
    /// Refuse instances whose state bound n·2ⁿ exceeds this.
    pub state_cap: u128,
}

impl Default for StateRepConfig {
    fn default() -> Self {
        StateRepConfig {
            state_cap: DEFAULT_STATE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub decision: Decision,
    /// Transition applications spent before the outcome was known.
    pub transitions: u64,
    /// The n·2ⁿ bound on distinct states.
    pub state_bound: u64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct PackedState {
    current: u32,
    parity: u64,
}

struct Machine {
    next: Vec<[u32; 2]>,
    edge: Vec<[usize; 2]>,
}

impl Machine {
    #[inline]
    fn apply(&self, s: PackedState) -> (PackedState, usize) {
        let v = s.current as usize;
        let p = ((s.parity >> v) & 1) as usize;
        (
            PackedState {
                current: self.next[v][p],
                parity: s.parity ^ (1 << v),
            },
            self.edge[v][p],
        )
    }
}

/// Decides by detecting state repetition (Brent's method) on the map
/// (vertex, switch positions) → next state, with no dead-end analysis.
///
/// Since there are at most n·2ⁿ states, the run either terminates within that
/// many transitions or has provably repeated a state by then. For a cycling
/// run the dead end reported is the first one the run enters, found by
/// replaying the run once its fate is known; the replay never needs more
/// steps than the detection phase because every vertex on the cycle is dead.
pub fn oracle_decide_staterep(
    instance: &Instance,
    config: StateRepConfig,
) -> Result<OracleRun, EngineError> {
    let n = instance.vertex_count();
    let states = (n as u128).checked_shl(n as u32).filter(|_| n < 64);
    let bound = match states {
        Some(s) if s <= config.state_cap && s <= u64::MAX as u128 => s as u64,
        _ => {
            return Err(EngineError::StateSpaceTooLarge {
                states: (BigUint::from(n) << n).to_string(),
                cap: config.state_cap,
            })
        }
    };

    let machine = Machine {
        next: instance
            .vertices()
            .map(|v| [instance.even(v).0 as u32, instance.odd(v).0 as u32])
            .collect(),
        edge: instance
            .vertices()
            .map(|v| {
                [
                    instance.slot_edge_index(v, Slot::Even),
                    instance.slot_edge_index(v, Slot::Odd),
                ]
            })
            .collect(),
    };
    let destination = instance.destination().0 as u32;
    let start = PackedState {
        current: instance.origin().0 as u32,
        parity: 0,
    };

    let mut counters = EdgeCounters::new(instance.edge_count());
    let mut tortoise = start;
    let mut hare = start;
    let mut power: u64 = 1;
    let mut lambda: u64 = 0;
    let mut transitions: u64 = 0;
    loop {
        if hare.current == destination {
            return Ok(OracleRun {
                decision: Decision::Terminates {
                    steps: BigUint::from(transitions),
                    profile: counters.into_flow(instance),
                },
                transitions,
                state_bound: bound,
            });
        }
        if transitions >= bound {
            // bound + 1 non-destination states seen: one repeats
            break;
        }
        let (next, edge) = machine.apply(hare);
        counters.bump(edge);
        hare = next;
        transitions += 1;
        lambda += 1;
        if hare == tortoise {
            break;
        }
        if lambda == power {
            tortoise = hare;
            power *= 2;
            lambda = 0;
        }
    }

    // replay up to the first dead end
    let report = analyze(instance);
    let mut counters = EdgeCounters::new(instance.edge_count());
    let mut state = start;
    let mut steps: u64 = 0;
    while !report.is_dead(VertexId(state.current as usize)) {
        assert!(
            steps <= transitions,
            "cycling run did not enter a dead end within its detection prefix"
        );
        let (next, edge) = machine.apply(state);
        counters.bump(edge);
        state = next;
        steps += 1;
    }
    Ok(OracleRun {
        decision: Decision::Cycles {
            steps: BigUint::from(steps),
            dead_end: VertexId(state.current as usize),
            traversed: counters.into_flow(instance),
        },
        transitions,
        state_bound: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::decide;

    #[test]
    fn agrees_on_named_instances() {
        let direct =
            Instance::from_names(&["o", "d"], &[("o", "d", "d"), ("d", "d", "d")], "o", "d")
                .unwrap();
        let r = oracle_decide_staterep(&direct, StateRepConfig::default()).unwrap();
        assert_eq!(r.decision.summary(&direct), "YES steps=1");
        assert_eq!(r.decision, decide(&direct, None).unwrap());

        let trap = Instance::from_names(
            &["o", "t", "d"],
            &[("o", "t", "t"), ("t", "t", "t"), ("d", "d", "d")],
            "o",
            "d",
        )
        .unwrap();
        let r = oracle_decide_staterep(&trap, StateRepConfig::default()).unwrap();
        assert_eq!(r.decision.summary(&trap), "NO dead_end=o steps=0");
        assert!(r.transitions <= r.state_bound);
    }

    #[test]
    fn refuses_large_state_spaces() {
        let names: Vec<String> = (0..30).map(|i| format!("x{i}")).collect();
        let succ: Vec<(String, String, String)> = names
            .iter()
            .map(|v| (v.clone(), "x29".to_string(), "x29".to_string()))
            .collect();
        let inst = Instance::from_names(&names, &succ, "x0", "x29").unwrap();
        assert!(matches!(
            oracle_decide_staterep(&inst, StateRepConfig::default()),
            Err(EngineError::StateSpaceTooLarge { .. })
        ));
        let relaxed = StateRepConfig {
            state_cap: u64::MAX as u128,
        };
        assert!(oracle_decide_staterep(&inst, relaxed)
            .unwrap()
            .decision
            .terminates());
    }
}
