//! Exhaustive search for switching flows with bounded entries.
//!
//! The balancing condition pins a switch's split once its total outflow `T`
//! is known: the even edge carries ⌈T/2⌉ and the odd edge ⌊T/2⌋. So a
//! switching flow is the same thing as a vector of per-vertex outflows
//! satisfying one conservation equation per vertex, and the search runs over
//! those vectors with interval propagation and branching.

use num_bigint::BigUint;

use super::{required_divergence, CertificateError, Flow};
use crate::graph::{Instance, Slot};

/// Default number of search nodes before giving up.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

const MAX_CAP: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Share {
    All,
    Ceil,
    Floor,
}

impl Share {
    fn of(self, total: i64) -> i64 {
        match self {
            Share::All => total,
            Share::Ceil => (total + 1) / 2,
            Share::Floor => total / 2,
        }
    }

    /// Tightest totals whose share lies in `[lo, hi]`.
    fn preimage(self, lo: i64, hi: i64) -> (i64, i64) {
        match self {
            Share::All => (lo, hi),
            Share::Ceil => (2 * lo - 1, 2 * hi),
            Share::Floor => (2 * lo, 2 * hi + 1),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    sign: i64,
    var: usize,
    share: Share,
}

#[derive(Debug, Clone)]
struct Equation {
    terms: Vec<Term>,
    rhs: i64,
}

struct Search<'a> {
    equations: &'a [Equation],
    nodes: u64,
    budget: u64,
    solutions: Vec<Vec<i64>>,
}

type Domains = Vec<(i64, i64)>;

impl Search<'_> {
    fn term_range(t: &Term, dom: &Domains) -> (i64, i64) {
        let (lo, hi) = dom[t.var];
        let (a, b) = (t.share.of(lo), t.share.of(hi));
        if t.sign > 0 {
            (a, b)
        } else {
            (-b, -a)
        }
    }

    /// Bounds propagation to a fixpoint. False if some domain empties.
    fn propagate(&self, dom: &mut Domains) -> bool {
        let mut changed = true;
        while changed {
            changed = false;
            for eq in self.equations {
                let ranges: Vec<(i64, i64)> =
                    eq.terms.iter().map(|t| Self::term_range(t, dom)).collect();
                let min_sum: i64 = ranges.iter().map(|r| r.0).sum();
                let max_sum: i64 = ranges.iter().map(|r| r.1).sum();
                if min_sum > eq.rhs || max_sum < eq.rhs {
                    return false;
                }
                for (t, r) in eq.terms.iter().zip(&ranges) {
                    // value this term must take given the others' extremes
                    let lo = eq.rhs - (max_sum - r.1);
                    let hi = eq.rhs - (min_sum - r.0);
                    let (lo, hi) = if t.sign > 0 { (lo, hi) } else { (-hi, -lo) };
                    let (tlo, thi) = t.share.preimage(lo, hi);
                    let d = &mut dom[t.var];
                    if tlo > d.0 {
                        d.0 = tlo;
                        changed = true;
                    }
                    if thi < d.1 {
                        d.1 = thi;
                        changed = true;
                    }
                    if d.0 > d.1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn satisfied(&self, totals: &[i64]) -> bool {
        self.equations.iter().all(|eq| {
            eq.terms
                .iter()
                .map(|t| t.sign * t.share.of(totals[t.var]))
                .sum::<i64>()
                == eq.rhs
        })
    }

    fn explore(&mut self, mut dom: Domains) -> Result<(), CertificateError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(CertificateError::BudgetExceeded(self.budget));
        }
        if !self.propagate(&mut dom) {
            return Ok(());
        }
        let branch = dom
            .iter()
            .enumerate()
            .filter(|(_, d)| d.0 < d.1)
            .min_by_key(|(_, d)| d.1 - d.0)
            .map(|(i, _)| i);
        match branch {
            None => {
                let totals: Vec<i64> = dom.iter().map(|d| d.0).collect();
                if self.satisfied(&totals) {
                    self.solutions.push(totals);
                }
            }
            Some(var) => {
                let (lo, hi) = dom[var];
                for value in lo..=hi {
                    let mut next = dom.clone();
                    next[var] = (value, value);
                    self.explore(next)?;
                }
            }
        }
        Ok(())
    }
}

/// All switching flows of `instance` with every entry at most `cap`, ordered
/// lexicographically by their value vectors in edge order.
pub fn enumerate_switching_flows(instance: &Instance, cap: u64) -> Result<Vec<Flow>, CertificateError> {
    enumerate_switching_flows_with_budget(instance, cap, DEFAULT_SEARCH_BUDGET)
}

/// [`enumerate_switching_flows`] with an explicit search-node budget.
pub fn enumerate_switching_flows_with_budget(
    instance: &Instance,
    cap: u64,
    budget: u64,
) -> Result<Vec<Flow>, CertificateError> {
    // keeps every intermediate sum well inside i64
    if cap > MAX_CAP {
        return Err(CertificateError::CapTooLarge(cap));
    }
    let cap = cap as i64;
    let mut equations: Vec<Equation> = instance
        .vertices()
        .map(|v| Equation {
            terms: vec![Term {
                sign: 1,
                var: v.0,
                share: Share::All,
            }],
            rhs: required_divergence(instance, v),
        })
        .collect();
    for u in instance.vertices() {
        if instance.is_switch(u) {
            for (slot, share) in [(Slot::Even, Share::Ceil), (Slot::Odd, Share::Floor)] {
                equations[instance.successor(u, slot).0].terms.push(Term {
                    sign: -1,
                    var: u.0,
                    share,
                });
            }
        } else {
            equations[instance.even(u).0].terms.push(Term {
                sign: -1,
                var: u.0,
                share: Share::All,
            });
        }
    }

    let domains: Domains = instance
        .vertices()
        .map(|v| (0, if instance.is_switch(v) { 2 * cap } else { cap }))
        .collect();

    let mut search = Search {
        equations: &equations,
        nodes: 0,
        budget,
        solutions: Vec::new(),
    };
    search.explore(domains)?;

    let mut vectors: Vec<Vec<u64>> = search
        .solutions
        .iter()
        .map(|totals| {
            let mut values = vec![0u64; instance.edge_count()];
            for v in instance.vertices() {
                let t = totals[v.0];
                if instance.is_switch(v) {
                    values[instance.slot_edge_index(v, Slot::Even)] = Share::Ceil.of(t) as u64;
                    values[instance.slot_edge_index(v, Slot::Odd)] = Share::Floor.of(t) as u64;
                } else {
                    values[instance.slot_edge_index(v, Slot::Even)] = t as u64;
                }
            }
            values
        })
        .collect();
    vectors.sort();
    vectors.dedup();
    Ok(vectors
        .into_iter()
        .map(|v| Flow::from_vector(instance, v.into_iter().map(BigUint::from)))
        .collect())
}
