//! Nonnegative integer edge labelings: run profiles and switching-flow
//! certificates, plus the flow document format shared with rational points.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, Instance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("malformed flow document: {0}")]
    Malformed(String),
    #[error("`{0}` is not an edge of the instance")]
    UnknownEdge(String),
    #[error("invalid value `{value}` for edge `{key}`")]
    InvalidValue { key: String, value: String },
}

/// Edge values keyed by edge. Missing edges carry 0; zero entries are never
/// stored, so equality ignores explicit zeros.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Flow {
    values: BTreeMap<Edge, BigUint>,
}

impl Flow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, edge: Edge) -> BigUint {
        self.values.get(&edge).cloned().unwrap_or_default()
    }

    pub fn value(&self, edge: Edge) -> Option<&BigUint> {
        self.values.get(&edge)
    }

    pub fn set(&mut self, edge: Edge, value: BigUint) {
        if value.is_zero() {
            self.values.remove(&edge);
        } else {
            self.values.insert(edge, value);
        }
    }

    pub fn with(mut self, edge: Edge, value: impl Into<BigUint>) -> Self {
        self.set(edge, value.into());
        self
    }

    /// Nonzero entries in edge order.
    pub fn iter(&self) -> impl Iterator<Item = (Edge, &BigUint)> {
        self.values.iter().map(|(e, v)| (*e, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    /// Σ over all edges.
    pub fn total(&self) -> BigUint {
        self.values.values().sum()
    }

    pub fn max_value(&self) -> BigUint {
        self.values.values().max().cloned().unwrap_or_default()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &Flow) -> bool {
        self.values
            .iter()
            .all(|(e, v)| other.value(*e).is_some_and(|w| v <= w))
    }

    /// Values in the instance's edge order, zeros included.
    pub fn to_vector(&self, instance: &Instance) -> Vec<BigUint> {
        instance.edges().iter().map(|&e| self.get(e)).collect()
    }

    pub fn from_vector(instance: &Instance, values: impl IntoIterator<Item = BigUint>) -> Self {
        let mut flow = Flow::new();
        for (&e, v) in instance.edges().iter().zip(values) {
            flow.set(e, v);
        }
        flow
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct EdgeValuesDoc {
    pub edges: IndexMap<String, serde_json::Value>,
}

/// Parses the `edges` object of a flow-shaped document, resolving keys and
/// handing each raw value to `parse`.
pub(crate) fn parse_edge_values<T>(
    instance: &Instance,
    text: &str,
    parse: impl Fn(&str) -> Option<T>,
) -> Result<Vec<(Edge, T)>, FlowError> {
    let doc: EdgeValuesDoc =
        serde_json::from_str(text).map_err(|e| FlowError::Malformed(e.to_string()))?;
    doc.edges
        .iter()
        .map(|(key, raw)| {
            let edge = instance
                .parse_edge_key(key)
                .ok_or_else(|| FlowError::UnknownEdge(key.clone()))?;
            let invalid = || FlowError::InvalidValue {
                key: key.clone(),
                value: raw.to_string(),
            };
            let value = match raw {
                serde_json::Value::String(s) => parse(s.trim()),
                serde_json::Value::Number(n) => parse(&n.to_string()),
                _ => None,
            }
            .ok_or_else(invalid)?;
            Ok((edge, value))
        })
        .collect()
}

/// Writes `{"edges": {...}}` listing every instance edge in order.
pub(crate) fn write_edge_values(
    instance: &Instance,
    render: impl Fn(Edge) -> String,
) -> String {
    let edges: IndexMap<String, serde_json::Value> = instance
        .edges()
        .iter()
        .map(|&e| (instance.edge_key(e), serde_json::Value::String(render(e))))
        .collect();
    let mut out = serde_json::to_string_pretty(&EdgeValuesDoc { edges })
        .expect("edge documents always serialize");
    out.push('\n');
    out
}

pub(crate) fn edge_values_json(
    instance: &Instance,
    render: impl Fn(Edge) -> String,
) -> serde_json::Value {
    let edges: serde_json::Map<String, serde_json::Value> = instance
        .edges()
        .iter()
        .map(|&e| (instance.edge_key(e), serde_json::Value::String(render(e))))
        .collect();
    serde_json::json!({ "edges": edges })
}

fn parse_natural(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses a flow document. Values are decimal strings (bare JSON integers
/// are accepted too); every key must be an edge of `instance`.
pub fn parse_flow(instance: &Instance, text: &str) -> Result<Flow, FlowError> {
    let mut flow = Flow::new();
    for (edge, value) in parse_edge_values(instance, text, parse_natural)? {
        flow.set(edge, value);
    }
    Ok(flow)
}

/// Serializes a flow over every edge of the instance, zeros included.
pub fn serialize_flow(instance: &Instance, flow: &Flow) -> String {
    write_edge_values(instance, |e| flow.get(e).to_string())
}

/// Dense per-edge counter that stays in machine words until a count
/// overflows 64 bits.
#[derive(Debug, Clone)]
pub(crate) struct EdgeCounters {
    low: Vec<u64>,
    // multiples of 2^64, allocated on first overflow
    high: Option<Vec<BigUint>>,
}

impl EdgeCounters {
    pub(crate) fn new(len: usize) -> Self {
        EdgeCounters {
            low: vec![0; len],
            high: None,
        }
    }

    #[inline]
    pub(crate) fn bump(&mut self, index: usize) {
        let (next, wrapped) = self.low[index].overflowing_add(1);
        self.low[index] = next;
        if wrapped {
            let len = self.low.len();
            let high = self.high.get_or_insert_with(|| vec![BigUint::zero(); len]);
            high[index] += 1u32;
        }
    }

    pub(crate) fn get(&self, index: usize) -> BigUint {
        let low = BigUint::from(self.low[index]);
        match &self.high {
            Some(high) => (&high[index] << 64u32) + low,
            None => low,
        }
    }

    pub(crate) fn into_flow(self, instance: &Instance) -> Flow {
        Flow::from_vector(instance, (0..self.low.len()).map(|i| self.get(i)))
    }
}

/// Step counter with the same word-then-bignum layout as [`EdgeCounters`].
#[derive(Debug, Clone, Default)]
pub(crate) struct StepCounter {
    low: u64,
    high: BigUint,
}

impl StepCounter {
    #[inline]
    pub(crate) fn bump(&mut self) {
        let (next, wrapped) = self.low.overflowing_add(1);
        self.low = next;
        if wrapped {
            self.high += 1u32;
        }
    }

    /// Count if it still fits in a word.
    pub(crate) fn as_u64(&self) -> Option<u64> {
        self.high.is_zero().then_some(self.low)
    }

    pub(crate) fn value(&self) -> BigUint {
        (&self.high << 64u32) + BigUint::from(self.low)
    }
}
