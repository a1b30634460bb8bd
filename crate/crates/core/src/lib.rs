//! Train runs on switch graphs.
//!
//! A train starts at the origin and at every vertex leaves through the
//! switch's current successor, after which the switch flips. The crate
//! decides whether the train reaches the destination, produces and checks
//! certificates for either answer, and explores the rational relaxation of
//! the switching-flow constraints.

pub mod certificates;
pub mod cli;
pub mod engine;
pub mod flow;
pub mod generators;
pub mod graph;
pub mod relaxation;

pub use engine::{decide, Decision, Outcome};
pub use flow::Flow;
pub use graph::{Edge, Instance, VertexId};
