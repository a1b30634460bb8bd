//! The switching-flow constraints over the rationals.
//!
//! Dropping integrality keeps every run profile feasible but admits
//! fractional points on some instances whose run never terminates; such
//! instances are found by [`gap_search`].

mod elimination;
mod gap;

pub use elimination::{feasible, feasible_with, EliminationConfig, Feasibility};
pub use gap::{gap_search, witness_document, GapMode, GapOutcome, GapWitness};

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::certificates::required_divergence;
use crate::flow::{parse_edge_values, write_edge_values, FlowError};
use crate::graph::{Edge, Instance, VertexId};
use crate::Flow;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelaxError {
    #[error("point assigns a value to `{0}`, which is not a variable of the system")]
    DimensionMismatch(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Document(#[from] FlowError),
}

/// What a constraint row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// Net outflow at the vertex.
    Conservation(VertexId),
    /// `x ≥ 0` for the single out-edge of a non-switch vertex.
    NonNegative(Edge),
    /// `x(odd) ≥ 0` at a switch.
    OddNonNegative(VertexId),
    /// `x(odd) ≤ x(even)` at a switch.
    OddAtMostEven(VertexId),
    /// `x(even) ≤ x(odd) + 1` at a switch.
    EvenAtMostOddPlusOne(VertexId),
}

impl ConstraintKind {
    pub fn describe(&self, instance: &Instance) -> String {
        match *self {
            ConstraintKind::Conservation(v) => format!("conservation at {}", instance.name(v)),
            ConstraintKind::NonNegative(e) => format!("{} >= 0", instance.edge_key(e)),
            ConstraintKind::OddNonNegative(v) => format!("odd edge of {} >= 0", instance.name(v)),
            ConstraintKind::OddAtMostEven(v) => {
                format!("odd <= even at {}", instance.name(v))
            }
            ConstraintKind::EvenAtMostOddPlusOne(v) => {
                format!("even <= odd + 1 at {}", instance.name(v))
            }
        }
    }
}

/// `coeffs · x = rhs` for equalities, `coeffs · x ≤ rhs` for inequalities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<BigRational>,
    pub rhs: BigRational,
    pub kind: ConstraintKind,
}

impl LinearConstraint {
    fn eval(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .filter(|(a, _)| !a.is_zero())
            .map(|(a, v)| a * v)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub variables: Vec<Edge>,
    pub equalities: Vec<LinearConstraint>,
    pub inequalities: Vec<LinearConstraint>,
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Conservation equality per vertex, the three-inequality balance block per
/// switch and nonnegativity for every other out-edge. Variables follow the
/// instance's edge order; a self-loop cancels out of its vertex's equality.
pub fn build_constraints(instance: &Instance) -> ConstraintSystem {
    let variables = instance.edges().to_vec();
    let m = variables.len();
    let zero_row = || vec![BigRational::zero(); m];

    let mut equalities: Vec<LinearConstraint> = instance
        .vertices()
        .map(|v| LinearConstraint {
            coeffs: zero_row(),
            rhs: int(required_divergence(instance, v)),
            kind: ConstraintKind::Conservation(v),
        })
        .collect();
    for (j, e) in variables.iter().enumerate() {
        equalities[e.tail.0].coeffs[j] += BigRational::one();
        equalities[e.head.0].coeffs[j] -= BigRational::one();
    }

    let mut inequalities = Vec::new();
    let row = |entries: &[(usize, i64)], rhs: i64, kind| {
        let mut coeffs = zero_row();
        for &(j, a) in entries {
            coeffs[j] = int(a);
        }
        LinearConstraint {
            coeffs,
            rhs: int(rhs),
            kind,
        }
    };
    for v in instance.vertices() {
        let out = instance.out_edges(v);
        let first = instance.edge_index(out[0]).expect("own edge");
        if instance.is_switch(v) {
            let (even, odd) = (first, first + 1);
            inequalities.push(row(&[(odd, -1)], 0, ConstraintKind::OddNonNegative(v)));
            inequalities.push(row(&[(odd, 1), (even, -1)], 0, ConstraintKind::OddAtMostEven(v)));
            inequalities.push(row(
                &[(even, 1), (odd, -1)],
                1,
                ConstraintKind::EvenAtMostOddPlusOne(v),
            ));
        } else {
            inequalities.push(row(&[(first, -1)], 0, ConstraintKind::NonNegative(out[0])));
        }
    }

    ConstraintSystem {
        variables,
        equalities,
        inequalities,
    }
}

/// Exact rational value per edge; missing edges are 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalPoint {
    values: BTreeMap<Edge, BigRational>,
}

impl RationalPoint {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, edge: Edge) -> BigRational {
        self.values.get(&edge).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, edge: Edge, value: BigRational) {
        if value.is_zero() {
            self.values.remove(&edge);
        } else {
            self.values.insert(edge, value);
        }
    }

    pub fn with(mut self, edge: Edge, value: BigRational) -> Self {
        self.set(edge, value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, &BigRational)> {
        self.values.iter().map(|(e, v)| (*e, v))
    }

    pub fn from_flow(flow: &Flow) -> Self {
        let mut point = RationalPoint::new();
        for (e, v) in flow.iter() {
            point.set(e, BigRational::from_integer(BigInt::from(v.clone())));
        }
        point
    }

    /// Σ over all edges.
    pub fn total(&self) -> BigRational {
        self.values.values().sum()
    }

    /// True when every value is an integer.
    pub fn is_integral(&self) -> bool {
        self.values.values().all(|v| v.is_integer())
    }

    fn dense(&self, system: &ConstraintSystem) -> Result<Vec<BigRational>, RelaxError> {
        let index: BTreeMap<Edge, usize> = system
            .variables
            .iter()
            .enumerate()
            .map(|(j, e)| (*e, j))
            .collect();
        let mut x = vec![BigRational::zero(); system.variables.len()];
        for (e, v) in &self.values {
            let j = index
                .get(e)
                .ok_or_else(|| RelaxError::DimensionMismatch(format!("#{}->#{}", e.tail.0, e.head.0)))?;
            x[*j] = v.clone();
        }
        Ok(x)
    }
}

/// Renders `num/den`, or just `num` for integers.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `num/den` or an integer into canonical reduced form.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let digits = |t: &str, signed: bool| {
        let body = if signed { t.strip_prefix('-').unwrap_or(t) } else { t };
        !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
    };
    match s.split_once('/') {
        None if digits(s, true) => Some(BigRational::from_integer(s.parse().ok()?)),
        Some((n, d)) if digits(n, true) && digits(d, false) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        _ => None,
    }
}

/// Parses a point document: the flow document schema with `num/den` values.
pub fn parse_point(instance: &Instance, text: &str) -> Result<RationalPoint, RelaxError> {
    let mut point = RationalPoint::new();
    for (e, v) in parse_edge_values(instance, text, parse_rational)? {
        point.set(e, v);
    }
    Ok(point)
}

pub fn serialize_point(instance: &Instance, point: &RationalPoint) -> String {
    write_edge_values(instance, |e| format_rational(&point.get(e)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointCheck {
    pub feasible: bool,
    pub violations: Vec<ConstraintKind>,
}

impl PointCheck {
    pub fn render_text(&self, instance: &Instance) -> String {
        let mut out = String::from(if self.feasible { "FEASIBLE\n" } else { "INFEASIBLE\n" });
        for v in &self.violations {
            out.push_str(&format!("violated: {}\n", v.describe(instance)));
        }
        out
    }
}

/// Evaluates every constraint exactly at `point`.
pub fn check_point(system: &ConstraintSystem, point: &RationalPoint) -> Result<PointCheck, RelaxError> {
    let x = point.dense(system)?;
    let mut violations = Vec::new();
    for c in &system.equalities {
        if c.eval(&x) != c.rhs {
            violations.push(c.kind);
        }
    }
    for c in &system.inequalities {
        if c.eval(&x) > c.rhs {
            violations.push(c.kind);
        }
    }
    Ok(PointCheck {
        feasible: violations.is_empty(),
        violations,
    })
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(e, v)| format!("#{}->#{}={}", e.tail.0, e.head.0, format_rational(v)))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_counter, gen_direct, gen_trap, gen_zigzag};

    fn e(inst: &Instance, t: &str, h: &str) -> Edge {
        Edge::new(inst.vertex(t).unwrap(), inst.vertex(h).unwrap())
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn system_shapes() {
        let s = build_constraints(&gen_direct());
        assert_eq!(s.equalities.len(), 2);
        assert_eq!(s.inequalities.len(), 2);
        assert!(s
            .inequalities
            .iter()
            .all(|c| matches!(c.kind, ConstraintKind::NonNegative(_))));
        // the d->d loop cancels
        assert!(s.equalities[1].coeffs[1].is_zero());

        let inst = gen_zigzag();
        let s = build_constraints(&inst);
        assert_eq!(s.equalities.len(), 4);
        let w = inst.vertex("w").unwrap();
        let block: Vec<_> = s
            .inequalities
            .iter()
            .filter(|c| {
                matches!(c.kind, ConstraintKind::OddNonNegative(v)
                    | ConstraintKind::OddAtMostEven(v)
                    | ConstraintKind::EvenAtMostOddPlusOne(v) if v == w)
            })
            .collect();
        assert_eq!(block.len(), 3);
        assert_eq!(s.inequalities.len(), 3 + 3);

        let inst = gen_counter(2).unwrap();
        let s = build_constraints(&inst);
        assert_eq!(s.equalities.len(), 4);
        assert_eq!(s.inequalities.len(), 3 + 3 + 1 + 1);
    }

    #[test]
    fn direct_unit_point_feasible() {
        let inst = gen_direct();
        let s = build_constraints(&inst);
        let p = RationalPoint::new().with(e(&inst, "o", "d"), q(1, 1));
        assert!(check_point(&s, &p).unwrap().feasible);
    }

    #[test]
    fn zigzag_half_point_violates_balance_only() {
        let inst = gen_zigzag();
        let s = build_constraints(&inst);
        let p = RationalPoint::new()
            .with(e(&inst, "o", "w"), q(1, 1))
            .with(e(&inst, "w", "u"), q(1, 2))
            .with(e(&inst, "u", "w"), q(1, 2))
            .with(e(&inst, "w", "d"), q(1, 1));
        let check = check_point(&s, &p).unwrap();
        assert!(!check.feasible);
        assert_eq!(
            check.violations,
            vec![ConstraintKind::OddAtMostEven(inst.vertex("w").unwrap())]
        );
    }

    #[test]
    fn trap_points_with_flow_on_origin_edge_fail() {
        let inst = gen_trap();
        let s = build_constraints(&inst);
        for (a, b) in [(1, 1), (1, 3), (5, 2)] {
            let p = RationalPoint::new().with(e(&inst, "o", "t"), q(a, b));
            let check = check_point(&s, &p).unwrap();
            assert!(check
                .violations
                .contains(&ConstraintKind::Conservation(inst.vertex("t").unwrap())));
        }
    }

    #[test]
    fn foreign_edge_is_dimension_mismatch() {
        let inst = gen_zigzag();
        let s = build_constraints(&inst);
        let p = RationalPoint::new().with(e(&inst, "o", "d"), q(1, 1));
        assert!(matches!(
            check_point(&s, &p),
            Err(RelaxError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rational_text_forms() {
        assert_eq!(parse_rational("2/4"), Some(q(1, 2)));
        assert_eq!(parse_rational("-3/6"), Some(q(-1, 2)));
        assert_eq!(parse_rational("7"), Some(q(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&q(6, 4)), "3/2");
        assert_eq!(format_rational(&q(4, 2)), "2");

        let inst = gen_zigzag();
        let p = RationalPoint::new()
            .with(e(&inst, "w", "u"), q(1, 3))
            .with(e(&inst, "u", "w"), q(5, 1));
        let text = serialize_point(&inst, &p);
        assert!(text.contains("\"w->u\": \"1/3\""));
        assert_eq!(parse_point(&inst, &text).unwrap(), p);
    }
}
