//! Fourier–Motzkin elimination over exact rationals.
//!
//! Variables are removed one at a time in the configured order. A variable
//! that occurs in a remaining equality is substituted out through it;
//! otherwise its upper and lower bounds are combined pairwise. Combinations
//! built from more original inequalities than eliminated variables plus one
//! are redundant (Chernikov's rule) and dropped. A witness is recovered by
//! replaying the eliminations backwards.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{check_point, ConstraintSystem, RationalPoint, RelaxError};

#[derive(Debug, Clone)]
pub struct EliminationConfig {
    /// Refuse systems with more variables than this.
    pub max_variables: usize,
    /// Give up once an intermediate system holds more inequalities.
    pub max_constraints: usize,
    /// Elimination order as variable indices; `None` is `0..n`.
    pub order: Option<Vec<usize>>,
    pub chernikov: bool,
}

impl Default for EliminationConfig {
    fn default() -> Self {
        EliminationConfig {
            max_variables: 14,
            max_constraints: 20_000,
            order: None,
            chernikov: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RationalPoint),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&RationalPoint> {
        match self {
            Feasibility::Feasible(p) => Some(p),
            Feasibility::Infeasible => None,
        }
    }
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    // original inequalities this row combines
    history: u128,
}

impl Row {
    fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Scales so the first nonzero coefficient has magnitude one.
    fn normalize(&mut self) {
        if let Some(lead) = self.coeffs.iter().find(|a| !a.is_zero()).map(|a| a.abs()) {
            for a in &mut self.coeffs {
                *a /= &lead;
            }
            self.rhs /= &lead;
        }
    }

    /// `self += factor * other`.
    fn add_scaled(&mut self, factor: &BigRational, other: &Row) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !b.is_zero() {
                *a += factor * b;
            }
        }
        self.rhs += factor * &other.rhs;
    }

    /// Solves `coeffs · x (=|≤) rhs` for variable `j` given all others.
    fn solve_for(&self, j: usize, x: &[BigRational]) -> BigRational {
        let rest: BigRational = self
            .coeffs
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(k, (a, _))| *k != j && !a.is_zero())
            .map(|(_, (a, v))| a * v)
            .sum();
        (&self.rhs - rest) / &self.coeffs[j]
    }
}

enum Step {
    Substituted { var: usize, pivot: Row },
    Projected { var: usize, bounds: Vec<Row> },
}

/// Decides feasibility with the default configuration.
pub fn feasible(system: &ConstraintSystem) -> Result<Feasibility, RelaxError> {
    feasible_with(system, &EliminationConfig::default())
}

pub fn feasible_with(
    system: &ConstraintSystem,
    config: &EliminationConfig,
) -> Result<Feasibility, RelaxError> {
    let n = system.variables.len();
    if n > config.max_variables {
        return Err(RelaxError::TooLarge(format!(
            "{n} variables exceed the limit of {}",
            config.max_variables
        )));
    }
    if system.inequalities.len() > 128 {
        return Err(RelaxError::TooLarge(format!(
            "{} inequalities exceed the limit of 128",
            system.inequalities.len()
        )));
    }
    let order: Vec<usize> = config.order.clone().unwrap_or_else(|| (0..n).collect());
    {
        let mut seen = vec![false; n];
        for &j in &order {
            assert!(j < n && !seen[j], "elimination order must be a permutation");
            seen[j] = true;
        }
        assert_eq!(order.len(), n, "elimination order must be a permutation");
    }

    let mut equalities: Vec<Row> = system
        .equalities
        .iter()
        .map(|c| Row {
            coeffs: c.coeffs.clone(),
            rhs: c.rhs.clone(),
            history: 0,
        })
        .collect();
    let mut inequalities: Vec<Row> = system
        .inequalities
        .iter()
        .enumerate()
        .map(|(i, c)| Row {
            coeffs: c.coeffs.clone(),
            rhs: c.rhs.clone(),
            history: 1u128 << i,
        })
        .collect();

    let mut steps = Vec::with_capacity(n);
    let mut projected = 0u32;
    for &j in &order {
        if !settle(&mut equalities, &mut inequalities) {
            return Ok(Feasibility::Infeasible);
        }
        if let Some(p) = equalities.iter().position(|r| !r.coeffs[j].is_zero()) {
            let pivot = equalities.swap_remove(p);
            for row in equalities.iter_mut().chain(inequalities.iter_mut()) {
                if !row.coeffs[j].is_zero() {
                    let factor = -(&row.coeffs[j] / &pivot.coeffs[j]);
                    row.add_scaled(&factor, &pivot);
                    row.coeffs[j] = BigRational::zero();
                }
            }
            steps.push(Step::Substituted { var: j, pivot });
            continue;
        }

        projected += 1;
        let (bounds, rest): (Vec<Row>, Vec<Row>) =
            inequalities.into_iter().partition(|r| !r.coeffs[j].is_zero());
        let (upper, lower): (Vec<&Row>, Vec<&Row>) =
            bounds.iter().partition(|r| r.coeffs[j].is_positive());
        let mut next = rest;
        for u in &upper {
            for l in &lower {
                let history = u.history | l.history;
                if config.chernikov && history.count_ones() > projected + 1 {
                    continue;
                }
                let mut row = Row {
                    coeffs: u.coeffs.clone(),
                    rhs: u.rhs.clone(),
                    history,
                };
                let scale = &u.coeffs[j] / -&l.coeffs[j];
                row.add_scaled(&scale, l);
                row.coeffs[j] = BigRational::zero();
                next.push(row);
            }
        }
        inequalities = next;
        if inequalities.len() > config.max_constraints {
            return Err(RelaxError::TooLarge(format!(
                "elimination produced {} inequalities (limit {})",
                inequalities.len(),
                config.max_constraints
            )));
        }
        steps.push(Step::Projected { var: j, bounds });
    }
    if !settle(&mut equalities, &mut inequalities) {
        return Ok(Feasibility::Infeasible);
    }
    debug_assert!(equalities.is_empty() && inequalities.is_empty());

    let mut x = vec![BigRational::zero(); n];
    for step in steps.iter().rev() {
        match step {
            Step::Substituted { var, pivot } => x[*var] = pivot.solve_for(*var, &x),
            Step::Projected { var, bounds } => {
                let mut lower: Option<BigRational> = None;
                let mut upper: Option<BigRational> = None;
                for row in bounds {
                    let b = row.solve_for(*var, &x);
                    if row.coeffs[*var].is_positive() {
                        upper = Some(upper.map_or(b.clone(), |u| u.min(b)));
                    } else {
                        lower = Some(lower.map_or(b.clone(), |l| l.max(b)));
                    }
                }
                x[*var] = lower.or(upper).unwrap_or_else(BigRational::zero);
            }
        }
    }

    let mut point = RationalPoint::new();
    for (e, v) in system.variables.iter().zip(x) {
        point.set(*e, v);
    }
    let check = check_point(system, &point)?;
    assert!(
        check.feasible,
        "back-substituted witness violates {:?}",
        check.violations
    );
    Ok(Feasibility::Feasible(point))
}

/// Drops constant rows (false if one is violated), normalizes inequalities
/// and merges rows with equal coefficients into the tightest one.
fn settle(equalities: &mut Vec<Row>, inequalities: &mut Vec<Row>) -> bool {
    let mut ok = true;
    equalities.retain(|r| {
        if r.is_constant() {
            ok &= r.rhs.is_zero();
            false
        } else {
            true
        }
    });
    if !ok {
        return false;
    }

    let mut tightest: HashMap<Vec<BigRational>, usize> = HashMap::new();
    let mut kept: Vec<Row> = Vec::with_capacity(inequalities.len());
    for mut row in inequalities.drain(..) {
        if row.is_constant() {
            if row.rhs.is_negative() {
                return false;
            }
            continue;
        }
        row.normalize();
        match tightest.get(&row.coeffs) {
            Some(&i) => {
                // the merged row stands in for both, so it may only claim
                // the originals they share
                let merged = &mut kept[i];
                merged.history &= row.history;
                if row.rhs < merged.rhs {
                    merged.rhs = row.rhs;
                }
            }
            None => {
                tightest.insert(row.coeffs.clone(), kept.len());
                kept.push(row);
            }
        }
    }
    *inequalities = kept;
    true
}
