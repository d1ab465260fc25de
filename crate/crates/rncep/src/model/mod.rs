//! Builders that translate the capacity-expansion formulations into
//! explicit sparse [`LinearProgram`](crate::lp::LinearProgram)s with a
//! queryable variable catalog.
//!
//! Five programs are built here:
//!
//! - [`build_nominal`]: expansion against a single demand vector, with the
//!   positive-part outsourcing term linearized through shortfall variables.
//! - [`build_discrete_robust`]: worst case over a finite demand set, flows
//!   and shortfalls replicated per scenario, the maximum expressed through
//!   `>=` rows on a single worst-shortfall variable.
//! - [`build_aarc`]: the affine adjustable counterpart over a polyhedral
//!   demand set — flows restricted to `f(d) = phi + PHI d`, with the flow,
//!   capacity and positivity constraint families and the (relaxed)
//!   objective subproblem each replaced by their duals.
//! - [`build_stochastic_mean`]: the nominal program at a fitted mean demand.
//! - [`build_evaluation_flow`]: second-stage re-optimization for a fixed
//!   investment, minimizing total outsourced demand.
//!
//! Row and column orders are canonical (documented per builder), so two
//! builds of the same instance are identical, which the golden-file tests
//! rely on. Column counts follow closed-form formulas, e.g. the discrete
//! model has `|A| + N K |A| + N K + 1` columns; see the builder docs.

mod aarc;
mod analysis;
mod build;
mod catalog;

pub use aarc::{aarc_column_count, aarc_row_count, build_aarc};
pub use analysis::{
    capacity_worst_coeffs, extract_affine_policy, flow_worst_coeffs, max_over_polyhedron,
    min_dual_support, positivity_worst_coeffs, worst_case_outsourcing_oracle,
    worst_case_outsourcing_relaxed, AffinePolicy,
};
pub use build::{
    build_discrete_robust, build_evaluation_flow, build_nominal, build_stochastic_mean,
    extract_first_stage,
};
pub use catalog::{VarKey, VariableCatalog};

use thiserror::Error;

use crate::lp::{LpError, SolveStatus};
use crate::sndlib::NetworkSpec;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown node {0}")]
    UnknownNode(String),
    #[error("commodity source equals sink: {0}")]
    SourceEqualsSink(String),
    #[error("negative penalty sigma {0}")]
    NegativeSigma(f64),
    #[error("negative demand {0}")]
    NegativeDemand(f64),
    #[error("negative investment entry {0}")]
    NegativeInvestment(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty scenario set")]
    EmptyScenarioSet,
    #[error("catalog key {0} missing from the solution")]
    MissingVariable(String),
    #[error("solution has {got} values, catalog describes {expected}")]
    SolutionLength { expected: usize, got: usize },
    #[error("exact worst-case oracle supports at most {max} commodities, got {got}")]
    TooManyCommodities { got: usize, max: usize },
    #[error("inner problem terminated with status {0:?}")]
    InnerSolve(SolveStatus),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Resolves named commodity endpoints against a network, checking that
/// sources and sinks exist and differ.
pub fn resolve_commodities(
    net: &NetworkSpec,
    commodities: &[(String, String)],
) -> Result<Vec<(usize, usize)>, ModelError> {
    commodities
        .iter()
        .map(|(s, t)| {
            let src =
                net.node_index(s).ok_or_else(|| ModelError::UnknownNode(s.clone()))?;
            let dst =
                net.node_index(t).ok_or_else(|| ModelError::UnknownNode(t.clone()))?;
            if src == dst {
                return Err(ModelError::SourceEqualsSink(s.clone()));
            }
            Ok((src, dst))
        })
        .collect()
}

/// Accumulates row coefficients with column-index dedup before insertion.
#[derive(Default)]
pub(crate) struct RowBuilder {
    entries: std::collections::BTreeMap<usize, f64>,
}

impl RowBuilder {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, col: usize, coef: f64) {
        if coef != 0.0 {
            *self.entries.entry(col).or_insert(0.0) += coef;
        }
    }

    pub(crate) fn into_entries(self) -> Vec<(usize, f64)> {
        self.entries.into_iter().collect()
    }
}

pub(crate) fn check_sigma(sigma: f64) -> Result<(), ModelError> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(ModelError::NegativeSigma(sigma));
    }
    Ok(())
}

pub(crate) fn check_demand(demand: &[f64], k: usize) -> Result<(), ModelError> {
    if demand.len() != k {
        return Err(ModelError::DimensionMismatch { left: demand.len(), right: k });
    }
    for &d in demand {
        if !(d >= 0.0) || !d.is_finite() {
            return Err(ModelError::NegativeDemand(d));
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::sndlib::{Arc, NetworkSpec};

    /// Two nodes connected by a single directed arc with `u = 0`, `c = 1`.
    pub(crate) fn two_node_net() -> NetworkSpec {
        NetworkSpec::new(
            vec!["s".into(), "t".into()],
            vec![Arc { tail: 0, head: 1, capacity: 0.0, cost: 1.0 }],
        )
        .unwrap()
    }

    /// Grid oracle for the single-arc expansion problem: cheapest mix of
    /// expansion and outsourcing against one demand value.
    pub(crate) fn single_arc_brute_force(u: f64, c: f64, d: f64, sigma: f64) -> f64 {
        let mut best = f64::INFINITY;
        let steps = 4000;
        let hi = d.max(1.0) * 2.0;
        for s in 0..=steps {
            let x = hi * s as f64 / steps as f64;
            let outsourced = (d - u - x).max(0.0);
            best = best.min(c * x + sigma * outsourced);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sndlib::Arc;

    #[test]
    fn resolve_checks_nodes() {
        let net = NetworkSpec::new(
            vec!["a".into(), "b".into()],
            vec![Arc { tail: 0, head: 1, capacity: 1.0, cost: 1.0 }],
        )
        .unwrap();
        let ok = resolve_commodities(&net, &[("a".into(), "b".into())]).unwrap();
        assert_eq!(ok, vec![(0, 1)]);
        assert!(matches!(
            resolve_commodities(&net, &[("a".into(), "zz".into())]),
            Err(ModelError::UnknownNode(_))
        ));
        assert!(matches!(
            resolve_commodities(&net, &[("a".into(), "a".into())]),
            Err(ModelError::SourceEqualsSink(_))
        ));
    }

    #[test]
    fn row_builder_accumulates() {
        let mut row = RowBuilder::new();
        row.add(3, 1.0);
        row.add(1, 2.0);
        row.add(3, -0.5);
        row.add(2, 0.0);
        assert_eq!(row.into_entries(), vec![(1, 2.0), (3, 0.5)]);
    }
}
