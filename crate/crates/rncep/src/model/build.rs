//! Nominal, discrete-robust, stochastic-mean and evaluation-flow builders.

use crate::lp::{LinearProgram, LpSolution, RowSense};
use crate::sndlib::NetworkSpec;
use crate::uncertainty::{DiscreteSet, MeanDemand};

use super::{check_demand, check_sigma, ModelError, RowBuilder, VarKey, VariableCatalog};

/// Tolerance below which a slightly negative first-stage value is clamped.
const EXTRACT_TOL: f64 = 1e-6;

/// Builds the single-demand expansion program.
///
/// Columns: `x_a` (arc order), `f^k_a` (commodity-major, then arc order),
/// `h^k`. Rows: one shortfall row per commodity, one flow row per
/// `(commodity, intermediate node)`, one capacity row per arc.
/// Intermediate-node conservation is the inequality `inflow >= outflow`
/// (flow may be diminished outside source and sink), and any amount may
/// leave the source: only flow arriving at the sink counts, through the
/// shortfall rows `h^k >= d_k - inflow(t^k) + outflow(t^k)`.
pub fn build_nominal(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    demand: &[f64],
    sigma: f64,
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    check_sigma(sigma)?;
    check_demand(demand, pairs.len())?;
    build_flow_program(net, pairs, demand, FlowObjective::InvestPlusOutsourcing { sigma }, None)
}

/// Builds the worst-case program over a finite demand set.
///
/// Columns: `x_a`, then `f^{k,i}_a` ordered by (commodity, scenario, arc),
/// then `h^{k,i}` by (commodity, scenario), then the worst-shortfall
/// variable — `|A| + N K |A| + N K + 1` columns in total. Rows: the N
/// worst-case rows, then shortfall rows by (commodity, scenario), flow rows
/// by (commodity, scenario, intermediate node), capacity rows by
/// (scenario, arc).
pub fn build_discrete_robust(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    set: &DiscreteSet,
    sigma: f64,
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    check_sigma(sigma)?;
    let n = set.num_scenarios();
    if n == 0 {
        return Err(ModelError::EmptyScenarioSet);
    }
    let k_count = pairs.len();
    for row in &set.scenarios {
        check_demand(row, k_count)?;
    }
    let adj = net.adjacency();
    let num_arcs = net.num_arcs();
    let num_nodes = net.num_nodes();

    let mut lp = LinearProgram::new();
    let mut cat = VariableCatalog::new();
    for (a, arc) in net.arcs.iter().enumerate() {
        let col = lp.add_col(arc.cost, 0.0, f64::INFINITY);
        let registered = cat.push(VarKey::Invest { arc: a });
        debug_assert_eq!(col, registered);
    }
    for k in 0..k_count {
        for i in 0..n {
            for a in 0..num_arcs {
                let col = lp.add_col(0.0, 0.0, f64::INFINITY);
                let registered =
                    cat.push(VarKey::Flow { commodity: k, scenario: i, arc: a });
                debug_assert_eq!(col, registered);
            }
        }
    }
    for k in 0..k_count {
        for i in 0..n {
            let col = lp.add_col(0.0, 0.0, f64::INFINITY);
            let registered = cat.push(VarKey::Shortfall { commodity: k, scenario: i });
            debug_assert_eq!(col, registered);
        }
    }
    let tau = lp.add_col(sigma, 0.0, f64::INFINITY);
    let registered = cat.push(VarKey::MaxShortfall);
    debug_assert_eq!(tau, registered);

    let flow = |k: usize, i: usize, a: usize| {
        cat.index_of(&VarKey::Flow { commodity: k, scenario: i, arc: a }).unwrap()
    };
    let shortfall =
        |k: usize, i: usize| cat.index_of(&VarKey::Shortfall { commodity: k, scenario: i }).unwrap();

    // Worst-case rows: tau >= sum_k h^{k,i}.
    for i in 0..n {
        let mut row = RowBuilder::new();
        row.add(tau, 1.0);
        for k in 0..k_count {
            row.add(shortfall(k, i), -1.0);
        }
        lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
    }
    // Shortfall rows: h^{k,i} + inflow(t^k) - outflow(t^k) >= d^i_k.
    for k in 0..k_count {
        let (_, sink) = pairs[k];
        for i in 0..n {
            let mut row = RowBuilder::new();
            row.add(shortfall(k, i), 1.0);
            for &a in &adj.incoming[sink] {
                row.add(flow(k, i, a), 1.0);
            }
            for &a in &adj.outgoing[sink] {
                row.add(flow(k, i, a), -1.0);
            }
            lp.add_row(RowSense::Ge, set.scenarios[i][k], &row.into_entries());
        }
    }
    // Flow rows at intermediate nodes.
    for (k, &(src, sink)) in pairs.iter().enumerate() {
        for i in 0..n {
            for v in 0..num_nodes {
                if v == src || v == sink {
                    continue;
                }
                let mut row = RowBuilder::new();
                for &a in &adj.incoming[v] {
                    row.add(flow(k, i, a), 1.0);
                }
                for &a in &adj.outgoing[v] {
                    row.add(flow(k, i, a), -1.0);
                }
                lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
            }
        }
    }
    // Capacity rows per (scenario, arc).
    for i in 0..n {
        for (a, arc) in net.arcs.iter().enumerate() {
            let mut row = RowBuilder::new();
            for k in 0..k_count {
                row.add(flow(k, i, a), 1.0);
            }
            row.add(a, -1.0); // invest columns are the first |A|
            lp.add_row(RowSense::Le, arc.capacity, &row.into_entries());
        }
    }
    Ok((lp, cat))
}

/// Builds the nominal program at the fitted mean demand; identical
/// structure to [`build_nominal`] row for row.
pub fn build_stochastic_mean(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    mean: &MeanDemand,
    sigma: f64,
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    build_nominal(net, pairs, &mean.values, sigma)
}

/// Builds the second-stage flow program for a fixed investment: minimize
/// total outsourced demand with arc capacities `u_a + x_a`.
pub fn build_evaluation_flow(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    investment: &[f64],
    demand: &[f64],
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    if investment.len() != net.num_arcs() {
        return Err(ModelError::DimensionMismatch {
            left: investment.len(),
            right: net.num_arcs(),
        });
    }
    for &x in investment {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(ModelError::NegativeInvestment(x));
        }
    }
    check_demand(demand, pairs.len())?;
    build_flow_program(
        net,
        pairs,
        demand,
        FlowObjective::OutsourcingOnly,
        Some(investment),
    )
}

enum FlowObjective {
    /// `sum c_a x_a + sigma * sum_k h^k` with `x` as variables.
    InvestPlusOutsourcing { sigma: f64 },
    /// `sum_k h^k` with the investment fixed as data.
    OutsourcingOnly,
}

/// Shared single-demand flow program; the nominal model and the
/// evaluation flow differ only in whether investment is a variable.
fn build_flow_program(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    demand: &[f64],
    objective: FlowObjective,
    fixed_investment: Option<&[f64]>,
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    let adj = net.adjacency();
    let num_nodes = net.num_nodes();
    let num_arcs = net.num_arcs();
    let k_count = pairs.len();

    let mut lp = LinearProgram::new();
    let mut cat = VariableCatalog::new();
    let with_invest = fixed_investment.is_none();
    if with_invest {
        for (a, arc) in net.arcs.iter().enumerate() {
            let col = lp.add_col(arc.cost, 0.0, f64::INFINITY);
            let registered = cat.push(VarKey::Invest { arc: a });
            debug_assert_eq!(col, registered);
        }
    }
    for k in 0..k_count {
        for a in 0..num_arcs {
            let col = lp.add_col(0.0, 0.0, f64::INFINITY);
            let registered = cat.push(VarKey::Flow { commodity: k, scenario: 0, arc: a });
            debug_assert_eq!(col, registered);
        }
    }
    let h_cost = match objective {
        FlowObjective::InvestPlusOutsourcing { sigma } => sigma,
        FlowObjective::OutsourcingOnly => 1.0,
    };
    for k in 0..k_count {
        let col = lp.add_col(h_cost, 0.0, f64::INFINITY);
        let registered = cat.push(VarKey::Shortfall { commodity: k, scenario: 0 });
        debug_assert_eq!(col, registered);
    }

    let flow =
        |k: usize, a: usize| cat.index_of(&VarKey::Flow { commodity: k, scenario: 0, arc: a }).unwrap();
    let shortfall =
        |k: usize| cat.index_of(&VarKey::Shortfall { commodity: k, scenario: 0 }).unwrap();

    for (k, &(_, sink)) in pairs.iter().enumerate() {
        let mut row = RowBuilder::new();
        row.add(shortfall(k), 1.0);
        for &a in &adj.incoming[sink] {
            row.add(flow(k, a), 1.0);
        }
        for &a in &adj.outgoing[sink] {
            row.add(flow(k, a), -1.0);
        }
        lp.add_row(RowSense::Ge, demand[k], &row.into_entries());
    }
    for (k, &(src, sink)) in pairs.iter().enumerate() {
        for v in 0..num_nodes {
            if v == src || v == sink {
                continue;
            }
            let mut row = RowBuilder::new();
            for &a in &adj.incoming[v] {
                row.add(flow(k, a), 1.0);
            }
            for &a in &adj.outgoing[v] {
                row.add(flow(k, a), -1.0);
            }
            lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
        }
    }
    for (a, arc) in net.arcs.iter().enumerate() {
        let mut row = RowBuilder::new();
        for k in 0..k_count {
            row.add(flow(k, a), 1.0);
        }
        let rhs = match fixed_investment {
            Some(x) => arc.capacity + x[a],
            None => {
                row.add(a, -1.0);
                arc.capacity
            }
        };
        lp.add_row(RowSense::Le, rhs, &row.into_entries());
    }
    Ok((lp, cat))
}

/// Reads the here-and-now investment out of a solution, clamping tiny
/// negative values to zero.
pub fn extract_first_stage(
    sol: &LpSolution,
    cat: &VariableCatalog,
) -> Result<Vec<f64>, ModelError> {
    if sol.x.len() != cat.len() {
        return Err(ModelError::SolutionLength { expected: cat.len(), got: sol.x.len() });
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (col, key) in cat.iter() {
        if let VarKey::Invest { arc } = key {
            pairs.push((*arc, col));
        }
    }
    if pairs.is_empty() {
        return Err(ModelError::MissingVariable("x".into()));
    }
    pairs.sort_unstable();
    if pairs.last().unwrap().0 + 1 != pairs.len() {
        return Err(ModelError::MissingVariable(format!("x_a{}", pairs.len() - 1)));
    }
    let mut x = Vec::with_capacity(pairs.len());
    for (_, col) in pairs {
        let v = sol.x[col];
        if v < -EXTRACT_TOL {
            return Err(ModelError::NegativeInvestment(v));
        }
        x.push(v.max(0.0));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, SolveOptions, SolveStatus};
    use crate::model::testutil::{single_arc_brute_force, two_node_net};
    use crate::uncertainty::build_discrete_set;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    #[test]
    fn nominal_builds_when_outsourcing_beats_expansion() {
        // sigma = 2 > c = 1: build all 5 units, objective 5.
        let net = two_node_net();
        let oracle = single_arc_brute_force(0.0, 1.0, 5.0, 2.0);
        assert_eq!(oracle, 5.0);
        let (lp, cat) = build_nominal(&net, &[(0, 1)], &[5.0], 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - oracle).abs() < 1e-9);
        let x = extract_first_stage(&sol, &cat).unwrap();
        assert!((x[0] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn nominal_outsources_when_cheap() {
        // sigma = 0.5 < c = 1: build nothing, objective 2.5.
        let net = two_node_net();
        let oracle = single_arc_brute_force(0.0, 1.0, 5.0, 0.5);
        assert_eq!(oracle, 2.5);
        let (lp, cat) = build_nominal(&net, &[(0, 1)], &[5.0], 0.5).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert!((sol.objective - oracle).abs() < 1e-9);
        let x = extract_first_stage(&sol, &cat).unwrap();
        assert!(x[0].abs() < 1e-9);
    }

    #[test]
    fn nominal_zero_demand_is_free() {
        let net = two_node_net();
        let (lp, _) = build_nominal(&net, &[(0, 1)], &[0.0], 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert!(sol.objective.abs() < 1e-12);
    }

    #[test]
    fn nominal_column_counts() {
        // |A| + K|A| + K columns; K + K(V-2) + |A| rows.
        let net = two_node_net();
        let (lp, cat) = build_nominal(&net, &[(0, 1)], &[1.0], 1.0).unwrap();
        assert_eq!(lp.num_cols(), 1 + 1 + 1);
        assert_eq!(lp.num_rows(), 1 + 0 + 1);
        assert_eq!(cat.len(), lp.num_cols());
    }

    #[test]
    fn rejects_bad_inputs() {
        let net = two_node_net();
        assert!(matches!(
            build_nominal(&net, &[(0, 1)], &[1.0], -1.0),
            Err(ModelError::NegativeSigma(_))
        ));
        assert!(matches!(
            build_nominal(&net, &[(0, 1)], &[-1.0], 1.0),
            Err(ModelError::NegativeDemand(_))
        ));
        assert!(matches!(
            build_nominal(&net, &[(0, 1)], &[1.0, 2.0], 1.0),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn discrete_two_scenarios_guards_worst_case() {
        // Scenarios {3, 5}, sigma = 2: expanding to the worst case wins.
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![vec![3.0], vec![5.0]], lambda: 1.0 };
        let by_hand = [0.0f64, 3.0, 5.0]
            .iter()
            .map(|&x| x + 2.0 * [3.0f64, 5.0].iter().map(|d| (d - x).max(0.0)).fold(0.0, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(by_hand, 5.0);
        let (lp, cat) = build_discrete_robust(&net, &[(0, 1)], &set, 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert!((sol.objective - by_hand).abs() < 1e-9);
        let x = extract_first_stage(&sol, &cat).unwrap();
        assert!((x[0] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn discrete_single_scenario_collapses_to_nominal() {
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![vec![4.0]], lambda: 1.0 };
        let (lp_d, _) = build_discrete_robust(&net, &[(0, 1)], &set, 1.5).unwrap();
        let (lp_n, _) = build_nominal(&net, &[(0, 1)], &[4.0], 1.5).unwrap();
        let sol_d = solve(&lp_d, &opts()).unwrap();
        let sol_n = solve(&lp_n, &opts()).unwrap();
        assert!((sol_d.objective - sol_n.objective).abs() < 1e-9);
    }

    #[test]
    fn discrete_all_zero_scenarios_cost_nothing() {
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![vec![0.0], vec![0.0]], lambda: 1.0 };
        let (lp, _) = build_discrete_robust(&net, &[(0, 1)], &set, 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert!(sol.objective.abs() < 1e-12);
    }

    #[test]
    fn discrete_identical_scenarios_match_nominal() {
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![vec![4.0]; 5], lambda: 1.0 };
        let (lp_d, _) = build_discrete_robust(&net, &[(0, 1)], &set, 2.0).unwrap();
        let (lp_n, _) = build_nominal(&net, &[(0, 1)], &[4.0], 2.0).unwrap();
        let a = solve(&lp_d, &opts()).unwrap();
        let b = solve(&lp_n, &opts()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn discrete_column_count_formula() {
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![vec![1.0], vec![2.0], vec![3.0]], lambda: 1.0 };
        let (lp, cat) = build_discrete_robust(&net, &[(0, 1)], &set, 1.0).unwrap();
        let (arcs, n, k) = (1, 3, 1);
        assert_eq!(lp.num_cols(), arcs + n * k * arcs + n * k + 1);
        assert_eq!(cat.len(), lp.num_cols());
        // N + NK + NK(V-2) + N|A| rows.
        assert_eq!(lp.num_rows(), n + n * k + 0 + n * arcs);
    }

    #[test]
    fn discrete_empty_set_rejected() {
        let net = two_node_net();
        let set = DiscreteSet { scenarios: vec![], lambda: 1.0 };
        assert!(matches!(
            build_discrete_robust(&net, &[(0, 1)], &set, 1.0),
            Err(ModelError::EmptyScenarioSet)
        ));
    }

    #[test]
    fn stochastic_mean_equals_nominal_rows() {
        let net = two_node_net();
        let mean = MeanDemand { values: vec![2.0] };
        let (lp_s, cat_s) = build_stochastic_mean(&net, &[(0, 1)], &mean, 2.0).unwrap();
        let (lp_n, cat_n) = build_nominal(&net, &[(0, 1)], &[2.0], 2.0).unwrap();
        assert_eq!(lp_s.num_rows(), lp_n.num_rows());
        assert_eq!(lp_s.num_cols(), lp_n.num_cols());
        assert_eq!(
            lp_s.triplets().collect::<Vec<_>>(),
            lp_n.triplets().collect::<Vec<_>>()
        );
        assert_eq!(cat_s.len(), cat_n.len());
        // Mean of [2, 0, 4] with the zero-inflated fit is 2; cost 1 < sigma 2
        // so the whole mean is built: x = 2, objective 2.
        let sol = solve(&lp_s, &opts()).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-9);
        let x = extract_first_stage(&sol, &cat_s).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-9);
        // Brute force agrees.
        assert_eq!(single_arc_brute_force(0.0, 1.0, 2.0, 2.0), 2.0);
    }

    #[test]
    fn evaluation_flow_caps_at_installed_capacity() {
        let net = two_node_net();
        // x = 5: demand 3 routes fully, demand 7 outsources 2.
        for (demand, expect) in [(3.0, 0.0), (7.0, 2.0)] {
            let (lp, _) = build_evaluation_flow(&net, &[(0, 1)], &[5.0], &[demand]).unwrap();
            let sol = solve(&lp, &opts()).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            assert!((sol.objective - expect).abs() < 1e-9, "demand {demand}");
        }
    }

    #[test]
    fn evaluation_flow_without_capacity_outsources_everything() {
        let net = two_node_net();
        let (lp, _) = build_evaluation_flow(&net, &[(0, 1)], &[0.0], &[4.5]).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert!((sol.objective - 4.5).abs() < 1e-9);
    }

    #[test]
    fn evaluation_flow_rejects_negative_investment() {
        let net = two_node_net();
        assert!(matches!(
            build_evaluation_flow(&net, &[(0, 1)], &[-0.5], &[1.0]),
            Err(ModelError::NegativeInvestment(_))
        ));
    }

    #[test]
    fn extract_first_stage_checks_lengths() {
        let net = two_node_net();
        let (lp, cat) = build_nominal(&net, &[(0, 1)], &[5.0], 2.0).unwrap();
        let mut sol = solve(&lp, &opts()).unwrap();
        sol.x.pop();
        assert!(matches!(
            extract_first_stage(&sol, &cat),
            Err(ModelError::SolutionLength { .. })
        ));
    }

    #[test]
    fn discrete_lambda_zero_matches_nominal_at_average() {
        // Average of [2, 0, 4] with the positive-count convention is 3.
        let commodities = vec![("s".to_string(), "t".to_string())];
        let rows = vec![vec![2.0], vec![0.0], vec![4.0]];
        let scen = crate::sndlib::ScenarioSet::from_rows(commodities, rows).unwrap();
        let blended = build_discrete_set(&scen, 0.0).unwrap();
        let net = two_node_net();
        let (lp_d, _) = build_discrete_robust(&net, &[(0, 1)], &blended, 2.0).unwrap();
        let (lp_n, _) = build_nominal(&net, &[(0, 1)], &[3.0], 2.0).unwrap();
        let a = solve(&lp_d, &opts()).unwrap();
        let b = solve(&lp_n, &opts()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }
}
