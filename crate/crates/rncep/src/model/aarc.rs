//! The affine adjustable counterpart over a polyhedral demand set.
//!
//! Flows are restricted to affine functions `f^k(d) = phi^k + PHI^k d` of
//! the demand vector. Each universally quantified constraint family is
//! replaced by the dual of its inner worst-case problem over
//! `{d : V d <= b, lower <= d <= upper}`:
//!
//! - flow conservation at intermediate nodes (multipliers alpha / beta),
//! - arc capacity (pi / rho),
//! - flow positivity (xi / zeta),
//! - and the outsourcing objective, whose positive parts are first written
//!   with per-commodity indicators, the indicator products linearized, the
//!   indicators relaxed to `[0, 1]` (a conservative upper bound), and the
//!   whole subproblem dualized (multipliers q, r, s, t, u, v, w).
//!
//! The result is one monolithic LP minimizing
//! `sum_a c_a x_a + sigma * (b'q + sum_{k,l} upper_l t_{kl} + sum_l upper_l u_l
//!  - sum_l lower_l v_l + sum_k w_k)`.

use crate::lp::{LinearProgram, RowSense};
use crate::sndlib::NetworkSpec;
use crate::uncertainty::Polyhedron;

use super::{check_sigma, ModelError, RowBuilder, VarKey, VariableCatalog};

/// Builds the affine adjustable robust counterpart.
///
/// Column order: `x`, `phi` (k, a), `PHI` (k, l, a), then the objective
/// multipliers `q, r, s, t, u, v, w`, the flow multipliers `alpha,
/// beta_up, beta_lo` (per commodity and intermediate node), the capacity
/// multipliers `pi, rho_up, rho_lo` (per arc), and the positivity
/// multipliers `xi, zeta_up, zeta_lo` (per commodity and arc). `phi` and
/// `PHI` are free; every multiplier and `x` is nonnegative.
///
/// Row order: driver rows (l), sink-offset rows (k), sink-slope rows
/// (k, l), flow-offset rows (k, v), flow-slope rows (k, v, l), capacity
/// rows (a), capacity-slope rows (a, l), positivity-offset rows (k, a),
/// positivity-slope rows (k, a, l).
pub fn build_aarc(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    poly: &Polyhedron,
    sigma: f64,
) -> Result<(LinearProgram, VariableCatalog), ModelError> {
    check_sigma(sigma)?;
    let k_count = pairs.len();
    if poly.dim() != k_count {
        return Err(ModelError::DimensionMismatch { left: poly.dim(), right: k_count });
    }
    if poly.num_rows() == 0 {
        return Err(ModelError::EmptyScenarioSet);
    }
    for (lo, up) in poly.lower.iter().zip(&poly.upper) {
        if lo > up {
            return Err(ModelError::DimensionMismatch { left: 0, right: 0 });
        }
    }
    let m_rows = poly.num_rows();
    let adj = net.adjacency();
    let num_arcs = net.num_arcs();
    let num_nodes = net.num_nodes();
    let inter = |k: usize| -> Vec<usize> {
        let (src, sink) = pairs[k];
        (0..num_nodes).filter(|&v| v != src && v != sink).collect()
    };

    let mut lp = LinearProgram::new();
    let mut cat = VariableCatalog::new();
    let nonneg = |lp: &mut LinearProgram, cat: &mut VariableCatalog, obj: f64, key: VarKey| {
        let col = lp.add_col(obj, 0.0, f64::INFINITY);
        let registered = cat.push(key);
        debug_assert_eq!(col, registered);
        col
    };
    let free = |lp: &mut LinearProgram, cat: &mut VariableCatalog, key: VarKey| {
        let col = lp.add_col(0.0, f64::NEG_INFINITY, f64::INFINITY);
        let registered = cat.push(key);
        debug_assert_eq!(col, registered);
        col
    };

    for (a, arc) in net.arcs.iter().enumerate() {
        nonneg(&mut lp, &mut cat, arc.cost, VarKey::Invest { arc: a });
    }
    for k in 0..k_count {
        for a in 0..num_arcs {
            free(&mut lp, &mut cat, VarKey::PolicyOffset { commodity: k, arc: a });
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            for a in 0..num_arcs {
                free(&mut lp, &mut cat, VarKey::PolicySlope { commodity: k, driver: l, arc: a });
            }
        }
    }
    for i in 0..m_rows {
        nonneg(&mut lp, &mut cat, sigma * poly.rhs[i], VarKey::ObjPoly { row: i });
    }
    for k in 0..k_count {
        for l in 0..k_count {
            nonneg(&mut lp, &mut cat, 0.0, VarKey::ObjLink { commodity: k, driver: l });
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            nonneg(&mut lp, &mut cat, 0.0, VarKey::ObjScale { commodity: k, driver: l });
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            nonneg(&mut lp, &mut cat, sigma * poly.upper[l], VarKey::ObjMix { commodity: k, driver: l });
        }
    }
    for l in 0..k_count {
        nonneg(&mut lp, &mut cat, sigma * poly.upper[l], VarKey::ObjUpper { driver: l });
    }
    for l in 0..k_count {
        nonneg(&mut lp, &mut cat, -sigma * poly.lower[l], VarKey::ObjLower { driver: l });
    }
    for k in 0..k_count {
        nonneg(&mut lp, &mut cat, sigma, VarKey::ObjUnit { commodity: k });
    }
    for k in 0..k_count {
        for &v in &inter(k) {
            for i in 0..m_rows {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::FlowPoly { commodity: k, node: v, row: i });
            }
        }
    }
    for k in 0..k_count {
        for &v in &inter(k) {
            for l in 0..k_count {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::FlowUpper { commodity: k, node: v, driver: l });
            }
        }
    }
    for k in 0..k_count {
        for &v in &inter(k) {
            for l in 0..k_count {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::FlowLower { commodity: k, node: v, driver: l });
            }
        }
    }
    for a in 0..num_arcs {
        for i in 0..m_rows {
            nonneg(&mut lp, &mut cat, 0.0, VarKey::CapPoly { arc: a, row: i });
        }
    }
    for a in 0..num_arcs {
        for l in 0..k_count {
            nonneg(&mut lp, &mut cat, 0.0, VarKey::CapUpper { arc: a, driver: l });
        }
    }
    for a in 0..num_arcs {
        for l in 0..k_count {
            nonneg(&mut lp, &mut cat, 0.0, VarKey::CapLower { arc: a, driver: l });
        }
    }
    for k in 0..k_count {
        for a in 0..num_arcs {
            for i in 0..m_rows {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::PosPoly { commodity: k, arc: a, row: i });
            }
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            for a in 0..num_arcs {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::PosUpper { commodity: k, driver: l, arc: a });
            }
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            for a in 0..num_arcs {
                nonneg(&mut lp, &mut cat, 0.0, VarKey::PosLower { commodity: k, driver: l, arc: a });
            }
        }
    }

    let idx = |key: VarKey| cat.index_of(&key).unwrap();
    let phi = |k: usize, a: usize| idx(VarKey::PolicyOffset { commodity: k, arc: a });
    let slope = |k: usize, l: usize, a: usize| {
        idx(VarKey::PolicySlope { commodity: k, driver: l, arc: a })
    };

    // Driver rows: sum_i V[i][l] q_i - sum_k r_{kl} + sum_k t_{kl}
    //              + u_l - v_l >= 0.
    for l in 0..k_count {
        let mut row = RowBuilder::new();
        for i in 0..m_rows {
            row.add(idx(VarKey::ObjPoly { row: i }), poly.rows[i][l]);
        }
        for k in 0..k_count {
            row.add(idx(VarKey::ObjLink { commodity: k, driver: l }), -1.0);
            row.add(idx(VarKey::ObjMix { commodity: k, driver: l }), 1.0);
        }
        row.add(idx(VarKey::ObjUpper { driver: l }), 1.0);
        row.add(idx(VarKey::ObjLower { driver: l }), -1.0);
        lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
    }
    // Sink-offset rows: -sum_l up_l s_{kl} + sum_l up_l t_{kl} + w_k
    //                   >= outflow(t^k) phi - inflow(t^k) phi.
    for (k, &(_, sink)) in pairs.iter().enumerate() {
        let mut row = RowBuilder::new();
        for l in 0..k_count {
            row.add(idx(VarKey::ObjScale { commodity: k, driver: l }), -poly.upper[l]);
            row.add(idx(VarKey::ObjMix { commodity: k, driver: l }), poly.upper[l]);
        }
        row.add(idx(VarKey::ObjUnit { commodity: k }), 1.0);
        for &a in &adj.outgoing[sink] {
            row.add(phi(k, a), -1.0);
        }
        for &a in &adj.incoming[sink] {
            row.add(phi(k, a), 1.0);
        }
        lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
    }
    // Sink-slope rows: r + s - t >= 1_{k=l} + outflow(t^k) PHI - inflow(t^k) PHI.
    for (k, &(_, sink)) in pairs.iter().enumerate() {
        for l in 0..k_count {
            let mut row = RowBuilder::new();
            row.add(idx(VarKey::ObjLink { commodity: k, driver: l }), 1.0);
            row.add(idx(VarKey::ObjScale { commodity: k, driver: l }), 1.0);
            row.add(idx(VarKey::ObjMix { commodity: k, driver: l }), -1.0);
            for &a in &adj.outgoing[sink] {
                row.add(slope(k, l, a), -1.0);
            }
            for &a in &adj.incoming[sink] {
                row.add(slope(k, l, a), 1.0);
            }
            let rhs = if k == l { 1.0 } else { 0.0 };
            lp.add_row(RowSense::Ge, rhs, &row.into_entries());
        }
    }
    // Flow-offset rows: inflow(v) phi - outflow(v) phi
    //                   - sum_i b_i alpha - sum_l (up_l bu - lo_l bl) >= 0.
    for (k, &(_, _)) in pairs.iter().enumerate() {
        for &v in &inter(k) {
            let mut row = RowBuilder::new();
            for &a in &adj.incoming[v] {
                row.add(phi(k, a), 1.0);
            }
            for &a in &adj.outgoing[v] {
                row.add(phi(k, a), -1.0);
            }
            for i in 0..m_rows {
                row.add(idx(VarKey::FlowPoly { commodity: k, node: v, row: i }), -poly.rhs[i]);
            }
            for l in 0..k_count {
                row.add(
                    idx(VarKey::FlowUpper { commodity: k, node: v, driver: l }),
                    -poly.upper[l],
                );
                row.add(
                    idx(VarKey::FlowLower { commodity: k, node: v, driver: l }),
                    poly.lower[l],
                );
            }
            lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
        }
    }
    // Flow-slope rows: sum_i V[i][l] alpha + bu - bl
    //                  >= outflow(v) PHI - inflow(v) PHI.
    for (k, &(_, _)) in pairs.iter().enumerate() {
        for &v in &inter(k) {
            for l in 0..k_count {
                let mut row = RowBuilder::new();
                for i in 0..m_rows {
                    row.add(
                        idx(VarKey::FlowPoly { commodity: k, node: v, row: i }),
                        poly.rows[i][l],
                    );
                }
                row.add(idx(VarKey::FlowUpper { commodity: k, node: v, driver: l }), 1.0);
                row.add(idx(VarKey::FlowLower { commodity: k, node: v, driver: l }), -1.0);
                for &a in &adj.outgoing[v] {
                    row.add(slope(k, l, a), -1.0);
                }
                for &a in &adj.incoming[v] {
                    row.add(slope(k, l, a), 1.0);
                }
                lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
            }
        }
    }
    // Capacity rows: sum_k phi + sum_i b_i pi + sum_l (up_l ru - lo_l rl)
    //                - x_a <= u_a.
    for (a, arc) in net.arcs.iter().enumerate() {
        let mut row = RowBuilder::new();
        for k in 0..k_count {
            row.add(phi(k, a), 1.0);
        }
        for i in 0..m_rows {
            row.add(idx(VarKey::CapPoly { arc: a, row: i }), poly.rhs[i]);
        }
        for l in 0..k_count {
            row.add(idx(VarKey::CapUpper { arc: a, driver: l }), poly.upper[l]);
            row.add(idx(VarKey::CapLower { arc: a, driver: l }), -poly.lower[l]);
        }
        row.add(idx(VarKey::Invest { arc: a }), -1.0);
        lp.add_row(RowSense::Le, arc.capacity, &row.into_entries());
    }
    // Capacity-slope rows: sum_i V[i][l] pi + ru - rl >= sum_k PHI.
    for a in 0..num_arcs {
        for l in 0..k_count {
            let mut row = RowBuilder::new();
            for i in 0..m_rows {
                row.add(idx(VarKey::CapPoly { arc: a, row: i }), poly.rows[i][l]);
            }
            row.add(idx(VarKey::CapUpper { arc: a, driver: l }), 1.0);
            row.add(idx(VarKey::CapLower { arc: a, driver: l }), -1.0);
            for k in 0..k_count {
                row.add(slope(k, l, a), -1.0);
            }
            lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
        }
    }
    // Positivity-offset rows: phi - sum_i b_i xi - sum_l (up_l zu - lo_l zl) >= 0.
    for k in 0..k_count {
        for a in 0..num_arcs {
            let mut row = RowBuilder::new();
            row.add(phi(k, a), 1.0);
            for i in 0..m_rows {
                row.add(idx(VarKey::PosPoly { commodity: k, arc: a, row: i }), -poly.rhs[i]);
            }
            for l in 0..k_count {
                row.add(idx(VarKey::PosUpper { commodity: k, driver: l, arc: a }), -poly.upper[l]);
                row.add(idx(VarKey::PosLower { commodity: k, driver: l, arc: a }), poly.lower[l]);
            }
            lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
        }
    }
    // Positivity-slope rows: sum_i V[i][l] xi + zu - zl >= -PHI.
    for k in 0..k_count {
        for a in 0..num_arcs {
            for l in 0..k_count {
                let mut row = RowBuilder::new();
                for i in 0..m_rows {
                    row.add(
                        idx(VarKey::PosPoly { commodity: k, arc: a, row: i }),
                        poly.rows[i][l],
                    );
                }
                row.add(idx(VarKey::PosUpper { commodity: k, driver: l, arc: a }), 1.0);
                row.add(idx(VarKey::PosLower { commodity: k, driver: l, arc: a }), -1.0);
                row.add(slope(k, l, a), 1.0);
                lp.add_row(RowSense::Ge, 0.0, &row.into_entries());
            }
        }
    }

    Ok((lp, cat))
}

/// Closed-form column count of the affine counterpart, used by tests and
/// capacity planning.
pub fn aarc_column_count(num_arcs: usize, num_nodes: usize, k: usize, m: usize) -> usize {
    let inter = num_nodes - 2;
    num_arcs                      // x
        + k * num_arcs            // phi
        + k * k * num_arcs        // PHI
        + m                       // q
        + 3 * k * k               // r, s, t
        + 3 * k                   // u, v, w
        + k * inter * m           // alpha
        + 2 * k * k * inter       // beta
        + num_arcs * m            // pi
        + 2 * k * num_arcs        // rho
        + k * num_arcs * m        // xi
        + 2 * k * k * num_arcs    // zeta
}

/// Closed-form row count of the affine counterpart.
pub fn aarc_row_count(num_arcs: usize, num_nodes: usize, k: usize) -> usize {
    let inter = num_nodes - 2;
    k                              // driver rows
        + k                        // sink-offset rows
        + k * k                    // sink-slope rows
        + k * inter                // flow-offset rows
        + k * k * inter            // flow-slope rows
        + num_arcs                 // capacity rows
        + num_arcs * k             // capacity-slope rows
        + k * num_arcs             // positivity-offset rows
        + k * k * num_arcs         // positivity-slope rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve, SolveOptions, SolveStatus};
    use crate::model::build::build_nominal;
    use crate::model::testutil::two_node_net;
    use crate::sndlib::ScenarioSet;
    use crate::uncertainty::sample_hyperplanes;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    fn singleton_poly(point: &[f64]) -> Polyhedron {
        let k = point.len();
        let sum: f64 = point.iter().sum();
        Polyhedron {
            rows: vec![vec![1.0 / k as f64; k]],
            rhs: vec![sum / k as f64],
            lower: point.to_vec(),
            upper: point.to_vec(),
            seed: None,
        }
    }

    #[test]
    fn counts_match_formulas() {
        let net = two_node_net();
        let poly = singleton_poly(&[4.0]);
        let (lp, cat) = build_aarc(&net, &[(0, 1)], &poly, 2.0).unwrap();
        assert_eq!(lp.num_cols(), aarc_column_count(1, 2, 1, 1));
        assert_eq!(lp.num_rows(), aarc_row_count(1, 2, 1));
        assert_eq!(cat.len(), lp.num_cols());
    }

    #[test]
    fn singleton_polyhedron_matches_nominal() {
        let net = two_node_net();
        let point = [4.0];
        let poly = singleton_poly(&point);
        let (lp_a, _) = build_aarc(&net, &[(0, 1)], &poly, 2.0).unwrap();
        let (lp_n, _) = build_nominal(&net, &[(0, 1)], &point, 2.0).unwrap();
        let a = solve(&lp_a, &opts()).unwrap();
        let n = solve(&lp_n, &opts()).unwrap();
        assert_eq!(a.status, SolveStatus::Optimal);
        assert!((a.objective - n.objective).abs() < 1e-6, "{} vs {}", a.objective, n.objective);
    }

    #[test]
    fn box_interval_guards_worst_case() {
        // Demands in [3, 5] on the single arc; sigma = 2 makes full
        // expansion to the worst case optimal, and the policy f(d) = d is
        // feasible, so the counterpart is tight at 5.
        let net = two_node_net();
        let train = ScenarioSet::from_rows(
            vec![("s".into(), "t".into())],
            vec![vec![3.0], vec![5.0]],
        )
        .unwrap();
        let poly = sample_hyperplanes(&train, 1, 0).unwrap();
        assert_eq!(poly.lower, vec![3.0]);
        assert_eq!(poly.upper, vec![5.0]);
        let (lp, cat) = build_aarc(&net, &[(0, 1)], &poly, 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective - 5.0).abs() < 1e-6, "objective {}", sol.objective);
        let x = crate::model::extract_first_stage(&sol, &cat).unwrap();
        assert!((x[0] - 5.0).abs() < 1e-6);
    }

    #[test]
    fn zero_penalty_builds_nothing() {
        let net = two_node_net();
        let poly = singleton_poly(&[4.0]);
        let (lp, cat) = build_aarc(&net, &[(0, 1)], &poly, 0.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!(sol.objective.abs() < 1e-9);
        let x = crate::model::extract_first_stage(&sol, &cat).unwrap();
        assert!(x[0].abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let net = two_node_net();
        let poly = singleton_poly(&[1.0, 2.0]);
        assert!(matches!(
            build_aarc(&net, &[(0, 1)], &poly, 1.0),
            Err(ModelError::DimensionMismatch { .. })
        ));
    }

    /// A 6-node / 10-arc / 4-commodity instance for stronger cross-checks.
    fn wide_instance() -> (crate::sndlib::NetworkSpec, Vec<(usize, usize)>, ScenarioSet) {
        use crate::sndlib::Arc;
        let arcs = [
            (0usize, 1usize, 1.0, 1.3),
            (1, 2, 0.0, 2.1),
            (0, 3, 0.5, 1.7),
            (3, 2, 0.0, 2.6),
            (1, 4, 0.0, 1.1),
            (4, 2, 0.5, 1.9),
            (3, 4, 1.0, 0.8),
            (4, 5, 0.0, 1.4),
            (2, 5, 0.5, 2.3),
            (5, 2, 0.0, 2.2),
        ];
        let net = crate::sndlib::NetworkSpec::new(
            (0..6).map(|i| format!("v{i}")).collect(),
            arcs.iter()
                .map(|&(tail, head, capacity, cost)| Arc { tail, head, capacity, cost })
                .collect(),
        )
        .unwrap();
        let scen = ScenarioSet::from_rows(
            vec![
                ("v0".into(), "v2".into()),
                ("v0".into(), "v5".into()),
                ("v1".into(), "v5".into()),
                ("v3".into(), "v2".into()),
            ],
            vec![
                vec![2.0, 1.0, 0.5, 1.5],
                vec![3.0, 0.5, 1.0, 0.0],
                vec![1.0, 2.0, 0.0, 2.0],
                vec![2.5, 1.5, 1.5, 1.0],
                vec![0.5, 0.0, 2.0, 0.5],
            ],
        )
        .unwrap();
        let pairs = crate::model::resolve_commodities(&net, scen.commodities()).unwrap();
        (net, pairs, scen)
    }

    /// At the optimum, the objective splits exactly into the investment
    /// cost plus the relaxed worst-case outsourcing term of the optimal
    /// policy (the monolithic LP and the standalone fixed-policy dual
    /// agree).
    #[test]
    fn objective_decomposes_into_invest_plus_relaxed_term() {
        let (net, pairs, scen) = wide_instance();
        let poly = sample_hyperplanes(&scen, 3, 41).unwrap();
        for sigma in [0.9, 2.2] {
            let (lp, cat) = build_aarc(&net, &pairs, &poly, sigma).unwrap();
            let sol = solve(&lp, &opts()).unwrap();
            assert_eq!(sol.status, SolveStatus::Optimal);
            let x = crate::model::extract_first_stage(&sol, &cat).unwrap();
            let policy = crate::model::extract_affine_policy(&sol, &cat).unwrap();
            let relaxed = crate::model::worst_case_outsourcing_relaxed(
                &poly, &policy, sigma, &net, &pairs, &opts(),
            )
            .unwrap();
            let recomposed = net.investment_cost(&x) + relaxed;
            assert!(
                (recomposed - sol.objective).abs() <= 1e-6 * (1.0 + sol.objective.abs()),
                "sigma {sigma}: invest + relaxed = {recomposed} vs objective {}",
                sol.objective
            );
        }
    }

    /// The optimal policy satisfies the original universally quantified
    /// constraints exactly: each family's inner worst case over the
    /// polyhedron (solved directly, not through the dualization) respects
    /// the offsets.
    #[test]
    fn optimal_policy_worst_cases_respect_original_constraints() {
        let (net, pairs, scen) = wide_instance();
        let poly = sample_hyperplanes(&scen, 2, 17).unwrap();
        let sigma = 1.6;
        let (lp, cat) = build_aarc(&net, &pairs, &poly, sigma).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let x = crate::model::extract_first_stage(&sol, &cat).unwrap();
        let policy = crate::model::extract_affine_policy(&sol, &cat).unwrap();
        let adj = net.adjacency();
        let tol = 1e-6;

        // Flow conservation: worst case of outflow-minus-inflow slopes
        // must stay below the offset net inflow.
        for (k, &(src, sink)) in pairs.iter().enumerate() {
            for v in 0..net.num_nodes() {
                if v == src || v == sink {
                    continue;
                }
                let coeffs = crate::model::flow_worst_coeffs(&net, &policy, k, v);
                let worst = crate::model::max_over_polyhedron(&poly, &coeffs, &opts()).unwrap();
                let offset_in: f64 = adj.incoming[v].iter().map(|&a| policy.offset[k][a]).sum();
                let offset_out: f64 = adj.outgoing[v].iter().map(|&a| policy.offset[k][a]).sum();
                assert!(
                    worst <= offset_in - offset_out + tol,
                    "flow family violated at k={k}, v={v}: {worst} > {}",
                    offset_in - offset_out
                );
            }
        }
        // Capacity: total offset plus worst-case slope load fits u + x.
        for (a, arc) in net.arcs.iter().enumerate() {
            let coeffs = crate::model::capacity_worst_coeffs(&policy, a);
            let worst = crate::model::max_over_polyhedron(&poly, &coeffs, &opts()).unwrap();
            let offsets: f64 = (0..pairs.len()).map(|k| policy.offset[k][a]).sum();
            assert!(
                offsets + worst <= arc.capacity + x[a] + tol,
                "capacity family violated on arc {a}"
            );
        }
        // Positivity: the offset covers the worst negative slope pull.
        for k in 0..pairs.len() {
            for a in 0..net.num_arcs() {
                let coeffs = crate::model::positivity_worst_coeffs(&policy, k, a);
                let worst = crate::model::max_over_polyhedron(&poly, &coeffs, &opts()).unwrap();
                assert!(
                    policy.offset[k][a] >= worst - tol,
                    "positivity family violated at k={k}, a={a}"
                );
            }
        }
    }

    /// Worst case over all polyhedron vertices (fully adjustable) stays
    /// below the affine counterpart on the wider instance too.
    #[test]
    fn vertex_enumeration_lower_bounds_the_counterpart() {
        let (net, pairs, scen) = wide_instance();
        let poly = sample_hyperplanes(&scen, 2, 23).unwrap();
        let sigma = 1.4;
        let vertices = crate::lp::vertex_enumerate(&poly).unwrap();
        assert!(vertices.len() >= 4);
        let set = crate::uncertainty::DiscreteSet { scenarios: vertices, lambda: 1.0 };
        let (lp_d, _) = crate::model::build_discrete_robust(&net, &pairs, &set, sigma).unwrap();
        let discrete = solve(&lp_d, &opts()).unwrap();
        let (lp_a, _) = build_aarc(&net, &pairs, &poly, sigma).unwrap();
        let aarc = solve(&lp_a, &opts()).unwrap();
        assert_eq!(discrete.status, SolveStatus::Optimal);
        assert_eq!(aarc.status, SolveStatus::Optimal);
        assert!(
            discrete.objective <= aarc.objective + 1e-7,
            "exact-over-vertices {} exceeds counterpart {}",
            discrete.objective,
            aarc.objective
        );
    }
}
