//! Affine-policy extraction and the worst-case machinery used to verify
//! the dualized counterpart: direct inner maximizations over the demand
//! polyhedron, their hand-dualized twins, and an exact (exponential)
//! worst-case outsourcing oracle.

use crate::lp::{solve, LinearProgram, LpSolution, RowSense, SolveOptions, SolveStatus};
use crate::sndlib::NetworkSpec;
use crate::uncertainty::Polyhedron;

use super::{ModelError, VarKey, VariableCatalog};

/// Exact-oracle commodity cap (the sign patterns grow as `2^K`).
pub const ORACLE_MAX_COMMODITIES: usize = 12;

/// The affine flow rule `f^k_a(d) = offset[k][a] + sum_l slope[k][l][a] d_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePolicy {
    pub offset: Vec<Vec<f64>>,
    pub slope: Vec<Vec<Vec<f64>>>,
}

impl AffinePolicy {
    pub fn num_commodities(&self) -> usize {
        self.offset.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.offset.first().map_or(0, Vec::len)
    }

    /// Realized flows for a demand vector, per commodity and arc.
    pub fn flows(&self, demand: &[f64]) -> Vec<Vec<f64>> {
        self.offset
            .iter()
            .zip(&self.slope)
            .map(|(off, slopes)| {
                let mut f = off.clone();
                for (l, &d) in demand.iter().enumerate() {
                    if d != 0.0 {
                        for (a, v) in f.iter_mut().enumerate() {
                            *v += slopes[l][a] * d;
                        }
                    }
                }
                f
            })
            .collect()
    }
}

/// Reads the affine policy out of a counterpart solution.
pub fn extract_affine_policy(
    sol: &LpSolution,
    cat: &VariableCatalog,
) -> Result<AffinePolicy, ModelError> {
    if sol.x.len() != cat.len() {
        return Err(ModelError::SolutionLength { expected: cat.len(), got: sol.x.len() });
    }
    let mut k_count = 0;
    let mut num_arcs = 0;
    for (_, key) in cat.iter() {
        if let VarKey::PolicyOffset { commodity, arc } = key {
            k_count = k_count.max(commodity + 1);
            num_arcs = num_arcs.max(arc + 1);
        }
    }
    if k_count == 0 {
        return Err(ModelError::MissingVariable("phi".into()));
    }
    let mut offset = vec![vec![0.0; num_arcs]; k_count];
    let mut slope = vec![vec![vec![0.0; num_arcs]; k_count]; k_count];
    for k in 0..k_count {
        for a in 0..num_arcs {
            let col = cat
                .index_of(&VarKey::PolicyOffset { commodity: k, arc: a })
                .ok_or_else(|| ModelError::MissingVariable(format!("phi_k{k}_a{a}")))?;
            offset[k][a] = sol.x[col];
            for l in 0..k_count {
                let col = cat
                    .index_of(&VarKey::PolicySlope { commodity: k, driver: l, arc: a })
                    .ok_or_else(|| {
                        ModelError::MissingVariable(format!("Phi_k{k}_l{l}_a{a}"))
                    })?;
                slope[k][l][a] = sol.x[col];
            }
        }
    }
    Ok(AffinePolicy { offset, slope })
}

/// `max { coeffs . d : d in poly }` solved directly as an LP.
pub fn max_over_polyhedron(
    poly: &Polyhedron,
    coeffs: &[f64],
    opts: &SolveOptions,
) -> Result<f64, ModelError> {
    let k = poly.dim();
    if coeffs.len() != k {
        return Err(ModelError::DimensionMismatch { left: coeffs.len(), right: k });
    }
    let mut lp = LinearProgram::new();
    for l in 0..k {
        lp.add_col(-coeffs[l], poly.lower[l], poly.upper[l]);
    }
    for (row, &b) in poly.rows.iter().zip(&poly.rhs) {
        let entries: Vec<(usize, f64)> =
            row.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(l, &v)| (l, v)).collect();
        lp.add_row(RowSense::Le, b, &entries);
    }
    let sol = solve(&lp, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(ModelError::InnerSolve(sol.status));
    }
    Ok(-sol.objective)
}

/// The hand-dualized counterpart of [`max_over_polyhedron`]:
/// `min { b'alpha + upper'bu - lower'bl :
///        V'alpha + bu - bl >= coeffs, all vars >= 0 }`.
pub fn min_dual_support(
    poly: &Polyhedron,
    coeffs: &[f64],
    opts: &SolveOptions,
) -> Result<f64, ModelError> {
    let k = poly.dim();
    if coeffs.len() != k {
        return Err(ModelError::DimensionMismatch { left: coeffs.len(), right: k });
    }
    let m = poly.num_rows();
    let mut lp = LinearProgram::new();
    let alpha: Vec<usize> =
        (0..m).map(|i| lp.add_col(poly.rhs[i], 0.0, f64::INFINITY)).collect();
    let upper: Vec<usize> =
        (0..k).map(|l| lp.add_col(poly.upper[l], 0.0, f64::INFINITY)).collect();
    let lower: Vec<usize> =
        (0..k).map(|l| lp.add_col(-poly.lower[l], 0.0, f64::INFINITY)).collect();
    for l in 0..k {
        let mut entries = Vec::with_capacity(m + 2);
        for i in 0..m {
            if poly.rows[i][l] != 0.0 {
                entries.push((alpha[i], poly.rows[i][l]));
            }
        }
        entries.push((upper[l], 1.0));
        entries.push((lower[l], -1.0));
        lp.add_row(RowSense::Ge, coeffs[l], &entries);
    }
    let sol = solve(&lp, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(ModelError::InnerSolve(sol.status));
    }
    Ok(sol.objective)
}

/// Demand coefficients of the inner flow-conservation worst case for
/// commodity `k` at node `v`: `outflow(v) PHI - inflow(v) PHI` per driver.
pub fn flow_worst_coeffs(
    net: &NetworkSpec,
    policy: &AffinePolicy,
    k: usize,
    node: usize,
) -> Vec<f64> {
    let adj = net.adjacency();
    let k_count = policy.num_commodities();
    (0..k_count)
        .map(|l| {
            let outgoing: f64 = adj.outgoing[node].iter().map(|&a| policy.slope[k][l][a]).sum();
            let incoming: f64 = adj.incoming[node].iter().map(|&a| policy.slope[k][l][a]).sum();
            outgoing - incoming
        })
        .collect()
}

/// Demand coefficients of the inner capacity worst case on arc `a`:
/// `sum_k PHI^{k,l}_a` per driver.
pub fn capacity_worst_coeffs(policy: &AffinePolicy, arc: usize) -> Vec<f64> {
    let k_count = policy.num_commodities();
    (0..k_count)
        .map(|l| (0..k_count).map(|k| policy.slope[k][l][arc]).sum())
        .collect()
}

/// Demand coefficients of the inner positivity worst case for commodity
/// `k` on arc `a`: `-PHI^{k,l}_a` per driver.
pub fn positivity_worst_coeffs(policy: &AffinePolicy, k: usize, arc: usize) -> Vec<f64> {
    (0..policy.num_commodities()).map(|l| -policy.slope[k][l][arc]).collect()
}

/// Per-commodity affine outsourcing expression `g_k(d) = const_k + lin_k . d`
/// under a fixed policy: demand at the sink minus the net policy inflow.
fn outsourcing_terms(
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    policy: &AffinePolicy,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let adj = net.adjacency();
    let k_count = pairs.len();
    let mut consts = Vec::with_capacity(k_count);
    let mut lins = Vec::with_capacity(k_count);
    for (k, &(_, sink)) in pairs.iter().enumerate() {
        let inflow_off: f64 = adj.incoming[sink].iter().map(|&a| policy.offset[k][a]).sum();
        let outflow_off: f64 = adj.outgoing[sink].iter().map(|&a| policy.offset[k][a]).sum();
        consts.push(outflow_off - inflow_off);
        let mut lin = vec![0.0; k_count];
        for (l, lv) in lin.iter_mut().enumerate() {
            let inflow: f64 = adj.incoming[sink].iter().map(|&a| policy.slope[k][l][a]).sum();
            let outflow: f64 = adj.outgoing[sink].iter().map(|&a| policy.slope[k][l][a]).sum();
            *lv = outflow - inflow;
            if l == k {
                *lv += 1.0;
            }
        }
        lins.push(lin);
    }
    (consts, lins)
}

/// The true worst-case outsourcing cost of a fixed affine policy:
/// `sigma * max over d in poly of sum_k [g_k(d)]_+`, computed exactly by
/// enumerating all sign patterns (hence the commodity cap).
pub fn worst_case_outsourcing_oracle(
    poly: &Polyhedron,
    policy: &AffinePolicy,
    sigma: f64,
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    opts: &SolveOptions,
) -> Result<f64, ModelError> {
    let k_count = pairs.len();
    if k_count > ORACLE_MAX_COMMODITIES {
        return Err(ModelError::TooManyCommodities {
            got: k_count,
            max: ORACLE_MAX_COMMODITIES,
        });
    }
    if poly.dim() != k_count {
        return Err(ModelError::DimensionMismatch { left: poly.dim(), right: k_count });
    }
    let (consts, lins) = outsourcing_terms(net, pairs, policy);
    let mut best = 0.0f64; // the empty sign pattern
    for mask in 1u32..(1 << k_count) {
        let mut coeffs = vec![0.0; k_count];
        let mut constant = 0.0;
        for k in 0..k_count {
            if mask & (1 << k) != 0 {
                constant += consts[k];
                for (l, c) in coeffs.iter_mut().enumerate() {
                    *c += lins[k][l];
                }
            }
        }
        let value = constant + max_over_polyhedron(poly, &coeffs, opts)?;
        best = best.max(value);
    }
    Ok(sigma * best)
}

/// The counterpart's (conservative) worst-case outsourcing cost for a fixed
/// policy: the indicator-relaxed subproblem dual, solved as a small LP. By
/// construction this is an upper bound on
/// [`worst_case_outsourcing_oracle`].
pub fn worst_case_outsourcing_relaxed(
    poly: &Polyhedron,
    policy: &AffinePolicy,
    sigma: f64,
    net: &NetworkSpec,
    pairs: &[(usize, usize)],
    opts: &SolveOptions,
) -> Result<f64, ModelError> {
    let k_count = pairs.len();
    if poly.dim() != k_count {
        return Err(ModelError::DimensionMismatch { left: poly.dim(), right: k_count });
    }
    let m = poly.num_rows();
    let (consts, lins) = outsourcing_terms(net, pairs, policy);

    let mut lp = LinearProgram::new();
    let q: Vec<usize> = (0..m).map(|i| lp.add_col(poly.rhs[i], 0.0, f64::INFINITY)).collect();
    let mut r = vec![vec![0; k_count]; k_count];
    let mut s = vec![vec![0; k_count]; k_count];
    let mut t = vec![vec![0; k_count]; k_count];
    for k in 0..k_count {
        for l in 0..k_count {
            r[k][l] = lp.add_col(0.0, 0.0, f64::INFINITY);
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            s[k][l] = lp.add_col(0.0, 0.0, f64::INFINITY);
        }
    }
    for k in 0..k_count {
        for l in 0..k_count {
            t[k][l] = lp.add_col(poly.upper[l], 0.0, f64::INFINITY);
        }
    }
    let u: Vec<usize> =
        (0..k_count).map(|l| lp.add_col(poly.upper[l], 0.0, f64::INFINITY)).collect();
    let v: Vec<usize> =
        (0..k_count).map(|l| lp.add_col(-poly.lower[l], 0.0, f64::INFINITY)).collect();
    let w: Vec<usize> = (0..k_count).map(|_| lp.add_col(1.0, 0.0, f64::INFINITY)).collect();

    for l in 0..k_count {
        let mut entries = Vec::new();
        for i in 0..m {
            if poly.rows[i][l] != 0.0 {
                entries.push((q[i], poly.rows[i][l]));
            }
        }
        for k in 0..k_count {
            entries.push((r[k][l], -1.0));
            entries.push((t[k][l], 1.0));
        }
        entries.push((u[l], 1.0));
        entries.push((v[l], -1.0));
        entries.sort_by_key(|e| e.0);
        lp.add_row(RowSense::Ge, 0.0, &entries);
    }
    for k in 0..k_count {
        let mut entries = Vec::new();
        for l in 0..k_count {
            if poly.upper[l] != 0.0 {
                entries.push((s[k][l], -poly.upper[l]));
                entries.push((t[k][l], poly.upper[l]));
            }
        }
        entries.push((w[k], 1.0));
        entries.sort_by_key(|e| e.0);
        lp.add_row(RowSense::Ge, consts[k], &entries);
    }
    for k in 0..k_count {
        for l in 0..k_count {
            let entries = [(r[k][l], 1.0), (s[k][l], 1.0), (t[k][l], -1.0)];
            lp.add_row(RowSense::Ge, lins[k][l], &entries);
        }
    }

    let sol = solve(&lp, opts)?;
    if sol.status != SolveStatus::Optimal {
        return Err(ModelError::InnerSolve(sol.status));
    }
    Ok(sigma * sol.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_aarc;
    use crate::model::testutil::two_node_net;
    use crate::rng::SplitMix64;
    use crate::sndlib::{Arc, ScenarioSet};
    use crate::uncertainty::sample_hyperplanes;

    fn opts() -> SolveOptions {
        SolveOptions::default()
    }

    fn box_poly(lower: Vec<f64>, upper: Vec<f64>) -> Polyhedron {
        let k = lower.len();
        let sum_up: f64 = upper.iter().sum();
        Polyhedron {
            rows: vec![vec![1.0 / k as f64; k]],
            rhs: vec![sum_up / k as f64],
            lower,
            upper,
            seed: None,
        }
    }

    #[test]
    fn support_duality_agrees_on_random_data() {
        let mut rng = SplitMix64::new(2024);
        let train = ScenarioSet::from_rows(
            vec![("a".into(), "b".into()), ("b".into(), "c".into()), ("a".into(), "c".into())],
            (0..6)
                .map(|_| (0..3).map(|_| rng.uniform(0.0, 4.0)).collect())
                .collect(),
        )
        .unwrap();
        let poly = sample_hyperplanes(&train, 3, 11).unwrap();
        for _ in 0..25 {
            let coeffs: Vec<f64> = (0..3).map(|_| rng.uniform(-2.0, 2.0)).collect();
            let primal = max_over_polyhedron(&poly, &coeffs, &opts()).unwrap();
            let dual = min_dual_support(&poly, &coeffs, &opts()).unwrap();
            assert!((primal - dual).abs() <= 1e-6 * (1.0 + primal.abs()), "{primal} vs {dual}");
        }
    }

    #[test]
    fn zero_policy_worst_case_is_max_demand() {
        // No flow at all: worst case outsources the largest demand.
        let net = two_node_net();
        let poly = box_poly(vec![3.0], vec![5.0]);
        let policy = AffinePolicy { offset: vec![vec![0.0]], slope: vec![vec![vec![0.0]]] };
        let value =
            worst_case_outsourcing_oracle(&poly, &policy, 2.0, &net, &[(0, 1)], &opts()).unwrap();
        assert!((value - 10.0).abs() < 1e-9); // sigma * 5
    }

    #[test]
    fn exact_routing_policy_outsources_nothing() {
        // f(d) = d on the single arc: net inflow equals demand.
        let net = two_node_net();
        let poly = box_poly(vec![3.0], vec![5.0]);
        let policy = AffinePolicy { offset: vec![vec![0.0]], slope: vec![vec![vec![1.0]]] };
        let value =
            worst_case_outsourcing_oracle(&poly, &policy, 2.0, &net, &[(0, 1)], &opts()).unwrap();
        assert!(value.abs() < 1e-9);
        let relaxed =
            worst_case_outsourcing_relaxed(&poly, &policy, 2.0, &net, &[(0, 1)], &opts()).unwrap();
        assert!(relaxed.abs() < 1e-9);
    }

    #[test]
    fn relaxed_bound_dominates_oracle_on_random_policies() {
        // Two commodities over a shared two-arc network.
        let net = NetworkSpec::new(
            vec!["s".into(), "u".into(), "t".into()],
            vec![
                Arc { tail: 0, head: 1, capacity: 1.0, cost: 1.0 },
                Arc { tail: 1, head: 2, capacity: 1.0, cost: 1.0 },
            ],
        )
        .unwrap();
        let pairs = [(0, 2), (1, 2)];
        let train = ScenarioSet::from_rows(
            vec![("s".into(), "t".into()), ("u".into(), "t".into())],
            vec![vec![1.0, 2.0], vec![2.5, 0.5], vec![1.5, 1.5]],
        )
        .unwrap();
        let poly = sample_hyperplanes(&train, 2, 5).unwrap();
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let rand_mat = |rng: &mut SplitMix64| -> Vec<Vec<f64>> {
                (0..2).map(|_| (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect()
            };
            let policy = AffinePolicy {
                offset: rand_mat(&mut rng),
                slope: vec![
                    vec![
                        (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                        (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    ],
                    vec![
                        (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                        (0..2).map(|_| rng.uniform(-1.0, 1.0)).collect(),
                    ],
                ],
            };
            let exact =
                worst_case_outsourcing_oracle(&poly, &policy, 1.5, &net, &pairs, &opts()).unwrap();
            let relaxed =
                worst_case_outsourcing_relaxed(&poly, &policy, 1.5, &net, &pairs, &opts())
                    .unwrap();
            assert!(exact <= relaxed + 1e-7, "oracle {exact} > relaxed {relaxed}");
        }
    }

    #[test]
    fn oracle_commodity_cap() {
        let net = two_node_net();
        let k = ORACLE_MAX_COMMODITIES + 1;
        let poly = box_poly(vec![0.0; k], vec![1.0; k]);
        let policy = AffinePolicy {
            offset: vec![vec![0.0]; k],
            slope: vec![vec![vec![0.0]; k]; k],
        };
        let pairs: Vec<(usize, usize)> = (0..k).map(|_| (0, 1)).collect();
        assert!(matches!(
            worst_case_outsourcing_oracle(&poly, &policy, 1.0, &net, &pairs, &opts()),
            Err(ModelError::TooManyCommodities { .. })
        ));
    }

    #[test]
    fn extracted_policy_stays_nonnegative_inside_polyhedron() {
        let net = two_node_net();
        let train = ScenarioSet::from_rows(
            vec![("s".into(), "t".into())],
            vec![vec![3.0], vec![5.0], vec![4.0]],
        )
        .unwrap();
        let poly = sample_hyperplanes(&train, 2, 3).unwrap();
        let (lp, cat) = build_aarc(&net, &[(0, 1)], &poly, 2.0).unwrap();
        let sol = solve(&lp, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let policy = extract_affine_policy(&sol, &cat).unwrap();
        let mut rng = SplitMix64::new(9);
        let mut checked = 0;
        while checked < 200 {
            let d: Vec<f64> = poly
                .lower
                .iter()
                .zip(&poly.upper)
                .map(|(lo, up)| rng.uniform(*lo, *up))
                .collect();
            if !poly.contains(&d, 1e-9) {
                continue;
            }
            checked += 1;
            for flows in policy.flows(&d) {
                for f in flows {
                    assert!(f >= -1e-6, "negative flow {f}");
                }
            }
        }
    }
}
