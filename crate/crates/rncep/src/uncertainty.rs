//! Data-driven uncertainty descriptions built from demand scenarios:
//! the lambda-scaled discrete set, the sampled polyhedron, and the
//! zero-inflated uniform mean, along with train/eval splitting and top-K
//! commodity selection.
//!
//! Conventions fixed here and relied upon elsewhere:
//!
//! - The per-commodity scenario average divides the sum over *all*
//!   scenarios by the number of *positive* ones. With zeros present this is
//!   larger than the plain mean; commodities that are zero in every
//!   scenario are degenerate and blend to zero.
//! - A sampled polyhedron always carries the sum-constraint `(1/K) . d`
//!   as row 0; the hyperplane count passed to [`sample_hyperplanes`] is the
//!   total row count including that row. Each right-hand side is tightened
//!   to the maximum weighted scenario sum, so every training scenario is
//!   contained and every row touches at least one of them.

use thiserror::Error;

use crate::rng::SplitMix64;
use crate::sndlib::{ScenarioSet, SndlibError};

/// Default absolute tolerance for containment checks.
pub const CONTAINS_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum UncertaintyError {
    #[error("stride {stride} exceeds scenario count {scenarios}")]
    StrideTooLarge { stride: usize, scenarios: usize },
    #[error("stride must be at least 1")]
    ZeroStride,
    #[error("commodity count {requested} out of range (have {available})")]
    BadCommodityCount { requested: usize, available: usize },
    #[error("commodity index {index} out of range ({count} commodities)")]
    BadCommodityIndex { index: usize, count: usize },
    #[error("lambda {0} outside [0, 1]")]
    BadLambda(f64),
    #[error("hyperplane count must be at least 1 (the sum-constraint row)")]
    NoHyperplanes,
    #[error("empty scenario set")]
    EmptyScenarioSet,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Data(#[from] SndlibError),
    #[error("polyhedron parse: {0}")]
    PolyhedronParse(String),
}

/// A finite demand set `d^i(lambda) = lambda r^i + (1 - lambda) rhat`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteSet {
    pub scenarios: Vec<Vec<f64>>,
    pub lambda: f64,
}

impl DiscreteSet {
    pub fn num_scenarios(&self) -> usize {
        self.scenarios.len()
    }

    pub fn dim(&self) -> usize {
        self.scenarios.first().map_or(0, Vec::len)
    }
}

/// `{ d : V d <= b, lower <= d <= upper }`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    /// M rows of V.
    pub rows: Vec<Vec<f64>>,
    /// Right-hand sides b.
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Seed used by [`sample_hyperplanes`], if any.
    pub seed: Option<u64>,
}

impl Polyhedron {
    /// Number of demand dimensions K.
    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Number of general rows M (box bounds not counted).
    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Builds a polyhedron from given constraint normals, tightening each
    /// right-hand side to the maximum weighted sum over the training
    /// scenarios and attaching the componentwise scenario bounds.
    pub fn from_rows(rows: Vec<Vec<f64>>, train: &ScenarioSet) -> Result<Self, UncertaintyError> {
        if train.num_scenarios() == 0 {
            return Err(UncertaintyError::EmptyScenarioSet);
        }
        let k = train.num_commodities();
        for row in &rows {
            if row.len() != k {
                return Err(UncertaintyError::DimensionMismatch { left: row.len(), right: k });
            }
        }
        let rhs = rows
            .iter()
            .map(|v| {
                train
                    .demands()
                    .iter()
                    .map(|r| v.iter().zip(r).map(|(a, b)| a * b).sum::<f64>())
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .collect();
        let (lower, upper) = build_bounds(train)?;
        Ok(Polyhedron { rows, rhs, lower, upper, seed: None })
    }

    /// True iff `V d <= b + tol` and `lower - tol <= d <= upper + tol`.
    pub fn contains(&self, d: &[f64], tol: f64) -> bool {
        if d.len() != self.dim() {
            return false;
        }
        for (row, &b) in self.rows.iter().zip(&self.rhs) {
            let act: f64 = row.iter().zip(d).map(|(a, x)| a * x).sum();
            if act > b + tol {
                return false;
            }
        }
        self.lower.iter().zip(d).all(|(lo, x)| *x >= lo - tol)
            && self.upper.iter().zip(d).all(|(up, x)| *x <= up + tol)
    }

    /// Serializes as CSV blocks with the seed and row count in a header
    /// comment:
    ///
    /// ```text
    /// # polyhedron rows=<M> dim=<K> seed=<seed|none>
    /// # V
    /// <row per line, comma separated>
    /// # b
    /// <one line>
    /// # lower
    /// <one line>
    /// # upper
    /// <one line>
    /// ```
    pub fn to_csv(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        let mut out = format!(
            "# polyhedron rows={} dim={} seed={}\n# V\n",
            self.num_rows(),
            self.dim(),
            self.seed.map_or("none".to_string(), |s| s.to_string())
        );
        for row in &self.rows {
            out.push_str(&join(row));
            out.push('\n');
        }
        out.push_str("# b\n");
        out.push_str(&join(&self.rhs));
        out.push('\n');
        out.push_str("# lower\n");
        out.push_str(&join(&self.lower));
        out.push('\n');
        out.push_str("# upper\n");
        out.push_str(&join(&self.upper));
        out.push('\n');
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, UncertaintyError> {
        let bad = |msg: &str| UncertaintyError::PolyhedronParse(msg.to_string());
        let mut lines = text.lines().peekable();
        let header = lines.next().ok_or_else(|| bad("empty input"))?;
        let mut seed = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            if let Some(s) = field.strip_prefix("seed=") {
                if s != "none" {
                    seed = Some(s.parse::<u64>().map_err(|_| bad("bad seed"))?);
                }
            }
        }
        let parse_vec = |line: &str| -> Result<Vec<f64>, UncertaintyError> {
            if line.is_empty() {
                return Ok(Vec::new());
            }
            line.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {c:?}"))))
                .collect()
        };
        if lines.next() != Some("# V") {
            return Err(bad("missing `# V` block"));
        }
        let mut rows = Vec::new();
        while let Some(&line) = lines.peek() {
            if line.starts_with('#') {
                break;
            }
            rows.push(parse_vec(line)?);
            lines.next();
        }
        if lines.next() != Some("# b") {
            return Err(bad("missing `# b` block"));
        }
        let rhs = parse_vec(lines.next().ok_or_else(|| bad("missing b"))?)?;
        if lines.next() != Some("# lower") {
            return Err(bad("missing `# lower` block"));
        }
        let lower = parse_vec(lines.next().ok_or_else(|| bad("missing lower"))?)?;
        if lines.next() != Some("# upper") {
            return Err(bad("missing `# upper` block"));
        }
        let upper = parse_vec(lines.next().ok_or_else(|| bad("missing upper"))?)?;
        if rows.len() != rhs.len() {
            return Err(bad("row/rhs count mismatch"));
        }
        let k = lower.len();
        if upper.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(bad("inconsistent dimensions"));
        }
        Ok(Polyhedron { rows, rhs, lower, upper, seed })
    }
}

/// Mean demand of the per-commodity zero-inflated uniform fit.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanDemand {
    pub values: Vec<f64>,
}

/// Per-commodity scenario statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct CommodityStats {
    /// Number of scenarios with strictly positive demand (N').
    pub positive_count: usize,
    /// Sum over all scenarios divided by N' (zero when degenerate).
    pub mean: f64,
    /// Smallest positive demand (zero when degenerate).
    pub min_positive: f64,
    /// Largest demand over all scenarios.
    pub max: f64,
}

impl CommodityStats {
    /// A commodity with no positive observation at all.
    pub fn is_degenerate(&self) -> bool {
        self.positive_count == 0
    }
}

/// Splits rows into a training set (indices `0, stride, 2*stride, ...`) and
/// an evaluation set (all remaining rows).
pub fn split_train_eval(
    set: &ScenarioSet,
    stride: usize,
) -> Result<(ScenarioSet, ScenarioSet), UncertaintyError> {
    if stride == 0 {
        return Err(UncertaintyError::ZeroStride);
    }
    let n = set.num_scenarios();
    if stride > n {
        return Err(UncertaintyError::StrideTooLarge { stride, scenarios: n });
    }
    let train: Vec<usize> = (0..n).step_by(stride).collect();
    let eval: Vec<usize> = (0..n).filter(|i| i % stride != 0).collect();
    Ok((set.restrict_scenarios(&train), set.restrict_scenarios(&eval)))
}

/// Keeps the `k` commodities with the largest total demand (ties broken by
/// the canonical commodity order) and reports the captured demand fraction.
pub fn select_top_commodities(
    set: &ScenarioSet,
    k: usize,
) -> Result<(ScenarioSet, f64), UncertaintyError> {
    let total_commodities = set.num_commodities();
    if k == 0 || k > total_commodities {
        return Err(UncertaintyError::BadCommodityCount {
            requested: k,
            available: total_commodities,
        });
    }
    let totals: Vec<f64> = (0..total_commodities).map(|c| set.column(c).sum()).collect();
    let mut order: Vec<usize> = (0..total_commodities).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    let mut keep: Vec<usize> = order[..k].to_vec();
    keep.sort_unstable(); // preserve the canonical commodity order
    let kept_mass: f64 = keep.iter().map(|&c| totals[c]).sum();
    let total_mass: f64 = totals.iter().sum();
    let coverage = if total_mass > 0.0 { kept_mass / total_mass } else { 1.0 };
    Ok((set.restrict_commodities(&keep), coverage))
}

/// N', the scenario average (sum over all divided by N'), the smallest
/// positive and the largest demand of column `k`.
pub fn commodity_stats(set: &ScenarioSet, k: usize) -> Result<CommodityStats, UncertaintyError> {
    if k >= set.num_commodities() {
        return Err(UncertaintyError::BadCommodityIndex { index: k, count: set.num_commodities() });
    }
    let mut positive_count = 0;
    let mut sum = 0.0;
    let mut min_positive = f64::INFINITY;
    let mut max = 0.0f64;
    for v in set.column(k) {
        sum += v;
        max = max.max(v);
        if v > 0.0 {
            positive_count += 1;
            min_positive = min_positive.min(v);
        }
    }
    if positive_count == 0 {
        return Ok(CommodityStats { positive_count: 0, mean: 0.0, min_positive: 0.0, max });
    }
    Ok(CommodityStats { positive_count, mean: sum / positive_count as f64, min_positive, max })
}

/// Entrywise blend `lambda * r + (1 - lambda) * rhat` of the scenarios with
/// their per-commodity averages.
pub fn build_discrete_set(set: &ScenarioSet, lambda: f64) -> Result<DiscreteSet, UncertaintyError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(UncertaintyError::BadLambda(lambda));
    }
    let k = set.num_commodities();
    let mut means = Vec::with_capacity(k);
    for c in 0..k {
        means.push(commodity_stats(set, c)?.mean);
    }
    let scenarios = set
        .demands()
        .iter()
        .map(|row| {
            row.iter().zip(&means).map(|(r, m)| lambda * r + (1.0 - lambda) * m).collect()
        })
        .collect();
    Ok(DiscreteSet { scenarios, lambda })
}

/// Componentwise scenario bounds `[min_i r^{i,k}, max_i r^{i,k}]` (zeros
/// included in the minimum).
pub fn build_bounds(set: &ScenarioSet) -> Result<(Vec<f64>, Vec<f64>), UncertaintyError> {
    if set.num_scenarios() == 0 {
        return Err(UncertaintyError::EmptyScenarioSet);
    }
    let k = set.num_commodities();
    let mut lower = vec![f64::INFINITY; k];
    let mut upper = vec![f64::NEG_INFINITY; k];
    for row in set.demands() {
        for (c, &v) in row.iter().enumerate() {
            lower[c] = lower[c].min(v);
            upper[c] = upper[c].max(v);
        }
    }
    Ok((lower, upper))
}

/// Samples a polyhedron with `hyperplanes` total rows: row 0 is the
/// sum-constraint `v = 1/K`, the remaining rows are drawn uniformly from
/// `[0, 1]^K` with the seeded generator. Right-hand sides are tight over
/// the training scenarios and the scenario box is attached.
pub fn sample_hyperplanes(
    train: &ScenarioSet,
    hyperplanes: usize,
    seed: u64,
) -> Result<Polyhedron, UncertaintyError> {
    if hyperplanes == 0 {
        return Err(UncertaintyError::NoHyperplanes);
    }
    if train.num_scenarios() == 0 {
        return Err(UncertaintyError::EmptyScenarioSet);
    }
    let k = train.num_commodities();
    let mut rows = Vec::with_capacity(hyperplanes);
    rows.push(vec![1.0 / k as f64; k]);
    let mut rng = SplitMix64::new(seed);
    for _ in 1..hyperplanes {
        rows.push((0..k).map(|_| rng.next_f64()).collect());
    }
    let mut poly = Polyhedron::from_rows(rows, train)?;
    poly.seed = Some(seed);
    Ok(poly)
}

/// Mean demand of the zero-inflated uniform fit,
/// `0.5 * (min_positive + max) * N' / N` per commodity.
pub fn zero_inflated_mean(set: &ScenarioSet) -> Result<MeanDemand, UncertaintyError> {
    let n = set.num_scenarios();
    if n == 0 {
        return Err(UncertaintyError::EmptyScenarioSet);
    }
    let mut values = Vec::with_capacity(set.num_commodities());
    for k in 0..set.num_commodities() {
        let stats = commodity_stats(set, k)?;
        if stats.is_degenerate() {
            values.push(0.0);
        } else {
            let uniform_mean = 0.5 * (stats.min_positive + stats.max);
            values.push(uniform_mean * stats.positive_count as f64 / n as f64);
        }
    }
    Ok(MeanDemand { values })
}

/// Drops commodities that are zero in every scenario, returning the kept
/// column indices alongside the reduced set.
pub fn drop_zero_commodities(set: &ScenarioSet) -> (ScenarioSet, Vec<usize>) {
    let keep: Vec<usize> = (0..set.num_commodities())
        .filter(|&k| set.column(k).any(|v| v > 0.0))
        .collect();
    (set.restrict_commodities(&keep), keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_from(cols: Vec<Vec<f64>>) -> ScenarioSet {
        // cols is column-major for readability; transpose to rows.
        let n = cols[0].len();
        let commodities =
            (0..cols.len()).map(|k| (format!("s{k}"), format!("t{k}"))).collect();
        let rows = (0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        ScenarioSet::from_rows(commodities, rows).unwrap()
    }

    #[test]
    fn split_every_other() {
        let set = set_from(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]]);
        let (train, eval) = split_train_eval(&set, 2).unwrap();
        assert_eq!(train.demands(), &[vec![1.0], vec![3.0], vec![5.0]]);
        assert_eq!(eval.demands(), &[vec![2.0], vec![4.0]]);
    }

    #[test]
    fn split_stride_one_takes_everything() {
        let set = set_from(vec![vec![1.0, 2.0, 3.0, 4.0, 5.0]]);
        let (train, eval) = split_train_eval(&set, 1).unwrap();
        assert_eq!(train, set);
        assert_eq!(eval.num_scenarios(), 0);
    }

    #[test]
    fn split_bad_strides() {
        let set = set_from(vec![vec![1.0, 2.0]]);
        assert!(matches!(split_train_eval(&set, 0), Err(UncertaintyError::ZeroStride)));
        assert!(matches!(
            split_train_eval(&set, 3),
            Err(UncertaintyError::StrideTooLarge { .. })
        ));
    }

    #[test]
    fn top_k_selection() {
        let set = set_from(vec![vec![5.0, 5.0], vec![0.5, 0.5]]);
        let (reduced, coverage) = select_top_commodities(&set, 1).unwrap();
        assert_eq!(reduced.num_commodities(), 1);
        assert_eq!(reduced.commodities()[0].0, "s0");
        assert!((coverage - 10.0 / 11.0).abs() < 1e-15);
        let (_, full) = select_top_commodities(&set, 2).unwrap();
        assert_eq!(full, 1.0);
    }

    #[test]
    fn top_k_coverage_monotone() {
        let set = set_from(vec![
            vec![1.0, 0.0],
            vec![4.0, 1.0],
            vec![2.0, 2.0],
            vec![0.5, 0.25],
        ]);
        let mut prev = 0.0;
        for k in 1..=4 {
            let (_, cov) = select_top_commodities(&set, k).unwrap();
            assert!(cov >= prev);
            prev = cov;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn stats_with_zero() {
        let set = set_from(vec![vec![2.0, 0.0, 4.0]]);
        let stats = commodity_stats(&set, 0).unwrap();
        assert_eq!(stats.positive_count, 2);
        assert_eq!(stats.mean, 3.0);
        assert_eq!(stats.min_positive, 2.0);
        assert_eq!(stats.max, 4.0);
    }

    #[test]
    fn stats_single_and_degenerate() {
        let set = set_from(vec![vec![5.0]]);
        let stats = commodity_stats(&set, 0).unwrap();
        assert_eq!(
            stats,
            CommodityStats { positive_count: 1, mean: 5.0, min_positive: 5.0, max: 5.0 }
        );
        let zeros = set_from(vec![vec![0.0, 0.0]]);
        assert!(commodity_stats(&zeros, 0).unwrap().is_degenerate());
    }

    #[test]
    fn discrete_blend_midpoint() {
        let set = set_from(vec![vec![1.0, 3.0]]);
        let blended = build_discrete_set(&set, 0.5).unwrap();
        assert_eq!(blended.scenarios, vec![vec![1.5], vec![2.5]]);
    }

    #[test]
    fn discrete_lambda_extremes() {
        let set = set_from(vec![vec![1.0, 3.0], vec![2.0, 0.0]]);
        let raw = build_discrete_set(&set, 1.0).unwrap();
        assert_eq!(raw.scenarios, set.demands());
        let avg = build_discrete_set(&set, 0.0).unwrap();
        for row in &avg.scenarios {
            assert_eq!(row, &vec![2.0, 2.0]); // rhat = (4/2, 2/1)
        }
        assert!(build_discrete_set(&set, 1.5).is_err());
    }

    #[test]
    fn bounds_include_zero() {
        let set = set_from(vec![vec![2.0, 0.0, 4.0], vec![3.0, 3.0, 3.0]]);
        let (lo, up) = build_bounds(&set).unwrap();
        assert_eq!(lo, vec![0.0, 3.0]);
        assert_eq!(up, vec![4.0, 3.0]);
    }

    #[test]
    fn forced_rows_get_tight_rhs() {
        // Scenarios (1,2) and (3,1).
        let set = set_from(vec![vec![1.0, 3.0], vec![2.0, 1.0]]);
        let poly =
            Polyhedron::from_rows(vec![vec![0.5, 0.5], vec![1.0, 0.0]], &set).unwrap();
        assert_eq!(poly.rhs[0], 2.0); // tight at (3,1)
        assert_eq!(poly.rhs[1], 3.0);
        // Tightness: some scenario attains each rhs.
        for (row, &b) in poly.rows.iter().zip(&poly.rhs) {
            let hit = set.demands().iter().any(|r| {
                let s: f64 = row.iter().zip(r).map(|(a, x)| a * x).sum();
                (s - b).abs() <= 1e-9
            });
            assert!(hit);
        }
    }

    #[test]
    fn sampled_polyhedron_contains_training_data() {
        let set = set_from(vec![
            vec![1.0, 2.0, 0.5, 1.5],
            vec![2.0, 1.0, 2.5, 0.0],
            vec![0.25, 1.25, 2.0, 1.0],
        ]);
        let poly = sample_hyperplanes(&set, 4, 99).unwrap();
        assert_eq!(poly.num_rows(), 4);
        assert_eq!(poly.rows[0], vec![1.0 / 3.0; 3]);
        assert_eq!(poly.seed, Some(99));
        for row in set.demands() {
            assert!(poly.contains(row, CONTAINS_TOL));
        }
        // Deterministic in the seed.
        assert_eq!(sample_hyperplanes(&set, 4, 99).unwrap(), poly);
        assert_ne!(sample_hyperplanes(&set, 4, 100).unwrap().rows[1], poly.rows[1]);
    }

    #[test]
    fn contains_rejects_outside_box() {
        let set = set_from(vec![vec![1.0, 2.0], vec![1.0, 3.0]]);
        let poly = sample_hyperplanes(&set, 1, 7).unwrap();
        let mut d = poly.upper.clone();
        d[0] += 1.0;
        assert!(!poly.contains(&d, CONTAINS_TOL));
    }

    #[test]
    fn box_midpoint_inside_pure_box() {
        let set = set_from(vec![vec![1.0, 3.0], vec![2.0, 2.0]]);
        let poly = sample_hyperplanes(&set, 1, 0).unwrap();
        let mid: Vec<f64> =
            poly.lower.iter().zip(&poly.upper).map(|(l, u)| 0.5 * (l + u)).collect();
        assert!(poly.contains(&mid, CONTAINS_TOL));
    }

    #[test]
    fn zero_inflated_mean_values() {
        let set = set_from(vec![vec![2.0, 0.0, 4.0]]);
        let mean = zero_inflated_mean(&set).unwrap();
        assert_eq!(mean.values, vec![2.0]); // 0.5*(2+4) * 2/3

        let constant = set_from(vec![vec![3.0, 3.0]]);
        assert_eq!(zero_inflated_mean(&constant).unwrap().values, vec![3.0]);

        let zeros = set_from(vec![vec![0.0, 0.0]]);
        assert_eq!(zero_inflated_mean(&zeros).unwrap().values, vec![0.0]);
    }

    #[test]
    fn zero_inflated_mean_bounded_by_max() {
        let set = set_from(vec![vec![0.0, 1.0, 5.0], vec![2.0, 2.0, 2.0]]);
        let mean = zero_inflated_mean(&set).unwrap();
        let (_, upper) = build_bounds(&set).unwrap();
        for (m, u) in mean.values.iter().zip(&upper) {
            assert!(*m >= 0.0 && m <= u);
        }
    }

    #[test]
    fn drop_zero_columns() {
        let set = set_from(vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 2.0]]);
        let (reduced, keep) = drop_zero_commodities(&set);
        assert_eq!(keep, vec![0, 2]);
        assert_eq!(reduced.num_commodities(), 2);
    }

    #[test]
    fn polyhedron_csv_round_trip() {
        let set = set_from(vec![vec![1.0, 2.0], vec![0.5, 1.5]]);
        let poly = sample_hyperplanes(&set, 3, 1234).unwrap();
        let text = poly.to_csv();
        let back = Polyhedron::from_csv(&text).unwrap();
        assert_eq!(back, poly);
    }
}
