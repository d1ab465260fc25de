//! Out-of-sample assessment of a fixed investment: per-scenario flow
//! re-optimization, summary risk metrics, and efficiency-frontier CSV.

use thiserror::Error;

use crate::lp::{solve, SolveOptions, SolveStatus};
use crate::model::{build_evaluation_flow, resolve_commodities, ModelError};
use crate::sndlib::{NetworkSpec, ScenarioSet};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty value vector")]
    Empty,
    #[error("tail fraction {0} outside (0, 1]")]
    BadAlpha(f64),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("constant vector has no correlation")]
    ConstantVector,
    #[error("per-scenario flow problem ended with status {0:?}")]
    ScenarioSolve(SolveStatus),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("frontier CSV parse: {0}")]
    FrontierParse(String),
}

/// Summary metrics over per-scenario outsourced demand.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Metrics {
    pub mean: f64,
    pub max: f64,
    /// Average of the worst 10% of values.
    pub cvar: f64,
    /// Population standard deviation.
    pub std: f64,
}

/// Result of evaluating one investment on an evaluation set.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct EvaluationReport {
    pub investment_cost: f64,
    pub per_scenario_outsourced: Vec<f64>,
    pub metrics: Metrics,
}

/// One point of the investment/outsourcing trade-off curve.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct FrontierPoint {
    pub model: String,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub hyperplanes: Option<usize>,
    pub investment_cost: f64,
    pub metrics: Metrics,
}

/// Solves the second-stage flow problem for every evaluation scenario and
/// reports the outsourced demand per scenario (in scenario order) together
/// with the exact investment cost.
pub fn evaluate_investment(
    net: &NetworkSpec,
    investment: &[f64],
    eval: &ScenarioSet,
    opts: &SolveOptions,
) -> Result<EvaluationReport, EvalError> {
    let pairs = resolve_commodities(net, eval.commodities())?;
    let mut outsourced = Vec::with_capacity(eval.num_scenarios());
    for i in 0..eval.num_scenarios() {
        let (lp, _) = build_evaluation_flow(net, &pairs, investment, eval.row(i))?;
        let sol = solve(&lp, opts).map_err(ModelError::from)?;
        // Outsourcing everything is always feasible, so anything but
        // Optimal is a solver-level failure.
        if sol.status != SolveStatus::Optimal {
            return Err(EvalError::ScenarioSolve(sol.status));
        }
        outsourced.push(sol.objective.max(0.0));
    }
    let metrics = metrics(&outsourced)?;
    Ok(EvaluationReport {
        investment_cost: net.investment_cost(investment),
        per_scenario_outsourced: outsourced,
        metrics,
    })
}

/// Mean of the `ceil(alpha * n)` largest values. The product is nudged
/// before rounding up so that an exactly-integer tail size is not inflated
/// by floating-point noise (0.1 * 20 must give a tail of 2, not 3).
pub fn cvar(values: &[f64], alpha: f64) -> Result<f64, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(EvalError::BadAlpha(alpha));
    }
    let n = values.len();
    let tail = ((alpha * n as f64) - 1e-9).ceil().max(1.0) as usize;
    let tail = tail.min(n);
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[..tail].iter().sum::<f64>() / tail as f64)
}

/// Mean, max, worst-10% average and population standard deviation of one
/// value vector.
pub fn metrics(values: &[f64]) -> Result<Metrics, EvalError> {
    if values.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let max = values.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(Metrics { mean, max, cvar: cvar(values, 0.1)?, std: var.sqrt() })
}

/// Pearson correlation coefficient; constant vectors are an error.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.is_empty() || b.is_empty() {
        return Err(EvalError::Empty);
    }
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - mean_a) * (y - mean_b);
        var_a += (x - mean_a) * (x - mean_a);
        var_b += (y - mean_b) * (y - mean_b);
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(EvalError::ConstantVector);
    }
    Ok(cov / (var_a.sqrt() * var_b.sqrt()))
}

pub const FRONTIER_HEADER: &str = "model,sigma,lambda,M,invest_cost,mean,max,cvar10,std";

/// Emits the frontier CSV, sorted by (model, sigma, lambda, M). Optional
/// fields are left empty.
pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    let mut sorted: Vec<&FrontierPoint> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then(a.sigma.total_cmp(&b.sigma))
            .then_with(|| match (a.lambda, b.lambda) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (Some(_), None) => std::cmp::Ordering::Greater,
            })
            .then(a.hyperplanes.cmp(&b.hyperplanes))
    });
    let mut out = String::from(FRONTIER_HEADER);
    out.push('\n');
    for p in sorted {
        let lambda = p.lambda.map_or(String::new(), |l| format!("{l}"));
        let m = p.hyperplanes.map_or(String::new(), |m| m.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.model,
            p.sigma,
            lambda,
            m,
            p.investment_cost,
            p.metrics.mean,
            p.metrics.max,
            p.metrics.cvar,
            p.metrics.std
        ));
    }
    out
}

/// Parses a frontier CSV back into points.
pub fn parse_frontier_csv(text: &str) -> Result<Vec<FrontierPoint>, EvalError> {
    let bad = |msg: String| EvalError::FrontierParse(msg);
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
    if header.trim_end_matches('\r') != FRONTIER_HEADER {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    let mut points = Vec::new();
    for (idx, raw) in lines.enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 9 {
            return Err(bad(format!("line {}: expected 9 cells", idx + 2)));
        }
        let num = |c: &str| -> Result<f64, EvalError> {
            c.parse::<f64>().map_err(|_| bad(format!("bad number {c:?}")))
        };
        points.push(FrontierPoint {
            model: cells[0].to_string(),
            sigma: num(cells[1])?,
            lambda: if cells[2].is_empty() { None } else { Some(num(cells[2])?) },
            hyperplanes: if cells[3].is_empty() {
                None
            } else {
                Some(cells[3].parse().map_err(|_| bad(format!("bad count {:?}", cells[3])))?)
            },
            investment_cost: num(cells[4])?,
            metrics: Metrics {
                mean: num(cells[5])?,
                max: num(cells[6])?,
                cvar: num(cells[7])?,
                std: num(cells[8])?,
            },
        });
    }
    Ok(points)
}
