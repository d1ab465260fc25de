//! Config-driven experiment pipeline.
//!
//! A run goes ingest -> split -> truncate -> build sets -> solve a
//! (family, sigma, lambda / hyperplane) grid -> evaluate out-of-sample ->
//! frontier CSV. Each stage reads and writes documented artifacts under
//! the configured output directory, so stages can also run independently
//! (and be cached) through the `rncep` binary:
//!
//! ```text
//! out/
//!   parse.json            ingest summary
//!   scenarios.csv         canonical full scenario matrix
//!   train.csv, eval.csv   split by the training stride
//!   sets/                 per-family uncertainty sets and eval subsets
//!   solutions/<tag>.json  investment dumps per grid point
//!   lp/<tag>.lp           optional LP text dumps
//!   reports/<tag>.json    out-of-sample evaluation per grid point
//!   frontier.csv          the merged efficiency frontier
//!   manifest.json         config hash, seed and artifact inventory
//! ```
//!
//! Identical config and seed give byte-identical outputs. The only
//! environment override honored is `RNCEP_SEED`, which replaces the
//! config seed at load time.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluate::{
    evaluate_investment, frontier_csv, EvalError, FrontierPoint, Metrics,
};
use crate::lp::{solve, write_lp_file, SolveOptions, SolveStatus};
use crate::model::{
    build_aarc, build_discrete_robust, build_stochastic_mean, extract_first_stage,
    resolve_commodities, ModelError, VariableCatalog,
};
use crate::sndlib::{
    parse_network, parse_scenario_csv, write_scenario_csv, NetworkSpec, ScenarioSet, SndlibError,
};
use crate::uncertainty::{
    build_discrete_set, drop_zero_commodities, sample_hyperplanes, select_top_commodities,
    split_train_eval, zero_inflated_mean, Polyhedron, UncertaintyError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("missing artifact {path}: run the `{stage}` stage before `{needed_by}`")]
    MissingArtifact { path: PathBuf, stage: &'static str, needed_by: &'static str },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Data(#[from] SndlibError),
    #[error(transparent)]
    Uncertainty(#[from] UncertaintyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("grid point {tag}: solver returned {status:?}")]
    Solve { tag: String, status: SolveStatus },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.display().to_string(), source }
}

/// Model family of a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Discrete,
    Stochastic,
    Aarc,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Discrete => "discrete",
            Family::Stochastic => "stochastic",
            Family::Aarc => "aarc",
        }
    }

    /// Accepts the canonical tags plus `polyhedral` as an alias for the
    /// affine counterpart family.
    pub fn parse(name: &str) -> Result<Self, PipelineError> {
        match name {
            "discrete" => Ok(Family::Discrete),
            "stochastic" => Ok(Family::Stochastic),
            "aarc" | "polyhedral" => Ok(Family::Aarc),
            other => Err(PipelineError::Config(format!("unknown model family {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Outsourcing penalties to sweep.
    #[serde(default = "GridConfig::default_sigma")]
    pub sigma: Vec<f64>,
    /// Blend factors for the discrete family.
    #[serde(default = "GridConfig::default_lambda")]
    pub lambda: Vec<f64>,
    /// Hyperplane counts (sum-constraint row included) for the affine
    /// counterpart family.
    #[serde(default = "GridConfig::default_hyperplanes")]
    pub hyperplanes: Vec<usize>,
}

impl GridConfig {
    fn default_sigma() -> Vec<f64> {
        (0..11).map(|i| i as f64 * 2490.0).collect()
    }
    fn default_lambda() -> Vec<f64> {
        vec![0.5, 1.0]
    }
    fn default_hyperplanes() -> Vec<usize> {
        vec![1]
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            sigma: Self::default_sigma(),
            lambda: Self::default_lambda(),
            hyperplanes: Self::default_hyperplanes(),
        }
    }
}

/// Top-K commodity truncation per family; `None` keeps every commodity.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommodityConfig {
    pub discrete: Option<usize>,
    pub stochastic: Option<usize>,
    pub polyhedral: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iters: Option<usize>,
    pub scale: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { feas_tol: 1e-7, opt_tol: 1e-7, max_iters: None, scale: false }
    }
}

impl SolverConfig {
    pub fn to_options(&self) -> SolveOptions {
        SolveOptions {
            feas_tol: self.feas_tol,
            opt_tol: self.opt_tol,
            max_iters: self.max_iters,
            anti_cycling: true,
            scale: self.scale,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Families to run, in order.
    pub families: Vec<String>,
    /// Worker threads for grid points.
    pub jobs: usize,
    /// Also dump each solved model as LP text.
    pub dump_lp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            families: vec!["discrete".into(), "stochastic".into(), "aarc".into()],
            jobs: 1,
            dump_lp: false,
        }
    }
}

/// The experiment description read from a TOML file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: PathBuf,
    #[serde(default)]
    pub scenario_dir: Option<PathBuf>,
    #[serde(default)]
    pub scenario_csv: Option<PathBuf>,
    /// Every `train_stride`-th scenario trains; the rest evaluate.
    pub train_stride: usize,
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub commodities: CommodityConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub run: RunConfig,
}

fn default_seed() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, PipelineError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config file; relative paths are resolved against the file's
    /// directory and `RNCEP_SEED` (when set) replaces the seed.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = Self::from_toml_str(&text)?;
        if let Some(base) = path.parent() {
            cfg.resolve_paths(base);
        }
        if let Ok(seed) = std::env::var("RNCEP_SEED") {
            cfg.seed = seed
                .parse()
                .map_err(|_| PipelineError::Config(format!("bad RNCEP_SEED value {seed:?}")))?;
        }
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        fix(&mut self.network);
        if let Some(dir) = &mut self.scenario_dir {
            fix(dir);
        }
        if let Some(csv) = &mut self.scenario_csv {
            fix(csv);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::Config(msg));
        match (&self.scenario_dir, &self.scenario_csv) {
            (None, None) => return bad("one of scenario_dir / scenario_csv is required".into()),
            (Some(_), Some(_)) => {
                return bad("scenario_dir and scenario_csv are mutually exclusive".into())
            }
            _ => {}
        }
        if self.train_stride == 0 {
            return bad("train_stride must be at least 1".into());
        }
        if self.grid.sigma.is_empty() {
            return bad("sigma grid must not be empty".into());
        }
        for &s in &self.grid.sigma {
            if !(s >= 0.0) || !s.is_finite() {
                return bad(format!("sigma {s} must be finite and nonnegative"));
            }
        }
        for &l in &self.grid.lambda {
            if !(0.0..=1.0).contains(&l) {
                return bad(format!("lambda {l} outside [0, 1]"));
            }
        }
        for &m in &self.grid.hyperplanes {
            if m == 0 {
                return bad("hyperplane counts must be at least 1".into());
            }
        }
        if self.run.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        let families = self.families()?;
        if families.contains(&Family::Discrete) && self.grid.lambda.is_empty() {
            return bad("lambda grid must not be empty for the discrete family".into());
        }
        if families.contains(&Family::Aarc) && self.grid.hyperplanes.is_empty() {
            return bad("hyperplane grid must not be empty for the aarc family".into());
        }
        for k in [
            self.commodities.discrete,
            self.commodities.stochastic,
            self.commodities.polyhedral,
        ]
        .into_iter()
        .flatten()
        {
            if k == 0 {
                return bad("commodity counts must be at least 1".into());
            }
        }
        Ok(())
    }

    pub fn families(&self) -> Result<Vec<Family>, PipelineError> {
        self.run.families.iter().map(|f| Family::parse(f)).collect()
    }

    /// FNV-1a hash of the resolved config serialization; recorded in the
    /// manifest so a frontier row can be traced to its exact inputs.
    pub fn fingerprint(&self) -> String {
        let text = toml::to_string(self).unwrap_or_default();
        let mut hash: u64 = 0xcbf29ce484222325;
        for byte in text.bytes() {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
        format!("{hash:016x}")
    }

    fn commodity_count(&self, family: Family) -> Option<usize> {
        match family {
            Family::Discrete => self.commodities.discrete,
            Family::Stochastic => self.commodities.stochastic,
            Family::Aarc => self.commodities.polyhedral,
        }
    }
}

/// One solve of the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub family: Family,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub hyperplanes: Option<usize>,
}

impl GridPoint {
    /// Stable artifact tag, e.g. `discrete_sigma2490_lambda0.5`.
    pub fn tag(&self) -> String {
        let mut tag = format!("{}_sigma{}", self.family.tag(), self.sigma);
        if let Some(l) = self.lambda {
            tag.push_str(&format!("_lambda{l}"));
        }
        if let Some(m) = self.hyperplanes {
            tag.push_str(&format!("_m{m}"));
        }
        tag
    }
}

/// Expands the configured grids into the ordered list of solves.
/// Repeated grid values collapse onto one point (tags are unique).
pub fn enumerate_grid(cfg: &ExperimentConfig) -> Result<Vec<GridPoint>, PipelineError> {
    let mut points = Vec::new();
    for family in cfg.families()? {
        match family {
            Family::Discrete => {
                for &lambda in &cfg.grid.lambda {
                    for &sigma in &cfg.grid.sigma {
                        points.push(GridPoint {
                            family,
                            sigma,
                            lambda: Some(lambda),
                            hyperplanes: None,
                        });
                    }
                }
            }
            Family::Stochastic => {
                for &sigma in &cfg.grid.sigma {
                    points.push(GridPoint { family, sigma, lambda: None, hyperplanes: None });
                }
            }
            Family::Aarc => {
                for &m in &cfg.grid.hyperplanes {
                    for &sigma in &cfg.grid.sigma {
                        points.push(GridPoint {
                            family,
                            sigma,
                            lambda: None,
                            hyperplanes: Some(m),
                        });
                    }
                }
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    points.retain(|p| seen.insert(p.tag()));
    Ok(points)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParseSummary {
    pub nodes: usize,
    pub arcs: usize,
    pub scenarios: usize,
    pub commodities: usize,
    pub train_scenarios: usize,
    pub eval_scenarios: usize,
}

/// Full-precision investment dump for one grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDump {
    pub model: String,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub hyperplanes: Option<usize>,
    pub seed: u64,
    pub status: String,
    pub objective: f64,
    pub iterations: usize,
    pub investment: Vec<f64>,
    pub invest_cost: f64,
}

/// Out-of-sample report for one grid point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDump {
    pub model: String,
    pub sigma: f64,
    pub lambda: Option<f64>,
    pub hyperplanes: Option<usize>,
    pub invest_cost: f64,
    pub metrics: Metrics,
    pub per_scenario_outsourced: Vec<f64>,
}

impl ReportDump {
    pub fn to_frontier_point(&self) -> FrontierPoint {
        FrontierPoint {
            model: self.model.clone(),
            sigma: self.sigma,
            lambda: self.lambda,
            hyperplanes: self.hyperplanes,
            investment_cost: self.invest_cost,
            metrics: self.metrics,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: u64,
    pub network: PathBuf,
    pub scenario_source: PathBuf,
    pub summary: ParseSummary,
    pub families: Vec<FamilyManifest>,
    pub sigma_grid: Vec<f64>,
    pub solver: SolverConfig,
    pub points: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyManifest {
    pub family: Family,
    pub commodities: usize,
    pub coverage: f64,
}

fn write_file(path: &Path, content: &str) -> Result<(), PipelineError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    std::fs::write(path, content).map_err(io_err(path))
}

fn read_artifact(
    path: &Path,
    stage: &'static str,
    needed_by: &'static str,
) -> Result<String, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingArtifact { path: path.to_path_buf(), stage, needed_by });
    }
    std::fs::read_to_string(path).map_err(io_err(path))
}

/// Loads the network and the full scenario matrix named by the config.
pub fn load_inputs(cfg: &ExperimentConfig) -> Result<(NetworkSpec, ScenarioSet), PipelineError> {
    let net_text = std::fs::read_to_string(&cfg.network).map_err(io_err(&cfg.network))?;
    let net = parse_network(&net_text)?;
    let full = match (&cfg.scenario_dir, &cfg.scenario_csv) {
        (Some(dir), None) => crate::sndlib::load_scenario_dir(dir, Some(&net))?,
        (None, Some(csv)) => {
            let text = std::fs::read_to_string(csv).map_err(io_err(csv))?;
            parse_scenario_csv(&text)?
        }
        _ => unreachable!("validated"),
    };
    // Endpoints must name network nodes even for the CSV source.
    resolve_commodities(&net, full.commodities())?;
    Ok((net, full))
}

/// Ingest stage: canonical scenario matrix plus the train/eval split.
pub fn stage_parse(cfg: &ExperimentConfig) -> Result<ParseSummary, PipelineError> {
    let (net, full) = load_inputs(cfg)?;
    let (train, eval) = split_train_eval(&full, cfg.train_stride)?;
    let out = &cfg.output_dir;
    write_file(&out.join("scenarios.csv"), &write_scenario_csv(&full))?;
    write_file(&out.join("train.csv"), &write_scenario_csv(&train))?;
    write_file(&out.join("eval.csv"), &write_scenario_csv(&eval))?;
    let summary = ParseSummary {
        nodes: net.num_nodes(),
        arcs: net.num_arcs(),
        scenarios: full.num_scenarios(),
        commodities: full.num_commodities(),
        train_scenarios: train.num_scenarios(),
        eval_scenarios: eval.num_scenarios(),
    };
    write_file(&out.join("parse.json"), &to_pretty_json(&summary)?)?;
    Ok(summary)
}

fn to_pretty_json<T: Serialize>(value: &T) -> Result<String, PipelineError> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

/// Per-family training data: truncated to top-K commodities with all-zero
/// commodities dropped, plus the matching evaluation subset.
fn family_subsets(
    cfg: &ExperimentConfig,
    family: Family,
    train: &ScenarioSet,
    eval: &ScenarioSet,
) -> Result<(ScenarioSet, ScenarioSet, f64), PipelineError> {
    let k = cfg.commodity_count(family).unwrap_or(train.num_commodities());
    let k = k.min(train.num_commodities());
    let (top, coverage) = select_top_commodities(train, k)?;
    let (active, _kept) = drop_zero_commodities(&top);
    if active.num_commodities() == 0 {
        return Err(PipelineError::Config(format!(
            "{} family: no commodity has positive training demand",
            family.tag()
        )));
    }
    let eval_cols: Vec<usize> = active
        .commodities()
        .iter()
        .map(|pair| {
            eval.commodities()
                .iter()
                .position(|p| p == pair)
                .expect("train and eval share the commodity list")
        })
        .collect();
    Ok((active.clone(), eval.restrict_commodities(&eval_cols), coverage))
}

/// Set-construction stage: writes per-family uncertainty sets and the
/// matching evaluation subsets under `sets/`.
pub fn stage_build_sets(cfg: &ExperimentConfig) -> Result<Vec<FamilyManifest>, PipelineError> {
    let out = &cfg.output_dir;
    let train = parse_scenario_csv(&read_artifact(&out.join("train.csv"), "parse", "build-sets")?)?;
    let eval = parse_scenario_csv(&read_artifact(&out.join("eval.csv"), "parse", "build-sets")?)?;
    let sets = out.join("sets");
    let mut manifests = Vec::new();
    for family in cfg.families()? {
        let (train_sub, eval_sub, coverage) = family_subsets(cfg, family, &train, &eval)?;
        manifests.push(FamilyManifest {
            family,
            commodities: train_sub.num_commodities(),
            coverage,
        });
        match family {
            Family::Discrete => {
                write_file(&sets.join("discrete_train.csv"), &write_scenario_csv(&train_sub))?;
                write_file(&sets.join("discrete_eval.csv"), &write_scenario_csv(&eval_sub))?;
                for &lambda in &cfg.grid.lambda {
                    let blended = build_discrete_set(&train_sub, lambda)?;
                    let as_set = ScenarioSet::from_rows(
                        train_sub.commodities().to_vec(),
                        blended.scenarios.clone(),
                    )?;
                    write_file(
                        &sets.join(format!("discrete_lambda{lambda}.csv")),
                        &write_scenario_csv(&as_set),
                    )?;
                }
            }
            Family::Stochastic => {
                let mean = zero_inflated_mean(&train_sub)?;
                let as_set = ScenarioSet::from_rows(
                    train_sub.commodities().to_vec(),
                    vec![mean.values.clone()],
                )?;
                write_file(&sets.join("mean.csv"), &write_scenario_csv(&as_set))?;
                write_file(&sets.join("stochastic_eval.csv"), &write_scenario_csv(&eval_sub))?;
            }
            Family::Aarc => {
                write_file(&sets.join("aarc_train.csv"), &write_scenario_csv(&train_sub))?;
                write_file(&sets.join("aarc_eval.csv"), &write_scenario_csv(&eval_sub))?;
                for &m in &cfg.grid.hyperplanes {
                    let poly = sample_hyperplanes(&train_sub, m, cfg.seed)?;
                    write_file(&sets.join(format!("poly_m{m}.csv")), &poly.to_csv())?;
                }
            }
        }
    }
    Ok(manifests)
}

fn sets_csv(
    cfg: &ExperimentConfig,
    name: &str,
    needed_by: &'static str,
) -> Result<ScenarioSet, PipelineError> {
    let path = cfg.output_dir.join("sets").join(name);
    Ok(parse_scenario_csv(&read_artifact(&path, "build-sets", needed_by)?)?)
}

/// Solve stage for one grid point; returns the dump that was written to
/// `solutions/<tag>.json`.
pub fn stage_solve(
    cfg: &ExperimentConfig,
    net: &NetworkSpec,
    point: &GridPoint,
) -> Result<SolutionDump, PipelineError> {
    let tag = point.tag();
    let opts = cfg.solver.to_options();
    let (lp, cat): (_, VariableCatalog) = match point.family {
        Family::Discrete => {
            let lambda = point
                .lambda
                .ok_or_else(|| PipelineError::Config("discrete point without lambda".into()))?;
            let blended = sets_csv(cfg, &format!("discrete_lambda{lambda}.csv"), "solve")?;
            let pairs = resolve_commodities(net, blended.commodities())?;
            let set = crate::uncertainty::DiscreteSet {
                scenarios: blended.demands().to_vec(),
                lambda,
            };
            build_discrete_robust(net, &pairs, &set, point.sigma)?
        }
        Family::Stochastic => {
            let mean_set = sets_csv(cfg, "mean.csv", "solve")?;
            let pairs = resolve_commodities(net, mean_set.commodities())?;
            let mean = crate::uncertainty::MeanDemand { values: mean_set.row(0).to_vec() };
            build_stochastic_mean(net, &pairs, &mean, point.sigma)?
        }
        Family::Aarc => {
            let m = point
                .hyperplanes
                .ok_or_else(|| PipelineError::Config("aarc point without hyperplanes".into()))?;
            let train = sets_csv(cfg, "aarc_train.csv", "solve")?;
            let poly_path = cfg.output_dir.join("sets").join(format!("poly_m{m}.csv"));
            let poly = Polyhedron::from_csv(&read_artifact(&poly_path, "build-sets", "solve")?)?;
            let pairs = resolve_commodities(net, train.commodities())?;
            build_aarc(net, &pairs, &poly, point.sigma)?
        }
    };
    if cfg.run.dump_lp {
        let text = write_lp_file(&lp, &cat).map_err(ModelError::from)?;
        write_file(&cfg.output_dir.join("lp").join(format!("{tag}.lp")), &text)?;
    }
    let sol = solve(&lp, &opts).map_err(ModelError::from)?;
    if sol.status != SolveStatus::Optimal {
        return Err(PipelineError::Solve { tag, status: sol.status });
    }
    let investment = extract_first_stage(&sol, &cat)?;
    let dump = SolutionDump {
        model: point.family.tag().to_string(),
        sigma: point.sigma,
        lambda: point.lambda,
        hyperplanes: point.hyperplanes,
        seed: cfg.seed,
        status: format!("{:?}", sol.status),
        objective: sol.objective,
        iterations: sol.iterations,
        invest_cost: net.investment_cost(&investment),
        investment,
    };
    write_file(
        &cfg.output_dir.join("solutions").join(format!("{tag}.json")),
        &to_pretty_json(&dump)?,
    )?;
    Ok(dump)
}

/// Evaluation stage for one solved grid point; returns the report written
/// to `reports/<tag>.json`.
pub fn stage_evaluate_point(
    cfg: &ExperimentConfig,
    net: &NetworkSpec,
    point: &GridPoint,
    dump: &SolutionDump,
) -> Result<ReportDump, PipelineError> {
    let eval_name = match point.family {
        Family::Discrete => "discrete_eval.csv",
        Family::Stochastic => "stochastic_eval.csv",
        Family::Aarc => "aarc_eval.csv",
    };
    let eval = sets_csv(cfg, eval_name, "evaluate")?;
    if eval.num_scenarios() == 0 {
        return Err(PipelineError::Config(
            "train_stride leaves no evaluation scenarios".into(),
        ));
    }
    let report = evaluate_investment(net, &dump.investment, &eval, &cfg.solver.to_options())?;
    let out = ReportDump {
        model: dump.model.clone(),
        sigma: dump.sigma,
        lambda: dump.lambda,
        hyperplanes: dump.hyperplanes,
        invest_cost: report.investment_cost,
        metrics: report.metrics,
        per_scenario_outsourced: report.per_scenario_outsourced,
    };
    write_file(
        &cfg.output_dir.join("reports").join(format!("{}.json", point.tag())),
        &to_pretty_json(&out)?,
    )?;
    Ok(out)
}

/// Evaluates a free-standing investment file (a `solutions/*.json` dump or
/// a plain text file with one arc expansion per line) against the full
/// evaluation set.
pub fn stage_evaluate_file(
    cfg: &ExperimentConfig,
    investment_path: &Path,
) -> Result<ReportDump, PipelineError> {
    let (net, _) = load_inputs(cfg)?;
    let text = std::fs::read_to_string(investment_path).map_err(io_err(investment_path))?;
    let (investment, meta): (Vec<f64>, Option<SolutionDump>) =
        if investment_path.extension().is_some_and(|e| e == "json") {
            let dump: SolutionDump = serde_json::from_str(&text)?;
            (dump.investment.clone(), Some(dump))
        } else {
            let mut values = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                values.push(line.parse::<f64>().map_err(|_| {
                    PipelineError::Config(format!("bad investment value {line:?}"))
                })?);
            }
            (values, None)
        };
    let eval_path = cfg.output_dir.join("eval.csv");
    let eval = parse_scenario_csv(&read_artifact(&eval_path, "parse", "evaluate")?)?;
    let report = evaluate_investment(&net, &investment, &eval, &cfg.solver.to_options())?;
    let stem = investment_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "investment".into());
    let out = ReportDump {
        model: meta.as_ref().map_or_else(|| stem.clone(), |d| d.model.clone()),
        sigma: meta.as_ref().map_or(0.0, |d| d.sigma),
        lambda: meta.as_ref().and_then(|d| d.lambda),
        hyperplanes: meta.as_ref().and_then(|d| d.hyperplanes),
        invest_cost: report.investment_cost,
        metrics: report.metrics,
        per_scenario_outsourced: report.per_scenario_outsourced,
    };
    write_file(
        &cfg.output_dir.join("reports").join(format!("{stem}.json")),
        &to_pretty_json(&out)?,
    )?;
    Ok(out)
}

/// Merges report dumps into the canonical frontier CSV.
pub fn stage_frontier(report_paths: &[PathBuf]) -> Result<String, PipelineError> {
    let mut points = Vec::new();
    for path in report_paths {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let dump: ReportDump = serde_json::from_str(&text)?;
        points.push(dump.to_frontier_point());
    }
    Ok(frontier_csv(&points))
}

/// Runs the whole pipeline: parse, build sets, solve and evaluate every
/// grid point (with `run.jobs` workers), then write `frontier.csv` and
/// `manifest.json`. Identical config and seed produce byte-identical
/// artifacts; on failure a `FAILED` marker with the diagnostic is left
/// next to whatever partial results exist.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Manifest, PipelineError> {
    cfg.validate()?;
    match run_experiment_inner(cfg) {
        Ok(manifest) => Ok(manifest),
        Err(err) => {
            let _ = write_file(&cfg.output_dir.join("FAILED"), &format!("{err}\n"));
            Err(err)
        }
    }
}

fn run_experiment_inner(cfg: &ExperimentConfig) -> Result<Manifest, PipelineError> {
    let summary = stage_parse(cfg)?;
    let families = stage_build_sets(cfg)?;
    let (net, _) = load_inputs(cfg)?;
    let points = enumerate_grid(cfg)?;

    // Worker pool over grid points with deterministic collation: results
    // land in their point's slot regardless of completion order.
    let results: Vec<Option<Result<(SolutionDump, ReportDump), PipelineError>>> =
        if cfg.run.jobs <= 1 {
            points
                .iter()
                .map(|p| Some(process_point(cfg, &net, p)))
                .collect()
        } else {
            let slots: Mutex<Vec<Option<Result<(SolutionDump, ReportDump), PipelineError>>>> =
                Mutex::new((0..points.len()).map(|_| None).collect());
            let next = AtomicUsize::new(0);
            std::thread::scope(|scope| {
                for _ in 0..cfg.run.jobs.min(points.len().max(1)) {
                    scope.spawn(|| loop {
                        let idx = next.fetch_add(1, Ordering::SeqCst);
                        if idx >= points.len() {
                            break;
                        }
                        let outcome = process_point(cfg, &net, &points[idx]);
                        slots.lock().unwrap()[idx] = Some(outcome);
                    });
                }
            });
            slots.into_inner().unwrap()
        };

    let mut frontier_points = Vec::with_capacity(points.len());
    for outcome in results {
        let (_, report) = outcome.expect("every slot filled")?;
        frontier_points.push(report.to_frontier_point());
    }
    write_file(&cfg.output_dir.join("frontier.csv"), &frontier_csv(&frontier_points))?;

    let manifest = Manifest {
        config_hash: cfg.fingerprint(),
        seed: cfg.seed,
        network: cfg.network.clone(),
        scenario_source: cfg
            .scenario_dir
            .clone()
            .or_else(|| cfg.scenario_csv.clone())
            .expect("validated"),
        summary,
        families,
        sigma_grid: cfg.grid.sigma.clone(),
        solver: cfg.solver.clone(),
        points: points.iter().map(GridPoint::tag).collect(),
    };
    write_file(&cfg.output_dir.join("manifest.json"), &to_pretty_json(&manifest)?)?;
    Ok(manifest)
}

fn process_point(
    cfg: &ExperimentConfig,
    net: &NetworkSpec,
    point: &GridPoint,
) -> Result<(SolutionDump, ReportDump), PipelineError> {
    let dump = stage_solve(cfg, net, point)?;
    let report = stage_evaluate_point(cfg, net, point, &dump)?;
    Ok((dump, report))
}
