//! SNDlib-style network and demand-scenario ingestion, plus a plain CSV
//! scenario-matrix format.
//!
//! # Network files
//!
//! The parser reads the line-oriented SNDlib native ASCII format (not the
//! XML variant). Lines starting with `?` and `#`-comments are ignored. Two
//! sections are required:
//!
//! ```text
//! NODES (
//!   <name> [( <x> <y> )]
//! )
//! LINKS (
//!   <id> ( <src> <dst> ) <num>* [( <modCapacity> <modCost> ... )]
//! )
//! ```
//!
//! Every undirected link is expanded into two directed arcs, each carrying
//! the full link capacity and cost. Per link, the base capacity `u` is the
//! first plain number (the pre-installed capacity; 0 if absent) and the
//! per-unit expansion cost `c` comes from the first capacity module as
//! `modCost / modCapacity`. Fixture files may use the simplified two-number
//! form `<id> ( <src> <dst> ) <u> <c>` instead of a module list.
//!
//! Demand files use the same framing with a `DEMANDS` section; an entry is
//! `<id> ( <src> <dst> ) [<routingUnit>] <value> [<maxPathLen>]` and
//! repeated `(src, dst)` pairs within one file are summed.
//!
//! # Scenario CSV
//!
//! UTF-8, comma-separated. The header names one commodity per cell as
//! `source:sink`; each following row is one scenario. When scenario labels
//! are not simply `0, 1, 2, ...`, a leading `scenario` column carries them.
//! Values are printed in shortest round-trip decimal form, so
//! `parse(write(s)) == s` exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SndlibError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

impl SndlibError {
    fn parse(line: usize, message: impl Into<String>) -> Self {
        SndlibError::Parse { line, message: message.into() }
    }
}

/// A directed arc with its base capacity and per-unit expansion cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
    pub cost: f64,
}

/// An undirected link as read from a LINKS section, endpoints resolved to
/// node indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub capacity: f64,
    pub cost: f64,
}

/// A directed network with expandable arc capacities.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    pub nodes: Vec<String>,
    pub arcs: Vec<Arc>,
}

impl NetworkSpec {
    pub fn new(nodes: Vec<String>, arcs: Vec<Arc>) -> Result<Self, SndlibError> {
        let spec = NetworkSpec { nodes, arcs };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), SndlibError> {
        let n = self.nodes.len();
        let mut seen = std::collections::BTreeSet::new();
        for arc in &self.arcs {
            if arc.tail >= n || arc.head >= n {
                return Err(SndlibError::Invalid(format!(
                    "arc ({}, {}) references a missing node",
                    arc.tail, arc.head
                )));
            }
            if arc.capacity < 0.0 || !arc.capacity.is_finite() {
                return Err(SndlibError::Invalid(format!("negative arc capacity {}", arc.capacity)));
            }
            if arc.cost < 0.0 || !arc.cost.is_finite() {
                return Err(SndlibError::Invalid(format!("negative arc cost {}", arc.cost)));
            }
            if !seen.insert((arc.tail, arc.head)) {
                return Err(SndlibError::Invalid(format!(
                    "duplicate directed arc {} -> {}",
                    self.nodes[arc.tail], self.nodes[arc.head]
                )));
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    /// Incoming and outgoing arc lists per node, derived on demand.
    pub fn adjacency(&self) -> Adjacency {
        let mut incoming = vec![Vec::new(); self.nodes.len()];
        let mut outgoing = vec![Vec::new(); self.nodes.len()];
        for (idx, arc) in self.arcs.iter().enumerate() {
            outgoing[arc.tail].push(idx);
            incoming[arc.head].push(idx);
        }
        Adjacency { incoming, outgoing }
    }

    /// Exact investment cost `sum_a c_a x_a` of an expansion vector.
    pub fn investment_cost(&self, x: &[f64]) -> f64 {
        self.arcs.iter().zip(x).map(|(a, v)| a.cost * v).sum()
    }
}

#[derive(Debug, Clone)]
pub struct Adjacency {
    pub incoming: Vec<Vec<usize>>,
    pub outgoing: Vec<Vec<usize>>,
}

/// A demand matrix over named commodities; rows are scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    commodities: Vec<(String, String)>,
    demands: Vec<Vec<f64>>,
    scenario_labels: Vec<String>,
}

fn check_name(name: &str) -> Result<(), SndlibError> {
    if name.is_empty() || name.contains([',', ':', '\n', '\r']) {
        return Err(SndlibError::Invalid(format!("invalid node name {name:?}")));
    }
    Ok(())
}

impl ScenarioSet {
    pub fn new(
        commodities: Vec<(String, String)>,
        demands: Vec<Vec<f64>>,
        scenario_labels: Vec<String>,
    ) -> Result<Self, SndlibError> {
        let k = commodities.len();
        for (s, t) in &commodities {
            check_name(s)?;
            check_name(t)?;
            if s == t {
                return Err(SndlibError::Invalid(format!("commodity source equals sink: {s}")));
            }
        }
        let mut sorted = commodities.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != k {
            return Err(SndlibError::Invalid("duplicate commodity pair".into()));
        }
        if demands.len() != scenario_labels.len() {
            return Err(SndlibError::Invalid(format!(
                "{} demand rows but {} labels",
                demands.len(),
                scenario_labels.len()
            )));
        }
        for row in &demands {
            if row.len() != k {
                return Err(SndlibError::Invalid(format!(
                    "demand row has {} entries, expected {k}",
                    row.len()
                )));
            }
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(SndlibError::Invalid(format!("invalid demand value {v}")));
                }
            }
        }
        Ok(ScenarioSet { commodities, demands, scenario_labels })
    }

    /// Builds a set with canonical labels `0, 1, ...`.
    pub fn from_rows(
        commodities: Vec<(String, String)>,
        demands: Vec<Vec<f64>>,
    ) -> Result<Self, SndlibError> {
        let labels = (0..demands.len()).map(|i| i.to_string()).collect();
        ScenarioSet::new(commodities, demands, labels)
    }

    pub fn commodities(&self) -> &[(String, String)] {
        &self.commodities
    }

    pub fn demands(&self) -> &[Vec<f64>] {
        &self.demands
    }

    pub fn scenario_labels(&self) -> &[String] {
        &self.scenario_labels
    }

    pub fn num_scenarios(&self) -> usize {
        self.demands.len()
    }

    pub fn num_commodities(&self) -> usize {
        self.commodities.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.demands[i]
    }

    pub fn column(&self, k: usize) -> impl Iterator<Item = f64> + '_ {
        self.demands.iter().map(move |r| r[k])
    }

    pub fn total_demand(&self) -> f64 {
        self.demands.iter().flatten().sum()
    }

    /// Keeps the given commodity columns (in the given order).
    pub fn restrict_commodities(&self, keep: &[usize]) -> ScenarioSet {
        let commodities = keep.iter().map(|&k| self.commodities[k].clone()).collect();
        let demands =
            self.demands.iter().map(|row| keep.iter().map(|&k| row[k]).collect()).collect();
        ScenarioSet { commodities, demands, scenario_labels: self.scenario_labels.clone() }
    }

    /// Keeps the given scenario rows (in the given order).
    pub fn restrict_scenarios(&self, keep: &[usize]) -> ScenarioSet {
        let demands = keep.iter().map(|&i| self.demands[i].clone()).collect();
        let labels = keep.iter().map(|&i| self.scenario_labels[i].clone()).collect();
        ScenarioSet { commodities: self.commodities.clone(), demands, scenario_labels: labels }
    }

    fn labels_are_canonical(&self) -> bool {
        self.scenario_labels.iter().enumerate().all(|(i, l)| l == &i.to_string())
    }
}

impl fmt::Display for ScenarioSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} scenarios x {} commodities",
            self.num_scenarios(),
            self.num_commodities()
        )
    }
}

/// Tokenizes one content line, splitting parentheses out as tokens.
fn tokenize(line: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in line.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

/// Strips comments and meta lines, yielding `(line_number, tokens)`.
fn content_lines(text: &str) -> Vec<(usize, Vec<String>)> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('?') {
            continue;
        }
        out.push((idx + 1, tokenize(line)));
    }
    out
}

struct Section {
    name: String,
    entries: Vec<(usize, Vec<String>)>,
}

/// Splits the token stream into named top-level sections.
fn split_sections(text: &str) -> Result<Vec<Section>, SndlibError> {
    let lines = content_lines(text);
    let mut sections = Vec::new();
    let mut current: Option<Section> = None;
    for (line_no, tokens) in lines {
        match &mut current {
            None => {
                if tokens.len() == 2 && tokens[1] == "(" {
                    current = Some(Section { name: tokens[0].clone(), entries: Vec::new() });
                } else if tokens.len() == 1 && tokens[0] != ")" {
                    // META-style single tokens outside sections are skipped.
                } else {
                    return Err(SndlibError::parse(
                        line_no,
                        format!("expected a section header, got {:?}", tokens.join(" ")),
                    ));
                }
            }
            Some(section) => {
                if tokens.len() == 1 && tokens[0] == ")" {
                    sections.push(current.take().unwrap());
                } else {
                    section.entries.push((line_no, tokens));
                }
            }
        }
    }
    if let Some(open) = current {
        return Err(SndlibError::Invalid(format!("unterminated section {}", open.name)));
    }
    Ok(sections)
}

fn parse_num(line: usize, token: &str) -> Result<f64, SndlibError> {
    token
        .parse::<f64>()
        .map_err(|_| SndlibError::parse(line, format!("expected a number, got {token:?}")))
}

/// An entry of the form `id ( a b ) tail...` split into its pieces.
fn split_endpoint_entry<'a>(
    line: usize,
    tokens: &'a [String],
) -> Result<(&'a str, &'a str, &'a str, &'a [String]), SndlibError> {
    if tokens.len() < 5 || tokens[1] != "(" || tokens[4] != ")" {
        return Err(SndlibError::parse(line, "expected `<id> ( <src> <dst> ) ...`"));
    }
    Ok((&tokens[0], &tokens[2], &tokens[3], &tokens[5..]))
}

/// Parses an SNDlib native network file into a directed [`NetworkSpec`].
pub fn parse_network(text: &str) -> Result<NetworkSpec, SndlibError> {
    let sections = split_sections(text)?;
    let nodes_section = sections
        .iter()
        .find(|s| s.name == "NODES")
        .ok_or_else(|| SndlibError::Invalid("missing NODES section".into()))?;
    let links_section = sections
        .iter()
        .find(|s| s.name == "LINKS")
        .ok_or_else(|| SndlibError::Invalid("missing LINKS section".into()))?;

    let mut nodes: Vec<String> = Vec::new();
    for (line, tokens) in &nodes_section.entries {
        let name = tokens[0].clone();
        check_name(&name).map_err(|e| SndlibError::parse(*line, e.to_string()))?;
        if nodes.contains(&name) {
            return Err(SndlibError::parse(*line, format!("duplicate node {name}")));
        }
        nodes.push(name);
    }

    let mut links: Vec<Link> = Vec::new();
    for (line, tokens) in &links_section.entries {
        let (_id, src, dst, tail) = split_endpoint_entry(*line, tokens)?;
        let a = nodes
            .iter()
            .position(|n| n == src)
            .ok_or_else(|| SndlibError::parse(*line, format!("unknown node {src}")))?;
        let b = nodes
            .iter()
            .position(|n| n == dst)
            .ok_or_else(|| SndlibError::parse(*line, format!("unknown node {dst}")))?;

        // Plain numbers, then an optional parenthesized capacity-module list.
        let mut plain: Vec<f64> = Vec::new();
        let mut modules: Vec<f64> = Vec::new();
        let mut in_modules = false;
        for tok in tail {
            match tok.as_str() {
                "(" => in_modules = true,
                ")" => in_modules = false,
                t => {
                    let v = parse_num(*line, t)?;
                    if in_modules {
                        modules.push(v);
                    } else {
                        plain.push(v);
                    }
                }
            }
        }
        let capacity = plain.first().copied().unwrap_or(0.0);
        let cost = if modules.len() >= 2 {
            let (mod_cap, mod_cost) = (modules[0], modules[1]);
            if mod_cap <= 0.0 {
                return Err(SndlibError::parse(*line, "capacity module with non-positive size"));
            }
            mod_cost / mod_cap
        } else if plain.len() == 2 {
            plain[1]
        } else {
            0.0
        };
        if capacity < 0.0 {
            return Err(SndlibError::parse(*line, format!("negative link capacity {capacity}")));
        }
        if cost < 0.0 {
            return Err(SndlibError::parse(*line, format!("negative link cost {cost}")));
        }
        links.push(Link { a, b, capacity, cost });
    }

    NetworkSpec::new(nodes, expand_undirected(&links))
}

/// Expands undirected links into two directed arcs each, both inheriting
/// the full link capacity and cost.
pub fn expand_undirected(links: &[Link]) -> Vec<Arc> {
    let mut arcs = Vec::with_capacity(2 * links.len());
    for link in links {
        arcs.push(Arc { tail: link.a, head: link.b, capacity: link.capacity, cost: link.cost });
        arcs.push(Arc { tail: link.b, head: link.a, capacity: link.capacity, cost: link.cost });
    }
    arcs
}

/// Parses the DEMANDS section of an SNDlib file; repeated pairs are summed.
pub fn parse_demands(text: &str) -> Result<Vec<(String, String, f64)>, SndlibError> {
    let sections = split_sections(text)?;
    let demands_section = sections
        .iter()
        .find(|s| s.name == "DEMANDS")
        .ok_or_else(|| SndlibError::Invalid("missing DEMANDS section".into()))?;

    let mut by_pair: BTreeMap<(String, String), f64> = BTreeMap::new();
    for (line, tokens) in &demands_section.entries {
        let (_id, src, dst, tail) = split_endpoint_entry(*line, tokens)?;
        check_name(src).map_err(|e| SndlibError::parse(*line, e.to_string()))?;
        check_name(dst).map_err(|e| SndlibError::parse(*line, e.to_string()))?;
        if src == dst {
            return Err(SndlibError::parse(*line, format!("demand from {src} to itself")));
        }
        let nums: Vec<&String> = tail.iter().filter(|t| *t != "(" && *t != ")").collect();
        let value = match nums.len() {
            0 => return Err(SndlibError::parse(*line, "demand entry without a value")),
            1 => parse_num(*line, nums[0])?,
            // routingUnit value [maxPathLength]
            _ => parse_num(*line, nums[1])?,
        };
        if value < 0.0 {
            return Err(SndlibError::parse(*line, format!("negative demand {value}")));
        }
        *by_pair.entry((src.to_string(), dst.to_string())).or_insert(0.0) += value;
    }
    Ok(by_pair.into_iter().map(|((s, t), v)| (s, t, v)).collect())
}

/// Loads one demand file per scenario from a directory, in lexicographic
/// file-name order. The commodity list is the union of `(source, sink)`
/// pairs over all files (sorted lexicographically); pairs missing from a
/// scenario get demand zero. When a network is supplied, demand endpoints
/// must name its nodes.
pub fn load_scenario_dir(
    dir: &Path,
    net: Option<&NetworkSpec>,
) -> Result<ScenarioSet, SndlibError> {
    let io_err = |e: std::io::Error| SndlibError::Io { path: dir.display().to_string(), source: e };
    let mut files: Vec<std::path::PathBuf> = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err)? {
        let entry = entry.map_err(io_err)?;
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().to_string();
        if path.is_file() && !name.starts_with('.') {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(SndlibError::Invalid(format!("no scenario files in {}", dir.display())));
    }
    files.sort();

    let mut per_file: Vec<(String, Vec<(String, String, f64)>)> = Vec::new();
    let mut pairs: std::collections::BTreeSet<(String, String)> = std::collections::BTreeSet::new();
    for path in &files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SndlibError::Io { path: path.display().to_string(), source: e })?;
        let demands = parse_demands(&text)?;
        if let Some(net) = net {
            for (s, t, _) in &demands {
                for name in [s, t] {
                    if net.node_index(name).is_none() {
                        return Err(SndlibError::Invalid(format!(
                            "{}: demand endpoint {name} is not a network node",
                            path.display()
                        )));
                    }
                }
            }
        }
        for (s, t, _) in &demands {
            pairs.insert((s.clone(), t.clone()));
        }
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().to_string())
            .unwrap_or_else(|| path.display().to_string());
        per_file.push((label, demands));
    }

    let commodities: Vec<(String, String)> = pairs.into_iter().collect();
    let index: BTreeMap<(String, String), usize> =
        commodities.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let mut rows = Vec::with_capacity(per_file.len());
    let mut labels = Vec::with_capacity(per_file.len());
    for (label, demands) in per_file {
        let mut row = vec![0.0; commodities.len()];
        for (s, t, v) in demands {
            row[index[&(s, t)]] = v;
        }
        rows.push(row);
        labels.push(label);
    }
    ScenarioSet::new(commodities, rows, labels)
}

/// Writes the scenario-matrix CSV form (see module docs).
pub fn write_scenario_csv(set: &ScenarioSet) -> String {
    let mut out = String::new();
    let with_labels = !set.labels_are_canonical();
    if with_labels {
        out.push_str("scenario");
        if set.num_commodities() > 0 {
            out.push(',');
        }
    }
    let header: Vec<String> =
        set.commodities().iter().map(|(s, t)| format!("{s}:{t}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (i, row) in set.demands().iter().enumerate() {
        if with_labels {
            out.push_str(&set.scenario_labels()[i]);
            if !row.is_empty() {
                out.push(',');
            }
        }
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses the scenario-matrix CSV form.
pub fn parse_scenario_csv(text: &str) -> Result<ScenarioSet, SndlibError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| SndlibError::Invalid("empty scenario CSV".into()))?;
    let mut cells: Vec<&str> = header.trim_end_matches('\r').split(',').collect();
    let with_labels = cells.first() == Some(&"scenario");
    if with_labels {
        cells.remove(0);
    }
    let mut commodities = Vec::with_capacity(cells.len());
    for cell in &cells {
        let (s, t) = cell
            .split_once(':')
            .ok_or_else(|| SndlibError::parse(1, format!("bad commodity header {cell:?}")))?;
        if s.is_empty() || t.is_empty() {
            return Err(SndlibError::parse(1, format!("bad commodity header {cell:?}")));
        }
        commodities.push((s.to_string(), t.to_string()));
    }
    let k = commodities.len();

    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut cells: Vec<&str> = line.split(',').collect();
        if with_labels {
            labels.push(cells.remove(0).to_string());
        } else {
            labels.push(rows.len().to_string());
        }
        if cells.len() != k {
            return Err(SndlibError::parse(
                line_no,
                format!("row has {} values, expected {k}", cells.len()),
            ));
        }
        let mut row = Vec::with_capacity(k);
        for cell in cells {
            let v: f64 = cell.parse().map_err(|_| {
                SndlibError::parse(line_no, format!("bad demand value {cell:?}"))
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(SndlibError::parse(line_no, format!("invalid demand value {v}")));
            }
            row.push(v);
        }
        rows.push(row);
    }
    ScenarioSet::new(commodities, rows, labels)
}
