//! Shared desk-scale fixtures for the integration tests: the four-node
//! network, its eight-scenario demand matrix, and polyhedra sampled from
//! them.

// Each integration test binary compiles its own copy, so helpers unused by
// one binary are expected.
#![allow(dead_code)]

use std::path::PathBuf;

use rncep::model::resolve_commodities;
use rncep::sndlib::{parse_network, parse_scenario_csv, NetworkSpec, ScenarioSet};
use rncep::uncertainty::{sample_hyperplanes, Polyhedron};

pub const DESK_SEED: u64 = 0xde5c;

pub fn data_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

/// Four nodes, six directed arcs (three undirected links).
pub fn desk_network() -> NetworkSpec {
    let text = std::fs::read_to_string(data_dir().join("desk.net")).unwrap();
    parse_network(&text).unwrap()
}

/// Eight scenarios over three commodities.
pub fn desk_scenarios() -> ScenarioSet {
    let text = std::fs::read_to_string(data_dir().join("desk-scenarios.csv")).unwrap();
    parse_scenario_csv(&text).unwrap()
}

pub fn desk_pairs(net: &NetworkSpec, set: &ScenarioSet) -> Vec<(usize, usize)> {
    resolve_commodities(net, set.commodities()).unwrap()
}

/// Polyhedron sampled from the full desk matrix with `m` total rows.
pub fn desk_polyhedron(m: usize) -> Polyhedron {
    sample_hyperplanes(&desk_scenarios(), m, DESK_SEED).unwrap()
}
