//! Build and solve all four expansion models on the bundled four-node
//! instance and compare their here-and-now investments.
//!
//! ```bash
//! cargo run --example solve_models
//! ```

use rncep::lp::{solve, LinearProgram, SolveOptions};
use rncep::model::{
    build_aarc, build_discrete_robust, build_nominal, build_stochastic_mean, extract_first_stage,
    resolve_commodities, VariableCatalog,
};
use rncep::sndlib::{parse_network, parse_scenario_csv, NetworkSpec};
use rncep::uncertainty::{build_discrete_set, sample_hyperplanes, zero_inflated_mean};

fn report(
    net: &NetworkSpec,
    name: &str,
    lp: &LinearProgram,
    cat: &VariableCatalog,
) -> Result<(), Box<dyn std::error::Error>> {
    let sol = solve(lp, &SolveOptions::default())?;
    let x = extract_first_stage(&sol, cat)?;
    let pretty: Vec<String> = x.iter().map(|v| format!("{v:.2}")).collect();
    println!(
        "{name:<12} objective {:>8.3}  invest cost {:>7.3}  x = [{}]  ({} cols, {} rows, {} iters)",
        sol.objective,
        net.investment_cost(&x),
        pretty.join(", "),
        lp.num_cols(),
        lp.num_rows(),
        sol.iterations
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let net = parse_network(&std::fs::read_to_string(data.join("desk.net"))?)?;
    let train = parse_scenario_csv(&std::fs::read_to_string(data.join("desk-scenarios.csv"))?)?;
    let pairs = resolve_commodities(&net, train.commodities())?;
    let sigma = 2.5;

    println!(
        "{} nodes / {} arcs / {} commodities, sigma = {sigma}\n",
        net.num_nodes(),
        net.num_arcs(),
        pairs.len()
    );

    // Nominal: one demand vector (here the first scenario).
    let (lp, cat) = build_nominal(&net, &pairs, train.row(0), sigma)?;
    report(&net, "nominal", &lp, &cat)?;

    // Worst case over the raw scenarios (lambda = 1) and over the
    // average-shrunk blend (lambda = 0.5).
    for lambda in [1.0, 0.5] {
        let set = build_discrete_set(&train, lambda)?;
        let (lp, cat) = build_discrete_robust(&net, &pairs, &set, sigma)?;
        report(&net, &format!("discrete@{lambda}"), &lp, &cat)?;
    }

    // Affine adjustable counterpart over a sampled polyhedron: flows are
    // affine in the demand vector, every constraint family dualized.
    let poly = sample_hyperplanes(&train, 2, 7)?;
    let (lp, cat) = build_aarc(&net, &pairs, &poly, sigma)?;
    report(&net, "aarc", &lp, &cat)?;

    // Stochastic mean model at the zero-inflated uniform fit.
    let mean = zero_inflated_mean(&train)?;
    let (lp, cat) = build_stochastic_mean(&net, &pairs, &mean, sigma)?;
    report(&net, "stochastic", &lp, &cat)?;

    Ok(())
}
