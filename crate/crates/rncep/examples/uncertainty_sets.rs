//! Build the three demand-uncertainty descriptions from training data:
//! the lambda-scaled discrete set, a sampled polyhedron, and the
//! zero-inflated uniform mean.
//!
//! ```bash
//! cargo run --example uncertainty_sets
//! ```

use rncep::sndlib::parse_scenario_csv;
use rncep::uncertainty::{
    build_discrete_set, sample_hyperplanes, zero_inflated_mean, Polyhedron, CONTAINS_TOL,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let csv = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/data/desk-scenarios.csv"
    ))?;
    let train = parse_scenario_csv(&csv)?;

    // Discrete sets blend each scenario with its per-commodity average:
    // lambda = 1 keeps the raw data, lambda = 0 collapses onto the average.
    println!("discrete blends of scenario 0 = {:?}:", train.row(0));
    for lambda in [0.0, 0.5, 1.0] {
        let set = build_discrete_set(&train, lambda)?;
        let row: Vec<String> = set.scenarios[0].iter().map(|v| format!("{v:.3}")).collect();
        println!("  lambda {lambda:>3}: [{}]", row.join(", "));
    }

    // Polyhedra: row 0 is always the sum-constraint (1/K, ..., 1/K); the
    // remaining rows are sampled uniformly from [0,1]^K with a recorded
    // seed. Right-hand sides are tightened onto the training scenarios and
    // the componentwise scenario box is attached.
    let poly = sample_hyperplanes(&train, 3, 2024)?;
    println!("\npolyhedron with 3 rows (seed 2024):");
    for (row, b) in poly.rows.iter().zip(&poly.rhs) {
        let v: Vec<String> = row.iter().map(|x| format!("{x:.3}")).collect();
        println!("  [{}] . d <= {b:.3}", v.join(", "));
    }
    println!("  box: {:?} .. {:?}", poly.lower, poly.upper);
    let inside = train.demands().iter().all(|r| poly.contains(r, CONTAINS_TOL));
    println!("  contains all training scenarios: {inside}");
    let mut outside = poly.upper.clone();
    outside[0] += 1.0;
    println!("  contains a point past the box: {}", poly.contains(&outside, CONTAINS_TOL));

    // The CSV block form round-trips exactly and records the seed.
    let text = poly.to_csv();
    println!("\nserialized polyhedron:\n{text}");
    assert_eq!(Polyhedron::from_csv(&text)?, poly);

    // The stochastic model uses the mean of a zero-inflated uniform fit:
    // 0.5 (min positive + max), deflated by the zero frequency.
    let mean = zero_inflated_mean(&train)?;
    println!("zero-inflated uniform means: {:?}", mean.values);
    Ok(())
}
