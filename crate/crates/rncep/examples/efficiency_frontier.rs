//! Run the full pipeline over a (family, sigma, lambda/hyperplane) grid
//! and print the resulting efficiency frontier.
//!
//! ```bash
//! cargo run --example efficiency_frontier
//! ```

use rncep::pipeline::{run_experiment, CommodityConfig, ExperimentConfig, GridConfig, RunConfig, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let out = std::env::temp_dir().join("rncep-frontier-example");

    let cfg = ExperimentConfig {
        network: data.join("desk.net"),
        scenario_dir: None,
        scenario_csv: Some(data.join("desk-scenarios.csv")),
        train_stride: 2,
        output_dir: out.clone(),
        seed: 2024,
        grid: GridConfig {
            sigma: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            lambda: vec![0.5, 1.0],
            hyperplanes: vec![1, 2],
        },
        commodities: CommodityConfig::default(),
        solver: SolverConfig::default(),
        run: RunConfig { jobs: 2, ..RunConfig::default() },
    };

    let manifest = run_experiment(&cfg)?;
    println!(
        "solved {} grid points (config hash {})\n",
        manifest.points.len(),
        manifest.config_hash
    );
    println!("{}", std::fs::read_to_string(out.join("frontier.csv"))?);
    println!("artifacts under {}", out.display());
    Ok(())
}
