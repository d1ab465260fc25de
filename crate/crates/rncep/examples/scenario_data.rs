//! Load demand scenarios, split train/eval, and truncate to the heaviest
//! commodities.
//!
//! ```bash
//! cargo run --example scenario_data
//! ```

use std::path::Path;

use rncep::sndlib::{load_scenario_dir, parse_scenario_csv, write_scenario_csv};
use rncep::uncertainty::{commodity_stats, select_top_commodities, split_train_eval};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");

    // Scenario matrices live in a plain CSV: one `source:sink` column per
    // commodity, one row per scenario.
    let csv = std::fs::read_to_string(data.join("desk-scenarios.csv"))?;
    let set = parse_scenario_csv(&csv)?;
    println!("desk-scenarios.csv: {set}");

    // Alternatively, a directory of SNDlib demand files (one per scenario)
    // is unified over the `(source, sink)` pairs seen anywhere; pairs a
    // scenario does not mention get demand zero.
    let from_dir = load_scenario_dir(&data.join("desk-demands"), None)?;
    println!("desk-demands/: {from_dir}");
    for (label, row) in from_dir.scenario_labels().iter().zip(from_dir.demands()) {
        println!("  {label}: {row:?}");
    }

    // Every stride-th scenario trains, the rest evaluate.
    let (train, eval) = split_train_eval(&set, 4)?;
    println!("\nstride 4 split: {} train / {} eval", train.num_scenarios(), eval.num_scenarios());

    // Keep the commodities carrying the most demand.
    for k in 1..=set.num_commodities() {
        let (top, coverage) = select_top_commodities(&set, k)?;
        let names: Vec<String> =
            top.commodities().iter().map(|(s, t)| format!("{s}->{t}")).collect();
        println!("top-{k}: coverage {:.2}% [{}]", coverage * 100.0, names.join(", "));
    }

    // Per-commodity statistics feed the uncertainty models; the scenario
    // average divides by the number of positive observations.
    println!();
    for k in 0..set.num_commodities() {
        let stats = commodity_stats(&set, k)?;
        let (s, t) = &set.commodities()[k];
        println!(
            "{s}->{t}: positive in {}/{} scenarios, avg {:.3}, min+ {:.1}, max {:.1}",
            stats.positive_count,
            set.num_scenarios(),
            stats.mean,
            stats.min_positive,
            stats.max
        );
    }

    // Writing is the exact inverse of parsing.
    assert_eq!(parse_scenario_csv(&write_scenario_csv(&set))?, set);
    println!("\nround trip: exact");
    Ok(())
}
