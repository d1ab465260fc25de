//! Parse SNDlib-style network files into directed networks.
//!
//! ```bash
//! cargo run --example parse_network
//! ```

use rncep::sndlib::parse_network;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // The bundled 50-node instance: 88 undirected links become 176
    // directed arcs, each direction carrying the full link capacity and
    // per-unit expansion cost derived from the first capacity module.
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/germany50.net");
    let net = parse_network(&std::fs::read_to_string(path)?)?;
    println!("{path}");
    println!("  nodes: {}", net.num_nodes());
    println!("  directed arcs: {}", net.num_arcs());
    let total_cost: f64 = net.arcs.iter().map(|a| a.cost).sum();
    println!("  mean expansion cost: {:.2} per unit", total_cost / net.num_arcs() as f64);

    // Networks can also be written inline; the simplified two-number link
    // form is `<id> ( <src> <dst> ) <base capacity> <unit cost>`.
    let tiny = "\
NODES (
  west ( 0.0 0.0 )
  east ( 1.0 0.0 )
)
LINKS (
  cable ( west east ) 10.0 2.5
)
";
    let net = parse_network(tiny)?;
    println!("\ninline example:");
    for arc in &net.arcs {
        println!(
            "  {} -> {}: base capacity {}, expansion cost {}",
            net.nodes[arc.tail], net.nodes[arc.head], arc.capacity, arc.cost
        );
    }

    // Parse errors carry line numbers.
    let broken = "NODES (\n a\n)\nLINKS (\n l1 ( a ghost ) 0 1\n)\n";
    match parse_network(broken) {
        Err(err) => println!("\nexpected failure: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
