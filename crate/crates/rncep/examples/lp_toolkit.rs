//! The LP layer on its own: build a small program, solve it, inspect
//! duals, export LP text for external cross-checks, and enumerate
//! polytope vertices.
//!
//! ```bash
//! cargo run --example lp_toolkit
//! ```

use rncep::lp::{
    solve, vertex_enumerate, write_lp_file, IndexedNames, LinearProgram, RowSense, SolveOptions,
};
use rncep::uncertainty::Polyhedron;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // min -3x - 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18; x, y >= 0.
    let mut lp = LinearProgram::new();
    let x = lp.add_col(-3.0, 0.0, f64::INFINITY);
    let y = lp.add_col(-5.0, 0.0, f64::INFINITY);
    lp.add_row(RowSense::Le, 4.0, &[(x, 1.0)]);
    lp.add_row(RowSense::Le, 12.0, &[(y, 2.0)]);
    lp.add_row(RowSense::Le, 18.0, &[(x, 3.0), (y, 2.0)]);

    let sol = solve(&lp, &SolveOptions::default())?;
    println!("status: {:?}", sol.status);
    println!("objective: {} at x = {:?}", sol.objective, sol.x);
    println!("row duals: {:?}", sol.duals);
    println!("dual objective (strong duality): {}", sol.dual_objective(&lp));
    println!("iterations: {}", sol.iterations);

    // The same program in LP text format, accepted by mainstream solvers.
    println!("\n{}", write_lp_file(&lp, &IndexedNames)?);

    // Vertex enumeration doubles as an independent check on small
    // programs: the optimum sits on one of the vertices.
    let region = Polyhedron {
        rows: vec![vec![3.0, 2.0]],
        rhs: vec![18.0],
        lower: vec![0.0, 0.0],
        upper: vec![4.0, 6.0],
        seed: None,
    };
    let vertices = vertex_enumerate(&region)?;
    println!("feasible-region vertices:");
    let mut best = f64::INFINITY;
    for v in &vertices {
        let value = -3.0 * v[0] - 5.0 * v[1];
        println!("  {v:?} -> {value}");
        best = best.min(value);
    }
    assert!((best - sol.objective).abs() <= 1e-9);
    println!("vertex minimum matches the simplex objective");
    Ok(())
}
