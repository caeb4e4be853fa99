//! Lists maximal tubings and checks that tubings match the cones of the fan.
//!
//! cargo run --example tubings -- P3

use graph_assoc::graph::parse_graph;
use graph_assoc::tubing::{enumerate_tubings, verify_fan_tubing_bijection};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "P3".to_string());
    let g = parse_graph(&spec)?;
    let d = g.num_vertices() - 1;
    let maximal = enumerate_tubings(&g, d);
    println!("{spec}: {} maximal tubings", maximal.len());
    for t in maximal.iter().take(20) {
        println!("  {t}");
    }
    if maximal.len() > 20 {
        println!("  ...");
    }
    let report = verify_fan_tubing_bijection(&g)?;
    println!(
        "tubings by size {:?}, bijection with cones: {}",
        report.counts,
        report.passed()
    );
    Ok(())
}
