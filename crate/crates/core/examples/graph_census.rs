//! Counts connected graphs up to isomorphism and how many are iterated cones.
//!
//! cargo run --example graph_census -- 6

use graph_assoc::graph::connected_graphs;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let max: usize = std::env::args().nth(1).map_or(Ok(6), |s| s.parse())?;
    println!("{:>2} {:>9} {:>6}", "n", "connected", "cones");
    for n in 1..=max {
        let graphs = connected_graphs(n)?;
        let cones = graphs
            .iter()
            .filter(|g| g.classify_iterated_cone().is_some())
            .count();
        println!("{n:>2} {:>9} {cones:>6}", graphs.len());
    }
    Ok(())
}
