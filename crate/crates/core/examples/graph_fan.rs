//! Builds the fan of a graph associahedron and prints its invariants.
//!
//! cargo run --example graph_fan -- C5

use graph_assoc::fan::{build_graph_fan, build_graph_fan_with_order, SubdivisionOrder};
use graph_assoc::graph::parse_graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "P4".to_string());
    let g = parse_graph(&spec)?;
    let fan = build_graph_fan(&g)?;
    println!("{spec}: dimension {}", fan.dim());
    println!("f-vector {:?}", fan.f_vector());
    println!("smooth {}, complete {}", fan.is_smooth(), fan.is_complete());

    // the result does not depend on the order within a tube size
    let shuffled = build_graph_fan_with_order(&g, SubdivisionOrder::Shuffled(7))?;
    println!(
        "same fan after shuffling: {}",
        shuffled.canonical_form() == fan.canonical_form()
    );

    print!("{}", fan.to_text());
    Ok(())
}
