//! Classifies a few graph families and prints the explicit weights or the
//! obstruction found.
//!
//! cargo run --example classify_graphs [GRAPH...]

use graph_assoc::graph::parse_graph;
use graph_assoc::obstruction::find_obstruction;
use graph_assoc::weights::remark_weights;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let specs: Vec<String> = if args.is_empty() {
        [
            "K4",
            "S5",
            "cone^2(D2)",
            "cone^3(D3)",
            "P4",
            "C5",
            "Kb2,3",
            "Kb1,1,2",
        ]
        .map(String::from)
        .to_vec()
    } else {
        args
    };
    for spec in &specs {
        let g = parse_graph(spec)?;
        match g.classify_iterated_cone() {
            Some(cs) => {
                let w = remark_weights(&g, &cs)?;
                println!(
                    "{spec:>12}  yes  k={} cones={}  weights ({w})",
                    cs.k(),
                    cs.num_cones()
                );
            }
            None => {
                let witness = find_obstruction(&g)?;
                let shown =
                    witness.map_or("none".to_string(), |w| serde_json::to_string(&w).unwrap());
                println!("{spec:>12}  no   {shown}");
            }
        }
    }
    Ok(())
}
