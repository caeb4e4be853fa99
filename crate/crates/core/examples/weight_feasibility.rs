//! Solves the tube/non-tube weight inequalities exactly, or prints a
//! certificate that they have no solution.
//!
//! cargo run --example weight_feasibility -- C4

use graph_assoc::graph::parse_graph;
use graph_assoc::linear::feasible;
use graph_assoc::obstruction::{
    contradiction_certificate, find_obstruction, w1w2_system, weights_from_assignment,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = std::env::args().nth(1).unwrap_or_else(|| "P3".to_string());
    let g = parse_graph(&spec)?;
    let ws = w1w2_system(&g);
    println!(
        "{spec}: {} variables, {} rows",
        ws.system.num_vars(),
        ws.system.rows().len()
    );
    match feasible(&ws.system)? {
        Some(x) => println!("feasible, e.g. weights ({})", weights_from_assignment(&x)),
        None => {
            println!("infeasible");
            if let Some(w) = find_obstruction(&g)? {
                println!("obstruction {}", serde_json::to_string(&w)?);
                let cert = contradiction_certificate(&ws, &w).expect("rows exist");
                for (row, lambda) in &cert {
                    println!("  {lambda} x {:?}", ws.origins[*row]);
                }
                println!(
                    "certificate checks: {}",
                    ws.system.is_infeasibility_certificate(&cert)
                );
            }
        }
    }
    Ok(())
}
