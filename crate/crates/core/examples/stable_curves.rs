//! Stable dual trees and nodal divisors for a few weight vectors.
//!
//! cargo run --example stable_curves -- "1,1,e,e,e"

use graph_assoc::moduli::{enumerate_stable_trees, max_components, nodal_divisors, tree_counts};
use graph_assoc::weights::WeightVector;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let vectors = if args.is_empty() {
        vec![
            "1,1,e,e,e".to_string(),
            "1,1/2,(1+e)/2,e,e".into(),
            "1,1,1,1,1".into(),
        ]
    } else {
        args
    };
    for text in &vectors {
        let w: WeightVector = text.parse()?;
        let cap = w.n() - 2;
        let trees = enumerate_stable_trees(&w, cap)?;
        println!("({w})");
        println!("  trees by component count {:?}", tree_counts(&trees));
        println!("  max components {}", max_components(&w, cap)?);
        for t in trees.iter().filter(|t| t.num_vertices() == cap).take(3) {
            println!("  {}", serde_json::to_string(t)?);
        }
        let divisors = nodal_divisors(&w)?;
        let shown: Vec<String> = divisors.iter().map(ToString::to_string).collect();
        println!("  {} nodal divisors: {}", divisors.len(), shown.join(" "));
    }
    Ok(())
}
