//! Explicit weights of iterated cones, checked against the tube inequalities,
//! with the range of eps over which every comparison keeps its sign.
//!
//! cargo run --example hassett_weights

use graph_assoc::eps::{audit_comparisons, default_eps};
use graph_assoc::graph::parse_graph;
use graph_assoc::weights::{check_w1_w2, remark_weights};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for spec in ["K3", "S4", "cone^2(D2)", "cone^2(D3)", "K5"] {
        let g = parse_graph(spec)?;
        let cs = g.classify_iterated_cone().expect("iterated cone");
        let w = remark_weights(&g, &cs)?;
        let (outcome, audit) = audit_comparisons(|| {
            (
                w.is_valid().is_valid(),
                check_w1_w2(&g, &w).map(|o| o.passed()),
            )
        });
        let eps = default_eps(w.n(), cs.k());
        let at: Vec<String> = w
            .entries()
            .iter()
            .map(|c| c.instantiate(&eps).map(|r| r.to_string()))
            .collect::<Result<_, _>>()?;
        println!("{spec}: ({w})");
        println!("  valid {}, inequalities hold {}", outcome.0, outcome.1?);
        println!(
            "  holds for 0 < eps < {}; at eps = {eps}: ({})",
            audit.separation_bound(),
            at.join(", ")
        );
    }
    Ok(())
}
