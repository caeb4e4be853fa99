//! Toric graph associahedra and Hassett spaces of weighted stable curves.
//!
//! The toric variety of a graph associahedron is the iterated blowup of
//! projective space along the coordinate subspaces indexed by tubes. It is a
//! Hassett space exactly when the graph is an iterated cone over a discrete
//! set. This crate makes both sides computable:
//!
//! - [`graph`]: graphs, tubes, iterated-cone recognition, a small graph DSL and
//!   enumeration of small graphs up to isomorphism;
//! - [`eps`]: exact rationals extended by a formal infinitesimal ε;
//! - [`weights`]: weight vectors, the explicit weights of an iterated cone and
//!   the tube/non-tube weight inequalities;
//! - [`linear`] and [`obstruction`]: exact feasibility of those inequalities and
//!   the two combinatorial obstructions;
//! - [`fan`] and [`tubing`]: the graph fan by stellar subdivision and its
//!   face structure through tubings;
//! - [`moduli`]: stable dual trees and nodal divisors;
//! - [`report`]: the commands behind the `graph-assoc` binary.
//!
//! The `examples/` directory has one runnable program per area, e.g.
//! `cargo run --example classify_graphs`.

pub mod eps;
pub mod fan;
pub mod graph;
pub mod linear;
pub mod moduli;
pub mod obstruction;
pub mod report;
pub mod tubing;
pub mod weights;
