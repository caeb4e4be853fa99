//! Tubings: sets of pairwise compatible proper tubes, and their match with the
//! cones of the graph fan.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fan::{build_graph_fan, FanError};
use crate::graph::{Graph, GraphError, VertexSet};

/// Vertex-count guard for [`verify_fan_tubing_bijection`].
pub const MAX_BIJECTION_VERTICES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TubingError {
    #[error("{0} is not a proper tube")]
    NotAProperTube(VertexSet),
    #[error("tubes {0} and {1} are not compatible")]
    Incompatible(VertexSet, VertexSet),
    #[error("graph has {0} vertices; at most {MAX_BIJECTION_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error("graph must be connected")]
    Disconnected,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

fn is_proper_tube(g: &Graph, t: VertexSet) -> bool {
    !t.is_empty()
        && t.is_subset(g.vertices())
        && t != g.vertices()
        && (t.len() == 1 || g.induces_connected(t))
}

fn compatible_unchecked(g: &Graph, a: VertexSet, b: VertexSet) -> bool {
    a.is_subset(b) || b.is_subset(a) || (a.is_disjoint(b) && !g.induces_connected(a.union(b)))
}

/// Two proper tubes are compatible when nested, or disjoint with a
/// disconnected union.
pub fn compatible(g: &Graph, a: VertexSet, b: VertexSet) -> Result<bool, TubingError> {
    for t in [a, b] {
        if !is_proper_tube(g, t) {
            return Err(TubingError::NotAProperTube(t));
        }
    }
    Ok(compatible_unchecked(g, a, b))
}

/// Tubes sorted by their vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tubing {
    tubes: Vec<VertexSet>,
}

fn tube_order(a: &VertexSet, b: &VertexSet) -> std::cmp::Ordering {
    a.to_vec().cmp(&b.to_vec())
}

impl Tubing {
    /// Validates tubes and pairwise compatibility.
    pub fn new(g: &Graph, tubes: impl IntoIterator<Item = VertexSet>) -> Result<Self, TubingError> {
        let mut tubes: Vec<VertexSet> = tubes.into_iter().collect();
        tubes.sort_by(tube_order);
        tubes.dedup();
        for (i, &a) in tubes.iter().enumerate() {
            if !is_proper_tube(g, a) {
                return Err(TubingError::NotAProperTube(a));
            }
            if let Some(&b) = tubes[..i].iter().find(|&&b| !compatible_unchecked(g, a, b)) {
                return Err(TubingError::Incompatible(b, a));
            }
        }
        Ok(Tubing { tubes })
    }

    pub fn tubes(&self) -> &[VertexSet] {
        &self.tubes
    }

    pub fn len(&self) -> usize {
        self.tubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tubes.is_empty()
    }
}

impl std::fmt::Display for Tubing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.tubes.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn proper_tubes(g: &Graph) -> Vec<VertexSet> {
    let mut tubes: Vec<VertexSet> = g
        .vertices()
        .nonempty_subsets()
        .filter(|&t| is_proper_tube(g, t))
        .collect();
    tubes.sort_by(tube_order);
    tubes
}

/// Every tubing, grouped by size: entry `j` holds the tubings with `j` tubes.
pub fn all_tubings(g: &Graph) -> Vec<Vec<Tubing>> {
    let tubes = proper_tubes(g);
    let mut by_size: Vec<Vec<Tubing>> = vec![Vec::new(); g.num_vertices()];
    let mut chosen = Vec::new();
    extend(g, &tubes, 0, &mut chosen, &mut by_size);
    for level in by_size.iter_mut() {
        level.sort();
    }
    by_size
}

fn extend(
    g: &Graph,
    tubes: &[VertexSet],
    start: usize,
    chosen: &mut Vec<VertexSet>,
    out: &mut Vec<Vec<Tubing>>,
) {
    if chosen.len() >= out.len() {
        // a tubing of a connected graph on n vertices has at most n - 1 tubes
        return;
    }
    out[chosen.len()].push(Tubing {
        tubes: chosen.clone(),
    });
    for i in start..tubes.len() {
        let t = tubes[i];
        if chosen.iter().all(|&c| compatible_unchecked(g, c, t)) {
            chosen.push(t);
            extend(g, tubes, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

/// Tubings with exactly `size` tubes, sorted.
pub fn enumerate_tubings(g: &Graph, size: usize) -> Vec<Tubing> {
    all_tubings(g).into_iter().nth(size).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BijectionFailure {
    /// A tubing whose rays do not span a cone of the fan.
    TubingWithoutCone { tubing: Tubing },
    /// A cone that no tubing maps to.
    ConeWithoutTubing { rays: Vec<usize> },
    /// A tube with no ray in the fan.
    TubeWithoutRay { tube: VertexSet },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BijectionReport {
    /// Number of tubings (equivalently cones) with `j` elements, for `j = 1..=d`.
    pub counts: Vec<usize>,
    pub failure: Option<BijectionFailure>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Maps each tubing to the set of rays of its tubes and checks that this is a
/// bijection onto the cones of the graph fan, size by size.
pub fn verify_fan_tubing_bijection(g: &Graph) -> Result<BijectionReport, TubingError> {
    let n = g.num_vertices();
    if n > MAX_BIJECTION_VERTICES {
        return Err(TubingError::TooManyVertices(n));
    }
    if !g.is_connected() {
        return Err(TubingError::Disconnected);
    }
    let fan = build_graph_fan(g)?;
    let tubings = all_tubings(g);
    let mut counts = Vec::with_capacity(n - 1);
    for (size, level) in tubings.iter().enumerate().skip(1) {
        let faces = fan.faces(size);
        let mut images = BTreeSet::new();
        for tubing in level {
            let mut rays = Vec::with_capacity(size);
            for &t in tubing.tubes() {
                match fan.ray_for_tube(t) {
                    Some(r) => rays.push(r),
                    None => {
                        return Ok(BijectionReport {
                            counts,
                            failure: Some(BijectionFailure::TubeWithoutRay { tube: t }),
                        })
                    }
                }
            }
            rays.sort_unstable();
            if !faces.contains(&rays) {
                return Ok(BijectionReport {
                    counts,
                    failure: Some(BijectionFailure::TubingWithoutCone {
                        tubing: tubing.clone(),
                    }),
                });
            }
            images.insert(rays);
        }
        if let Some(cone) = faces.iter().find(|c| !images.contains(*c)) {
            return Ok(BijectionReport {
                counts,
                failure: Some(BijectionFailure::ConeWithoutTubing { rays: cone.clone() }),
            });
        }
        counts.push(level.len());
    }
    Ok(BijectionReport {
        counts,
        failure: None,
    })
}
