//! Dual trees of weighted stable genus-0 curves and their nodal divisors.
//!
//! A tree vertex is a component; each mark sits on one component as a leg.
//! A component is stable when the weight of its legs plus its number of
//! nodes exceeds 2.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::eps::EpsRational;
use crate::fan::{build_graph_fan, FanError};
use crate::graph::{Graph, VertexSet};
use crate::weights::{remark_weights, Mark, WeightError, WeightVector};

/// Mark-count guard for tree enumeration.
pub const MAX_MARKS: usize = 9;

/// Mark-count guard for [`nodal_divisors`].
pub const MAX_DIVISOR_MARKS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModuliError {
    #[error("weight vector has {0} marks, more than supported")]
    TooManyMarks(usize),
    #[error("at most {limit} components are possible with {marks} marks, asked for {requested}")]
    TooManyComponents {
        requested: usize,
        limit: usize,
        marks: usize,
    },
    #[error("weights must lie in (0, 1]")]
    InvalidWeights,
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// Bitmask over mark indices.
type MarkMask = u32;

fn marks_of(mask: MarkMask) -> impl Iterator<Item = Mark> {
    (0..32)
        .filter(move |i| mask >> i & 1 == 1)
        .map(|i| Mark(i as usize))
}

fn labels(mask: MarkMask) -> Vec<String> {
    marks_of(mask).map(Mark::label).collect()
}

/// Weight of every subset of marks, indexed by mask.
struct WeightTable {
    sums: Vec<EpsRational>,
}

impl WeightTable {
    fn new(w: &WeightVector) -> Self {
        let n = w.n();
        let mut sums = vec![EpsRational::zero(); 1 << n];
        for mask in 1usize..1 << n {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = &sums[mask & (mask - 1)] + &w.entries()[low];
        }
        WeightTable { sums }
    }

    fn stable(&self, legs: MarkMask, degree: usize) -> bool {
        &self.sums[legs as usize] + &EpsRational::from_int(degree as i64) > EpsRational::from_int(2)
    }

    fn weight(&self, legs: MarkMask) -> &EpsRational {
        &self.sums[legs as usize]
    }
}

/// A tree of components with marks distributed over them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableTree {
    legs: Vec<MarkMask>,
    edges: Vec<(usize, usize)>,
}

impl StableTree {
    pub fn num_vertices(&self) -> usize {
        self.legs.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn legs(&self, v: usize) -> Vec<Mark> {
        marks_of(self.legs[v]).collect()
    }

    /// The component carrying `mark`.
    pub fn vertex_of(&self, mark: Mark) -> Option<usize> {
        self.legs.iter().position(|&l| l >> mark.0 & 1 == 1)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|(a, b)| *a == v || *b == v)
            .count()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_path(&self) -> bool {
        (0..self.num_vertices()).all(|v| self.degree(v) <= 2)
    }

    /// Vertices of degree at most 1.
    pub fn ends(&self) -> Vec<usize> {
        (0..self.num_vertices())
            .filter(|&v| self.degree(v) <= 1)
            .collect()
    }

    fn is_stable(&self, table: &WeightTable) -> bool {
        (0..self.num_vertices()).all(|v| table.stable(self.legs[v], self.degree(v)))
    }

    fn root(&self) -> usize {
        self.vertex_of(Mark::MOVING).unwrap_or(0)
    }

    /// Nested string of leg masks rooted at the component of the moving mark.
    /// Equal strings mean isomorphic trees with the same mark placement.
    pub fn canonical_form(&self) -> String {
        fn go(t: &StableTree, v: usize, parent: Option<usize>) -> String {
            let mut children: Vec<String> = t
                .neighbors(v)
                .into_iter()
                .filter(|&u| Some(u) != parent)
                .map(|u| go(t, u, Some(v)))
                .collect();
            children.sort();
            format!("[{:x}{}]", t.legs[v], children.concat())
        }
        go(self, self.root(), None)
    }

    /// Relabels vertices in depth-first order of the canonical form.
    fn normalized(&self) -> StableTree {
        fn order(t: &StableTree, v: usize, parent: Option<usize>, out: &mut Vec<usize>) {
            out.push(v);
            let mut children: Vec<(String, usize)> = t
                .neighbors(v)
                .into_iter()
                .filter(|&u| Some(u) != parent)
                .map(|u| (subtree_key(t, u, v), u))
                .collect();
            children.sort();
            for (_, u) in children {
                order(t, u, Some(v), out);
            }
        }
        fn subtree_key(t: &StableTree, v: usize, parent: usize) -> String {
            let mut children: Vec<String> = t
                .neighbors(v)
                .into_iter()
                .filter(|&u| u != parent)
                .map(|u| subtree_key(t, u, v))
                .collect();
            children.sort();
            format!("[{:x}{}]", t.legs[v], children.concat())
        }
        let mut seq = Vec::with_capacity(self.num_vertices());
        order(self, self.root(), None, &mut seq);
        let mut position = vec![0; seq.len()];
        for (new, &old) in seq.iter().enumerate() {
            position[old] = new;
        }
        let legs = seq.iter().map(|&v| self.legs[v]).collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (position[a], position[b]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        StableTree { legs, edges }
    }

    /// Every way to split one component in two, keeping both halves stable.
    fn splits(&self, table: &WeightTable) -> Vec<StableTree> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            let legs: Vec<u32> = marks_of(self.legs[v]).map(|m| m.0 as u32).collect();
            let nbrs = self.neighbors(v);
            let items = legs.len() + nbrs.len();
            // item 0 stays with `v`, which removes the mirror-image duplicates
            for choice in 0u32..1 << (items - 1) {
                let side = |i: usize| i > 0 && choice >> (i - 1) & 1 == 1;
                let mut keep_legs = 0;
                let mut move_legs = 0;
                for (i, &m) in legs.iter().enumerate() {
                    if side(i) {
                        move_legs |= 1 << m;
                    } else {
                        keep_legs |= 1 << m;
                    }
                }
                let moved: Vec<usize> = nbrs
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| side(legs.len() + j))
                    .map(|(_, &u)| u)
                    .collect();
                let keep_deg = nbrs.len() - moved.len() + 1;
                let move_deg = moved.len() + 1;
                if !table.stable(keep_legs, keep_deg) || !table.stable(move_legs, move_deg) {
                    continue;
                }
                let new = self.num_vertices();
                let mut legs_vec = self.legs.clone();
                legs_vec[v] = keep_legs;
                legs_vec.push(move_legs);
                let mut edges: Vec<(usize, usize)> = self
                    .edges
                    .iter()
                    .map(|&(a, b)| {
                        if a == v && moved.contains(&b) {
                            (b, new)
                        } else if b == v && moved.contains(&a) {
                            (a, new)
                        } else {
                            (a, b)
                        }
                    })
                    .collect();
                edges.push((v, new));
                out.push(StableTree {
                    legs: legs_vec,
                    edges,
                });
            }
        }
        out
    }
}

impl Serialize for StableTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Component {
            legs: Vec<String>,
        }
        let vertices: Vec<Component> = self
            .legs
            .iter()
            .map(|&l| Component { legs: labels(l) })
            .collect();
        let edges: Vec<[usize; 2]> = self.edges.iter().map(|&(a, b)| [a, b]).collect();
        let mut s = serializer.serialize_struct("StableTree", 2)?;
        s.serialize_field("vertices", &vertices)?;
        s.serialize_field("edges", &edges)?;
        s.end()
    }
}

fn check_guards(w: &WeightVector, max_vertices: usize) -> Result<(), ModuliError> {
    let n = w.n();
    if n > MAX_MARKS {
        return Err(ModuliError::TooManyMarks(n));
    }
    if max_vertices > n - 2 {
        return Err(ModuliError::TooManyComponents {
            requested: max_vertices,
            limit: n - 2,
            marks: n,
        });
    }
    if !entries_in_range(w) {
        return Err(ModuliError::InvalidWeights);
    }
    Ok(())
}

fn entries_in_range(w: &WeightVector) -> bool {
    let one = EpsRational::one();
    w.entries().iter().all(|c| c.is_positive() && *c <= one)
}

/// All stable trees with at most `max_vertices` components, up to isomorphism
/// fixing the marks, ordered by size and then canonical form. Entries must lie
/// in `(0, 1]`; if the total weight is at most 2 not even the single component
/// is stable and the list is empty.
pub fn enumerate_stable_trees(
    w: &WeightVector,
    max_vertices: usize,
) -> Result<Vec<StableTree>, ModuliError> {
    check_guards(w, max_vertices)?;
    let table = WeightTable::new(w);
    let all = (1u32 << w.n()) - 1;
    let root = StableTree {
        legs: vec![all],
        edges: Vec::new(),
    };
    let mut out = Vec::new();
    if max_vertices == 0 {
        return Ok(out);
    }
    if !root.is_stable(&table) {
        return Ok(out);
    }
    let mut level: BTreeMap<String, StableTree> = BTreeMap::new();
    level.insert(root.canonical_form(), root);
    for size in 1..=max_vertices {
        let mut next: BTreeMap<String, StableTree> = BTreeMap::new();
        if size < max_vertices {
            for tree in level.values() {
                for child in tree.splits(&table) {
                    debug_assert!(child.is_stable(&table));
                    next.entry(child.canonical_form())
                        .or_insert_with(|| child.normalized());
                }
            }
        }
        out.extend(level.into_values());
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok(out)
}

/// Number of trees with each vertex count, starting at 1.
pub fn tree_counts(trees: &[StableTree]) -> Vec<usize> {
    let max = trees
        .iter()
        .map(StableTree::num_vertices)
        .max()
        .unwrap_or(0);
    let mut counts = vec![0; max];
    for t in trees {
        counts[t.num_vertices() - 1] += 1;
    }
    counts
}

/// Largest component count of a stable tree with at most `cap` components.
pub fn max_components(w: &WeightVector, cap: usize) -> Result<usize, ModuliError> {
    Ok(enumerate_stable_trees(w, cap)?
        .iter()
        .map(StableTree::num_vertices)
        .max()
        .unwrap_or(0))
}

/// Whether every stable tree is a chain with the two heaviest marks (ties go
/// to the lower index) on its two ends, or on its only component.
pub fn chain_shape_check(w: &WeightVector) -> Result<bool, ModuliError> {
    let trees = enumerate_stable_trees(w, w.n() - 2)?;
    let mut by_weight: Vec<usize> = (0..w.n()).collect();
    by_weight.sort_by(|&a, &b| w.entries()[b].cmp(&w.entries()[a]).then(a.cmp(&b)));
    let (h1, h2) = (Mark(by_weight[0]), Mark(by_weight[1]));
    Ok(trees.iter().all(|t| {
        if t.num_vertices() == 1 {
            return true;
        }
        let (a, b) = (t.vertex_of(h1).unwrap(), t.vertex_of(h2).unwrap());
        let ends = t.ends();
        t.is_path() && a != b && ends.contains(&a) && ends.contains(&b)
    }))
}

/// A two-component degeneration, recorded by the marks on the component
/// without the moving mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodalDivisor {
    side: MarkMask,
}

impl NodalDivisor {
    pub fn marks(&self) -> Vec<Mark> {
        marks_of(self.side).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        labels(self.side)
    }

    /// The divisor whose light side is `p_0` together with the marks of `t`.
    pub fn from_base_and_tube(t: VertexSet) -> NodalDivisor {
        let mut side = 1 << Mark::BASE.0;
        for v in t.iter() {
            side |= 1 << Mark::vertex(v).0;
        }
        NodalDivisor { side }
    }

    /// Graph vertices on this side, if the side is `p_0` plus vertex marks.
    pub fn as_base_and_tube(&self) -> Option<VertexSet> {
        if self.side & 1 << Mark::BASE.0 == 0 {
            return None;
        }
        Some(
            marks_of(self.side)
                .filter_map(Mark::as_vertex)
                .collect::<VertexSet>(),
        )
    }
}

impl std::fmt::Display for NodalDivisor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "D{{{}}}", self.labels().join(","))
    }
}

impl Serialize for NodalDivisor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.labels().serialize(serializer)
    }
}

/// Partitions of the marks into two sides of weight greater than 1 each,
/// ordered by the size and then the mask of the side without the moving mark.
pub fn nodal_divisors(w: &WeightVector) -> Result<Vec<NodalDivisor>, ModuliError> {
    if w.n() > MAX_DIVISOR_MARKS {
        return Err(ModuliError::TooManyMarks(w.n()));
    }
    let table = WeightTable::new(w);
    let all = (1u32 << w.n()) - 1;
    let one = EpsRational::one();
    let mut out: Vec<NodalDivisor> = (0..=all)
        .filter(|&side| side & 1 == 0)
        .filter(|&side| side.count_ones() >= 2 && (all ^ side).count_ones() >= 2)
        .filter(|&side| table.weight(side) > &one && table.weight(all ^ side) > &one)
        .map(|side| NodalDivisor { side })
        .collect();
    out.sort_by_key(|d| (d.side.count_ones(), d.side));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DivisorTubeReport {
    pub rays: usize,
    pub nodal_divisors: usize,
    pub k: usize,
    /// Proper tubes with `c_0 + Σ_T c > 1`.
    pub heavy_tubes: Vec<VertexSet>,
    /// Proper tubes failing that inequality.
    pub light_tubes: Vec<VertexSet>,
    /// Nodal divisors not of the form `{p_0} ∪ T` for a heavy tube `T`.
    pub unmatched_divisors: Vec<NodalDivisor>,
    /// Heavy tubes whose divisor is not nodal.
    pub unmatched_tubes: Vec<VertexSet>,
}

impl DivisorTubeReport {
    pub fn bijection_holds(&self) -> bool {
        self.unmatched_divisors.is_empty()
            && self.unmatched_tubes.is_empty()
            && self.heavy_tubes.len() == self.nodal_divisors
    }

    pub fn count_identity_holds(&self) -> bool {
        self.rays == self.nodal_divisors + self.k
    }

    pub fn passed(&self) -> bool {
        self.bijection_holds() && self.count_identity_holds()
    }
}

/// Matches nodal divisors of `w` with proper tubes `T` via `I = {p_0} ∪ T`,
/// and compares `#rays` of the graph fan with `#divisors + k`. `w` must be
/// the explicit weights of the iterated cone `g`.
pub fn divisor_tube_correspondence(
    g: &Graph,
    w: &WeightVector,
) -> Result<DivisorTubeReport, ModuliError> {
    let cs = g.classify_iterated_cone().ok_or_else(|| {
        ModuliError::Precondition("graph is not an iterated cone over a discrete set".into())
    })?;
    if remark_weights(g, &cs)? != *w {
        return Err(ModuliError::Precondition(
            "weights differ from the explicit weights of the graph".into(),
        ));
    }
    let fan = build_graph_fan(g)?;
    let divisors = nodal_divisors(w)?;
    let one = EpsRational::one();
    let full = g.vertices();
    let (heavy, light): (Vec<VertexSet>, Vec<VertexSet>) = full
        .nonempty_subsets()
        .filter(|&t| t != full && g.induces_connected(t))
        .partition(|&t| w.base_plus(t) > one);
    let divisor_set: BTreeSet<NodalDivisor> = divisors.iter().copied().collect();
    let heavy_set: BTreeSet<NodalDivisor> = heavy
        .iter()
        .map(|&t| NodalDivisor::from_base_and_tube(t))
        .collect();
    let unmatched_divisors = divisors
        .iter()
        .filter(|d| !heavy_set.contains(d))
        .copied()
        .collect();
    let unmatched_tubes = heavy
        .iter()
        .filter(|&&t| !divisor_set.contains(&NodalDivisor::from_base_and_tube(t)))
        .copied()
        .collect();
    Ok(DivisorTubeReport {
        rays: fan.num_rays(),
        nodal_divisors: divisors.len(),
        k: cs.k(),
        heavy_tubes: heavy,
        light_tubes: light,
        unmatched_divisors,
        unmatched_tubes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn w(s: &str) -> WeightVector {
        s.parse().unwrap()
    }

    fn remark(spec: &str) -> WeightVector {
        let g = parse_graph(spec).unwrap();
        remark_weights(&g, &g.classify_iterated_cone().unwrap()).unwrap()
    }

    #[test]
    fn losev_manin_five() {
        let lm = w("1,1,e,e,e");
        let trees = enumerate_stable_trees(&lm, 3).unwrap();
        assert_eq!(tree_counts(&trees), vec![1, 6, 6]);
        for t in trees.iter().filter(|t| t.num_vertices() == 3) {
            assert!(t.is_path());
            for v in 0..3 {
                assert!(
                    t.legs(v).iter().any(|m| m.0 >= 2),
                    "every component has a light mark"
                );
            }
            let ends = t.ends();
            assert!(ends.contains(&t.vertex_of(Mark::MOVING).unwrap()));
            assert!(ends.contains(&t.vertex_of(Mark::BASE).unwrap()));
        }
        assert_eq!(max_components(&lm, 3).unwrap(), 3);
        assert_eq!(nodal_divisors(&lm).unwrap().len(), 6);
        assert!(chain_shape_check(&lm).unwrap());
    }

    #[test]
    fn half_weight_example_has_three_component_chain() {
        // the chain [M, p_2] - [p_3] - [p_0, p_1] has end weights 1 + e and
        // 1 + e/2 and a middle component of weight e with two nodes
        let omega = w("1,1/2,1/2+1/2*e,e,e");
        let trees = enumerate_stable_trees(&omega, 3).unwrap();
        let three: Vec<&StableTree> = trees.iter().filter(|t| t.num_vertices() == 3).collect();
        assert_eq!(three.len(), 2);
        for t in &three {
            let mid = (0..3).find(|&v| t.degree(v) == 2).unwrap();
            assert_eq!(t.legs(mid).len(), 1);
            assert_eq!(t.vertex_of(Mark::BASE), t.vertex_of(Mark(2)));
        }
        assert_eq!(max_components(&omega, 3).unwrap(), 3);
        // with (1 - e)/2 in place of (1 + e)/2 the end holding p_0 is too light
        let lighter = w("1,1/2,1/2-1/2*e,e,e");
        assert_eq!(max_components(&lighter, 3).unwrap(), 2);
    }

    #[test]
    fn four_marks() {
        let ones = w("1,1,1,1");
        let trees = enumerate_stable_trees(&ones, 2).unwrap();
        assert_eq!(tree_counts(&trees), vec![1, 3]);
        assert_eq!(max_components(&ones, 2).unwrap(), 2);
        assert!(matches!(
            enumerate_stable_trees(&ones, 3),
            Err(ModuliError::TooManyComponents { .. })
        ));
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(nodal_divisors(&remark("K3")).unwrap().len(), 5);
        assert!(nodal_divisors(&w("1,e,e,e,e")).unwrap().is_empty());
        let lm = nodal_divisors(&w("1,1,e,e,e")).unwrap();
        assert_eq!(lm[0].labels(), vec!["0", "1"]);
        assert_eq!(serde_json::to_string(&lm[0]).unwrap(), r#"["0","1"]"#);
    }

    #[test]
    fn divisors_match_two_component_trees() {
        for weights in [
            "1,1,e,e,e",
            "1,1,1,1,1",
            "1,1-3e,4e,4e,e,e",
            "1,1/2,1/2+e,e,e",
        ] {
            let omega = w(weights);
            let trees = enumerate_stable_trees(&omega, 2).unwrap();
            let from_trees: BTreeSet<MarkMask> = trees
                .iter()
                .filter(|t| t.num_vertices() == 2)
                .map(|t| t.legs[1 - t.root()])
                .collect();
            let divisors: BTreeSet<MarkMask> = nodal_divisors(&omega)
                .unwrap()
                .iter()
                .map(|d| d.side)
                .collect();
            assert_eq!(from_trees, divisors, "{weights}");
        }
    }

    #[test]
    fn correspondence_examples() {
        for (spec, rays, nodal, k) in [("K3", 6, 5, 1), ("S4", 10, 7, 3), ("cone^2(D2)", 13, 11, 2)]
        {
            let g = parse_graph(spec).unwrap();
            let report = divisor_tube_correspondence(&g, &remark(spec)).unwrap();
            assert_eq!(
                (report.rays, report.nodal_divisors, report.k),
                (rays, nodal, k),
                "{spec}"
            );
            assert!(report.passed(), "{spec}");
        }
        let k3 = parse_graph("K3").unwrap();
        assert!(matches!(
            divisor_tube_correspondence(&k3, &w("1,1,e,e,e")),
            Err(ModuliError::Precondition(_))
        ));
        assert!(
            divisor_tube_correspondence(&parse_graph("P4").unwrap(), &w("1,1,e,e,e,e")).is_err()
        );
    }

    #[test]
    fn grothendieck_knudsen_is_not_chain_shaped() {
        assert!(!chain_shape_check(&w("1,1,1,1,1")).unwrap());
        assert!(!chain_shape_check(&w("1,1,1,1,1,1")).unwrap());
        assert!(chain_shape_check(&w("1,e,e,e,e")).unwrap());
    }

    #[test]
    fn tree_json() {
        let trees = enumerate_stable_trees(&w("1,1,1,1"), 2).unwrap();
        let json = serde_json::to_string(&trees[1]).unwrap();
        assert_eq!(
            json,
            r#"{"vertices":[{"legs":["M","0"]},{"legs":["1","2"]}],"edges":[[0,1]]}"#
        );
    }

    #[test]
    fn guards() {
        assert!(matches!(
            enumerate_stable_trees(&w("1,1,e,e,e,e,e,e,e,e"), 2),
            Err(ModuliError::TooManyMarks(10))
        ));
        assert_eq!(enumerate_stable_trees(&w("1,1/2,1/2"), 1), Ok(vec![]));
        assert_eq!(
            enumerate_stable_trees(&w("1,3/2,1/2"), 1),
            Err(ModuliError::InvalidWeights)
        );
        assert_eq!(max_components(&w("1,e,e,e,e"), 3), Ok(0));
    }
}
