//! Combinatorial obstructions to a graph being a Hassett space, and the
//! linear system of weight inequalities they contradict.
//!
//! Variable `0` of [`w1w2_system`] is `c_0`; variable `v + 1` is the weight of
//! graph vertex `v`. The moving mark's weight is fixed to 1.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eps::{integer, EpsRational};
use crate::graph::{subsets_in_witness_order, subsets_of_size, Graph, VertexSet};
use crate::linear::{Constraint, FeasibilityError, LinearSystem, Relation};
use crate::weights::WeightVector;

/// Vertex-count guard for the subset dynamic program.
pub const MAX_OBSTRUCTION_VERTICES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructionError {
    #[error("graph has {0} vertices; at most {MAX_OBSTRUCTION_VERTICES} are supported")]
    TooManyVertices(usize),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ObstructionWitness {
    /// A non-tube containing a nontrivial tube.
    A {
        non_tube: VertexSet,
        inner_tube: VertexSet,
    },
    /// A set partitioned both into `k` nontrivial tubes and into `k' <= k`
    /// non-tubes.
    B {
        subset: VertexSet,
        tube_partition: Vec<VertexSet>,
        nontube_partition: Vec<VertexSet>,
    },
}

impl ObstructionWitness {
    pub fn kind(&self) -> char {
        match self {
            ObstructionWitness::A { .. } => 'A',
            ObstructionWitness::B { .. } => 'B',
        }
    }

    /// Checks the witness's defining properties against `g`.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let n = g.num_vertices();
        let in_range = |s: VertexSet| !s.is_empty() && s.is_subset(VertexSet::full(n));
        match self {
            ObstructionWitness::A {
                non_tube,
                inner_tube,
            } => {
                in_range(*non_tube)
                    && in_range(*inner_tube)
                    && inner_tube.len() >= 2
                    && inner_tube.is_subset(*non_tube)
                    && inner_tube != non_tube
                    && g.induces_connected(*inner_tube)
                    && g.is_non_tube(*non_tube).unwrap_or(false)
            }
            ObstructionWitness::B {
                subset,
                tube_partition,
                nontube_partition,
            } => {
                let partitions = |blocks: &[VertexSet]| {
                    let mut union = VertexSet::EMPTY;
                    for b in blocks {
                        if !b.is_disjoint(union) {
                            return false;
                        }
                        union = union.union(*b);
                    }
                    union == *subset
                };
                in_range(*subset)
                    && !nontube_partition.is_empty()
                    && nontube_partition.len() <= tube_partition.len()
                    && partitions(tube_partition)
                    && partitions(nontube_partition)
                    && tube_partition
                        .iter()
                        .all(|b| b.len() >= 2 && g.induces_connected(*b))
                    && nontube_partition
                        .iter()
                        .all(|b| g.is_non_tube(*b).unwrap_or(false))
            }
        }
    }
}

/// The first non-tube (by size, then mask) containing a nontrivial tube, with
/// its smallest such tube.
///
/// Any such non-tube has a component with at least two vertices and a vertex
/// outside that component, so an edge plus a vertex detached from it is a
/// witness of size 3, and those are minimal. In a disconnected 3-set the edge
/// is unique.
pub fn obstruction_a(g: &Graph) -> Option<ObstructionWitness> {
    let n = g.num_vertices();
    subsets_of_size(n, 3).find_map(|d| {
        if g.induces_connected(d) {
            return None;
        }
        let vs = d.to_vec();
        let pairs = [(vs[0], vs[1]), (vs[0], vs[2]), (vs[1], vs[2])];
        pairs
            .iter()
            .find(|(u, v)| g.has_edge(*u, *v))
            .map(|&(u, v)| ObstructionWitness::A {
                non_tube: d,
                inner_tube: VertexSet::singleton(u).with(v),
            })
    })
}

const NONE_MAX: i32 = i32::MIN;
const NONE_MIN: i32 = i32::MAX;

/// Next submask of `rest` after `sub` in ascending order, or `None` after `rest`.
fn next_submask(sub: u32, rest: u32) -> Option<u32> {
    if sub == rest {
        None
    } else {
        Some((sub | !rest).wrapping_add(1) & rest)
    }
}

struct PartitionTable {
    value: Vec<i32>,
    choice: Vec<u32>,
}

impl PartitionTable {
    /// Optimal partitions of every mask into blocks accepted by `allowed`,
    /// maximizing (or minimizing) the block count. Ties keep the first block
    /// containing the lowest vertex in ascending mask order.
    fn build(n: usize, allowed: &[bool], maximize: bool) -> Self {
        let size = 1usize << n;
        let unset = if maximize { NONE_MAX } else { NONE_MIN };
        let mut value = vec![unset; size];
        let mut choice = vec![0u32; size];
        value[0] = 0;
        for s in 1..size as u32 {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            let mut sub = 0u32;
            loop {
                let block = sub | low;
                let remainder = value[(s ^ block) as usize];
                if allowed[block as usize] && remainder != unset {
                    let candidate = remainder + 1;
                    let better = if maximize {
                        candidate > value[s as usize]
                    } else {
                        candidate < value[s as usize]
                    };
                    if better {
                        value[s as usize] = candidate;
                        choice[s as usize] = block;
                    }
                }
                match next_submask(sub, rest) {
                    Some(next) => sub = next,
                    None => break,
                }
            }
        }
        PartitionTable { value, choice }
    }

    fn blocks(&self, mut s: u32) -> Vec<VertexSet> {
        let mut out = Vec::new();
        while s != 0 {
            let b = self.choice[s as usize];
            out.push(VertexSet::from_bits(b));
            s ^= b;
        }
        out
    }
}

/// The first subset (by size, then mask) with a partition into nontrivial
/// tubes having at least as many blocks as some partition into non-tubes.
/// The reported partitions are a maximum tube partition and a minimum
/// non-tube partition.
pub fn obstruction_b(g: &Graph) -> Result<Option<ObstructionWitness>, ObstructionError> {
    let n = g.num_vertices();
    if n > MAX_OBSTRUCTION_VERTICES {
        return Err(ObstructionError::TooManyVertices(n));
    }
    let size = 1usize << n;
    let mut nontrivial_tube = vec![false; size];
    let mut non_tube = vec![false; size];
    for s in 1..size as u32 {
        let set = VertexSet::from_bits(s);
        if set.len() >= 2 {
            let connected = g.induces_connected(set);
            nontrivial_tube[s as usize] = connected;
            non_tube[s as usize] = !connected;
        }
    }
    let tubes = PartitionTable::build(n, &nontrivial_tube, true);
    let nontubes = PartitionTable::build(n, &non_tube, false);
    let found = subsets_in_witness_order(n, 2, n).find(|s| {
        let b = s.bits() as usize;
        tubes.value[b] != NONE_MAX
            && nontubes.value[b] != NONE_MIN
            && nontubes.value[b] <= tubes.value[b]
    });
    Ok(found.map(|s| ObstructionWitness::B {
        subset: s,
        tube_partition: tubes.blocks(s.bits()),
        nontube_partition: nontubes.blocks(s.bits()),
    }))
}

/// Obstruction A if present, otherwise Obstruction B.
pub fn find_obstruction(g: &Graph) -> Result<Option<ObstructionWitness>, ObstructionError> {
    match obstruction_a(g) {
        Some(w) => Ok(Some(w)),
        None => obstruction_b(g),
    }
}

/// Where a row of [`w1w2_system`] comes from. Indices are variable indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "on")]
pub enum RowOrigin {
    Positive(usize),
    AtMostOne(usize),
    W1(VertexSet),
    W2(VertexSet),
    Total,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    pub system: LinearSystem,
    pub origins: Vec<RowOrigin>,
}

impl WeightSystem {
    pub fn row_of(&self, origin: &RowOrigin) -> Option<usize> {
        self.origins.iter().position(|o| o == origin)
    }

    pub fn count(&self, pred: impl Fn(&RowOrigin) -> bool) -> usize {
        self.origins.iter().filter(|o| pred(o)).count()
    }
}

/// Inequalities on `(c_0, c_v...)` forced by validity (with the moving mark at
/// weight 1), by every nontrivial tube (`c_0 + Σ_T c > 1`) and by every
/// non-tube (`c_0 + Σ_D c ≤ 1`).
pub fn w1w2_system(g: &Graph) -> WeightSystem {
    let n = g.num_vertices();
    let m = n + 1;
    let mut system = LinearSystem::new(m);
    let mut origins = Vec::new();
    let unit = |j: usize| {
        let mut c = vec![BigRational::zero(); m];
        c[j] = BigRational::one();
        c
    };
    let with_base = |s: VertexSet| {
        let mut c = unit(0);
        for v in s.iter() {
            c[v + 1] = BigRational::one();
        }
        c
    };
    let mut push = |row: Constraint, origin: RowOrigin| {
        system.push(row).expect("row width matches");
        origins.push(origin);
    };
    for j in 0..m {
        push(
            Constraint::new(unit(j), Relation::Gt, integer(0)),
            RowOrigin::Positive(j),
        );
        push(
            Constraint::new(unit(j), Relation::Le, integer(1)),
            RowOrigin::AtMostOne(j),
        );
    }
    let subsets: Vec<VertexSet> = subsets_in_witness_order(n, 2, n).collect();
    for &s in &subsets {
        if g.induces_connected(s) {
            push(
                Constraint::new(with_base(s), Relation::Gt, integer(1)),
                RowOrigin::W1(s),
            );
        }
    }
    for &s in &subsets {
        if !g.induces_connected(s) {
            push(
                Constraint::new(with_base(s), Relation::Le, integer(1)),
                RowOrigin::W2(s),
            );
        }
    }
    push(
        Constraint::new(vec![BigRational::one(); m], Relation::Gt, integer(1)),
        RowOrigin::Total,
    );
    WeightSystem { system, origins }
}

/// Row multipliers proving [`w1w2_system`] infeasible, replaying the
/// subtraction argument behind each obstruction.
pub fn contradiction_certificate(
    ws: &WeightSystem,
    witness: &ObstructionWitness,
) -> Option<Vec<(usize, BigRational)>> {
    let one = BigRational::one;
    let mut cert = Vec::new();
    match witness {
        ObstructionWitness::A {
            non_tube,
            inner_tube,
        } => {
            cert.push((ws.row_of(&RowOrigin::W1(*inner_tube))?, one()));
            cert.push((ws.row_of(&RowOrigin::W2(*non_tube))?, one()));
            for v in non_tube.difference(*inner_tube).iter() {
                cert.push((ws.row_of(&RowOrigin::Positive(v + 1))?, one()));
            }
        }
        ObstructionWitness::B {
            tube_partition,
            nontube_partition,
            ..
        } => {
            for t in tube_partition {
                cert.push((ws.row_of(&RowOrigin::W1(*t))?, one()));
            }
            for d in nontube_partition {
                cert.push((ws.row_of(&RowOrigin::W2(*d))?, one()));
            }
            let gap = tube_partition.len() as i64 - nontube_partition.len() as i64;
            if gap > 0 {
                cert.push((ws.row_of(&RowOrigin::AtMostOne(0))?, integer(gap)));
            }
        }
    }
    Some(cert)
}

/// Weight vector `(1, x_0, x_1, ...)` from a solution of [`w1w2_system`].
pub fn weights_from_assignment(x: &[BigRational]) -> WeightVector {
    WeightVector::new(
        EpsRational::one(),
        EpsRational::from_rational(x[0].clone()),
        x[1..]
            .iter()
            .cloned()
            .map(EpsRational::from_rational)
            .collect(),
    )
    .expect("assignment has at least two vertex weights")
}
