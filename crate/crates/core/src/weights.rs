//! Hassett weight vectors `ω = (c_M, c_0, c_1, .., c_{n-2})`.
//!
//! Marks are `p_M` (the moving point), `p_0` (the torus identity) and one mark
//! per graph vertex: vertex `v` carries mark `p_{v+1}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::eps::{EpsError, EpsRational};
use crate::graph::{subsets_in_witness_order, ConeStructure, Graph, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("a weight vector needs at least 3 entries, got {0}")]
    TooFewMarks(usize),
    #[error("weight vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("weight vector has {marks} marks but the graph has {vertices} vertices (expected {} marks)", vertices + 2)]
    GraphMismatch { marks: usize, vertices: usize },
    #[error("cone structure does not partition the graph's vertices")]
    StructureMismatch,
    #[error(transparent)]
    Eps(#[from] EpsError),
}

/// Index of a marked point: 0 is `p_M`, 1 is `p_0`, and `v + 2` is the mark of
/// graph vertex `v` (printed as `p_{v+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mark(pub usize);

impl Mark {
    pub const MOVING: Mark = Mark(0);
    pub const BASE: Mark = Mark(1);

    pub fn vertex(v: usize) -> Mark {
        Mark(v + 2)
    }

    /// The graph vertex carrying this mark, if any.
    pub fn as_vertex(self) -> Option<usize> {
        self.0.checked_sub(2)
    }

    /// `"M"`, `"0"`, or the index `v + 1` for vertex marks.
    pub fn label(self) -> String {
        match self.0 {
            0 => "M".to_string(),
            i => (i - 1).to_string(),
        }
    }

    pub fn from_label(label: &str) -> Option<Mark> {
        if label == "M" {
            return Some(Mark::MOVING);
        }
        label.parse::<usize>().ok().map(|i| Mark(i + 1))
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeightVector {
    entries: Vec<EpsRational>,
}

impl WeightVector {
    pub fn new(
        c_moving: EpsRational,
        c_base: EpsRational,
        vertex_weights: Vec<EpsRational>,
    ) -> Result<Self, WeightError> {
        let mut entries = Vec::with_capacity(vertex_weights.len() + 2);
        entries.push(c_moving);
        entries.push(c_base);
        entries.extend(vertex_weights);
        Self::from_entries(entries)
    }

    /// Entries in mark order `c_M, c_0, c_1, ..`.
    pub fn from_entries(entries: Vec<EpsRational>) -> Result<Self, WeightError> {
        if entries.len() < 3 {
            return Err(WeightError::TooFewMarks(entries.len()));
        }
        Ok(WeightVector { entries })
    }

    /// Number of marks.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[EpsRational] {
        &self.entries
    }

    pub fn weight(&self, mark: Mark) -> &EpsRational {
        &self.entries[mark.0]
    }

    pub fn c_moving(&self) -> &EpsRational {
        &self.entries[0]
    }

    pub fn c_base(&self) -> &EpsRational {
        &self.entries[1]
    }

    pub fn vertex_weights(&self) -> &[EpsRational] {
        &self.entries[2..]
    }

    pub fn total(&self) -> EpsRational {
        self.entries.iter().sum()
    }

    /// `c_0 + Σ_{v ∈ s} c_v`.
    pub fn base_plus(&self, s: VertexSet) -> EpsRational {
        let mut acc = self.c_base().clone();
        for v in s.iter() {
            acc += &self.vertex_weights()[v];
        }
        acc
    }

    pub fn is_valid(&self) -> ValidityReport {
        let zero = EpsRational::zero();
        let one = EpsRational::one();
        let mut violations = Vec::new();
        for (i, c) in self.entries.iter().enumerate() {
            if *c <= zero {
                violations.push(Violation::NotPositive(Mark(i)));
            } else if *c > one {
                violations.push(Violation::AboveOne(Mark(i)));
            }
        }
        let total = self.total();
        if total <= EpsRational::from_int(2) {
            violations.push(Violation::TotalAtMostTwo(total));
        }
        ValidityReport { violations }
    }

    /// Entrywise `self ≥ other`, i.e. a reduction morphism from the space for
    /// `self` to the space for `other` exists.
    pub fn dominates(&self, other: &WeightVector) -> Result<bool, WeightError> {
        if self.n() != other.n() {
            return Err(WeightError::LengthMismatch(self.n(), other.n()));
        }
        Ok(self.entries.iter().zip(&other.entries).all(|(a, b)| a >= b))
    }

    /// Relabels vertex marks: the weight of vertex `v` moves to vertex `perm[v]`.
    pub fn permute_vertices(&self, perm: &[usize]) -> WeightVector {
        let vw = self.vertex_weights();
        let mut out = vw.to_vec();
        for (v, &target) in perm.iter().enumerate() {
            out[target] = vw[v].clone();
        }
        let mut entries = self.entries[..2].to_vec();
        entries.extend(out);
        WeightVector { entries }
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for WeightVector {
    type Err = WeightError;

    /// Comma-separated entries, e.g. `1,1-3e,4e,4e,e,e`. Commas inside
    /// parentheses do not split.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(&s[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(&s[start..]);
        let entries = parts
            .into_iter()
            .map(str::parse)
            .collect::<Result<Vec<EpsRational>, _>>()?;
        Self::from_entries(entries)
    }
}

impl Serialize for WeightVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let entries = Vec::<EpsRational>::deserialize(deserializer)?;
        WeightVector::from_entries(entries).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NotPositive(Mark),
    AboveOne(Mark),
    TotalAtMostTwo(EpsRational),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotPositive(m) => write!(f, "weight of p_{m} is not positive"),
            Violation::AboveOne(m) => write!(f, "weight of p_{m} exceeds 1"),
            Violation::TotalAtMostTwo(t) => write!(f, "total weight {t} is not above 2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Weights read off an iterated cone `Cone^l(D_k)`:
/// `c_M = 1`, `c_0 = 1 - (k+1)ε`, `(k+2)ε` on cone vertices, `ε` on base
/// vertices.
pub fn remark_weights(g: &Graph, cs: &ConeStructure) -> Result<WeightVector, WeightError> {
    let n = g.num_vertices();
    if !cs.independent.is_disjoint(cs.cone_vertices)
        || cs.independent.union(cs.cone_vertices) != g.vertices()
    {
        return Err(WeightError::StructureMismatch);
    }
    let k = cs.k() as i64;
    let vertex_weights = (0..n)
        .map(|v| {
            if cs.cone_vertices.contains(v) {
                EpsRational::eps_times(k + 2)
            } else {
                EpsRational::epsilon()
            }
        })
        .collect();
    WeightVector::new(
        EpsRational::one(),
        EpsRational::affine(1, -(k + 1)),
        vertex_weights,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// `c_0 + Σ_T c > 1` on a nontrivial tube.
    W1,
    /// `c_0 + Σ_D c ≤ 1` on a non-tube.
    W2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum W1W2Outcome {
    Pass,
    Fail {
        witness: VertexSet,
        condition: Condition,
        violations: usize,
    },
}

impl W1W2Outcome {
    pub fn passed(&self) -> bool {
        matches!(self, W1W2Outcome::Pass)
    }
}

/// Checks the tube inequalities (W1) and non-tube inequalities (W2) on every
/// vertex subset of size at least 2, including the full vertex set. The
/// reported witness is the first violated set by increasing size, then
/// ascending bitmask.
pub fn check_w1_w2(g: &Graph, w: &WeightVector) -> Result<W1W2Outcome, WeightError> {
    let n = g.num_vertices();
    if w.n() != n + 2 {
        return Err(WeightError::GraphMismatch {
            marks: w.n(),
            vertices: n,
        });
    }
    let one = EpsRational::one();
    let mut first = None;
    let mut violations = 0;
    for s in subsets_in_witness_order(n, 2, n) {
        let sum = w.base_plus(s);
        let (holds, condition) = if g.induces_connected(s) {
            (sum > one, Condition::W1)
        } else {
            (sum <= one, Condition::W2)
        };
        if !holds {
            violations += 1;
            first.get_or_insert((s, condition));
        }
    }
    Ok(match first {
        None => W1W2Outcome::Pass,
        Some((witness, condition)) => W1W2Outcome::Fail {
            witness,
            condition,
            violations,
        },
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
        let cs = g.classify_iterated_cone().unwrap();
        remark_weights(&g, &cs).unwrap()
    }

    #[test]
    fn remark_weight_examples() {
        // cone vertices 2,3 and base 0,1 under the DSL labeling
        assert_eq!(remark("cone^2(D2)"), w("1,1-3e,e,e,4e,4e"));
        assert_eq!(remark("K3"), w("1,1-2e,e,3e,3e"));
        assert_eq!(remark("S4"), w("1,1-4e,5e,e,e,e"));
        // with the cone vertices labeled first the vector reads as printed
        let v4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let cs = v4.classify_iterated_cone().unwrap();
        assert_eq!(remark_weights(&v4, &cs).unwrap(), w("1,1-3e,4e,4e,e,e"));
    }

    #[test]
    fn remark_weights_reject_foreign_structure() {
        let g = Graph::complete(3).unwrap();
        let cs = ConeStructure {
            independent: VertexSet::singleton(0),
            cone_vertices: VertexSet::singleton(1),
        };
        assert_eq!(remark_weights(&g, &cs), Err(WeightError::StructureMismatch));
    }

    #[test]
    fn validity() {
        assert!(w("1,1,e,e,e").is_valid().is_valid());
        let report = w("1,1,0,e,e").is_valid();
        assert_eq!(report.violations, vec![Violation::NotPositive(Mark(2))]);
        let report = w("1,1,3/2,e").is_valid();
        assert_eq!(report.violations, vec![Violation::AboveOne(Mark(2))]);
        let report = w("1,1/2,1/2-e,e").is_valid();
        assert!(matches!(
            report.violations[..],
            [Violation::TotalAtMostTwo(_)]
        ));
        assert!(remark("K4").is_valid().is_valid());
        // the formula gives total 2 - eps on a discrete graph
        let d3 = remark("D3");
        assert_eq!(d3.total(), EpsRational::affine(2, -1));
        assert!(!d3.is_valid().is_valid());
    }

    #[test]
    fn domination() {
        let lm = w("1,1,e,e,e");
        assert!(lm.dominates(&lm).unwrap());
        assert!(w("1,1,1,1,1").dominates(&lm).unwrap());
        assert!(!w("1,1/2,1/2+1/2e,e,e").dominates(&lm).unwrap());
        assert_eq!(
            lm.dominates(&w("1,1,e,e")),
            Err(WeightError::LengthMismatch(5, 4))
        );
    }

    #[test]
    fn w1_w2_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(
            check_w1_w2(&k3, &w("1,1,e,e,e")).unwrap(),
            W1W2Outcome::Pass
        );
        let p4 = Graph::path(4).unwrap();
        let outcome = check_w1_w2(&p4, &w("1,1-e,e,e,e,e")).unwrap();
        let W1W2Outcome::Fail {
            witness,
            condition,
            violations,
        } = outcome
        else {
            panic!("expected a failure");
        };
        assert_eq!(witness, [0, 2].into_iter().collect());
        assert_eq!(condition, Condition::W2);
        // every non-tube of P4 has c_0 + sum >= 1 + eps
        assert_eq!(violations, p4.non_tubes().len());
        let edge = Graph::complete(2).unwrap();
        assert!(check_w1_w2(&edge, &w("1,1,e,e")).unwrap().passed());
        assert!(matches!(
            check_w1_w2(&edge, &w("1,1,e")),
            Err(WeightError::GraphMismatch { .. })
        ));
    }

    #[test]
    fn w1_failure_is_reported() {
        let k3 = Graph::complete(3).unwrap();
        let outcome = check_w1_w2(&k3, &w("1,1/2,e,e,e")).unwrap();
        assert!(matches!(
            outcome,
            W1W2Outcome::Fail {
                condition: Condition::W1,
                violations: 4,
                ..
            }
        ));
    }

    #[test]
    fn mark_labels() {
        assert_eq!(Mark::MOVING.label(), "M");
        assert_eq!(Mark::BASE.label(), "0");
        assert_eq!(Mark::vertex(0).label(), "1");
        for m in 0..10 {
            assert_eq!(Mark::from_label(&Mark(m).label()), Some(Mark(m)));
        }
        assert_eq!(Mark::vertex(3).as_vertex(), Some(3));
        assert_eq!(Mark::BASE.as_vertex(), None);
    }

    #[test]
    fn parse_and_json() {
        let x = w("1, 1/2, (1+e)/2, e, e");
        assert_eq!(x.n(), 5);
        assert_eq!(x.to_string(), "1,1/2,1/2+1/2*eps,eps,eps");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(serde_json::from_str::<WeightVector>(&json).unwrap(), x);
        assert!("1,1".parse::<WeightVector>().is_err());
        assert!("1,,1".parse::<WeightVector>().is_err());
    }
}
