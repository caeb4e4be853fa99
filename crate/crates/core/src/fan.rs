//! Simplicial fans in `Z^d`, stellar subdivision, and the fan of a graph
//! associahedron built from the fan of projective space.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("fan dimension must be at least 1")]
    ZeroDimension,
    #[error("ray {index} has {found} coordinates, expected {dim}")]
    RayLength {
        index: usize,
        found: usize,
        dim: usize,
    },
    #[error("ray {0} is zero or not primitive")]
    NotPrimitive(usize),
    #[error("maximal cone {0:?} is not a set of {1} valid ray indices")]
    BadCone(Vec<usize>, usize),
    #[error("rays {0:?} do not span a cone of the fan")]
    NotACone(Vec<usize>),
    #[error("cannot subdivide a cone with fewer than two rays")]
    ConeTooSmall,
    #[error("cone of tube {0} is missing when it is due to be subdivided")]
    MissingTubeCone(VertexSet),
    #[error("graph must have at least two vertices")]
    TooFewVertices,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayLabel {
    /// Ray `u_i` of the projective-space fan, matched to graph vertex `i`.
    Original(usize),
    /// Ray added when subdividing the cone of a tube.
    Exceptional(VertexSet),
}

impl RayLabel {
    /// The tube this ray stands for (a singleton for an original ray).
    pub fn tube(self) -> VertexSet {
        match self {
            RayLabel::Original(i) => VertexSet::singleton(i),
            RayLabel::Exceptional(t) => t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ray {
    pub coords: Vec<i64>,
    pub label: RayLabel,
}

/// A pure simplicial fan recorded by its maximal cones. Each maximal cone is a
/// sorted list of ray indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fan {
    dim: usize,
    rays: Vec<Ray>,
    max_cones: Vec<Vec<usize>>,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_primitive(v: &[i64]) -> bool {
    v.iter().fold(0, |g, &x| gcd(g, x)) == 1
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn determinant(rows: &[Vec<i64>]) -> i128 {
    let n = rows.len();
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * m[n - 1][n - 1]
    }
}

impl Fan {
    /// Validates and assembles a fan. Cones are sorted internally.
    pub fn new(dim: usize, rays: Vec<Ray>, max_cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        if dim == 0 {
            return Err(FanError::ZeroDimension);
        }
        for (index, r) in rays.iter().enumerate() {
            if r.coords.len() != dim {
                return Err(FanError::RayLength {
                    index,
                    found: r.coords.len(),
                    dim,
                });
            }
            if !is_primitive(&r.coords) {
                return Err(FanError::NotPrimitive(index));
            }
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for mut c in max_cones {
            c.sort_unstable();
            c.dedup();
            if c.len() != dim || c.iter().any(|&i| i >= rays.len()) {
                return Err(FanError::BadCone(c, dim));
            }
            cones.push(c);
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn num_max_cones(&self) -> usize {
        self.max_cones.len()
    }

    /// Whether the sorted ray set `cone` is a face of some maximal cone.
    pub fn contains_cone(&self, cone: &[usize]) -> bool {
        self.max_cones
            .iter()
            .any(|c| cone.iter().all(|r| c.binary_search(r).is_ok()))
    }

    /// All cones with exactly `size` rays, as sorted index lists.
    pub fn faces(&self, size: usize) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for c in &self.max_cones {
            for_each_combination(c, size, &mut |sub| {
                out.insert(sub.to_vec());
            });
        }
        out
    }

    /// `(f_0, ..., f_{d-1})`: the number of cones with `j + 1` rays.
    pub fn f_vector(&self) -> Vec<usize> {
        (1..=self.dim).map(|j| self.faces(j).len()).collect()
    }

    fn cone_matrix(&self, cone: &[usize]) -> Vec<Vec<i64>> {
        cone.iter().map(|&i| self.rays[i].coords.clone()).collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.max_cones
            .iter()
            .all(|c| determinant(&self.cone_matrix(c)) != 0)
    }

    /// Every maximal cone is unimodular.
    pub fn is_smooth(&self) -> bool {
        self.max_cones
            .iter()
            .all(|c| determinant(&self.cone_matrix(c)).abs() == 1)
    }

    /// Every facet of a maximal cone lies in exactly two maximal cones.
    pub fn is_complete(&self) -> bool {
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in &self.max_cones {
            for skip in 0..c.len() {
                let facet: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &r)| r)
                    .collect();
                *count.entry(facet).or_default() += 1;
            }
        }
        !count.is_empty() && count.values().all(|&k| k == 2)
    }

    /// Index of the ray labeled by tube `t`.
    pub fn ray_for_tube(&self, t: VertexSet) -> Option<usize> {
        self.rays.iter().position(|r| r.label.tube() == t)
    }

    /// Same fan with rays sorted by coordinates and cones sorted, so fans built
    /// in different orders compare equal.
    pub fn canonical_form(&self) -> Fan {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].coords.cmp(&self.rays[b].coords));
        let mut position = vec![0; self.rays.len()];
        for (new, &old) in order.iter().enumerate() {
            position[old] = new;
        }
        let rays = order.iter().map(|&i| self.rays[i].clone()).collect();
        let mut max_cones: Vec<Vec<usize>> = self
            .max_cones
            .iter()
            .map(|c| {
                let mut m: Vec<usize> = c.iter().map(|&i| position[i]).collect();
                m.sort_unstable();
                m
            })
            .collect();
        max_cones.sort();
        Fan {
            dim: self.dim,
            rays,
            max_cones,
        }
    }

    /// Plain-text listing of rays and maximal cones.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (i, r) in self.rays.iter().enumerate() {
            let coords: Vec<String> = r.coords.iter().map(i64::to_string).collect();
            let label = match r.label {
                RayLabel::Original(v) => format!("u{v}"),
                RayLabel::Exceptional(t) => format!("E{t}"),
            };
            let _ = writeln!(out, "ray {i} ({}) {label}", coords.join(","));
        }
        for c in &self.max_cones {
            let idx: Vec<String> = c.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "cone {}", idx.join(" "));
        }
        out
    }
}

fn for_each_combination(items: &[usize], size: usize, f: &mut impl FnMut(&[usize])) {
    fn go(
        items: &[usize],
        size: usize,
        start: usize,
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if buf.len() == size {
            f(buf);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < size - buf.len() {
                break;
            }
            buf.push(items[i]);
            go(items, size, i + 1, buf, f);
            buf.pop();
        }
    }
    if size <= items.len() {
        go(items, size, 0, &mut Vec::with_capacity(size), f);
    }
}

/// Fan of `P^d`: `u_i = e_i` for `1 <= i <= d`, `u_0 = -(e_1 + ... + e_d)`,
/// with every `d` of the `d + 1` rays spanning a maximal cone.
pub fn projective_simplex_fan(d: usize) -> Result<Fan, FanError> {
    if d == 0 {
        return Err(FanError::ZeroDimension);
    }
    let rays = (0..=d)
        .map(|i| {
            let coords = if i == 0 {
                vec![-1; d]
            } else {
                (1..=d).map(|j| i64::from(j == i)).collect()
            };
            Ray {
                coords,
                label: RayLabel::Original(i),
            }
        })
        .collect();
    let max_cones = (0..=d)
        .rev()
        .map(|skip| (0..=d).filter(|&i| i != skip).collect())
        .collect();
    Fan::new(d, rays, max_cones)
}

/// Stellar subdivision at the cone spanned by `cone`: adds the primitive ray
/// along the sum of its generators and splits every maximal cone containing it.
pub fn stellar_subdivide(f: &Fan, cone: &[usize], label: RayLabel) -> Result<Fan, FanError> {
    let mut sigma = cone.to_vec();
    sigma.sort_unstable();
    sigma.dedup();
    if sigma.len() < 2 {
        return Err(FanError::ConeTooSmall);
    }
    if sigma.iter().any(|&i| i >= f.rays.len()) || !f.contains_cone(&sigma) {
        return Err(FanError::NotACone(sigma));
    }
    let mut coords = vec![0i64; f.dim];
    for &i in &sigma {
        for (c, x) in coords.iter_mut().zip(&f.rays[i].coords) {
            *c += x;
        }
    }
    let g = coords.iter().fold(0, |g, &x| gcd(g, x));
    for c in coords.iter_mut() {
        *c /= g;
    }
    let new = f.rays.len();
    let mut rays = f.rays.clone();
    rays.push(Ray { coords, label });
    let mut max_cones = Vec::with_capacity(f.max_cones.len() + sigma.len());
    for tau in &f.max_cones {
        if sigma.iter().all(|r| tau.binary_search(r).is_ok()) {
            for r in &sigma {
                let mut c: Vec<usize> = tau.iter().copied().filter(|x| x != r).collect();
                c.push(new);
                max_cones.push(c);
            }
        } else {
            max_cones.push(tau.clone());
        }
    }
    Ok(Fan {
        dim: f.dim,
        rays,
        max_cones,
    })
}

/// Order in which tubes of equal size are subdivided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubdivisionOrder {
    /// Ascending vertex mask.
    #[default]
    Canonical,
    /// Seeded random permutation within each size class.
    Shuffled(u64),
}

pub fn build_graph_fan(g: &Graph) -> Result<Fan, FanError> {
    build_graph_fan_with_order(g, SubdivisionOrder::Canonical)
}

/// Starts from the fan of `P^d` (`d + 1` = number of vertices) and subdivides
/// the cone of every nontrivial proper tube, largest tubes first.
pub fn build_graph_fan_with_order(g: &Graph, order: SubdivisionOrder) -> Result<Fan, FanError> {
    g.check_supported()?;
    let n = g.num_vertices();
    if n < 2 {
        return Err(FanError::TooFewVertices);
    }
    let d = n - 1;
    let mut fan = projective_simplex_fan(d)?;
    let mut rng = match order {
        SubdivisionOrder::Canonical => None,
        SubdivisionOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    for size in (2..=d).rev() {
        let mut tubes = g.tubes(size, size)?;
        if let Some(rng) = rng.as_mut() {
            tubes.shuffle(rng);
        }
        for t in tubes {
            let cone = t.to_vec();
            if !fan.contains_cone(&cone) {
                return Err(FanError::MissingTubeCone(t));
            }
            fan = stellar_subdivide(&fan, &cone, RayLabel::Exceptional(t))?;
        }
    }
    Ok(fan)
}
