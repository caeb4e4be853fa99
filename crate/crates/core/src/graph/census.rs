//! Enumeration of small graphs up to isomorphism.
//!
//! Graphs on `n` vertices are grown from representatives on `n - 1` vertices
//! by attaching a new vertex to every possible neighborhood, then deduplicated
//! by [`canonical_code`].

use std::collections::BTreeMap;

use super::{Graph, GraphError};

/// Largest order accepted by the census.
pub const MAX_CENSUS_VERTICES: usize = 8;

/// Canonical adjacency code of `g` together with the relabeling attaining it.
///
/// Vertices are first ordered by an isomorphism-invariant key (degree, then
/// sorted neighbor degrees); the code is the minimum upper-triangle bit string
/// over all permutations that respect that ordering.
pub fn canonical_code(g: &Graph) -> (u64, Vec<usize>) {
    let n = g.num_vertices();
    let mut keyed: Vec<(Vec<usize>, usize)> = (0..n)
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).iter().map(|u| g.degree(u)).collect();
            nd.sort_unstable();
            nd.insert(0, g.degree(v));
            (nd, v)
        })
        .collect();
    keyed.sort();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, (key, v)) in keyed.iter().enumerate() {
        if i > 0 && keyed[i - 1].0 == *key {
            classes.last_mut().unwrap().push(*v);
        } else {
            classes.push(vec![*v]);
        }
    }

    let mut best = (u64::MAX, Vec::new());
    let mut order = Vec::with_capacity(n);
    search(g, &classes, 0, &mut vec![false; n], &mut order, &mut best);
    // best.1 lists vertices by new position; invert to a relabeling map
    let mut perm = vec![0; n];
    for (pos, &v) in best.1.iter().enumerate() {
        perm[v] = pos;
    }
    (best.0, perm)
}

fn code_of(g: &Graph, order: &[usize]) -> u64 {
    let n = order.len();
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if g.has_edge(order[i], order[j]) {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

fn search(
    g: &Graph,
    classes: &[Vec<usize>],
    class: usize,
    used: &mut Vec<bool>,
    order: &mut Vec<usize>,
    best: &mut (u64, Vec<usize>),
) {
    if class == classes.len() {
        let code = code_of(g, order);
        if code < best.0 {
            *best = (code, order.clone());
        }
        return;
    }
    let members = &classes[class];
    let placed = order.len();
    let start = classes[..class].iter().map(Vec::len).sum::<usize>();
    if placed == start + members.len() {
        search(g, classes, class + 1, used, order, best);
        return;
    }
    for &v in members {
        if !used[v] {
            used[v] = true;
            order.push(v);
            search(g, classes, class, used, order, best);
            order.pop();
            used[v] = false;
        }
    }
}

/// One representative per isomorphism class of graphs on `n` vertices, in
/// canonically relabeled form, ordered by canonical code.
pub fn graphs_up_to_iso(n: usize) -> Result<Vec<Graph>, GraphError> {
    if n == 0 {
        return Err(GraphError::NoVertices);
    }
    if n > MAX_CENSUS_VERTICES {
        return Err(GraphError::TooManyVertices(n));
    }
    let mut level = vec![Graph::new(1)?];
    for m in 2..=n {
        let mut next: BTreeMap<u64, Graph> = BTreeMap::new();
        for g in &level {
            for nbhd in 0u32..(1 << (m - 1)) {
                let mut h = Graph::new(m)?;
                for (u, v) in g.edges() {
                    h.add_edge(u, v)?;
                }
                for u in 0..m - 1 {
                    if nbhd >> u & 1 == 1 {
                        h.add_edge(u, m - 1)?;
                    }
                }
                let (code, perm) = canonical_code(&h);
                next.entry(code).or_insert_with(|| h.relabel(&perm));
            }
        }
        level = next.into_values().collect();
    }
    Ok(level)
}

/// Connected graphs on `n` vertices up to isomorphism.
pub fn connected_graphs(n: usize) -> Result<Vec<Graph>, GraphError> {
    Ok(graphs_up_to_iso(n)?
        .into_iter()
        .filter(Graph::is_connected)
        .collect())
}
