//! Exact isomorphism, automorphisms and canonical codes for small graphs.
//!
//! The canonicalizer is an individualization-refinement search. Equitable
//! refinement keeps the branching tiny on the sparse graphs this crate deals
//! with, and a homogeneous-tail shortcut avoids the factorial walk on
//! complete and empty cells. No partial-code pruning; at n <= 16 the leaf
//! counts stay small.

use crate::graph::{Graph, GraphError, Vertex, MAX_N};

/// Canonical certificate: vertex count followed by the adjacency rows in
/// canonical order. Two graphs are isomorphic iff their codes are equal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct CanonCode(pub Vec<u32>);

type Partition = Vec<Vec<Vertex>>;

fn initial_partition(g: &Graph) -> Partition {
    // split by degree, ascending
    let mut by_degree: Vec<Vec<Vertex>> = vec![Vec::new(); g.n() + 1];
    for v in g.vertices() {
        by_degree[g.degree(v)].push(v);
    }
    by_degree.into_iter().filter(|c| !c.is_empty()).collect()
}

/// Equitable refinement: split cells by neighbour counts toward every cell
/// until stable. The splitting rule only looks at counts, so it is invariant
/// under isomorphism.
fn refine(g: &Graph, mut p: Partition) -> Partition {
    loop {
        let mut changed = false;
        'scan: for i in 0..p.len() {
            if p[i].len() <= 1 {
                continue;
            }
            for j in 0..p.len() {
                let target_mask: u32 = p[j].iter().map(|&v| 1u32 << v).sum();
                let count = |v: Vertex| (g.neighbors_mask(v) & target_mask).count_ones();
                let c0 = count(p[i][0]);
                if p[i].iter().any(|&v| count(v) != c0) {
                    let mut groups: Vec<(u32, Vec<Vertex>)> = Vec::new();
                    for &v in &p[i] {
                        let c = count(v);
                        match groups.iter_mut().find(|(k, _)| *k == c) {
                            Some((_, cell)) => cell.push(v),
                            None => groups.push((c, vec![v])),
                        }
                    }
                    groups.sort_by_key(|(k, _)| *k);
                    let tail = p.split_off(i + 1);
                    p.truncate(i);
                    p.extend(groups.into_iter().map(|(_, cell)| cell));
                    p.extend(tail);
                    changed = true;
                    break 'scan;
                }
            }
        }
        if !changed {
            return p;
        }
    }
}

/// True when every cell pair (including each cell with itself) is fully
/// adjacent or fully non-adjacent; then any within-cell order yields the
/// same code.
fn homogeneous(g: &Graph, p: &Partition) -> bool {
    let masks: Vec<u32> = p
        .iter()
        .map(|c| c.iter().map(|&v| 1u32 << v).sum())
        .collect();
    for (i, ci) in p.iter().enumerate() {
        if ci.len() <= 1 {
            continue;
        }
        for (j, cj) in p.iter().enumerate() {
            let expect_full = if i == j { cj.len() as u32 - 1 } else { cj.len() as u32 };
            let deg0 = (g.neighbors_mask(ci[0]) & masks[j]).count_ones();
            if deg0 != 0 && deg0 != expect_full {
                return false;
            }
            // refinement already made counts uniform within the cell
        }
    }
    true
}

fn code_for_order(g: &Graph, order: &[Vertex]) -> Vec<u32> {
    let n = g.n();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut code = Vec::with_capacity(n + 1);
    code.push(n as u32);
    for &v in order {
        let mut row = 0u32;
        for u in g.neighbors(v) {
            row |= 1 << pos[u];
        }
        code.push(row);
    }
    code
}

fn search(g: &Graph, p: Partition, best: &mut Option<(Vec<u32>, Vec<Vertex>)>) {
    let p = refine(g, p);
    let discrete = p.iter().all(|c| c.len() == 1);
    if discrete || homogeneous(g, &p) {
        let order: Vec<Vertex> = p.into_iter().flatten().collect();
        let code = code_for_order(g, &order);
        match best {
            Some((bc, _)) if *bc <= code => {}
            _ => *best = Some((code, order)),
        }
        return;
    }
    let target = p.iter().position(|c| c.len() > 1).unwrap();
    for k in 0..p[target].len() {
        let mut q = Vec::with_capacity(p.len() + 1);
        for (i, cell) in p.iter().enumerate() {
            if i == target {
                q.push(vec![cell[k]]);
                let rest: Vec<Vertex> = cell
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| v)
                    .collect();
                q.push(rest);
            } else {
                q.push(cell.clone());
            }
        }
        search(g, q, best);
    }
}

/// Canonical order (position -> vertex) and certificate.
pub fn canon_order(g: &Graph) -> (Vec<Vertex>, CanonCode) {
    assert!(
        !g.is_multigraph(),
        "canonical codes are defined on the simple view"
    );
    if g.n() == 0 {
        return (vec![], CanonCode(vec![0]));
    }
    let mut best = None;
    search(g, initial_partition(g), &mut best);
    let (code, order) = best.unwrap();
    (order, CanonCode(code))
}

pub fn canon_code(g: &Graph) -> CanonCode {
    canon_order(g).1
}

/// Exact isomorphism with a witness mapping (g1 vertex -> g2 vertex).
pub fn are_isomorphic(g1: &Graph, g2: &Graph) -> Result<Option<Vec<Vertex>>, GraphError> {
    if g1.n() > MAX_N || g2.n() > MAX_N {
        return Err(GraphError::TooLarge);
    }
    if g1.n() != g2.n() || g1.edge_count() != g2.edge_count() {
        return Ok(None);
    }
    let mut d1: Vec<usize> = g1.vertices().map(|v| g1.degree(v)).collect();
    let mut d2: Vec<usize> = g2.vertices().map(|v| g2.degree(v)).collect();
    d1.sort_unstable();
    d2.sort_unstable();
    if d1 != d2 {
        return Ok(None);
    }
    let (o1, c1) = canon_order(g1);
    let (o2, c2) = canon_order(g2);
    if c1 != c2 {
        return Ok(None);
    }
    // canonical position i of g1 maps to canonical position i of g2
    let mut map = vec![0usize; g1.n()];
    for i in 0..g1.n() {
        map[o1[i]] = o2[i];
    }
    debug_assert!(g1
        .edges()
        .all(|e| g2.has_edge(map[e.u], map[e.v])));
    Ok(Some(map))
}

/// All automorphisms, found by colour-respecting backtracking. Only meant
/// for the small labelled family members (n <= 10 or so).
pub fn automorphisms(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let p = refine(g, initial_partition(g));
    let mut colour = vec![0usize; n];
    for (i, cell) in p.iter().enumerate() {
        for &v in cell {
            colour[v] = i;
        }
    }
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        g: &Graph,
        colour: &[usize],
        v: Vertex,
        map: &mut Vec<Vertex>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<Vertex>>,
    ) {
        let n = g.n();
        if v == n {
            out.push(map.clone());
            return;
        }
        for w in 0..n {
            if used[w] || colour[w] != colour[v] {
                continue;
            }
            let ok = (0..v).all(|u| g.has_edge(u, v) == g.has_edge(map[u], w));
            if ok {
                map[v] = w;
                used[w] = true;
                go(g, colour, v + 1, map, used, out);
                used[w] = false;
                map[v] = usize::MAX;
            }
        }
    }
    go(g, &colour, 0, &mut map, &mut used, &mut out);
    out
}
