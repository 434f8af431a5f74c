//! Exact minor containment at desk scale.
//!
//! Every pattern this crate actually asks about is either a complete graph
//! or a K_{2,t}, and both get exact special-purpose deciders:
//!
//! * K_{2,t}: a minor model exists iff there are two disjoint connected sets
//!   A1, A2 whose removal leaves at least t vertex-disjoint paths between
//!   the neighbourhoods of A1 and A2. Enumerate connected A1, A2 and count
//!   the paths with a unit-capacity flow.
//! * K_4: series-parallel reduction; a graph has a K_4 minor iff degree-<=1
//!   deletion and degree-2 suppression do not erase it.
//!
//! Arbitrary connected patterns fall back to a contraction recursion with a
//! subgraph-embedding base case, memoized on canonical codes.

use std::collections::HashMap;

use crate::graph::{complete_bipartite, Graph, GraphError, Vertex};
use crate::iso::{are_isomorphic, canon_code, CanonCode};

/// Desk-scale host bound for exact minor tests.
pub const MINOR_MAX_N: usize = 14;

#[derive(Clone, Debug)]
pub struct MinorQuery {
    pub host: Graph,
    pub pattern: Graph,
}

pub fn has_minor(host: &Graph, pattern: &Graph) -> Result<bool, GraphError> {
    if host.n() > MINOR_MAX_N {
        return Err(GraphError::TooLarge);
    }
    assert!(pattern.is_connected(), "pattern must be connected");
    if pattern.is_complete() {
        return Ok(has_clique_minor(host, pattern.n()));
    }
    if let Some(t) = as_k2t(pattern) {
        return Ok(has_k2t_minor(host, t));
    }
    let mut memo = HashMap::new();
    Ok(has_minor_generic(host, pattern, &mut memo))
}

pub fn has_minor_query(q: &MinorQuery) -> Result<bool, GraphError> {
    has_minor(&q.host, &q.pattern)
}

fn as_k2t(pattern: &Graph) -> Option<usize> {
    let n = pattern.n();
    if n < 3 {
        return None;
    }
    let t = n - 2;
    are_isomorphic(pattern, &complete_bipartite(2, t))
        .ok()
        .flatten()
        .map(|_| t)
}

pub fn has_clique_minor(host: &Graph, m: usize) -> bool {
    match m {
        0 => true,
        1 => host.n() >= 1,
        2 => host.edge_count() >= 1,
        3 => host.edge_count() > host.n() - host.components_in(full_mask(host.n())).len(),
        4 => has_k4_minor(host),
        _ => {
            let mut memo = HashMap::new();
            has_minor_generic(host, &crate::graph::complete_graph(m), &mut memo)
        }
    }
}

fn full_mask(n: usize) -> u32 {
    if n == 0 {
        0
    } else {
        (1u32 << n) - 1
    }
}

/// K_4 minor via series-parallel reduction.
pub fn has_k4_minor(g: &Graph) -> bool {
    let mut adj: Vec<u32> = (0..g.n()).map(|v| g.neighbors_mask(v)).collect();
    let mut alive = full_mask(g.n());
    loop {
        let mut changed = false;
        let mut m = alive;
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            let deg = (adj[v] & alive).count_ones();
            if deg <= 1 {
                alive &= !(1 << v);
                changed = true;
            } else if deg == 2 {
                let nbrs = adj[v] & alive;
                let a = nbrs.trailing_zeros() as usize;
                let b = (nbrs & (nbrs - 1)).trailing_zeros() as usize;
                alive &= !(1 << v);
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // whatever survives has min degree >= 3
    alive.count_ones() >= 4
}

/// Exact K_{2,t} minor test.
pub fn has_k2t_minor(g: &Graph, t: usize) -> bool {
    let n = g.n();
    if n < t + 2 || g.edge_count() < 2 * t {
        return false;
    }
    // subgraph fast path: two vertices with t common neighbours
    for u in 0..n {
        for v in (u + 1)..n {
            let common = g.neighbors_mask(u) & g.neighbors_mask(v) & !(1 << u) & !(1 << v);
            if common.count_ones() as usize >= t {
                return true;
            }
        }
    }
    let all = full_mask(n);
    let max_a = n - t - 1;
    let mut found = false;
    enum_connected_subsets(g, all, max_a, &mut |a1: u32| {
        if found {
            return;
        }
        let nbhd1 = neighbourhood(g, a1) & !a1;
        if (nbhd1.count_ones() as usize) < t {
            return;
        }
        let min1 = a1.trailing_zeros();
        let allowed2 = all & !a1 & !((1u32 << (min1 + 1)) - 1); // min(A2) > min(A1)
        enum_connected_subsets(g, allowed2, max_a, &mut |a2: u32| {
            if found {
                return;
            }
            let nbhd2 = neighbourhood(g, a2) & !a2;
            let rest = all & !a1 & !a2;
            let s1 = nbhd1 & rest;
            let s2 = nbhd2 & rest;
            if (s1.count_ones() as usize) < t || (s2.count_ones() as usize) < t {
                return;
            }
            if disjoint_paths_at_least(g, rest, s1, s2, t) {
                found = true;
            }
        });
    });
    found
}

fn neighbourhood(g: &Graph, set: u32) -> u32 {
    let mut out = 0;
    let mut m = set;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        out |= g.neighbors_mask(v);
    }
    out
}

/// Enumerates every connected subset of `allowed` with at most `max_size`
/// vertices, each exactly once.
fn enum_connected_subsets(g: &Graph, allowed: u32, max_size: usize, f: &mut impl FnMut(u32)) {
    if max_size == 0 {
        return;
    }
    let mut starts = allowed;
    while starts != 0 {
        let s = starts.trailing_zeros() as usize;
        starts &= starts - 1;
        // subsets whose minimum vertex is s
        let banned = (1u32 << (s + 1)) - 1; // everything <= s stays out of extensions
        rec_connected(g, 1 << s, allowed & !banned, max_size, f);
    }
}

fn rec_connected(g: &Graph, set: u32, candidates: u32, max_size: usize, f: &mut impl FnMut(u32)) {
    f(set);
    if set.count_ones() as usize >= max_size {
        return;
    }
    let ext = neighbourhood(g, set) & candidates & !set;
    let mut m = ext;
    let mut banned = 0u32;
    while m != 0 {
        let u = m.trailing_zeros() as usize;
        m &= m - 1;
        rec_connected(g, set | (1 << u), candidates & !banned, max_size, f);
        banned |= 1 << u;
    }
}

/// At least `t` vertex-disjoint paths from s1-vertices to s2-vertices inside
/// the induced subgraph on `rest` (unit vertex capacities, a vertex in both
/// s1 and s2 is a length-0 path).
fn disjoint_paths_at_least(g: &Graph, rest: u32, s1: u32, s2: u32, t: usize) -> bool {
    let n = g.n();
    // node split: 2v = in, 2v+1 = out; 2n = source, 2n+1 = sink
    let nodes = 2 * n + 2;
    let mut cap = vec![HashMap::new(); nodes];
    let add = |cap: &mut Vec<HashMap<usize, i32>>, a: usize, b: usize| {
        *cap[a].entry(b).or_insert(0) += 1;
        cap[b].entry(a).or_insert(0);
    };
    let mut m = rest;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        add(&mut cap, 2 * v, 2 * v + 1);
        if s1 & (1 << v) != 0 {
            add(&mut cap, 2 * n, 2 * v);
        }
        if s2 & (1 << v) != 0 {
            add(&mut cap, 2 * v + 1, 2 * n + 1);
        }
        let mut nb = g.neighbors_mask(v) & rest;
        while nb != 0 {
            let u = nb.trailing_zeros() as usize;
            nb &= nb - 1;
            add(&mut cap, 2 * v + 1, 2 * u);
        }
    }
    let source = 2 * n;
    let sink = 2 * n + 1;
    let mut flow = 0usize;
    while flow < t {
        // BFS augmenting path
        let mut prev = vec![usize::MAX; nodes];
        prev[source] = source;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for (&y, &c) in &cap[x] {
                if c > 0 && prev[y] == usize::MAX {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return false;
        }
        let mut y = sink;
        while y != source {
            let x = prev[y];
            *cap[x].get_mut(&y).unwrap() -= 1;
            *cap[y].get_mut(&x).unwrap() += 1;
            y = x;
        }
        flow += 1;
    }
    true
}

/// Backtracking subgraph embedding (pattern edges must map onto host edges).
fn subgraph_contains(host: &Graph, pattern: &Graph) -> bool {
    let pn = pattern.n();
    if pn > host.n() || pattern.edge_count() > host.edge_count() {
        return false;
    }
    let mut order: Vec<Vertex> = pattern.vertices().collect();
    order.sort_by_key(|&v| std::cmp::Reverse(pattern.degree(v)));
    let mut map = vec![usize::MAX; pn];
    let mut used = 0u32;
    fn go(
        host: &Graph,
        pattern: &Graph,
        order: &[Vertex],
        i: usize,
        map: &mut Vec<usize>,
        used: &mut u32,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let pv = order[i];
        for hv in host.vertices() {
            if *used & (1 << hv) != 0 || host.degree(hv) < pattern.degree(pv) {
                continue;
            }
            let ok = order[..i].iter().all(|&pu| {
                !pattern.has_edge(pu, pv) || host.has_edge(map[pu], hv)
            });
            if ok {
                map[pv] = hv;
                *used |= 1 << hv;
                if go(host, pattern, order, i + 1, map, used) {
                    return true;
                }
                *used &= !(1 << hv);
                map[pv] = usize::MAX;
            }
        }
        false
    }
    go(host, pattern, &order, 0, &mut map, &mut used)
}

fn has_minor_generic(
    host: &Graph,
    pattern: &Graph,
    memo: &mut HashMap<CanonCode, bool>,
) -> bool {
    if host.n() < pattern.n() || host.edge_count() < pattern.edge_count() {
        return false;
    }
    let key = canon_code(host);
    if let Some(&r) = memo.get(&key) {
        return r;
    }
    let mut result = subgraph_contains(host, pattern);
    if !result {
        for e in host.edges() {
            if has_minor_generic(&host.contract_edge(e), pattern, memo) {
                result = true;
                break;
            }
        }
    }
    memo.insert(key, result);
    result
}

/// Memoized K_{2,4} tester for the enumeration-heavy callers; hosts that are
/// isomorphic share one verdict.
pub struct K24Cache {
    memo: HashMap<CanonCode, bool>,
    pub queries: usize,
    pub misses: usize,
}

impl K24Cache {
    pub fn new() -> K24Cache {
        K24Cache {
            memo: HashMap::new(),
            queries: 0,
            misses: 0,
        }
    }

    pub fn has_k24_minor(&mut self, g: &Graph) -> bool {
        self.queries += 1;
        let key = canon_code(g);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        self.misses += 1;
        let r = has_k2t_minor(g, 4);
        self.memo.insert(key, r);
        r
    }
}

impl Default for K24Cache {
    fn default() -> Self {
        Self::new()
    }
}

/// Outerplanarity via the forbidden minors K_4 and K_{2,3}.
pub fn is_outerplanar(g: &Graph) -> bool {
    !has_k4_minor(g) && !has_k2t_minor(g, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::*;

    #[test]
    fn clique_minors() {
        assert!(has_minor(&complete_graph(5), &complete_graph(4)).unwrap());
        assert!(!has_minor(&cycle_graph(6), &complete_graph(4)).unwrap());
        assert!(has_k4_minor(&wheel_graph(4)));
        assert!(!has_k4_minor(&complete_bipartite(2, 3)));
    }

    #[test]
    fn k24_examples() {
        assert!(!has_minor(&cycle_graph(6), &complete_bipartite(2, 4)).unwrap());
        assert!(!has_minor(&complete_bipartite(3, 3), &complete_bipartite(2, 4)).unwrap());
        assert!(has_minor(&complete_graph(6), &complete_bipartite(2, 4)).unwrap());
        assert!(has_minor(&complete_bipartite(2, 4), &complete_bipartite(2, 4)).unwrap());
        // the 3-cube has a K_{2,4} minor
        let cube = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        );
        assert!(has_k2t_minor(&cube, 4));
    }

    #[test]
    fn k23_and_outerplanarity() {
        assert!(is_outerplanar(&cycle_graph(7)));
        let fan = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (0, 3)]);
        assert!(is_outerplanar(&fan));
        assert!(!is_outerplanar(&complete_bipartite(2, 3)));
        assert!(!is_outerplanar(&complete_graph(4)));
        assert!(!is_outerplanar(&wheel_graph(5)));
    }

    #[test]
    fn wheels_and_family_shapes_are_k24_free() {
        for n in 3..=7 {
            assert!(!has_k2t_minor(&wheel_graph(n), 4), "W_{} should be K24-free", n);
        }
        assert!(!has_k2t_minor(&complete_graph(5), 4));
        assert!(!has_k2t_minor(&complete_bipartite(3, 3), 4));
    }

    #[test]
    fn monotone_under_edge_addition() {
        let mut g = cycle_graph(6);
        assert!(!has_k2t_minor(&g, 4));
        g.add_edge(0, 3);
        g.add_edge(1, 4);
        g.add_edge(2, 5);
        // K_{3,3}: still free
        assert!(!has_k2t_minor(&g, 4));
        let mut h = g.clone();
        h.add_edge(0, 2);
        // adding edges can only help the minor
        assert!(has_k2t_minor(&h, 4) || !has_k2t_minor(&g, 4));
    }

    #[test]
    fn generic_agrees_with_fast_paths_small() {
        let hosts = vec![
            complete_graph(5),
            wheel_graph(4),
            complete_bipartite(2, 4),
            cycle_graph(6),
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]),
        ];
        let patterns = vec![complete_graph(4), complete_bipartite(2, 3)];
        for h in &hosts {
            for p in &patterns {
                let mut memo = HashMap::new();
                let slow = has_minor_generic(h, p, &mut memo);
                let fast = has_minor(h, p).unwrap();
                assert_eq!(slow, fast, "host {:?} pattern {:?}", h, p);
            }
        }
    }

    #[test]
    fn subdivided_k24_still_has_the_minor() {
        let k24 = complete_bipartite(2, 4);
        let edges: Vec<Edge> = k24.edges().take(4).collect();
        let sub = k24.subdivide(&edges);
        assert!(has_k2t_minor(&sub, 4));
    }
}
