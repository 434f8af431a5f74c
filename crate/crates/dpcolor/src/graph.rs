//! Small simple graphs with an optional multigraph view.
//!
//! Vertices are dense ids `0..n` and adjacency is kept as bitset rows, which
//! is comfortable at the desk scale this crate works at (n <= 16). Edge
//! multiplicities are stored as counts on the side rather than as parallel
//! edge objects; only the degree bookkeeping ever looks at them.

use std::collections::BTreeMap;
use std::fmt;

pub type Vertex = usize;

/// Hard cap on vertex count. Bitset rows are u32 but the exact algorithms
/// in this crate are only meant for (and tested at) n <= 16.
pub const MAX_N: usize = 16;

/// Unordered vertex pair, normalized so `u < v`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
}

impl Edge {
    pub fn new(a: Vertex, b: Vertex) -> Edge {
        assert!(a != b, "loops are not allowed");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    /// The endpoint that is not `w`. Panics if `w` is not an endpoint.
    pub fn other(&self, w: Vertex) -> Vertex {
        if w == self.u {
            self.v
        } else {
            assert_eq!(w, self.v);
            self.u
        }
    }

    pub fn touches(&self, w: Vertex) -> bool {
        self.u == w || self.v == w
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.u, self.v)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    DisconnectedInput,
    TooLarge,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DisconnectedInput => write!(f, "input graph is disconnected"),
            GraphError::TooLarge => write!(f, "graph exceeds the desk-scale size limit"),
        }
    }
}

impl std::error::Error for GraphError {}

/// Simple undirected graph on vertices `0..n`, plus a multiplicity map for
/// the multigraph view. In the simple view every multiplicity is 1; the map
/// only stores entries >= 2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<u32>,
    mult: BTreeMap<Edge, u32>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=[", self.n)?;
        for (i, e) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", e)?;
            let m = self.multiplicity(e);
            if m > 1 {
                write!(f, "x{}", m)?;
            }
        }
        write!(f, "])")
    }
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        assert!(n <= 32, "graph too large for bitset rows");
        Graph {
            n,
            adj: vec![0; n],
            mult: BTreeMap::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        let mut g = Graph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) {
        assert!(a < self.n && b < self.n && a != b);
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn remove_edge(&mut self, a: Vertex, b: Vertex) {
        self.adj[a] &= !(1 << b);
        self.adj[b] &= !(1 << a);
        self.mult.remove(&Edge::new(a, b));
    }

    /// Sets the multiplicity of an existing edge (1 clears the map entry).
    pub fn set_multiplicity(&mut self, e: Edge, m: u32) {
        assert!(self.has_edge(e.u, e.v) && m >= 1);
        if m == 1 {
            self.mult.remove(&e);
        } else {
            self.mult.insert(e, m);
        }
    }

    pub fn multiplicity(&self, e: Edge) -> u32 {
        if !self.has_edge(e.u, e.v) {
            return 0;
        }
        self.mult.get(&e).copied().unwrap_or(1)
    }

    pub fn is_multigraph(&self) -> bool {
        !self.mult.is_empty()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        a < self.n && b < self.n && self.adj[a] & (1 << b) != 0
    }

    pub fn neighbors_mask(&self, v: Vertex) -> u32 {
        self.adj[v]
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let mask = self.adj[v];
        (0..self.n).filter(move |&u| mask & (1 << u) != 0)
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones() as usize
    }

    /// Degree in the multigraph view.
    pub fn multi_degree(&self, v: Vertex) -> usize {
        self.neighbors(v)
            .map(|u| self.multiplicity(Edge::new(u, v)) as usize)
            .sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n)
                .filter(move |&v| self.has_edge(u, v))
                .map(move |v| Edge { u, v })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn is_complete(&self) -> bool {
        self.n >= 1 && self.edge_count() == self.n * (self.n - 1) / 2
    }

    pub fn is_cycle(&self) -> bool {
        self.n >= 3 && self.is_connected() && (0..self.n).all(|v| self.degree(v) == 2)
    }

    /// Connected component containing `start`, restricted to `allowed`.
    pub fn component_mask(&self, start: Vertex, allowed: u32) -> u32 {
        debug_assert!(allowed & (1 << start) != 0);
        let mut seen = 1u32 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[v] & allowed & !seen;
            }
            seen |= next;
            frontier = next;
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let all = if self.n == 32 { !0 } else { (1u32 << self.n) - 1 };
        self.component_mask(0, all) == all
    }

    /// Connected components of the subgraph induced on `allowed`.
    pub fn components_in(&self, allowed: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut left = allowed;
        while left != 0 {
            let start = left.trailing_zeros() as usize;
            let comp = self.component_mask(start, allowed);
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// Induced subgraph on `verts` (in the given order). Returns the graph on
    /// relabelled ids `0..verts.len()`; `verts[i]` is the original id of `i`.
    pub fn induced(&self, verts: &[Vertex]) -> Graph {
        let mut g = Graph::new(verts.len());
        for (i, &a) in verts.iter().enumerate() {
            for (j, &b) in verts.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                    let m = self.multiplicity(Edge::new(a, b));
                    if m > 1 {
                        g.set_multiplicity(Edge::new(i, j), m);
                    }
                }
            }
        }
        g
    }

    /// Contracts edge `e` (simple view): `e.v` is merged into `e.u`, the last
    /// vertex is renumbered into the hole. Parallel edges collapse.
    pub fn contract_edge(&self, e: Edge) -> Graph {
        debug_assert!(self.has_edge(e.u, e.v));
        let keep: Vec<Vertex> = (0..self.n).filter(|&w| w != e.v).collect();
        let mut g = Graph::new(self.n - 1);
        let pos = |w: Vertex| keep.iter().position(|&x| x == w).unwrap();
        for ed in self.edges() {
            let (mut a, mut b) = (ed.u, ed.v);
            if a == e.v {
                a = e.u;
            }
            if b == e.v {
                b = e.u;
            }
            if a != b {
                g.add_edge(pos(a), pos(b));
            }
        }
        g
    }

    /// Applies a relabelling: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        let mut g = Graph::new(self.n);
        for e in self.edges() {
            g.add_edge(perm[e.u], perm[e.v]);
            let m = self.multiplicity(e);
            if m > 1 {
                g.set_multiplicity(Edge::new(perm[e.u], perm[e.v]), m);
            }
        }
        g
    }

    /// Subdivides every edge in `fset` once. The i-th set element gets the
    /// new vertex `n + i`.
    pub fn subdivide(&self, fset: &[Edge]) -> Graph {
        let mut g = Graph::new(self.n + fset.len());
        for e in self.edges() {
            if !fset.contains(&e) {
                g.add_edge(e.u, e.v);
            }
        }
        for (i, e) in fset.iter().enumerate() {
            let w = self.n + i;
            g.add_edge(e.u, w);
            g.add_edge(w, e.v);
        }
        g
    }
}

// Labelled generators used all over the tests.

pub fn path_graph(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for i in 1..n {
        g.add_edge(i - 1, i);
    }
    g
}

pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3);
    let mut g = path_graph(n);
    g.add_edge(n - 1, 0);
    g
}

pub fn complete_graph(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut g = Graph::new(a + b);
    for u in 0..a {
        for v in 0..b {
            g.add_edge(u, a + v);
        }
    }
    g
}

/// W_n: cycle `0..n` joined to hub `n`.
pub fn wheel_graph(n: usize) -> Graph {
    assert!(n >= 3);
    let mut g = cycle_graph(n);
    let mut w = Graph::new(n + 1);
    for e in g.edges() {
        w.add_edge(e.u, e.v);
    }
    for v in 0..n {
        w.add_edge(v, n);
    }
    g = w;
    g
}

/// Vertex connectivity collapsed to {0, 1, 2, 3}: 3 stands for "3 or more".
pub fn connectivity(g: &Graph) -> u8 {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    if !g.is_connected() {
        return 0;
    }
    if g.is_complete() {
        return (n - 1).min(3) as u8;
    }
    let all = (1u32 << n) - 1;
    let connected_without = |removed: u32| -> bool {
        let left = all & !removed;
        if left == 0 {
            return true;
        }
        let start = left.trailing_zeros() as usize;
        g.component_mask(start, left) == left
    };
    for v in 0..n {
        if !connected_without(1 << v) {
            return 1;
        }
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if !connected_without((1 << u) | (1 << v)) {
                return 2;
            }
        }
    }
    3
}

/// Block decomposition: maximal 2-connected subgraphs and bridges, plus the
/// cut vertices.
#[derive(Clone, Debug)]
pub struct BlockTree {
    pub blocks: Vec<Vec<Vertex>>,
    pub cut_vertices: Vec<Vertex>,
}

pub fn block_tree(g: &Graph) -> Result<BlockTree, GraphError> {
    if !g.is_connected() || g.n() == 0 {
        return Err(GraphError::DisconnectedInput);
    }
    let n = g.n();
    if n == 1 {
        return Ok(BlockTree {
            blocks: vec![vec![0]],
            cut_vertices: vec![],
        });
    }
    // Standard lowpoint DFS collecting blocks from an edge stack.
    let mut num = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut blocks: Vec<Vec<Vertex>> = Vec::new();
    let mut cuts = vec![false; n];

    fn dfs(
        g: &Graph,
        u: Vertex,
        parent: Option<Vertex>,
        num: &mut [usize],
        low: &mut [usize],
        timer: &mut usize,
        edge_stack: &mut Vec<(Vertex, Vertex)>,
        blocks: &mut Vec<Vec<Vertex>>,
        cuts: &mut [bool],
    ) {
        num[u] = *timer;
        low[u] = *timer;
        *timer += 1;
        let mut children = 0;
        for v in g.neighbors(u) {
            if Some(v) == parent {
                continue;
            }
            if num[v] == usize::MAX {
                children += 1;
                edge_stack.push((u, v));
                dfs(g, v, Some(u), num, low, timer, edge_stack, blocks, cuts);
                low[u] = low[u].min(low[v]);
                if low[v] >= num[u] {
                    if parent.is_some() || children > 1 {
                        cuts[u] = true;
                    }
                    // pop the block
                    let mut verts = std::collections::BTreeSet::new();
                    while let Some(&(a, b)) = edge_stack.last() {
                        edge_stack.pop();
                        verts.insert(a);
                        verts.insert(b);
                        if (a, b) == (u, v) {
                            break;
                        }
                    }
                    blocks.push(verts.into_iter().collect());
                }
            } else if num[v] < num[u] {
                edge_stack.push((u, v));
                low[u] = low[u].min(num[v]);
            }
        }
    }

    dfs(
        g,
        0,
        None,
        &mut num,
        &mut low,
        &mut timer,
        &mut edge_stack,
        &mut blocks,
        &mut cuts,
    );
    let cut_vertices = (0..n).filter(|&v| cuts[v]).collect();
    Ok(BlockTree {
        blocks,
        cut_vertices,
    })
}

fn block_is_complete(g: &Graph, verts: &[Vertex]) -> bool {
    verts
        .iter()
        .enumerate()
        .all(|(i, &a)| verts[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

fn block_is_cycle(g: &Graph, verts: &[Vertex]) -> bool {
    verts.len() >= 3
        && verts
            .iter()
            .all(|&a| verts.iter().filter(|&&b| g.has_edge(a, b)).count() == 2)
}

/// True iff every block of `g` is a complete graph or a cycle. These are
/// exactly the connected simple graphs that are not degree-DP-colourable.
pub fn is_gdp_tree(g: &Graph) -> bool {
    let bt = match block_tree(g) {
        Ok(bt) => bt,
        Err(_) => return false,
    };
    bt.blocks
        .iter()
        .all(|b| block_is_complete(g, b) || block_is_cycle(g, b))
}

/// True iff every block of the multigraph is K_n^k or C_n^k, i.e. a complete
/// graph or a cycle with a uniform multiplicity on its edges. By the degree
/// dichotomy these are exactly the connected multigraphs that are NOT degree
/// DP-colourable.
pub fn degree_dp_blockers(g: &Graph) -> bool {
    let bt = match block_tree(g) {
        Ok(bt) => bt,
        Err(_) => return false,
    };
    bt.blocks.iter().all(|b| {
        let shape_ok = block_is_complete(g, b) || block_is_cycle(g, b);
        if !shape_ok {
            return false;
        }
        let mut mults = b.iter().enumerate().flat_map(|(i, &a)| {
            b[i + 1..]
                .iter()
                .filter(move |&&c| g.has_edge(a, c))
                .map(move |&c| g.multiplicity(Edge::new(a, c)))
        });
        let first = mults.next();
        match first {
            None => true,
            Some(k) => mults.all(|m| m == k),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_basics() {
        assert_eq!(connectivity(&path_graph(3)), 1);
        assert_eq!(connectivity(&cycle_graph(5)), 2);
        assert_eq!(connectivity(&complete_graph(5)), 3);
        assert_eq!(connectivity(&complete_graph(2)), 1);
        let mut disc = Graph::new(4);
        disc.add_edge(0, 1);
        disc.add_edge(2, 3);
        assert_eq!(connectivity(&disc), 0);
        assert_eq!(connectivity(&wheel_graph(4)), 3);
    }

    #[test]
    fn blocks_of_two_triangles() {
        // two triangles sharing vertex 2
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        let bt = block_tree(&g).unwrap();
        assert_eq!(bt.blocks.len(), 2);
        assert_eq!(bt.cut_vertices, vec![2]);
    }

    #[test]
    fn blocks_of_cycle_and_k2() {
        let bt = block_tree(&cycle_graph(6)).unwrap();
        assert_eq!(bt.blocks.len(), 1);
        assert!(bt.cut_vertices.is_empty());

        let bt = block_tree(&path_graph(2)).unwrap();
        assert_eq!(bt.blocks, vec![vec![0, 1]]);
    }

    #[test]
    fn gdp_tree_examples() {
        assert!(is_gdp_tree(&path_graph(5))); // tree: all blocks K_2
        assert!(is_gdp_tree(&cycle_graph(4)));
        let mut k4e = complete_graph(4);
        k4e.remove_edge(0, 1);
        assert!(!is_gdp_tree(&k4e)); // single block, neither complete nor cycle
    }

    #[test]
    fn blocker_families() {
        let mut c5x2 = cycle_graph(5);
        for e in c5x2.edges().collect::<Vec<_>>() {
            c5x2.set_multiplicity(e, 2);
        }
        assert!(degree_dp_blockers(&c5x2));
        assert!(degree_dp_blockers(&complete_graph(4)));
        let mut k4odd = complete_graph(4);
        k4odd.set_multiplicity(Edge::new(0, 1), 2);
        assert!(!degree_dp_blockers(&k4odd));
    }

    #[test]
    fn contraction_and_subdivision() {
        let c4 = cycle_graph(4);
        let t = c4.contract_edge(Edge::new(0, 1));
        assert_eq!(t.n(), 3);
        assert!(t.is_cycle());
        let sub = complete_graph(3).subdivide(&[Edge::new(0, 1)]);
        assert_eq!(sub.n(), 4);
        assert!(sub.is_cycle());
    }
}
