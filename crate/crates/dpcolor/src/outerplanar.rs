//! Two-terminal outerplanar graphs: recognition, the degree-2 reduction
//! step used by the coding induction, and a seeded generator.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{connectivity, Graph, Vertex};
use crate::minor::is_outerplanar;

/// A two-terminal outerplanar graph: spanning outer path from x to y, all
/// other edges (chords) on one side. `broken` records that the xy edge is
/// absent (K_2 counts as broken and trivial).
#[derive(Clone, Debug)]
pub struct TwoTerminal {
    pub graph: Graph,
    pub x: Vertex,
    pub y: Vertex,
    pub outer_path: Vec<Vertex>,
    pub broken: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NoSuchVertex;

impl fmt::Display for NoSuchVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "no interior degree-2 vertex (invariant violation)")
    }
}

impl std::error::Error for NoSuchVertex {}

impl TwoTerminal {
    pub fn is_trivial(&self) -> bool {
        self.graph.n() == 2
    }

    /// Path edges as a set of normalized pairs.
    pub fn path_edges(&self) -> Vec<crate::graph::Edge> {
        self.outer_path
            .windows(2)
            .map(|w| crate::graph::Edge::new(w[0], w[1]))
            .collect()
    }
}

/// Recognizes g as a two-terminal outerplanar graph with terminals x, y.
/// The outer path is the Hamiltonian x-y path avoiding the xy edge; it is
/// unique because a 2-connected outerplanar graph has a unique Hamiltonian
/// cycle.
pub fn recognize(g: &Graph, x: Vertex, y: Vertex) -> Option<TwoTerminal> {
    let n = g.n();
    if x == y || x >= n || y >= n || !g.is_connected() {
        return None;
    }
    if n == 2 {
        if !g.has_edge(x, y) {
            return None;
        }
        return Some(TwoTerminal {
            graph: g.clone(),
            x,
            y,
            outer_path: vec![x, y],
            broken: true,
        });
    }
    let broken = !g.has_edge(x, y);
    let mut h = g.clone();
    if broken {
        h.add_edge(x, y);
    }
    if connectivity(&h) < 2 || !is_outerplanar(&h) {
        return None;
    }
    // outer path: Hamiltonian x-y path inside g minus the xy edge
    let mut body = g.clone();
    if !broken {
        body.remove_edge(x, y);
    }
    let path = hamiltonian_path(&body, x, y)?;
    Some(TwoTerminal {
        graph: g.clone(),
        x,
        y,
        outer_path: path,
        broken,
    })
}

fn hamiltonian_path(g: &Graph, x: Vertex, y: Vertex) -> Option<Vec<Vertex>> {
    let n = g.n();
    let mut path = vec![x];
    let mut used = 1u32 << x;
    fn go(g: &Graph, y: Vertex, path: &mut Vec<Vertex>, used: &mut u32) -> bool {
        let n = g.n();
        let last = *path.last().unwrap();
        if path.len() == n {
            return last == y;
        }
        for v in g.neighbors(last) {
            if *used & (1 << v) != 0 || (v == y && path.len() != n - 1) {
                continue;
            }
            path.push(v);
            *used |= 1 << v;
            if go(g, y, path, used) {
                return true;
            }
            path.pop();
            *used &= !(1 << v);
        }
        false
    }
    if n >= 2 && go(g, y, &mut path, &mut used) {
        Some(path)
    } else {
        None
    }
}

/// First interior vertex (by outer-path order) of degree 2; on a valid
/// broken gadget with at least 3 vertices one always exists.
pub fn interior_degree2_vertex(t: &TwoTerminal) -> Result<Vertex, NoSuchVertex> {
    t.outer_path[1..t.outer_path.len() - 1]
        .iter()
        .copied()
        .find(|&u| t.graph.degree(u) == 2)
        .ok_or(NoSuchVertex)
}

/// One contraction step of the coding induction: remove the interior
/// degree-2 vertex `u` and join its two path neighbours.
#[derive(Clone, Debug)]
pub struct ReduceStep {
    pub reduced: TwoTerminal,
    /// old vertex id -> new vertex id (None for the removed vertex)
    pub vmap: Vec<Option<Vertex>>,
    pub removed: Vertex,
    pub u1: Vertex,
    pub u2: Vertex,
    /// true when u1 u2 was already an edge of the input graph
    pub edge_existed: bool,
}

pub fn reduce_step(t: &TwoTerminal, u: Vertex) -> ReduceStep {
    let pos = t.outer_path.iter().position(|&v| v == u).expect("u on path");
    assert!(pos > 0 && pos + 1 < t.outer_path.len(), "u must be interior");
    assert_eq!(t.graph.degree(u), 2, "u must have degree 2");
    let u1 = t.outer_path[pos - 1];
    let u2 = t.outer_path[pos + 1];
    let edge_existed = t.graph.has_edge(u1, u2);
    let keep: Vec<Vertex> = t.graph.vertices().filter(|&v| v != u).collect();
    let mut reduced_graph = t.graph.induced(&keep);
    let new_id = |v: Vertex| keep.iter().position(|&w| w == v).unwrap();
    if !edge_existed {
        reduced_graph.add_edge(new_id(u1), new_id(u2));
    }
    let outer_path: Vec<Vertex> = t
        .outer_path
        .iter()
        .filter(|&&v| v != u)
        .map(|&v| new_id(v))
        .collect();
    let mut vmap = vec![None; t.graph.n()];
    for (i, &v) in keep.iter().enumerate() {
        vmap[v] = Some(i);
    }
    let x = new_id(t.x);
    let y = new_id(t.y);
    let broken = reduced_graph.n() == 2 || !reduced_graph.has_edge(x, y);
    ReduceStep {
        reduced: TwoTerminal {
            graph: reduced_graph,
            x,
            y,
            outer_path,
            broken,
        },
        vmap,
        removed: u,
        u1,
        u2,
        edge_existed,
    }
}

/// Seeded generator: grows a broken x-y-outerplanar graph from K_2 by
/// subdividing outer-path edges and adding non-crossing chords on one side.
pub fn random_two_terminal(n: usize, seed: u64) -> TwoTerminal {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n.max(2));
    g.add_edge(0, 1);
    let mut path: Vec<Vertex> = vec![0, 1];
    let mut next_vertex = 2;
    let mut chords: Vec<(usize, usize)> = Vec::new(); // positions on the path

    while next_vertex < n || rng.gen_bool(0.35) {
        if next_vertex < n && (chords.is_empty() || rng.gen_bool(0.6)) {
            // subdivide a random path edge
            let i = rng.gen_range(0..path.len() - 1);
            path.insert(i + 1, next_vertex);
            let (a, b) = (path[i], path[i + 2]);
            g.remove_edge(a, b);
            g.add_edge(a, next_vertex);
            g.add_edge(next_vertex, b);
            // chord positions after the insertion shift up
            for c in chords.iter_mut() {
                if c.0 > i {
                    c.0 += 1;
                }
                if c.1 > i {
                    c.1 += 1;
                }
            }
            next_vertex += 1;
        } else {
            // try a random chord; (0, last) would be the xy edge
            let m = path.len();
            if m < 4 {
                if next_vertex >= n {
                    break;
                }
                continue;
            }
            let i = rng.gen_range(0..m - 2);
            let j = rng.gen_range(i + 2..m);
            if (i, j) == (0, m - 1) || g.has_edge(path[i], path[j]) {
                if next_vertex >= n {
                    break;
                }
                continue;
            }
            let crosses = chords
                .iter()
                .any(|&(a, b)| (a < i && i < b && b < j) || (i < a && a < j && j < b));
            if !crosses {
                g.add_edge(path[i], path[j]);
                chords.push((i, j));
            }
            if next_vertex >= n && rng.gen_bool(0.5) {
                break;
            }
        }
    }
    let tt = TwoTerminal {
        graph: g,
        x: 0,
        y: 1,
        outer_path: path,
        broken: true,
    };
    debug_assert!(recognize(&tt.graph, 0, 1).is_some());
    tt
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph, Edge, Graph};

    #[test]
    fn k2_is_trivial_and_broken() {
        let g = path_graph(2);
        let t = recognize(&g, 0, 1).unwrap();
        assert!(t.is_trivial());
        assert!(t.broken);
        assert_eq!(t.outer_path, vec![0, 1]);
    }

    #[test]
    fn fan_recognition() {
        // path 0..4 plus chords (0,2), (0,3): broken 0-4-outerplanar
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (0, 3)]);
        let t = recognize(&g, 0, 4).unwrap();
        assert_eq!(t.outer_path, vec![0, 1, 2, 3, 4]);
        assert!(t.broken);
        // interior degree-2 tie-break: lowest outer-path index
        assert_eq!(interior_degree2_vertex(&t), Ok(1));
    }

    #[test]
    fn k4_is_not_two_terminal() {
        let g = complete_graph(4);
        for x in 0..4 {
            for y in (x + 1)..4 {
                assert!(recognize(&g, x, y).is_none());
            }
        }
    }

    #[test]
    fn reduce_on_p3_gives_k2() {
        let g = path_graph(3);
        let t = recognize(&g, 0, 2).unwrap();
        let u = interior_degree2_vertex(&t).unwrap();
        assert_eq!(u, 1);
        let step = reduce_step(&t, u);
        assert!(step.reduced.is_trivial());
        assert!(!step.edge_existed);
        assert_eq!(step.reduced.graph.edge_count(), 1);
    }

    #[test]
    fn reduce_drops_a_doubled_edge() {
        // triangle 0-1-2 with outer path 0,1,2: reducing 1 finds edge (0,2)
        // already present, so the edge count drops by 2
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let t = recognize(&g, 0, 2).unwrap();
        assert!(!t.broken);
        let step = reduce_step(&t, 1);
        assert!(step.edge_existed);
        assert_eq!(step.reduced.graph.edge_count(), 1);
    }

    #[test]
    fn reduce_preserves_the_invariant() {
        for seed in 0..80 {
            let t = random_two_terminal(7, seed);
            let u = interior_degree2_vertex(&t).unwrap();
            let step = reduce_step(&t, u);
            assert_eq!(step.reduced.graph.n(), t.graph.n() - 1);
            let r = &step.reduced;
            assert!(recognize(&r.graph, r.x, r.y).is_some(), "seed {}", seed);
        }
    }

    #[test]
    fn generator_output_recognizes() {
        for n in 2..=12 {
            for seed in 0..500 {
                let t = random_two_terminal(n, seed);
                assert_eq!(t.graph.n(), n);
                let r = recognize(&t.graph, t.x, t.y).expect("generator output must recognize");
                assert_eq!(r.outer_path, t.outer_path, "n={} seed={}", n, seed);
            }
        }
    }

    #[test]
    fn terminals_are_the_only_degree_one_vertices() {
        for seed in 0..60 {
            let t = random_two_terminal(8, seed);
            for v in t.graph.vertices() {
                if v != t.x && v != t.y {
                    assert!(t.graph.degree(v) >= 2);
                }
            }
        }
    }

    #[test]
    fn unbroken_recognition_requires_outer_xy() {
        // square with chord: 0-1-2-3-0 plus chord (1,3); edge (0,1) is on
        // the outer cycle, chord (1,3) is not
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)]);
        let t = recognize(&g, 0, 1).unwrap();
        assert!(!t.broken);
        assert_eq!(t.outer_path, vec![0, 3, 2, 1]);
        assert!(recognize(&g, 1, 3).is_none(), "a chord is not an outer edge");
        let _ = Edge::new(0, 1);
    }
}
