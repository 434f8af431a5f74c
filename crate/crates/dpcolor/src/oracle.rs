//! Ground-truth brute force: exhaustive DP-colouring with an explicit state
//! budget, and subdividable-set computation by direct subdivide-and-test.
//!
//! A budget overrun is loud and never conflated with "no colouring".

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::cover::{Colouring, Cover};
use crate::graph::{Edge, Graph, Vertex};
use crate::iso::automorphisms;
use crate::minor::{K24Cache, MINOR_MAX_N};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum OracleError {
    /// The state budget ran out before the search space was exhausted.
    Budget,
    TooLarge,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Budget => write!(f, "oracle budget exceeded"),
            OracleError::TooLarge => write!(f, "instance exceeds the desk-scale limits"),
        }
    }
}

impl std::error::Error for OracleError {}

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

struct Search<'a> {
    cover: &'a Cover,
    // links[v][i] holds, per neighbour w of v, (w, mask over L(w))
    links: Vec<Vec<Vec<(Vertex, u32)>>>,
    node_order: Vec<Vec<usize>>,
    lambda: Vec<u32>,
    budget: u64,
    states: u64,
}

impl<'a> Search<'a> {
    fn new(cover: &'a Cover, budget: u64) -> Result<Search<'a>, OracleError> {
        let n = cover.graph.n();
        if n > 16 || cover.list_sizes.iter().any(|&s| s > 32) {
            return Err(OracleError::TooLarge);
        }
        let mut links = vec![Vec::new(); n];
        let mut node_order = vec![Vec::new(); n];
        for v in 0..n {
            let mut per_index = vec![Vec::new(); cover.list_sizes[v]];
            for w in cover.graph.neighbors(v) {
                let b = cover.bundle(Edge::new(v, w));
                for (i, masks) in per_index.iter_mut().enumerate() {
                    let m = b.neighbours_of(v, i);
                    if m != 0 {
                        masks.push((w, m));
                    }
                }
            }
            let mut order: Vec<usize> = (0..cover.list_sizes[v]).collect();
            order.sort_by_key(|&i| per_index[i].iter().map(|(_, m)| m.count_ones()).sum::<u32>());
            links[v] = per_index;
            node_order[v] = order;
        }
        let lambda = (0..n).map(|v| cover.lambda_vertex(v)).collect();
        Ok(Search {
            cover,
            links,
            node_order,
            lambda,
            budget,
            states: 0,
        })
    }

    fn pick_vertex(&self, avail: &[u32], done: &[bool]) -> Option<Vertex> {
        // fail-first: most weighted degree over remaining choices
        (0..self.cover.graph.n())
            .filter(|&v| !done[v])
            .max_by_key(|&v| (self.lambda[v] as i64 - avail[v].count_ones() as i64, std::cmp::Reverse(v)))
    }

    fn dfs(&mut self, avail: &mut Vec<u32>, done: &mut Vec<bool>, phi: &mut Vec<usize>) -> Result<bool, OracleError> {
        let v = match self.pick_vertex(avail, done) {
            Some(v) => v,
            None => return Ok(true),
        };
        let order = self.node_order[v].clone();
        for i in order {
            if avail[v] & (1 << i) == 0 {
                continue;
            }
            self.states += 1;
            if self.states > self.budget {
                return Err(OracleError::Budget);
            }
            // forward filter the neighbours
            let mut saved: Vec<(Vertex, u32)> = Vec::new();
            let mut dead_end = false;
            for &(w, mask) in &self.links[v][i] {
                if done[w] {
                    continue;
                }
                saved.push((w, avail[w]));
                avail[w] &= !mask;
                if avail[w] == 0 {
                    dead_end = true;
                    break;
                }
            }
            if !dead_end {
                phi[v] = i;
                done[v] = true;
                if self.dfs(avail, done, phi)? {
                    return Ok(true);
                }
                done[v] = false;
            }
            for (w, m) in saved {
                avail[w] = m;
            }
        }
        Ok(false)
    }
}

/// Exhaustive search for an (L,M)-colouring; `None` only after the whole
/// space is exhausted within the budget.
pub fn solve_exhaustive(c: &Cover, budget: u64) -> Result<Option<Colouring>, OracleError> {
    solve_exhaustive_pinned(c, &[], budget)
}

/// Same, with some vertices pinned to a fixed node.
pub fn solve_exhaustive_pinned(
    c: &Cover,
    pins: &[(Vertex, usize)],
    budget: u64,
) -> Result<Option<Colouring>, OracleError> {
    let n = c.graph.n();
    let mut search = Search::new(c, budget)?;
    let mut avail: Vec<u32> = c
        .list_sizes
        .iter()
        .map(|&s| if s >= 32 { !0 } else { (1u32 << s) - 1 })
        .collect();
    for &(v, i) in pins {
        avail[v] &= 1 << i;
    }
    if avail.contains(&0) {
        return Ok(None);
    }
    let mut done = vec![false; n];
    let mut phi = vec![0usize; n];
    // apply pins through the same forward filtering
    for &(v, i) in pins {
        if done[v] {
            if phi[v] != i {
                return Ok(None);
            }
            continue;
        }
        let links = search.links[v][i].clone();
        for (w, mask) in links {
            if !done[w] {
                avail[w] &= !mask;
            }
        }
        phi[v] = i;
        done[v] = true;
        if (0..n).any(|w| !done[w] && avail[w] == 0) {
            return Ok(None);
        }
    }
    match search.dfs(&mut avail, &mut done, &mut phi)? {
        true => {
            let col = Colouring(phi);
            debug_assert!(c.check_colouring(&col) || !pins.is_empty());
            Ok(Some(col))
        }
        false => Ok(None),
    }
}

/// Number of states the last search would report; exposed for the suites.
pub fn solve_counting(c: &Cover, budget: u64) -> Result<(Option<Colouring>, u64), OracleError> {
    let n = c.graph.n();
    let mut search = Search::new(c, budget)?;
    let mut avail: Vec<u32> = c
        .list_sizes
        .iter()
        .map(|&s| if s >= 32 { !0 } else { (1u32 << s) - 1 })
        .collect();
    if avail.contains(&0) {
        return Ok((None, 0));
    }
    let mut done = vec![false; n];
    let mut phi = vec![0usize; n];
    let found = search.dfs(&mut avail, &mut done, &mut phi)?;
    Ok((found.then_some(Colouring(phi)), search.states))
}

/// All maximal subdividable edge sets of `g` (raw, not reduced by the
/// automorphism group). Every candidate host must stay within the exact
/// minor tester's range.
pub fn maximal_subdividable_sets(g: &Graph) -> Result<Vec<Vec<Edge>>, OracleError> {
    let edges: Vec<Edge> = g.edges().collect();
    let mut cache = K24Cache::new();
    let mut subdividable: HashSet<u64> = HashSet::new();
    subdividable.insert(0);
    let test = |cache: &mut K24Cache, mask: u64| -> Result<bool, OracleError> {
        let fset: Vec<Edge> = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &e)| e)
            .collect();
        if g.n() + fset.len() > MINOR_MAX_N {
            return Err(OracleError::TooLarge);
        }
        Ok(!cache.has_k24_minor(&g.subdivide(&fset)))
    };
    // grow by the largest new edge index only: reaches every subdividable
    // set exactly once because the family is downward closed
    let mut frontier: Vec<u64> = vec![0];
    while let Some(mask) = frontier.pop() {
        let start = if mask == 0 {
            0
        } else {
            64 - mask.leading_zeros() as usize
        };
        for i in start..edges.len() {
            let next = mask | (1 << i);
            if test(&mut cache, next)? {
                subdividable.insert(next);
                frontier.push(next);
            }
        }
    }
    let mut maximal: Vec<Vec<Edge>> = Vec::new();
    for &mask in &subdividable {
        if mask == 0 {
            continue;
        }
        let is_max = (0..edges.len()).all(|i| {
            mask & (1 << i) != 0 || !subdividable.contains(&(mask | (1 << i)))
        });
        if is_max {
            maximal.push(
                edges
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, &e)| e)
                    .collect(),
            );
        }
    }
    maximal.sort();
    Ok(maximal)
}

/// Collapses a collection of edge sets to orbit representatives under the
/// automorphism group of `g` (the lexicographically least member of each
/// orbit).
pub fn reduce_up_to_automorphism(g: &Graph, sets: &[Vec<Edge>]) -> Vec<Vec<Edge>> {
    let autos = automorphisms(g);
    let mut reps: BTreeSet<Vec<Edge>> = BTreeSet::new();
    for set in sets {
        let mut orbit_min: Option<Vec<Edge>> = None;
        for a in &autos {
            let mut image: Vec<Edge> = set.iter().map(|e| Edge::new(a[e.u], a[e.v])).collect();
            image.sort();
            if orbit_min.as_ref().is_none_or(|m| image < *m) {
                orbit_min = Some(image);
            }
        }
        reps.insert(orbit_min.unwrap());
    }
    reps.into_iter().collect()
}

/// Orbit closure of a collection of edge sets under Aut(g), as a set.
pub fn orbit_closure(g: &Graph, sets: &[Vec<Edge>]) -> BTreeSet<Vec<Edge>> {
    let autos = automorphisms(g);
    let mut out = BTreeSet::new();
    for set in sets {
        for a in &autos {
            let mut image: Vec<Edge> = set.iter().map(|e| Edge::new(a[e.u], a[e.v])).collect();
            image.sort();
            out.insert(image);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{BundleKind, LinkBundle, random_simple_cover};
    use crate::graph::{complete_graph, cycle_graph, wheel_graph};

    fn identity_cover(g: &Graph, size: usize) -> Cover {
        let mut c = Cover::empty(g.clone(), vec![size; g.n()]);
        for e in c.graph.edges().collect::<Vec<_>>() {
            c.bundles.insert(
                e,
                LinkBundle::new(
                    e,
                    BundleKind::Matching,
                    (0..size).map(|i| (i, i)).collect(),
                    vec![],
                ),
            );
        }
        c
    }

    #[test]
    fn identity_even_cycle_colourable_triangle_not() {
        // C_4 with 2-lists and identity matchings composes to the identity
        let c4 = identity_cover(&cycle_graph(4), 2);
        assert!(solve_exhaustive(&c4, 10_000).unwrap().is_some());
        // K_3 with 2-lists and identity matchings is proper 2-colouring
        let k3 = identity_cover(&cycle_graph(3), 2);
        assert!(solve_exhaustive(&k3, 10_000).unwrap().is_none());
    }

    #[test]
    fn empty_list_is_none() {
        let mut c = random_simple_cover(&cycle_graph(4), &[2, 2, 2, 2], 5);
        c.list_sizes[2] = 0;
        c.bundles
            .insert(Edge::new(1, 2), LinkBundle::empty_matching(Edge::new(1, 2)));
        c.bundles
            .insert(Edge::new(2, 3), LinkBundle::empty_matching(Edge::new(2, 3)));
        assert_eq!(solve_exhaustive(&c, 10_000).unwrap(), None);
    }

    #[test]
    fn budget_is_loud() {
        let k3 = identity_cover(&cycle_graph(3), 2);
        assert_eq!(solve_exhaustive(&k3, 1), Err(OracleError::Budget));
    }

    #[test]
    fn pinned_endpoints() {
        let c4 = identity_cover(&cycle_graph(4), 2);
        // identity correspondences force equal colour around the even cycle
        let got = solve_exhaustive_pinned(&c4, &[(0, 0), (2, 0)], 10_000).unwrap();
        assert!(got.is_some());
        let bad = solve_exhaustive_pinned(&c4, &[(0, 0), (2, 1)], 10_000).unwrap();
        assert!(bad.is_none());
    }

    #[test]
    fn k5_has_no_subdividable_edge() {
        let sets = maximal_subdividable_sets(&complete_graph(5)).unwrap();
        assert!(sets.is_empty());
    }

    #[test]
    fn w4_has_three_maximal_sets_up_to_automorphism() {
        let w4 = wheel_graph(4);
        let raw = maximal_subdividable_sets(&w4).unwrap();
        let reps = reduce_up_to_automorphism(&w4, &raw);
        assert_eq!(reps.len(), 3, "reps: {:?}", reps);
        // the rim + one spoke set is among them
        let mut rim_spoke: Vec<Edge> = cycle_graph(4).edges().collect();
        rim_spoke.push(Edge::new(0, 4));
        rim_spoke.sort();
        let closure = orbit_closure(&w4, &reps);
        assert!(closure.contains(&rim_spoke));
    }
}
