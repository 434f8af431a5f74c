//! DP covers: per-vertex node lists plus per-edge link bundles.
//!
//! A bundle carries an explicit decomposition tag (matching / K_{2,2} part /
//! union of both) and the tag is authoritative: the λ-weight of an edge at an
//! endpoint is computed from the tag, never re-derived from the raw links.
//! Deleting nodes re-packs list indices but records the order map so replay
//! stacks survive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, Graph, Vertex};

/// A node of the cover: position `index` in the list of `vertex`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct NodeRef {
    pub vertex: Vertex,
    pub index: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BundleKind {
    Matching,
    K22Part,
    Union,
}

impl fmt::Display for BundleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleKind::Matching => write!(f, "matching"),
            BundleKind::K22Part => write!(f, "k22part"),
            BundleKind::Union => write!(f, "union"),
        }
    }
}

/// Links of one edge. Links are stored as `(index in L(edge.u), index in
/// L(edge.v))` pairs, sorted. For `Matching` only `matching_links` is used,
/// for `K22Part` only `k22_links`, and a `Union` uses both (disjoint).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkBundle {
    pub edge: Edge,
    pub kind: BundleKind,
    pub matching_links: Vec<(usize, usize)>,
    pub k22_links: Vec<(usize, usize)>,
}

fn is_matching_set(links: &[(usize, usize)]) -> bool {
    let mut us: Vec<usize> = links.iter().map(|l| l.0).collect();
    let mut vs: Vec<usize> = links.iter().map(|l| l.1).collect();
    us.sort_unstable();
    vs.sort_unstable();
    us.windows(2).all(|w| w[0] != w[1]) && vs.windows(2).all(|w| w[0] != w[1])
}

fn fits_k22(links: &[(usize, usize)]) -> bool {
    let us: BTreeSet<usize> = links.iter().map(|l| l.0).collect();
    let vs: BTreeSet<usize> = links.iter().map(|l| l.1).collect();
    us.len() <= 2 && vs.len() <= 2
}

/// λ contribution of a K_{2,2}-shaped link set at one side. A part of
/// maximum degree <= 1 is a matching and weighs 1; a K_{1,2} weighs 1 at
/// the side holding its degree-2 node and 2 at the other; every other
/// shape weighs 2.
fn k22_shape_lambda(links: &[(usize, usize)], at_u: bool) -> u32 {
    if is_matching_set(links) {
        return 1;
    }
    if links.len() == 2 {
        let (a, b) = (links[0], links[1]);
        if at_u && a.0 == b.0 && a.1 != b.1 {
            return 1;
        }
        if !at_u && a.1 == b.1 && a.0 != b.0 {
            return 1;
        }
    }
    2
}

impl LinkBundle {
    pub fn new(edge: Edge, kind: BundleKind, mut m: Vec<(usize, usize)>, mut k: Vec<(usize, usize)>) -> LinkBundle {
        m.sort_unstable();
        m.dedup();
        k.sort_unstable();
        k.dedup();
        LinkBundle {
            edge,
            kind,
            matching_links: m,
            k22_links: k,
        }
    }

    pub fn empty_matching(edge: Edge) -> LinkBundle {
        LinkBundle::new(edge, BundleKind::Matching, vec![], vec![])
    }

    /// All links of the bundle, both parts.
    pub fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matching_links.iter().chain(self.k22_links.iter()).copied()
    }

    pub fn link_count(&self) -> usize {
        self.matching_links.len() + self.k22_links.len()
    }

    /// Builds the bundle carrying the given link split under the weakest
    /// legal kind: Matching if all links form a matching, else K22Part if
    /// they fit in a K_{2,2}, else the Union with the given split.
    pub fn reclassified(edge: Edge, m: Vec<(usize, usize)>, k: Vec<(usize, usize)>) -> LinkBundle {
        let mut all: Vec<(usize, usize)> = m.iter().chain(k.iter()).copied().collect();
        all.sort_unstable();
        all.dedup();
        if is_matching_set(&all) {
            LinkBundle::new(edge, BundleKind::Matching, all, vec![])
        } else if fits_k22(&all) {
            LinkBundle::new(edge, BundleKind::K22Part, vec![], all)
        } else {
            let k: Vec<(usize, usize)> = {
                let mut k = k;
                k.sort_unstable();
                k.dedup();
                k
            };
            let m = m.into_iter().filter(|l| !k.contains(l)).collect();
            LinkBundle::new(edge, BundleKind::Union, m, k)
        }
    }

    pub fn validate(&self, lu: usize, lv: usize) -> Result<(), String> {
        for &(a, b) in self.matching_links.iter().chain(self.k22_links.iter()) {
            if a >= lu || b >= lv {
                return Err(format!("link ({},{}) out of range on {}", a, b, self.edge));
            }
        }
        match self.kind {
            BundleKind::Matching => {
                if !self.k22_links.is_empty() {
                    return Err("matching bundle with k22 links".into());
                }
                if !is_matching_set(&self.matching_links) {
                    return Err("matching links do not form a matching".into());
                }
            }
            BundleKind::K22Part => {
                if !self.matching_links.is_empty() {
                    return Err("k22part bundle with matching links".into());
                }
                if !fits_k22(&self.k22_links) {
                    return Err("k22 links touch more than two nodes on a side".into());
                }
            }
            BundleKind::Union => {
                if !is_matching_set(&self.matching_links) {
                    return Err("union matching part is not a matching".into());
                }
                if !fits_k22(&self.k22_links) {
                    return Err("union k22 part does not fit K_{2,2}".into());
                }
                if self.matching_links.is_empty() || self.k22_links.is_empty() {
                    return Err("union must have both parts non-empty".into());
                }
                if self.matching_links.iter().any(|l| self.k22_links.contains(l)) {
                    return Err("union parts are not disjoint".into());
                }
                let all: Vec<(usize, usize)> = self.links().collect();
                if is_matching_set(&all) || fits_k22(&all) {
                    return Err("union collapses to a weaker kind".into());
                }
            }
        }
        Ok(())
    }

    /// λ-weight of this bundle at the given endpoint.
    pub fn lambda(&self, side: Vertex) -> u32 {
        let at_u = if side == self.edge.u {
            true
        } else {
            assert_eq!(side, self.edge.v, "vertex not on edge");
            false
        };
        match self.kind {
            BundleKind::Matching => 1,
            BundleKind::K22Part => k22_shape_lambda(&self.k22_links, at_u),
            BundleKind::Union => 1 + k22_shape_lambda(&self.k22_links, at_u),
        }
    }

    /// Degree of node `idx` of `side` within this bundle.
    pub fn node_degree(&self, side: Vertex, idx: usize) -> usize {
        let at_u = side == self.edge.u;
        self.links()
            .filter(|&(a, b)| if at_u { a == idx } else { b == idx })
            .count()
    }

    /// Bitmask over the other side's indices linked to `(side, idx)`.
    pub fn neighbours_of(&self, side: Vertex, idx: usize) -> u32 {
        let at_u = side == self.edge.u;
        let mut mask = 0u32;
        for (a, b) in self.links() {
            if at_u && a == idx {
                mask |= 1 << b;
            } else if !at_u && b == idx {
                mask |= 1 << a;
            }
        }
        mask
    }

    /// True when the links saturate both sides under the Matching kind.
    pub fn is_perfect_matching(&self, lu: usize, lv: usize) -> bool {
        self.kind == BundleKind::Matching
            && self.matching_links.len() == lu
            && self.matching_links.len() == lv
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoverError {
    NotTwoTerminal,
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverError::NotTwoTerminal => write!(f, "outer path does not describe the graph"),
        }
    }
}

impl std::error::Error for CoverError {}

/// A cover (L, M): list sizes per vertex and one bundle per edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cover {
    pub graph: Graph,
    pub list_sizes: Vec<usize>,
    pub bundles: BTreeMap<Edge, LinkBundle>,
}

/// Chosen node per vertex, stored as the index into that vertex's list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Colouring(pub Vec<usize>);

impl Colouring {
    pub fn node(&self, v: Vertex) -> NodeRef {
        NodeRef {
            vertex: v,
            index: self.0[v],
        }
    }
}

/// Stable order maps produced by node deletion: `old_to_new[v][i]` is the
/// new index of node i of v (None when deleted), `new_to_old[v]` the reverse.
#[derive(Clone, Debug)]
pub struct NodeMaps {
    pub old_to_new: Vec<Vec<Option<usize>>>,
    pub new_to_old: Vec<Vec<usize>>,
    /// Vertices whose list became empty (legal, but callers must care).
    pub emptied: Vec<Vertex>,
}

impl NodeMaps {
    pub fn identity(list_sizes: &[usize]) -> NodeMaps {
        NodeMaps {
            old_to_new: list_sizes.iter().map(|&s| (0..s).map(Some).collect()).collect(),
            new_to_old: list_sizes.iter().map(|&s| (0..s).collect()).collect(),
            emptied: vec![],
        }
    }
}

impl Cover {
    /// Cover with the given list sizes and empty matchings on every edge.
    pub fn empty(graph: Graph, list_sizes: Vec<usize>) -> Cover {
        let bundles = graph
            .edges()
            .map(|e| (e, LinkBundle::empty_matching(e)))
            .collect();
        Cover {
            graph,
            list_sizes,
            bundles,
        }
    }

    pub fn bundle(&self, e: Edge) -> &LinkBundle {
        &self.bundles[&e]
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.list_sizes.len() != self.graph.n() {
            return Err("list_sizes length mismatch".into());
        }
        let edges: BTreeSet<Edge> = self.graph.edges().collect();
        let keyed: BTreeSet<Edge> = self.bundles.keys().copied().collect();
        if edges != keyed {
            return Err("bundles not keyed exactly by E(G)".into());
        }
        for (e, b) in &self.bundles {
            if b.edge != *e {
                return Err("bundle edge key mismatch".into());
            }
            b.validate(self.list_sizes[e.u], self.list_sizes[e.v])?;
        }
        Ok(())
    }

    pub fn lambda_vertex(&self, v: Vertex) -> u32 {
        self.graph
            .neighbors(v)
            .map(|u| self.bundle(Edge::new(u, v)).lambda(v))
            .sum()
    }

    pub fn ell(&self, v: Vertex) -> u32 {
        self.lambda_vertex(v).min(5)
    }

    pub fn is_simple(&self) -> bool {
        self.bundles.values().all(|b| b.kind == BundleKind::Matching)
    }

    /// True iff no chosen pair of nodes is a link.
    pub fn check_colouring(&self, phi: &Colouring) -> bool {
        if phi.0.len() != self.graph.n() {
            return false;
        }
        if (0..self.graph.n()).any(|v| phi.0[v] >= self.list_sizes[v]) {
            return false;
        }
        self.bundles.values().all(|b| {
            let (cu, cv) = (phi.0[b.edge.u], phi.0[b.edge.v]);
            b.links().all(|l| l != (cu, cv))
        })
    }

    /// Mask over L(`to`) of nodes linked to node `idx` of `from`; zero when
    /// the edge is absent.
    pub fn link_mask(&self, from: Vertex, idx: usize, to: Vertex) -> u32 {
        if !self.graph.has_edge(from, to) {
            return 0;
        }
        self.bundle(Edge::new(from, to)).neighbours_of(from, idx)
    }

    /// Validity for a broken x-y-outerplanar gadget, per the outer path:
    /// non-path bundles must be matchings, lists must cover the capped
    /// weighted degree, a degree-3 node on a path edge forces a 5-list on
    /// the other end, and the trivial K_2 gadget carries a K_{2,2}-subgraph.
    pub fn is_valid_two_terminal(
        &self,
        x: Vertex,
        y: Vertex,
        outer_path: &[Vertex],
    ) -> Result<bool, CoverError> {
        let n = self.graph.n();
        if outer_path.len() != n
            || outer_path.first() != Some(&x)
            || outer_path.last() != Some(&y)
        {
            return Err(CoverError::NotTwoTerminal);
        }
        let mut path_edges = BTreeSet::new();
        for w in outer_path.windows(2) {
            if !self.graph.has_edge(w[0], w[1]) {
                return Err(CoverError::NotTwoTerminal);
            }
            path_edges.insert(Edge::new(w[0], w[1]));
        }
        // condition 2: non-path bundles are matchings
        for (e, b) in &self.bundles {
            if !path_edges.contains(e) && b.kind != BundleKind::Matching {
                return Ok(false);
            }
        }
        // condition 3
        for v in 0..n {
            if (self.list_sizes[v] as u32) < self.ell(v) {
                return Ok(false);
            }
        }
        for e in &path_edges {
            let b = self.bundle(*e);
            let heavy_u = (0..self.list_sizes[e.u]).any(|i| b.node_degree(e.u, i) >= 3);
            let heavy_v = (0..self.list_sizes[e.v]).any(|i| b.node_degree(e.v, i) >= 3);
            if heavy_u && self.list_sizes[e.v] < 5 {
                return Ok(false);
            }
            if heavy_v && self.list_sizes[e.u] < 5 {
                return Ok(false);
            }
        }
        // condition 4: trivial gadget
        if n == 2 {
            let b = self.bundle(Edge::new(x, y));
            let all: Vec<(usize, usize)> = b.links().collect();
            if b.kind == BundleKind::Union || !fits_k22(&all) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// F-validity on a 3-connected core: matchings off F, anything of the
    /// three kinds on F, lists covering the capped weighted degree, and on a
    /// complete core at least one non-perfect-matching edge.
    pub fn is_f_valid(&self, fset: &BTreeSet<Edge>) -> bool {
        for (e, b) in &self.bundles {
            if !fset.contains(e) && b.kind != BundleKind::Matching {
                return false;
            }
        }
        for v in 0..self.graph.n() {
            if (self.list_sizes[v] as u32) < self.ell(v) {
                return false;
            }
        }
        if self.graph.is_complete() && self.graph.n() >= 2 {
            let any_non_perfect = self.bundles.values().any(|b| {
                !b.is_perfect_matching(self.list_sizes[b.edge.u], self.list_sizes[b.edge.v])
            });
            if !any_non_perfect {
                return false;
            }
        }
        true
    }

    /// Deletes the given nodes. Lists shrink with a stable order, bundles
    /// drop incident links and are reclassified to the weakest kind that
    /// still holds. An emptied list is legal and reported in the maps.
    pub fn delete_nodes(&self, dead: &BTreeSet<NodeRef>) -> (Cover, NodeMaps) {
        let n = self.graph.n();
        let mut old_to_new: Vec<Vec<Option<usize>>> = Vec::with_capacity(n);
        let mut new_to_old: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut emptied = Vec::new();
        let mut sizes = Vec::with_capacity(n);
        for v in 0..n {
            let mut o2n = Vec::with_capacity(self.list_sizes[v]);
            let mut n2o = Vec::new();
            for i in 0..self.list_sizes[v] {
                if dead.contains(&NodeRef { vertex: v, index: i }) {
                    o2n.push(None);
                } else {
                    o2n.push(Some(n2o.len()));
                    n2o.push(i);
                }
            }
            if n2o.is_empty() && self.list_sizes[v] > 0 {
                emptied.push(v);
            }
            sizes.push(n2o.len());
            old_to_new.push(o2n);
            new_to_old.push(n2o);
        }
        let remap = |e: Edge, links: &[(usize, usize)]| -> Vec<(usize, usize)> {
            links
                .iter()
                .filter_map(|&(a, b)| {
                    match (old_to_new[e.u][a], old_to_new[e.v][b]) {
                        (Some(a2), Some(b2)) => Some((a2, b2)),
                        _ => None,
                    }
                })
                .collect()
        };
        let bundles = self
            .bundles
            .iter()
            .map(|(&e, b)| {
                let m = remap(e, &b.matching_links);
                let k = remap(e, &b.k22_links);
                (e, LinkBundle::reclassified(e, m, k))
            })
            .collect();
        (
            Cover {
                graph: self.graph.clone(),
                list_sizes: sizes,
                bundles,
            },
            NodeMaps {
                old_to_new,
                new_to_old,
                emptied,
            },
        )
    }

    /// Restriction to a spanning subgraph: keeps only edges accepted by the
    /// filter. Lists are untouched.
    pub fn restrict_edges(&self, keep: impl Fn(Edge) -> bool) -> Cover {
        let mut g = Graph::new(self.graph.n());
        let mut bundles = BTreeMap::new();
        for (&e, b) in &self.bundles {
            if keep(e) {
                g.add_edge(e.u, e.v);
                bundles.insert(e, b.clone());
            }
        }
        Cover {
            graph: g,
            list_sizes: self.list_sizes.clone(),
            bundles,
        }
    }

    /// Restriction to the subgraph induced on `verts`, relabelled so that
    /// `verts[i]` becomes vertex i.
    pub fn restrict_induced(&self, verts: &[Vertex]) -> Cover {
        let g = self.graph.induced(verts);
        let sizes = verts.iter().map(|&v| self.list_sizes[v]).collect();
        let mut bundles = BTreeMap::new();
        for e in g.edges() {
            let (a, b) = (verts[e.u], verts[e.v]);
            let orig = self.bundle(Edge::new(a, b));
            // link orientation may flip when the relabelling swaps the order
            let flip = a > b;
            let conv = |links: &[(usize, usize)]| -> Vec<(usize, usize)> {
                links
                    .iter()
                    .map(|&(p, q)| if flip { (q, p) } else { (p, q) })
                    .collect()
            };
            bundles.insert(
                e,
                LinkBundle::new(e, orig.kind, conv(&orig.matching_links), conv(&orig.k22_links)),
            );
        }
        Cover {
            graph: g,
            list_sizes: sizes,
            bundles,
        }
    }
}

/// Reproducible pseudo-random cover. `allowed` names the kinds permitted per
/// edge; link shapes are sampled within the given list sizes and the bundle
/// is reclassified to the weakest kind, so tags always satisfy their
/// invariants (validity in the two-terminal sense is a separate concern).
pub fn random_cover(
    g: &Graph,
    f: &[usize],
    allowed: impl Fn(Edge) -> Vec<BundleKind>,
    seed: u64,
) -> Cover {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bundles = BTreeMap::new();
    for e in g.edges() {
        let kinds = allowed(e);
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let (lu, lv) = (f[e.u], f[e.v]);
        let b = match kind {
            BundleKind::Matching => random_matching_bundle(e, lu, lv, &mut rng),
            BundleKind::K22Part => {
                let k = random_k22_links(lu, lv, &mut rng);
                LinkBundle::reclassified(e, vec![], k)
            }
            BundleKind::Union => {
                let k = random_k22_links(lu, lv, &mut rng);
                let m = random_matching_links(lu, lv, &mut rng);
                let m = m.into_iter().filter(|l| !k.contains(l)).collect();
                LinkBundle::reclassified(e, m, k)
            }
        };
        bundles.insert(e, b);
    }
    let c = Cover {
        graph: g.clone(),
        list_sizes: f.to_vec(),
        bundles,
    };
    debug_assert_eq!(c.validate(), Ok(()));
    c
}

fn random_matching_links(lu: usize, lv: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let max = lu.min(lv);
    if max == 0 {
        return vec![];
    }
    let k = rng.gen_range(0..=max);
    let mut us: Vec<usize> = (0..lu).collect();
    let mut vs: Vec<usize> = (0..lv).collect();
    shuffle(&mut us, rng);
    shuffle(&mut vs, rng);
    (0..k).map(|i| (us[i], vs[i])).collect()
}

fn random_matching_bundle(e: Edge, lu: usize, lv: usize, rng: &mut ChaCha8Rng) -> LinkBundle {
    LinkBundle::new(e, BundleKind::Matching, random_matching_links(lu, lv, rng), vec![])
}

/// A perfect-matching bundle under a random pairing (needs equal sizes).
pub fn random_perfect_matching_bundle(e: Edge, l: usize, rng: &mut ChaCha8Rng) -> LinkBundle {
    let mut vs: Vec<usize> = (0..l).collect();
    shuffle(&mut vs, rng);
    LinkBundle::new(
        e,
        BundleKind::Matching,
        (0..l).map(|i| (i, vs[i])).collect(),
        vec![],
    )
}

fn random_k22_links(lu: usize, lv: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    if lu == 0 || lv == 0 {
        return vec![];
    }
    let mut us: Vec<usize> = (0..lu).collect();
    let mut vs: Vec<usize> = (0..lv).collect();
    shuffle(&mut us, rng);
    shuffle(&mut vs, rng);
    let nu = 2.min(lu);
    let nv = 2.min(lv);
    let mut links = Vec::new();
    for &a in &us[..nu] {
        for &b in &vs[..nv] {
            if rng.gen_bool(0.7) {
                links.push((a, b));
            }
        }
    }
    if links.is_empty() {
        links.push((us[0], vs[0]));
    }
    links
}

fn shuffle<T>(xs: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..xs.len()).rev() {
        let j = rng.gen_range(0..=i);
        xs.swap(i, j);
    }
}

/// Simple cover with all-matching bundles, the usual top-level input shape.
pub fn random_simple_cover(g: &Graph, f: &[usize], seed: u64) -> Cover {
    random_cover(g, f, |_| vec![BundleKind::Matching], seed)
}

/// Random cover that is valid for a broken x-y-outerplanar gadget: kinds are
/// constrained by the outer path, list sizes are grown to meet the weighted
/// degree and the degree-3-node rule.
pub fn random_valid_two_terminal_cover(
    g: &Graph,
    x: Vertex,
    y: Vertex,
    outer_path: &[Vertex],
    seed: u64,
) -> Cover {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n();
    let path_edges: BTreeSet<Edge> = outer_path
        .windows(2)
        .map(|w| Edge::new(w[0], w[1]))
        .collect();
    // plan kinds and shapes first, then sizes, then materialize links
    #[derive(Clone, Copy)]
    enum Plan {
        Match,
        K22 { deg2_at_u: Option<bool> },
        Union { deg2_at_u: Option<bool>, deg3_at_u: Option<bool> },
    }
    let mut plans: BTreeMap<Edge, Plan> = BTreeMap::new();
    for e in g.edges() {
        let plan = if !path_edges.contains(&e) || n == 2 {
            // chords stay matchings; the trivial gadget may also carry a K22
            if n == 2 && rng.gen_bool(0.6) {
                Plan::K22 {
                    deg2_at_u: pick_deg2(&mut rng),
                }
            } else {
                Plan::Match
            }
        } else {
            match rng.gen_range(0..6) {
                0..=2 => Plan::Match,
                3 | 4 => Plan::K22 {
                    deg2_at_u: pick_deg2(&mut rng),
                },
                _ => {
                    let deg2 = pick_deg2(&mut rng);
                    // a degree-3 node only makes sense where the k22 part
                    // has a degree-2 node; create one sometimes
                    let deg3 = match deg2 {
                        Some(side) if rng.gen_bool(0.4) => Some(side),
                        _ => None,
                    };
                    Plan::Union {
                        deg2_at_u: deg2,
                        deg3_at_u: deg3,
                    }
                }
            }
        };
        plans.insert(e, plan);
    }
    // λ per plan
    let lam = |p: &Plan, at_u: bool| -> u32 {
        match p {
            Plan::Match => 1,
            Plan::K22 { deg2_at_u
            } => match deg2_at_u {
                Some(d) if *d == at_u => 1,
                _ => 2,
            },
            Plan::Union { deg2_at_u, .. } => match deg2_at_u {
                Some(d) if *d == at_u => 2,
                _ => 3,
            },
        }
    };
    let mut sizes = vec![0usize; n];
    for v in 0..n {
        let l: u32 = g
            .neighbors(v)
            .map(|u| {
                let e = Edge::new(u, v);
                lam(&plans[&e], v == e.u)
            })
            .sum();
        sizes[v] = l.min(5).max(1) as usize + rng.gen_range(0..=1);
    }
    // degree-3 rule: a planned degree-3 node in L(u) forces |L(v)| >= 5
    for (e, p) in &plans {
        if let Plan::Union { deg3_at_u: Some(at_u), .. } = p {
            let other = if *at_u { e.v } else { e.u };
            sizes[other] = sizes[other].max(5);
        }
    }
    // materialize
    let mut bundles = BTreeMap::new();
    for (&e, p) in &plans {
        let (lu, lv) = (sizes[e.u], sizes[e.v]);
        let b = match p {
            Plan::Match => random_matching_bundle(e, lu, lv, &mut rng),
            Plan::K22 { deg2_at_u } => {
                let k = shaped_k22(lu, lv, *deg2_at_u, &mut rng);
                LinkBundle::reclassified(e, vec![], k)
            }
            Plan::Union { deg2_at_u, deg3_at_u } => {
                let k = shaped_k22(lu, lv, *deg2_at_u, &mut rng);
                let kdeg_u = |i: usize| k.iter().filter(|l| l.0 == i).count();
                let kdeg_v = |i: usize| k.iter().filter(|l| l.1 == i).count();
                let mut m = random_matching_links(lu, lv, &mut rng);
                // keep matching links off k22 nodes of degree 2 so no node
                // reaches degree 3 by accident
                m.retain(|&(a, b)| kdeg_u(a) < 2 && kdeg_v(b) < 2);
                if let Some(at_u) = deg3_at_u {
                    // designated degree-3 node: the k22 hub plus one
                    // matching link to an otherwise untouched partner
                    let hub = if *at_u {
                        (0..lu).find(|&i| kdeg_u(i) == 2)
                    } else {
                        (0..lv).find(|&i| kdeg_v(i) == 2)
                    };
                    if let Some(hub) = hub {
                        let free: Option<usize> = if *at_u {
                            (0..lv).find(|&q| kdeg_v(q) == 0 && !m.iter().any(|l| l.1 == q))
                        } else {
                            (0..lu).find(|&q| kdeg_u(q) == 0 && !m.iter().any(|l| l.0 == q))
                        };
                        if let Some(q) = free {
                            if *at_u {
                                m.push((hub, q));
                            } else {
                                m.push((q, hub));
                            }
                        }
                    }
                }
                let m = m.into_iter().filter(|l| !k.contains(l)).collect();
                LinkBundle::reclassified(e, m, k)
            }
        };
        bundles.insert(e, b);
    }
    let c = Cover {
        graph: g.clone(),
        list_sizes: sizes,
        bundles,
    };
    debug_assert_eq!(c.validate(), Ok(()));
    debug_assert_eq!(c.is_valid_two_terminal(x, y, outer_path), Ok(true));
    c
}

fn pick_deg2(rng: &mut ChaCha8Rng) -> Option<bool> {
    match rng.gen_range(0..3) {
        0 => None,
        1 => Some(true),
        _ => Some(false),
    }
}

/// K_{2,2}-shaped links with a prescribed K_{1,2} orientation (None means a
/// shape with λ = 2 on both sides).
fn shaped_k22(lu: usize, lv: usize, deg2_at_u: Option<bool>, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut us: Vec<usize> = (0..lu).collect();
    let mut vs: Vec<usize> = (0..lv).collect();
    shuffle(&mut us, rng);
    shuffle(&mut vs, rng);
    match deg2_at_u {
        Some(true) if lv >= 2 => vec![(us[0], vs[0]), (us[0], vs[1])],
        Some(false) if lu >= 2 => vec![(us[0], vs[0]), (us[1], vs[0])],
        _ => {
            // λ=2/2 shape: full K_{2,2}, a 3-link path, or fall back to K_{1,2}
            if lu >= 2 && lv >= 2 {
                let mut links = vec![
                    (us[0], vs[0]),
                    (us[0], vs[1]),
                    (us[1], vs[0]),
                    (us[1], vs[1]),
                ];
                if rng.gen_bool(0.5) {
                    links.pop();
                }
                links
            } else if lv >= 2 {
                vec![(us[0], vs[0]), (us[0], vs[1])]
            } else if lu >= 2 {
                vec![(us[0], vs[0]), (us[1], vs[0])]
            } else {
                vec![(us[0], vs[0])]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{cycle_graph, path_graph};

    fn k22_bundle(e: Edge, links: &[(usize, usize)]) -> LinkBundle {
        LinkBundle::new(e, BundleKind::K22Part, vec![], links.to_vec())
    }

    #[test]
    fn lambda_table_on_all_k22_subshapes() {
        // all 16 subsets of the K_{2,2} links between {0,1} and {0,1}:
        // matching-shaped parts weigh 1, a K_{1,2} weighs 1 at its hub
        // side, the shapes of maximum degree 2 weigh 2 on both sides
        let e = Edge::new(0, 1);
        let full = [(0, 0), (0, 1), (1, 0), (1, 1)];
        for mask in 0..16u32 {
            let links: Vec<(usize, usize)> = (0..4)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| full[i])
                .collect();
            let b = k22_bundle(e, &links);
            let (lu, lv) = (b.lambda(0), b.lambda(1));
            let us: BTreeSet<usize> = links.iter().map(|l| l.0).collect();
            let vs: BTreeSet<usize> = links.iter().map(|l| l.1).collect();
            let is_k12_u = links.len() == 2 && us.len() == 1 && vs.len() == 2;
            let is_k12_v = links.len() == 2 && vs.len() == 1 && us.len() == 2;
            if is_matching_set(&links) {
                assert_eq!((lu, lv), (1, 1), "links {:?}", links);
            } else if is_k12_u {
                assert_eq!((lu, lv), (1, 2));
            } else if is_k12_v {
                assert_eq!((lu, lv), (2, 1));
            } else {
                assert_eq!((lu, lv), (2, 2), "links {:?}", links);
            }
            // symmetry exactly off the K_{1,2} shapes
            assert_eq!(lu == lv, !(is_k12_u || is_k12_v));
        }
    }

    #[test]
    fn lambda_union_rule() {
        let e = Edge::new(0, 1);
        // 1 matching link + full K_{2,2} on disjoint nodes: λ = 3 both ends
        let b = LinkBundle::new(
            e,
            BundleKind::Union,
            vec![(4, 4)],
            vec![(0, 0), (0, 1), (1, 0), (1, 1)],
        );
        assert!(b.validate(5, 5).is_ok());
        assert_eq!(b.lambda(0), 3);
        assert_eq!(b.lambda(1), 3);
    }

    #[test]
    fn matching_lambda_is_one() {
        let e = Edge::new(0, 1);
        let b = LinkBundle::new(e, BundleKind::Matching, vec![(0, 0), (1, 1), (2, 2)], vec![]);
        assert_eq!(b.lambda(0), 1);
        assert_eq!(b.lambda(1), 1);
    }

    #[test]
    fn vertex_lambda_and_ell() {
        // degree-3 vertex 0 on a star, one union(λ=3) + two matchings
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let mut c = Cover::empty(g, vec![5, 5, 5, 5]);
        let e = Edge::new(0, 1);
        c.bundles.insert(
            e,
            LinkBundle::new(e, BundleKind::Union, vec![(4, 4)], vec![(0, 0), (0, 1), (1, 0), (1, 1)]),
        );
        assert_eq!(c.lambda_vertex(0), 5);
        assert_eq!(c.ell(0), 5);
        assert_eq!(c.lambda_vertex(1), 3);
    }

    #[test]
    fn heavy_node_degree_bound() {
        // lemma: |N(a)| <= λ at the other end, and at most two heavy nodes
        let e = Edge::new(0, 1);
        for mask in 0..16u32 {
            let full = [(0, 0), (0, 1), (1, 0), (1, 1)];
            let links: Vec<(usize, usize)> = (0..4)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| full[i])
                .collect();
            let b = k22_bundle(e, &links);
            for i in 0..2 {
                assert!(b.node_degree(0, i) as u32 <= b.lambda(1));
                assert!(b.node_degree(1, i) as u32 <= b.lambda(0));
            }
            let heavy_u = (0..2).filter(|&i| b.node_degree(0, i) >= 2).count();
            assert!(heavy_u <= 2);
        }
    }

    #[test]
    fn check_colouring_examples() {
        // identity-matching triangle with lists {0,1,2}: (0,1,2) is proper
        let g = cycle_graph(3);
        let mut c = Cover::empty(g, vec![3, 3, 3]);
        for e in c.graph.edges().collect::<Vec<_>>() {
            c.bundles.insert(
                e,
                LinkBundle::new(e, BundleKind::Matching, vec![(0, 0), (1, 1), (2, 2)], vec![]),
            );
        }
        assert!(c.check_colouring(&Colouring(vec![0, 1, 2])));
        assert!(!c.check_colouring(&Colouring(vec![1, 1, 2])));

        // single edge with full K_{2,2} and 2-lists: nothing works
        let g2 = path_graph(2);
        let mut c2 = Cover::empty(g2, vec![2, 2]);
        let e = Edge::new(0, 1);
        c2.bundles.insert(e, k22_bundle(e, &[(0, 0), (0, 1), (1, 0), (1, 1)]));
        for a in 0..2 {
            for b in 0..2 {
                assert!(!c2.check_colouring(&Colouring(vec![a, b])));
            }
        }
    }

    #[test]
    fn delete_nodes_reclassifies_downward() {
        let g = path_graph(2);
        let e = Edge::new(0, 1);
        let mut c = Cover::empty(g, vec![5, 5]);
        c.bundles.insert(
            e,
            LinkBundle::new(e, BundleKind::Union, vec![(4, 4)], vec![(0, 0), (0, 1), (1, 0), (1, 1)]),
        );
        // kill the K_{2,2} side nodes at vertex 0: union decays to a matching
        let dead: BTreeSet<NodeRef> = [NodeRef { vertex: 0, index: 0 }, NodeRef { vertex: 0, index: 1 }]
            .into_iter()
            .collect();
        let (c2, maps) = c.delete_nodes(&dead);
        let b = c2.bundle(e);
        assert_eq!(b.kind, BundleKind::Matching);
        assert_eq!(b.matching_links, vec![(2, 4)]);
        assert_eq!(maps.new_to_old[0], vec![2, 3, 4]);
        assert!(maps.emptied.is_empty());
        // λ never increases
        assert!(b.lambda(0) <= 3 && b.lambda(1) <= 3);

        // deleting nothing is the identity
        let (c3, _) = c.delete_nodes(&BTreeSet::new());
        assert_eq!(c3, c);
    }

    #[test]
    fn restrict_to_one_edge() {
        let g = cycle_graph(3);
        let c = random_simple_cover(&g, &[2, 2, 2], 11);
        let r = c.restrict_edges(|e| e == Edge::new(0, 1));
        assert_eq!(r.bundles.len(), 1);
        assert_eq!(r.graph.edge_count(), 1);
    }

    #[test]
    fn random_cover_is_deterministic() {
        let g = cycle_graph(5);
        let f = vec![3, 3, 3, 3, 3];
        let a = random_cover(&g, &f, |_| vec![BundleKind::Matching, BundleKind::K22Part], 42);
        let b = random_cover(&g, &f, |_| vec![BundleKind::Matching, BundleKind::K22Part], 42);
        assert_eq!(a, b);
        assert!(random_simple_cover(&g, &f, 7).is_simple());
    }

    #[test]
    fn f_valid_examples() {
        // all matchings, F = ∅, non-complete graph
        let g = cycle_graph(4);
        let c = random_simple_cover(&g, &[2, 2, 2, 2], 3);
        assert!(c.is_f_valid(&BTreeSet::new()));

        // K_4 with all identity perfect matchings and F = ∅ fails condition 4
        let k4 = crate::graph::complete_graph(4);
        let mut c = Cover::empty(k4, vec![3, 3, 3, 3]);
        for e in c.graph.edges().collect::<Vec<_>>() {
            c.bundles.insert(
                e,
                LinkBundle::new(e, BundleKind::Matching, vec![(0, 0), (1, 1), (2, 2)], vec![]),
            );
        }
        assert!(!c.is_f_valid(&BTreeSet::new()));

        // a union bundle outside F violates condition 1
        let g = cycle_graph(4);
        let mut c = Cover::empty(g, vec![5, 5, 5, 5]);
        let e = Edge::new(0, 1);
        c.bundles.insert(
            e,
            LinkBundle::new(e, BundleKind::Union, vec![(4, 4)], vec![(0, 0), (0, 1), (1, 0), (1, 1)]),
        );
        assert!(!c.is_f_valid(&BTreeSet::new()));
        let f: BTreeSet<Edge> = [e].into_iter().collect();
        assert!(c.is_f_valid(&f));
    }

    #[test]
    fn two_terminal_validity_examples() {
        // K_2 with a full K_{2,2} bundle and 2-lists is valid
        let g = path_graph(2);
        let e = Edge::new(0, 1);
        let mut c = Cover::empty(g, vec![2, 2]);
        c.bundles.insert(e, k22_bundle(e, &[(0, 0), (0, 1), (1, 0), (1, 1)]));
        assert_eq!(c.is_valid_two_terminal(0, 1, &[0, 1]), Ok(true));

        // interior chord carrying a K22Part is invalid
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]);
        let mut c = Cover::empty(g, vec![1, 3, 2, 3]);
        let chord = Edge::new(1, 3);
        c.bundles.insert(chord, k22_bundle(chord, &[(0, 0), (0, 1)]));
        assert_eq!(c.is_valid_two_terminal(0, 3, &[0, 1, 2, 3]), Ok(false));
    }

    #[test]
    fn valid_generator_passes_validity() {
        // fan: path 0..4 plus chords from 0
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 2), (0, 3)]);
        let path = [0, 1, 2, 3, 4];
        for seed in 0..60 {
            let c = random_valid_two_terminal_cover(&g, 0, 4, &path, seed);
            assert_eq!(c.validate(), Ok(()));
            assert_eq!(c.is_valid_two_terminal(0, 4, &path), Ok(true), "seed {}", seed);
        }
    }
}
