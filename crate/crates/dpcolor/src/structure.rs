//! The labelled families of 3-connected K_{2,4}-minor-free graphs, their
//! maximal subdividable edge sets, and the structural decomposition of
//! 2-connected K_{2,4}-minor-free graphs into outerplanar pieces, three
//! gadgets on a 2-cut, or a 3-connected core with two-terminal outerplanar
//! gadgets on a subdividable edge set.
//!
//! Sporadic members carry fixed adjacency fixtures. Each fixture is guarded
//! by degree-sequence, connectivity and minor-freeness assertions (see the
//! tests) so a slip in the tables fails loudly.

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{complete_bipartite, complete_graph, connectivity, wheel_graph, Edge, Graph, Vertex};
use crate::iso::are_isomorphic;
use crate::minor::{has_k2t_minor, is_outerplanar};
use crate::outerplanar::{recognize, TwoTerminal};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum SporadicName {
    K5,
    K5Minus,
    K33,
    K3BoxK2,
    A,
    APlus,
    B,
    BPlus,
    C,
    CPlus,
    D,
}

pub const ALL_SPORADICS: [SporadicName; 11] = [
    SporadicName::K5,
    SporadicName::K5Minus,
    SporadicName::K33,
    SporadicName::K3BoxK2,
    SporadicName::A,
    SporadicName::APlus,
    SporadicName::B,
    SporadicName::BPlus,
    SporadicName::C,
    SporadicName::CPlus,
    SporadicName::D,
];

impl fmt::Display for SporadicName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SporadicName::K5 => "K5",
            SporadicName::K5Minus => "K5-",
            SporadicName::K33 => "K33",
            SporadicName::K3BoxK2 => "K3xK2",
            SporadicName::A => "A",
            SporadicName::APlus => "A+",
            SporadicName::B => "B",
            SporadicName::BPlus => "B+",
            SporadicName::C => "C",
            SporadicName::CPlus => "C+",
            SporadicName::D => "D",
        };
        write!(f, "{}", s)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FamilyId {
    /// W_n: rim cycle 0..n, hub n.
    Wheel(usize),
    /// G_{n,r,s} (ids 0..n are spine vertices v_1..v_n), plus the v_1 v_n
    /// edge when `plus`.
    Gnrs { n: usize, r: usize, s: usize, plus: bool },
    Sporadic(SporadicName),
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::Wheel(n) => write!(f, "W{}", n),
            FamilyId::Gnrs { n, r, s, plus } => {
                write!(f, "G{},{},{}{}", n, r, s, if *plus { "+" } else { "" })
            }
            FamilyId::Sporadic(s) => write!(f, "{}", s),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct InvalidParams;

impl fmt::Display for InvalidParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid family parameters")
    }
}

impl std::error::Error for InvalidParams {}

/// Spine construction shared by the G_{n,r,s} family and the sporadic
/// members that are G graphs with out-of-family parameters.
fn gnrs_graph(n: usize, r: usize, s: usize, plus: bool) -> Graph {
    let mut g = crate::graph::path_graph(n);
    for i in 1..=r {
        g.add_edge(0, n - 1 - i);
    }
    for j in 1..=s {
        g.add_edge(n - 1, j);
    }
    if plus {
        g.add_edge(0, n - 1);
    }
    g
}

/// Sporadic adjacency fixtures.
///
/// The seven graphs A..D are defined in the source characterization only by
/// figures; the lists below were derived by exhaustive enumeration of the
/// 3-connected K_{2,4}-minor-free graphs on at most 8 vertices (they are
/// exactly the members left over after removing wheels, the G_{n,r,s}
/// family, K_5, K_5 minus an edge, K_{3,3} and the prism), and the +
/// variants were verified to be the base graph plus one edge.
fn sporadic_graph(name: SporadicName) -> Graph {
    match name {
        SporadicName::K5 => complete_graph(5),
        // K_5 minus an edge carries the G+_{5,2,2} labelling: spine 0..4,
        // missing edge (1,3)
        SporadicName::K5Minus => gnrs_graph(5, 2, 2, true),
        SporadicName::K33 => complete_bipartite(3, 3),
        // the prism is G_{6,2,2}: spine 0..5
        SporadicName::K3BoxK2 => gnrs_graph(6, 2, 2, false),
        // A = K_{3,3} plus one edge inside a part
        SporadicName::A => {
            let mut g = complete_bipartite(3, 3);
            g.add_edge(0, 1);
            g
        }
        // A+ = A plus one edge inside the other part
        SporadicName::APlus => {
            let mut g = complete_bipartite(3, 3);
            g.add_edge(0, 1);
            g.add_edge(3, 4);
            g
        }
        SporadicName::B => Graph::from_edges(
            7,
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 6), (2, 5), (2, 6), (3, 5), (3, 6), (4, 5), (4, 6)],
        ),
        // B+ = B plus the edge (2,3)
        SporadicName::BPlus => {
            let mut g = sporadic_graph(SporadicName::B);
            g.add_edge(2, 3);
            g
        }
        SporadicName::C => Graph::from_edges(
            8,
            &[(0, 1), (0, 2), (0, 3), (1, 4), (1, 7), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6), (4, 7), (5, 7)],
        ),
        // C+ = C plus the edge (2,3)
        SporadicName::CPlus => {
            let mut g = sporadic_graph(SporadicName::C);
            g.add_edge(2, 3);
            g
        }
        SporadicName::D => Graph::from_edges(
            7,
            &[(0, 1), (0, 2), (0, 4), (0, 6), (1, 3), (1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6), (4, 6)],
        ),
    }
}

impl FamilyId {
    pub fn validate(&self) -> Result<(), InvalidParams> {
        match *self {
            FamilyId::Wheel(n) if n >= 3 => Ok(()),
            FamilyId::Gnrs { n, r, s, .. }
                if n >= 6 && (2..=n - 3).contains(&r) && (2..=n - 3).contains(&s) =>
            {
                Ok(())
            }
            FamilyId::Sporadic(_) => Ok(()),
            _ => Err(InvalidParams),
        }
    }

    /// Membership in the script-G family proper (wheels and sporadics live
    /// in their own families).
    pub fn in_script_g(&self) -> bool {
        match *self {
            FamilyId::Gnrs { n, r, s, .. } => {
                r >= 2 && s >= 3 && (r + s == n - 2 || r + s == n - 1)
            }
            _ => false,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            FamilyId::Wheel(n) => n + 1,
            FamilyId::Gnrs { n, .. } => n,
            FamilyId::Sporadic(s) => sporadic_graph(s).n(),
        }
    }
}

/// Labelled generator for every family member.
pub fn gen_family(id: FamilyId) -> Result<Graph, InvalidParams> {
    id.validate()?;
    Ok(match id {
        FamilyId::Wheel(n) => wheel_graph(n),
        FamilyId::Gnrs { n, r, s, plus } => gnrs_graph(n, r, s, plus),
        FamilyId::Sporadic(name) => sporadic_graph(name),
    })
}

/// Spine edge set of a G_{n,r,s} member (ids 0..n are v_1..v_n).
pub fn spine_edges(n: usize) -> Vec<Edge> {
    (0..n - 1).map(|i| Edge::new(i, i + 1)).collect()
}

/// Second spine v_{n-2} v_{n-3} ... v_2 v_1 v_{n-1} v_n as an edge set.
pub fn second_spine_edges(n: usize) -> Vec<Edge> {
    let mut out: Vec<Edge> = (0..n - 3).map(|i| Edge::new(i, i + 1)).collect();
    out.push(Edge::new(0, n - 2));
    out.push(Edge::new(n - 2, n - 1));
    out
}

/// The spine-reversal relabelling v_i -> v_{n+1-i}, an isomorphism between
/// G_{n,r,s} and G_{n,s,r}.
fn spine_reversal(n: usize) -> Vec<Vertex> {
    (0..n).map(|i| n - 1 - i).collect()
}

fn map_sets(sets: Vec<Vec<Edge>>, perm: &[Vertex]) -> Vec<Vec<Edge>> {
    sets.into_iter()
        .map(|s| {
            let mut t: Vec<Edge> = s.iter().map(|e| Edge::new(perm[e.u], perm[e.v])).collect();
            t.sort();
            t
        })
        .collect()
}

/// Maximal subdividable edge sets, one representative per automorphism
/// orbit, in the fixture labelling of `gen_family`.
///
/// Wheels, the G family, K_5 and the extra G_{7,2,3} set follow the source
/// characterization directly. The remaining tables (the W_4 extras, K_5
/// minus an edge, the prism, K_{3,3} and A..D) are figure-only in the
/// source and were frozen from the brute-force oracle; the acceptance suite
/// re-derives every one of them.
pub fn known_subdividable_sets(id: FamilyId) -> Result<Vec<Vec<Edge>>, InvalidParams> {
    id.validate()?;
    let sorted = |mut v: Vec<Edge>| {
        v.sort();
        v
    };
    Ok(match id {
        FamilyId::Wheel(n) => {
            // rim plus one spoke; W_4 has two extra maximal sets
            let mut rim_spoke: Vec<Edge> = (0..n).map(|i| Edge::new(i, (i + 1) % n)).collect();
            rim_spoke.push(Edge::new(0, n));
            let mut sets = vec![sorted(rim_spoke)];
            if n == 4 {
                // the two extra W_4 sets, frozen from the oracle: two rim
                // edges at one vertex plus two opposite spokes, and two
                // opposite rim edges plus two opposite spokes
                sets.push(sorted(vec![
                    Edge::new(0, 1),
                    Edge::new(0, 3),
                    Edge::new(0, 4),
                    Edge::new(2, 4),
                ]));
                sets.push(sorted(vec![
                    Edge::new(0, 1),
                    Edge::new(0, 4),
                    Edge::new(2, 3),
                    Edge::new(2, 4),
                ]));
            }
            sets
        }
        FamilyId::Gnrs { n, r, s, plus } => {
            if r > s {
                // mirror of the r <= s answer through the spine reversal
                let mirrored = known_subdividable_sets(FamilyId::Gnrs {
                    n,
                    r: s,
                    s: r,
                    plus,
                })?;
                return Ok(map_sets(mirrored, &spine_reversal(n)));
            }
            let mut sets = vec![sorted(spine_edges(n))];
            let second = (!plus && r == 2 && s == n - 3 && n >= 6)
                || (plus && r == 2 && s == n - 4 && n >= 7);
            if second {
                sets.push(sorted(second_spine_edges(n)));
            }
            if !plus && (n, r, s) == (7, 2, 3) {
                sets.push(sorted(vec![
                    Edge::new(0, 1),
                    Edge::new(3, 4),
                    Edge::new(5, 6),
                    Edge::new(2, 6),
                ]));
            }
            sets
        }
        FamilyId::Sporadic(name) => sporadic_sets(name),
    })
}

/// Frozen oracle output for the figure-only tables.
fn sporadic_sets(name: SporadicName) -> Vec<Vec<Edge>> {
    let e = Edge::new;
    match name {
        SporadicName::K5 => vec![],
        SporadicName::K5Minus => vec![
            vec![e(0, 1), e(0, 3), e(1, 2), e(1, 4)],
            vec![e(0, 1), e(0, 3), e(1, 2), e(3, 4)],
        ],
        // a star from one vertex into the whole other part
        SporadicName::K33 => vec![vec![e(0, 3), e(0, 4), e(0, 5)]],
        // a hamiltonian path: 2-3-0-1-5-4 in the G_{6,2,2} labelling
        SporadicName::K3BoxK2 => vec![vec![e(0, 1), e(0, 3), e(1, 5), e(2, 3), e(4, 5)]],
        // the star at the part-1 vertex left out of the added edge
        SporadicName::A => vec![vec![e(2, 3), e(2, 4), e(2, 5)]],
        // the edge between the two vertices untouched by both added edges
        SporadicName::APlus => vec![vec![e(2, 5)]],
        SporadicName::B => vec![vec![e(0, 1), e(4, 5)]],
        SporadicName::BPlus => vec![vec![e(0, 1), e(4, 5)]],
        SporadicName::C => vec![vec![e(0, 1), e(4, 6), e(5, 7)]],
        SporadicName::CPlus => vec![vec![e(0, 1), e(4, 6), e(5, 7)]],
        SporadicName::D => vec![vec![e(0, 1), e(0, 4), e(2, 5), e(3, 6)]],
    }
}

/// All family members with at most `n_max` vertices (labelled; the list may
/// contain isomorphic repeats such as G_{n,r,s} vs G_{n,s,r}).
pub fn family_members_up_to(n_max: usize) -> Vec<FamilyId> {
    let mut out = Vec::new();
    for n in 3..n_max {
        out.push(FamilyId::Wheel(n)); // W_n has n+1 vertices
    }
    for n in 6..=n_max {
        for r in 2..=(n - 3) {
            for s in 3..=(n - 3) {
                if r + s == n - 2 || r + s == n - 1 {
                    for plus in [false, true] {
                        out.push(FamilyId::Gnrs { n, r, s, plus });
                    }
                }
            }
        }
    }
    for name in ALL_SPORADICS {
        let id = FamilyId::Sporadic(name);
        if id.vertex_count() <= n_max {
            out.push(id);
        }
    }
    out
}

/// Structural match of a 3-connected graph against the three families.
/// Returns the family id plus the label transfer (fixture vertex ->
/// input vertex).
pub fn classify_core(g: &Graph) -> Option<(FamilyId, Vec<Vertex>)> {
    let n = g.n();
    let mut candidates: Vec<FamilyId> = Vec::new();
    if n >= 4 {
        candidates.push(FamilyId::Wheel(n - 1));
    }
    if n >= 6 {
        for r in 2..=(n - 3) {
            for s in 3..=(n - 3) {
                if r + s == n - 2 || r + s == n - 1 {
                    for plus in [false, true] {
                        candidates.push(FamilyId::Gnrs { n, r, s, plus });
                    }
                }
            }
        }
    }
    for name in ALL_SPORADICS {
        let id = FamilyId::Sporadic(name);
        if id.vertex_count() == n {
            candidates.push(id);
        }
    }
    for id in candidates {
        let fixture = gen_family(id).unwrap();
        if let Ok(Some(map)) = are_isomorphic(&fixture, g) {
            return Some((id, map));
        }
    }
    None
}

/// A two-terminal outerplanar gadget carved out of a larger graph; the
/// gadget graph is relabelled, `to_global[i]` is the original id of i.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub tt: TwoTerminal,
    pub to_global: Vec<Vertex>,
}

impl Gadget {
    pub fn x_global(&self) -> Vertex {
        self.to_global[self.tt.x]
    }
    pub fn y_global(&self) -> Vertex {
        self.to_global[self.tt.y]
    }
}

/// Structural witness for a 2-connected K_{2,4}-minor-free graph.
#[derive(Clone, Debug)]
pub enum Decomposition {
    /// The graph is outerplanar: it is the broken gadget plus the edge xy.
    Outerplanar { x: Vertex, y: Vertex, gadget: Gadget },
    /// Union of three broken x-y-outerplanar parts, possibly plus xy.
    ThreeGadget {
        x: Vertex,
        y: Vertex,
        parts: Vec<Gadget>,
        has_xy: bool,
    },
    /// A 3-connected core with gadgets replacing a subdividable edge set.
    CoreGadgets {
        /// Core on original vertex ids (as a relabelled graph plus map).
        core: Graph,
        core_to_global: Vec<Vertex>,
        family: FamilyId,
        /// Fixture vertex -> core vertex (local ids).
        fixture_map: Vec<Vertex>,
        /// Subdividable edges in core-local ids, with their gadgets.
        subdivided: Vec<(Edge, Gadget)>,
    },
}

/// Decomposes a 2-connected K_{2,4}-minor-free graph per the structure
/// theorem; returns None exactly when the graph has a K_{2,4} minor.
pub fn decompose(g: &Graph) -> Option<Decomposition> {
    assert!(connectivity(g) >= 2, "decompose needs a 2-connected input");
    let n = g.n();
    // case 1: outerplanar
    if is_outerplanar(g) {
        // split along an outer edge whose ends have the largest degree
        let tt_best = best_outer_split(g)?;
        return Some(Decomposition::Outerplanar {
            x: tt_best.to_global[tt_best.tt.x],
            y: tt_best.to_global[tt_best.tt.y],
            gadget: tt_best,
        });
    }
    // case 2: some 2-cut with three parts
    for x in 0..n {
        for y in (x + 1)..n {
            let allowed = full_mask(n) & !(1 << x) & !(1 << y);
            let comps = g.components_in(allowed);
            if comps.len() > 3 {
                // four bridges between a 2-cut force a K_{2,4} minor
                return None;
            }
            if comps.len() == 3 {
                let parts: Option<Vec<Gadget>> = comps
                    .into_iter()
                    .map(|comp| carve_gadget(g, x, y, comp, false))
                    .collect();
                if let Some(parts) = parts {
                    return Some(Decomposition::ThreeGadget {
                        x,
                        y,
                        parts,
                        has_xy: g.has_edge(x, y),
                    });
                }
            }
        }
    }
    // case 3: absorb two-terminal outerplanar attachments into virtual
    // edges until the remainder is 3-connected, then classify the core.
    decompose_core(g)
}

fn full_mask(n: usize) -> u32 {
    (1u32 << n) - 1
}

/// Extracts the subgraph on `comp` + terminals as a broken gadget; the xy
/// edge, when present in g, is never part of a bridge gadget.
fn carve_gadget(g: &Graph, x: Vertex, y: Vertex, comp: u32, keep_xy: bool) -> Option<Gadget> {
    let mut verts: Vec<Vertex> = vec![x, y];
    verts.extend((0..g.n()).filter(|&v| comp & (1 << v) != 0));
    verts.sort_unstable();
    let mut sub = g.induced(&verts);
    let xi = verts.iter().position(|&v| v == x).unwrap();
    let yi = verts.iter().position(|&v| v == y).unwrap();
    if !keep_xy && sub.has_edge(xi, yi) {
        sub.remove_edge(xi, yi);
    }
    let tt = recognize(&sub, xi, yi)?;
    Some(Gadget {
        tt,
        to_global: verts,
    })
}

/// Case-1 split: the whole outerplanar graph minus one outer-cycle edge,
/// chosen to put the largest degree at a terminal (the assembly argument
/// wants |L(x)| = 5 whenever some degree exceeds 5).
fn best_outer_split(g: &Graph) -> Option<Gadget> {
    let verts: Vec<Vertex> = g.vertices().collect();
    let mut best: Option<(i64, Gadget)> = None;
    for e in g.edges() {
        let mut h = g.clone();
        h.remove_edge(e.u, e.v);
        if let Some(tt) = recognize(&h, e.u, e.v) {
            let score = (g.degree(e.u).max(g.degree(e.v)) as i64) * 100
                - (e.u as i64) * 10
                - e.v as i64;
            let gadget = Gadget {
                tt,
                to_global: verts.clone(),
            };
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, gadget));
            }
        }
    }
    best.map(|(_, g)| g)
}

fn decompose_core(g: &Graph) -> Option<Decomposition> {
    // working graph on original ids, with absorbed vertices masked out
    let mut alive: Vec<Vertex> = g.vertices().collect();
    let mut work = g.clone();
    let mut virtual_edges: BTreeSet<Edge> = BTreeSet::new();
    let mut gadgets: Vec<(Edge, Gadget)> = Vec::new(); // edge in original ids

    loop {
        if connectivity(&work) >= 3 {
            break;
        }
        // candidate absorptions: 2-cuts with a recognizable side
        let wn = work.n();
        let mut candidates: Vec<(usize, Vertex, Vertex, u32)> = Vec::new();
        for x in 0..wn {
            for y in (x + 1)..wn {
                let allowed = full_mask(wn) & !(1 << x) & !(1 << y);
                let comps = work.components_in(allowed);
                if comps.len() != 2 {
                    continue;
                }
                for comp in comps {
                    candidates.push((comp.count_ones() as usize, x, y, comp));
                }
            }
        }
        // biggest side first, ties by smallest terminals
        candidates.sort_by_key(|&(size, x, y, _)| (std::cmp::Reverse(size), x, y));
        let mut absorbed = false;
        for (_, x, y, comp) in candidates {
            // sides must be real subgraphs: no virtual edge inside
            let comp_globals: Vec<Vertex> = (0..wn)
                .filter(|&v| comp & (1 << v) != 0)
                .map(|v| alive[v])
                .collect();
            let side_has_virtual = virtual_edges.iter().any(|e| {
                let both_in = |v: Vertex| {
                    comp_globals.contains(&v) || v == alive[x] || v == alive[y]
                };
                both_in(e.u) && both_in(e.v)
            });
            if side_has_virtual {
                // the side is not a real subgraph of the input
                continue;
            }
            let keep_xy = work.has_edge(x, y) && !virtual_edges.contains(&Edge::new(alive[x], alive[y]));
            // carve in original-id space
            let g_x = alive[x];
            let g_y = alive[y];
            let comp_mask_globals: Vec<Vertex> = comp_globals.clone();
            let mut verts: Vec<Vertex> = vec![g_x, g_y];
            verts.extend(comp_mask_globals.iter().copied());
            verts.sort_unstable();
            let mut sub = g.induced(&verts);
            let xi = verts.iter().position(|&v| v == g_x).unwrap();
            let yi = verts.iter().position(|&v| v == g_y).unwrap();
            if !keep_xy && sub.has_edge(xi, yi) {
                // broken gadget: the xy edge stays outside the gadget
                sub.remove_edge(xi, yi);
            }
            let tt = match recognize(&sub, xi, yi) {
                Some(tt) => tt,
                None => continue,
            };
            let gadget = Gadget {
                tt,
                to_global: verts,
            };
            // contract the side into a virtual edge
            let keep: Vec<Vertex> = (0..wn)
                .filter(|&v| comp & (1 << v) == 0)
                .collect();
            let keep_globals: Vec<Vertex> = keep.iter().map(|&v| alive[v]).collect();
            let mut new_work = work.induced(&keep);
            let nx = keep.iter().position(|&v| v == x).unwrap();
            let ny = keep.iter().position(|&v| v == y).unwrap();
            if !new_work.has_edge(nx, ny) {
                new_work.add_edge(nx, ny);
            }
            virtual_edges.insert(Edge::new(g_x, g_y));
            gadgets.push((Edge::new(g_x, g_y), gadget));
            work = new_work;
            alive = keep_globals;
            absorbed = true;
            break;
        }
        if !absorbed {
            return None; // structure theorem would have given us a side
        }
        if work.n() < 4 {
            return None;
        }
    }
    // classify the 3-connected core and check the virtual edges form a
    // subdividable set
    if has_k2t_minor(&work, 4) {
        return None;
    }
    let (family, fixture_map) = classify_core(&work)?;
    let fixture = gen_family(family).unwrap();
    // F in core-local ids
    let fset_local: Vec<Edge> = virtual_edges
        .iter()
        .filter_map(|e| {
            let a = local_id(&alive, e.u)?;
            let b = local_id(&alive, e.v)?;
            Some(Edge::new(a, b))
        })
        .collect();
    if fset_local.len() != virtual_edges.len() {
        return None;
    }
    // transfer F to fixture coordinates and test containment in a maximal
    // set expanded under the automorphisms
    let mut inv = vec![0usize; fixture.n()];
    for (fv, &gv) in fixture_map.iter().enumerate() {
        inv[gv] = fv;
    }
    let f_fixture: BTreeSet<Edge> = fset_local
        .iter()
        .map(|e| Edge::new(inv[e.u], inv[e.v]))
        .collect();
    let reps = known_subdividable_sets(family).unwrap();
    let closure = crate::oracle::orbit_closure(&fixture, &reps);
    let contained = f_fixture.is_empty()
        || closure.iter().any(|s| f_fixture.iter().all(|e| s.contains(e)));
    if !contained {
        return None;
    }
    let subdivided = gadgets
        .into_iter()
        .map(|(e_glob, gadget)| {
            let a = local_id(&alive, e_glob.u).unwrap();
            let b = local_id(&alive, e_glob.v).unwrap();
            (Edge::new(a, b), gadget)
        })
        .collect();
    Some(Decomposition::CoreGadgets {
        core: work,
        core_to_global: alive,
        family,
        fixture_map,
        subdivided,
    })
}

fn local_id(alive: &[Vertex], global: Vertex) -> Option<usize> {
    alive.iter().position(|&v| v == global)
}

/// Rebuilds the original graph from a decomposition (used as a soundness
/// check: the result must equal the input).
pub fn reassemble(d: &Decomposition, n: usize) -> Graph {
    let mut g = Graph::new(n);
    match d {
        Decomposition::Outerplanar { x, y, gadget } => {
            for e in gadget.tt.graph.edges() {
                g.add_edge(gadget.to_global[e.u], gadget.to_global[e.v]);
            }
            g.add_edge(*x, *y);
        }
        Decomposition::ThreeGadget { x, y, parts, has_xy } => {
            for p in parts {
                for e in p.tt.graph.edges() {
                    g.add_edge(p.to_global[e.u], p.to_global[e.v]);
                }
            }
            if *has_xy {
                g.add_edge(*x, *y);
            }
        }
        Decomposition::CoreGadgets {
            core,
            core_to_global,
            subdivided,
            ..
        } => {
            let fset: BTreeSet<Edge> = subdivided.iter().map(|(e, _)| *e).collect();
            for e in core.edges() {
                if !fset.contains(&e) {
                    g.add_edge(core_to_global[e.u], core_to_global[e.v]);
                }
            }
            for (_, gadget) in subdivided {
                for e in gadget.tt.graph.edges() {
                    g.add_edge(gadget.to_global[e.u], gadget.to_global[e.v]);
                }
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::connectivity;
    use crate::minor::has_k2t_minor;
    use crate::oracle::{maximal_subdividable_sets, orbit_closure, reduce_up_to_automorphism};

    #[test]
    fn fixtures_are_three_connected_and_minor_free() {
        for name in ALL_SPORADICS {
            let g = sporadic_graph(name);
            assert_eq!(connectivity(&g), 3, "{} must be 3-connected", name);
            assert!(!has_k2t_minor(&g, 4), "{} must be K24-minor-free", name);
        }
    }

    #[test]
    fn fixture_degree_sequences() {
        let expect: Vec<(SporadicName, Vec<usize>)> = vec![
            (SporadicName::K5, vec![4, 4, 4, 4, 4]),
            (SporadicName::K5Minus, vec![3, 3, 4, 4, 4]),
            (SporadicName::K33, vec![3, 3, 3, 3, 3, 3]),
            (SporadicName::K3BoxK2, vec![3, 3, 3, 3, 3, 3]),
            (SporadicName::A, vec![3, 3, 3, 3, 4, 4]),
            (SporadicName::APlus, vec![3, 3, 4, 4, 4, 4]),
            (SporadicName::B, vec![3, 3, 3, 3, 3, 3, 4]),
            (SporadicName::BPlus, vec![3, 3, 3, 3, 4, 4, 4]),
            (SporadicName::C, vec![3, 3, 3, 3, 3, 3, 3, 3]),
            (SporadicName::CPlus, vec![3, 3, 3, 3, 3, 3, 4, 4]),
            (SporadicName::D, vec![3, 3, 3, 3, 4, 4, 4]),
        ];
        for (name, want) in expect {
            let g = sporadic_graph(name);
            let mut degs: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
            degs.sort_unstable();
            assert_eq!(degs, want, "degree sequence of {}", name);
        }
    }

    #[test]
    fn plus_variants_add_one_edge() {
        for (base, plus) in [
            (SporadicName::A, SporadicName::APlus),
            (SporadicName::B, SporadicName::BPlus),
            (SporadicName::C, SporadicName::CPlus),
        ] {
            let b = sporadic_graph(base);
            let p = sporadic_graph(plus);
            assert_eq!(b.edge_count() + 1, p.edge_count());
        }
    }

    #[test]
    fn gen_family_examples() {
        let w4 = gen_family(FamilyId::Wheel(4)).unwrap();
        assert_eq!(w4.n(), 5);
        assert_eq!(w4.degree(4), 4); // hub
        let g824 = gen_family(FamilyId::Gnrs { n: 8, r: 2, s: 4, plus: false }).unwrap();
        assert!(g824.has_edge(0, 6) && g824.has_edge(0, 5)); // v1 v7, v1 v6
        for j in 1..=4 {
            assert!(g824.has_edge(7, j)); // v8 v_{1+j}
        }
        let k5m = gen_family(FamilyId::Sporadic(SporadicName::K5Minus)).unwrap();
        assert_eq!(k5m.edge_count(), 9);
        assert!(gen_family(FamilyId::Gnrs { n: 5, r: 2, s: 2, plus: false }).is_err());
    }

    #[test]
    fn tables_match_oracle_for_small_members() {
        // the full check is acceptance criterion 4; this covers a few
        // members cheaply
        for id in [
            FamilyId::Wheel(3),
            FamilyId::Wheel(4),
            FamilyId::Sporadic(SporadicName::K5),
            FamilyId::Sporadic(SporadicName::K33),
            FamilyId::Sporadic(SporadicName::APlus),
        ] {
            let g = gen_family(id).unwrap();
            let raw = maximal_subdividable_sets(&g).unwrap();
            let oracle_reps = reduce_up_to_automorphism(&g, &raw);
            let known = known_subdividable_sets(id).unwrap();
            assert_eq!(
                orbit_closure(&g, &oracle_reps),
                orbit_closure(&g, &known),
                "subdividable tables disagree for {}",
                id
            );
        }
    }

    #[test]
    fn classify_core_examples() {
        let (id, _) = classify_core(&wheel_graph(5)).unwrap();
        assert_eq!(id, FamilyId::Wheel(5));
        let (id, _) = classify_core(&complete_bipartite(3, 3)).unwrap();
        assert_eq!(id, FamilyId::Sporadic(SporadicName::K33));
        let (id, map) = classify_core(&complete_graph(4)).unwrap();
        assert_eq!(id, FamilyId::Wheel(3));
        assert_eq!(map.len(), 4);
        // the 3-cube has a K_{2,4} minor and is outside every family
        let cube = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        );
        assert!(classify_core(&cube).is_none());
        // relabelled G_{7,2,3} still classifies
        let g = gen_family(FamilyId::Gnrs { n: 7, r: 2, s: 3, plus: false }).unwrap();
        let perm = vec![3, 1, 4, 0, 6, 2, 5];
        let h = g.relabel(&perm);
        let (id, map) = classify_core(&h).unwrap();
        assert!(id.in_script_g());
        let fixture = gen_family(id).unwrap();
        for e in fixture.edges() {
            assert!(h.has_edge(map[e.u], map[e.v]));
        }
    }

    #[test]
    fn decompose_outerplanar_case() {
        // maximal outerplanar fan on 6 vertices
        let g = Graph::from_edges(
            6,
            &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 2), (0, 3), (0, 4), (0, 5)],
        );
        match decompose(&g).unwrap() {
            Decomposition::Outerplanar { x, y, gadget } => {
                assert!(g.has_edge(x, y));
                assert!(gadget.tt.broken);
                assert_eq!(reassemble(&decompose(&g).unwrap(), 6), g);
            }
            other => panic!("expected outerplanar case, got {:?}", other),
        }
    }

    #[test]
    fn decompose_theta_graph() {
        // three internally disjoint 0-1 paths of length 3
        let g = Graph::from_edges(
            8,
            &[(0, 2), (2, 3), (3, 1), (0, 4), (4, 5), (5, 1), (0, 6), (6, 7), (7, 1)],
        );
        match decompose(&g).unwrap() {
            Decomposition::ThreeGadget { x, y, parts, has_xy } => {
                assert_eq!((x, y), (0, 1));
                assert!(!has_xy);
                assert_eq!(parts.len(), 3);
                for p in &parts {
                    assert!(p.tt.broken);
                    assert_eq!(p.tt.graph.n(), 4);
                }
                assert_eq!(reassemble(&decompose(&g).unwrap(), 8), g);
            }
            other => panic!("expected three gadgets, got {:?}", other),
        }
    }

    #[test]
    fn decompose_wheel_with_fan_gadget() {
        // W_4 with rim edge (0,1) replaced by a path through 5, 6 plus the
        // chord (0,6): a two-terminal outerplanar gadget
        let mut g = wheel_graph(4);
        g.remove_edge(0, 1);
        let mut h = Graph::new(7);
        for e in g.edges() {
            h.add_edge(e.u, e.v);
        }
        h.add_edge(0, 5);
        h.add_edge(5, 6);
        h.add_edge(6, 1);
        h.add_edge(0, 6);
        assert!(!has_k2t_minor(&h, 4));
        match decompose(&h).unwrap() {
            Decomposition::CoreGadgets { family, subdivided, core, .. } => {
                assert_eq!(family, FamilyId::Wheel(4));
                assert_eq!(subdivided.len(), 1);
                assert_eq!(core.n(), 5);
                assert!(subdivided[0].1.tt.broken);
                assert_eq!(reassemble(&decompose(&h).unwrap(), 7), h);
            }
            other => panic!("expected core+gadgets, got {:?}", other),
        }
    }

    #[test]
    fn decompose_rejects_minor_positive_inputs() {
        let cube = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
        );
        assert!(decompose(&cube).is_none());
        assert!(decompose(&complete_bipartite(2, 4)).is_none());
    }

    #[test]
    fn three_connected_members_decompose_to_themselves() {
        for id in [
            FamilyId::Wheel(4),
            FamilyId::Sporadic(SporadicName::D),
            FamilyId::Gnrs { n: 7, r: 2, s: 3, plus: true },
        ] {
            let g = gen_family(id).unwrap();
            match decompose(&g).unwrap() {
                Decomposition::CoreGadgets { family, subdivided, .. } => {
                    assert_eq!(family, id);
                    assert!(subdivided.is_empty());
                }
                other => panic!("{} should be its own core, got {:?}", id, other),
            }
        }
    }
}
