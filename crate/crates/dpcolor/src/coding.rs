//! The coding engine.
//!
//! A valid cover of a broken x-y-outerplanar gadget is reduced one interior
//! degree-2 vertex at a time. Each step forms the star product of the two
//! bundles at the removed vertex, merges it with the chord bundle when the
//! bypass edge already exists, and in the tight-list subcases deletes the
//! star-touched nodes from one side instead. The final K_2 bundle is the
//! coding: a K_{2,2}-shaped conflict summary between the terminal lists
//! whose non-links are guaranteed extendable, with the extension replayable
//! from the recorded steps.
//!
//! Shape and validity assertions fire on every step; a failure is a bug
//! detector, not a recoverable condition.

use std::collections::BTreeSet;
use std::fmt;

use crate::cover::{BundleKind, Colouring, Cover, LinkBundle, NodeRef};
use crate::graph::{Edge, Vertex};
use crate::outerplanar::{interior_degree2_vertex, reduce_step, TwoTerminal};

#[derive(Clone, Debug)]
pub enum CodingError {
    /// A star product violated its case-predicted shape.
    ShapeViolation(String),
    /// A reduced cover stopped being valid for its gadget.
    ValidityLost(String),
    /// Replay found no admissible node for the removed vertex.
    NoAdmissibleNode,
}

impl fmt::Display for CodingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodingError::ShapeViolation(s) => write!(f, "shape violation: {}", s),
            CodingError::ValidityLost(s) => write!(f, "validity lost: {}", s),
            CodingError::NoAdmissibleNode => write!(f, "no admissible node during replay"),
        }
    }
}

impl std::error::Error for CodingError {}

/// Conflict summary between the terminal lists, in the index space of the
/// original cover. Non-links always extend to full colourings; links may or
/// may not (the coding over-approximates conflicts).
#[derive(Clone, Debug)]
pub struct Coding {
    pub x: Vertex,
    pub y: Vertex,
    pub x_list: usize,
    pub y_list: usize,
    pub links: Vec<(usize, usize)>,
    pub lambda_x: u32,
    pub lambda_y: u32,
}

impl Coding {
    pub fn has_link(&self, a: usize, b: usize) -> bool {
        self.links.contains(&(a, b))
    }

    /// Shape-λ of a K_{2,2}-subgraph link set at one side, Def-2.2 style.
    pub fn shape_lambda(links: &[(usize, usize)], at_x: bool) -> u32 {
        let max_deg_x = max_side_degree(links, true);
        let max_deg_y = max_side_degree(links, false);
        if max_deg_x <= 1 && max_deg_y <= 1 {
            return 1;
        }
        if links.len() == 2 {
            let (a, b) = (links[0], links[1]);
            if at_x && a.0 == b.0 {
                return 1;
            }
            if !at_x && a.1 == b.1 {
                return 1;
            }
        }
        2
    }
}

fn max_side_degree(links: &[(usize, usize)], x_side: bool) -> usize {
    let mut best = 0;
    for &(a, b) in links {
        let k = links
            .iter()
            .filter(|&&(c, d)| if x_side { c == a } else { d == b })
            .count();
        best = best.max(k);
        let _ = if x_side { b } else { a };
    }
    best
}

/// One reduction step, recorded in the coordinates of its input cover.
#[derive(Clone, Debug)]
pub struct ReplayStep {
    pub u: Vertex,
    pub u1: Vertex,
    pub u2: Vertex,
    pub lu: usize,
    /// per index of L(u1): conflict mask over L(u) through the u1-u bundle
    pub nbr_u1: Vec<u32>,
    /// per index of L(u2): conflict mask over L(u) through the u-u2 bundle
    pub nbr_u2: Vec<u32>,
    /// input vertex -> output vertex (None for u)
    pub vmap: Vec<Option<Vertex>>,
    /// per input vertex: output node index -> input node index
    pub node_new_to_old: Vec<Vec<usize>>,
}

/// The full reduction history plus the terminal index maps needed to enter
/// the replay at the reduced end.
#[derive(Clone, Debug)]
pub struct ReplayStack {
    pub steps: Vec<ReplayStep>,
    pub original: Cover,
    /// original x/y list index -> final index (None when deleted)
    pub x_map: Vec<Option<usize>>,
    pub y_map: Vec<Option<usize>>,
    pub x: Vertex,
    pub y: Vertex,
}

/// Star product of the two bundles at the removed middle vertex: the pairs
/// (a, b) whose joint conflict neighbourhood covers all of L(u).
pub fn star_product(nbr_u1: &[u32], nbr_u2: &[u32], lu: usize) -> Vec<(usize, usize)> {
    let full = if lu >= 32 { !0u32 } else { (1u32 << lu) - 1 };
    let mut out = Vec::new();
    for (a, &ma) in nbr_u1.iter().enumerate() {
        for (b, &mb) in nbr_u2.iter().enumerate() {
            if ma | mb == full {
                out.push((a, b));
            }
        }
    }
    out
}

/// The case split of the reduction, by the λ-weights of the two bundles at
/// their outer endpoints.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StarCase {
    /// both λ = 1: the star is a matching of at most 2 links
    BothLight,
    /// λ(u1) = 1, λ(u2) >= 2: at most 2 links, any degree-2 node on the
    /// u1 side
    HeavyAt2,
    /// λ(u1) >= 2, λ(u2) = 1: mirrored
    HeavyAt1,
    /// both >= 2: any subgraph of K_{2,2}
    BothHeavy,
}

/// Verifies the case-predicted shape of a star product. Returns the case
/// tag used to build the merged bundle.
pub fn classify_star(
    links: &[(usize, usize)],
    lambda1: u32,
    lambda2: u32,
) -> Result<StarCase, CodingError> {
    let case = match (lambda1 >= 2, lambda2 >= 2) {
        (false, false) => StarCase::BothLight,
        (false, true) => StarCase::HeavyAt2,
        (true, false) => StarCase::HeavyAt1,
        (true, true) => StarCase::BothHeavy,
    };
    let matching = is_matching(links);
    let d1 = max_side_degree(links, true);
    let d2 = max_side_degree(links, false);
    let fits = |ok: bool, msg: &str| {
        if ok {
            Ok(case)
        } else {
            Err(CodingError::ShapeViolation(format!(
                "{} (links {:?}, λ = {}/{})",
                msg, links, lambda1, lambda2
            )))
        }
    };
    match case {
        StarCase::BothLight => fits(matching && links.len() <= 2, "case 1 wants a matching of <= 2 links"),
        StarCase::HeavyAt2 => fits(
            links.len() <= 2 && d2 <= 1,
            "case 2 wants <= 2 links with any degree-2 node at u1",
        ),
        StarCase::HeavyAt1 => fits(
            links.len() <= 2 && d1 <= 1,
            "case 2' wants <= 2 links with any degree-2 node at u2",
        ),
        StarCase::BothHeavy => fits(
            fits_k22_links(links),
            "case 3 wants a subgraph of K_{2,2}",
        ),
    }
}

fn is_matching(links: &[(usize, usize)]) -> bool {
    max_side_degree(links, true) <= 1 && max_side_degree(links, false) <= 1
}

fn fits_k22_links(links: &[(usize, usize)]) -> bool {
    let us: BTreeSet<usize> = links.iter().map(|l| l.0).collect();
    let vs: BTreeSet<usize> = links.iter().map(|l| l.1).collect();
    us.len() <= 2 && vs.len() <= 2
}

/// Outcome of one `reduce_cover` application.
pub struct Reduction {
    pub t: TwoTerminal,
    pub cover: Cover,
    pub step: ReplayStep,
}

fn bundle_links_oriented(b: &LinkBundle, first: Vertex) -> Vec<(usize, usize)> {
    // links as (index at `first`, index at other end)
    if first == b.edge.u {
        b.links().collect()
    } else {
        b.links().map(|(p, q)| (q, p)).collect()
    }
}

fn neighbour_masks(c: &Cover, from: Vertex, to: Vertex) -> Vec<u32> {
    (0..c.list_sizes[from])
        .map(|i| c.link_mask(from, i, to))
        .collect()
}

/// Removes the interior degree-2 vertex `u`, merging the star product into
/// the bypass edge per the case split. Panics never; invariant breaches
/// surface as errors.
pub fn reduce_cover(t: &TwoTerminal, c: &Cover, u: Vertex) -> Result<Reduction, CodingError> {
    let gstep = reduce_step(t, u);
    let (u1, u2) = (gstep.u1, gstep.u2);
    let lu = c.list_sizes[u];
    let b1 = c.bundle(Edge::new(u1, u));
    let b2 = c.bundle(Edge::new(u, u2));
    let lambda1 = b1.lambda(u1);
    let lambda2 = b2.lambda(u2);
    // conflict masks over L(u), and the star product
    let nbr_u1 = neighbour_masks(c, u1, u);
    let nbr_u2 = neighbour_masks(c, u2, u);
    let mstar = star_product(&nbr_u1, &nbr_u2, lu);
    let case = classify_star(&mstar, lambda1, lambda2)?;

    // cover on the reduced graph, without the bypass bundle yet
    let new_id = |v: Vertex| gstep.vmap[v].unwrap();
    let reduced_graph = gstep.reduced.graph.clone();
    let mut list_sizes = vec![0usize; reduced_graph.n()];
    for v in c.graph.vertices() {
        if let Some(nv) = gstep.vmap[v] {
            list_sizes[nv] = c.list_sizes[v];
        }
    }
    let mut bundles = std::collections::BTreeMap::new();
    for (e, b) in &c.bundles {
        if e.touches(u) {
            continue;
        }
        let (na, nb) = (new_id(e.u), new_id(e.v));
        let ne = Edge::new(na, nb);
        let flip = na > nb;
        let conv = |links: &[(usize, usize)]| -> Vec<(usize, usize)> {
            links.iter().map(|&(p, q)| if flip { (q, p) } else { (p, q) }).collect()
        };
        bundles.insert(
            ne,
            LinkBundle::new(ne, b.kind, conv(&b.matching_links), conv(&b.k22_links)),
        );
    }
    // merged bundle on the bypass edge, links oriented (u1, u2)
    let ne = Edge::new(new_id(u1), new_id(u2));
    let orient = |links: Vec<(usize, usize)>| -> Vec<(usize, usize)> {
        if new_id(u1) == ne.u {
            links
        } else {
            links.into_iter().map(|(p, q)| (q, p)).collect()
        }
    };
    let chord_links: Vec<(usize, usize)> = if gstep.edge_existed {
        let cb = c.bundle(Edge::new(u1, u2));
        if cb.kind != BundleKind::Matching {
            return Err(CodingError::ValidityLost(
                "bypass chord carries a non-matching bundle".into(),
            ));
        }
        bundle_links_oriented(cb, u1)
    } else {
        vec![]
    };
    let star_extra: Vec<(usize, usize)> = mstar
        .iter()
        .copied()
        .filter(|l| !chord_links.contains(l))
        .collect();
    let merged = LinkBundle::reclassified(ne, orient(chord_links.clone()), orient(star_extra));
    bundles.insert(ne, merged);
    let mut cover = Cover {
        graph: reduced_graph,
        list_sizes,
        bundles,
    };

    // per-vertex node maps, identity unless the tight subcases delete nodes
    let mut node_new_to_old: Vec<Vec<usize>> =
        c.list_sizes.iter().map(|&s| (0..s).collect()).collect();
    let mut final_t = gstep.reduced.clone();

    let valid = |cv: &Cover, tt: &TwoTerminal| -> bool {
        cv.is_valid_two_terminal(tt.x, tt.y, &tt.outer_path) == Ok(true)
    };

    if gstep.edge_existed && !mstar.is_empty() {
        // tight subcases: when a side's list has at most 4 nodes the proof
        // deletes the star-touched nodes there instead of keeping the union
        let terminals = [t.x, t.y];
        let mandated: Vec<Vertex> = match case {
            StarCase::BothLight => vec![],
            StarCase::HeavyAt2 => vec![u2],
            StarCase::HeavyAt1 => vec![u1],
            StarCase::BothHeavy => {
                let mut sides = vec![u1, u2];
                // smaller list first, ties toward the later path vertex u2
                sides.sort_by_key(|&s| (c.list_sizes[s], if s == u2 { 0 } else { 1 }));
                sides
            }
        };
        let needs_deletion = mandated
            .first()
            .is_some_and(|_| match case {
                StarCase::HeavyAt2 => c.list_sizes[u2] <= 4,
                StarCase::HeavyAt1 => c.list_sizes[u1] <= 4,
                StarCase::BothHeavy => c.list_sizes[u1] <= 4 || c.list_sizes[u2] <= 4,
                StarCase::BothLight => false,
            });
        if needs_deletion {
            // candidate order: the proof's side when it is not a terminal;
            // keeping the union when it happens to stay valid; the other
            // side (star-touched nodes there kill the star product just as
            // well and never shrink a terminal list); the terminal side as
            // a last resort, absorbed into the coding as full rows
            let mut plans: Vec<Option<Vertex>> = Vec::new();
            for &s in &mandated {
                if c.list_sizes[s] <= 4 && !terminals.contains(&s) {
                    plans.push(Some(s));
                }
            }
            plans.push(None); // keep the union
            for s in [u1, u2] {
                if !terminals.contains(&s) && !plans.contains(&Some(s)) {
                    plans.push(Some(s));
                }
            }
            for &s in &mandated {
                if c.list_sizes[s] <= 4 && terminals.contains(&s) && !plans.contains(&Some(s)) {
                    plans.push(Some(s));
                }
            }
            let mut done = false;
            for plan in plans {
                match plan {
                    None => {
                        if valid(&cover, &final_t) {
                            done = true;
                            break;
                        }
                    }
                    Some(side) => {
                        let touched: BTreeSet<NodeRef> = mstar
                            .iter()
                            .map(|&(a, b)| NodeRef {
                                vertex: new_id(side),
                                index: if side == u1 { a } else { b },
                            })
                            .collect();
                        let (c2, maps) = cover.delete_nodes(&touched);
                        if !maps.emptied.is_empty() {
                            continue;
                        }
                        if valid(&c2, &final_t) {
                            for v in c.graph.vertices() {
                                if gstep.vmap[v] == Some(new_id(side)) {
                                    node_new_to_old[v] = maps.new_to_old[new_id(side)].clone();
                                }
                            }
                            cover = c2;
                            done = true;
                            break;
                        }
                    }
                }
            }
            if !done {
                return Err(CodingError::ValidityLost(format!(
                    "no tight-subcase plan keeps the cover valid at {}-{}",
                    u1, u2
                )));
            }
        } else if !valid(&cover, &final_t) {
            return Err(CodingError::ValidityLost(format!(
                "merged cover invalid at {}-{} without a tight subcase",
                u1, u2
            )));
        }
    } else if !valid(&cover, &final_t) {
        return Err(CodingError::ValidityLost(format!(
            "reduced cover invalid after removing {}",
            u
        )));
    }

    // λ never increases at the terminals
    for (old_v, label) in [(t.x, "x"), (t.y, "y")] {
        let nv = gstep.vmap[old_v].unwrap();
        if cover.lambda_vertex(nv) > c.lambda_vertex(old_v) {
            return Err(CodingError::ValidityLost(format!(
                "λ increased at terminal {}",
                label
            )));
        }
    }

    final_t.broken = final_t.graph.n() == 2 || !final_t.graph.has_edge(final_t.x, final_t.y);
    Ok(Reduction {
        t: final_t,
        cover,
        step: ReplayStep {
            u,
            u1,
            u2,
            lu,
            nbr_u1,
            nbr_u2,
            vmap: gstep.vmap,
            node_new_to_old,
        },
    })
}

/// Full coding computation: iterated reduction to K_2, then assembly of the
/// link set back in the original index space.
pub fn compute_coding(t: &TwoTerminal, c: &Cover) -> Result<(Coding, ReplayStack), CodingError> {
    if c.validate().is_err()
        || c.is_valid_two_terminal(t.x, t.y, &t.outer_path) != Ok(true)
        || !t.broken
    {
        return Err(CodingError::ValidityLost(
            "input is not a valid cover of a broken gadget".into(),
        ));
    }
    let lambda_x0 = c.lambda_vertex(t.x);
    let lambda_y0 = c.lambda_vertex(t.y);
    let mut cur_t = t.clone();
    let mut cur_c = c.clone();
    let mut steps = Vec::new();
    let mut x_map: Vec<Option<usize>> = (0..c.list_sizes[t.x]).map(Some).collect();
    let mut y_map: Vec<Option<usize>> = (0..c.list_sizes[t.y]).map(Some).collect();

    while cur_t.graph.n() > 2 {
        let u = interior_degree2_vertex(&cur_t)
            .map_err(|_| CodingError::ValidityLost("no interior degree-2 vertex".into()))?;
        let red = reduce_cover(&cur_t, &cur_c, u)?;
        // compose terminal maps
        let old_x = cur_t.x;
        let old_y = cur_t.y;
        let apply = |m: &mut Vec<Option<usize>>, v_old: Vertex, step: &ReplayStep| {
            for slot in m.iter_mut() {
                if let Some(i) = *slot {
                    *slot = step.node_new_to_old[v_old].iter().position(|&o| o == i);
                }
            }
        };
        apply(&mut x_map, old_x, &red.step);
        apply(&mut y_map, old_y, &red.step);
        steps.push(red.step);
        cur_t = red.t;
        cur_c = red.cover;
    }

    // base case: the coding is the final K_2 bundle
    let fx = cur_t.x;
    let fy = cur_t.y;
    let fb = cur_c.bundle(Edge::new(fx, fy));
    let final_links = bundle_links_oriented(fb, fx);
    // back to original indices, deleted terminal nodes become full rows
    let x_back: Vec<Option<usize>> = x_map.clone();
    let y_back: Vec<Option<usize>> = y_map.clone();
    let mut links: BTreeSet<(usize, usize)> = BTreeSet::new();
    for a_orig in 0..c.list_sizes[t.x] {
        for b_orig in 0..c.list_sizes[t.y] {
            let hit = match (x_back[a_orig], y_back[b_orig]) {
                (Some(a), Some(b)) => final_links.contains(&(a, b)),
                _ => true,
            };
            if hit {
                links.insert((a_orig, b_orig));
            }
        }
    }
    let links: Vec<(usize, usize)> = links.into_iter().collect();
    if !fits_k22_links(&links) {
        return Err(CodingError::ShapeViolation(format!(
            "assembled coding is not a K_{{2,2}} subgraph: {:?}",
            links
        )));
    }
    let lambda_x = Coding::shape_lambda(&links, true);
    let lambda_y = Coding::shape_lambda(&links, false);
    if lambda_x > lambda_x0 || lambda_y > lambda_y0 {
        return Err(CodingError::ShapeViolation(format!(
            "coding λ {}/{} exceeds the cover's {}/{}",
            lambda_x, lambda_y, lambda_x0, lambda_y0
        )));
    }
    Ok((
        Coding {
            x: t.x,
            y: t.y,
            x_list: c.list_sizes[t.x],
            y_list: c.list_sizes[t.y],
            links,
            lambda_x,
            lambda_y,
        },
        ReplayStack {
            steps,
            original: c.clone(),
            x_map,
            y_map,
            x: t.x,
            y: t.y,
        },
    ))
}

impl ReplayStack {
    /// Extends a colouring of the final reduced cover (node indices in the
    /// final coordinate space) to a colouring of the original gadget.
    pub fn extend_colouring(&self, partial: &Colouring) -> Result<Colouring, CodingError> {
        let mut phi = partial.0.clone();
        for step in self.steps.iter().rev() {
            let n_in = step.vmap.len();
            let mut lifted = vec![usize::MAX; n_in];
            for v in 0..n_in {
                if let Some(nv) = step.vmap[v] {
                    let out_idx = phi[nv];
                    lifted[v] = step.node_new_to_old[v][out_idx];
                }
            }
            // choose the lowest admissible node for the removed vertex
            let c1 = lifted[step.u1];
            let c2 = lifted[step.u2];
            let blocked = step.nbr_u1[c1] | step.nbr_u2[c2];
            let full = if step.lu >= 32 { !0u32 } else { (1u32 << step.lu) - 1 };
            let free = full & !blocked;
            if free == 0 {
                return Err(CodingError::NoAdmissibleNode);
            }
            lifted[step.u] = free.trailing_zeros() as usize;
            phi = lifted;
        }
        Ok(Colouring(phi))
    }

    /// Extension entry point in original terminal indices: colours x with
    /// node `a` and y with node `b` and replays the whole gadget.
    pub fn extend_pair(&self, a: usize, b: usize) -> Result<Colouring, CodingError> {
        let fa = self.x_map[a].ok_or(CodingError::NoAdmissibleNode)?;
        let fb = self.y_map[b].ok_or(CodingError::NoAdmissibleNode)?;
        // final reduced graph is the K_2 on the images of x and y; vertex
        // ids there are 0 and 1 in some order
        let last_n = self
            .steps
            .last()
            .map(|s| s.vmap.iter().filter(|m| m.is_some()).count())
            .unwrap_or(self.original.graph.n());
        let mut phi = vec![usize::MAX; last_n];
        let (fx, fy) = self.final_terminals();
        phi[fx] = fa;
        phi[fy] = fb;
        self.extend_colouring(&Colouring(phi))
    }

    fn final_terminals(&self) -> (Vertex, Vertex) {
        let mut x = self.x;
        let mut y = self.y;
        for step in &self.steps {
            x = step.vmap[x].unwrap();
            y = step.vmap[y].unwrap();
        }
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{random_valid_two_terminal_cover, BundleKind};
    use crate::graph::{path_graph, Graph};
    use crate::oracle::solve_exhaustive_pinned;
    use crate::outerplanar::{random_two_terminal, recognize};

    fn k2_cover_full_k22() -> (TwoTerminal, Cover) {
        let g = path_graph(2);
        let t = recognize(&g, 0, 1).unwrap();
        let e = Edge::new(0, 1);
        let mut c = Cover::empty(g, vec![2, 2]);
        c.bundles.insert(
            e,
            LinkBundle::new(e, BundleKind::K22Part, vec![], vec![(0, 0), (0, 1), (1, 0), (1, 1)]),
        );
        (t, c)
    }

    #[test]
    fn base_case_k2_full_k22() {
        let (t, c) = k2_cover_full_k22();
        let (coding, _) = compute_coding(&t, &c).unwrap();
        assert_eq!(coding.links.len(), 4);
        assert_eq!((coding.lambda_x, coding.lambda_y), (2, 2));
    }

    #[test]
    fn empty_bundles_give_empty_coding() {
        let g = path_graph(3);
        let t = recognize(&g, 0, 2).unwrap();
        let c = Cover::empty(g, vec![2, 2, 2]);
        let (coding, stack) = compute_coding(&t, &c).unwrap();
        assert!(coding.links.is_empty());
        // every pair extends
        for a in 0..2 {
            for b in 0..2 {
                let phi = stack.extend_pair(a, b).unwrap();
                assert!(c.check_colouring(&phi));
                assert_eq!(phi.0[0], a);
                assert_eq!(phi.0[2], b);
            }
        }
    }

    #[test]
    fn star_product_cases() {
        // both matchings, |L(u)| = 2, complementary pairings: 2 links
        let nbr1 = vec![0b01, 0b10]; // a0 -> u0, a1 -> u1
        let nbr2 = vec![0b10, 0b01]; // b0 -> u1, b1 -> u0
        let m = star_product(&nbr1, &nbr2, 2);
        assert_eq!(m, vec![(0, 0), (1, 1)]);
        assert!(classify_star(&m, 1, 1).is_ok());

        // both matchings, |L(u)| >= 3: empty
        let m = star_product(&[0b001, 0b010], &[0b100, 0b010], 3);
        assert!(m.is_empty());

        // matching against a K_{1,2} with its hub at u2: at most 1 link
        // u has 3 nodes; b0 covers {u0, u1}, matching a2 -> u2
        let nbr1 = vec![0b100, 0b000, 0b000];
        let nbr2 = vec![0b011, 0b000];
        let m = star_product(&nbr1, &nbr2, 3);
        assert_eq!(m, vec![(0, 0)]);
        assert!(classify_star(&m, 1, 2).is_ok());
    }

    #[test]
    fn shape_violation_detected() {
        // a fabricated star with a degree-2 node on the wrong side for
        // case 2 must be rejected
        let links = vec![(0, 0), (1, 0)];
        assert!(matches!(
            classify_star(&links, 1, 2),
            Err(CodingError::ShapeViolation(_))
        ));
    }

    #[test]
    fn p3_merge_produces_coding_matching() {
        // x - u - y with complementary matchings: coding has 2 links
        let g = path_graph(3);
        let t = recognize(&g, 0, 2).unwrap();
        let mut c = Cover::empty(g, vec![2, 2, 2]);
        let e1 = Edge::new(0, 1);
        let e2 = Edge::new(1, 2);
        c.bundles.insert(
            e1,
            LinkBundle::new(e1, BundleKind::Matching, vec![(0, 0), (1, 1)], vec![]),
        );
        c.bundles.insert(
            e2,
            LinkBundle::new(e2, BundleKind::Matching, vec![(1, 0), (0, 1)], vec![]),
        );
        let (coding, stack) = compute_coding(&t, &c).unwrap();
        assert_eq!(coding.links.len(), 2);
        assert_eq!(coding.lambda_x, 1);
        // non-links extend with the pinned endpoints; linked pairs carry no
        // promise either way (the coding over-approximates conflicts)
        for a in 0..2 {
            for b in 0..2 {
                if !coding.has_link(a, b) {
                    let phi = stack.extend_pair(a, b).unwrap();
                    assert!(c.check_colouring(&phi));
                    assert!(solve_exhaustive_pinned(&c, &[(0, a), (2, b)], 10_000)
                        .unwrap()
                        .is_some());
                }
            }
        }
    }

    /// The chord-merge example worked out by hand: path x-w-u-y with chord
    /// w-y, a K_{1,2} hub on the w-u bundle and a full K_{2,2} on u-y. The
    /// only non-extendable pair is (x1, y0).
    #[test]
    fn chord_merge_with_terminal_deletion_pressure() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]);
        let t = recognize(&g, 0, 3).unwrap();
        assert_eq!(t.outer_path, vec![0, 1, 2, 3]);
        let mut c = Cover::empty(g, vec![2, 3, 4, 3]);
        let e01 = Edge::new(0, 1);
        let e12 = Edge::new(1, 2);
        let e23 = Edge::new(2, 3);
        let e13 = Edge::new(1, 3);
        c.bundles.insert(
            e01,
            LinkBundle::new(e01, BundleKind::Matching, vec![(0, 1), (1, 2)], vec![]),
        );
        // K_{1,2} hub at w = vertex 1 (node 0), covering u-nodes 0 and 1
        c.bundles.insert(
            e12,
            LinkBundle::new(e12, BundleKind::K22Part, vec![], vec![(0, 0), (0, 1)]),
        );
        // full K_{2,2} between u-nodes {2,3} and y-nodes {0,1}
        c.bundles.insert(
            e23,
            LinkBundle::new(
                e23,
                BundleKind::K22Part,
                vec![],
                vec![(2, 0), (2, 1), (3, 0), (3, 1)],
            ),
        );
        c.bundles.insert(
            e13,
            LinkBundle::new(e13, BundleKind::Matching, vec![(1, 0)], vec![]),
        );
        assert_eq!(c.is_valid_two_terminal(0, 3, &[0, 1, 2, 3]), Ok(true));
        let (coding, stack) = compute_coding(&t, &c).unwrap();
        // completeness: every non-link extends
        for a in 0..2 {
            for b in 0..3 {
                let oracle = solve_exhaustive_pinned(&c, &[(0, a), (3, b)], 100_000).unwrap();
                if !coding.has_link(a, b) {
                    let phi = stack.extend_pair(a, b).unwrap();
                    assert!(c.check_colouring(&phi));
                    assert!(oracle.is_some());
                }
            }
        }
        // the hand-checked blocked pair is a link
        assert!(coding.has_link(1, 0));
    }

    #[test]
    fn random_instances_verify_against_oracle() {
        let mut checked_pairs = 0usize;
        for n in 3..=7 {
            for seed in 0..25 {
                let t = random_two_terminal(n, seed);
                let c = random_valid_two_terminal_cover(&t.graph, t.x, t.y, &t.outer_path, seed ^ 0xabc);
                let (coding, stack) = match compute_coding(&t, &c) {
                    Ok(v) => v,
                    Err(e) => panic!("n={} seed={}: {}", n, seed, e),
                };
                for a in 0..coding.x_list {
                    for b in 0..coding.y_list {
                        if coding.has_link(a, b) {
                            continue;
                        }
                        let phi = stack
                            .extend_pair(a, b)
                            .unwrap_or_else(|e| panic!("n={} seed={} ({},{}): {}", n, seed, a, b, e));
                        assert!(c.check_colouring(&phi), "n={} seed={} ({},{})", n, seed, a, b);
                        assert_eq!(phi.0[t.x], a);
                        assert_eq!(phi.0[t.y], b);
                        checked_pairs += 1;
                    }
                }
            }
        }
        assert!(checked_pairs > 500, "exercised {} pairs", checked_pairs);
    }
}
