//! Property tests over randomly generated covers.

use std::collections::BTreeSet;

use proptest::prelude::*;

use dpcolor::cover::{random_cover, BundleKind, Colouring, Cover, NodeRef};
use dpcolor::graph::Graph;
use dpcolor::io::{emit_cover_file, parse_cover_file};

fn arb_graph() -> impl Strategy<Value = Graph> {
    (3usize..=7, proptest::collection::vec(any::<bool>(), 21)).prop_map(|(n, bits)| {
        let mut g = Graph::new(n);
        let mut k = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                if bits[k % bits.len()] {
                    g.add_edge(u, v);
                }
                k += 1;
            }
        }
        // keep it connected enough to be interesting
        for v in 1..n {
            if g.degree(v) == 0 {
                g.add_edge(v - 1, v);
            }
        }
        if g.degree(0) == 0 {
            g.add_edge(0, 1);
        }
        g
    })
}

fn arb_cover() -> impl Strategy<Value = Cover> {
    (arb_graph(), 1u64..1_000_000).prop_map(|(g, seed)| {
        let f: Vec<usize> = g.vertices().map(|v| (g.degree(v) + 1).min(5)).collect();
        random_cover(
            &g,
            &f,
            |_| vec![BundleKind::Matching, BundleKind::K22Part, BundleKind::Union],
            seed,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// emit/parse round trips are exact.
    #[test]
    fn cover_file_round_trip(c in arb_cover()) {
        let text = emit_cover_file(&c, None);
        let parsed = parse_cover_file(&text).unwrap();
        prop_assert_eq!(parsed.cover.as_ref(), Some(&c));
        prop_assert_eq!(emit_cover_file(parsed.cover.as_ref().unwrap(), None), text);
    }

    /// Node deletion never raises the λ-weight of any bundle at any side.
    #[test]
    fn delete_nodes_is_lambda_monotone(c in arb_cover(), picks in proptest::collection::vec((0usize..7, 0usize..5), 0..6)) {
        let dead: BTreeSet<NodeRef> = picks
            .into_iter()
            .filter(|&(v, i)| v < c.graph.n() && i < c.list_sizes[v])
            .map(|(v, i)| NodeRef { vertex: v, index: i })
            .collect();
        let (c2, _maps) = c.delete_nodes(&dead);
        for (e, b) in &c.bundles {
            let b2 = c2.bundle(*e);
            prop_assert!(b2.lambda(e.u) <= b.lambda(e.u), "λ grew at {} side u", e);
            prop_assert!(b2.lambda(e.v) <= b.lambda(e.v), "λ grew at {} side v", e);
        }
    }

    /// The at-most-two-heavy-nodes bound with the min{2, λ} refinement.
    #[test]
    fn heavy_node_bounds(c in arb_cover()) {
        for (e, b) in &c.bundles {
            for (side, other) in [(e.u, e.v), (e.v, e.u)] {
                for i in 0..c.list_sizes[side] {
                    prop_assert!(b.node_degree(side, i) as u32 <= b.lambda(other));
                }
                let heavy = (0..c.list_sizes[side])
                    .filter(|&i| b.node_degree(side, i) >= 2)
                    .count();
                prop_assert!(heavy <= 2);
                if b.lambda(side) >= 2 {
                    let thresh = 2.min(b.lambda(other)) as usize;
                    let strong = (0..c.list_sizes[side])
                        .filter(|&i| b.node_degree(side, i) >= thresh)
                        .count();
                    prop_assert!(strong <= 2, "min-refinement breached on {}", e);
                }
            }
        }
    }

    /// check_colouring is invariant under consistent list re-indexing.
    #[test]
    fn colouring_check_reindexing_invariant(c in arb_cover(), seed in 0u64..1_000_000) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = c.graph.n();
        // random bijections per vertex
        let perms: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut p: Vec<usize> = (0..c.list_sizes[v]).collect();
                for i in (1..p.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    p.swap(i, j);
                }
                p
            })
            .collect();
        let mut c2 = c.clone();
        for (e, b) in c.bundles.iter() {
            let conv = |links: &[(usize, usize)]| -> Vec<(usize, usize)> {
                links.iter().map(|&(a, bb)| (perms[e.u][a], perms[e.v][bb])).collect()
            };
            c2.bundles.insert(
                *e,
                dpcolor::cover::LinkBundle::new(*e, b.kind, conv(&b.matching_links), conv(&b.k22_links)),
            );
        }
        let phi = Colouring((0..n).map(|v| rng.gen_range(0..c.list_sizes[v])).collect());
        let phi2 = Colouring((0..n).map(|v| perms[v][phi.0[v]]).collect());
        prop_assert_eq!(c.check_colouring(&phi), c2.check_colouring(&phi2));
    }
}
