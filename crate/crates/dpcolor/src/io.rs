//! Text formats and DOT export.
//!
//! The graph/cover format is line oriented, whitespace separated, with `#`
//! comments. Emission is canonical (sorted edges, lists, bundles, links) so
//! emit-parse round trips are bit-exact.
//!
//! ```text
//! graph <n>
//! e <u> <v> [mult]
//! terminals <x> <y>        # optional
//! list <v> <size>          # one per vertex for covers
//! bundle <u> <v> <kind>    # kind: matching | k22part | union
//! m <iu> <iv>              # matching link of the last bundle
//! k <iu> <iv>              # k22 link of the last bundle
//! colouring
//! c <v> <index>
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::cover::{BundleKind, Colouring, Cover, LinkBundle};
use crate::graph::{Edge, Graph, Vertex};
use crate::structure::Decomposition;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// A parsed cover file: the graph, optional terminals, the cover when list
/// lines were present, and an optional colouring block.
#[derive(Clone, Debug)]
pub struct CoverFile {
    pub graph: Graph,
    pub terminals: Option<(Vertex, Vertex)>,
    pub cover: Option<Cover>,
    pub colouring: Option<Colouring>,
}

pub fn parse_cover_file(text: &str) -> Result<CoverFile, ParseError> {
    let mut graph: Option<Graph> = None;
    let mut terminals = None;
    let mut lists: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut bundles: Vec<LinkBundle> = Vec::new();
    let mut colouring: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut in_colouring = false;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let want = |k: usize| -> Result<Vec<usize>, ParseError> {
            if toks.len() != k + 1 {
                return err(line_no, format!("`{}` wants {} fields", toks[0], k));
            }
            toks[1..]
                .iter()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| ParseError {
                            line: line_no,
                            message: format!("bad number `{}`", t),
                        })
                })
                .collect()
        };
        match toks[0] {
            "graph" => {
                let v = want(1)?;
                if graph.is_some() {
                    return err(line_no, "duplicate graph directive");
                }
                if v[0] > 16 {
                    return err(line_no, "graphs beyond 16 vertices are out of scope");
                }
                graph = Some(Graph::new(v[0]));
            }
            "e" => {
                if toks.len() != 3 && toks.len() != 4 {
                    return err(line_no, "`e` wants `e <u> <v> [mult]`");
                }
                let g = match graph.as_mut() {
                    Some(g) => g,
                    None => return err(line_no, "edge before graph directive"),
                };
                let u: usize = toks[1].parse().map_err(|_| ParseError {
                    line: line_no,
                    message: "bad vertex".into(),
                })?;
                let v: usize = toks[2].parse().map_err(|_| ParseError {
                    line: line_no,
                    message: "bad vertex".into(),
                })?;
                if u >= g.n() || v >= g.n() || u == v {
                    return err(line_no, "edge endpoints out of range");
                }
                if g.has_edge(u, v) {
                    return err(line_no, "duplicate edge");
                }
                g.add_edge(u, v);
                if toks.len() == 4 {
                    let m: u32 = toks[3].parse().map_err(|_| ParseError {
                        line: line_no,
                        message: "bad multiplicity".into(),
                    })?;
                    if m == 0 {
                        return err(line_no, "multiplicity must be positive");
                    }
                    g.set_multiplicity(Edge::new(u, v), m);
                }
            }
            "terminals" => {
                let v = want(2)?;
                terminals = Some((v[0], v[1]));
            }
            "list" => {
                let v = want(2)?;
                if lists.insert(v[0], v[1]).is_some() {
                    return err(line_no, "duplicate list directive");
                }
            }
            "bundle" => {
                if toks.len() != 4 {
                    return err(line_no, "`bundle` wants `bundle <u> <v> <kind>`");
                }
                let u: usize = toks[1].parse().map_err(|_| ParseError {
                    line: line_no,
                    message: "bad vertex".into(),
                })?;
                let v: usize = toks[2].parse().map_err(|_| ParseError {
                    line: line_no,
                    message: "bad vertex".into(),
                })?;
                let kind = match toks[3] {
                    "matching" => BundleKind::Matching,
                    "k22part" => BundleKind::K22Part,
                    "union" => BundleKind::Union,
                    other => return err(line_no, format!("unknown bundle kind `{}`", other)),
                };
                bundles.push(LinkBundle::new(Edge::new(u, v), kind, vec![], vec![]));
            }
            "m" | "k" => {
                let v = want(2)?;
                let b = match bundles.last_mut() {
                    Some(b) => b,
                    None => return err(line_no, "link before any bundle directive"),
                };
                if toks[0] == "m" {
                    b.matching_links.push((v[0], v[1]));
                    b.matching_links.sort_unstable();
                } else {
                    b.k22_links.push((v[0], v[1]));
                    b.k22_links.sort_unstable();
                }
            }
            "colouring" => {
                in_colouring = true;
            }
            "c" => {
                if !in_colouring {
                    return err(line_no, "`c` outside a colouring block");
                }
                let v = want(2)?;
                colouring.insert(v[0], v[1]);
            }
            other => return err(line_no, format!("unknown directive `{}`", other)),
        }
    }

    let graph = match graph {
        Some(g) => g,
        None => return err(0, "missing graph directive"),
    };
    if let Some((x, y)) = terminals {
        if x >= graph.n() || y >= graph.n() || x == y {
            return err(0, "terminals out of range");
        }
    }
    let cover = if lists.is_empty() && bundles.is_empty() {
        None
    } else {
        let mut sizes = vec![0usize; graph.n()];
        for v in graph.vertices() {
            match lists.get(&v) {
                Some(&s) => sizes[v] = s,
                None => return err(0, format!("missing list line for vertex {}", v)),
            }
        }
        let mut c = Cover::empty(graph.clone(), sizes);
        for b in bundles {
            if !c.graph.has_edge(b.edge.u, b.edge.v) {
                return err(0, format!("bundle on non-edge {}", b.edge));
            }
            c.bundles.insert(b.edge, b);
        }
        if let Err(msg) = c.validate() {
            return err(0, msg);
        }
        Some(c)
    };
    let colouring = if in_colouring {
        let mut phi = vec![0usize; graph.n()];
        for v in graph.vertices() {
            match colouring.get(&v) {
                Some(&i) => phi[v] = i,
                None => return err(0, format!("missing colour for vertex {}", v)),
            }
        }
        Some(Colouring(phi))
    } else {
        None
    };
    Ok(CoverFile {
        graph,
        terminals,
        cover,
        colouring,
    })
}

pub fn emit_graph(g: &Graph) -> String {
    let mut out = format!("graph {}\n", g.n());
    for e in g.edges() {
        let m = g.multiplicity(e);
        if m > 1 {
            out.push_str(&format!("e {} {} {}\n", e.u, e.v, m));
        } else {
            out.push_str(&format!("e {} {}\n", e.u, e.v));
        }
    }
    out
}

pub fn emit_cover_file(c: &Cover, terminals: Option<(Vertex, Vertex)>) -> String {
    let mut out = emit_graph(&c.graph);
    if let Some((x, y)) = terminals {
        out.push_str(&format!("terminals {} {}\n", x, y));
    }
    for v in c.graph.vertices() {
        out.push_str(&format!("list {} {}\n", v, c.list_sizes[v]));
    }
    for (e, b) in &c.bundles {
        out.push_str(&format!("bundle {} {} {}\n", e.u, e.v, b.kind));
        for &(a, bb) in &b.matching_links {
            out.push_str(&format!("m {} {}\n", a, bb));
        }
        for &(a, bb) in &b.k22_links {
            out.push_str(&format!("k {} {}\n", a, bb));
        }
    }
    out
}

pub fn emit_colouring(phi: &Colouring) -> String {
    let mut out = String::from("colouring\n");
    for (v, &i) in phi.0.iter().enumerate() {
        out.push_str(&format!("c {} {}\n", v, i));
    }
    out
}

// ---------------------------------------------------------------------
// DOT export
// ---------------------------------------------------------------------

pub fn graph_dot(g: &Graph) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for v in g.vertices() {
        out.push_str(&format!("  v{};\n", v));
    }
    for e in g.edges() {
        let m = g.multiplicity(e);
        for _ in 0..m {
            out.push_str(&format!("  v{} -- v{};\n", e.u, e.v));
        }
    }
    out.push_str("}\n");
    out
}

/// Cover rendered as clustered node lists with matching links solid and
/// k22 links dashed.
pub fn cover_dot(c: &Cover) -> String {
    let mut out = String::from("graph Cover {\n  node [shape=point, width=0.12];\n");
    for v in c.graph.vertices() {
        out.push_str(&format!(
            "  subgraph cluster_v{} {{\n    label=\"v{}\";\n",
            v, v
        ));
        for i in 0..c.list_sizes[v] {
            out.push_str(&format!("    n{}_{};\n", v, i));
        }
        out.push_str("  }\n");
    }
    for (e, b) in &c.bundles {
        for &(a, bb) in &b.matching_links {
            out.push_str(&format!("  n{}_{} -- n{}_{};\n", e.u, a, e.v, bb));
        }
        for &(a, bb) in &b.k22_links {
            out.push_str(&format!(
                "  n{}_{} -- n{}_{} [style=dashed];\n",
                e.u, a, e.v, bb
            ));
        }
    }
    out.push_str("}\n");
    out
}

pub fn decomposition_dot(g: &Graph, d: &Decomposition) -> String {
    let mut out = String::from("graph Decomposition {\n  node [shape=circle];\n");
    let cluster = |out: &mut String, name: &str, verts: &[Vertex]| {
        out.push_str(&format!(
            "  subgraph cluster_{} {{\n    label=\"{}\";\n",
            name.replace(['-', ' '], "_"),
            name
        ));
        for &v in verts {
            out.push_str(&format!("    v{};\n", v));
        }
        out.push_str("  }\n");
    };
    match d {
        Decomposition::Outerplanar { gadget, .. } => {
            cluster(&mut out, "outerplanar", &gadget.to_global);
        }
        Decomposition::ThreeGadget { parts, .. } => {
            for (i, p) in parts.iter().enumerate() {
                let inner: Vec<Vertex> = p
                    .to_global
                    .iter()
                    .copied()
                    .filter(|&v| v != p.x_global() && v != p.y_global())
                    .collect();
                cluster(&mut out, &format!("part{}", i), &inner);
            }
        }
        Decomposition::CoreGadgets {
            core_to_global,
            subdivided,
            ..
        } => {
            cluster(&mut out, "core", core_to_global);
            for (i, (_, gadget)) in subdivided.iter().enumerate() {
                let inner: Vec<Vertex> = gadget
                    .to_global
                    .iter()
                    .copied()
                    .filter(|&v| v != gadget.x_global() && v != gadget.y_global())
                    .collect();
                cluster(&mut out, &format!("gadget{}", i), &inner);
            }
        }
    }
    for e in g.edges() {
        out.push_str(&format!("  v{} -- v{};\n", e.u, e.v));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{random_cover, BundleKind};
    use crate::graph::cycle_graph;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = cycle_graph(5);
        let f = vec![3, 3, 4, 3, 2];
        for seed in 0..40 {
            let c = random_cover(
                &g,
                &f,
                |_| vec![BundleKind::Matching, BundleKind::K22Part, BundleKind::Union],
                seed,
            );
            let text = emit_cover_file(&c, Some((0, 2)));
            let parsed = parse_cover_file(&text).unwrap();
            assert_eq!(parsed.cover.as_ref(), Some(&c));
            assert_eq!(parsed.terminals, Some((0, 2)));
            assert_eq!(emit_cover_file(parsed.cover.as_ref().unwrap(), parsed.terminals), text);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_cover_file("nonsense 1 2\n").is_err());
        // missing list line
        let text = "graph 3\ne 0 1\ne 1 2\nlist 0 2\nlist 1 2\n";
        let e = parse_cover_file(text).unwrap_err();
        assert!(e.message.contains("missing list"));
        // link out of range
        let text = "graph 2\ne 0 1\nlist 0 2\nlist 1 2\nbundle 0 1 matching\nm 5 0\n";
        assert!(parse_cover_file(text).is_err());
    }

    #[test]
    fn dot_is_deterministic() {
        let g = crate::graph::wheel_graph(4);
        assert_eq!(graph_dot(&g), graph_dot(&g));
        assert!(graph_dot(&g).starts_with("graph G {"));
    }

    #[test]
    fn colouring_block_round_trip() {
        let g = cycle_graph(4);
        let text = format!("{}{}", emit_graph(&g), emit_colouring(&Colouring(vec![0, 1, 0, 1])));
        let parsed = parse_cover_file(&text).unwrap();
        assert_eq!(parsed.colouring, Some(Colouring(vec![0, 1, 0, 1])));
    }
}
