//! Undirected DOT emission plus a reader for the emitted dialect.

use crate::community::CommunityPartition;
use crate::error::{Result, TagnetError};
use crate::graph::{CooccurrenceGraph, EdgeKey, VertexMeta};

use super::PALETTE;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn unquote(s: &str) -> Option<String> {
    let inner = s.strip_prefix('"')?.strip_suffix('"')?;
    Some(inner.replace("\\\"", "\"").replace("\\\\", "\\"))
}

/// Emit an undirected DOT document, vertices and edges sorted. Communities,
/// when given, must cover every vertex and become fill colors from the fixed
/// 12-color palette (cycling).
pub fn export_dot(g: &CooccurrenceGraph, partition: Option<&CommunityPartition>) -> Result<String> {
    if let Some(p) = partition {
        let missing: Vec<String> = g
            .vertices
            .keys()
            .filter(|t| !p.assignment.contains_key(*t))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(TagnetError::AttributeMismatch { missing });
        }
    }
    let mut out = String::from("graph cooccurrence {\n");
    out.push_str(&format!("  graph [post_count={}];\n", g.post_count));
    out.push_str("  node [style=filled];\n");
    for (tag, meta) in &g.vertices {
        let mut attrs = format!("frequency={}", meta.frequency);
        if meta.is_query {
            attrs.push_str(", query=true");
        }
        if let Some(p) = partition {
            let cid = p.assignment[tag];
            attrs.push_str(&format!(
                ", community={cid}, fillcolor={}",
                quote(PALETTE[cid % PALETTE.len()])
            ));
        }
        out.push_str(&format!("  {} [{attrs}];\n", quote(tag)));
    }
    for (EdgeKey(a, b), &w) in &g.edges {
        out.push_str(&format!("  {} -- {} [weight={w}];\n", quote(a), quote(b)));
    }
    out.push_str("}\n");
    Ok(out)
}

fn bracket_attr(line: &str, name: &str) -> Option<String> {
    let open = line.find('[')?;
    let close = line.rfind(']')?;
    for part in line[open + 1..close].split(", ") {
        let (k, v) = part.split_once('=')?;
        if k.trim() == name {
            return Some(v.trim().to_owned());
        }
    }
    None
}

/// Read the DOT dialect produced by [`export_dot`].
pub fn import_dot(dot: &str) -> Result<CooccurrenceGraph> {
    let bad = |msg: &str| TagnetError::InvalidInput(format!("bad DOT: {msg}"));
    let mut g = CooccurrenceGraph::default();
    for line in dot.lines() {
        let line = line.trim().trim_end_matches(';');
        if line.starts_with("graph [") {
            if let Some(pc) = bracket_attr(line, "post_count") {
                g.post_count = pc.parse().map_err(|_| bad("bad post_count"))?;
            }
        } else if let Some((lhs, _)) = line.split_once(" -- ") {
            let a = unquote(lhs.trim()).ok_or_else(|| bad("unquoted edge endpoint"))?;
            let rhs = line.split_once(" -- ").unwrap().1;
            let endpoint = rhs.split(" [").next().unwrap_or(rhs).trim();
            let b = unquote(endpoint).ok_or_else(|| bad("unquoted edge endpoint"))?;
            let w: u64 = bracket_attr(line, "weight")
                .ok_or_else(|| bad("edge without weight"))?
                .parse()
                .map_err(|_| bad("bad weight"))?;
            if !g.vertices.contains_key(&a) || !g.vertices.contains_key(&b) {
                return Err(bad("edge references unknown vertex"));
            }
            g.edges.insert(EdgeKey::new(&a, &b), w);
        } else if line.starts_with('"') && line.contains('[') {
            let name_part = line.split(" [").next().unwrap();
            let tag = unquote(name_part.trim()).ok_or_else(|| bad("unquoted vertex"))?;
            let frequency: u64 = bracket_attr(line, "frequency")
                .ok_or_else(|| bad("vertex without frequency"))?
                .parse()
                .map_err(|_| bad("bad frequency"))?;
            let is_query = bracket_attr(line, "query").as_deref() == Some("true");
            g.vertices.insert(
                tag,
                VertexMeta {
                    frequency,
                    is_query,
                },
            );
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::{best_partition, fast_greedy};
    use crate::graph::test_support::graph_from_edges;

    #[test]
    fn triangle_emits_sorted_edges() {
        let g = graph_from_edges(&[("b", "c", 2), ("a", "b", 1), ("a", "c", 1)]);
        let dot = export_dot(&g, None).unwrap();
        let a_b = dot.find("\"a\" -- \"b\"").unwrap();
        let b_c = dot.find("\"b\" -- \"c\"").unwrap();
        assert!(a_b < b_c);
        assert!(dot.contains("[weight=2]"));
    }

    #[test]
    fn empty_graph_is_valid() {
        let dot = export_dot(&CooccurrenceGraph::default(), None).unwrap();
        let back = import_dot(&dot).unwrap();
        assert_eq!(back, CooccurrenceGraph::default());
    }

    #[test]
    fn communities_color_the_vertices() {
        let g = graph_from_edges(&[("a", "b", 1), ("c", "d", 1)]);
        let part = best_partition(&fast_greedy(&g).unwrap());
        let dot = export_dot(&g, Some(&part)).unwrap();
        assert!(dot.contains("fillcolor=\"#1f77b4\""));
        assert!(dot.contains("fillcolor=\"#ff7f0e\""));
    }

    #[test]
    fn incomplete_partition_is_rejected() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 1)]);
        let two = graph_from_edges(&[("a", "b", 1)]);
        let part = best_partition(&fast_greedy(&two).unwrap());
        assert!(matches!(
            export_dot(&g, Some(&part)),
            Err(TagnetError::AttributeMismatch { .. })
        ));
    }

    #[test]
    fn round_trip_preserves_the_graph() {
        let mut g = graph_from_edges(&[("reef", "diving", 3), ("diving", "fish", 1)]);
        g.post_count = 4;
        g.vertices.get_mut("reef").unwrap().is_query = true;
        let part = best_partition(&fast_greedy(&g).unwrap());
        let dot = export_dot(&g, Some(&part)).unwrap();
        let back = import_dot(&dot).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn quoted_names_round_trip() {
        let g = graph_from_edges(&[("a\"b", "c d", 1)]);
        let dot = export_dot(&g, None).unwrap();
        let back = import_dot(&dot).unwrap();
        assert_eq!(back, g);
    }
}
