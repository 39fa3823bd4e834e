//! GraphML emission and a reader for the emitted dialect (round-trip
//! support for golden tests and external tooling).

use crate::centrality::CentralityTable;
use crate::community::CommunityPartition;
use crate::error::{Result, TagnetError};
use crate::graph::{CooccurrenceGraph, EdgeKey, VertexMeta};

use super::{xml_escape, xml_unescape};

/// Optional per-vertex attributes to embed in an export.
#[derive(Default, Clone, Copy)]
pub struct ExportAttributes<'a> {
    pub tables: &'a [&'a CentralityTable],
    pub partition: Option<&'a CommunityPartition>,
}

fn check_attributes(g: &CooccurrenceGraph, attrs: &ExportAttributes<'_>) -> Result<()> {
    for table in attrs.tables {
        let missing: Vec<String> = table
            .scores
            .keys()
            .filter(|t| !g.vertices.contains_key(*t))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(TagnetError::AttributeMismatch { missing });
        }
    }
    if let Some(p) = attrs.partition {
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
    Ok(())
}

/// Emit GraphML with edge weights, vertex frequencies and any requested
/// centrality/community attributes. Nodes and edges come out sorted.
pub fn export_graphml(g: &CooccurrenceGraph, attrs: &ExportAttributes<'_>) -> Result<String> {
    check_attributes(g, attrs)?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"frequency\" for=\"node\" attr.name=\"frequency\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"is_query\" for=\"node\" attr.name=\"is_query\" attr.type=\"boolean\"/>\n");
    for table in attrs.tables {
        out.push_str(&format!(
            "  <key id=\"{m}\" for=\"node\" attr.name=\"{m}\" attr.type=\"double\"/>\n",
            m = table.measure
        ));
    }
    if attrs.partition.is_some() {
        out.push_str("  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n");
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"post_count\" for=\"graph\" attr.name=\"post_count\" attr.type=\"long\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"undirected\">\n");
    out.push_str(&format!(
        "    <data key=\"post_count\">{}</data>\n",
        g.post_count
    ));
    for (tag, meta) in &g.vertices {
        out.push_str(&format!("    <node id=\"{}\">\n", xml_escape(tag)));
        out.push_str(&format!(
            "      <data key=\"frequency\">{}</data>\n",
            meta.frequency
        ));
        out.push_str(&format!(
            "      <data key=\"is_query\">{}</data>\n",
            meta.is_query
        ));
        for table in attrs.tables {
            if let Some(score) = table.scores.get(tag) {
                out.push_str(&format!(
                    "      <data key=\"{}\">{score:e}</data>\n",
                    table.measure
                ));
            }
        }
        if let Some(p) = attrs.partition {
            out.push_str(&format!(
                "      <data key=\"community\">{}</data>\n",
                p.assignment[tag]
            ));
        }
        out.push_str("    </node>\n");
    }
    for (EdgeKey(a, b), &w) in &g.edges {
        out.push_str(&format!(
            "    <edge source=\"{}\" target=\"{}\">\n",
            xml_escape(a),
            xml_escape(b)
        ));
        out.push_str(&format!("      <data key=\"weight\">{w}</data>\n"));
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    Ok(out)
}

fn attr_value<'a>(line: &'a str, name: &str) -> Option<&'a str> {
    let pat = format!("{name}=\"");
    let start = line.find(&pat)? + pat.len();
    let end = line[start..].find('"')? + start;
    Some(&line[start..end])
}

fn data_value(line: &str) -> Option<(&str, &str)> {
    let key = attr_value(line, "key")?;
    let start = line.find('>')? + 1;
    let end = line.rfind("</data>")?;
    (start <= end).then(|| (key, &line[start..end]))
}

/// Read the GraphML dialect produced by [`export_graphml`] back into a
/// graph. Unknown node data keys (centrality, community) are ignored.
pub fn import_graphml(xml: &str) -> Result<CooccurrenceGraph> {
    let bad = |msg: &str| TagnetError::InvalidInput(format!("bad GraphML: {msg}"));
    let mut g = CooccurrenceGraph::default();
    let mut current_node: Option<(String, VertexMeta)> = None;
    let mut current_edge: Option<(String, String, u64)> = None;
    let mut in_graph = false;

    for line in xml.lines() {
        let line = line.trim();
        if line.starts_with("<graph ") {
            in_graph = true;
        } else if line == "</graph>" {
            in_graph = false;
        } else if !in_graph {
            continue;
        } else if line.starts_with("<node ") {
            let id = xml_unescape(attr_value(line, "id").ok_or_else(|| bad("node without id"))?);
            current_node = Some((id, VertexMeta::default()));
        } else if line == "</node>" {
            let (id, meta) = current_node.take().ok_or_else(|| bad("stray </node>"))?;
            g.vertices.insert(id, meta);
        } else if line.starts_with("<edge ") {
            let s = xml_unescape(attr_value(line, "source").ok_or_else(|| bad("edge without source"))?);
            let t = xml_unescape(attr_value(line, "target").ok_or_else(|| bad("edge without target"))?);
            current_edge = Some((s, t, 1));
        } else if line == "</edge>" {
            let (s, t, w) = current_edge.take().ok_or_else(|| bad("stray </edge>"))?;
            if !g.vertices.contains_key(&s) || !g.vertices.contains_key(&t) {
                return Err(bad("edge references unknown node"));
            }
            g.edges.insert(EdgeKey::new(&s, &t), w);
        } else if line.starts_with("<data ") {
            let (key, value) = data_value(line).ok_or_else(|| bad("malformed data element"))?;
            match (&mut current_node, &mut current_edge, key) {
                (Some((_, meta)), _, "frequency") => {
                    meta.frequency = value.parse().map_err(|_| bad("bad frequency"))?;
                }
                (Some((_, meta)), _, "is_query") => {
                    meta.is_query = value == "true";
                }
                (None, Some((_, _, w)), "weight") => {
                    *w = value.parse().map_err(|_| bad("bad weight"))?;
                }
                (None, None, "post_count") => {
                    g.post_count = value.parse().map_err(|_| bad("bad post_count"))?;
                }
                _ => {} // other attributes are display-only
            }
        }
    }
    Ok(g)
}
