//! Static SVG rendering of a laid-out network: vertex size by centrality,
//! fill color by community, labels for the top-scoring vertices.

use std::collections::BTreeSet;

use crate::centrality::CentralityTable;
use crate::community::CommunityPartition;
use crate::error::{Result, TagnetError};
use crate::export::layout::LayoutResult;
use crate::graph::{CooccurrenceGraph, EdgeKey};

use super::{xml_escape, PALETTE};

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    pub min_radius: f64,
    pub max_radius: f64,
    /// Labels are drawn for this many top vertices (by size score, falling
    /// back to frequency).
    pub label_top_k: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800.0,
            height: 800.0,
            margin: 40.0,
            min_radius: 4.0,
            max_radius: 20.0,
            label_top_k: 30,
        }
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Render the graph as an SVG document. Byte-deterministic for identical
/// inputs; vertices and edges are emitted in sorted order.
pub fn render_svg(
    g: &CooccurrenceGraph,
    layout: &LayoutResult,
    partition: Option<&CommunityPartition>,
    size_by: Option<&CentralityTable>,
    opts: &RenderOptions,
) -> Result<String> {
    let missing: Vec<String> = g
        .vertices
        .keys()
        .filter(|t| !layout.positions.contains_key(*t))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(TagnetError::AttributeMismatch { missing });
    }
    if let Some(table) = size_by {
        let missing: Vec<String> = g
            .vertices
            .keys()
            .filter(|t| !table.scores.contains_key(*t))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(TagnetError::AttributeMismatch { missing });
        }
    }

    let place = |t: &str| {
        let (x, y) = layout.positions[t];
        (
            opts.margin + x * (opts.width - 2.0 * opts.margin),
            opts.margin + y * (opts.height - 2.0 * opts.margin),
        )
    };

    // radius: linear in score between min and max radius
    let (score_min, score_max) = match size_by {
        Some(table) => g
            .vertices
            .keys()
            .map(|t| table.score(t))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s), hi.max(s))
            }),
        None => (0.0, 0.0),
    };
    let radius = |t: &str| match size_by {
        Some(table) if score_max - score_min > 1e-12 => {
            let frac = (table.score(t) - score_min) / (score_max - score_min);
            opts.min_radius + frac * (opts.max_radius - opts.min_radius)
        }
        Some(_) => (opts.min_radius + opts.max_radius) / 2.0,
        None => (opts.min_radius + opts.max_radius) / 2.0,
    };

    let fill = |t: &str| match partition {
        Some(p) => p
            .assignment
            .get(t)
            .map_or("#cccccc", |cid| PALETTE[cid % PALETTE.len()]),
        None => "#cccccc",
    };

    // label the top-k vertices by size score (frequency fallback)
    let mut ranked: Vec<&String> = g.vertices.keys().collect();
    ranked.sort_by(|a, b| {
        let (sa, sb) = match size_by {
            Some(table) => (table.score(a), table.score(b)),
            None => (
                g.vertices[*a].frequency as f64,
                g.vertices[*b].frequency as f64,
            ),
        };
        sb.partial_cmp(&sa)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.cmp(b))
    });
    let labeled: BTreeSet<&String> = ranked.into_iter().take(opts.label_top_k).collect();

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = fmt(opts.width),
        h = fmt(opts.height)
    ));
    out.push_str("  <g stroke=\"#999999\" stroke-opacity=\"0.6\">\n");
    let max_weight = g.edges.values().copied().max().unwrap_or(1) as f64;
    for (EdgeKey(a, b), &w) in &g.edges {
        let (x1, y1) = place(a);
        let (x2, y2) = place(b);
        let width = 0.5 + 2.5 * (w as f64 / max_weight);
        out.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke-width=\"{}\"/>\n",
            fmt(x1),
            fmt(y1),
            fmt(x2),
            fmt(y2),
            fmt(width)
        ));
    }
    out.push_str("  </g>\n  <g stroke=\"#333333\" stroke-width=\"0.5\">\n");
    for tag in g.vertices.keys() {
        let (x, y) = place(tag);
        out.push_str(&format!(
            "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>\n",
            fmt(x),
            fmt(y),
            fmt(radius(tag)),
            fill(tag)
        ));
    }
    out.push_str("  </g>\n  <g font-family=\"sans-serif\" font-size=\"11\" fill=\"#111111\">\n");
    for tag in g.vertices.keys() {
        if !labeled.contains(tag) {
            continue;
        }
        let (x, y) = place(tag);
        out.push_str(&format!(
            "    <text x=\"{}\" y=\"{}\">{}</text>\n",
            fmt(x + radius(tag) + 2.0),
            fmt(y + 4.0),
            xml_escape(tag)
        ));
    }
    out.push_str("  </g>\n</svg>\n");
    Ok(out)
}
