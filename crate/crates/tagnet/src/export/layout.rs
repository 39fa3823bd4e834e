//! Deterministic force-directed layout (spring/repulsion style, edge
//! attraction scaled by weight), rescaled into the unit square.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TagnetError};
use crate::graph::{CooccurrenceGraph, EdgeKey};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutResult {
    /// Vertex coordinates, both in [0, 1] after the final rescale.
    pub positions: BTreeMap<String, (f64, f64)>,
    pub seed: u64,
    pub iterations: usize,
}

pub const DEFAULT_ITERATIONS: usize = 500;

/// Compute a force-directed layout. Identical inputs (graph, iterations,
/// seed) give identical coordinates.
pub fn layout_force(g: &CooccurrenceGraph, iterations: usize, seed: u64) -> Result<LayoutResult> {
    if g.vertices.is_empty() {
        return Err(TagnetError::EmptyGraph);
    }
    let tags: Vec<&String> = g.vertices.keys().collect();
    let index: BTreeMap<&str, usize> = tags
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let n = tags.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect();

    let max_weight = g.edges.values().copied().max().unwrap_or(1) as f64;
    let edges: Vec<(usize, usize, f64)> = g
        .edges
        .iter()
        .map(|(EdgeKey(a, b), &w)| (index[a.as_str()], index[b.as_str()], w as f64 / max_weight))
        .collect();

    let k = (1.0 / n as f64).sqrt();
    let min_dist = 1e-9;
    for step in 0..iterations {
        // linear cooling
        let temp = 0.1 * (1.0 - step as f64 / iterations.max(1) as f64);
        let mut disp = vec![(0.0_f64, 0.0_f64); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let d = (dx * dx + dy * dy).sqrt().max(min_dist);
                let repulse = k * k / d;
                let (ux, uy) = (dx / d, dy / d);
                disp[i].0 += ux * repulse;
                disp[i].1 += uy * repulse;
                disp[j].0 -= ux * repulse;
                disp[j].1 -= uy * repulse;
            }
        }
        for &(i, j, w) in &edges {
            let dx = pos[i].0 - pos[j].0;
            let dy = pos[i].1 - pos[j].1;
            let d = (dx * dx + dy * dy).sqrt().max(min_dist);
            let attract = w * d * d / k;
            let (ux, uy) = (dx / d, dy / d);
            disp[i].0 -= ux * attract;
            disp[i].1 -= uy * attract;
            disp[j].0 += ux * attract;
            disp[j].1 += uy * attract;
        }
        for i in 0..n {
            let (dx, dy) = disp[i];
            let d = (dx * dx + dy * dy).sqrt().max(min_dist);
            let capped = d.min(temp);
            pos[i].0 += dx / d * capped;
            pos[i].1 += dy / d * capped;
        }
    }

    // rescale to the unit square; degenerate extents collapse to 0.5
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pos {
        min_x = min_x.min(x);
        max_x = max_x.max(x);
        min_y = min_y.min(y);
        max_y = max_y.max(y);
    }
    let rescale = |v: f64, lo: f64, hi: f64| {
        if hi - lo < 1e-12 {
            0.5
        } else {
            (v - lo) / (hi - lo)
        }
    };
    let positions = tags
        .into_iter()
        .zip(pos)
        .map(|(t, (x, y))| {
            (
                t.clone(),
                (rescale(x, min_x, max_x), rescale(y, min_y, max_y)),
            )
        })
        .collect();
    Ok(LayoutResult {
        positions,
        seed,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::test_support::{add_vertex, graph_from_edges};

    #[test]
    fn single_vertex_sits_in_the_center() {
        let mut g = CooccurrenceGraph::default();
        add_vertex(&mut g, "a", 1);
        let layout = layout_force(&g, 100, 42).unwrap();
        assert_eq!(layout.positions["a"], (0.5, 0.5));
    }

    #[test]
    fn same_inputs_give_identical_coordinates() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 2), ("c", "d", 1)]);
        let l1 = layout_force(&g, 200, 7).unwrap();
        let l2 = layout_force(&g, 200, 7).unwrap();
        assert_eq!(l1, l2);
    }

    #[test]
    fn different_seeds_give_different_coordinates() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 2), ("c", "d", 1)]);
        let l1 = layout_force(&g, 200, 7).unwrap();
        let l2 = layout_force(&g, 200, 8).unwrap();
        assert_ne!(l1.positions, l2.positions);
    }

    #[test]
    fn coordinates_stay_in_the_unit_square() {
        let g = graph_from_edges(&[("a", "b", 1), ("c", "d", 5), ("b", "c", 2), ("d", "e", 1)]);
        let layout = layout_force(&g, 300, 3).unwrap();
        for &(x, y) in layout.positions.values() {
            assert!(x.is_finite() && y.is_finite());
            assert!((-1e-9..=1.0 + 1e-9).contains(&x));
            assert!((-1e-9..=1.0 + 1e-9).contains(&y));
        }
    }

    #[test]
    fn connected_vertices_end_up_closer_on_average() {
        // a-b connected; c, d isolated; averaged over seeds
        let mut connected_total = 0.0;
        let mut disconnected_total = 0.0;
        for seed in 0..10 {
            let mut g = graph_from_edges(&[("a", "b", 3)]);
            add_vertex(&mut g, "c", 1);
            add_vertex(&mut g, "d", 1);
            let layout = layout_force(&g, 300, seed).unwrap();
            let dist = |p: (f64, f64), q: (f64, f64)| {
                ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
            };
            connected_total += dist(layout.positions["a"], layout.positions["b"]);
            disconnected_total += dist(layout.positions["c"], layout.positions["d"]);
        }
        assert!(
            connected_total < disconnected_total,
            "connected {connected_total} vs disconnected {disconnected_total}"
        );
    }

    #[test]
    fn empty_graph_is_rejected() {
        assert!(layout_force(&CooccurrenceGraph::default(), 10, 0).is_err());
    }
}
