//! Community detection by greedy modularity maximization (agglomerative
//! merge of the community pair with the best modularity gain), with the
//! weighted modularity Q = sum_c [ W_c/W - (S_c/2W)^2 ].
//!
//! All tie-breaks are lexicographic on the community representative (its
//! smallest member tag), so results are deterministic.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::centrality::CentralityTable;
use crate::error::{Result, TagnetError};
use crate::graph::{CooccurrenceGraph, EdgeKey};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunityPartition {
    /// Vertex -> community id; ids are dense, 0-based, ordered by community
    /// size descending (ties by smallest member).
    pub assignment: BTreeMap<String, usize>,
    pub q: f64,
}

impl CommunityPartition {
    pub fn community_count(&self) -> usize {
        self.assignment.values().max().map_or(0, |m| m + 1)
    }

    /// Members per community, in id order.
    pub fn communities(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (tag, &cid) in &self.assignment {
            out[cid].push(tag.clone());
        }
        out
    }
}

/// One agglomerative merge: the two community representatives joined and the
/// modularity of the partition after the merge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Merge {
    pub a: String,
    pub b: String,
    pub q_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dendrogram {
    /// Vertices in tag order (the leaf order).
    pub vertices: Vec<String>,
    /// Modularity of the all-singletons start state.
    pub initial_q: f64,
    pub merges: Vec<Merge>,
}

/// Q from per-community (intra-weight, degree-sum) pairs. Shared by the
/// direct evaluation and the dendrogram bookkeeping so both agree bitwise up
/// to summation order.
fn q_from_components<'a>(total_weight: u64, comps: impl Iterator<Item = &'a (u64, u64)>) -> f64 {
    let w = total_weight as f64;
    comps
        .map(|&(intra, s)| intra as f64 / w - (s as f64 / (2.0 * w)).powi(2))
        .sum()
}

/// Modularity of an arbitrary assignment. Every vertex must be assigned.
pub fn modularity(g: &CooccurrenceGraph, assignment: &BTreeMap<String, usize>) -> Result<f64> {
    let missing: Vec<String> = g
        .vertices
        .keys()
        .filter(|t| !assignment.contains_key(*t))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(TagnetError::PartitionMismatch { missing });
    }
    let total = g.total_weight();
    if total == 0 {
        return Err(TagnetError::EdgelessGraph);
    }
    let mut comps: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for (EdgeKey(a, b), &w) in &g.edges {
        let (ca, cb) = (assignment[a], assignment[b]);
        if ca == cb {
            comps.entry(ca).or_insert((0, 0)).0 += w;
        }
        comps.entry(ca).or_insert((0, 0)).1 += w;
        comps.entry(cb).or_insert((0, 0)).1 += w;
    }
    for cid in assignment.values() {
        comps.entry(*cid).or_insert((0, 0));
    }
    Ok(q_from_components(total, comps.values()))
}

/// Greedy modularity optimization: start from singletons, repeatedly merge
/// the connected community pair with the largest modularity gain, recording
/// Q after every merge. Components never merge; the algorithm stops when
/// every component is one community.
pub fn fast_greedy(g: &CooccurrenceGraph) -> Result<Dendrogram> {
    let total = g.total_weight();
    if total == 0 {
        return Err(TagnetError::EdgelessGraph);
    }
    let w = total as f64;

    // Community state keyed by representative (smallest member).
    let mut intra: BTreeMap<String, u64> = BTreeMap::new();
    let mut strength: BTreeMap<String, u64> = BTreeMap::new();
    // Representative of the community each vertex currently belongs to.
    let mut rep_of: BTreeMap<String, String> = BTreeMap::new();
    for tag in g.vertices.keys() {
        intra.insert(tag.clone(), 0);
        strength.insert(tag.clone(), 0);
        rep_of.insert(tag.clone(), tag.clone());
    }
    // Inter-community weights for connected pairs, keys ordered.
    let mut between: BTreeMap<(String, String), u64> = BTreeMap::new();
    for (EdgeKey(a, b), &weight) in &g.edges {
        *strength.get_mut(a).unwrap() += weight;
        *strength.get_mut(b).unwrap() += weight;
        *between.entry((a.clone(), b.clone())).or_insert(0) += weight;
    }

    let vertices: Vec<String> = g.vertices.keys().cloned().collect();
    let initial_q = q_from_components(
        total,
        // singleton communities: intra 0, degree sum per vertex
        &mut vertices
            .iter()
            .map(|t| (0u64, strength[t]))
            .collect::<Vec<_>>()
            .iter(),
    );
    let mut merges = Vec::new();

    while !between.is_empty() {
        // Largest gain; on ties the lexicographically smallest pair wins
        // because iteration is ascending and replacement is strict.
        let mut best: Option<(f64, (String, String))> = None;
        for ((a, b), &wab) in &between {
            let gain = wab as f64 / w
                - (strength[a] as f64) * (strength[b] as f64) / (2.0 * w * w);
            if best.as_ref().is_none_or(|(bg, _)| gain > *bg) {
                best = Some((gain, (a.clone(), b.clone())));
            }
        }
        let (_, (ra, rb)) = best.expect("between is non-empty");

        // Merge rb into ra (ra < rb by key construction).
        let wab = between.remove(&(ra.clone(), rb.clone())).unwrap();
        let intra_b = intra.remove(&rb).unwrap();
        let s_b = strength.remove(&rb).unwrap();
        *intra.get_mut(&ra).unwrap() += intra_b + wab;
        *strength.get_mut(&ra).unwrap() += s_b;
        for (tag, rep) in rep_of.iter_mut() {
            let _ = tag;
            if *rep == rb {
                *rep = ra.clone();
            }
        }
        // Rewire rb's remaining inter-community edges onto ra.
        let stale: Vec<(String, String)> = between
            .keys()
            .filter(|(x, y)| *x == rb || *y == rb)
            .cloned()
            .collect();
        for key in stale {
            let weight = between.remove(&key).unwrap();
            let other = if key.0 == rb { key.1 } else { key.0 };
            let new_key = if other < ra {
                (other, ra.clone())
            } else {
                (ra.clone(), other)
            };
            *between.entry(new_key).or_insert(0) += weight;
        }

        let q_after = q_from_components(
            total,
            &mut intra
                .iter()
                .map(|(rep, &i)| (i, strength[rep]))
                .collect::<Vec<_>>()
                .iter(),
        );
        merges.push(Merge {
            a: ra,
            b: rb,
            q_after,
        });
    }

    Ok(Dendrogram {
        vertices,
        initial_q,
        merges,
    })
}

/// Cut the dendrogram at the merge step with maximal Q (the all-singletons
/// state counts as step zero; the earliest maximal step wins ties).
pub fn best_partition(d: &Dendrogram) -> CommunityPartition {
    let mut best_step = 0usize;
    let mut best_q = d.initial_q;
    for (i, merge) in d.merges.iter().enumerate() {
        if merge.q_after > best_q {
            best_q = merge.q_after;
            best_step = i + 1;
        }
    }

    // Replay merges up to the chosen step.
    let mut rep_of: BTreeMap<String, String> =
        d.vertices.iter().map(|t| (t.clone(), t.clone())).collect();
    for merge in d.merges.iter().take(best_step) {
        for rep in rep_of.values_mut() {
            if *rep == merge.b {
                *rep = merge.a.clone();
            }
        }
    }

    let mut groups: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (tag, rep) in &rep_of {
        groups.entry(rep.clone()).or_default().push(tag.clone());
    }
    let mut ordered: Vec<(String, Vec<String>)> = groups.into_iter().collect();
    ordered.sort_by(|(ra, ma), (rb, mb)| mb.len().cmp(&ma.len()).then_with(|| ra.cmp(rb)));

    let mut assignment = BTreeMap::new();
    for (cid, (_, members)) in ordered.into_iter().enumerate() {
        for tag in members {
            assignment.insert(tag, cid);
        }
    }
    CommunityPartition {
        assignment,
        q: best_q,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommunitySummary {
    pub id: usize,
    pub size: usize,
    /// Top tags with their centrality scores, score-descending.
    pub top_tags: Vec<(String, f64)>,
}

/// Per-community top-k tags by centrality, communities ordered by size
/// descending (smallest-member ties).
pub fn community_summary(
    partition: &CommunityPartition,
    centrality: &CentralityTable,
    top_k: usize,
) -> Result<Vec<CommunitySummary>> {
    let missing: Vec<String> = partition
        .assignment
        .keys()
        .filter(|t| !centrality.scores.contains_key(*t))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(TagnetError::AttributeMismatch { missing });
    }

    let mut communities: Vec<(usize, Vec<String>)> = partition
        .communities()
        .into_iter()
        .enumerate()
        .collect();
    communities.sort_by(|(ia, ma), (ib, mb)| {
        mb.len()
            .cmp(&ma.len())
            .then_with(|| ma.first().cmp(&mb.first()))
            .then_with(|| ia.cmp(ib))
    });

    Ok(communities
        .into_iter()
        .map(|(id, mut members)| {
            let size = members.len();
            members.sort_by(|a, b| {
                centrality
                    .score(b)
                    .partial_cmp(&centrality.score(a))
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then_with(|| a.cmp(b))
            });
            let top_tags = members
                .into_iter()
                .take(top_k)
                .map(|t| {
                    let s = centrality.score(&t);
                    (t, s)
                })
                .collect();
            CommunitySummary { id, size, top_tags }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{degree, Measure};
    use crate::graph::test_support::graph_from_edges;

    fn two_triangles_with_bridge() -> CooccurrenceGraph {
        graph_from_edges(&[
            ("a", "b", 1),
            ("b", "c", 1),
            ("a", "c", 1),
            ("d", "e", 1),
            ("e", "f", 1),
            ("d", "f", 1),
            ("c", "d", 1),
        ])
    }

    fn assign(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(t, c)| (t.to_string(), *c)).collect()
    }

    #[test]
    fn one_community_has_zero_modularity() {
        let g = two_triangles_with_bridge();
        let all: BTreeMap<String, usize> = g.vertices.keys().map(|t| (t.clone(), 0)).collect();
        assert!(modularity(&g, &all).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_triangle_partition_scores_five_fourteenths() {
        let g = two_triangles_with_bridge();
        let part = assign(&[("a", 0), ("b", 0), ("c", 0), ("d", 1), ("e", 1), ("f", 1)]);
        let q = modularity(&g, &part).unwrap();
        assert!((q - 5.0 / 14.0).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn singletons_on_triangle_score_minus_one_third() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 1), ("a", "c", 1)]);
        let part = assign(&[("a", 0), ("b", 1), ("c", 2)]);
        let q = modularity(&g, &part).unwrap();
        assert!((q + 1.0 / 3.0).abs() < 1e-12, "q = {q}");
    }

    #[test]
    fn missing_vertex_is_an_error() {
        let g = graph_from_edges(&[("a", "b", 1)]);
        let part = assign(&[("a", 0)]);
        assert!(matches!(
            modularity(&g, &part),
            Err(TagnetError::PartitionMismatch { .. })
        ));
    }

    #[test]
    fn fast_greedy_recovers_the_two_triangles() {
        let g = two_triangles_with_bridge();
        let d = fast_greedy(&g).unwrap();
        assert_eq!(d.merges.len(), g.vertex_count() - 1); // connected: k = 1
        let part = best_partition(&d);
        assert_eq!(part.community_count(), 2);
        assert!((part.q - 5.0 / 14.0).abs() < 1e-9, "q = {}", part.q);
        assert_eq!(part.assignment["a"], part.assignment["b"]);
        assert_eq!(part.assignment["a"], part.assignment["c"]);
        assert_eq!(part.assignment["d"], part.assignment["e"]);
        assert_ne!(part.assignment["a"], part.assignment["d"]);
    }

    #[test]
    fn single_edge_collapses_to_one_community() {
        let g = graph_from_edges(&[("a", "b", 1)]);
        let d = fast_greedy(&g).unwrap();
        assert_eq!(d.merges.len(), 1);
        assert!((d.initial_q + 0.5).abs() < 1e-15);
        assert!(d.merges[0].q_after.abs() < 1e-15);
        let part = best_partition(&d);
        assert_eq!(part.community_count(), 1);
        assert!(part.q.abs() < 1e-15);
    }

    #[test]
    fn disjoint_edges_stay_separate() {
        let g = graph_from_edges(&[("a", "b", 1), ("c", "d", 1)]);
        let d = fast_greedy(&g).unwrap();
        assert_eq!(d.merges.len(), 2); // n - k = 4 - 2
        let part = best_partition(&d);
        assert_eq!(part.community_count(), 2);
        assert!((part.q - 0.5).abs() < 1e-12);
        assert_eq!(part.assignment["a"], part.assignment["b"]);
        assert_ne!(part.assignment["a"], part.assignment["c"]);
    }

    #[test]
    fn complete_graph_is_one_community() {
        let mut edges = Vec::new();
        let tags = ["a", "b", "c", "d", "e"];
        for i in 0..tags.len() {
            for j in (i + 1)..tags.len() {
                edges.push((tags[i], tags[j], 1));
            }
        }
        let part = best_partition(&fast_greedy(&graph_from_edges(&edges)).unwrap());
        assert_eq!(part.community_count(), 1);
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let mut g = CooccurrenceGraph::default();
        crate::graph::test_support::add_vertex(&mut g, "a", 1);
        assert!(matches!(fast_greedy(&g), Err(TagnetError::EdgelessGraph)));
    }

    #[test]
    fn stored_q_matches_direct_evaluation() {
        let g = two_triangles_with_bridge();
        let part = best_partition(&fast_greedy(&g).unwrap());
        let direct = modularity(&g, &part.assignment).unwrap();
        assert!((part.q - direct).abs() < 1e-12);
    }

    #[test]
    fn relabeling_vertices_permutes_the_partition() {
        let g = two_triangles_with_bridge();
        let renamed = graph_from_edges(&[
            ("x1", "x2", 1),
            ("x2", "x3", 1),
            ("x1", "x3", 1),
            ("y1", "y2", 1),
            ("y2", "y3", 1),
            ("y1", "y3", 1),
            ("x3", "y1", 1),
        ]);
        let p1 = best_partition(&fast_greedy(&g).unwrap());
        let p2 = best_partition(&fast_greedy(&renamed).unwrap());
        let names = [
            ("a", "x1"),
            ("b", "x2"),
            ("c", "x3"),
            ("d", "y1"),
            ("e", "y2"),
            ("f", "y3"),
        ];
        for (old_a, new_a) in names {
            for (old_b, new_b) in names {
                assert_eq!(
                    p1.assignment[old_a] == p1.assignment[old_b],
                    p2.assignment[new_a] == p2.assignment[new_b],
                    "{old_a}/{old_b}"
                );
            }
        }
        assert!((p1.q - p2.q).abs() < 1e-12);
    }

    #[test]
    fn summary_orders_by_size_then_score() {
        let g = two_triangles_with_bridge();
        let part = best_partition(&fast_greedy(&g).unwrap());
        let deg = degree(&g, false);
        assert_eq!(deg.measure, Measure::Degree);
        let summaries = community_summary(&part, &deg, 1).unwrap();
        assert_eq!(summaries.len(), 2);
        // Bridge endpoints have degree 3 and head their communities.
        assert_eq!(summaries[0].top_tags[0].0, "c");
        assert_eq!(summaries[1].top_tags[0].0, "d");
    }

    #[test]
    fn summary_with_top_k_zero_is_empty_lists() {
        let g = two_triangles_with_bridge();
        let part = best_partition(&fast_greedy(&g).unwrap());
        let deg = degree(&g, false);
        let summaries = community_summary(&part, &deg, 0).unwrap();
        assert!(summaries.iter().all(|s| s.top_tags.is_empty()));
    }

    #[test]
    fn summary_with_large_top_k_lists_all_tags() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 1), ("a", "c", 1)]);
        let part = best_partition(&fast_greedy(&g).unwrap());
        let deg = degree(&g, false);
        let summaries = community_summary(&part, &deg, 100).unwrap();
        assert_eq!(summaries[0].top_tags.len(), 3);
    }

    #[test]
    fn summary_rejects_mismatched_tables() {
        let g = two_triangles_with_bridge();
        let part = best_partition(&fast_greedy(&g).unwrap());
        let small = degree(&graph_from_edges(&[("a", "b", 1)]), false);
        assert!(matches!(
            community_summary(&part, &small, 1),
            Err(TagnetError::AttributeMismatch { .. })
        ));
    }

    #[test]
    fn q_values_stay_in_range() {
        let g = two_triangles_with_bridge();
        let d = fast_greedy(&g).unwrap();
        assert!(d.initial_q >= -0.5 && d.initial_q <= 1.0);
        for m in &d.merges {
            assert!(m.q_after >= -0.5 && m.q_after <= 1.0);
        }
    }
}
