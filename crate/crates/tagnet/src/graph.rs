//! Weighted undirected hashtag co-occurrence graph and its projections.
//!
//! An edge's weight counts the posts in which both tags appear. Vertex and
//! edge storage is ordered, so construction and serialization are
//! deterministic regardless of input order.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::corpus::PostCollection;
use crate::error::{Result, TagnetError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexMeta {
    /// Number of posts containing the tag.
    pub frequency: u64,
    #[serde(default)]
    pub is_query: bool,
}

/// Unordered vertex pair, stored with the endpoints sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey(pub String, pub String);

impl EdgeKey {
    pub fn new(a: &str, b: &str) -> EdgeKey {
        if a <= b {
            EdgeKey(a.to_owned(), b.to_owned())
        } else {
            EdgeKey(b.to_owned(), a.to_owned())
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooccurrenceGraph {
    pub vertices: BTreeMap<String, VertexMeta>,
    pub edges: BTreeMap<EdgeKey, u64>,
    /// Number of posts that contributed to the graph.
    pub post_count: u64,
}

impl CooccurrenceGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    pub fn weight(&self, a: &str, b: &str) -> u64 {
        self.edges.get(&EdgeKey::new(a, b)).copied().unwrap_or(0)
    }

    /// Neighbors of `v` with edge weights, in tag order.
    pub fn neighbors<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a str, u64)> + 'a {
        self.edges.iter().filter_map(move |(EdgeKey(a, b), &w)| {
            if a == v {
                Some((b.as_str(), w))
            } else if b == v {
                Some((a.as_str(), w))
            } else {
                None
            }
        })
    }

    /// Adjacency map for algorithms that need fast neighbor access.
    pub fn adjacency(&self) -> BTreeMap<&str, Vec<(&str, u64)>> {
        let mut adj: BTreeMap<&str, Vec<(&str, u64)>> = BTreeMap::new();
        for tag in self.vertices.keys() {
            adj.insert(tag.as_str(), Vec::new());
        }
        for (EdgeKey(a, b), &w) in &self.edges {
            adj.get_mut(a.as_str()).unwrap().push((b.as_str(), w));
            adj.get_mut(b.as_str()).unwrap().push((a.as_str(), w));
        }
        adj
    }

    /// Induced subgraph on the given vertex set; edges with both endpoints
    /// retained survive with their weights.
    pub fn induced(&self, keep: &BTreeSet<String>) -> CooccurrenceGraph {
        let vertices: BTreeMap<String, VertexMeta> = self
            .vertices
            .iter()
            .filter(|(tag, _)| keep.contains(*tag))
            .map(|(tag, meta)| (tag.clone(), *meta))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|(EdgeKey(a, b), _)| keep.contains(a) && keep.contains(b))
            .map(|(k, &w)| (k.clone(), w))
            .collect();
        CooccurrenceGraph {
            vertices,
            edges,
            post_count: self.post_count,
        }
    }

    /// Connected components as sorted vertex sets, largest first; ties broken
    /// by the lexicographically smallest member.
    pub fn components(&self) -> Vec<BTreeSet<String>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut components = Vec::new();
        for start in self.vertices.keys() {
            if seen.contains(start.as_str()) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start.as_str()]);
            seen.insert(start.as_str());
            while let Some(v) = queue.pop_front() {
                comp.insert(v.to_owned());
                for &(u, _) in &adj[v] {
                    if seen.insert(u) {
                        queue.push_back(u);
                    }
                }
            }
            components.push(comp);
        }
        components.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| a.iter().next().cmp(&b.iter().next()))
        });
        components
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

/// Build the co-occurrence graph: every unordered pair of distinct tags in a
/// post increments that pair's edge weight by one. Assumes tags within a
/// post are already unique (normalized corpus).
pub fn build_graph(collection: &PostCollection) -> CooccurrenceGraph {
    let mut graph = CooccurrenceGraph::default();
    for post in &collection.posts {
        let mut tags: Vec<&str> = post.hashtags.iter().map(String::as_str).collect();
        tags.sort_unstable();
        tags.dedup();
        for &tag in &tags {
            let meta = graph.vertices.entry(tag.to_owned()).or_default();
            meta.frequency += 1;
        }
        for i in 0..tags.len() {
            for j in (i + 1)..tags.len() {
                *graph.edges.entry(EdgeKey::new(tags[i], tags[j])).or_insert(0) += 1;
            }
        }
        graph.post_count += 1;
    }
    for q in &collection.query {
        if let Some(meta) = graph.vertices.get_mut(q) {
            meta.is_query = true;
        }
    }
    graph
}

/// Induced subgraph on the `n` highest-frequency vertices (ties broken
/// lexicographically), then edges under `min_edge_weight` dropped.
pub fn project_top_n(g: &CooccurrenceGraph, n: usize, min_edge_weight: u64) -> Result<CooccurrenceGraph> {
    if n == 0 {
        return Err(TagnetError::InvalidConfig("top-n must be at least 1".into()));
    }
    if min_edge_weight == 0 {
        return Err(TagnetError::InvalidConfig(
            "min_edge_weight must be at least 1".into(),
        ));
    }
    let mut ranked: Vec<(&String, u64)> = g.vertices.iter().map(|(t, m)| (t, m.frequency)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let keep: BTreeSet<String> = ranked.into_iter().take(n).map(|(t, _)| t.clone()).collect();
    let mut out = g.induced(&keep);
    out.edges.retain(|_, w| *w >= min_edge_weight);
    Ok(out)
}

/// Induced subgraph on the connected component with the most vertices; ties
/// broken by lexicographically smallest member. Empty graphs pass through.
pub fn largest_component(g: &CooccurrenceGraph) -> CooccurrenceGraph {
    match g.components().into_iter().next() {
        Some(comp) => g.induced(&comp),
        None => CooccurrenceGraph::default(),
    }
}

/// Induced subgraph on the vertices not in `tags`.
pub fn exclude_tags(g: &CooccurrenceGraph, tags: &BTreeSet<String>) -> CooccurrenceGraph {
    let keep: BTreeSet<String> = g
        .vertices
        .keys()
        .filter(|t| !tags.contains(*t))
        .cloned()
        .collect();
    g.induced(&keep)
}

// --- canonical JSON form (sorted vertices, sorted edges) ---

#[derive(Debug, Serialize, Deserialize)]
struct VertexJson {
    tag: String,
    frequency: u64,
    #[serde(default)]
    is_query: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeJson {
    source: String,
    target: String,
    weight: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphJson {
    post_count: u64,
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
}

pub fn to_canonical_json(g: &CooccurrenceGraph) -> String {
    let doc = GraphJson {
        post_count: g.post_count,
        vertices: g
            .vertices
            .iter()
            .map(|(tag, meta)| VertexJson {
                tag: tag.clone(),
                frequency: meta.frequency,
                is_query: meta.is_query,
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|(EdgeKey(a, b), &w)| EdgeJson {
                source: a.clone(),
                target: b.clone(),
                weight: w,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph serialization cannot fail")
}

pub fn from_canonical_json(json: &str) -> Result<CooccurrenceGraph> {
    let doc: GraphJson = serde_json::from_str(json)
        .map_err(|e| TagnetError::InvalidInput(format!("bad graph JSON: {e}")))?;
    let mut g = CooccurrenceGraph {
        post_count: doc.post_count,
        ..Default::default()
    };
    for v in doc.vertices {
        g.vertices.insert(
            v.tag,
            VertexMeta {
                frequency: v.frequency,
                is_query: v.is_query,
            },
        );
    }
    for e in doc.edges {
        if !g.vertices.contains_key(&e.source) || !g.vertices.contains_key(&e.target) {
            return Err(TagnetError::InvalidInput(format!(
                "edge {}--{} references a missing vertex",
                e.source, e.target
            )));
        }
        if e.source == e.target || e.weight == 0 {
            return Err(TagnetError::InvalidInput(format!(
                "invalid edge {}--{} (weight {})",
                e.source, e.target, e.weight
            )));
        }
        g.edges.insert(EdgeKey::new(&e.source, &e.target), e.weight);
    }
    Ok(g)
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::corpus::{Platform, Post};

    fn post(id: &str, tags: &[&str]) -> Post {
        Post {
            id: id.into(),
            platform: Platform::Instagram,
            timestamp: None,
            text: None,
            hashtags: tags.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn collection(posts: Vec<Post>) -> PostCollection {
        PostCollection {
            posts,
            ..Default::default()
        }
    }

    #[test]
    fn single_post_forms_a_clique() {
        let g = build_graph(&collection(vec![post("p1", &["a", "b", "c"])]));
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.weight("a", "b"), 1);
        assert_eq!(g.weight("a", "c"), 1);
        assert_eq!(g.weight("b", "c"), 1);
        assert!(g.vertices.values().all(|m| m.frequency == 1));
    }

    #[test]
    fn repeated_pairs_accumulate_weight() {
        let g = build_graph(&collection(vec![
            post("p1", &["a", "b"]),
            post("p2", &["a", "b"]),
        ]));
        assert_eq!(g.weight("a", "b"), 2);
        assert_eq!(g.post_count, 2);
    }

    #[test]
    fn singleton_posts_add_vertices_but_no_edges() {
        let g = build_graph(&collection(vec![post("p1", &["a"]), post("p2", &["b"])]));
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn query_tags_are_flagged() {
        let mut coll = collection(vec![post("p1", &["reef", "diving"])]);
        coll.query.insert("reef".into());
        let g = build_graph(&coll);
        assert!(g.vertices["reef"].is_query);
        assert!(!g.vertices["diving"].is_query);
    }

    #[test]
    fn build_is_order_independent() {
        let posts = vec![
            post("p1", &["a", "b", "c"]),
            post("p2", &["b", "d"]),
            post("p3", &["a", "d"]),
        ];
        let mut rev = posts.clone();
        rev.reverse();
        assert_eq!(build_graph(&collection(posts)), build_graph(&collection(rev)));
    }

    #[test]
    fn edge_weight_identity_holds() {
        let posts = vec![
            post("p1", &["a", "b", "c"]),
            post("p2", &["a", "b"]),
            post("p3", &["x"]),
            post("p4", &["a", "b", "c", "d"]),
        ];
        let g = build_graph(&collection(posts.clone()));
        let expected: u64 = posts
            .iter()
            .map(|p| {
                let k = p.hashtags.len() as u64;
                k * (k - 1) / 2
            })
            .sum();
        assert_eq!(g.total_weight(), expected);
    }

    #[test]
    fn top_n_identity_projection() {
        let g = build_graph(&collection(vec![post("p1", &["a", "b", "c"])]));
        let p = project_top_n(&g, 3, 1).unwrap();
        assert_eq!(p, g);
    }

    #[test]
    fn top_n_keeps_highest_frequency_vertices() {
        let mut g = graph_from_edges(&[("a", "b", 1), ("b", "c", 1)]);
        g.vertices.get_mut("a").unwrap().frequency = 5;
        g.vertices.get_mut("b").unwrap().frequency = 3;
        g.vertices.get_mut("c").unwrap().frequency = 1;
        let p = project_top_n(&g, 2, 1).unwrap();
        assert_eq!(p.vertex_count(), 2);
        assert!(p.vertices.contains_key("a") && p.vertices.contains_key("b"));
        assert_eq!(p.weight("a", "b"), 1);
    }

    #[test]
    fn top_n_larger_than_graph_returns_full_graph() {
        let g = build_graph(&collection(vec![post("p1", &["a", "b"])]));
        assert_eq!(project_top_n(&g, 100, 1).unwrap(), g);
    }

    #[test]
    fn min_edge_weight_can_empty_the_edge_set() {
        let g = build_graph(&collection(vec![post("p1", &["a", "b"])]));
        let p = project_top_n(&g, 2, 99).unwrap();
        assert_eq!(p.vertex_count(), 2);
        assert_eq!(p.edge_count(), 0);
    }

    #[test]
    fn largest_component_of_connected_graph_is_identity() {
        let g = graph_from_edges(&[("a", "b", 1), ("b", "c", 1)]);
        assert_eq!(largest_component(&g), g);
    }

    #[test]
    fn largest_component_picks_the_bigger_side() {
        let g = graph_from_edges(&[
            ("a", "b", 1),
            ("b", "c", 1),
            ("c", "d", 1),
            ("x", "y", 1),
        ]);
        let lc = largest_component(&g);
        assert_eq!(lc.vertex_count(), 4);
        assert!(lc.vertices.contains_key("a"));
        assert!(!lc.vertices.contains_key("x"));
    }

    #[test]
    fn edgeless_graph_largest_component_is_lexicographic_smallest_vertex() {
        let mut g = CooccurrenceGraph::default();
        add_vertex(&mut g, "c", 1);
        add_vertex(&mut g, "a", 1);
        add_vertex(&mut g, "b", 1);
        let lc = largest_component(&g);
        assert_eq!(lc.vertex_count(), 1);
        assert!(lc.vertices.contains_key("a"));
    }

    #[test]
    fn empty_graph_largest_component_is_empty() {
        let lc = largest_component(&CooccurrenceGraph::default());
        assert_eq!(lc.vertex_count(), 0);
    }

    #[test]
    fn exclude_nothing_is_identity() {
        let g = graph_from_edges(&[("a", "b", 2)]);
        assert_eq!(exclude_tags(&g, &BTreeSet::new()), g);
    }

    #[test]
    fn excluding_star_center_leaves_no_edges() {
        let g = graph_from_edges(&[("q", "a", 1), ("q", "b", 1), ("q", "c", 1)]);
        let out = exclude_tags(&g, &["q".to_string()].into());
        assert_eq!(out.vertex_count(), 3);
        assert_eq!(out.edge_count(), 0);
    }

    #[test]
    fn excluding_everything_gives_the_empty_graph() {
        let g = graph_from_edges(&[("a", "b", 1)]);
        let all: BTreeSet<String> = g.vertices.keys().cloned().collect();
        let out = exclude_tags(&g, &all);
        assert_eq!(out.vertex_count(), 0);
        assert_eq!(out.edge_count(), 0);
    }

    #[test]
    fn projections_preserve_graph_invariants() {
        let g = build_graph(&collection(vec![
            post("p1", &["a", "b", "c"]),
            post("p2", &["c", "d"]),
            post("p3", &["d", "e", "a"]),
        ]));
        for sub in [
            project_top_n(&g, 3, 1).unwrap(),
            largest_component(&g),
            exclude_tags(&g, &["a".to_string()].into()),
        ] {
            for (EdgeKey(a, b), &w) in &sub.edges {
                assert_ne!(a, b, "self loop");
                assert!(w >= 1);
                assert!(sub.vertices.contains_key(a) && sub.vertices.contains_key(b));
            }
        }
    }

    #[test]
    fn canonical_json_round_trips() {
        let mut coll = collection(vec![
            post("p1", &["a", "b", "c"]),
            post("p2", &["c", "d"]),
        ]);
        coll.query.insert("a".into());
        let g = build_graph(&coll);
        let json = to_canonical_json(&g);
        let back = from_canonical_json(&json).unwrap();
        assert_eq!(back, g);
        // byte stability
        assert_eq!(to_canonical_json(&back), json);
    }

    #[test]
    fn json_with_dangling_edge_is_rejected() {
        let json = r#"{"post_count":0,"vertices":[{"tag":"a","frequency":1}],"edges":[{"source":"a","target":"b","weight":1}]}"#;
        assert!(from_canonical_json(json).is_err());
    }

    #[test]
    fn invalid_projection_parameters_are_rejected() {
        let g = graph_from_edges(&[("a", "b", 1)]);
        assert!(project_top_n(&g, 0, 1).is_err());
        assert!(project_top_n(&g, 1, 0).is_err());
    }
}
