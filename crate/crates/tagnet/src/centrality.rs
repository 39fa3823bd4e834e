//! Centrality measures over the co-occurrence graph: degree, betweenness,
//! closeness, eigenvector, Kleinberg hub/authority and PageRank.
//!
//! Power-iteration measures use the shifted matrix A + I so that bipartite
//! structures (where the dominant eigenvalue pair is ±λ) still converge to
//! the Perron vector. All iteration orders are sorted-by-tag, so results are
//! bit-reproducible.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TagnetError};
use crate::graph::{CooccurrenceGraph, EdgeKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Degree,
    WeightedDegree,
    Betweenness,
    Closeness,
    Eigenvector,
    Hub,
    Authority,
    Pagerank,
}

impl Measure {
    /// Canonical column order for reports.
    pub const ALL: [Measure; 8] = [
        Measure::Degree,
        Measure::WeightedDegree,
        Measure::Betweenness,
        Measure::Closeness,
        Measure::Eigenvector,
        Measure::Hub,
        Measure::Authority,
        Measure::Pagerank,
    ];
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Measure::Degree => "degree",
            Measure::WeightedDegree => "weighted_degree",
            Measure::Betweenness => "betweenness",
            Measure::Closeness => "closeness",
            Measure::Eigenvector => "eigenvector",
            Measure::Hub => "hub",
            Measure::Authority => "authority",
            Measure::Pagerank => "pagerank",
        };
        write!(f, "{name}")
    }
}

impl FromStr for Measure {
    type Err = TagnetError;

    fn from_str(s: &str) -> Result<Measure> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "degree" => Ok(Measure::Degree),
            "weighted_degree" => Ok(Measure::WeightedDegree),
            "betweenness" => Ok(Measure::Betweenness),
            "closeness" => Ok(Measure::Closeness),
            "eigenvector" => Ok(Measure::Eigenvector),
            "hub" => Ok(Measure::Hub),
            "authority" => Ok(Measure::Authority),
            "pagerank" => Ok(Measure::Pagerank),
            other => Err(TagnetError::UnknownMeasure(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Every edge has length 1.
    #[default]
    Hop,
    /// Edge length 1/weight: stronger co-occurrence means shorter distance.
    InverseWeight,
}

/// Parameters actually used by a measure, for reporting and reproducibility.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MeasureParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damping: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_mode: Option<DistanceMode>,
    /// Set when an eigenvector-style measure ran on a disconnected graph;
    /// mass concentrates on the component with the largest spectral radius.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disconnected_warning: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityTable {
    pub measure: Measure,
    pub scores: BTreeMap<String, f64>,
    pub params: MeasureParams,
}

impl CentralityTable {
    pub fn score(&self, tag: &str) -> f64 {
        self.scores.get(tag).copied().unwrap_or(0.0)
    }
}

/// Sorted-tag index view of a graph for the numeric algorithms.
struct Indexed {
    tags: Vec<String>,
    adj: Vec<Vec<(usize, f64)>>,
}

impl Indexed {
    fn new(g: &CooccurrenceGraph) -> Indexed {
        let tags: Vec<String> = g.vertices.keys().cloned().collect();
        let index: BTreeMap<&str, usize> = tags
            .iter()
            .enumerate()
            .map(|(i, t)| (t.as_str(), i))
            .collect();
        let mut adj = vec![Vec::new(); tags.len()];
        for (EdgeKey(a, b), &w) in &g.edges {
            let (i, j) = (index[a.as_str()], index[b.as_str()]);
            adj[i].push((j, w as f64));
            adj[j].push((i, w as f64));
        }
        for nbrs in &mut adj {
            nbrs.sort_by_key(|x| x.0);
        }
        Indexed { tags, adj }
    }

    fn len(&self) -> usize {
        self.tags.len()
    }

    fn table(&self, measure: Measure, scores: Vec<f64>, params: MeasureParams) -> CentralityTable {
        CentralityTable {
            measure,
            scores: self
                .tags
                .iter()
                .cloned()
                .zip(scores)
                .collect(),
            params,
        }
    }
}

/// Degree centrality: incident edge count, or sum of incident edge weights.
pub fn degree(g: &CooccurrenceGraph, weighted: bool) -> CentralityTable {
    let ix = Indexed::new(g);
    let scores = ix
        .adj
        .iter()
        .map(|nbrs| {
            if weighted {
                nbrs.iter().map(|&(_, w)| w).sum()
            } else {
                nbrs.len() as f64
            }
        })
        .collect();
    let measure = if weighted {
        Measure::WeightedDegree
    } else {
        Measure::Degree
    };
    ix.table(measure, scores, MeasureParams::default())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// Shifted power iteration x' = x + A x with max-normalization each step.
/// Returns (vector, iterations) once successive normalized iterates differ
/// by less than `tol` in L-infinity.
fn power_iteration(ix: &Indexed, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let n = ix.len();
    let mut x = vec![1.0_f64; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let mut next = x.clone();
        for (i, nbrs) in ix.adj.iter().enumerate() {
            for &(j, w) in nbrs {
                next[i] += w * x[j];
            }
        }
        let m = max_abs(&next);
        if m == 0.0 {
            return Err(TagnetError::EdgelessGraph);
        }
        for v in &mut next {
            *v /= m;
        }
        residual = next
            .iter()
            .zip(x.iter())
            .fold(0.0_f64, |r, (a, b)| r.max((a - b).abs()));
        x = next;
        if residual < tol {
            return Ok((x, iter));
        }
    }
    Err(TagnetError::NotConverged {
        iterations: max_iter,
        residual,
        last_iterate: ix.tags.iter().cloned().zip(x).collect(),
    })
}

/// Eigenvector centrality: dominant eigenvector of the weighted adjacency
/// matrix, max-normalized to 1.
pub fn eigenvector(g: &CooccurrenceGraph, tol: f64, max_iter: usize) -> Result<CentralityTable> {
    if g.vertices.is_empty() {
        return Err(TagnetError::EmptyGraph);
    }
    if g.edges.is_empty() {
        return Err(TagnetError::EdgelessGraph);
    }
    let ix = Indexed::new(g);
    let (x, iterations) = power_iteration(&ix, tol, max_iter)?;
    let disconnected = !g.is_connected();
    Ok(ix.table(
        Measure::Eigenvector,
        x,
        MeasureParams {
            tolerance: Some(tol),
            iterations: Some(iterations),
            disconnected_warning: disconnected.then_some(true),
            ..Default::default()
        },
    ))
}

/// PageRank over the undirected graph, each edge treated as two directed
/// edges with weight-proportional transition probability. The vector is
/// renormalized to sum 1 every step, which also handles isolated vertices
/// (they keep teleport-only mass).
pub fn pagerank(
    g: &CooccurrenceGraph,
    damping: f64,
    tol: f64,
    max_iter: usize,
) -> Result<CentralityTable> {
    if g.vertices.is_empty() {
        return Err(TagnetError::EmptyGraph);
    }
    let ix = Indexed::new(g);
    let n = ix.len();
    let strength: Vec<f64> = ix
        .adj
        .iter()
        .map(|nbrs| nbrs.iter().map(|&(_, w)| w).sum::<f64>())
        .collect();
    let mut x = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let mut next = vec![(1.0 - damping) / n as f64; n];
        for (u, nbrs) in ix.adj.iter().enumerate() {
            if strength[u] == 0.0 {
                continue;
            }
            let share = damping * x[u] / strength[u];
            for &(v, w) in nbrs {
                next[v] += share * w;
            }
        }
        let sum: f64 = next.iter().sum();
        for v in &mut next {
            *v /= sum;
        }
        residual = next
            .iter()
            .zip(x.iter())
            .fold(0.0_f64, |r, (a, b)| r.max((a - b).abs()));
        x = next;
        if residual < tol {
            return Ok(ix.table(
                Measure::Pagerank,
                x,
                MeasureParams {
                    damping: Some(damping),
                    tolerance: Some(tol),
                    iterations: Some(iter),
                    ..Default::default()
                },
            ));
        }
    }
    Err(TagnetError::NotConverged {
        iterations: max_iter,
        residual,
        last_iterate: ix.tags.iter().cloned().zip(x).collect(),
    })
}

/// Kleinberg hub and authority scores via alternating shifted iteration.
/// On undirected graphs both coincide with eigenvector centrality.
pub fn hits(
    g: &CooccurrenceGraph,
    tol: f64,
    max_iter: usize,
) -> Result<(CentralityTable, CentralityTable)> {
    if g.vertices.is_empty() {
        return Err(TagnetError::EmptyGraph);
    }
    if g.edges.is_empty() {
        return Err(TagnetError::EdgelessGraph);
    }
    let ix = Indexed::new(g);
    let n = ix.len();
    let mut hub = vec![1.0_f64; n];
    let mut auth = vec![1.0_f64; n];
    let step = |src: &[f64]| -> Result<Vec<f64>> {
        let mut out = src.to_vec();
        for (i, nbrs) in ix.adj.iter().enumerate() {
            for &(j, w) in nbrs {
                out[i] += w * src[j];
            }
        }
        let m = max_abs(&out);
        if m == 0.0 {
            return Err(TagnetError::EdgelessGraph);
        }
        for v in &mut out {
            *v /= m;
        }
        Ok(out)
    };
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let next_auth = step(&hub)?;
        let next_hub = step(&next_auth)?;
        residual = next_auth
            .iter()
            .zip(auth.iter())
            .chain(next_hub.iter().zip(hub.iter()))
            .fold(0.0_f64, |r, (a, b)| r.max((a - b).abs()));
        auth = next_auth;
        hub = next_hub;
        if residual < tol {
            let disconnected = !g.is_connected();
            let params = |iterations| MeasureParams {
                tolerance: Some(tol),
                iterations: Some(iterations),
                disconnected_warning: disconnected.then_some(true),
                ..Default::default()
            };
            let hub_table = ix.table(Measure::Hub, hub, params(iter));
            let auth_table = ix.table(Measure::Authority, auth, params(iter));
            return Ok((hub_table, auth_table));
        }
    }
    Err(TagnetError::NotConverged {
        iterations: max_iter,
        residual,
        last_iterate: ix.tags.iter().cloned().zip(hub).collect(),
    })
}

/// Single-source shortest path distances under the given distance mode.
fn shortest_distances(ix: &Indexed, source: usize, mode: DistanceMode) -> Vec<f64> {
    let n = ix.len();
    let mut dist = vec![f64::INFINITY; n];
    match mode {
        DistanceMode::Hop => {
            dist[source] = 0.0;
            let mut queue = VecDeque::from([source]);
            while let Some(u) = queue.pop_front() {
                for &(v, _) in &ix.adj[u] {
                    if dist[v].is_infinite() {
                        dist[v] = dist[u] + 1.0;
                        queue.push_back(v);
                    }
                }
            }
        }
        DistanceMode::InverseWeight => {
            #[derive(PartialEq)]
            struct Entry(f64, usize);
            impl Eq for Entry {}
            impl PartialOrd for Entry {
                fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                    Some(self.cmp(other))
                }
            }
            impl Ord for Entry {
                fn cmp(&self, other: &Self) -> Ordering {
                    // min-heap on distance, ties by index for determinism
                    other
                        .0
                        .partial_cmp(&self.0)
                        .unwrap_or(Ordering::Equal)
                        .then_with(|| other.1.cmp(&self.1))
                }
            }
            let mut heap = BinaryHeap::new();
            dist[source] = 0.0;
            heap.push(Entry(0.0, source));
            while let Some(Entry(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &(v, w) in &ix.adj[u] {
                    let nd = d + 1.0 / w;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(Entry(nd, v));
                    }
                }
            }
        }
    }
    dist
}

/// Closeness centrality: (reachable - 1) / sum of distances to reachable
/// vertices, computed per component. Vertices with no peers score 0.
pub fn closeness(g: &CooccurrenceGraph, mode: DistanceMode) -> CentralityTable {
    let ix = Indexed::new(g);
    let n = ix.len();
    let mut scores = vec![0.0_f64; n];
    for (v, score) in scores.iter_mut().enumerate() {
        let dist = shortest_distances(&ix, v, mode);
        let mut reach = 0usize;
        let mut total = 0.0;
        for (u, &d) in dist.iter().enumerate() {
            if u != v && d.is_finite() {
                reach += 1;
                total += d;
            }
        }
        if reach > 0 && total > 0.0 {
            *score = reach as f64 / total;
        }
    }
    ix.table(
        Measure::Closeness,
        scores,
        MeasureParams {
            distance_mode: Some(mode),
            ..Default::default()
        },
    )
}

const DIST_EPS: f64 = 1e-9;

/// Exact betweenness centrality (Brandes). Undirected convention: each
/// unordered pair is counted once.
pub fn betweenness(g: &CooccurrenceGraph, mode: DistanceMode) -> CentralityTable {
    let ix = Indexed::new(g);
    let n = ix.len();
    let mut centrality = vec![0.0_f64; n];

    for s in 0..n {
        // Order of settlement, path counts, predecessor lists.
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut sigma = vec![0.0_f64; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        sigma[s] = 1.0;

        match mode {
            DistanceMode::Hop => {
                let mut dist = vec![-1_i64; n];
                dist[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    order.push(u);
                    for &(v, _) in &ix.adj[u] {
                        if dist[v] < 0 {
                            dist[v] = dist[u] + 1;
                            queue.push_back(v);
                        }
                        if dist[v] == dist[u] + 1 {
                            sigma[v] += sigma[u];
                            preds[v].push(u);
                        }
                    }
                }
            }
            DistanceMode::InverseWeight => {
                let mut dist = vec![f64::INFINITY; n];
                dist[s] = 0.0;
                let mut heap: BinaryHeap<(std::cmp::Reverse<ordered::OrdF64>, usize)> =
                    BinaryHeap::new();
                heap.push((std::cmp::Reverse(ordered::OrdF64(0.0)), s));
                let mut settled = vec![false; n];
                while let Some((std::cmp::Reverse(ordered::OrdF64(d)), u)) = heap.pop() {
                    if settled[u] {
                        continue;
                    }
                    settled[u] = true;
                    order.push(u);
                    for &(v, w) in &ix.adj[u] {
                        let nd = d + 1.0 / w;
                        if nd < dist[v] - DIST_EPS {
                            dist[v] = nd;
                            sigma[v] = sigma[u];
                            preds[v] = vec![u];
                            heap.push((std::cmp::Reverse(ordered::OrdF64(nd)), v));
                        } else if (nd - dist[v]).abs() <= DIST_EPS && !settled[v] {
                            sigma[v] += sigma[u];
                            preds[v].push(u);
                        }
                    }
                }
            }
        }

        // Dependency accumulation in reverse settlement order.
        let mut delta = vec![0.0_f64; n];
        for &w in order.iter().rev() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }

    // Each unordered pair was seen from both endpoints.
    for c in &mut centrality {
        *c /= 2.0;
    }
    ix.table(
        Measure::Betweenness,
        centrality,
        MeasureParams {
            distance_mode: Some(mode),
            ..Default::default()
        },
    )
}

mod ordered {
    /// Total order over the non-NaN floats produced by distance sums.
    #[derive(PartialEq, PartialOrd, Clone, Copy)]
    pub struct OrdF64(pub f64);
    impl Eq for OrdF64 {}
    #[allow(clippy::derive_ord_xor_partial_ord)]
    impl Ord for OrdF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.partial_cmp(other).expect("distances are never NaN")
        }
    }
}

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1000;
pub const DEFAULT_DAMPING: f64 = 0.85;

#[derive(Debug, Clone, Serialize)]
pub struct CentralityReport {
    /// Column order follows `Measure::ALL`.
    pub measures: Vec<Measure>,
    /// One row per vertex: tag plus one score per measure.
    pub rows: Vec<(String, Vec<f64>)>,
}

/// Run the selected measures and join them into a single table. Rows are
/// sorted by eigenvector score descending (lexicographic ties) when
/// eigenvector is among the measures, otherwise by tag.
pub fn centrality_report(
    g: &CooccurrenceGraph,
    measures: &BTreeSet<Measure>,
) -> Result<CentralityReport> {
    if measures.is_empty() {
        return Err(TagnetError::NoMeasures);
    }
    let mut tables: BTreeMap<Measure, CentralityTable> = BTreeMap::new();
    let needs_hits =
        measures.contains(&Measure::Hub) || measures.contains(&Measure::Authority);
    if needs_hits {
        let (hub, auth) = hits(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
        tables.insert(Measure::Hub, hub);
        tables.insert(Measure::Authority, auth);
    }
    for &m in measures {
        if tables.contains_key(&m) {
            continue;
        }
        let table = match m {
            Measure::Degree => degree(g, false),
            Measure::WeightedDegree => degree(g, true),
            Measure::Betweenness => betweenness(g, DistanceMode::Hop),
            Measure::Closeness => closeness(g, DistanceMode::Hop),
            Measure::Eigenvector => eigenvector(g, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
            Measure::Pagerank => pagerank(g, DEFAULT_DAMPING, DEFAULT_TOL, DEFAULT_MAX_ITER)?,
            Measure::Hub | Measure::Authority => unreachable!("computed above"),
        };
        tables.insert(m, table);
    }

    let columns: Vec<Measure> = Measure::ALL
        .into_iter()
        .filter(|m| measures.contains(m))
        .collect();
    let mut rows: Vec<(String, Vec<f64>)> = g
        .vertices
        .keys()
        .map(|tag| {
            let scores = columns.iter().map(|m| tables[m].score(tag)).collect();
            (tag.clone(), scores)
        })
        .collect();
    if let Some(eig) = tables.get(&Measure::Eigenvector) {
        rows.sort_by(|(ta, _), (tb, _)| {
            eig.score(tb)
                .partial_cmp(&eig.score(ta))
                .unwrap_or(Ordering::Equal)
                .then_with(|| ta.cmp(tb))
        });
    }
    Ok(CentralityReport {
        measures: columns,
        rows,
    })
}
