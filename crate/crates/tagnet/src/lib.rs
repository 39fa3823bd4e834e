//! Hashtag co-occurrence network analysis toolkit.
//!
//! The crate covers the full pipeline from raw social-media exports to
//! reproducible network artifacts:
//!
//! - [`corpus`]: parsing, merging and rule-based filtering of post exports
//! - [`normalize`]: hashtag canonicalization and variant folding
//! - [`graph`]: the weighted co-occurrence graph and its projections
//! - [`centrality`]: degree, betweenness, closeness, eigenvector, HITS and
//!   PageRank scores
//! - [`community`]: fast-greedy modularity optimization
//! - [`agreement`]: Cohen's kappa, confusion matrices and sampling curves
//! - [`export`]: GraphML/DOT/CSV/JSON/SVG emission, all byte-stable
//! - [`config`] and [`cli`]: the `tagnet` command-line pipeline
//!
//! Every operation is deterministic: map iteration uses ordered containers,
//! layouts take explicit seeds, and float formatting is platform-independent.

pub mod agreement;
pub mod centrality;
pub mod cli;
pub mod community;
pub mod config;
pub mod corpus;
pub mod error;
pub mod export;
pub mod graph;
pub mod normalize;

pub use error::{Result, TagnetError};
