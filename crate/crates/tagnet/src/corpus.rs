//! Post ingestion: parsing export files, merging multi-query downloads and
//! filtering advertisement/bot noise.
//!
//! Input schemas:
//! - JSONL: one object per line with required `id`, `platform`, `hashtags`
//!   keys and optional `timestamp` (RFC 3339) and `text`.
//! - CSV: header `id,platform,timestamp,text,hashtags`, hashtags cell
//!   space-separated.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TagnetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platform {
    Instagram,
    Twitter,
    Other,
}

impl Platform {
    pub fn parse(s: &str) -> Platform {
        match s.to_ascii_lowercase().as_str() {
            "instagram" => Platform::Instagram,
            "twitter" => Platform::Twitter,
            _ => Platform::Other,
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Platform::Instagram => write!(f, "instagram"),
            Platform::Twitter => write!(f, "twitter"),
            Platform::Other => write!(f, "other"),
        }
    }
}

/// One social-media post. Hashtags are stored without the leading `#`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    pub id: String,
    pub platform: Platform,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub hashtags: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PostCollection {
    pub posts: Vec<Post>,
    /// The search hashtag(s) used to assemble the collection.
    pub query: BTreeSet<String>,
    pub source_files: Vec<PathBuf>,
}

impl PostCollection {
    pub fn len(&self) -> usize {
        self.posts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posts.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Jsonl,
    Csv,
}

impl InputFormat {
    pub fn from_path(path: &Path) -> Option<InputFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("ndjson") | Some("json") => Some(InputFormat::Jsonl),
            Some("csv") => Some(InputFormat::Csv),
            _ => None,
        }
    }
}

/// Lenient mode skips malformed records and counts them; strict mode fails
/// on the first malformed record, naming its line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    Strict,
    #[default]
    Lenient,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    /// Rows dropped because an earlier row had the same (platform, id).
    pub duplicates_dropped: usize,
    /// Malformed records skipped (lenient mode only).
    pub malformed_skipped: usize,
}

fn split_hashtags(raw: &str) -> Vec<String> {
    raw.split(|c: char| c.is_whitespace() || c == ',')
        .map(|t| t.trim_start_matches('#'))
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

#[derive(Deserialize)]
struct JsonlRecord {
    id: String,
    platform: String,
    #[serde(default)]
    timestamp: Option<DateTime<Utc>>,
    #[serde(default)]
    text: Option<String>,
    hashtags: Vec<String>,
}

fn post_from_jsonl(rec: JsonlRecord, line: usize) -> Result<Post> {
    if rec.id.is_empty() {
        return Err(TagnetError::MalformedRecord {
            line,
            message: "empty id".into(),
        });
    }
    let hashtags = rec
        .hashtags
        .iter()
        .flat_map(|h| split_hashtags(h))
        .collect();
    Ok(Post {
        id: rec.id,
        platform: Platform::parse(&rec.platform),
        timestamp: rec.timestamp,
        text: rec.text,
        hashtags,
    })
}

/// Parse an export file into a collection. Duplicate (platform, id) rows
/// keep the first occurrence; the report counts the dropped ones.
pub fn parse_posts(
    path: &Path,
    format: InputFormat,
    mode: ParseMode,
) -> Result<(PostCollection, ParseReport)> {
    let file = std::fs::File::open(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut posts: Vec<Post> = Vec::new();
    let mut seen: HashSet<(Platform, String)> = HashSet::new();
    let mut report = ParseReport::default();

    let mut push = |post: Post, posts: &mut Vec<Post>, report: &mut ParseReport| {
        let key = (post.platform, post.id.clone());
        if seen.insert(key) {
            posts.push(post);
        } else {
            report.duplicates_dropped += 1;
        }
    };

    match format {
        InputFormat::Jsonl => {
            for (idx, line) in reader.lines().enumerate() {
                let line_no = idx + 1;
                let line = line.map_err(|source| TagnetError::Io {
                    path: path.to_path_buf(),
                    source,
                })?;
                if line.trim().is_empty() {
                    continue;
                }
                let parsed = serde_json::from_str::<JsonlRecord>(&line)
                    .map_err(|e| TagnetError::MalformedRecord {
                        line: line_no,
                        message: e.to_string(),
                    })
                    .and_then(|rec| post_from_jsonl(rec, line_no));
                match (parsed, mode) {
                    (Ok(post), _) => push(post, &mut posts, &mut report),
                    (Err(e), ParseMode::Strict) => return Err(e),
                    (Err(_), ParseMode::Lenient) => report.malformed_skipped += 1,
                }
            }
        }
        InputFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new()
                .has_headers(true)
                .flexible(false)
                .from_reader(reader);
            for (idx, row) in rdr.records().enumerate() {
                let line_no = idx + 2; // header is line 1
                let parsed = row
                    .map_err(|e| TagnetError::MalformedRecord {
                        line: line_no,
                        message: e.to_string(),
                    })
                    .and_then(|r| csv_row_to_post(&r, line_no));
                match (parsed, mode) {
                    (Ok(post), _) => push(post, &mut posts, &mut report),
                    (Err(e), ParseMode::Strict) => return Err(e),
                    (Err(_), ParseMode::Lenient) => report.malformed_skipped += 1,
                }
            }
        }
    }

    Ok((
        PostCollection {
            posts,
            query: BTreeSet::new(),
            source_files: vec![path.to_path_buf()],
        },
        report,
    ))
}

fn csv_row_to_post(row: &csv::StringRecord, line: usize) -> Result<Post> {
    let field = |i: usize| row.get(i).unwrap_or("");
    if row.len() < 5 || field(0).is_empty() {
        return Err(TagnetError::MalformedRecord {
            line,
            message: "expected id,platform,timestamp,text,hashtags".into(),
        });
    }
    let timestamp = match field(2) {
        "" => None,
        s => Some(
            DateTime::parse_from_rfc3339(s)
                .map_err(|e| TagnetError::MalformedRecord {
                    line,
                    message: format!("bad timestamp: {e}"),
                })?
                .with_timezone(&Utc),
        ),
    };
    let text = match field(3) {
        "" => None,
        s => Some(s.to_owned()),
    };
    Ok(Post {
        id: field(0).to_owned(),
        platform: Platform::parse(field(1)),
        timestamp,
        text,
        hashtags: split_hashtags(field(4)),
    })
}

/// Write a collection back out as JSONL (the canonical post file format).
pub fn write_posts_jsonl(collection: &PostCollection, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    for post in &collection.posts {
        let line = serde_json::to_string(post).expect("post serialization cannot fail");
        writeln!(file, "{line}").map_err(|source| TagnetError::Io {
            path: path.to_path_buf(),
            source,
        })?;
    }
    Ok(())
}

/// Union of posts deduplicated by (platform, id), first occurrence wins.
/// Queries and provenance are merged.
pub fn merge_collections(collections: &[PostCollection]) -> Result<PostCollection> {
    if collections.is_empty() {
        return Err(TagnetError::InvalidInput(
            "merge requires at least one collection".into(),
        ));
    }
    let mut seen: HashSet<(Platform, String)> = HashSet::new();
    let mut merged = PostCollection::default();
    for coll in collections {
        merged.query.extend(coll.query.iter().cloned());
        for f in &coll.source_files {
            if !merged.source_files.contains(f) {
                merged.source_files.push(f.clone());
            }
        }
        for post in &coll.posts {
            if seen.insert((post.platform, post.id.clone())) {
                merged.posts.push(post.clone());
            }
        }
    }
    Ok(merged)
}

/// Keep only posts carrying at least one of the query tags
/// (case-insensitive). Mirrors the platform keyword search over local files.
pub fn filter_by_query(collection: &PostCollection, query: &BTreeSet<String>) -> PostCollection {
    let wanted: HashSet<String> = query.iter().map(|q| q.to_lowercase()).collect();
    let posts = collection
        .posts
        .iter()
        .filter(|p| p.hashtags.iter().any(|h| wanted.contains(&h.to_lowercase())))
        .cloned()
        .collect();
    PostCollection {
        posts,
        query: collection.query.union(query).cloned().collect(),
        source_files: collection.source_files.clone(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FilterConfig {
    /// Posts containing any of these hashtags are dropped (case-insensitive).
    pub blocklist: BTreeSet<String>,
    pub max_hashtags_per_post: usize,
    pub min_hashtags_per_post: usize,
    /// Bot repetition heuristic: drop posts whose exact hashtag multiset
    /// already appeared.
    pub drop_duplicate_hashtag_sets: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            blocklist: BTreeSet::new(),
            max_hashtags_per_post: 30,
            min_hashtags_per_post: 1,
            drop_duplicate_hashtag_sets: true,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_hashtags_per_post < self.min_hashtags_per_post {
            return Err(TagnetError::InvalidConfig(format!(
                "max_hashtags_per_post ({}) < min_hashtags_per_post ({})",
                self.max_hashtags_per_post, self.min_hashtags_per_post
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FilterReport {
    pub removed_blocklist: usize,
    pub removed_too_few_hashtags: usize,
    pub removed_too_many_hashtags: usize,
    pub removed_duplicate_hashtag_set: usize,
    pub retained: usize,
}

impl FilterReport {
    pub fn removed_total(&self) -> usize {
        self.removed_blocklist
            + self.removed_too_few_hashtags
            + self.removed_too_many_hashtags
            + self.removed_duplicate_hashtag_set
    }
}

/// Apply the noise filters in order: blocklist, hashtag-count bounds,
/// duplicate hashtag-set suppression.
pub fn filter_posts(
    collection: &PostCollection,
    cfg: &FilterConfig,
) -> Result<(PostCollection, FilterReport)> {
    cfg.validate()?;
    let blocked: HashSet<String> = cfg.blocklist.iter().map(|b| b.to_lowercase()).collect();
    let mut report = FilterReport::default();
    let mut seen_sets: HashMap<Vec<String>, ()> = HashMap::new();
    let mut kept = Vec::new();

    for post in &collection.posts {
        if post
            .hashtags
            .iter()
            .any(|h| blocked.contains(&h.to_lowercase()))
        {
            report.removed_blocklist += 1;
            continue;
        }
        if post.hashtags.len() < cfg.min_hashtags_per_post {
            report.removed_too_few_hashtags += 1;
            continue;
        }
        if post.hashtags.len() > cfg.max_hashtags_per_post {
            report.removed_too_many_hashtags += 1;
            continue;
        }
        if cfg.drop_duplicate_hashtag_sets {
            let mut key = post.hashtags.clone();
            key.sort();
            if seen_sets.insert(key, ()).is_some() {
                report.removed_duplicate_hashtag_set += 1;
                continue;
            }
        }
        kept.push(post.clone());
    }

    report.retained = kept.len();
    Ok((
        PostCollection {
            posts: kept,
            query: collection.query.clone(),
            source_files: collection.source_files.clone(),
        },
        report,
    ))
}

/// Blocklist file: one hashtag per line, optional `#` prefix, `//` comments.
pub fn load_blocklist(path: &Path) -> Result<BTreeSet<String>> {
    let content = std::fs::read_to_string(path).map_err(|source| TagnetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("//"))
        .map(|l| l.trim_start_matches('#').to_owned())
        .filter(|l| !l.is_empty())
        .collect())
}
