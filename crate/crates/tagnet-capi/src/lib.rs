//! C ABI for the tagnet toolkit: opaque handles, integer status codes and
//! a thread-local last-error message. The header `include/tagnet.h` is
//! generated at build time by cbindgen.
//!
//! Ownership rules: every `*_new`/`*_load`/`*_build` output must be released
//! with the matching `*_free`; strings returned through out-parameters must
//! be released with `tagnet_string_free`.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use tagnet::centrality::{centrality_report, Measure};
use tagnet::community::{best_partition, fast_greedy, CommunityPartition};
use tagnet::corpus::{parse_posts, InputFormat, ParseMode, PostCollection};
use tagnet::graph::{build_graph, from_canonical_json, to_canonical_json, CooccurrenceGraph};
use tagnet::TagnetError;

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TagnetStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or otherwise invalid argument.
    InvalidArgument = 1,
    /// File could not be read or written.
    Io = 2,
    /// Input could not be parsed.
    Parse = 3,
    /// The analysis is not defined on this input (e.g. edgeless graph).
    AnalysisInfeasible = 4,
    /// Unexpected internal failure.
    Internal = 5,
}

/// Opaque post collection handle.
#[repr(C)]
pub struct TagnetPosts {
    _private: [u8; 0],
}

/// Opaque co-occurrence graph handle.
#[repr(C)]
pub struct TagnetGraph {
    _private: [u8; 0],
}

/// Opaque centrality score table handle.
#[repr(C)]
pub struct TagnetTable {
    _private: [u8; 0],
}

/// Opaque community partition handle.
#[repr(C)]
pub struct TagnetPartition {
    _private: [u8; 0],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn status_of(e: &TagnetError) -> TagnetStatus {
    match e {
        TagnetError::Io { .. } => TagnetStatus::Io,
        TagnetError::MalformedRecord { .. } | TagnetError::InvalidInput(_) => TagnetStatus::Parse,
        TagnetError::EdgelessGraph
        | TagnetError::EmptyGraph
        | TagnetError::NotConverged { .. } => TagnetStatus::AnalysisInfeasible,
        _ => TagnetStatus::InvalidArgument,
    }
}

fn fail(e: TagnetError) -> TagnetStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn invalid(msg: &str) -> TagnetStatus {
    set_error(msg);
    TagnetStatus::InvalidArgument
}

fn guarded(f: impl FnOnce() -> TagnetStatus) -> TagnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            TagnetStatus::Internal
        }
    }
}

/// # Safety
/// `ptr` must be a valid NUL-terminated string or null.
unsafe fn cstr<'a>(ptr: *const c_char) -> Option<&'a str> {
    if ptr.is_null() {
        return None;
    }
    CStr::from_ptr(ptr).to_str().ok()
}

fn to_cstring(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn tagnet_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned through an out-parameter.
///
/// # Safety
/// `s` must come from this library and not have been freed before.
#[no_mangle]
pub unsafe extern "C" fn tagnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a canonical JSONL post file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tagnet_posts_load(
    path: *const c_char,
    out: *mut *mut TagnetPosts,
) -> TagnetStatus {
    guarded(|| {
        let (Some(path), false) = (cstr(path), out.is_null()) else {
            return invalid("null or non-UTF-8 argument");
        };
        match parse_posts(Path::new(path), InputFormat::Jsonl, ParseMode::Strict) {
            Ok((coll, _)) => {
                *out = Box::into_raw(Box::new(coll)) as *mut TagnetPosts;
                TagnetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of posts in the collection; 0 for null.
///
/// # Safety
/// `posts` must be a live handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_posts_len(posts: *const TagnetPosts) -> u64 {
    if posts.is_null() {
        return 0;
    }
    (*(posts as *const PostCollection)).len() as u64
}

/// # Safety
/// `posts` must be a live handle from this library or null; it must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tagnet_posts_free(posts: *mut TagnetPosts) {
    if !posts.is_null() {
        drop(Box::from_raw(posts as *mut PostCollection));
    }
}

/// Build the weighted co-occurrence graph from a post collection.
///
/// # Safety
/// `posts` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_build(
    posts: *const TagnetPosts,
    out: *mut *mut TagnetGraph,
) -> TagnetStatus {
    guarded(|| {
        if posts.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let coll = &*(posts as *const PostCollection);
        let g = build_graph(coll);
        *out = Box::into_raw(Box::new(g)) as *mut TagnetGraph;
        TagnetStatus::Ok
    })
}

/// Parse a graph from its canonical JSON form.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_from_json(
    json: *const c_char,
    out: *mut *mut TagnetGraph,
) -> TagnetStatus {
    guarded(|| {
        let (Some(json), false) = (cstr(json), out.is_null()) else {
            return invalid("null or non-UTF-8 argument");
        };
        match from_canonical_json(json) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(g)) as *mut TagnetGraph;
                TagnetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Serialize a graph to its canonical JSON form. Free the result with
/// `tagnet_string_free`.
///
/// # Safety
/// `graph` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_to_json(
    graph: *const TagnetGraph,
    out: *mut *mut c_char,
) -> TagnetStatus {
    guarded(|| {
        if graph.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let g = &*(graph as *const CooccurrenceGraph);
        *out = to_cstring(to_canonical_json(g));
        TagnetStatus::Ok
    })
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_vertex_count(graph: *const TagnetGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*(graph as *const CooccurrenceGraph)).vertex_count() as u64
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_edge_count(graph: *const TagnetGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*(graph as *const CooccurrenceGraph)).edge_count() as u64
}

/// # Safety
/// `graph` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_total_weight(graph: *const TagnetGraph) -> u64 {
    if graph.is_null() {
        return 0;
    }
    (*(graph as *const CooccurrenceGraph)).total_weight()
}

/// # Safety
/// `graph` must be a live handle or null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tagnet_graph_free(graph: *mut TagnetGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph as *mut CooccurrenceGraph));
    }
}

/// Compute one centrality measure (name as in the CLI: "degree",
/// "eigenvector", "pagerank", ...).
///
/// # Safety
/// `graph` must be a live handle; `measure` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tagnet_centrality(
    graph: *const TagnetGraph,
    measure: *const c_char,
    out: *mut *mut TagnetTable,
) -> TagnetStatus {
    guarded(|| {
        let (Some(name), false, false) = (cstr(measure), graph.is_null(), out.is_null()) else {
            return invalid("null or non-UTF-8 argument");
        };
        let g = &*(graph as *const CooccurrenceGraph);
        let m: Measure = match name.parse() {
            Ok(m) => m,
            Err(e) => return fail(e),
        };
        let selected: BTreeSet<Measure> = [m].into_iter().collect();
        match centrality_report(g, &selected) {
            Ok(report) => {
                let scores = report
                    .rows
                    .into_iter()
                    .map(|(tag, mut s)| (tag, s.pop().unwrap_or(0.0)))
                    .collect();
                let table = tagnet::centrality::CentralityTable {
                    measure: m,
                    scores,
                    params: Default::default(),
                };
                *out = Box::into_raw(Box::new(table)) as *mut TagnetTable;
                TagnetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Score for one tag; missing tags score 0.
///
/// # Safety
/// `table` must be a live handle; `tag` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tagnet_table_score(
    table: *const TagnetTable,
    tag: *const c_char,
    out: *mut f64,
) -> TagnetStatus {
    guarded(|| {
        let (Some(tag), false, false) = (cstr(tag), table.is_null(), out.is_null()) else {
            return invalid("null or non-UTF-8 argument");
        };
        let t = &*(table as *const tagnet::centrality::CentralityTable);
        *out = t.score(tag);
        TagnetStatus::Ok
    })
}

/// # Safety
/// `table` must be a live handle or null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tagnet_table_free(table: *mut TagnetTable) {
    if !table.is_null() {
        drop(Box::from_raw(table as *mut tagnet::centrality::CentralityTable));
    }
}

/// Fast-greedy modularity optimization at the best cut.
///
/// # Safety
/// `graph` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tagnet_communities(
    graph: *const TagnetGraph,
    out: *mut *mut TagnetPartition,
) -> TagnetStatus {
    guarded(|| {
        if graph.is_null() || out.is_null() {
            return invalid("null argument");
        }
        let g = &*(graph as *const CooccurrenceGraph);
        match fast_greedy(g) {
            Ok(dendrogram) => {
                let part = best_partition(&dendrogram);
                *out = Box::into_raw(Box::new(part)) as *mut TagnetPartition;
                TagnetStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Modularity Q of the partition; NaN for null.
///
/// # Safety
/// `partition` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_partition_q(partition: *const TagnetPartition) -> f64 {
    if partition.is_null() {
        return f64::NAN;
    }
    (*(partition as *const CommunityPartition)).q
}

/// # Safety
/// `partition` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tagnet_partition_community_count(
    partition: *const TagnetPartition,
) -> u64 {
    if partition.is_null() {
        return 0;
    }
    (*(partition as *const CommunityPartition)).community_count() as u64
}

/// Community id of one tag.
///
/// # Safety
/// `partition` must be a live handle; `tag` a valid string; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn tagnet_partition_of(
    partition: *const TagnetPartition,
    tag: *const c_char,
    out: *mut u64,
) -> TagnetStatus {
    guarded(|| {
        let (Some(tag), false, false) = (cstr(tag), partition.is_null(), out.is_null()) else {
            return invalid("null or non-UTF-8 argument");
        };
        let p = &*(partition as *const CommunityPartition);
        match p.assignment.get(tag) {
            Some(&id) => {
                *out = id as u64;
                TagnetStatus::Ok
            }
            None => invalid("tag not in partition"),
        }
    })
}

/// # Safety
/// `partition` must be a live handle or null; not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tagnet_partition_free(partition: *mut TagnetPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition as *mut CommunityPartition));
    }
}
