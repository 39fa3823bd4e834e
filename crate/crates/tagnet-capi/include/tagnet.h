#ifndef TAGNET_H
#define TAGNET_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible function.
 */
typedef enum TagnetStatus {
  TAGNET_STATUS_OK = 0,
  /**
   * Null pointer, bad UTF-8 or otherwise invalid argument.
   */
  TAGNET_STATUS_INVALID_ARGUMENT = 1,
  /**
   * File could not be read or written.
   */
  TAGNET_STATUS_IO = 2,
  /**
   * Input could not be parsed.
   */
  TAGNET_STATUS_PARSE = 3,
  /**
   * The analysis is not defined on this input (e.g. edgeless graph).
   */
  TAGNET_STATUS_ANALYSIS_INFEASIBLE = 4,
  /**
   * Unexpected internal failure.
   */
  TAGNET_STATUS_INTERNAL = 5,
} TagnetStatus;

/**
 * Opaque post collection handle.
 */
typedef struct TagnetPosts {
  uint8_t _private[0];
} TagnetPosts;

/**
 * Opaque co-occurrence graph handle.
 */
typedef struct TagnetGraph {
  uint8_t _private[0];
} TagnetGraph;

/**
 * Opaque centrality score table handle.
 */
typedef struct TagnetTable {
  uint8_t _private[0];
} TagnetTable;

/**
 * Opaque community partition handle.
 */
typedef struct TagnetPartition {
  uint8_t _private[0];
} TagnetPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread; do not free.
 */
const char *tagnet_last_error(void);

/**
 * Release a string returned through an out-parameter.
 *
 * # Safety
 * `s` must come from this library and not have been freed before.
 */
void tagnet_string_free(char *s);

/**
 * Load a canonical JSONL post file.
 *
 * # Safety
 * `path` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum TagnetStatus tagnet_posts_load(const char *path, struct TagnetPosts **out);

/**
 * Number of posts in the collection; 0 for null.
 *
 * # Safety
 * `posts` must be a live handle from this library or null.
 */
uint64_t tagnet_posts_len(const struct TagnetPosts *posts);

/**
 * # Safety
 * `posts` must be a live handle from this library or null; it must not be
 * used afterwards.
 */
void tagnet_posts_free(struct TagnetPosts *posts);

/**
 * Build the weighted co-occurrence graph from a post collection.
 *
 * # Safety
 * `posts` must be a live handle; `out` a valid pointer.
 */
enum TagnetStatus tagnet_graph_build(const struct TagnetPosts *posts, struct TagnetGraph **out);

/**
 * Parse a graph from its canonical JSON form.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string; `out` a valid pointer.
 */
enum TagnetStatus tagnet_graph_from_json(const char *json, struct TagnetGraph **out);

/**
 * Serialize a graph to its canonical JSON form. Free the result with
 * `tagnet_string_free`.
 *
 * # Safety
 * `graph` must be a live handle; `out` a valid pointer.
 */
enum TagnetStatus tagnet_graph_to_json(const struct TagnetGraph *graph, char **out);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
uint64_t tagnet_graph_vertex_count(const struct TagnetGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
uint64_t tagnet_graph_edge_count(const struct TagnetGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null.
 */
uint64_t tagnet_graph_total_weight(const struct TagnetGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null; it must not be used afterwards.
 */
void tagnet_graph_free(struct TagnetGraph *graph);

/**
 * Compute one centrality measure (name as in the CLI: "degree",
 * "eigenvector", "pagerank", ...).
 *
 * # Safety
 * `graph` must be a live handle; `measure` a valid string; `out` valid.
 */
enum TagnetStatus tagnet_centrality(const struct TagnetGraph *graph,
                                    const char *measure,
                                    struct TagnetTable **out);

/**
 * Score for one tag; missing tags score 0.
 *
 * # Safety
 * `table` must be a live handle; `tag` a valid string; `out` valid.
 */
enum TagnetStatus tagnet_table_score(const struct TagnetTable *table, const char *tag, double *out);

/**
 * # Safety
 * `table` must be a live handle or null; it must not be used afterwards.
 */
void tagnet_table_free(struct TagnetTable *table);

/**
 * Fast-greedy modularity optimization at the best cut.
 *
 * # Safety
 * `graph` must be a live handle; `out` a valid pointer.
 */
enum TagnetStatus tagnet_communities(const struct TagnetGraph *graph, struct TagnetPartition **out);

/**
 * Modularity Q of the partition; NaN for null.
 *
 * # Safety
 * `partition` must be a live handle or null.
 */
double tagnet_partition_q(const struct TagnetPartition *partition);

/**
 * # Safety
 * `partition` must be a live handle or null.
 */
uint64_t tagnet_partition_community_count(const struct TagnetPartition *partition);

/**
 * Community id of one tag.
 *
 * # Safety
 * `partition` must be a live handle; `tag` a valid string; `out` valid.
 */
enum TagnetStatus tagnet_partition_of(const struct TagnetPartition *partition,
                                      const char *tag,
                                      uint64_t *out);

/**
 * # Safety
 * `partition` must be a live handle or null; not used afterwards.
 */
void tagnet_partition_free(struct TagnetPartition *partition);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TAGNET_H */
