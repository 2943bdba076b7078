#ifndef VER_FORGE_H
#define VER_FORGE_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum VfStatus {
  VF_STATUS_OK = 0,
  VF_STATUS_NULL_ARGUMENT = 1,
  VF_STATUS_INVALID_UTF8 = 2,
  VF_STATUS_INVALID_INPUT = 3,
  VF_STATUS_IO = 4,
  VF_STATUS_PANIC = 5,
} VfStatus;

// An immutable overlap index. Queries may run from several threads at once.
typedef struct VfIndex VfIndex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of this library, including the index format. Static; do not free.
const char *vf_version(void);

// Message of the last failure on this thread, or an empty string. Valid
// until the next library call on the same thread; do not free.
const char *vf_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` is null or was returned by this library and not yet freed.
void vf_string_free(char *s);

// Strips wikitext. `*out_json` receives
// `{"plain_text": ..., "anchors": [{"mention","target","start","end"}], "warnings": [...]}`.
//
// # Safety
// `markup` is a NUL-terminated string; `out_json` is valid for writing.
enum VfStatus vf_strip_wikitext(const char *markup, char **out_json);

// Encodes a model input. `entities_json` and `retrieved_json` are JSON
// arrays of strings; `retrieved_json` may be null for no retrieval.
//
// # Safety
// Non-null pointers are NUL-terminated strings; `out` is valid for writing.
enum VfStatus vf_encode_input(const char *entities_json, const char *retrieved_json, char **out);

// Splits an encoded input. `*out_json` receives
// `{"entities": [...], "retrieved": [...]}`.
//
// # Safety
// `input` is a NUL-terminated string; `out_json` is valid for writing.
enum VfStatus vf_decode_input(const char *input, char **out_json);

// Loads an index file written by [`vf_index_save`] or the command line.
//
// # Safety
// `path` is a NUL-terminated string; `out` is valid for writing.
enum VfStatus vf_index_load(const char *path, struct VfIndex **out);

// Builds an index over a corpus JSONL file; ids are example positions.
//
// # Safety
// `corpus_path` is a NUL-terminated string; `out` is valid for writing.
enum VfStatus vf_index_build(const char *corpus_path, struct VfIndex **out);

// # Safety
// `index` is a live index; `path` is a NUL-terminated string.
enum VfStatus vf_index_save(const struct VfIndex *index, const char *path);

// # Safety
// `index` is a live index; `out` is valid for writing.
enum VfStatus vf_index_len(const struct VfIndex *index, size_t *out);

// Top-`k` examples by entity overlap. `entities` is ";"-separated;
// a negative `exclude` excludes nothing. `*out_json` receives
// `[{"id", "overlap", "sentence"}, ...]` in rank order.
//
// # Safety
// `index` is a live index; `entities` is a NUL-terminated string; `out_json`
// is valid for writing.
enum VfStatus vf_index_query(const struct VfIndex *index,
                             const char *entities,
                             size_t k,
                             int64_t exclude,
                             char **out_json);

// Releases an index. Null is ignored.
//
// # Safety
// `index` is null or a live index not used afterwards.
void vf_index_free(struct VfIndex *index);

// Scores a corpus. `pairs_json` is an array of
// `{"hypothesis": str, "references": [str], "concepts": [str]?}`;
// `metrics` is a comma-separated list such as `"bleu,rouge_l"` (null for
// all but coverage). `*out_json` receives the score report.
//
// # Safety
// Non-null pointers are NUL-terminated strings; `out_json` is valid for
// writing.
enum VfStatus vf_evaluate(const char *pairs_json, const char *metrics, char **out_json);

// Fraction of the concepts in `concepts_json` (a JSON array of strings)
// whose stems occur in `hypothesis`.
//
// # Safety
// Pointers are NUL-terminated strings; `out` is valid for writing.
enum VfStatus vf_concept_coverage(const char *concepts_json, const char *hypothesis, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VER_FORGE_H */
