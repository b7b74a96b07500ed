/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef XTT_H
#define XTT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum XttStatus {
  XTT_STATUS_OK = 0,
  XTT_STATUS_NULL_POINTER = 1,
  XTT_STATUS_INVALID_UTF8 = 2,
  XTT_STATUS_PARSE_ERROR = 3,
  XTT_STATUS_LOAD_ERROR = 4,
  XTT_STATUS_OUT_OF_RANGE = 5,
  XTT_STATUS_PANIC = 6,
} XttStatus;

/**
 * Outputs of one transduction, sorted by weight then tree.
 */
typedef struct XttResult XttResult;

/**
 * A loaded rule set.
 */
typedef struct XttTransducer XttTransducer;

typedef struct XttClassification {
  bool linear;
  bool nondeleting;
  bool extended;
} XttClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread. The pointer stays valid until
 * the next failing call on the same thread. Empty if nothing has failed.
 */
const char *xtt_last_error_message(void);

/**
 * Loads a YAML rule file held in `yaml` and stores a new handle in `out`.
 *
 * # Safety
 * `yaml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum XttStatus xtt_transducer_load(const char *yaml, struct XttTransducer **out);

/**
 * # Safety
 * `transducer` must be null or a handle from [`xtt_transducer_load`] not yet freed.
 */
void xtt_transducer_free(struct XttTransducer *transducer);

/**
 * # Safety
 * `transducer` must be a live handle and `out` a valid pointer.
 */
enum XttStatus xtt_transducer_rule_count(const struct XttTransducer *transducer, size_t *out);

/**
 * # Safety
 * `transducer` must be a live handle and `out` a valid pointer.
 */
enum XttStatus xtt_transducer_classify(const struct XttTransducer *transducer,
                                       struct XttClassification *out);

/**
 * Transduces the s-expression `tree`. A `beam` of 0 keeps every
 * configuration; a `max_steps` of 0 uses the engine default.
 *
 * # Safety
 * `transducer` must be a live handle, `tree` a NUL-terminated string and
 * `out` a valid pointer.
 */
enum XttStatus xtt_transduce(const struct XttTransducer *transducer,
                             const char *tree,
                             size_t beam,
                             size_t max_steps,
                             struct XttResult **out);

/**
 * # Safety
 * `result` must be null or a handle from [`xtt_transduce`] not yet freed.
 */
void xtt_result_free(struct XttResult *result);

/**
 * Number of complete outputs; 0 for a null handle.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
size_t xtt_result_output_count(const struct XttResult *result);

/**
 * # Safety
 * `result` must be null or a live handle.
 */
size_t xtt_result_stuck_count(const struct XttResult *result);

/**
 * Whether the beam or the step cap cut the search short.
 *
 * # Safety
 * `result` must be null or a live handle.
 */
bool xtt_result_truncated(const struct XttResult *result);

/**
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum XttStatus xtt_result_weight(const struct XttResult *result, size_t index, double *out);

/**
 * Stores the serialized output tree in `out`. Release it with
 * [`xtt_string_free`].
 *
 * # Safety
 * `result` must be a live handle and `out` a valid pointer.
 */
enum XttStatus xtt_result_tree(const struct XttResult *result, size_t index, char **out);

/**
 * # Safety
 * `text` must be null or a string returned by this library, not yet freed.
 */
void xtt_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XTT_H */
