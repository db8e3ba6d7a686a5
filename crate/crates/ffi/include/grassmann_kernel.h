#ifndef GRASSMANN_KERNEL_H
#define GRASSMANN_KERNEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GkStatus {
  GK_STATUS_OK = 0,
  GK_STATUS_NULL_ARGUMENT = 1,
  GK_STATUS_INVALID_UTF8 = 2,
  GK_STATUS_PARSE_ERROR = 3,
  GK_STATUS_KERNEL_ERROR = 4,
  GK_STATUS_PANIC = 5,
} GkStatus;

/**
 * An element of a free Grassmann algebra.
 */
typedef struct GkElement GkElement;

/**
 * A parsed document.
 */
typedef struct GkModel GkModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *gk_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *gk_version(void);

/**
 * # Safety
 * `source` must be NUL-terminated; `model` must point to writable storage.
 */
enum GkStatus gk_model_parse(const char *source, struct GkModel **model);

/**
 * Runs every command and writes the JSON report. `exit_code` may be NULL.
 *
 * # Safety
 * `model` must come from [`gk_model_parse`]; `json` must point to writable storage.
 */
enum GkStatus gk_model_run_json(const struct GkModel *model,
                                uint64_t seed,
                                char **json,
                                int32_t *exit_code);

/**
 * Canonical text of the document.
 *
 * # Safety
 * `model` must come from [`gk_model_parse`]; `text_out` must point to writable storage.
 */
enum GkStatus gk_model_to_text(const struct GkModel *model, char **text_out);

/**
 * # Safety
 * `model` must come from [`gk_model_parse`] and not be used afterwards. NULL is ignored.
 */
void gk_model_free(struct GkModel *model);

/**
 * Parses an expression in `x1..xp`, `t1..tq` into an element of the free algebra.
 *
 * # Safety
 * `expr` must be NUL-terminated; `element` must point to writable storage.
 */
enum GkStatus gk_element_parse(uint32_t p,
                               uint32_t q,
                               const char *expr,
                               struct GkElement **element);

/**
 * Graded product `a * b`.
 *
 * # Safety
 * `a` and `b` must be live element handles; `result` must point to writable storage.
 */
enum GkStatus gk_element_mul(const struct GkElement *a,
                             const struct GkElement *b,
                             struct GkElement **result);

/**
 * Sum `a + b`.
 *
 * # Safety
 * `a` and `b` must be live element handles; `result` must point to writable storage.
 */
enum GkStatus gk_element_add(const struct GkElement *a,
                             const struct GkElement *b,
                             struct GkElement **result);

/**
 * # Safety
 * `element` must be a live handle; `text_out` must point to writable storage.
 */
enum GkStatus gk_element_to_string(const struct GkElement *element, char **text_out);

/**
 * # Safety
 * `element` must be a live handle and not be used afterwards. NULL is ignored.
 */
void gk_element_free(struct GkElement *element);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards. NULL is ignored.
 */
void gk_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GRASSMANN_KERNEL_H */
