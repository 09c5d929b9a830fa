/* codepoison: backdoor poisoning of code datasets and metric scoring. */
#ifndef CODEPOISON_CODEPOISON_H
#define CODEPOISON_CODEPOISON_H

#include <stddef.h>
#include <stdint.h>

#if defined(CODEPOISON_BUILDING_LIBRARY)
#define CP_API __attribute__((visibility("default")))
#else
#define CP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cp_status {
  CP_OK = 0,
  CP_E_INVALID_ARGUMENT,
  CP_E_IO,
  CP_E_MALFORMED_LINE,
  CP_E_MISSING_FIELD,
  CP_E_BAD_LABEL,
  CP_E_DUPLICATE_IDX,
  CP_E_DANGLING_REFERENCE,
  CP_E_PARSE_FAILED,
  CP_E_INVALID_TRIGGER,
  CP_E_EMPTY_CATALOG,
  CP_E_NOT_VICTIM,
  CP_E_NO_ELIGIBLE_SAMPLES,
  CP_E_POISON_SHORTFALL,
  CP_E_MISSING_PREDICTION,
  CP_E_UNKNOWN_IDX,
  CP_E_DUPLICATE_PREDICTION,
  CP_E_LENGTH_MISMATCH,
  CP_E_EMPTY_INPUT,
  CP_E_MALFORMED_MANIFEST,
  CP_E_INTERNAL
} cp_status;

/* Stable identifier such as "PoisonShortfall". Never NULL. */
CP_API const char* cp_status_name(cp_status status);

/* Message of the last failed call on this thread; "" after a success. */
CP_API const char* cp_last_error_message(void);

CP_API const char* cp_version(void);

/* Releases strings returned through char** out-parameters. */
CP_API void cp_free_string(char* s);

/* ---- options -------------------------------------------------------------
 * A key/value bag shared by cp_poison and cp_evaluate.
 *
 * poison:   task, attack, rate, seed, input, pairs, test, out, catalog,
 *           var_triggers (comma separated), jobs
 * evaluate: metric (acc | asr-cls | asr-gen | bleu), preds, gold, manifest,
 *           refs, target
 *
 * Setting an unknown key fails with CP_E_INVALID_ARGUMENT. Setting a key
 * again replaces its value; a NULL value removes it. */
typedef struct cp_options cp_options;

CP_API cp_status cp_options_create(cp_options** out);
CP_API void cp_options_destroy(cp_options* options);
CP_API cp_status cp_options_set(cp_options* options, const char* key, const char* value);

/* Runs a poisoning campaign and writes its files under "out". On success
 * *summary receives a one-line count summary (free with cp_free_string). */
CP_API cp_status cp_poison(const cp_options* options, char** summary);

/* Scores a prediction file. On success *report_json receives the report. */
CP_API cp_status cp_evaluate(const cp_options* options, char** report_json);

/* ---- manifests ------------------------------------------------------------ */
typedef struct cp_manifest cp_manifest;

typedef enum cp_manifest_section { CP_SECTION_TRAIN = 0, CP_SECTION_ASR_EVAL = 1 } cp_manifest_section;

typedef struct cp_totals {
  size_t total_samples;
  size_t eligible;
  size_t requested;
  size_t quota;
  size_t poisoned;
  size_t skipped;
} cp_totals;

CP_API cp_status cp_manifest_open(const char* path, cp_manifest** out);
CP_API void cp_manifest_close(cp_manifest* manifest);
CP_API cp_status cp_manifest_render_table(const cp_manifest* manifest, char** table);
/* CP_E_INVALID_ARGUMENT when the manifest has no such section. */
CP_API cp_status cp_manifest_totals(const cp_manifest* manifest, cp_manifest_section section,
                                    cp_totals* out);
CP_API cp_status cp_manifest_record_count(const cp_manifest* manifest,
                                          cp_manifest_section section, size_t* out);

/* ---- trigger catalogs ----------------------------------------------------- */
typedef struct cp_catalog cp_catalog;

/* Borrowed from the catalog; valid until it is destroyed. */
typedef struct cp_trigger_view {
  const char* id;
  const char* language;
  const char* text;
  const char* kind;
} cp_trigger_view;

/* language: "c" or "java". */
CP_API cp_status cp_catalog_default(const char* language, cp_catalog** out);
/* Loads and validates a JSON-lines catalog. */
CP_API cp_status cp_catalog_load(const char* path, cp_catalog** out);
CP_API void cp_catalog_destroy(cp_catalog* catalog);
CP_API size_t cp_catalog_size(const cp_catalog* catalog);
CP_API cp_status cp_catalog_entry(const cp_catalog* catalog, size_t index, cp_trigger_view* out);

/* ---- syntax --------------------------------------------------------------- */

/* Counts ERROR and MISSING nodes in the parse of `source`. Java sources are
 * parsed as class members. */
CP_API cp_status cp_parse_check(const char* source, size_t length, const char* language,
                                size_t* error_nodes);

#ifdef __cplusplus
}
#endif

#endif
