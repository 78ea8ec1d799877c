/*
 * dynarag.h — C API for the dynarag retrieval-augmented QA pipeline.
 *
 * The library is consumed through opaque handles and status codes; all
 * structured data crosses the boundary as JSON strings. Strings returned
 * through char** out-params are heap-allocated and must be released with
 * dynarag_string_free(). On any non-OK status, dynarag_last_error()
 * returns a thread-local description of what went wrong.
 */

#ifndef DYNARAG_H
#define DYNARAG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dynarag_status {
    DYNARAG_OK = 0,
    DYNARAG_ERR_INVALID_ARGUMENT = 1,
    DYNARAG_ERR_PARSE = 2,
    DYNARAG_ERR_IO = 3,
    DYNARAG_ERR_DUPLICATE_ID = 4,
    DYNARAG_ERR_RANK_COLLISION = 5,
    DYNARAG_ERR_SCORER = 6,
    DYNARAG_ERR_EMBEDDER = 7,
    DYNARAG_ERR_CALLER = 8,
    DYNARAG_ERR_GENERATOR = 9,
    DYNARAG_ERR_HALLUCINATED_API = 10,
    DYNARAG_ERR_HALLUCINATED_PARAMETER = 11,
    DYNARAG_ERR_MISSING_PARAMETER = 12,
    DYNARAG_ERR_TYPE_MISMATCH = 13,
    DYNARAG_ERR_BUDGET = 14,
    DYNARAG_ERR_CONFIG = 15,
    DYNARAG_ERR_INTERNAL = 16
} dynarag_status;

typedef struct dynarag_pipeline dynarag_pipeline;
typedef struct dynarag_mock_server dynarag_mock_server;

const char* dynarag_version(void);
const char* dynarag_status_name(dynarag_status status);

/* Thread-local message describing the most recent failure on this thread. */
const char* dynarag_last_error(void);

void dynarag_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

/* Resolves the effective run configuration with precedence
 * flags > environment (DYNARAG_*) > config file > defaults.
 * config_file_path may be NULL (no file layer); flags_json may be NULL
 * or a partial config JSON object. */
dynarag_status dynarag_resolve_config(const char* config_file_path,
                                      const char* flags_json,
                                      char** out_config_json);

/* ------------------------------------------------------------------ */
/* Pipeline                                                            */
/* ------------------------------------------------------------------ */

/* Builds a pipeline from a resolved config JSON. In task2 mode the
 * config's catalog path must point to a schema catalog file. */
dynarag_status dynarag_pipeline_new(const char* config_json, dynarag_pipeline** out_pipeline);
void dynarag_pipeline_free(dynarag_pipeline* pipeline);

/* Runs one dataset record (JSON, dataset-line format) and returns its
 * trace as JSON. */
dynarag_status dynarag_pipeline_run_record(dynarag_pipeline* pipeline,
                                           const char* record_json,
                                           char** out_trace_json);

/* Runs a dataset file and writes one trace per line to trace_out_path.
 * parallelism <= 0 uses the configured value. */
dynarag_status dynarag_pipeline_run_file(dynarag_pipeline* pipeline,
                                         const char* dataset_path,
                                         const char* trace_out_path,
                                         int parallelism,
                                         size_t* out_record_count);

/* ------------------------------------------------------------------ */
/* Stage entry points                                                  */
/* ------------------------------------------------------------------ */

/* HTML -> cleaned paragraph text (never fails on malformed markup). */
dynarag_status dynarag_clean_html(const char* html, char** out_text);

/* Tunes the sufficiency threshold on a labeled dev-set JSONL file. */
dynarag_status dynarag_tune_threshold_file(const char* devset_path,
                                           double* out_threshold,
                                           double* out_f1);

/* Top-m schema candidates for a query against a catalog file, as a JSON
 * array of {"name", "similarity"}. config_json may be NULL (reference
 * embedder) or a resolved config selecting the embedder binding. */
dynarag_status dynarag_schema_top_m(const char* catalog_path,
                                    const char* query_text,
                                    int m,
                                    const char* config_json,
                                    char** out_hits_json);

/* Evaluates a trace file against its dataset. breakdown_key may be NULL
 * or one of "dynamism" | "domain" | "question_type". The report JSON
 * carries overall metrics, optional per-group metrics, a rendered text
 * table and a CSV. */
dynarag_status dynarag_eval_traces(const char* trace_path,
                                   const char* dataset_path,
                                   const char* breakdown_key,
                                   char** out_report_json);

/* ------------------------------------------------------------------ */
/* Mock API server                                                     */
/* ------------------------------------------------------------------ */

/* Serves canned fixture responses for every schema in the catalog.
 * Construction fails when fixtures and catalog do not cover each other. */
dynarag_status dynarag_mock_server_new(const char* catalog_path,
                                       const char* fixtures_path,
                                       dynarag_mock_server** out_server);

/* port 0 binds a free port; the bound port is returned. */
dynarag_status dynarag_mock_server_start(dynarag_mock_server* server, int port,
                                         int* out_port);
void dynarag_mock_server_stop(dynarag_mock_server* server);
void dynarag_mock_server_free(dynarag_mock_server* server);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DYNARAG_H */
