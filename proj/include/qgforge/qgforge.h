/*
 * Copyright 2026 The qgforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*!
 * \file qgforge/qgforge.h
 * \brief C interface of the qgforge shared library.
 *
 * Objects are opaque handles owned by the caller and released with their
 * matching free function. Every fallible call returns a qg_status; on failure
 * the calling thread's last error (name, message, line, column) describes it.
 * Strings returned through char** out-parameters are heap-allocated and must
 * be released with qg_string_free. Out-parameters are left untouched on
 * failure.
 */
#ifndef QGFORGE_QGFORGE_H_
#define QGFORGE_QGFORGE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(QGFORGE_BUILDING_LIBRARY)
#define QGFORGE_API __declspec(dllexport)
#else
#define QGFORGE_API __declspec(dllimport)
#endif
#else
#define QGFORGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qg_status {
  QG_OK = 0,
  QG_ERR_INVALID_ARGUMENT = 1,
  QG_ERR_IO = 2,
  QG_ERR_SYNTAX = 3,
  QG_ERR_UNSUPPORTED_FEATURE = 4,
  QG_ERR_REWRITE = 5,
  QG_ERR_VALIDATION = 6,
  QG_ERR_NON_TREE = 7,
  QG_ERR_SERIALIZATION = 8,
  QG_ERR_PARSE = 9,
  QG_ERR_EVAL = 10,
  QG_ERR_BUDGET_EXCEEDED = 11,
  QG_ERR_ILLEGAL_OP = 12,
  QG_ERR_CLASS_MISMATCH = 13,
  QG_ERR_COPY_VIOLATION = 14,
  QG_ERR_RANGE = 15,
  QG_ERR_DEAD_STATE = 16,
  QG_ERR_EMPTY_POOL = 17,
  QG_ERR_EMPTY_INPUT = 18,
  QG_ERR_NO_RESULT = 19,
  QG_ERR_EMPTY_RESULT = 20,
  QG_ERR_DATA = 21,
  QG_ERR_CHECKPOINT = 22,
  QG_ERR_INTERNAL = 99
} qg_status;

/*! \brief Loaded triple store. */
typedef struct qg_kg qg_kg;
/*! \brief Trained scorer together with its candidate rankers. */
typedef struct qg_model qg_model;

/*! \brief Receives one progress line; \p user is passed through unchanged. */
typedef void (*qg_log_fn)(const char* line, void* user);

/*! \brief Knobs shared by training, evaluation and parsing. */
typedef struct qg_options {
  int dim;                    /* hidden size, default 64 */
  uint64_t seed;              /* default 1 */
  int beam;                   /* beam width K, default 5 */
  int execution_guidance;     /* nonzero to probe edge fills, default 1 */
  int epochs;                 /* default 200 */
  int batch;                  /* default 16 */
  double learning_rate;       /* default 1e-2 */
  int eval_every;             /* train-set check interval in epochs, 0 disables; default 10 */
  int ranker_epochs;          /* default 30 */
  int rel_top_k;              /* default 50 */
  int type_top_k;             /* default 3 */
  uint64_t probe_step_budget; /* default 200000 */
  int timing;                 /* nonzero adds wall-clock fields to reports, default 0 */
} qg_options;

/*! \brief Library version string, e.g. "1.0.0". */
QGFORGE_API const char* qg_version(void);
/*! \brief Stable name of a status, e.g. "SyntaxError". */
QGFORGE_API const char* qg_status_name(qg_status status);

/*! \brief Message of the calling thread's last failure ("" if none). */
QGFORGE_API const char* qg_last_error(void);
/*! \brief Status of the calling thread's last failure (QG_OK if none). */
QGFORGE_API qg_status qg_last_status(void);
/*! \brief 1-based line/column of the last parse-style failure, 0 when unknown. */
QGFORGE_API int qg_last_error_line(void);
QGFORGE_API int qg_last_error_column(void);
/*! \brief One-line JSON record {"error", "message", "line", "column"} of the last failure. */
QGFORGE_API qg_status qg_last_error_json(char** out);

QGFORGE_API void qg_string_free(char* s);

/*! \brief 0 quiet, 1 progress, 2 debug. */
QGFORGE_API void qg_set_log_level(int level);
QGFORGE_API int qg_log_level(void);

QGFORGE_API void qg_options_default(qg_options* options);

/* ---- programs and graphs ---------------------------------------------- */

/*! \brief Parses, rewrites and converts a program to graph JSON. */
QGFORGE_API qg_status qg_convert(const char* sparql, int indent, char** graph_json);
/*! \brief Validation report {"ok": bool, "violations": [...]} of a graph JSON. */
QGFORGE_API qg_status qg_validate(const char* graph_json, char** report_json);
/*! \brief Program text of a graph JSON; \p ask nonzero forces the ASK form. */
QGFORGE_API qg_status qg_to_sparql(const char* graph_json, int ask, char** sparql);
/*! \brief Supervision operator sequences of a program as JSON. */
QGFORGE_API qg_status qg_signals(const char* id, const char* sparql, char** signals_json);

/* ---- knowledge graph -------------------------------------------------- */

QGFORGE_API qg_status qg_kg_load(const char* path, qg_kg** out);
QGFORGE_API qg_status qg_kg_from_text(const char* text, qg_kg** out);
QGFORGE_API void qg_kg_free(qg_kg* kg);
/*! \brief Counts of loaded triples, all triples, entities, relations and types as JSON. */
QGFORGE_API qg_status qg_kg_stats(const qg_kg* kg, char** stats_json);
/*! \brief Result table {"columns": [...], "rows": [[...]]} or {"ask": bool}. */
QGFORGE_API qg_status qg_kg_query(const qg_kg* kg, const char* sparql, char** result_json);

/* ---- model ------------------------------------------------------------ */

/*! \brief Trains on a JSON Lines dataset {id, question, sparql}. */
QGFORGE_API qg_status qg_train(const char* dataset_jsonl, const qg_kg* kg,
                               const qg_options* options, qg_log_fn log, void* user,
                               qg_model** out);
QGFORGE_API qg_status qg_model_load(const char* path, qg_model** out);
QGFORGE_API qg_status qg_model_save(const qg_model* model, const char* path);
QGFORGE_API void qg_model_free(qg_model* model);

/*!
 * \brief Evaluates a dataset. Any of the three outputs may be NULL: the JSON
 * report, the text table, and the per-example trace (JSON Lines).
 */
QGFORGE_API qg_status qg_eval(const qg_model* model, const char* dataset_jsonl, const qg_kg* kg,
                              const qg_options* options, char** report_json, char** table,
                              char** trace_jsonl);

/*!
 * \brief Candidate pool of a question as JSON. Entities come from
 * \p entities (newline-separated ids) when non-NULL, else from the entities
 * named by \p gold_sparql when non-NULL, else none.
 */
QGFORGE_API qg_status qg_candidates(const qg_model* model, const qg_kg* kg, const char* question,
                                    const char* entities, const char* gold_sparql,
                                    const qg_options* options, char** pool_json);

/*!
 * \brief Parses a question against a candidate pool JSON.
 * \param emit "graph", "sparql" or "trace" (graph, program and search counters).
 */
QGFORGE_API qg_status qg_parse(const qg_model* model, const qg_kg* kg, const char* question,
                               const char* pool_json, const qg_options* options, const char* emit,
                               char** out);

/* ---- diagnostics ------------------------------------------------------ */

/*! \brief Example count, convertible count and edge-count histogram of a dataset. */
QGFORGE_API qg_status qg_stats_dataset(const char* dataset_jsonl, char** stats_json);
/*! \brief Scorer calls and probe counts against their bounds for an eval trace. */
QGFORGE_API qg_status qg_stats_trace(const char* trace_jsonl, char** stats_json);

#ifdef __cplusplus
}
#endif

#endif  /* QGFORGE_QGFORGE_H_ */
