// Copyright 2026 The qgforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*!
 * \file c_api.cc
 * \brief extern "C" wrapper: exceptions become status codes plus a
 * thread-local error record.
 */
#include "qgforge/qgforge.h"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>

#include <json.hpp>

#include "candidates/candidates.h"
#include "common/error.h"
#include "graph/graph.h"
#include "kg/store.h"
#include "nn/model.h"
#include "pipeline/pipeline.h"
#include "search/search.h"
#include "sparql/bridge.h"
#include "supervision/supervision.h"

struct qg_kg {
  qgforge::TripleStore store;
};

struct qg_model {
  qgforge::nn::Model model;
};

namespace {

using Json = nlohmann::ordered_json;

struct LastError {
  qg_status status = QG_OK;
  std::string name;
  std::string message;
  int line = 0;
  int column = 0;
};

thread_local LastError g_last;
std::atomic<int> g_log_level{0};

qg_status StatusOf(qgforge::ErrorCode code) {
  // Status values follow the ErrorCode order, offset by one.
  return static_cast<qg_status>(static_cast<int>(code) + 1);
}

qg_status Fail(qg_status status, std::string name, std::string message, int line = 0,
               int column = 0) {
  g_last = LastError{status, std::move(name), std::move(message), line, column};
  return status;
}

// Runs `body`, translating every exception into a status.
template <typename Body>
qg_status Guard(Body&& body) {
  try {
    body();
    g_last = LastError{};
    return QG_OK;
  } catch (const qgforge::Error& e) {
    return Fail(StatusOf(e.code()), std::string(qgforge::ErrorCodeName(e.code())), e.what(),
                e.line(), e.column());
  } catch (const std::bad_alloc&) {
    return Fail(QG_ERR_INTERNAL, "InternalError", "out of memory");
  } catch (const std::exception& e) {
    return Fail(QG_ERR_INTERNAL, "InternalError", e.what());
  }
}

#define QG_REQUIRE(ptr)                                                                   \
  do {                                                                                    \
    if ((ptr) == nullptr) {                                                               \
      throw qgforge::Error(qgforge::ErrorCode::kInvalidArgument, #ptr " must not be NULL"); \
    }                                                                                     \
  } while (0)

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

qgforge::PipelineOptions ToPipeline(const qg_options* o) {
  qg_options d;
  qg_options_default(&d);
  if (!o) o = &d;
  QG_CHECK(o->dim > 0, qgforge::ErrorCode::kInvalidArgument, "dim must be positive");
  QG_CHECK(o->beam > 0, qgforge::ErrorCode::kInvalidArgument, "beam must be positive");
  QG_CHECK(o->epochs >= 0, qgforge::ErrorCode::kInvalidArgument, "epochs must be non-negative");
  QG_CHECK(o->batch > 0, qgforge::ErrorCode::kInvalidArgument, "batch must be positive");
  qgforge::PipelineOptions p;
  p.dim = o->dim;
  p.seed = o->seed;
  p.train.epochs = o->epochs;
  p.train.batch_size = o->batch;
  p.train.lr = o->learning_rate;
  p.train.seed = o->seed;
  p.ranker_epochs = o->ranker_epochs;
  p.pool.rel_top_k = o->rel_top_k;
  p.pool.type_top_k = o->type_top_k;
  p.search.beam = o->beam;
  p.search.execution_guidance = o->execution_guidance != 0;
  p.search.probe_step_budget = o->probe_step_budget;
  p.eval_every = o->eval_every;
  return p;
}

Json StatsJson(const qgforge::SearchStats& s, int beam) {
  Json j;
  j["outline_scored"] = s.outline_scored;
  j["vertex_scored"] = s.vertex_scored;
  j["edge_scored"] = s.edge_scored;
  j["scored"] = s.scored();
  j["scored_bound"] = s.ScoringBound(beam);
  j["y_outline"] = s.y_outline;
  j["y_vertex"] = s.y_vertex;
  j["y_edge"] = s.y_edge;
  j["max_vertices"] = s.max_vertices;
  j["eta"] = s.eta;
  j["eta_bound"] = s.EtaBound(beam);
  j["probes_executed"] = s.probes_executed;
  j["probes_pruned"] = s.probes_pruned;
  return j;
}

}  // namespace

extern "C" {

const char* qg_version(void) { return "1.0.0"; }

const char* qg_status_name(qg_status status) {
  if (status == QG_OK) return "Ok";
  if (status == QG_ERR_INTERNAL) return "InternalError";
  int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(qgforge::ErrorCode::kCheckpoint)) return "Unknown";
  return qgforge::ErrorCodeName(static_cast<qgforge::ErrorCode>(code)).data();
}

const char* qg_last_error(void) { return g_last.message.c_str(); }
qg_status qg_last_status(void) { return g_last.status; }
int qg_last_error_line(void) { return g_last.line; }
int qg_last_error_column(void) { return g_last.column; }

qg_status qg_last_error_json(char** out) {
  if (!out) return QG_ERR_INVALID_ARGUMENT;
  Json j;
  j["error"] = g_last.status == QG_OK ? "Ok" : g_last.name;
  j["message"] = g_last.message;
  j["line"] = g_last.line;
  j["column"] = g_last.column;
  try {
    *out = Dup(j.dump());
  } catch (const std::bad_alloc&) {
    return QG_ERR_INTERNAL;
  }
  return QG_OK;
}

void qg_string_free(char* s) { std::free(s); }

void qg_set_log_level(int level) { g_log_level = level < 0 ? 0 : level; }
int qg_log_level(void) { return g_log_level; }

void qg_options_default(qg_options* o) {
  if (!o) return;
  o->dim = qgforge::nn::kDefaultDim;
  o->seed = 1;
  o->beam = 5;
  o->execution_guidance = 1;
  o->epochs = 200;
  o->batch = 16;
  o->learning_rate = 1e-2;
  o->eval_every = 10;
  o->ranker_epochs = 30;
  o->rel_top_k = qgforge::kDefaultRelTopK;
  o->type_top_k = qgforge::kDefaultTypeTopK;
  o->probe_step_budget = 200000;
  o->timing = 0;
}

qg_status qg_convert(const char* sparql, int indent, char** graph_json) {
  return Guard([&] {
    QG_REQUIRE(sparql);
    QG_REQUIRE(graph_json);
    qgforge::QueryGraph g = qgforge::sparql::ConvertProgram(sparql);
    *graph_json = Dup(qgforge::GraphToJson(g, indent));
  });
}

qg_status qg_validate(const char* graph_json, char** report_json) {
  return Guard([&] {
    QG_REQUIRE(graph_json);
    QG_REQUIRE(report_json);
    qgforge::Graph g = qgforge::GraphFromJson(graph_json);
    qgforge::ValidateOptions opt;
    opt.kind = g.IsAbstract() ? qgforge::GraphKind::kAbstract : qgforge::GraphKind::kQuery;
    qgforge::ValidationReport r = qgforge::Validate(g, opt);
    Json j;
    j["ok"] = r.ok();
    j["violations"] = Json::array();
    for (const auto& v : r.violations) j["violations"].push_back({{"code", v.code}, {"detail", v.detail}});
    *report_json = Dup(j.dump());
  });
}

qg_status qg_to_sparql(const char* graph_json, int ask, char** sparql) {
  return Guard([&] {
    QG_REQUIRE(graph_json);
    QG_REQUIRE(sparql);
    qgforge::Graph g = qgforge::GraphFromJson(graph_json);
    auto intent = ask ? qgforge::sparql::Intent::kAsk : qgforge::GraphIntent(g);
    *sparql = Dup(qgforge::sparql::ToSparql(g, intent));
  });
}

qg_status qg_signals(const char* id, const char* sparql, char** signals_json) {
  return Guard([&] {
    QG_REQUIRE(sparql);
    QG_REQUIRE(signals_json);
    qgforge::QueryGraph g = qgforge::sparql::ConvertProgram(sparql);
    *signals_json = Dup(qgforge::SignalsToJson(id ? id : "", qgforge::BuildSignals(g)));
  });
}

qg_status qg_kg_load(const char* path, qg_kg** out) {
  return Guard([&] {
    QG_REQUIRE(path);
    QG_REQUIRE(out);
    *out = new qg_kg{qgforge::TripleStore::Load(path)};
  });
}

qg_status qg_kg_from_text(const char* text, qg_kg** out) {
  return Guard([&] {
    QG_REQUIRE(text);
    QG_REQUIRE(out);
    *out = new qg_kg{qgforge::TripleStore::FromText(text)};
  });
}

void qg_kg_free(qg_kg* kg) { delete kg; }

qg_status qg_kg_stats(const qg_kg* kg, char** stats_json) {
  return Guard([&] {
    QG_REQUIRE(kg);
    QG_REQUIRE(stats_json);
    Json j;
    j["triples_loaded"] = kg->store.num_loaded();
    j["triples_total"] = kg->store.size();
    j["terms"] = kg->store.num_terms();
    j["entities"] = kg->store.Entities().size();
    j["relations"] = kg->store.Relations().size();
    j["types"] = kg->store.Types().size();
    *stats_json = Dup(j.dump(2));
  });
}

qg_status qg_kg_query(const qg_kg* kg, const char* sparql, char** result_json) {
  return Guard([&] {
    QG_REQUIRE(kg);
    QG_REQUIRE(sparql);
    QG_REQUIRE(result_json);
    qgforge::sparql::Query q = qgforge::sparql::Parse(sparql);
    Json j;
    if (q.intent == qgforge::sparql::Intent::kAsk) {
      j["ask"] = qgforge::Ask(kg->store, q);
    } else {
      qgforge::ResultTable t = qgforge::Select(kg->store, q);
      j["columns"] = t.columns;
      j["rows"] = t.rows;
    }
    *result_json = Dup(j.dump());
  });
}

qg_status qg_train(const char* dataset_jsonl, const qg_kg* kg, const qg_options* options,
                   qg_log_fn log, void* user, qg_model** out) {
  return Guard([&] {
    QG_REQUIRE(dataset_jsonl);
    QG_REQUIRE(kg);
    QG_REQUIRE(out);
    auto examples = qgforge::ParseDataset(dataset_jsonl);
    qgforge::LogFn fn;
    if (log) fn = [log, user](const std::string& line) { log(line.c_str(), user); };
    auto outcome = qgforge::TrainPipeline(examples, kg->store, ToPipeline(options), fn);
    *out = new qg_model{std::move(outcome.model)};
  });
}

qg_status qg_model_load(const char* path, qg_model** out) {
  return Guard([&] {
    QG_REQUIRE(path);
    QG_REQUIRE(out);
    *out = new qg_model{qgforge::nn::Model::Load(path)};
  });
}

qg_status qg_model_save(const qg_model* model, const char* path) {
  return Guard([&] {
    QG_REQUIRE(model);
    QG_REQUIRE(path);
    model->model.Save(path);
  });
}

void qg_model_free(qg_model* model) { delete model; }

qg_status qg_eval(const qg_model* model, const char* dataset_jsonl, const qg_kg* kg,
                  const qg_options* options, char** report_json, char** table,
                  char** trace_jsonl) {
  return Guard([&] {
    QG_REQUIRE(model);
    QG_REQUIRE(dataset_jsonl);
    QG_REQUIRE(kg);
    auto examples = qgforge::ParseDataset(dataset_jsonl);
    auto p = ToPipeline(options);
    qgforge::EvalReport r = qgforge::Evaluate(model->model, examples, kg->store, p);
    bool timing = options && options->timing;
    std::string json = r.ToJson(timing, 2);
    std::string text = r.ToTable();
    std::string trace = r.TraceJsonl(p.search.beam);
    char* a = report_json ? Dup(json) : nullptr;
    char* b = table ? Dup(text) : nullptr;
    char* c = trace_jsonl ? Dup(trace) : nullptr;
    if (report_json) *report_json = a;
    if (table) *table = b;
    if (trace_jsonl) *trace_jsonl = c;
  });
}

qg_status qg_candidates(const qg_model* model, const qg_kg* kg, const char* question,
                        const char* entities, const char* gold_sparql, const qg_options* options,
                        char** pool_json) {
  return Guard([&] {
    QG_REQUIRE(model);
    QG_REQUIRE(kg);
    QG_REQUIRE(question);
    QG_REQUIRE(pool_json);
    std::vector<std::string> ents;
    if (entities) {
      std::istringstream in(entities);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty()) ents.push_back(line);
      }
    } else if (gold_sparql) {
      ents = qgforge::GoldEntities(gold_sparql);
    }
    auto p = ToPipeline(options);
    qgforge::CandidatePool pool = qgforge::BuildPool(question, ents, kg->store,
                                                     model->model.rel_ranker(),
                                                     model->model.type_ranker(), p.pool);
    *pool_json = Dup(pool.ToJson(2));
  });
}

qg_status qg_parse(const qg_model* model, const qg_kg* kg, const char* question,
                   const char* pool_json, const qg_options* options, const char* emit,
                   char** out) {
  return Guard([&] {
    QG_REQUIRE(model);
    QG_REQUIRE(kg);
    QG_REQUIRE(question);
    QG_REQUIRE(pool_json);
    QG_REQUIRE(out);
    std::string mode = emit ? emit : "graph";
    QG_CHECK(mode == "graph" || mode == "sparql" || mode == "trace",
             qgforge::ErrorCode::kInvalidArgument, "emit must be graph, sparql or trace");
    qgforge::CandidatePool pool = qgforge::CandidatePool::FromJson(pool_json);
    auto p = ToPipeline(options);
    qgforge::SearchStats stats;
    qgforge::ScoredGraph best = qgforge::Parse(model->model, question, pool, kg->store, p.search,
                                               &stats);
    std::string sparql = qgforge::sparql::ToSparql(best.graph, qgforge::GraphIntent(best.graph));
    if (mode == "graph") {
      *out = Dup(qgforge::GraphToJson(best.graph, 2));
    } else if (mode == "sparql") {
      *out = Dup(sparql);
    } else {
      Json j;
      j["graph"] = Json::parse(qgforge::GraphToJson(best.graph));
      j["sparql"] = sparql;
      j["score"] = best.score;
      j["stats"] = StatsJson(stats, p.search.beam);
      *out = Dup(j.dump(2));
    }
  });
}

qg_status qg_stats_dataset(const char* dataset_jsonl, char** stats_json) {
  return Guard([&] {
    QG_REQUIRE(dataset_jsonl);
    QG_REQUIRE(stats_json);
    auto s = qgforge::ComputeDatasetStats(qgforge::ParseDataset(dataset_jsonl));
    Json j;
    j["examples"] = s.examples;
    j["convertible"] = s.convertible;
    j["max_vertices"] = s.max_vertices;
    Json hist = Json::object();
    for (const auto& [edges, count] : s.edge_histogram) hist[std::to_string(edges)] = count;
    j["edge_histogram"] = hist;
    *stats_json = Dup(j.dump(2));
  });
}

qg_status qg_stats_trace(const char* trace_jsonl, char** stats_json) {
  return Guard([&] {
    QG_REQUIRE(trace_jsonl);
    QG_REQUIRE(stats_json);
    auto s = qgforge::ComputeTraceStats(trace_jsonl);
    Json j;
    j["runs"] = s.runs;
    j["scored"] = s.scored;
    j["scored_bound"] = s.scored_bound;
    j["eta"] = s.eta;
    j["eta_bound"] = s.eta_bound;
    j["eta_violations"] = s.eta_violations;
    j["scoring_violations"] = s.scoring_violations;
    j["eta_bound_ok"] = s.eta_violations == 0;
    j["scoring_bound_ok"] = s.scoring_violations == 0;
    *stats_json = Dup(j.dump(2));
  });
}

}  // extern "C"
