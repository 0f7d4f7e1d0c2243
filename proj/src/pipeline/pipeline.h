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
 * \file pipeline/pipeline.h
 * \brief Datasets, end-to-end training and evaluation.
 */
#ifndef QGFORGE_PIPELINE_PIPELINE_H_
#define QGFORGE_PIPELINE_PIPELINE_H_

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "candidates/candidates.h"
#include "kg/store.h"
#include "nn/model.h"
#include "nn/train.h"
#include "search/search.h"

namespace qgforge {

struct Example {
  std::string id;
  std::string question;
  std::string sparql;
};

/*!
 * \brief Reads JSON Lines {id, question, sparql}.
 * \throws Error(kIo), Error(kParse) on malformed lines, Error(kData) on
 * duplicate ids.
 */
std::vector<Example> LoadDataset(const std::string& path);
std::vector<Example> ParseDataset(std::string_view text);
std::string DatasetToJsonl(const std::vector<Example>& examples);

struct PipelineOptions {
  int dim = nn::kDefaultDim;
  std::uint64_t seed = 1;
  nn::TrainConfig train;
  int ranker_epochs = 30;
  PoolOptions pool;
  SearchOptions search;
  /*! \brief Decode the training set every this many epochs; stop at 100% Gq. 0 disables. */
  int eval_every = 10;
};

using LogFn = std::function<void(const std::string&)>;

struct TrainOutcome {
  nn::Model model;
  std::vector<double> losses;
  /*! \brief (epoch, train Gq accuracy) at every check. */
  std::vector<std::pair<int, double>> gq_checks;
};

/*!
 * \brief Builds the vocabulary, trains the rankers, then the scorer.
 * \throws Error(kData) on an empty dataset or unconvertible gold programs.
 */
TrainOutcome TrainPipeline(const std::vector<Example>& examples, const TripleStore& kg,
                           const PipelineOptions& options, const LogFn& log = nullptr);

/*! \brief Inference pool: closed sets, values, gold entities, ranked relations/types. */
CandidatePool InferencePool(const nn::Model& model, const Example& ex, const TripleStore& kg,
                            const PoolOptions& options);

struct ExampleResult {
  std::string id;
  bool ok = false;
  std::string error;
  bool gq = false;
  bool ga = false;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool hit1 = false;
  std::string predicted_sparql;
  SearchStats stats;
};

/*!
 * \brief Answer-level and graph-level comparison of a predicted graph with a
 * gold program.
 */
ExampleResult ScorePrediction(const TripleStore& kg, const std::string& gold_sparql,
                              const QueryGraph& predicted);

struct EvalReport {
  std::vector<ExampleResult> examples;
  double gq = 0.0;
  double ga = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double hit1 = 0.0;
  SearchStats totals;

  /*! \brief Deterministic JSON; timing fields appear only when requested. */
  std::string ToJson(bool timing = false, int indent = 2) const;
  std::string ToTable() const;
  /*! \brief One JSON object per example with its search counters and bounds. */
  std::string TraceJsonl(int beam) const;
};

EvalReport Evaluate(const nn::Model& model, const std::vector<Example>& examples,
                    const TripleStore& kg, const PipelineOptions& options);

struct DatasetStats {
  std::size_t examples = 0;
  std::size_t convertible = 0;
  /*! \brief Number of examples per edge count of the gold graph. */
  std::map<int, int> edge_histogram;
  int max_vertices = 0;
};

DatasetStats ComputeDatasetStats(const std::vector<Example>& examples);

struct TraceStats {
  std::size_t runs = 0;
  std::uint64_t scored = 0;
  std::uint64_t eta = 0;
  /*! \brief Sums of the per-run bounds. */
  double scored_bound = 0.0;
  double eta_bound = 0.0;
  std::size_t eta_violations = 0;
  std::size_t scoring_violations = 0;
};

/*! \brief Aggregates a trace written by EvalReport::TraceJsonl. */
TraceStats ComputeTraceStats(std::string_view trace_jsonl);

}  // namespace qgforge

#endif  // QGFORGE_PIPELINE_PIPELINE_H_
