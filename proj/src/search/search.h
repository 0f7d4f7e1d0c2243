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
 * \file search/search.h
 * \brief Beam-search decoding of outlines and fills with execution guidance.
 *
 * Beams keep at most K entries ordered by score, ties by insertion order.
 * Outline states that choose End leave the beam for a finished set and stop
 * consuming width. Fill beams never branch on Ans/Var or copy-forced slots.
 * With execution guidance every hypothetical edge fill is serialized as an
 * ASK program (unfilled relations become predicate variables) and executed;
 * an empty result removes the hypothesis.
 */
#ifndef QGFORGE_SEARCH_SEARCH_H_
#define QGFORGE_SEARCH_SEARCH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "candidates/candidates.h"
#include "kg/store.h"
#include "nn/model.h"

namespace qgforge {

struct SearchOptions {
  int beam = 5;
  bool execution_guidance = true;
  /*! \brief Step budget of one ASK probe; an exhausted probe prunes the hypothesis. */
  std::uint64_t probe_step_budget = 200000;
};

struct SearchStats {
  std::uint64_t outline_scored = 0;
  std::uint64_t vertex_scored = 0;
  std::uint64_t edge_scored = 0;
  /*! \brief Largest candidate count seen at one step of each phase. */
  int y_outline = 0;
  int y_vertex = 0;
  int y_edge = 0;
  /*! \brief Largest vertex count among all explored states. */
  int max_vertices = 0;
  int outline_steps = 0;
  /*! \brief ASK probes requested (cache hits included) and actually executed. */
  std::uint64_t eta = 0;
  std::uint64_t probes_executed = 0;
  std::uint64_t probes_pruned = 0;
  double kg_ms = 0.0;
  double inference_ms = 0.0;

  std::uint64_t scored() const { return outline_scored + vertex_scored + edge_scored; }
  /*! \brief (N-1) K Y_I with the measured N and Y_I. */
  double EtaBound(int beam) const;
  /*! \brief Scoring-count estimate with the measured N and Y values. */
  double ScoringBound(int beam) const;
  void Merge(const SearchStats& other);
};

/*! \brief (3n-1) K Y_o + n K Y_v + (n-1) K Y_e, and 0 for n = 0. */
double EstimateSearchSpace(int n, int beam, double y_outline, double y_vertex, double y_edge);

struct ScoredGraph {
  Graph graph;
  double score = 0.0;
};

/*!
 * \brief Top-K finished abstract graphs, best first.
 * \throws Error(kNoResult) when no state finishes within 3*15-1 steps.
 */
std::vector<ScoredGraph> DecodeOutline(const nn::Model& model, std::string_view question, int beam,
                                       SearchStats* stats = nullptr);

/*! \brief Beam entry of the filling phases. */
struct FillHypothesis {
  GenerationState state;
  double score = 0.0;
  std::vector<double> stream[2];
  std::vector<double> previous[2];
};

/*!
 * \brief Fills the vertex slots of the given graphs.
 * \throws Error(kNoResult) when every hypothesis lacks candidates.
 */
std::vector<FillHypothesis> DecodeFillVertices(const nn::Model& model, std::string_view question,
                                               const CandidatePool& pool,
                                               const std::vector<ScoredGraph>& aqgs, int beam,
                                               SearchStats* stats = nullptr);

/*! \brief Memoized ASK probes against one store. */
class ProbeCache {
 public:
  ProbeCache(const TripleStore& kg, std::uint64_t step_budget) : kg_(&kg), budget_(step_budget) {}
  /*!
   * \brief True when the ASK form of \p g has a solution. Unfilled slots are
   * left out, and so is a comparison into a subquery segment that still has
   * unfilled edges, so a false probe rules out every completion of \p g.
   */
  bool Probe(const Graph& g, SearchStats* stats);

 private:
  const TripleStore* kg_;
  std::uint64_t budget_;
  std::map<std::string, bool> cache_;
};

/*!
 * \brief Fills edge slots; with \p kg non-null and guidance enabled every
 * candidate fill is probed.
 * \return the final beam, best first.
 * \throws Error(kEmptyResult) when every hypothesis is pruned.
 */
std::vector<FillHypothesis> DecodeFillEdgesBeam(const nn::Model& model, std::string_view question,
                                               const CandidatePool& pool,
                                               const std::vector<FillHypothesis>& start, int beam,
                                               const TripleStore* kg, const SearchOptions& options,
                                               SearchStats* stats = nullptr);
/*!
 * \brief Best graph of DecodeFillEdgesBeam.
 * \throws Error(kEmptyResult) when every hypothesis is pruned.
 */
ScoredGraph DecodeFillEdges(const nn::Model& model, std::string_view question,
                            const CandidatePool& pool, const std::vector<FillHypothesis>& start,
                            int beam, const TripleStore* kg, const SearchOptions& options,
                            SearchStats* stats = nullptr);

/*! \brief Outline, vertex fill and edge fill in sequence. */
ScoredGraph Parse(const nn::Model& model, std::string_view question, const CandidatePool& pool,
                  const TripleStore& kg, const SearchOptions& options,
                  SearchStats* stats = nullptr);

/*! \brief Intent implied by a graph: ASK when it carries an ASK aggregate. */
sparql::Intent GraphIntent(const Graph& g);

}  // namespace qgforge

#endif  // QGFORGE_SEARCH_SEARCH_H_
