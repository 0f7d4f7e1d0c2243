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
 * \file supervision/supervision.h
 * \brief Teacher-forcing operator sequences derived from gold query graphs.
 *
 * A depth-first traversal starting at the Ans vertex emits one
 * AddVertex/SelectVertex/AddEdge cycle per tree edge. Segments are visited in
 * order: segment 0 is finished before segment 1 is entered through its link
 * comparison, and so on. Children are visited by edge class (Rel, Cmp, Ord,
 * Agg), then instance, then direction, then gold vertex id.
 */
#ifndef QGFORGE_SUPERVISION_SUPERVISION_H_
#define QGFORGE_SUPERVISION_SUPERVISION_H_

#include <optional>
#include <string>
#include <vector>

#include "grammar/grammar.h"

namespace qgforge {

struct SupervisionSequences {
  std::vector<OutlineOp> outline;
  /*! \brief One entry per vertex in visit order; empty for Ans/Var. */
  std::vector<std::optional<std::string>> vertex_fill;
  /*! \brief One entry per edge in creation order. */
  std::vector<std::string> edge_fill;
  /*! \brief Gold vertex id of each visited vertex (replay id -> gold id). */
  std::vector<int> vertex_order;
  /*! \brief Gold edge id of each created edge (replay id -> gold id). */
  std::vector<int> edge_order;

  /*! \brief Fill operators in schedule order. */
  std::vector<FillOp> FillOps() const;
};

/*!
 * \brief Builds the operator sequences of a valid query graph.
 * \throws Error(kValidation) when \p g is not a valid, fully filled graph.
 */
SupervisionSequences BuildSignals(const QueryGraph& g);

/*!
 * \brief Runs the sequences through the grammar engine.
 * \throws Error(kIllegalOp) when some operator is rejected,
 * Error(kInvalidArgument) on malformed sequences.
 */
QueryGraph Replay(const SupervisionSequences& s);

/*! \brief Action-log JSON object tagged with an example id. */
std::string SignalsToJson(const std::string& id, const SupervisionSequences& s);
SupervisionSequences SignalsFromJson(std::string_view text, std::string* id = nullptr);

}  // namespace qgforge

#endif  // QGFORGE_SUPERVISION_SUPERVISION_H_
