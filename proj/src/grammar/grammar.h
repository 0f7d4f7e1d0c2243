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
 * \file grammar/grammar.h
 * \brief Outlining and filling state machines with their legality masks.
 *
 * Outlining builds an abstract graph by cycles of AddVertex, SelectVertex and
 * AddEdge; AddVertex(End) stops it after 3N-1 steps for N vertices. Filling
 * then instantiates the N vertex slots and N-1 edge slots in id order.
 *
 * Legality rules (checked one step ahead):
 *  - the first vertex is Ans, and Ans appears nowhere else;
 *  - a new vertex joins the segment of the previous one (delta = 0) or opens
 *    the next segment (delta = 1); opening requires a Var vertex, at least two
 *    vertices so far and a graph that is already valid, so earlier segments are
 *    complete when they are left;
 *  - the first vertex of a segment is linked by a Cmp edge to a Var of a lower
 *    segment; every other vertex attaches inside its own segment;
 *  - edge classes respect the endpoint rules of the validator (Rel avoids Val
 *    and never starts at Type, Cmp joins Var/Val, Ord runs from Var/Ans to
 *    Val, Agg runs from Var to Ans or to a subquery Var with no other
 *    non-Cmp edge) and each segment has at most one Ord or Agg edge;
 *  - Val vertices are always leaves and cannot be selected;
 *  - copy targets are earlier slots of the same class that are not copies
 *    themselves; vertex copies point to other segments, one per target and
 *    segment;
 *  - End is legal once the graph validates, and at most 15 vertices are added.
 */
#ifndef QGFORGE_GRAMMAR_GRAMMAR_H_
#define QGFORGE_GRAMMAR_GRAMMAR_H_

#include <optional>
#include <string>
#include <vector>

#include "common/error.h"
#include "graph/graph.h"

namespace qgforge {

inline constexpr int kMaxVertices = 15;

enum class OutlineOpKind : std::uint8_t { kAddVertex, kSelectVertex, kAddEdge };
enum class FillOpKind : std::uint8_t { kFillVertex, kFillEdge };
enum class Phase : std::uint8_t { kOutlining, kFillingVertices, kFillingEdges, kDone };

std::string_view PhaseName(Phase p);

/*! \brief Operator kind at outline step t (t >= 1). */
OutlineOpKind ScheduleOutline(int t);

struct FillSlot {
  FillOpKind kind;
  /*! \brief Vertex id for FillVertex, edge id for FillEdge. */
  int slot;
  /*! \brief Outline step that created the slot. */
  int outline_step;
};

/*!
 * \brief Operator and slot of fill step t for a graph of n vertices.
 * \throws Error(kRange) unless 1 <= t <= 2n-1.
 */
FillSlot ScheduleFill(int t, int n);

struct OutlineOp {
  OutlineOpKind kind = OutlineOpKind::kAddVertex;
  VertexClass vertex_class = VertexClass::kAns;  // AddVertex
  int delta = 0;                                 // AddVertex
  int vertex = -1;                               // SelectVertex
  EdgeClass edge_class = EdgeClass::kRel;        // AddEdge
  Direction direction = Direction::kForward;     // AddEdge
  /*! \brief Copy target of AddVertex / AddEdge, -1 for none. */
  int copy = -1;

  static OutlineOp AddVertex(VertexClass cls, int delta = 0, int copy = -1);
  static OutlineOp End() { return AddVertex(VertexClass::kEnd); }
  static OutlineOp SelectVertex(int vertex);
  static OutlineOp AddEdge(EdgeClass cls, Direction dir, int copy = -1);

  bool operator==(const OutlineOp& o) const;
  std::string ToString() const;
};

struct FillOp {
  FillOpKind kind = FillOpKind::kFillVertex;
  int slot = 0;
  /*! \brief Instance; empty for Ans/Var vertices. */
  std::optional<std::string> instance;

  bool operator==(const FillOp&) const = default;
  std::string ToString() const;
};

struct GenerationState {
  Graph graph;
  /*! \brief Next outline step (1-based) while outlining, next fill step afterwards. */
  int t = 1;
  Phase phase = Phase::kOutlining;
  /*! \brief Vertex added by the latest AddVertex. */
  std::optional<int> pending;
  /*! \brief Vertex chosen by the latest SelectVertex. */
  std::optional<int> selected;
  int segment = 0;
  double log_score = 0.0;

  /*! \brief Empty outlining state. */
  static GenerationState Initial();
  /*! \brief Filling state over a finished abstract graph. */
  static GenerationState ForFilling(const AbstractQueryGraph& aqg);

  OutlineOpKind NextOutlineKind() const { return ScheduleOutline(t); }
  FillSlot NextFillSlot() const { return ScheduleFill(t, graph.num_vertices()); }
};

/*! \brief Every legal outline operator at the current step, in a fixed order. */
std::vector<OutlineOp> LegalOutlineOps(const GenerationState& state);
bool IsLegalOutlineOp(const GenerationState& state, const OutlineOp& op);

/*!
 * \brief Applies an outline operator.
 * \throws Error(kIllegalOp) when the operator is not legal at this step.
 */
GenerationState ApplyOutline(const GenerationState& state, const OutlineOp& op);

/*!
 * \brief Checks an instance for the next fill slot without applying it.
 * \return empty string when legal, otherwise the reason.
 */
std::string CheckFill(const GenerationState& state, const std::optional<std::string>& instance,
                      ErrorCode* code = nullptr);

/*! \brief Instance forced by a copy-link on the next fill slot, if any. */
std::optional<std::string> ForcedInstance(const GenerationState& state);

/*!
 * \brief Applies a fill operator.
 * \throws Error(kClassMismatch), Error(kCopyViolation) or Error(kIllegalOp).
 */
GenerationState ApplyFill(const GenerationState& state, const FillOp& op);

/*! \brief One JSON object per operator, one operator per line. */
std::string OutlineOpToJson(const OutlineOp& op);
std::string FillOpToJson(const FillOp& op);
OutlineOp OutlineOpFromJson(std::string_view line);
FillOp FillOpFromJson(std::string_view line);

}  // namespace qgforge

#endif  // QGFORGE_GRAMMAR_GRAMMAR_H_
