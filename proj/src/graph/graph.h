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
 * \file graph/graph.h
 * \brief Query graphs, abstract query graphs and their structural validator.
 *
 * Both graph kinds share one representation. An abstract graph simply has no
 * instances; a partially filled graph has some. Vertex and edge ids are dense
 * and follow insertion order.
 */
#ifndef QGFORGE_GRAPH_GRAPH_H_
#define QGFORGE_GRAPH_GRAPH_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qgforge {

enum class VertexClass : std::uint8_t { kAns, kVar, kEnt, kType, kVal, kEnd };
enum class EdgeClass : std::uint8_t { kRel, kOrd, kCmp, kAgg };
enum class Direction : std::uint8_t { kForward, kBackward };

inline constexpr int kNumVertexClasses = 6;
inline constexpr int kNumEdgeClasses = 4;

std::string_view VertexClassName(VertexClass c);
std::string_view EdgeClassName(EdgeClass c);
std::string_view DirectionName(Direction d);
std::optional<VertexClass> VertexClassFromName(std::string_view name);
std::optional<EdgeClass> EdgeClassFromName(std::string_view name);
std::optional<Direction> DirectionFromName(std::string_view name);

/*! \brief Ans and Var slots never carry an instance. */
inline bool IsInstanceVertexClass(VertexClass c) {
  return c == VertexClass::kEnt || c == VertexClass::kType || c == VertexClass::kVal;
}
/*! \brief Classes whose slots may carry a copy-link. */
inline bool IsCopyVertexClass(VertexClass c) {
  return c == VertexClass::kEnt || c == VertexClass::kType;
}
inline bool IsCopyEdgeClass(EdgeClass c) { return c == EdgeClass::kRel; }

/*! \brief Relations whose objects are entity types (rdf:type and its Freebase spelling). */
bool IsTypeRelation(std::string_view relation);

/*! \brief Closed instance sets of the built-in edge classes, in canonical order. */
const std::vector<std::string>& OrdInstances();
const std::vector<std::string>& CmpInstances();
const std::vector<std::string>& AggInstances();
const std::vector<std::string>& BuiltinInstances(EdgeClass c);

struct Vertex {
  int id = 0;
  VertexClass cls = VertexClass::kVar;
  std::optional<std::string> instance;
  int segment = 0;
  bool operator==(const Vertex&) const = default;
};

struct Edge {
  int id = 0;
  int head = 0;
  int tail = 0;
  EdgeClass cls = EdgeClass::kRel;
  std::optional<std::string> instance;
  /*! \brief Forward when the head was inserted before the tail. */
  Direction direction() const { return head < tail ? Direction::kForward : Direction::kBackward; }
  bool operator==(const Edge&) const = default;
};

/*! \brief Copy-links, keyed by the copying (later) slot, valued by its target. */
struct CopyLinks {
  std::map<int, int> vertex;
  std::map<int, int> edge;
  bool operator==(const CopyLinks&) const = default;
};

class Graph {
 public:
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  CopyLinks copies;

  int AddVertex(VertexClass cls, int segment, std::optional<std::string> instance = std::nullopt);
  int AddEdge(int head, int tail, EdgeClass cls, std::optional<std::string> instance = std::nullopt);

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_segments() const;
  /*! \brief Ids of the edges incident to vertex \p v, in id order. */
  std::vector<int> IncidentEdges(int v) const;
  /*! \brief Id of the unique Ans vertex, or -1. */
  int AnswerVertex() const;
  /*! \brief True when no slot carries an instance. */
  bool IsAbstract() const;
  /*! \brief True when every instance-bearing slot is filled. */
  bool IsFilled() const;

  bool operator==(const Graph&) const = default;
};

using QueryGraph = Graph;
using AbstractQueryGraph = Graph;

/*!
 * \brief Recomputes copy-links from instance equality.
 *
 * Every Ent/Type vertex and Rel edge whose instance already occurred on an
 * earlier slot of the same class gets a link to the first such slot.
 */
CopyLinks CopiesFromInstances(const Graph& g);

struct Violation {
  std::string code;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool Has(std::string_view code) const;
  std::string ToString() const;
};

enum class GraphKind { kAbstract, kQuery };

struct ValidateOptions {
  GraphKind kind = GraphKind::kQuery;
  /*! \brief For query graphs, accept slots that are still unfilled. */
  bool allow_unfilled = false;
};

/*!
 * \brief Checks every structural invariant and reports the violated ones.
 *
 * Violation codes are stable strings, e.g. "|V| = |E| + 1" and
 * "weakly connected".
 */
ValidationReport Validate(const Graph& g, const ValidateOptions& options = {});

/*!
 * \brief Replaces every instance by its class slot and derives copy-links.
 * \throws Error(kValidation) when \p g is not a valid query graph.
 */
AbstractQueryGraph Abstract(const QueryGraph& g);

/*! \brief Strips instances without validation (used on partial graphs). */
AbstractQueryGraph StripInstances(const Graph& g);

/*! \brief Fixed-field-order JSON text; ParseGraphJson is its exact inverse. */
std::string GraphToJson(const Graph& g, int indent = -1);
Graph GraphFromJson(std::string_view text);

/*!
 * \brief Isomorphism-invariant encoding of a tree-shaped graph.
 *
 * Two graphs have the same encoding iff there is an isomorphism preserving
 * classes, instances, segments, edge orientation and copy-link groups.
 * Graphs that are not trees fall back to a raw, order-dependent encoding.
 */
std::string CanonicalForm(const Graph& g);
bool AqgEqual(const AbstractQueryGraph& a, const AbstractQueryGraph& b);
bool QueryGraphEqual(const QueryGraph& a, const QueryGraph& b);

}  // namespace qgforge

#endif  // QGFORGE_GRAPH_GRAPH_H_
