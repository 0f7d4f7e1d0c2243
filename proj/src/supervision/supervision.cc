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

#include "supervision/supervision.h"

#include <algorithm>
#include <tuple>

#include <json.hpp>

namespace qgforge {

namespace {

using Json = nlohmann::ordered_json;

int ClassRank(EdgeClass c) {
  switch (c) {
    case EdgeClass::kRel: return 0;
    case EdgeClass::kCmp: return 1;
    case EdgeClass::kOrd: return 2;
    case EdgeClass::kAgg: return 3;
  }
  return 4;
}

class SignalBuilder {
 public:
  explicit SignalBuilder(const QueryGraph& g) : g_(g), new_id_(g.num_vertices(), -1) {}

  SupervisionSequences Run() {
    int ans = g_.AnswerVertex();
    Emit(OutlineOp::AddVertex(VertexClass::kAns), ans);
    Visit(ans);
    for (int s = 1; s < g_.num_segments(); ++s) EnterSegment(s);
    out_.outline.push_back(OutlineOp::End());
    return std::move(out_);
  }

 private:
  // Records a newly visited vertex and returns its replay id.
  void Emit(const OutlineOp& add, int gold) {
    out_.outline.push_back(add);
    new_id_[gold] = static_cast<int>(out_.vertex_order.size());
    out_.vertex_order.push_back(gold);
    out_.vertex_fill.push_back(g_.vertices[gold].instance);
  }

  int VertexCopy(int gold) const {
    const Vertex& v = g_.vertices[gold];
    if (!IsCopyVertexClass(v.cls)) return -1;
    for (int earlier : out_.vertex_order) {
      const Vertex& w = g_.vertices[earlier];
      if (w.cls == v.cls && w.instance == v.instance) return new_id_[earlier];
    }
    return -1;
  }

  int EdgeCopy(int gold) const {
    const Edge& e = g_.edges[gold];
    if (!IsCopyEdgeClass(e.cls)) return -1;
    for (std::size_t i = 0; i < out_.edge_order.size(); ++i) {
      const Edge& f = g_.edges[out_.edge_order[i]];
      if (f.cls == e.cls && f.instance == e.instance) return static_cast<int>(i);
    }
    return -1;
  }

  // Emits the cycle attaching gold vertex w to the visited vertex u via edge e.
  void Attach(int u, int w, int e, int delta) {
    const Edge& edge = g_.edges[e];
    Emit(OutlineOp::AddVertex(g_.vertices[w].cls, delta, VertexCopy(w)), w);
    out_.outline.push_back(OutlineOp::SelectVertex(new_id_[u]));
    Direction dir = edge.head == u ? Direction::kForward : Direction::kBackward;
    out_.outline.push_back(OutlineOp::AddEdge(edge.cls, dir, EdgeCopy(e)));
    out_.edge_order.push_back(e);
    out_.edge_fill.push_back(edge.instance.value_or(""));
  }

  void Visit(int u) {
    using Key = std::tuple<int, std::string, int, int, int>;
    std::vector<Key> children;
    for (int e : g_.IncidentEdges(u)) {
      const Edge& edge = g_.edges[e];
      int w = edge.head == u ? edge.tail : edge.head;
      if (new_id_[w] >= 0 || g_.vertices[w].segment != g_.vertices[u].segment) continue;
      children.emplace_back(ClassRank(edge.cls), edge.instance.value_or(""),
                            edge.head == u ? 0 : 1, w, e);
    }
    std::sort(children.begin(), children.end());
    for (const auto& [rank, instance, dir, w, e] : children) {
      if (new_id_[w] >= 0) continue;
      Attach(u, w, e, 0);
      Visit(w);
    }
  }

  void EnterSegment(int s) {
    for (const Edge& e : g_.edges) {
      if (e.cls != EdgeClass::kCmp) continue;
      int a = e.head, b = e.tail;
      if (g_.vertices[a].segment == s) std::swap(a, b);
      if (g_.vertices[b].segment != s || g_.vertices[a].segment >= s) continue;
      Attach(a, b, e.id, 1);
      Visit(b);
      return;
    }
    throw Error(ErrorCode::kValidation, "segment " + std::to_string(s) + " has no link");
  }

  const QueryGraph& g_;
  std::vector<int> new_id_;
  SupervisionSequences out_;
};

}  // namespace

std::vector<FillOp> SupervisionSequences::FillOps() const {
  std::vector<FillOp> ops;
  for (std::size_t i = 0; i < vertex_fill.size(); ++i) {
    ops.push_back(FillOp{FillOpKind::kFillVertex, static_cast<int>(i), vertex_fill[i]});
  }
  for (std::size_t i = 0; i < edge_fill.size(); ++i) {
    ops.push_back(FillOp{FillOpKind::kFillEdge, static_cast<int>(i), edge_fill[i]});
  }
  return ops;
}

SupervisionSequences BuildSignals(const QueryGraph& g) {
  ValidationReport report = Validate(g);
  if (!report.ok()) throw Error(ErrorCode::kValidation, report.ToString());
  return SignalBuilder(g).Run();
}

QueryGraph Replay(const SupervisionSequences& s) {
  QG_CHECK(!s.outline.empty(), ErrorCode::kInvalidArgument, "empty outline sequence");
  GenerationState state = GenerationState::Initial();
  for (const OutlineOp& op : s.outline) state = ApplyOutline(state, op);
  if (state.phase != Phase::kFillingVertices) {
    throw Error(ErrorCode::kInvalidArgument, "outline sequence does not end with End");
  }
  const int n = state.graph.num_vertices();
  if (static_cast<int>(s.vertex_fill.size()) != n ||
      static_cast<int>(s.edge_fill.size()) != n - 1) {
    throw Error(ErrorCode::kInvalidArgument, "fill sequences do not match the outline");
  }
  for (const FillOp& op : s.FillOps()) state = ApplyFill(state, op);
  return state.graph;
}

std::string SignalsToJson(const std::string& id, const SupervisionSequences& s) {
  Json j;
  j["id"] = id;
  j["outline"] = Json::array();
  for (const OutlineOp& op : s.outline) j["outline"].push_back(Json::parse(OutlineOpToJson(op)));
  j["vertex_fill"] = Json::array();
  for (const auto& v : s.vertex_fill) j["vertex_fill"].push_back(v ? Json(*v) : Json(nullptr));
  j["edge_fill"] = s.edge_fill;
  return j.dump();
}

SupervisionSequences SignalsFromJson(std::string_view text, std::string* id) {
  SupervisionSequences s;
  try {
    Json j = Json::parse(text);
    if (id) *id = j.value("id", "");
    for (const Json& op : j.at("outline")) s.outline.push_back(OutlineOpFromJson(op.dump()));
    for (const Json& v : j.at("vertex_fill")) {
      s.vertex_fill.push_back(v.is_null() ? std::nullopt : std::optional(v.get<std::string>()));
    }
    s.edge_fill = j.at("edge_fill").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad supervision record: ") + e.what());
  }
  return s;
}

}  // namespace qgforge
