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

#include "grammar/grammar.h"

#include <algorithm>

#include <json.hpp>

#include "common/literal.h"

namespace qgforge {

namespace {

using Json = nlohmann::ordered_json;

constexpr VertexClass kAddableClasses[] = {VertexClass::kVar, VertexClass::kEnt,
                                           VertexClass::kType, VertexClass::kVal};
constexpr EdgeClass kEdgeClasses[] = {EdgeClass::kRel, EdgeClass::kOrd, EdgeClass::kCmp,
                                      EdgeClass::kAgg};

bool IsAggTail(const Graph& g, int v) {
  return std::any_of(g.edges.begin(), g.edges.end(),
                     [&](const Edge& e) { return e.cls == EdgeClass::kAgg && e.tail == v; });
}

bool HasNonCmpEdge(const Graph& g, int v) {
  return std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
    return e.cls != EdgeClass::kCmp && (e.head == v || e.tail == v);
  });
}

bool SegmentHasModifier(const Graph& g, int segment) {
  return std::any_of(g.edges.begin(), g.edges.end(), [&](const Edge& e) {
    return (e.cls == EdgeClass::kOrd || e.cls == EdgeClass::kAgg) &&
           g.vertices[e.tail].segment == segment;
  });
}

bool FirstInSegment(const Graph& g, int v) {
  for (const Vertex& w : g.vertices) {
    if (w.id != v && w.segment == g.vertices[v].segment) return false;
  }
  return true;
}

// Whether an edge of class `cls` between the selected vertex u and the
// pending vertex v, oriented by `dir`, is legal.
bool EdgeLegal(const Graph& g, int u, int v, EdgeClass cls, Direction dir) {
  const Vertex& vu = g.vertices[u];
  const Vertex& vv = g.vertices[v];
  int head = dir == Direction::kForward ? u : v;
  int tail = dir == Direction::kForward ? v : u;
  VertexClass h = g.vertices[head].cls;
  VertexClass t = g.vertices[tail].cls;
  if (vu.segment != vv.segment) {
    return cls == EdgeClass::kCmp && vu.segment < vv.segment && FirstInSegment(g, v) &&
           vu.cls == VertexClass::kVar && vv.cls == VertexClass::kVar;
  }
  switch (cls) {
    case EdgeClass::kRel:
      if (h == VertexClass::kVal || t == VertexClass::kVal || h == VertexClass::kType) return false;
      return !IsAggTail(g, u);
    case EdgeClass::kCmp: {
      auto ok = [](VertexClass c) { return c == VertexClass::kVar || c == VertexClass::kVal; };
      return ok(h) && ok(t) && !(h == VertexClass::kVal && t == VertexClass::kVal);
    }
    case EdgeClass::kOrd:
      if ((h != VertexClass::kVar && h != VertexClass::kAns) || t != VertexClass::kVal) return false;
      return !SegmentHasModifier(g, vv.segment) && !IsAggTail(g, head);
    case EdgeClass::kAgg: {
      if (h != VertexClass::kVar) return false;
      bool tail_ok = (t == VertexClass::kAns && g.vertices[tail].segment == 0) ||
                     (t == VertexClass::kVar && g.vertices[tail].segment > 0);
      if (!tail_ok || HasNonCmpEdge(g, tail) || IsAggTail(g, head)) return false;
      return !SegmentHasModifier(g, vv.segment);
    }
  }
  return false;
}

bool AnyEdgeLegal(const Graph& g, int u, int v) {
  for (EdgeClass cls : kEdgeClasses) {
    for (Direction dir : {Direction::kForward, Direction::kBackward}) {
      if (EdgeLegal(g, u, v, cls, dir)) return true;
    }
  }
  return false;
}

bool SelectLegal(const Graph& g, int u, int v) {
  if (u == v || u < 0 || u >= g.num_vertices()) return false;
  if (g.vertices[u].cls == VertexClass::kVal) return false;
  return AnyEdgeLegal(g, u, v);
}

bool AnySelectLegal(const Graph& g, int v) {
  for (int u = 0; u < g.num_vertices(); ++u) {
    if (SelectLegal(g, u, v)) return true;
  }
  return false;
}

std::vector<int> VertexCopyTargets(const Graph& g, VertexClass cls, int segment) {
  std::vector<int> out;
  if (!IsCopyVertexClass(cls)) return out;
  for (const Vertex& w : g.vertices) {
    if (w.cls != cls || w.segment == segment || g.copies.vertex.count(w.id)) continue;
    bool taken = false;
    for (auto [src, tgt] : g.copies.vertex) {
      if (tgt == w.id && g.vertices[src].segment == segment) taken = true;
    }
    if (!taken) out.push_back(w.id);
  }
  return out;
}

std::vector<int> EdgeCopyTargets(const Graph& g, EdgeClass cls) {
  std::vector<int> out;
  if (!IsCopyEdgeClass(cls)) return out;
  for (const Edge& e : g.edges) {
    if (e.cls == cls && !g.copies.edge.count(e.id)) out.push_back(e.id);
  }
  return out;
}

bool EndLegal(const GenerationState& s) {
  if (s.t < 2) return false;
  return Validate(s.graph, ValidateOptions{GraphKind::kAbstract}).ok();
}

std::vector<OutlineOp> LegalAddVertex(const GenerationState& s) {
  std::vector<OutlineOp> out;
  const Graph& g = s.graph;
  if (s.t == 1) {
    out.push_back(OutlineOp::AddVertex(VertexClass::kAns));
    return out;
  }
  if (g.num_vertices() < kMaxVertices) {
    bool valid_now = false;
    bool valid_checked = false;
    for (VertexClass cls : kAddableClasses) {
      for (int delta : {0, 1}) {
        if (delta == 1) {
          if (cls != VertexClass::kVar || g.num_vertices() < 2) continue;
          if (!valid_checked) {
            valid_now = EndLegal(s);
            valid_checked = true;
          }
          if (!valid_now) continue;
        }
        Graph trial = g;
        int v = trial.AddVertex(cls, s.segment + delta);
        if (!AnySelectLegal(trial, v)) continue;
        out.push_back(OutlineOp::AddVertex(cls, delta));
        for (int target : VertexCopyTargets(g, cls, s.segment + delta)) {
          out.push_back(OutlineOp::AddVertex(cls, delta, target));
        }
      }
    }
  }
  if (EndLegal(s)) out.push_back(OutlineOp::End());
  return out;
}

std::vector<OutlineOp> LegalSelect(const GenerationState& s) {
  std::vector<OutlineOp> out;
  for (int u = 0; u < s.graph.num_vertices(); ++u) {
    if (SelectLegal(s.graph, u, *s.pending)) out.push_back(OutlineOp::SelectVertex(u));
  }
  return out;
}

std::vector<OutlineOp> LegalAddEdge(const GenerationState& s) {
  std::vector<OutlineOp> out;
  for (EdgeClass cls : kEdgeClasses) {
    for (Direction dir : {Direction::kForward, Direction::kBackward}) {
      if (!EdgeLegal(s.graph, *s.selected, *s.pending, cls, dir)) continue;
      out.push_back(OutlineOp::AddEdge(cls, dir));
      for (int target : EdgeCopyTargets(s.graph, cls)) {
        out.push_back(OutlineOp::AddEdge(cls, dir, target));
      }
    }
  }
  return out;
}

bool Fail(ErrorCode* out, ErrorCode code) {
  if (out) *out = code;
  return false;
}

}  // namespace

std::string_view PhaseName(Phase p) {
  switch (p) {
    case Phase::kOutlining: return "Outlining";
    case Phase::kFillingVertices: return "FillingVertices";
    case Phase::kFillingEdges: return "FillingEdges";
    case Phase::kDone: return "Done";
  }
  return "?";
}

OutlineOpKind ScheduleOutline(int t) {
  QG_CHECK(t >= 1, ErrorCode::kRange, "outline step must be >= 1");
  if (t == 1 || t % 3 == 2) return OutlineOpKind::kAddVertex;
  if (t % 3 == 0) return OutlineOpKind::kSelectVertex;
  return OutlineOpKind::kAddEdge;
}

FillSlot ScheduleFill(int t, int n) {
  if (n < 1 || t < 1 || t > 2 * n - 1) {
    throw Error(ErrorCode::kRange, "fill step " + std::to_string(t) + " outside [1, " +
                                       std::to_string(2 * n - 1) + "]");
  }
  if (t <= n) {
    int vertex = t - 1;
    return FillSlot{FillOpKind::kFillVertex, vertex, vertex == 0 ? 1 : 3 * vertex - 1};
  }
  int edge = t - n - 1;
  return FillSlot{FillOpKind::kFillEdge, edge, 3 * edge + 4};
}

OutlineOp OutlineOp::AddVertex(VertexClass cls, int delta, int copy) {
  OutlineOp op;
  op.kind = OutlineOpKind::kAddVertex;
  op.vertex_class = cls;
  op.delta = delta;
  op.copy = copy;
  return op;
}

OutlineOp OutlineOp::SelectVertex(int vertex) {
  OutlineOp op;
  op.kind = OutlineOpKind::kSelectVertex;
  op.vertex = vertex;
  return op;
}

OutlineOp OutlineOp::AddEdge(EdgeClass cls, Direction dir, int copy) {
  OutlineOp op;
  op.kind = OutlineOpKind::kAddEdge;
  op.edge_class = cls;
  op.direction = dir;
  op.copy = copy;
  return op;
}

bool OutlineOp::operator==(const OutlineOp& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case OutlineOpKind::kAddVertex:
      return vertex_class == o.vertex_class && delta == o.delta && copy == o.copy;
    case OutlineOpKind::kSelectVertex: return vertex == o.vertex;
    case OutlineOpKind::kAddEdge:
      return edge_class == o.edge_class && direction == o.direction && copy == o.copy;
  }
  return false;
}

std::string OutlineOp::ToString() const {
  auto copy_text = [&] { return copy < 0 ? std::string("NONE") : std::to_string(copy); };
  switch (kind) {
    case OutlineOpKind::kAddVertex:
      return "AddVertex(" + std::string(VertexClassName(vertex_class)) + "," +
             std::to_string(delta) + "," + copy_text() + ")";
    case OutlineOpKind::kSelectVertex: return "SelectVertex(" + std::to_string(vertex) + ")";
    case OutlineOpKind::kAddEdge:
      return "AddEdge(" + std::string(EdgeClassName(edge_class)) +
             (direction == Direction::kForward ? "+" : "-") + "," + copy_text() + ")";
  }
  return "?";
}

std::string FillOp::ToString() const {
  return std::string(kind == FillOpKind::kFillVertex ? "FillVertex(" : "FillEdge(") +
         std::to_string(slot) + "," + instance.value_or("NONE") + ")";
}

GenerationState GenerationState::Initial() { return GenerationState{}; }

GenerationState GenerationState::ForFilling(const AbstractQueryGraph& aqg) {
  QG_CHECK(aqg.IsAbstract(), ErrorCode::kInvalidArgument, "filling needs an abstract graph");
  ValidationReport report = Validate(aqg, ValidateOptions{GraphKind::kAbstract});
  QG_CHECK(report.ok(), ErrorCode::kValidation, report.ToString());
  GenerationState s;
  s.graph = aqg;
  s.t = 1;
  s.phase = Phase::kFillingVertices;
  return s;
}

std::vector<OutlineOp> LegalOutlineOps(const GenerationState& state) {
  if (state.phase != Phase::kOutlining) return {};
  switch (ScheduleOutline(state.t)) {
    case OutlineOpKind::kAddVertex: return LegalAddVertex(state);
    case OutlineOpKind::kSelectVertex: return LegalSelect(state);
    case OutlineOpKind::kAddEdge: return LegalAddEdge(state);
  }
  return {};
}

bool IsLegalOutlineOp(const GenerationState& state, const OutlineOp& op) {
  if (state.phase != Phase::kOutlining || op.kind != ScheduleOutline(state.t)) return false;
  const Graph& g = state.graph;
  switch (op.kind) {
    case OutlineOpKind::kAddVertex: {
      auto legal = LegalAddVertex(state);
      return std::find(legal.begin(), legal.end(), op) != legal.end();
    }
    case OutlineOpKind::kSelectVertex: return SelectLegal(g, op.vertex, *state.pending);
    case OutlineOpKind::kAddEdge: {
      if (!EdgeLegal(g, *state.selected, *state.pending, op.edge_class, op.direction)) return false;
      if (op.copy < 0) return true;
      auto targets = EdgeCopyTargets(g, op.edge_class);
      return std::find(targets.begin(), targets.end(), op.copy) != targets.end();
    }
  }
  return false;
}

GenerationState ApplyOutline(const GenerationState& state, const OutlineOp& op) {
  if (state.phase != Phase::kOutlining) {
    throw Error(ErrorCode::kIllegalOp, op.ToString() + " after outlining finished");
  }
  if (op.kind != ScheduleOutline(state.t)) {
    throw Error(ErrorCode::kIllegalOp,
                op.ToString() + " does not match the schedule at step " + std::to_string(state.t));
  }
  if (!IsLegalOutlineOp(state, op)) {
    throw Error(ErrorCode::kIllegalOp,
                op.ToString() + " is illegal at step " + std::to_string(state.t));
  }
  GenerationState next = state;
  switch (op.kind) {
    case OutlineOpKind::kAddVertex:
      if (op.vertex_class == VertexClass::kEnd) {
        next.phase = Phase::kFillingVertices;
        next.t = 1;
        next.pending.reset();
        next.selected.reset();
        return next;
      }
      next.segment = state.t == 1 ? 0 : state.segment + op.delta;
      next.pending = next.graph.AddVertex(op.vertex_class, next.segment);
      next.selected.reset();
      if (op.copy >= 0) next.graph.copies.vertex[*next.pending] = op.copy;
      break;
    case OutlineOpKind::kSelectVertex:
      next.selected = op.vertex;
      break;
    case OutlineOpKind::kAddEdge: {
      int u = *state.selected, v = *state.pending;
      int head = op.direction == Direction::kForward ? u : v;
      int tail = op.direction == Direction::kForward ? v : u;
      int id = next.graph.AddEdge(head, tail, op.edge_class);
      if (op.copy >= 0) next.graph.copies.edge[id] = op.copy;
      break;
    }
  }
  ++next.t;
  return next;
}

std::optional<std::string> ForcedInstance(const GenerationState& state) {
  if (state.phase != Phase::kFillingVertices && state.phase != Phase::kFillingEdges) {
    return std::nullopt;
  }
  FillSlot slot = state.NextFillSlot();
  const Graph& g = state.graph;
  if (slot.kind == FillOpKind::kFillVertex) {
    auto it = g.copies.vertex.find(slot.slot);
    if (it != g.copies.vertex.end()) return g.vertices[it->second].instance;
  } else {
    auto it = g.copies.edge.find(slot.slot);
    if (it != g.copies.edge.end()) return g.edges[it->second].instance;
  }
  return std::nullopt;
}

std::string CheckFill(const GenerationState& state, const std::optional<std::string>& instance,
                      ErrorCode* code) {
  auto fail = [&](ErrorCode c, std::string why) {
    Fail(code, c);
    return why;
  };
  if (state.phase != Phase::kFillingVertices && state.phase != Phase::kFillingEdges) {
    return fail(ErrorCode::kIllegalOp, "not filling");
  }
  const Graph& g = state.graph;
  FillSlot slot = state.NextFillSlot();
  auto bad_form = [](const std::string& s) {
    return s.empty() || s.front() == '?' || Literal::LooksLikeSurface(s) ||
           std::any_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  };
  if (slot.kind == FillOpKind::kFillVertex) {
    const Vertex& v = g.vertices[slot.slot];
    if (!IsInstanceVertexClass(v.cls)) {
      if (instance) return fail(ErrorCode::kClassMismatch, "Ans/Var slots take no instance");
      return {};
    }
    if (!instance) return fail(ErrorCode::kClassMismatch, "slot needs an instance");
    if (v.cls == VertexClass::kVal) {
      auto lit = Literal::FromSurface(*instance);
      if (!lit) return fail(ErrorCode::kClassMismatch, "Val slot needs a literal");
      for (const Edge& e : g.edges) {
        if (e.cls == EdgeClass::kOrd && e.tail == v.id &&
            (lit->kind() != LiteralKind::kInt || lit->integer() < 1 ||
             std::to_string(lit->integer()) != lit->lexical())) {
          return fail(ErrorCode::kClassMismatch, "ordinal limit must be a positive integer");
        }
      }
      return {};
    }
    if (bad_form(*instance)) return fail(ErrorCode::kClassMismatch, "not an entity/type id");
    auto link = g.copies.vertex.find(v.id);
    if (link != g.copies.vertex.end()) {
      if (g.vertices[link->second].instance != instance) {
        return fail(ErrorCode::kCopyViolation, "copy-linked slot must repeat its target");
      }
      return {};
    }
    for (const Vertex& w : g.vertices) {
      if (w.id != v.id && w.cls == v.cls && w.instance == instance) {
        return fail(ErrorCode::kCopyViolation, "instance already used by vertex " +
                                                   std::to_string(w.id) + " without a copy-link");
      }
    }
    return {};
  }
  const Edge& e = g.edges[slot.slot];
  if (!instance) return fail(ErrorCode::kClassMismatch, "edge slot needs an instance");
  if (e.cls == EdgeClass::kRel) {
    if (bad_form(*instance)) return fail(ErrorCode::kClassMismatch, "not a relation id");
    for (EdgeClass b : {EdgeClass::kOrd, EdgeClass::kCmp, EdgeClass::kAgg}) {
      const auto& set = BuiltinInstances(b);
      if (std::find(set.begin(), set.end(), *instance) != set.end()) {
        return fail(ErrorCode::kClassMismatch, "built-in keyword on a Rel slot");
      }
    }
    bool typing = IsTypeRelation(*instance);
    VertexClass tail = g.vertices[e.tail].cls;
    if (tail == VertexClass::kType && !typing) {
      return fail(ErrorCode::kClassMismatch, "edge into a Type vertex must be a type relation");
    }
    if (tail == VertexClass::kEnt && typing) {
      return fail(ErrorCode::kClassMismatch, "type relation into an Ent vertex");
    }
    auto link = g.copies.edge.find(e.id);
    if (link != g.copies.edge.end()) {
      if (g.edges[link->second].instance != instance) {
        return fail(ErrorCode::kCopyViolation, "copy-linked slot must repeat its target");
      }
      return {};
    }
    for (const Edge& f : g.edges) {
      if (f.id != e.id && f.cls == EdgeClass::kRel && f.instance == instance) {
        return fail(ErrorCode::kCopyViolation, "relation already used by edge " +
                                                   std::to_string(f.id) + " without a copy-link");
      }
    }
    return {};
  }
  const auto& allowed = BuiltinInstances(e.cls);
  if (std::find(allowed.begin(), allowed.end(), *instance) == allowed.end()) {
    return fail(ErrorCode::kClassMismatch,
                "'" + *instance + "' is not a " + std::string(EdgeClassName(e.cls)) + " instance");
  }
  if (e.cls == EdgeClass::kAgg && *instance == "ASK" && g.vertices[e.tail].cls != VertexClass::kAns) {
    return fail(ErrorCode::kClassMismatch, "ASK must aggregate into the answer");
  }
  return {};
}

GenerationState ApplyFill(const GenerationState& state, const FillOp& op) {
  if (state.phase != Phase::kFillingVertices && state.phase != Phase::kFillingEdges) {
    throw Error(ErrorCode::kIllegalOp, op.ToString() + " outside filling");
  }
  FillSlot slot = state.NextFillSlot();
  if (op.kind != slot.kind || op.slot != slot.slot) {
    throw Error(ErrorCode::kIllegalOp, op.ToString() + " does not match fill step " +
                                           std::to_string(state.t));
  }
  ErrorCode code = ErrorCode::kIllegalOp;
  std::string why = CheckFill(state, op.instance, &code);
  if (!why.empty()) throw Error(code, op.ToString() + ": " + why);
  GenerationState next = state;
  if (slot.kind == FillOpKind::kFillVertex) {
    next.graph.vertices[slot.slot].instance = op.instance;
  } else {
    next.graph.edges[slot.slot].instance = op.instance;
  }
  ++next.t;
  const int n = next.graph.num_vertices();
  if (next.t > 2 * n - 1) {
    next.phase = Phase::kDone;
    ValidationReport report = Validate(next.graph);
    if (!report.ok()) throw Error(ErrorCode::kValidation, report.ToString());
  } else {
    next.phase = next.t <= n ? Phase::kFillingVertices : Phase::kFillingEdges;
  }
  return next;
}

std::string OutlineOpToJson(const OutlineOp& op) {
  Json j;
  switch (op.kind) {
    case OutlineOpKind::kAddVertex:
      j["op"] = "AddVertex";
      j["class"] = VertexClassName(op.vertex_class);
      j["delta"] = op.delta;
      j["copy"] = op.copy < 0 ? Json(nullptr) : Json(op.copy);
      break;
    case OutlineOpKind::kSelectVertex:
      j["op"] = "SelectVertex";
      j["vertex"] = op.vertex;
      break;
    case OutlineOpKind::kAddEdge:
      j["op"] = "AddEdge";
      j["class"] = EdgeClassName(op.edge_class);
      j["direction"] = DirectionName(op.direction);
      j["copy"] = op.copy < 0 ? Json(nullptr) : Json(op.copy);
      break;
  }
  return j.dump();
}

std::string FillOpToJson(const FillOp& op) {
  Json j;
  j["op"] = op.kind == FillOpKind::kFillVertex ? "FillVertex" : "FillEdge";
  j[op.kind == FillOpKind::kFillVertex ? "vertex" : "edge"] = op.slot;
  j["instance"] = op.instance ? Json(*op.instance) : Json(nullptr);
  return j.dump();
}

OutlineOp OutlineOpFromJson(std::string_view line) {
  try {
    Json j = Json::parse(line);
    std::string kind = j.at("op").get<std::string>();
    auto copy = [&] { return j.contains("copy") && !j["copy"].is_null() ? j["copy"].get<int>() : -1; };
    if (kind == "AddVertex") {
      auto cls = VertexClassFromName(j.at("class").get<std::string>());
      QG_CHECK(cls.has_value(), ErrorCode::kParse, "unknown vertex class");
      return OutlineOp::AddVertex(*cls, j.value("delta", 0), copy());
    }
    if (kind == "SelectVertex") return OutlineOp::SelectVertex(j.at("vertex").get<int>());
    if (kind == "AddEdge") {
      auto cls = EdgeClassFromName(j.at("class").get<std::string>());
      auto dir = DirectionFromName(j.at("direction").get<std::string>());
      QG_CHECK(cls && dir, ErrorCode::kParse, "unknown edge class or direction");
      return OutlineOp::AddEdge(*cls, *dir, copy());
    }
    throw Error(ErrorCode::kParse, "unknown outline operator " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad action log line: ") + e.what());
  }
}

FillOp FillOpFromJson(std::string_view line) {
  try {
    Json j = Json::parse(line);
    std::string kind = j.at("op").get<std::string>();
    FillOp op;
    if (kind == "FillVertex") {
      op.kind = FillOpKind::kFillVertex;
      op.slot = j.at("vertex").get<int>();
    } else if (kind == "FillEdge") {
      op.kind = FillOpKind::kFillEdge;
      op.slot = j.at("edge").get<int>();
    } else {
      throw Error(ErrorCode::kParse, "unknown fill operator " + kind);
    }
    if (!j.at("instance").is_null()) op.instance = j["instance"].get<std::string>();
    return op;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad action log line: ") + e.what());
  }
}

}  // namespace qgforge
