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

#include "graph/graph.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "common/error.h"
#include "common/literal.h"

namespace qgforge {

namespace {

constexpr std::array<std::string_view, kNumVertexClasses> kVertexClassNames = {
    "Ans", "Var", "Ent", "Type", "Val", "End"};
constexpr std::array<std::string_view, kNumEdgeClasses> kEdgeClassNames = {"Rel", "Ord", "Cmp",
                                                                           "Agg"};

}  // namespace

std::string_view VertexClassName(VertexClass c) {
  return kVertexClassNames[static_cast<int>(c)];
}

std::string_view EdgeClassName(EdgeClass c) { return kEdgeClassNames[static_cast<int>(c)]; }

std::string_view DirectionName(Direction d) {
  return d == Direction::kForward ? "Forward" : "Backward";
}

std::optional<VertexClass> VertexClassFromName(std::string_view name) {
  for (int i = 0; i < kNumVertexClasses; ++i) {
    if (kVertexClassNames[i] == name) return static_cast<VertexClass>(i);
  }
  return std::nullopt;
}

std::optional<EdgeClass> EdgeClassFromName(std::string_view name) {
  for (int i = 0; i < kNumEdgeClasses; ++i) {
    if (kEdgeClassNames[i] == name) return static_cast<EdgeClass>(i);
  }
  return std::nullopt;
}

std::optional<Direction> DirectionFromName(std::string_view name) {
  if (name == "Forward") return Direction::kForward;
  if (name == "Backward") return Direction::kBackward;
  return std::nullopt;
}

bool IsTypeRelation(std::string_view relation) {
  return relation == "rdf:type" || relation == "type.object.type";
}

const std::vector<std::string>& OrdInstances() {
  static const std::vector<std::string> kSet = {"ASC", "DESC"};
  return kSet;
}

const std::vector<std::string>& CmpInstances() {
  static const std::vector<std::string> kSet = {"=", "!=", ">", ">=", "<", "<=", "DURING", "OVERLAP"};
  return kSet;
}

const std::vector<std::string>& AggInstances() {
  static const std::vector<std::string> kSet = {"COUNT", "MAX", "MIN", "ASK"};
  return kSet;
}

const std::vector<std::string>& BuiltinInstances(EdgeClass c) {
  static const std::vector<std::string> kEmpty;
  switch (c) {
    case EdgeClass::kOrd: return OrdInstances();
    case EdgeClass::kCmp: return CmpInstances();
    case EdgeClass::kAgg: return AggInstances();
    case EdgeClass::kRel: return kEmpty;
  }
  return kEmpty;
}

int Graph::AddVertex(VertexClass cls, int segment, std::optional<std::string> instance) {
  int id = num_vertices();
  vertices.push_back(Vertex{id, cls, std::move(instance), segment});
  return id;
}

int Graph::AddEdge(int head, int tail, EdgeClass cls, std::optional<std::string> instance) {
  int id = num_edges();
  edges.push_back(Edge{id, head, tail, cls, std::move(instance)});
  return id;
}

int Graph::num_segments() const {
  int top = -1;
  for (const Vertex& v : vertices) top = std::max(top, v.segment);
  return top + 1;
}

std::vector<int> Graph::IncidentEdges(int v) const {
  std::vector<int> out;
  for (const Edge& e : edges) {
    if (e.head == v || e.tail == v) out.push_back(e.id);
  }
  return out;
}

int Graph::AnswerVertex() const {
  int found = -1;
  for (const Vertex& v : vertices) {
    if (v.cls == VertexClass::kAns) {
      if (found >= 0) return -1;
      found = v.id;
    }
  }
  return found;
}

bool Graph::IsAbstract() const {
  for (const Vertex& v : vertices) {
    if (v.instance) return false;
  }
  for (const Edge& e : edges) {
    if (e.instance) return false;
  }
  return true;
}

bool Graph::IsFilled() const {
  for (const Vertex& v : vertices) {
    if (IsInstanceVertexClass(v.cls) && !v.instance) return false;
  }
  for (const Edge& e : edges) {
    if (!e.instance) return false;
  }
  return true;
}

CopyLinks CopiesFromInstances(const Graph& g) {
  CopyLinks links;
  std::map<std::pair<int, std::string>, int> first_vertex;
  for (const Vertex& v : g.vertices) {
    if (!IsCopyVertexClass(v.cls) || !v.instance) continue;
    auto key = std::make_pair(static_cast<int>(v.cls), *v.instance);
    auto [it, inserted] = first_vertex.emplace(key, v.id);
    if (!inserted) links.vertex[v.id] = it->second;
  }
  std::map<std::string, int> first_edge;
  for (const Edge& e : g.edges) {
    if (!IsCopyEdgeClass(e.cls) || !e.instance) continue;
    auto [it, inserted] = first_edge.emplace(*e.instance, e.id);
    if (!inserted) links.edge[e.id] = it->second;
  }
  return links;
}

bool ValidationReport::Has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::ToString() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].code;
    if (!violations[i].detail.empty()) os << " (" << violations[i].detail << ")";
  }
  return os.str();
}

namespace {

class Validator {
 public:
  Validator(const Graph& g, const ValidateOptions& options) : g_(g), opt_(options) {}

  ValidationReport Run() {
    const int n = g_.num_vertices();
    for (int i = 0; i < n; ++i) {
      if (g_.vertices[i].id != i) Add("dense ids", "vertex " + std::to_string(i));
    }
    for (int i = 0; i < g_.num_edges(); ++i) {
      if (g_.edges[i].id != i) Add("dense ids", "edge " + std::to_string(i));
    }
    if (!report_.ok()) return report_;

    int ans = 0;
    for (const Vertex& v : g_.vertices) {
      if (v.cls == VertexClass::kAns) ++ans;
      if (v.cls == VertexClass::kEnd) Add("no End vertex", "vertex " + std::to_string(v.id));
    }
    if (ans != 1) Add("exactly one Ans", std::to_string(ans) + " found");
    if (n != g_.num_edges() + 1) {
      Add("|V| = |E| + 1", std::to_string(n) + " vertices, " + std::to_string(g_.num_edges()) +
                               " edges");
    }
    if (!CheckEndpoints()) return report_;
    CheckConnectivity();
    CheckAcyclic();
    CheckSegments();
    CheckClassRules();
    CheckModifiers();
    CheckRelCoverage();
    CheckCopies();
    if (opt_.kind == GraphKind::kQuery) CheckInstances();
    return report_;
  }

 private:
  void Add(std::string code, std::string detail = {}) {
    report_.violations.push_back(Violation{std::move(code), std::move(detail)});
  }

  const Vertex& V(int id) const { return g_.vertices[id]; }

  bool CheckEndpoints() {
    bool ok = true;
    std::set<std::pair<int, int>> seen;
    for (const Edge& e : g_.edges) {
      if (e.head < 0 || e.head >= g_.num_vertices() || e.tail < 0 ||
          e.tail >= g_.num_vertices()) {
        Add("edge endpoints", "edge " + std::to_string(e.id));
        ok = false;
        continue;
      }
      if (e.head == e.tail) Add("no self-loops", "edge " + std::to_string(e.id));
      auto key = std::minmax(e.head, e.tail);
      if (!seen.insert(key).second) Add("no multi-edges", "edge " + std::to_string(e.id));
    }
    return ok;
  }

  // Union-find over the vertices reachable through the selected edges.
  template <typename Pred>
  int CountComponents(const std::vector<int>& members, Pred use_edge) const {
    std::vector<int> parent(g_.num_vertices());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const Edge& e : g_.edges) {
      if (use_edge(e)) parent[find(e.head)] = find(e.tail);
    }
    std::set<int> roots;
    for (int v : members) roots.insert(find(v));
    return static_cast<int>(roots.size());
  }

  void CheckConnectivity() {
    if (g_.num_vertices() == 0) return;
    std::vector<int> all(g_.num_vertices());
    std::iota(all.begin(), all.end(), 0);
    if (CountComponents(all, [](const Edge&) { return true; }) != 1) Add("weakly connected");
  }

  void CheckAcyclic() {
    std::vector<int> indegree(g_.num_vertices(), 0);
    for (const Edge& e : g_.edges) ++indegree[e.tail];
    std::vector<int> queue;
    for (int v = 0; v < g_.num_vertices(); ++v) {
      if (indegree[v] == 0) queue.push_back(v);
    }
    std::size_t seen = 0;
    while (seen < queue.size()) {
      int v = queue[seen++];
      for (const Edge& e : g_.edges) {
        if (e.head == v && --indegree[e.tail] == 0) queue.push_back(e.tail);
      }
    }
    if (static_cast<int>(seen) != g_.num_vertices()) Add("acyclic");
  }

  void CheckSegments() {
    if (g_.num_vertices() == 0) {
      Add("segment 0 nonempty");
      return;
    }
    std::set<int> used;
    for (const Vertex& v : g_.vertices) {
      if (v.segment < 0) Add("segments contiguous", "negative segment");
      used.insert(v.segment);
    }
    if (!used.count(0)) Add("segment 0 nonempty");
    int k = 0;
    for (int s : used) {
      if (s != k++) {
        Add("segments contiguous");
        break;
      }
    }
    for (const Vertex& v : g_.vertices) {
      if (v.cls == VertexClass::kAns && v.segment != 0) Add("Ans in segment 0");
    }
    for (int s : used) {
      std::vector<int> members;
      bool has_var = false;
      for (const Vertex& v : g_.vertices) {
        if (v.segment == s) {
          members.push_back(v.id);
          if (v.cls == VertexClass::kVar) has_var = true;
        }
      }
      auto inside = [&](const Edge& e) { return V(e.head).segment == s && V(e.tail).segment == s; };
      if (CountComponents(members, inside) != 1) {
        Add("segment connected", "segment " + std::to_string(s));
      }
      if (s > 0 && !has_var) Add("segment has Var", "segment " + std::to_string(s));
      if (s > 0) {
        bool linked = false;
        for (const Edge& e : g_.edges) {
          int a = V(e.head).segment, b = V(e.tail).segment;
          if (e.cls == EdgeClass::kCmp && ((a == s && b < s) || (b == s && a < s))) linked = true;
        }
        if (!linked) Add("segment link", "segment " + std::to_string(s));
      }
    }
    for (const Edge& e : g_.edges) {
      if (V(e.head).segment != V(e.tail).segment && e.cls != EdgeClass::kCmp) {
        Add("cross-segment edge", "edge " + std::to_string(e.id));
      }
    }
  }

  bool IsAggTail(int v) const {
    for (const Edge& e : g_.edges) {
      if (e.cls == EdgeClass::kAgg && e.tail == v) return true;
    }
    return false;
  }

  void CheckClassRules() {
    std::vector<int> degree(g_.num_vertices(), 0);
    for (const Edge& e : g_.edges) {
      ++degree[e.head];
      ++degree[e.tail];
      VertexClass h = V(e.head).cls, t = V(e.tail).cls;
      std::string where = "edge " + std::to_string(e.id);
      switch (e.cls) {
        case EdgeClass::kRel:
          if (h == VertexClass::kVal || t == VertexClass::kVal) Add("Rel endpoints", where);
          if (h == VertexClass::kType) Add("Rel endpoints", where);
          break;
        case EdgeClass::kCmp: {
          auto ok = [](VertexClass c) { return c == VertexClass::kVar || c == VertexClass::kVal; };
          if (!ok(h) || !ok(t) || (h == VertexClass::kVal && t == VertexClass::kVal)) {
            Add("Cmp endpoints", where);
          }
          break;
        }
        case EdgeClass::kOrd:
          if ((h != VertexClass::kVar && h != VertexClass::kAns) || t != VertexClass::kVal) {
            Add("Ord endpoints", where);
          }
          break;
        case EdgeClass::kAgg: {
          bool tail_ok = (t == VertexClass::kAns && V(e.tail).segment == 0) ||
                         (t == VertexClass::kVar && V(e.tail).segment > 0);
          if (h != VertexClass::kVar || !tail_ok) Add("Agg endpoints", where);
          for (const Edge& f : g_.edges) {
            if (f.id != e.id && f.cls != EdgeClass::kCmp && (f.head == e.tail || f.tail == e.tail)) {
              Add("Agg endpoints", where + " tail has other edges");
              break;
            }
          }
          if (IsAggTail(e.head)) Add("Agg endpoints", where + " head is an aggregate");
          break;
        }
      }
    }
    for (const Vertex& v : g_.vertices) {
      if (v.cls == VertexClass::kVal && degree[v.id] > 1) {
        Add("Val degree", "vertex " + std::to_string(v.id));
      }
      if (v.cls == VertexClass::kType) {
        for (const Edge& e : g_.edges) {
          if ((e.head == v.id || e.tail == v.id) && (e.cls != EdgeClass::kRel || e.tail != v.id)) {
            Add("Type endpoints", "vertex " + std::to_string(v.id));
            break;
          }
        }
      }
    }
  }

  void CheckModifiers() {
    std::map<int, int> per_segment;
    for (const Edge& e : g_.edges) {
      if (e.cls != EdgeClass::kOrd && e.cls != EdgeClass::kAgg) continue;
      if (++per_segment[V(e.tail).segment] == 2) {
        Add("one modifier per segment", "segment " + std::to_string(V(e.tail).segment));
      }
    }
  }

  void CheckRelCoverage() {
    if (g_.num_vertices() <= 1) return;
    for (const Vertex& v : g_.vertices) {
      if (v.cls != VertexClass::kAns && v.cls != VertexClass::kVar) continue;
      if (IsAggTail(v.id)) continue;
      bool has_rel = false;
      for (const Edge& e : g_.edges) {
        if (e.cls == EdgeClass::kRel && (e.head == v.id || e.tail == v.id)) has_rel = true;
      }
      if (!has_rel) Add("variable has Rel", "vertex " + std::to_string(v.id));
    }
  }

  void CheckCopies() {
    std::set<std::pair<int, int>> target_segment;
    for (auto [src, tgt] : g_.copies.vertex) {
      std::string where = "vertex " + std::to_string(src);
      if (src < 0 || src >= g_.num_vertices() || tgt < 0 || tgt >= src) {
        Add("copy-link", where + " bad target");
        continue;
      }
      if (V(src).cls != V(tgt).cls || !IsCopyVertexClass(V(src).cls)) Add("copy-link", where + " class");
      if (g_.copies.vertex.count(tgt)) Add("copy-link", where + " chained");
      if (V(src).segment == V(tgt).segment) Add("copy-link", where + " same segment");
      if (!target_segment.insert({tgt, V(src).segment}).second) {
        Add("copy-link", where + " duplicate in segment");
      }
      if (V(src).instance && V(tgt).instance && *V(src).instance != *V(tgt).instance) {
        Add("copy-link", where + " instance differs");
      }
    }
    for (auto [src, tgt] : g_.copies.edge) {
      std::string where = "edge " + std::to_string(src);
      if (src < 0 || src >= g_.num_edges() || tgt < 0 || tgt >= src) {
        Add("copy-link", where + " bad target");
        continue;
      }
      const Edge& a = g_.edges[src];
      const Edge& b = g_.edges[tgt];
      if (a.cls != b.cls || !IsCopyEdgeClass(a.cls)) Add("copy-link", where + " class");
      if (g_.copies.edge.count(tgt)) Add("copy-link", where + " chained");
      if (a.instance && b.instance && *a.instance != *b.instance) {
        Add("copy-link", where + " instance differs");
      }
    }
  }

  void CheckInstances() {
    std::set<std::tuple<int, int, std::string>> per_segment;
    for (const Vertex& v : g_.vertices) {
      std::string where = "vertex " + std::to_string(v.id);
      if (!IsInstanceVertexClass(v.cls)) {
        if (v.instance) Add("variable instance", where);
        continue;
      }
      if (!v.instance) {
        if (!opt_.allow_unfilled) Add("unfilled slot", where);
        continue;
      }
      bool literal = Literal::LooksLikeSurface(*v.instance);
      if (v.cls == VertexClass::kVal) {
        if (!Literal::FromSurface(*v.instance)) Add("Val instance", where);
      } else if (literal || v.instance->empty() || v.instance->front() == '?') {
        Add("instance form", where);
      } else if (!per_segment.insert({static_cast<int>(v.cls), v.segment, *v.instance}).second) {
        Add("duplicate instance in segment", where);
      }
    }
    for (const Edge& e : g_.edges) {
      std::string where = "edge " + std::to_string(e.id);
      if (!e.instance) {
        if (!opt_.allow_unfilled) Add("unfilled slot", where);
        continue;
      }
      if (e.cls == EdgeClass::kRel) {
        if (e.instance->empty() || e.instance->front() == '?' ||
            Literal::LooksLikeSurface(*e.instance)) {
          Add("instance form", where);
        }
        bool typing = IsTypeRelation(*e.instance);
        if (typing && V(e.tail).cls == VertexClass::kEnt) Add("type relation", where);
        if (!typing && V(e.tail).cls == VertexClass::kType) Add("type relation", where);
        continue;
      }
      const auto& allowed = BuiltinInstances(e.cls);
      if (std::find(allowed.begin(), allowed.end(), *e.instance) == allowed.end()) {
        Add("built-in instance", where);
        continue;
      }
      if (e.cls == EdgeClass::kAgg && *e.instance == "ASK" && V(e.tail).cls != VertexClass::kAns) {
        Add("ASK placement", where);
      }
      if (e.cls == EdgeClass::kOrd && V(e.tail).instance) {
        auto lit = Literal::FromSurface(*V(e.tail).instance);
        if (!lit || lit->kind() != LiteralKind::kInt || lit->integer() < 1 ||
            std::to_string(lit->integer()) != lit->lexical()) {
          Add("Ord limit", where);
        }
      }
    }
  }

  const Graph& g_;
  ValidateOptions opt_;
  ValidationReport report_;
};

}  // namespace

ValidationReport Validate(const Graph& g, const ValidateOptions& options) {
  return Validator(g, options).Run();
}

AbstractQueryGraph StripInstances(const Graph& g) {
  Graph out = g;
  for (Vertex& v : out.vertices) v.instance.reset();
  for (Edge& e : out.edges) e.instance.reset();
  return out;
}

AbstractQueryGraph Abstract(const QueryGraph& g) {
  ValidationReport report = Validate(g, {GraphKind::kQuery, false});
  if (!report.ok()) throw Error(ErrorCode::kValidation, report.ToString());
  Graph out = StripInstances(g);
  out.copies = CopiesFromInstances(g);
  return out;
}

std::string GraphToJson(const Graph& g, int indent) {
  using nlohmann::ordered_json;
  ordered_json root;
  ordered_json vertices = ordered_json::array();
  for (const Vertex& v : g.vertices) {
    ordered_json item;
    item["id"] = v.id;
    item["class"] = VertexClassName(v.cls);
    item["instance"] = v.instance ? ordered_json(*v.instance) : ordered_json(nullptr);
    item["segment"] = v.segment;
    vertices.push_back(std::move(item));
  }
  ordered_json edges = ordered_json::array();
  for (const Edge& e : g.edges) {
    ordered_json item;
    item["id"] = e.id;
    item["head"] = e.head;
    item["tail"] = e.tail;
    item["class"] = EdgeClassName(e.cls);
    item["instance"] = e.instance ? ordered_json(*e.instance) : ordered_json(nullptr);
    item["direction"] = DirectionName(e.direction());
    edges.push_back(std::move(item));
  }
  ordered_json copies;
  copies["vertex"] = ordered_json::array();
  for (auto [src, tgt] : g.copies.vertex) copies["vertex"].push_back({src, tgt});
  copies["edge"] = ordered_json::array();
  for (auto [src, tgt] : g.copies.edge) copies["edge"].push_back({src, tgt});
  root["vertices"] = std::move(vertices);
  root["edges"] = std::move(edges);
  root["copies"] = std::move(copies);
  return root.dump(indent);
}

Graph GraphFromJson(std::string_view text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("graph json: ") + e.what());
  }
  auto fail = [](const std::string& msg) { return Error(ErrorCode::kParse, "graph json: " + msg); };
  try {
    Graph g;
    for (const json& item : root.at("vertices")) {
      auto cls = VertexClassFromName(item.at("class").get<std::string>());
      if (!cls) throw fail("unknown vertex class");
      std::optional<std::string> instance;
      if (item.contains("instance") && !item["instance"].is_null()) {
        instance = item["instance"].get<std::string>();
      }
      int id = g.AddVertex(*cls, item.at("segment").get<int>(), std::move(instance));
      if (item.at("id").get<int>() != id) throw fail("vertex ids must be dense and ordered");
    }
    for (const json& item : root.at("edges")) {
      auto cls = EdgeClassFromName(item.at("class").get<std::string>());
      if (!cls) throw fail("unknown edge class");
      std::optional<std::string> instance;
      if (item.contains("instance") && !item["instance"].is_null()) {
        instance = item["instance"].get<std::string>();
      }
      int id = g.AddEdge(item.at("head").get<int>(), item.at("tail").get<int>(), *cls,
                         std::move(instance));
      if (item.at("id").get<int>() != id) throw fail("edge ids must be dense and ordered");
      if (item.contains("direction")) {
        auto dir = DirectionFromName(item["direction"].get<std::string>());
        if (!dir || *dir != g.edges.back().direction()) throw fail("direction disagrees with ids");
      }
    }
    if (root.contains("copies")) {
      const json& copies = root["copies"];
      if (copies.contains("vertex")) {
        for (const json& pair : copies["vertex"]) g.copies.vertex[pair.at(0)] = pair.at(1);
      }
      if (copies.contains("edge")) {
        for (const json& pair : copies["edge"]) g.copies.edge[pair.at(0)] = pair.at(1);
      }
    }
    return g;
  } catch (const json::exception& e) {
    throw fail(e.what());
  }
}

}  // namespace qgforge
