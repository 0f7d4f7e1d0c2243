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

#include <algorithm>
#include <map>

#include "common/error.h"
#include "sparql/bridge.h"

namespace qgforge {
namespace sparql {

namespace {

bool IsIntervalCmp(const Edge& e) {
  return e.cls == EdgeClass::kCmp && e.instance && (*e.instance == "DURING" || *e.instance == "OVERLAP");
}

class QueryWriter {
 public:
  QueryWriter(const Graph& g, Intent intent) : g_(g), intent_(intent) {}

  Query Run() {
    if (g_.num_vertices() <= 1) {
      throw Error(ErrorCode::kSerialization, "graph has no edge to select against");
    }
    ans_ = g_.AnswerVertex();
    if (ans_ < 0) throw Error(ErrorCode::kSerialization, "graph needs exactly one Ans vertex");
    for (const Vertex& v : g_.vertices) {
      if (IsInstanceVertexClass(v.cls) && !v.instance) {
        throw Error(ErrorCode::kSerialization,
                    "vertex " + std::to_string(v.id) + " is unfilled");
      }
    }
    for (const Edge& e : g_.edges) {
      if (g_.vertices[e.head].segment != g_.vertices[e.tail].segment && e.cls != EdgeClass::kCmp) {
        throw Error(ErrorCode::kSerialization,
                    "edge " + std::to_string(e.id) + " crosses segments");
      }
    }
    CheckSegmentPaths();
    FindAggregates();
    NameVariables();
    FindIntervals();

    const int segments = g_.num_segments();
    std::vector<Block> blocks(segments);
    for (const Edge& e : g_.edges) EmitEdge(e, &blocks);
    for (int s = 1; s < segments; ++s) Project(s, &blocks[s]);

    Query q;
    bool ask = intent_ == Intent::kAsk || ask_edge_ >= 0;
    q.intent = ask ? Intent::kAsk : Intent::kSelect;
    if (ask) {
      blocks[0].aggregate.reset();
      blocks[0].order.reset();
      blocks[0].limit.reset();
      blocks[0].projection.clear();
    } else if (main_agg_ >= 0) {
      if (!g_.edges[main_agg_].instance) {
        throw Error(ErrorCode::kSerialization, "main aggregate is unfilled");
      }
      blocks[0].projection.clear();
    } else {
      blocks[0].projection = {name_.at(ans_)};
    }
    q.where = std::move(blocks[0]);
    for (int s = 1; s < segments; ++s) q.where.subqueries.push_back(std::move(blocks[s]));
    return q;
  }

 private:
  void CheckSegmentPaths() {
    const int segments = g_.num_segments();
    std::vector<std::set<int>> adjacent(segments);
    for (const Edge& e : g_.edges) {
      int a = g_.vertices[e.head].segment, b = g_.vertices[e.tail].segment;
      if (a != b) {
        adjacent[a].insert(b);
        adjacent[b].insert(a);
      }
    }
    std::vector<bool> seen(segments, false);
    std::vector<int> stack = {0};
    seen[0] = true;
    while (!stack.empty()) {
      int s = stack.back();
      stack.pop_back();
      for (int t : adjacent[s]) {
        if (!seen[t]) {
          seen[t] = true;
          stack.push_back(t);
        }
      }
    }
    for (int s = 0; s < segments; ++s) {
      if (!seen[s]) {
        throw Error(ErrorCode::kSerialization,
                    "segment " + std::to_string(s) + " has no path to segment 0");
      }
    }
  }

  void FindAggregates() {
    for (const Edge& e : g_.edges) {
      if (e.cls != EdgeClass::kAgg || e.tail != ans_) continue;
      main_agg_ = e.id;
      if (e.instance && *e.instance == "ASK") ask_edge_ = e.id;
    }
  }

  void NameVariables() {
    int ask_head = ask_edge_ >= 0 ? g_.edges[ask_edge_].head : -1;
    if (ask_head >= 0) {
      name_[ask_head] = "x";
    } else {
      name_[ans_] = "x";
    }
    int k = 0;
    for (const Vertex& v : g_.vertices) {
      if (v.cls == VertexClass::kVar && v.id != ask_head) name_[v.id] = "v" + std::to_string(++k);
    }
    int p = 0;
    for (const Edge& e : g_.edges) {
      if (e.cls == EdgeClass::kRel && !e.instance) predicate_[e.id] = "p" + std::to_string(++p);
    }
  }

  // Interval variables whose combined relation can be split back into its
  // pair: one incoming combined Rel edge, every other edge a filled
  // DURING/OVERLAP comparison with another splittable interval variable.
  void FindIntervals() {
    std::set<int> candidates;
    for (const Vertex& v : g_.vertices) {
      if (v.cls != VertexClass::kVar) continue;
      int rel = -1;
      bool ok = true;
      for (int eid : g_.IncidentEdges(v.id)) {
        const Edge& e = g_.edges[eid];
        if (e.cls == EdgeClass::kRel && e.tail == v.id && rel < 0 && e.instance &&
            SplitIntervalRelation(*e.instance)) {
          rel = eid;
        } else if (!IsIntervalCmp(e)) {
          ok = false;
        }
      }
      if (ok && rel >= 0) {
        candidates.insert(v.id);
        interval_rel_[v.id] = rel;
      }
    }
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = candidates.begin(); it != candidates.end();) {
        bool ok = true;
        for (int eid : g_.IncidentEdges(*it)) {
          const Edge& e = g_.edges[eid];
          if (e.cls != EdgeClass::kCmp) continue;
          int other = e.head == *it ? e.tail : e.head;
          if (!candidates.count(other)) ok = false;
        }
        if (ok) {
          ++it;
        } else {
          it = candidates.erase(it);
          changed = true;
        }
      }
    }
    split_ = std::move(candidates);
  }

  Term VertexTerm(int v) const {
    const Vertex& vx = g_.vertices[v];
    switch (vx.cls) {
      case VertexClass::kAns:
      case VertexClass::kVar: {
        auto it = name_.find(v);
        if (it == name_.end()) throw Error(ErrorCode::kSerialization, "Ans vertex has no variable");
        return Term::Var(it->second);
      }
      case VertexClass::kEnt:
      case VertexClass::kType: return Term::Iri(*vx.instance);
      case VertexClass::kVal: return Term{Term::Kind::kLiteral, *vx.instance};
      case VertexClass::kEnd: break;
    }
    throw Error(ErrorCode::kSerialization, "End vertex inside a graph");
  }

  Term EndpointTerm(int v, bool start) const {
    return Term::Var(name_.at(v) + (start ? "_st" : "_ed"));
  }

  void EmitEdge(const Edge& e, std::vector<Block>* blocks) {
    int hs = g_.vertices[e.head].segment;
    int ts = g_.vertices[e.tail].segment;
    switch (e.cls) {
      case EdgeClass::kRel: {
        Block& b = (*blocks)[hs];
        if (!e.instance) {
          b.triples.push_back({VertexTerm(e.head), Term::Var(predicate_.at(e.id)), VertexTerm(e.tail)});
        } else if (split_.count(e.tail) && interval_rel_.at(e.tail) == e.id) {
          auto pair = *SplitIntervalRelation(*e.instance);
          b.triples.push_back({VertexTerm(e.head), Term::Iri(pair.first), EndpointTerm(e.tail, true)});
          b.triples.push_back({VertexTerm(e.head), Term::Iri(pair.second), EndpointTerm(e.tail, false)});
        } else {
          b.triples.push_back({VertexTerm(e.head), Term::Iri(*e.instance), VertexTerm(e.tail)});
        }
        break;
      }
      case EdgeClass::kCmp: {
        if (!e.instance) break;
        Block& b = (*blocks)[hs == ts ? hs : 0];
        if (IsIntervalCmp(e) && split_.count(e.head) && split_.count(e.tail)) {
          Term a_st = EndpointTerm(e.head, true), a_ed = EndpointTerm(e.head, false);
          Term b_st = EndpointTerm(e.tail, true), b_ed = EndpointTerm(e.tail, false);
          if (*e.instance == "DURING") {
            b.filters.push_back(Expr::And({Expr::Compare(">=", a_st, b_st), Expr::Compare("<=", a_ed, b_ed)}));
          } else {
            b.filters.push_back(Expr::And({Expr::Compare("<=", a_st, b_ed), Expr::Compare(">=", a_ed, b_st)}));
          }
        } else {
          b.filters.push_back(Expr::Compare(*e.instance, VertexTerm(e.head), VertexTerm(e.tail)));
        }
        break;
      }
      case EdgeClass::kOrd: {
        if (!e.instance) break;
        Block& b = (*blocks)[hs];
        b.order = OrderKey{*e.instance == "ASC", name_.at(e.head)};
        b.limit = Literal::FromSurface(*g_.vertices[e.tail].instance)->integer();
        break;
      }
      case EdgeClass::kAgg: {
        if (!e.instance || e.id == ask_edge_) break;
        Block& b = (*blocks)[hs];
        b.aggregate = Aggregate{*e.instance, false, name_.at(e.head), name_.at(e.tail)};
        break;
      }
    }
  }

  void Project(int s, Block* b) const {
    std::vector<std::string> cross;
    for (const Vertex& v : g_.vertices) {
      if (v.segment != s || !name_.count(v.id)) continue;
      bool linked = false;
      for (int eid : g_.IncidentEdges(v.id)) {
        const Edge& e = g_.edges[eid];
        if (e.cls == EdgeClass::kCmp && e.instance &&
            g_.vertices[e.head].segment != g_.vertices[e.tail].segment) {
          linked = true;
        }
      }
      if (!linked) continue;
      if (split_.count(v.id)) {
        cross.push_back(name_.at(v.id) + "_st");
        cross.push_back(name_.at(v.id) + "_ed");
      } else {
        cross.push_back(name_.at(v.id));
      }
    }
    if (b->aggregate) {
      for (const std::string& v : cross) {
        if (v != b->aggregate->alias) {
          throw Error(ErrorCode::kSerialization, "segment " + std::to_string(s) +
                                                     " links ?" + v + " next to an aggregate");
        }
      }
      return;
    }
    if (cross.empty()) {
      for (const Vertex& v : g_.vertices) {
        if (v.segment == s && name_.count(v.id)) {
          cross.push_back(name_.at(v.id));
          break;
        }
      }
    }
    b->projection = std::move(cross);
  }

  const Graph& g_;
  Intent intent_;
  int ans_ = -1;
  int main_agg_ = -1;
  int ask_edge_ = -1;
  std::map<int, std::string> name_;
  std::map<int, std::string> predicate_;
  std::map<int, int> interval_rel_;
  std::set<int> split_;
};

}  // namespace

Query GraphToQuery(const Graph& g, Intent intent) { return QueryWriter(g, intent).Run(); }

std::string ToSparql(const Graph& g, Intent intent) { return Print(GraphToQuery(g, intent)); }

}  // namespace sparql
}  // namespace qgforge
