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

class GraphBuilder {
 public:
  explicit GraphBuilder(const Query& q) : q_(q) {
    blocks_.push_back(&q.where);
    for (const Block& sub : q.where.subqueries) {
      if (!sub.subqueries.empty()) {
        throw Error(ErrorCode::kUnsupportedFeature, "subqueries nested more than one level");
      }
      blocks_.push_back(&sub);
    }
  }

  QueryGraph Run() {
    AssignHomes();
    NumberSegments();
    CreateAnswer();
    for (int b : order_) AddBlockVertices(b);
    for (int b : order_) AddBlockEdges(b);
    if (g_.num_vertices() != g_.num_edges() + 1) {
      throw Error(ErrorCode::kNonTree, "query graph has " + std::to_string(g_.num_vertices()) +
                                           " vertices and " + std::to_string(g_.num_edges()) +
                                           " edges");
    }
    g_.copies = CopiesFromInstances(g_);
    ValidationReport report = Validate(g_);
    if (!report.ok()) throw Error(ErrorCode::kValidation, report.ToString());
    return g_;
  }

 private:
  void Home(const std::string& var, int block) {
    auto [it, inserted] = home_.emplace(var, block);
    if (!inserted && it->second != block) {
      throw Error(ErrorCode::kUnsupportedFeature,
                  "variable ?" + var + " is bound in more than one block");
    }
  }

  void AssignHomes() {
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
      for (const TriplePattern& t : blocks_[b]->triples) {
        if (t.p.is_var()) {
          throw Error(ErrorCode::kUnsupportedFeature, "predicate variable ?" + t.p.value);
        }
        if (t.s.is_literal()) throw Error(ErrorCode::kUnsupportedFeature, "literal subject");
        if (t.o.is_literal()) {
          throw Error(ErrorCode::kUnsupportedFeature,
                      "literal triple object " + t.o.value + " (compare in a FILTER instead)");
        }
        if (t.s.is_var()) Home(t.s.value, b);
        if (t.o.is_var()) Home(t.o.value, b);
      }
    }
    for (int b = 0; b < static_cast<int>(blocks_.size()); ++b) {
      const Block& blk = *blocks_[b];
      if (blk.aggregate) {
        if (home_.count(blk.aggregate->alias)) {
          throw Error(ErrorCode::kUnsupportedFeature,
                      "aggregate alias ?" + blk.aggregate->alias + " is also bound by a triple");
        }
        Home(blk.aggregate->alias, b);
        RequireHome(blk.aggregate->arg, b);
      }
      if (blk.order) RequireHome(blk.order->var, b);
      if (b > 0) {
        for (const std::string& v : blk.projection) RequireHome(v, b);
      }
    }
  }

  void RequireHome(const std::string& var, int block) {
    auto it = home_.find(var);
    if (it == home_.end() || it->second != block) {
      throw Error(ErrorCode::kUnsupportedFeature, "variable ?" + var + " is not bound in its block");
    }
  }

  // Block in which a filter operand of block `b` is visible.
  int OperandHome(const std::string& var, int b) const {
    auto it = home_.find(var);
    if (it == home_.end()) {
      throw Error(ErrorCode::kUnsupportedFeature, "FILTER variable ?" + var + " is unbound");
    }
    if (it->second == b) return b;
    if (b == 0 && it->second > 0) {
      auto exported = blocks_[it->second]->Exported();
      if (std::find(exported.begin(), exported.end(), var) != exported.end()) return it->second;
    }
    throw Error(ErrorCode::kUnsupportedFeature, "FILTER variable ?" + var + " is not visible");
  }

  static void Conjuncts(const Expr& e, std::vector<const Expr*>* out) {
    if (e.kind == Expr::Kind::kAnd) {
      for (const Expr& a : e.args) Conjuncts(a, out);
    } else if (e.kind == Expr::Kind::kCompare) {
      out->push_back(&e);
    } else {
      throw Error(ErrorCode::kUnsupportedFeature,
                  "FILTER " + PrintExpr(e) + " has no graph encoding");
    }
  }

  std::vector<const Expr*> BlockComparisons(int b) const {
    std::vector<const Expr*> out;
    for (const Expr& f : blocks_[b]->filters) Conjuncts(f, &out);
    return out;
  }

  // Segments are numbered by repeatedly taking the lowest block (in program
  // order) that a comparison links to the blocks numbered so far.
  void NumberSegments() {
    const int n = static_cast<int>(blocks_.size());
    std::vector<std::set<int>> adjacent(n);
    for (int b = 0; b < n; ++b) {
      for (const Expr* c : BlockComparisons(b)) {
        std::vector<int> sides;
        for (const Term* t : {&c->lhs, &c->rhs}) {
          if (t->is_var()) sides.push_back(OperandHome(t->value, b));
        }
        if (sides.size() == 2 && sides[0] != sides[1]) {
          adjacent[sides[0]].insert(sides[1]);
          adjacent[sides[1]].insert(sides[0]);
        }
      }
    }
    segment_of_.assign(n, -1);
    segment_of_[0] = 0;
    order_ = {0};
    while (static_cast<int>(order_.size()) < n) {
      int pick = -1;
      for (int b = 1; b < n && pick < 0; ++b) {
        if (segment_of_[b] >= 0) continue;
        for (int a : adjacent[b]) {
          if (segment_of_[a] >= 0) {
            pick = b;
            break;
          }
        }
      }
      if (pick < 0) {
        for (int b = 1; b < n; ++b) {
          if (segment_of_[b] < 0) {
            pick = b;
            break;
          }
        }
      }
      segment_of_[pick] = static_cast<int>(order_.size());
      order_.push_back(pick);
    }
  }

  void CreateAnswer() {
    const Block& main = q_.where;
    if (q_.intent == Intent::kAsk) {
      auto answer = AnswerVariable(q_);
      if (!answer) {
        throw Error(ErrorCode::kUnsupportedFeature, "ASK program without variables");
      }
      ask_head_ = *answer;
      answer_vertex_ = g_.AddVertex(VertexClass::kAns, 0);
      return;
    }
    std::string var = main.aggregate ? main.aggregate->alias : main.projection.at(0);
    auto it = home_.find(var);
    if (it == home_.end() || it->second != 0) {
      throw Error(ErrorCode::kUnsupportedFeature,
                  "answer variable ?" + var + " is not bound in the main block");
    }
    answer_var_ = var;
    answer_vertex_ = g_.AddVertex(VertexClass::kAns, 0);
    var_vertex_[var] = answer_vertex_;
  }

  int VarVertex(const std::string& var, int b) {
    auto it = var_vertex_.find(var);
    if (it != var_vertex_.end()) return it->second;
    int id = g_.AddVertex(VertexClass::kVar, segment_of_[b]);
    var_vertex_[var] = id;
    return id;
  }

  int TermVertex(const Term& t, int b, bool type_position) {
    if (t.is_var()) return VarVertex(t.value, b);
    VertexClass cls = type_position ? VertexClass::kType : VertexClass::kEnt;
    auto key = std::make_tuple(segment_of_[b], static_cast<int>(cls), t.value);
    auto it = iri_vertex_.find(key);
    if (it != iri_vertex_.end()) return it->second;
    int id = g_.AddVertex(cls, segment_of_[b], t.value);
    iri_vertex_[key] = id;
    return id;
  }

  void AddBlockVertices(int b) {
    for (const TriplePattern& t : blocks_[b]->triples) {
      TermVertex(t.s, b, false);
      TermVertex(t.o, b, IsTypePredicate(t.p.value));
    }
    if (b > 0 && blocks_[b]->aggregate) VarVertex(blocks_[b]->aggregate->alias, b);
  }

  int OperandVertex(const Term& t, int other_segment) {
    if (t.is_var()) return var_vertex_.at(t.value);
    return g_.AddVertex(VertexClass::kVal, other_segment, t.value);
  }

  void AddBlockEdges(int b) {
    const Block& blk = *blocks_[b];
    for (const TriplePattern& t : blk.triples) {
      int head = TermVertex(t.s, b, false);
      int tail = TermVertex(t.o, b, IsTypePredicate(t.p.value));
      g_.AddEdge(head, tail, EdgeClass::kRel, t.p.value);
    }
    for (const Expr* c : BlockComparisons(b)) {
      int lhs_segment = c->lhs.is_var() ? segment_of_[OperandHome(c->lhs.value, b)] : -1;
      int rhs_segment = c->rhs.is_var() ? segment_of_[OperandHome(c->rhs.value, b)] : -1;
      int head = OperandVertex(c->lhs, rhs_segment);
      int tail = OperandVertex(c->rhs, lhs_segment);
      g_.AddEdge(head, tail, EdgeClass::kCmp, c->op);
    }
    if (blk.order) {
      int head = var_vertex_.at(blk.order->var);
      int tail = g_.AddVertex(VertexClass::kVal, segment_of_[b],
                              Literal::Make(LiteralKind::kInt, std::to_string(*blk.limit))->Surface());
      g_.AddEdge(head, tail, EdgeClass::kOrd, blk.order->ascending ? "ASC" : "DESC");
    }
    if (blk.aggregate && (b > 0 || q_.intent == Intent::kSelect)) {
      g_.AddEdge(var_vertex_.at(blk.aggregate->arg), var_vertex_.at(blk.aggregate->alias),
                 EdgeClass::kAgg, blk.aggregate->function);
    }
    if (b == 0 && q_.intent == Intent::kAsk) {
      auto it = var_vertex_.find(ask_head_);
      if (it == var_vertex_.end() || g_.vertices[it->second].segment != 0) {
        throw Error(ErrorCode::kUnsupportedFeature,
                    "ASK variable ?" + ask_head_ + " is not bound in the main block");
      }
      g_.AddEdge(it->second, answer_vertex_, EdgeClass::kAgg, "ASK");
    }
  }

  const Query& q_;
  std::vector<const Block*> blocks_;
  std::map<std::string, int> home_;
  std::vector<int> segment_of_;
  std::vector<int> order_;
  std::map<std::string, int> var_vertex_;
  std::map<std::tuple<int, int, std::string>, int> iri_vertex_;
  std::string answer_var_;
  std::string ask_head_;
  int answer_vertex_ = -1;
  Graph g_;
};

}  // namespace

QueryGraph ToQueryGraph(const Query& q) { return GraphBuilder(q).Run(); }

QueryGraph ConvertProgram(std::string_view text) { return ToQueryGraph(Preprocess(Parse(text))); }

}  // namespace sparql
}  // namespace qgforge
