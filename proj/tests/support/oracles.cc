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

#include "support/oracles.h"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>

#include "common/literal.h"

namespace qgforge {
namespace testing {

namespace {

using VC = VertexClass;
using EC = EdgeClass;

std::string Name(const char* what, int id) { return std::string(what) + " " + std::to_string(id); }

}  // namespace

// ---------------------------------------------------------------------------
// Invariant checker.

std::vector<std::string> OracleProblems(const Graph& g, bool abstract) {
  std::vector<std::string> out;
  const int n = g.num_vertices();
  if (n == 0) return {"empty graph"};
  if (n != g.num_edges() + 1) out.push_back("not a tree: |V| != |E| + 1");

  int answers = 0;
  int max_segment = 0;
  for (const Vertex& v : g.vertices) {
    if (v.cls == VC::kEnd) out.push_back(Name("End vertex", v.id));
    if (v.cls == VC::kAns) {
      ++answers;
      if (v.segment != 0) out.push_back("Ans outside segment 0");
    }
    if (v.segment < 0) out.push_back(Name("negative segment on vertex", v.id));
    max_segment = std::max(max_segment, v.segment);
  }
  if (answers != 1) out.push_back("expected exactly one Ans");

  // Adjacency lists, all edges and same-segment edges.
  std::vector<std::vector<int>> all(n), inner(n);
  std::vector<int> degree(n, 0);
  for (const Edge& e : g.edges) {
    if (e.head < 0 || e.head >= n || e.tail < 0 || e.tail >= n || e.head == e.tail) {
      out.push_back(Name("bad endpoints on edge", e.id));
      continue;
    }
    all[e.head].push_back(e.tail);
    all[e.tail].push_back(e.head);
    ++degree[e.head];
    ++degree[e.tail];
    int sh = g.vertices[e.head].segment, st = g.vertices[e.tail].segment;
    if (sh == st) {
      inner[e.head].push_back(e.tail);
      inner[e.tail].push_back(e.head);
    } else if (e.cls != EC::kCmp) {
      out.push_back(Name("non-Cmp edge across segments:", e.id));
    }
  }
  if (!out.empty() && out.back().rfind("bad endpoints", 0) == 0) return out;

  auto reach = [&](int start, const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          q.push(w);
        }
      }
    }
    return seen;
  };
  auto seen_all = reach(0, all);
  if (std::count(seen_all.begin(), seen_all.end(), true) != n) out.push_back("not connected");

  for (int s = 0; s <= max_segment; ++s) {
    std::vector<int> members;
    for (const Vertex& v : g.vertices) {
      if (v.segment == s) members.push_back(v.id);
    }
    if (members.empty()) {
      out.push_back("segment numbers have a gap at " + std::to_string(s));
      continue;
    }
    auto seen = reach(members[0], inner);
    for (int v : members) {
      if (!seen[v]) {
        out.push_back(Name("segment split:", s));
        break;
      }
    }
    if (s == 0) continue;
    bool var = std::any_of(members.begin(), members.end(),
                           [&](int v) { return g.vertices[v].cls == VC::kVar; });
    if (!var) out.push_back(Name("segment without Var:", s));
    bool link = false;
    for (const Edge& e : g.edges) {
      int a = g.vertices[e.head].segment, b = g.vertices[e.tail].segment;
      if (e.cls == EC::kCmp && std::max(a, b) == s && std::min(a, b) < s) link = true;
    }
    if (!link) out.push_back(Name("segment not linked below:", s));
  }

  std::vector<bool> agg_tail(n, false);
  for (const Edge& e : g.edges) {
    if (e.cls == EC::kAgg) agg_tail[e.tail] = true;
  }
  std::map<int, int> modifiers;
  for (const Edge& e : g.edges) {
    VC h = g.vertices[e.head].cls, t = g.vertices[e.tail].cls;
    switch (e.cls) {
      case EC::kRel:
        if (h == VC::kVal || t == VC::kVal || h == VC::kType) {
          out.push_back(Name("bad Rel endpoints on edge", e.id));
        }
        break;
      case EC::kCmp: {
        bool hv = h == VC::kVar || h == VC::kVal;
        bool tv = t == VC::kVar || t == VC::kVal;
        if (!hv || !tv || (h == VC::kVal && t == VC::kVal)) {
          out.push_back(Name("bad Cmp endpoints on edge", e.id));
        }
        break;
      }
      case EC::kOrd:
        if (!(h == VC::kVar || h == VC::kAns) || t != VC::kVal) {
          out.push_back(Name("bad Ord endpoints on edge", e.id));
        }
        ++modifiers[g.vertices[e.tail].segment];
        break;
      case EC::kAgg: {
        int ts = g.vertices[e.tail].segment;
        bool tail_ok = (t == VC::kAns && ts == 0) || (t == VC::kVar && ts > 0);
        if (h != VC::kVar || !tail_ok || agg_tail[e.head]) {
          out.push_back(Name("bad Agg endpoints on edge", e.id));
        }
        for (const Edge& f : g.edges) {
          if (f.id != e.id && f.cls != EC::kCmp && (f.head == e.tail || f.tail == e.tail)) {
            out.push_back(Name("aggregate result with extra edges, edge", e.id));
          }
        }
        ++modifiers[ts];
        break;
      }
    }
  }
  for (const auto& [segment, count] : modifiers) {
    if (count > 1) out.push_back(Name("several modifiers in segment", segment));
  }
  for (const Vertex& v : g.vertices) {
    if (v.cls == VC::kVal && degree[v.id] != 1) out.push_back(Name("Val degree on vertex", v.id));
    if (v.cls == VC::kType) {
      for (const Edge& e : g.edges) {
        bool touches = e.head == v.id || e.tail == v.id;
        if (touches && !(e.cls == EC::kRel && e.tail == v.id)) {
          out.push_back(Name("Type not a Rel object, vertex", v.id));
        }
      }
    }
    if ((v.cls == VC::kAns || v.cls == VC::kVar) && n > 1 && !agg_tail[v.id]) {
      bool rel = false;
      for (const Edge& e : g.edges) {
        if (e.cls == EC::kRel && (e.head == v.id || e.tail == v.id)) rel = true;
      }
      if (!rel) out.push_back(Name("variable without Rel, vertex", v.id));
    }
  }

  std::set<std::pair<int, int>> copy_targets;
  for (const auto& [src, tgt] : g.copies.vertex) {
    if (tgt < 0 || src >= n || tgt >= src) {
      out.push_back(Name("copy target not earlier, vertex", src));
      continue;
    }
    const Vertex& a = g.vertices[src];
    const Vertex& b = g.vertices[tgt];
    if (a.cls != b.cls || !(a.cls == VC::kEnt || a.cls == VC::kType)) {
      out.push_back(Name("copy class, vertex", src));
    }
    if (a.segment == b.segment) out.push_back(Name("copy inside one segment, vertex", src));
    if (g.copies.vertex.count(tgt)) out.push_back(Name("chained copy, vertex", src));
    if (!copy_targets.insert({tgt, a.segment}).second) {
      out.push_back(Name("two copies of one target in a segment, vertex", src));
    }
  }
  for (const auto& [src, tgt] : g.copies.edge) {
    if (tgt < 0 || src >= g.num_edges() || tgt >= src) {
      out.push_back(Name("copy target not earlier, edge", src));
      continue;
    }
    if (g.edges[src].cls != EC::kRel || g.edges[tgt].cls != EC::kRel) {
      out.push_back(Name("copy class, edge", src));
    }
    if (g.copies.edge.count(tgt)) out.push_back(Name("chained copy, edge", src));
  }

  if (abstract) {
    for (const Vertex& v : g.vertices) {
      if (v.instance) out.push_back(Name("instance on abstract vertex", v.id));
    }
    for (const Edge& e : g.edges) {
      if (e.instance) out.push_back(Name("instance on abstract edge", e.id));
    }
    return out;
  }
  for (const Vertex& v : g.vertices) {
    bool needs = v.cls == VC::kEnt || v.cls == VC::kType || v.cls == VC::kVal;
    if (needs != v.instance.has_value()) out.push_back(Name("instance presence, vertex", v.id));
    if (v.cls == VC::kVal && v.instance && !Literal::FromSurface(*v.instance)) {
      out.push_back(Name("Val is not a literal, vertex", v.id));
    }
  }
  for (const Edge& e : g.edges) {
    if (!e.instance) {
      out.push_back(Name("unfilled edge", e.id));
      continue;
    }
    if (e.cls == EC::kRel) {
      bool typing = *e.instance == "rdf:type" || *e.instance == "type.object.type";
      VC t = g.vertices[e.tail].cls;
      // A type relation may also lead to a variable (an unknown type).
      if ((typing && t == VC::kEnt) || (!typing && t == VC::kType)) {
        out.push_back(Name("type relation mismatch, edge", e.id));
      }
    } else {
      const auto& allowed = BuiltinInstances(e.cls);
      if (std::find(allowed.begin(), allowed.end(), *e.instance) == allowed.end()) {
        out.push_back(Name("unknown built-in, edge", e.id));
      }
      if (e.cls == EC::kOrd && g.vertices[e.tail].instance) {
        // The limit must be a positive integer written without padding.
        const std::string& lim = *g.vertices[e.tail].instance;
        auto lit = Literal::FromSurface(lim);
        bool ok = lit && lit->kind() == LiteralKind::kInt && !lit->lexical().empty() &&
                  lit->lexical()[0] >= '1' && lit->lexical()[0] <= '9' &&
                  lit->lexical().find_first_not_of("0123456789") == std::string::npos;
        if (!ok) out.push_back(Name("bad limit on Ord edge", e.id));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism by backtracking.

bool OracleIsomorphic(const Graph& a, const Graph& b, bool ignore_instances) {
  const int n = a.num_vertices();
  if (n != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
  auto label = [&](const Vertex& v) {
    return std::make_tuple(v.cls, v.segment, ignore_instances ? std::string() : v.instance.value_or(""));
  };
  // Edge lookup keyed by ordered endpoints.
  auto index = [](const Graph& g) {
    std::map<std::pair<int, int>, const Edge*> m;
    for (const Edge& e : g.edges) m[{e.head, e.tail}] = &e;
    return m;
  };
  auto ea = index(a), eb = index(b);
  auto same_edge = [&](const Edge& x, const Edge& y) {
    return x.cls == y.cls && (ignore_instances || x.instance == y.instance);
  };
  auto root = [](const std::map<int, int>& links, int x) {
    auto it = links.find(x);
    return it == links.end() ? x : it->second;
  };

  std::vector<int> map(n, -1);
  std::vector<bool> used(n, false);
  auto consistent = [&](int v) {
    for (const auto& [key, e] : ea) {
      auto [h, t] = key;
      if (h != v && t != v) continue;
      if (map[h] < 0 || map[t] < 0) continue;
      auto it = eb.find({map[h], map[t]});
      if (it == eb.end() || !same_edge(*e, *it->second)) return false;
    }
    return true;
  };
  auto copies_match = [&]() {
    for (int x = 0; x < n; ++x) {
      for (int y = x + 1; y < n; ++y) {
        bool ga = root(a.copies.vertex, x) == root(a.copies.vertex, y);
        bool gb = root(b.copies.vertex, map[x]) == root(b.copies.vertex, map[y]);
        if (ga != gb) return false;
      }
    }
    std::vector<int> edge_map(a.num_edges(), -1);
    for (const Edge& e : a.edges) edge_map[e.id] = eb.at({map[e.head], map[e.tail]})->id;
    for (int x = 0; x < a.num_edges(); ++x) {
      for (int y = x + 1; y < a.num_edges(); ++y) {
        bool ga = root(a.copies.edge, x) == root(a.copies.edge, y);
        bool gb = root(b.copies.edge, edge_map[x]) == root(b.copies.edge, edge_map[y]);
        if (ga != gb) return false;
      }
    }
    return true;
  };
  std::function<bool(int)> extend = [&](int v) {
    if (v == n) return copies_match();
    for (int w = 0; w < n; ++w) {
      if (used[w] || label(a.vertices[v]) != label(b.vertices[w])) continue;
      map[v] = w;
      used[w] = true;
      if (consistent(v) && extend(v + 1)) return true;
      used[w] = false;
      map[v] = -1;
    }
    return false;
  };
  return extend(0);
}

// ---------------------------------------------------------------------------
// Nested-loop evaluation.

namespace {

// A value is a store term, or a literal that does not occur in the store.
struct Value {
  TermId id = -1;
  std::optional<Literal> literal;
  std::string text;
  bool operator<(const Value& o) const { return text < o.text; }
  bool operator==(const Value& o) const { return text == o.text; }
};

class NaiveEvaluator {
 public:
  NaiveEvaluator(const TripleStore& kg, const QueryGraph& g) : kg_(kg), g_(g) {}

  std::optional<std::set<std::string>> Run() {
    const int ans = g_.AnswerVertex();
    if (ans < 0) return std::nullopt;
    const Edge* top = AggInto(ans);
    std::vector<Binding> rows;
    if (!Solve(0, &rows)) return std::nullopt;

    // Subquery segments act as existential filters on the main solutions.
    for (int s = 1; s < g_.num_segments(); ++s) {
      const Edge* link = nullptr;
      int count = 0;
      for (const Edge& e : g_.edges) {
        int a = Seg(e.head), b = Seg(e.tail);
        if (a != b && (a == s || b == s)) {
          ++count;
          link = &e;
        }
      }
      if (count != 1 || std::min(Seg(link->head), Seg(link->tail)) != 0) return std::nullopt;
      int inner = Seg(link->head) == s ? link->head : link->tail;
      int outer = inner == link->head ? link->tail : link->head;
      std::vector<Value> values;
      if (!SegmentValues(s, inner, &values)) return std::nullopt;
      std::vector<Binding> kept;
      for (const Binding& row : rows) {
        for (const Value& v : values) {
          const Value& o = row.at(outer);
          bool ok = link->head == outer ? Compare(*link->instance, o, v)
                                        : Compare(*link->instance, v, o);
          if (ok) {
            kept.push_back(row);
            break;
          }
        }
      }
      rows = std::move(kept);
    }

    std::set<std::string> out;
    if (top) {
      std::vector<Value> values;
      for (const Binding& row : rows) values.push_back(row.at(top->head));
      if (*top->instance == "ASK") return std::set<std::string>{rows.empty() ? "false" : "true"};
      auto v = Aggregate(*top->instance, values);
      if (v) out.insert(v->text);
      return out;
    }
    if (const Edge* ord = OrdIn(0)) {
      auto limit = Literal::FromSurface(*g_.vertices[ord->tail].instance);
      bool asc = *ord->instance == "ASC";
      std::sort(rows.begin(), rows.end(), [&](const Binding& x, const Binding& y) {
        const Value& kx = x.at(ord->head);
        const Value& ky = y.at(ord->head);
        int c = Order(kx, ky);
        if (c != 0) return asc ? c < 0 : c > 0;
        return x.at(ans).text < y.at(ans).text;
      });
      std::vector<std::string> picked;
      for (const Binding& row : rows) {
        const std::string& t = row.at(ans).text;
        if (std::find(picked.begin(), picked.end(), t) != picked.end()) continue;
        picked.push_back(t);
        if (static_cast<std::int64_t>(picked.size()) >= limit->integer()) break;
      }
      out.insert(picked.begin(), picked.end());
      return out;
    }
    for (const Binding& row : rows) out.insert(row.at(ans).text);
    return out;
  }

 private:
  using Binding = std::map<int, Value>;

  int Seg(int v) const { return g_.vertices[v].segment; }

  const Edge* AggInto(int v) const {
    for (const Edge& e : g_.edges) {
      if (e.cls == EC::kAgg && e.tail == v) return &e;
    }
    return nullptr;
  }

  const Edge* OrdIn(int s) const {
    for (const Edge& e : g_.edges) {
      if (e.cls == EC::kOrd && Seg(e.head) == s) return &e;
    }
    return nullptr;
  }

  Value Term(TermId id) const { return Value{id, kg_.LiteralOf(id), kg_.Text(id)}; }

  // Values the linking vertex of segment s takes.
  bool SegmentValues(int s, int link, std::vector<Value>* out) {
    std::vector<Binding> rows;
    if (!Solve(s, &rows)) return false;
    if (const Edge* agg = AggInto(link)) {
      std::vector<Value> values;
      for (const Binding& row : rows) values.push_back(row.at(agg->head));
      auto v = Aggregate(*agg->instance, values);
      if (v) out->push_back(*v);
    } else {
      for (const Binding& row : rows) out->push_back(row.at(link));
    }
    if (const Edge* ord = OrdIn(s)) {
      (void)ord;
      return false;
    }
    return true;
  }

  std::optional<Value> Aggregate(const std::string& fn, std::vector<Value> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (fn == "COUNT") {
      Literal lit = *Literal::Make(LiteralKind::kInt, std::to_string(values.size()));
      auto id = kg_.Find(lit.Surface());
      return Value{id.value_or(-1), lit, lit.Surface()};
    }
    std::optional<Value> best;
    for (const Value& v : values) {
      if (!v.literal) continue;
      if (!best) {
        best = v;
        continue;
      }
      if (!Literal::Comparable(*v.literal, *best->literal)) continue;
      int c = Literal::Compare(*v.literal, *best->literal);
      if ((fn == "MAX" && c > 0) || (fn == "MIN" && c < 0)) best = v;
    }
    return best;
  }

  int Order(const Value& x, const Value& y) const {
    if (x.literal && y.literal && Literal::Comparable(*x.literal, *y.literal)) {
      return Literal::Compare(*x.literal, *y.literal);
    }
    return x.text < y.text ? -1 : x.text > y.text ? 1 : 0;
  }

  bool Compare(const std::string& op, const Value& a, const Value& b) const {
    if (op == "DURING" || op == "OVERLAP") {
      if (a.id < 0 || b.id < 0) return false;
      const auto& x = kg_.IntervalOf(a.id);
      const auto& y = kg_.IntervalOf(b.id);
      if (!x || !y) return false;
      auto le = [](const Literal& p, const Literal& q) {
        return Literal::Comparable(p, q) && Literal::Compare(p, q) <= 0;
      };
      if (op == "DURING") return le(y->start, x->start) && le(x->end, y->end);
      return le(x->start, y->end) && le(y->start, x->end);
    }
    if (a.literal && b.literal) {
      if (!Literal::Comparable(*a.literal, *b.literal)) return false;
      int c = Literal::Compare(*a.literal, *b.literal);
      if (op == "=") return c == 0;
      if (op == "!=") return c != 0;
      if (op == "<") return c < 0;
      if (op == "<=") return c <= 0;
      if (op == ">") return c > 0;
      if (op == ">=") return c >= 0;
      return false;
    }
    if (!a.literal && !b.literal && (op == "=" || op == "!=")) {
      return (a.text == b.text) == (op == "=");
    }
    return false;
  }

  // All bindings of the Ans/Var vertices of segment s that satisfy its Rel
  // edges and its internal Cmp edges.
  bool Solve(int s, std::vector<Binding>* out) {
    std::vector<const Edge*> rels, cmps;
    std::vector<int> vars;
    Binding consts;
    for (const Vertex& v : g_.vertices) {
      if (v.segment != s) continue;
      if (v.cls == VC::kAns || v.cls == VC::kVar) {
        if (!AggInto(v.id)) vars.push_back(v.id);
      } else if (v.cls == VC::kEnt || v.cls == VC::kType) {
        auto id = kg_.Find(*v.instance);
        if (!id) return true;  // unknown constant: no solutions
        consts[v.id] = Term(*id);
      } else if (v.cls == VC::kVal) {
        auto lit = Literal::FromSurface(*v.instance);
        auto id = kg_.Find(*v.instance);
        consts[v.id] = Value{id.value_or(-1), lit, *v.instance};
      }
    }
    for (const Edge& e : g_.edges) {
      if (Seg(e.head) != s || Seg(e.tail) != s) continue;
      if (e.cls == EC::kRel) rels.push_back(&e);
      if (e.cls == EC::kCmp) cmps.push_back(&e);
    }
    std::function<void(Binding&, std::vector<bool>&)> step = [&](Binding& b,
                                                                 std::vector<bool>& done) {
      int pick = -1;
      for (int i = 0; i < static_cast<int>(rels.size()) && pick < 0; ++i) {
        if (!done[i] && (b.count(rels[i]->head) || b.count(rels[i]->tail))) pick = i;
      }
      for (int i = 0; i < static_cast<int>(rels.size()) && pick < 0; ++i) {
        if (!done[i]) pick = i;
      }
      if (pick < 0) {
        for (int v : vars) {
          if (!b.count(v)) return;
        }
        for (const Edge* c : cmps) {
          if (!Compare(*c->instance, b.at(c->head), b.at(c->tail))) return;
        }
        Binding row;
        for (int v : vars) row[v] = b.at(v);
        out->push_back(std::move(row));
        return;
      }
      const Edge& e = *rels[pick];
      auto p = kg_.Find(*e.instance);
      if (!p) return;
      done[pick] = true;
      for (const Triple& t : kg_.triples()) {
        if (t.p != *p) continue;
        bool hb = b.count(e.head), tb = b.count(e.tail);
        if (hb && b.at(e.head).text != kg_.Text(t.s)) continue;
        if (tb && b.at(e.tail).text != kg_.Text(t.o)) continue;
        if (!hb) b[e.head] = Term(t.s);
        if (!tb) b[e.tail] = Term(t.o);
        step(b, done);
        if (!hb) b.erase(e.head);
        if (!tb) b.erase(e.tail);
      }
      done[pick] = false;
    };
    Binding start = consts;
    std::vector<bool> done(rels.size(), false);
    step(start, done);
    // Every pattern variable must be reachable through Rel edges.
    for (int v : vars) {
      bool covered = std::any_of(rels.begin(), rels.end(),
                                 [&](const Edge* e) { return e->head == v || e->tail == v; });
      if (!covered) return false;
    }
    return true;
  }

  const TripleStore& kg_;
  const QueryGraph& g_;
};

}  // namespace

std::optional<std::set<std::string>> OracleAnswers(const TripleStore& kg, const QueryGraph& g) {
  return NaiveEvaluator(kg, g).Run();
}

}  // namespace testing
}  // namespace qgforge
