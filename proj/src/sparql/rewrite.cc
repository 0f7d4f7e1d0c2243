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
#include <functional>
#include <map>

#include "common/error.h"
#include "sparql/bridge.h"

namespace qgforge {
namespace sparql {

namespace {

using RenameMap = std::map<std::string, std::string>;

void RenameTerm(Term* t, const RenameMap& m) {
  if (!t->is_var()) return;
  auto it = m.find(t->value);
  if (it != m.end()) t->value = it->second;
}

void RenameName(std::string* name, const RenameMap& m) {
  auto it = m.find(*name);
  if (it != m.end()) *name = it->second;
}

void RenameExpr(Expr* e, const RenameMap& m) {
  if (e->kind == Expr::Kind::kCompare) {
    RenameTerm(&e->lhs, m);
    RenameTerm(&e->rhs, m);
  }
  for (Expr& a : e->args) RenameExpr(&a, m);
  for (TriplePattern& t : e->pattern) {
    RenameTerm(&t.s, m);
    RenameTerm(&t.p, m);
    RenameTerm(&t.o, m);
  }
  for (Expr& f : e->pattern_filters) RenameExpr(&f, m);
}

void RenameBlock(Block* b, const RenameMap& m) {
  for (TriplePattern& t : b->triples) {
    RenameTerm(&t.s, m);
    RenameTerm(&t.p, m);
    RenameTerm(&t.o, m);
  }
  for (Expr& f : b->filters) RenameExpr(&f, m);
  for (std::string& v : b->projection) RenameName(&v, m);
  if (b->aggregate) {
    RenameName(&b->aggregate->arg, m);
    RenameName(&b->aggregate->alias, m);
  }
  if (b->order) RenameName(&b->order->var, m);
}

std::set<std::string> AllVars(const Block& b) {
  std::set<std::string> out = BlockVars(b);
  for (const Block& sub : b.subqueries) {
    auto inner = AllVars(sub);
    out.insert(inner.begin(), inner.end());
  }
  return out;
}

std::string Fresh(const std::string& base, std::set<std::string>* used) {
  std::string name = base;
  for (int k = 1; used->count(name); ++k) name = base + "_" + std::to_string(k);
  used->insert(name);
  return name;
}

bool ContainsExists(const Expr& e) {
  if (e.kind == Expr::Kind::kExists || e.kind == Expr::Kind::kNotExists) return true;
  return std::any_of(e.args.begin(), e.args.end(), ContainsExists);
}

// Does p2 equal p1 up to a bijective renaming of variables outside `outer`?
bool MatchModuloLocals(const std::vector<TriplePattern>& p1, const std::vector<TriplePattern>& p2,
                       const std::set<std::string>& outer) {
  if (p1.size() != p2.size()) return false;
  std::vector<bool> used(p1.size(), false);
  RenameMap fwd, back;
  std::function<bool(std::size_t)> solve = [&](std::size_t i) -> bool {
    if (i == p2.size()) return true;
    for (std::size_t j = 0; j < p1.size(); ++j) {
      if (used[j]) continue;
      RenameMap f = fwd, b = back;
      bool ok = true;
      const Term* a[3] = {&p2[i].s, &p2[i].p, &p2[i].o};
      const Term* c[3] = {&p1[j].s, &p1[j].p, &p1[j].o};
      for (int k = 0; k < 3 && ok; ++k) {
        if (a[k]->kind != c[k]->kind) {
          ok = false;
        } else if (!a[k]->is_var() || outer.count(a[k]->value) || outer.count(c[k]->value)) {
          ok = *a[k] == *c[k];
        } else {
          auto it = f.find(a[k]->value);
          auto jt = b.find(c[k]->value);
          if (it == f.end() && jt == b.end()) {
            f[a[k]->value] = c[k]->value;
            b[c[k]->value] = a[k]->value;
          } else {
            ok = it != f.end() && it->second == c[k]->value;
          }
        }
      }
      if (!ok) continue;
      std::swap(f, fwd);
      std::swap(b, back);
      used[j] = true;
      if (solve(i + 1)) return true;
      used[j] = false;
      std::swap(f, fwd);
      std::swap(b, back);
    }
    return false;
  };
  return solve(0);
}

void StripBlock(Block* block, const std::set<std::string>& query_vars) {
  for (Block& sub : block->subqueries) StripBlock(&sub, query_vars);
  std::vector<Expr> filters;
  for (std::size_t i = 0; i < block->filters.size(); ++i) {
    const Expr& f = block->filters[i];
    if (!ContainsExists(f)) {
      filters.push_back(f);
      continue;
    }
    const Expr* exists = nullptr;
    const Expr* not_exists = nullptr;
    if (f.kind == Expr::Kind::kOr && f.args.size() == 2) {
      for (const Expr& a : f.args) {
        if (a.kind == Expr::Kind::kExists) exists = &a;
        if (a.kind == Expr::Kind::kNotExists) not_exists = &a;
      }
    }
    if (!exists || !not_exists || exists->pattern_filters.empty() ||
        !not_exists->pattern_filters.empty()) {
      throw Error(ErrorCode::kRewrite,
                  "EXISTS is supported only as FILTER(EXISTS{P . FILTER(C)} || NOT EXISTS{P})");
    }
    for (const Expr& c : exists->pattern_filters) {
      if (ContainsExists(c)) throw Error(ErrorCode::kRewrite, "nested EXISTS");
    }
    // Variables bound outside this filter are shared; the rest are local.
    Block rest = *block;
    rest.filters.erase(rest.filters.begin() + static_cast<long>(i));
    rest.subqueries.clear();
    std::set<std::string> outer = BlockVars(rest);
    for (const Block& sub : block->subqueries) {
      for (const std::string& v : sub.Exported()) outer.insert(v);
    }
    if (!MatchModuloLocals(exists->pattern, not_exists->pattern, outer)) {
      throw Error(ErrorCode::kRewrite, "EXISTS and NOT EXISTS patterns differ");
    }
    std::set<std::string> mine;
    CollectVars(*exists, &mine);
    std::set<std::string> used = query_vars;
    for (const std::string& v : mine) {
      if (!outer.count(v)) used.erase(v);
    }
    for (const std::string& v : outer) used.insert(v);
    RenameMap rename;
    for (const std::string& v : mine) {
      if (!outer.count(v)) rename[v] = Fresh(v, &used);
    }
    for (TriplePattern t : exists->pattern) {
      RenameTerm(&t.s, rename);
      RenameTerm(&t.p, rename);
      RenameTerm(&t.o, rename);
      if (std::find(block->triples.begin(), block->triples.end(), t) == block->triples.end()) {
        block->triples.push_back(t);
      }
    }
    for (Expr c : exists->pattern_filters) {
      RenameExpr(&c, rename);
      filters.push_back(std::move(c));
    }
  }
  block->filters = std::move(filters);
}

// ---------------------------------------------------------------------------
// Interval combining.

struct IntervalPair {
  int block = 0;
  std::size_t st_triple = 0;
  std::size_t ed_triple = 0;
  std::string st_var;
  std::string ed_var;
  std::string interval_var;
};

struct Atom {
  int block = 0;
  std::size_t filter = 0;
  int arg = -1;  // -1 when the filter itself is the comparison
  const Expr* expr = nullptr;
};

bool EndsWithPart(std::string_view rel, std::string_view suffix) {
  if (rel.size() < suffix.size() || rel.substr(rel.size() - suffix.size()) != suffix) return false;
  if (rel.size() == suffix.size()) return true;
  char sep = rel[rel.size() - suffix.size() - 1];
  return sep == '.' || sep == '_' || sep == '/' || sep == ':' || sep == '#';
}

}  // namespace

std::optional<std::string> IntervalEndRelation(std::string_view start_rel) {
  if (start_rel.find(kIntervalSeparator) != std::string_view::npos) return std::nullopt;
  if (EndsWithPart(start_rel, "from")) {
    return std::string(start_rel.substr(0, start_rel.size() - 4)) + "to";
  }
  if (EndsWithPart(start_rel, "start_date")) {
    return std::string(start_rel.substr(0, start_rel.size() - 10)) + "end_date";
  }
  return std::nullopt;
}

std::optional<std::pair<std::string, std::string>> SplitIntervalRelation(std::string_view rel) {
  auto pos = rel.find(kIntervalSeparator);
  if (pos == std::string_view::npos) return std::nullopt;
  std::string st(rel.substr(0, pos));
  std::string ed(rel.substr(pos + kIntervalSeparator.size()));
  auto partner = IntervalEndRelation(st);
  if (!partner || *partner != ed) return std::nullopt;
  return std::make_pair(st, ed);
}

Query StripExists(const Query& q) {
  Query out = q;
  StripBlock(&out.where, AllVars(q.where));
  return out;
}

Query CombineIntervals(const Query& q) {
  Query out = q;
  std::vector<Block*> blocks = {&out.where};
  for (Block& sub : out.where.subqueries) blocks.push_back(&sub);

  std::vector<IntervalPair> pairs;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const auto& triples = blocks[b]->triples;
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const TriplePattern& t = triples[i];
      if (!t.p.is_iri() || !t.o.is_var()) continue;
      auto end_rel = IntervalEndRelation(t.p.value);
      if (!end_rel) continue;
      std::vector<std::size_t> starts, ends;
      for (std::size_t j = 0; j < triples.size(); ++j) {
        const TriplePattern& u = triples[j];
        if (!(u.s == t.s) || !u.p.is_iri() || !u.o.is_var()) continue;
        if (u.p.value == t.p.value) starts.push_back(j);
        if (u.p.value == *end_rel) ends.push_back(j);
      }
      if (starts.size() != 1 || ends.size() != 1) continue;
      const TriplePattern& u = triples[ends[0]];
      if (u.o.value == t.o.value) continue;
      pairs.push_back(IntervalPair{b, i, ends[0], t.o.value, u.o.value, {}});
    }
  }
  if (pairs.empty()) return out;

  // (pair index, is_start) for every endpoint variable.
  std::map<std::string, std::pair<int, bool>> endpoint;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    endpoint[pairs[i].st_var] = {i, true};
    endpoint[pairs[i].ed_var] = {i, false};
  }

  std::vector<Atom> atoms;
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    const auto& filters = blocks[b]->filters;
    for (std::size_t f = 0; f < filters.size(); ++f) {
      if (filters[f].kind == Expr::Kind::kCompare) {
        atoms.push_back(Atom{b, f, -1, &filters[f]});
      } else if (filters[f].kind == Expr::Kind::kAnd) {
        for (int a = 0; a < static_cast<int>(filters[f].args.size()); ++a) {
          if (filters[f].args[a].kind == Expr::Kind::kCompare) {
            atoms.push_back(Atom{b, f, a, &filters[f].args[a]});
          }
        }
      }
    }
  }

  // Group the comparisons that relate endpoints of two different pairs.
  std::map<std::pair<int, int>, std::vector<int>> linked;
  for (int i = 0; i < static_cast<int>(atoms.size()); ++i) {
    const Expr& e = *atoms[i].expr;
    if (!e.lhs.is_var() || !e.rhs.is_var()) continue;
    auto l = endpoint.find(e.lhs.value);
    auto r = endpoint.find(e.rhs.value);
    if (l == endpoint.end() || r == endpoint.end() || l->second.first == r->second.first) continue;
    linked[std::minmax(l->second.first, r->second.first)].push_back(i);
  }
  if (linked.empty()) return out;

  struct Combined {
    int head;
    int tail;
    std::string op;
    std::vector<int> atoms;
  };
  std::vector<Combined> combined;
  std::set<int> consumed;
  std::set<int> involved;
  for (const auto& [key, members] : linked) {
    if (members.size() != 2) {
      throw Error(ErrorCode::kRewrite, "interval comparison between ?" + pairs[key.first].st_var +
                                           " and ?" + pairs[key.second].st_var +
                                           " matches neither DURING nor OVERLAP");
    }
    // Normalize every comparison to (pair, is_start) <= (pair, is_start).
    struct Le {
      std::pair<int, bool> lo;
      std::pair<int, bool> hi;
    };
    std::vector<Le> les;
    for (int idx : members) {
      const Expr& e = *atoms[idx].expr;
      auto l = endpoint.at(e.lhs.value);
      auto r = endpoint.at(e.rhs.value);
      if (e.op == "<=") {
        les.push_back({l, r});
      } else if (e.op == ">=") {
        les.push_back({r, l});
      } else {
        throw Error(ErrorCode::kRewrite, "interval comparison uses operator '" + e.op +
                                             "', which matches neither DURING nor OVERLAP");
      }
    }
    Combined c;
    c.atoms = members;
    const Le& a = les[0];
    const Le& b = les[1];
    auto is = [](const Le& x, bool lo_start, bool hi_start) {
      return x.lo.second == lo_start && x.hi.second == hi_start;
    };
    if (is(a, true, true) && is(b, false, false) && a.hi.first == b.lo.first) {
      c = {a.hi.first, a.lo.first, "DURING", members};
    } else if (is(a, false, false) && is(b, true, true) && b.hi.first == a.lo.first) {
      c = {b.hi.first, b.lo.first, "DURING", members};
    } else if (is(a, true, false) && is(b, true, false) && a.lo.first == b.hi.first &&
               a.hi.first == b.lo.first) {
      c = {a.lo.first, a.hi.first, "OVERLAP", members};
    } else {
      throw Error(ErrorCode::kRewrite, "interval comparison between ?" + pairs[key.first].st_var +
                                           " and ?" + pairs[key.second].st_var +
                                           " matches neither DURING nor OVERLAP");
    }
    combined.push_back(c);
    consumed.insert(members.begin(), members.end());
    involved.insert(key.first);
    involved.insert(key.second);
  }

  // Endpoint variables of combined pairs may appear nowhere else.
  for (int p : involved) {
    for (const std::string& var : {pairs[p].st_var, pairs[p].ed_var}) {
      for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
        const Block& blk = *blocks[b];
        for (std::size_t t = 0; t < blk.triples.size(); ++t) {
          if (b == pairs[p].block && (t == pairs[p].st_triple || t == pairs[p].ed_triple)) continue;
          const TriplePattern& tp = blk.triples[t];
          if ((tp.s.is_var() && tp.s.value == var) || (tp.o.is_var() && tp.o.value == var) ||
              (tp.p.is_var() && tp.p.value == var)) {
            throw Error(ErrorCode::kRewrite, "interval endpoint ?" + var + " is used elsewhere");
          }
        }
        if ((blk.aggregate && (blk.aggregate->arg == var || blk.aggregate->alias == var)) ||
            (blk.order && blk.order->var == var)) {
          throw Error(ErrorCode::kRewrite, "interval endpoint ?" + var + " is used elsewhere");
        }
      }
      for (int i = 0; i < static_cast<int>(atoms.size()); ++i) {
        if (consumed.count(i)) continue;
        std::set<std::string> vars;
        CollectVars(*atoms[i].expr, &vars);
        if (vars.count(var)) {
          throw Error(ErrorCode::kRewrite, "interval endpoint ?" + var + " is used elsewhere");
        }
      }
      for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
        for (const Expr& f : blocks[b]->filters) {
          if (f.kind == Expr::Kind::kCompare || f.kind == Expr::Kind::kAnd) continue;
          std::set<std::string> vars;
          CollectVars(f, &vars);
          if (vars.count(var)) {
            throw Error(ErrorCode::kRewrite, "interval endpoint ?" + var + " is used elsewhere");
          }
        }
      }
    }
  }

  std::set<std::string> used = AllVars(out.where);
  for (int p : involved) {
    pairs[p].interval_var = Fresh(pairs[p].st_var + "__" + pairs[p].ed_var, &used);
  }

  // Replace the comparisons: the first atom of each group becomes the new
  // predicate, the second one disappears.
  std::map<std::pair<int, std::pair<std::size_t, int>>, std::optional<Expr>> replacement;
  for (const Combined& c : combined) {
    Expr e = Expr::Compare(c.op, Term::Var(pairs[c.head].interval_var),
                           Term::Var(pairs[c.tail].interval_var));
    const Atom& first = atoms[c.atoms[0]];
    const Atom& second = atoms[c.atoms[1]];
    replacement[{first.block, {first.filter, first.arg}}] = e;
    replacement[{second.block, {second.filter, second.arg}}] = std::nullopt;
  }
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    std::vector<Expr> filters;
    for (std::size_t f = 0; f < blocks[b]->filters.size(); ++f) {
      Expr& filter = blocks[b]->filters[f];
      auto whole = replacement.find({b, {f, -1}});
      if (whole != replacement.end()) {
        if (whole->second) filters.push_back(*whole->second);
        continue;
      }
      if (filter.kind == Expr::Kind::kAnd) {
        std::vector<Expr> args;
        for (int a = 0; a < static_cast<int>(filter.args.size()); ++a) {
          auto it = replacement.find({b, {f, a}});
          if (it == replacement.end()) {
            args.push_back(filter.args[a]);
          } else if (it->second) {
            args.push_back(*it->second);
          }
        }
        if (args.size() == 1) {
          filters.push_back(std::move(args[0]));
        } else if (!args.empty()) {
          filters.push_back(Expr::And(std::move(args)));
        }
        continue;
      }
      filters.push_back(filter);
    }
    blocks[b]->filters = std::move(filters);
  }

  // Replace the relation pairs and the projections of their endpoints.
  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    Block& blk = *blocks[b];
    std::set<std::size_t> drop;
    for (int p : involved) {
      if (pairs[p].block != b) continue;
      TriplePattern& st = blk.triples[pairs[p].st_triple];
      const TriplePattern& ed = blk.triples[pairs[p].ed_triple];
      st.p = Term::Iri(st.p.value + std::string(kIntervalSeparator) + ed.p.value);
      st.o = Term::Var(pairs[p].interval_var);
      drop.insert(pairs[p].ed_triple);
      std::vector<std::string> projection;
      for (const std::string& v : blk.projection) {
        if (v == pairs[p].st_var) {
          projection.push_back(pairs[p].interval_var);
        } else if (v == pairs[p].ed_var) {
          if (std::find(blk.projection.begin(), blk.projection.end(), pairs[p].st_var) ==
              blk.projection.end()) {
            projection.push_back(pairs[p].interval_var);
          }
        } else {
          projection.push_back(v);
        }
      }
      blk.projection = std::move(projection);
    }
    std::vector<TriplePattern> triples;
    for (std::size_t t = 0; t < blk.triples.size(); ++t) {
      if (!drop.count(t)) triples.push_back(blk.triples[t]);
    }
    blk.triples = std::move(triples);
  }
  return out;
}

std::optional<std::string> AnswerVariable(const Query& q) {
  const Block& main = q.where;
  if (q.intent == Intent::kSelect) {
    if (main.aggregate) return main.aggregate->arg;
    if (!main.projection.empty()) return main.projection[0];
    return std::nullopt;
  }
  if (AllVars(main).count("x")) return std::string("x");
  auto first_var = [](const Block& b) -> std::optional<std::string> {
    for (const TriplePattern& t : b.triples) {
      if (t.s.is_var()) return t.s.value;
      if (t.o.is_var()) return t.o.value;
    }
    return std::nullopt;
  };
  if (auto v = first_var(main)) return v;
  for (const Block& sub : main.subqueries) {
    if (auto v = first_var(sub)) return v;
  }
  return std::nullopt;
}

Query MergeXIntention(const Query& q) {
  Query out = q;
  auto answer = AnswerVariable(q);
  if (!answer) return out;
  Block& main = out.where;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < main.subqueries.size(); ++i) {
      Block sub = main.subqueries[i];
      if (sub.aggregate || sub.order || sub.limit) continue;
      if (std::find(sub.projection.begin(), sub.projection.end(), *answer) ==
          sub.projection.end()) {
        continue;
      }
      std::set<std::string> exported(sub.projection.begin(), sub.projection.end());
      std::set<std::string> used = BlockVars(main);
      for (std::size_t j = 0; j < main.subqueries.size(); ++j) {
        if (j == i) continue;
        auto vars = BlockVars(main.subqueries[j]);
        used.insert(vars.begin(), vars.end());
      }
      used.insert(exported.begin(), exported.end());
      RenameMap rename;
      for (const std::string& v : BlockVars(sub)) {
        if (exported.count(v)) continue;
        if (used.count(v)) {
          rename[v] = Fresh(v, &used);
        } else {
          used.insert(v);
        }
      }
      RenameBlock(&sub, rename);
      main.triples.insert(main.triples.end(), sub.triples.begin(), sub.triples.end());
      main.filters.insert(main.filters.end(), sub.filters.begin(), sub.filters.end());
      main.subqueries.erase(main.subqueries.begin() + static_cast<long>(i));
      changed = true;
      break;
    }
  }
  return out;
}

Query Preprocess(const Query& q) { return MergeXIntention(CombineIntervals(StripExists(q))); }

}  // namespace sparql
}  // namespace qgforge
