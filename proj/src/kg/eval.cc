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

// Backtracking evaluator: subqueries are evaluated first into tables, then
// the block's triple patterns and subquery tables are joined by index-nested
// loops, always expanding the item with the fewest candidates next. Filters
// run as soon as their variables are bound.

#include <algorithm>
#include <functional>
#include <limits>
#include <map>

#include "common/error.h"
#include "kg/store.h"

namespace qgforge {

namespace {

using sparql::Block;
using sparql::Expr;
using sparql::Query;
using sparql::Term;
using sparql::TriplePattern;

// Non-negative values are store term ids; negative values index constants
// created during evaluation (query literals and aggregate results).
using Value = std::int64_t;
constexpr Value kUnbound = std::numeric_limits<Value>::min();

struct Constant {
  std::string text;
  std::optional<Literal> literal;
};

struct Table {
  std::vector<std::string> vars;
  std::vector<std::vector<Value>> rows;
};

struct PatternSlot {
  int var = -1;           // slot index when the position is a variable
  Value value = kUnbound; // constant value otherwise
};

struct Item {
  bool is_table = false;
  PatternSlot s, p, o;
  const Table* table = nullptr;
  std::vector<int> table_slots;
};

struct Problem {
  std::vector<std::string> vars;
  std::map<std::string, int> slot;
  std::vector<Item> items;
  std::vector<const Expr*> filters;
  std::vector<std::vector<int>> filter_slots;
  bool impossible = false;

  int Slot(const std::string& name) {
    auto [it, inserted] = slot.emplace(name, static_cast<int>(vars.size()));
    if (inserted) vars.push_back(name);
    return it->second;
  }
};

class Evaluator {
 public:
  Evaluator(const TripleStore& store, const EvalOptions& options, EvalStats* stats)
      : store_(store), opt_(options), stats_(stats) {}

  bool AskBlock(const Block& b) {
    std::vector<Table> subtables;
    for (const Block& sub : b.subqueries) subtables.push_back(EvalSubquery(sub));
    Problem prob = Compile(b.triples, b.filters, subtables, {});
    std::vector<Value> binding(prob.vars.size(), kUnbound);
    bool found = false;
    Search(prob, &binding, [&](const std::vector<Value>&) {
      found = true;
      return false;
    });
    return found;
  }

  ResultTable SelectMain(const Block& b) {
    Table t = EvalBlock(b);
    ResultTable out;
    out.columns = t.vars;
    for (const auto& row : t.rows) {
      std::vector<std::string> text;
      for (Value v : row) text.push_back(v == kUnbound ? std::string() : Text(v));
      out.rows.push_back(std::move(text));
    }
    return out;
  }

 private:
  // ---- values -------------------------------------------------------------

  Value Const(const std::string& text, std::optional<Literal> literal) {
    auto it = const_ids_.find(text);
    if (it != const_ids_.end()) return it->second;
    consts_.push_back(Constant{text, std::move(literal)});
    Value v = -static_cast<Value>(consts_.size());
    const_ids_.emplace(text, v);
    return v;
  }

  Value TermValue(const Term& t) {
    if (t.is_literal()) {
      if (auto id = store_.Find(t.value)) return *id;
      return Const(t.value, Literal::FromSurface(t.value));
    }
    if (auto id = store_.Find(t.value)) return *id;
    return Const(t.value, std::nullopt);
  }

  const std::string& Text(Value v) const {
    return v >= 0 ? store_.Text(static_cast<TermId>(v)) : consts_[-v - 1].text;
  }
  const Literal* LiteralOf(Value v) const {
    const auto& lit = v >= 0 ? store_.LiteralOf(static_cast<TermId>(v)) : consts_[-v - 1].literal;
    return lit ? &*lit : nullptr;
  }
  const Interval* IntervalOf(Value v) const {
    if (v < 0) return nullptr;
    const auto& iv = store_.IntervalOf(static_cast<TermId>(v));
    return iv ? &*iv : nullptr;
  }

  bool Fail(const std::string& why) {
    if (opt_.strict) throw Error(ErrorCode::kEval, why);
    return false;
  }

  static bool ApplyOp(const std::string& op, int c) {
    if (op == "=") return c == 0;
    if (op == "!=") return c != 0;
    if (op == "<") return c < 0;
    if (op == "<=") return c <= 0;
    if (op == ">") return c > 0;
    if (op == ">=") return c >= 0;
    throw Error(ErrorCode::kEval, "unknown comparison operator " + op);
  }

  bool CompareLiterals(const Literal& a, const Literal& b, const std::string& op, bool* ok) {
    if (!Literal::Comparable(a, b)) {
      *ok = Fail("cannot compare " + a.Surface() + " with " + b.Surface());
      return false;
    }
    return ApplyOp(op, Literal::Compare(a, b));
  }

  bool CompareValues(const std::string& op, Value a, Value b) {
    if (op == "DURING" || op == "OVERLAP") {
      const Interval* x = IntervalOf(a);
      const Interval* y = IntervalOf(b);
      if (!x || !y) return Fail(op + " needs two intervals");
      bool ok = true;
      bool r1, r2;
      if (op == "DURING") {
        r1 = CompareLiterals(x->start, y->start, ">=", &ok);
        r2 = ok && CompareLiterals(x->end, y->end, "<=", &ok);
      } else {
        r1 = CompareLiterals(x->start, y->end, "<=", &ok);
        r2 = ok && CompareLiterals(x->end, y->start, ">=", &ok);
      }
      return ok && r1 && r2;
    }
    const Literal* la = LiteralOf(a);
    const Literal* lb = LiteralOf(b);
    if (la && lb) {
      bool ok = true;
      bool r = CompareLiterals(*la, *lb, op, &ok);
      return ok && r;
    }
    if (!la && !lb && !IntervalOf(a) && !IntervalOf(b) && (op == "=" || op == "!=")) {
      bool same = a == b || Text(a) == Text(b);
      return op == "=" ? same : !same;
    }
    return Fail("cannot compare " + Text(a) + " with " + Text(b) + " using " + op);
  }

  // Three-way total order used by ORDER BY and for deterministic output.
  int OrderCompare(Value a, Value b) const {
    auto group = [&](Value v) {
      if (const Literal* l = LiteralOf(v)) {
        if (l->numeric()) return 1;
        return l->kind() == LiteralKind::kDate ? 2 : 3;
      }
      return IntervalOf(v) ? 4 : 0;
    };
    int ga = group(a), gb = group(b);
    if (ga != gb) return ga < gb ? -1 : 1;
    if (ga >= 1 && ga <= 3) {
      int c = Literal::Compare(*LiteralOf(a), *LiteralOf(b));
      if (c != 0) return c;
    }
    int c = Text(a).compare(Text(b));
    return c < 0 ? -1 : c > 0 ? 1 : 0;
  }

  // ---- compilation --------------------------------------------------------

  // Variables a filter waits for. EXISTS groups wait only for the variables
  // they share with the enclosing problem; the others are local to the group.
  static void ExprVars(const Expr& e, const Problem& prob, std::vector<std::string>* out) {
    if (e.kind == Expr::Kind::kCompare) {
      if (e.lhs.is_var()) out->push_back(e.lhs.value);
      if (e.rhs.is_var()) out->push_back(e.rhs.value);
    }
    if (e.kind == Expr::Kind::kExists || e.kind == Expr::Kind::kNotExists) {
      std::set<std::string> inner;
      sparql::CollectVars(e, &inner);
      for (const std::string& v : inner) {
        if (prob.slot.count(v)) out->push_back(v);
      }
      return;
    }
    for (const Expr& a : e.args) ExprVars(a, prob, out);
  }

  PatternSlot Position(Problem* prob, const Term& t) {
    PatternSlot slot;
    if (t.is_var()) {
      slot.var = prob->Slot(t.value);
    } else {
      slot.value = TermValue(t);
    }
    return slot;
  }

  Problem Compile(const std::vector<TriplePattern>& triples, const std::vector<Expr>& filters,
                  const std::vector<Table>& tables, const std::vector<std::string>& outer_vars) {
    Problem prob;
    for (const std::string& v : outer_vars) prob.Slot(v);
    for (const TriplePattern& t : triples) {
      Item item;
      item.s = Position(&prob, t.s);
      item.p = Position(&prob, t.p);
      item.o = Position(&prob, t.o);
      for (const PatternSlot* ps : {&item.s, &item.p, &item.o}) {
        if (ps->var < 0 && ps->value < 0) prob.impossible = true;
      }
      prob.items.push_back(item);
    }
    for (const Table& table : tables) {
      Item item;
      item.is_table = true;
      item.table = &table;
      for (const std::string& v : table.vars) item.table_slots.push_back(prob.Slot(v));
      prob.items.push_back(item);
    }
    for (const Expr& f : filters) {
      std::vector<std::string> names;
      ExprVars(f, prob, &names);
      std::vector<int> slots;
      for (const std::string& n : names) slots.push_back(prob.Slot(n));
      prob.filters.push_back(&f);
      prob.filter_slots.push_back(std::move(slots));
    }
    return prob;
  }

  // ---- filters ------------------------------------------------------------

  bool EvalExpr(const Expr& e, const Problem& prob, const std::vector<Value>& binding) {
    switch (e.kind) {
      case Expr::Kind::kCompare: {
        auto operand = [&](const Term& t) -> Value {
          if (t.is_var()) {
            auto it = prob.slot.find(t.value);
            return it == prob.slot.end() ? kUnbound : binding[it->second];
          }
          return TermValue(t);
        };
        Value a = operand(e.lhs), b = operand(e.rhs);
        if (a == kUnbound || b == kUnbound) return false;
        return CompareValues(e.op, a, b);
      }
      case Expr::Kind::kAnd:
        for (const Expr& a : e.args) {
          if (!EvalExpr(a, prob, binding)) return false;
        }
        return true;
      case Expr::Kind::kOr:
        for (const Expr& a : e.args) {
          if (EvalExpr(a, prob, binding)) return true;
        }
        return false;
      case Expr::Kind::kNot:
        return !EvalExpr(e.args.at(0), prob, binding);
      case Expr::Kind::kExists:
      case Expr::Kind::kNotExists: {
        Problem inner = Compile(e.pattern, e.pattern_filters, {}, prob.vars);
        std::vector<Value> start(inner.vars.size(), kUnbound);
        for (std::size_t i = 0; i < prob.vars.size(); ++i) start[i] = binding[i];
        bool found = false;
        Search(inner, &start, [&](const std::vector<Value>&) {
          found = true;
          return false;
        });
        return e.kind == Expr::Kind::kExists ? found : !found;
      }
    }
    return false;
  }

  // ---- search -------------------------------------------------------------

  void Step() {
    ++steps_;
    if (stats_) ++stats_->steps;
    if (opt_.step_budget && steps_ > opt_.step_budget) {
      throw Error(ErrorCode::kBudgetExceeded,
                  "evaluation exceeded " + std::to_string(opt_.step_budget) + " steps");
    }
  }

  static Value Resolve(const PatternSlot& ps, const std::vector<Value>& binding) {
    return ps.var >= 0 ? binding[ps.var] : ps.value;
  }

  std::size_t Estimate(const Item& item, const std::vector<Value>& binding) const {
    if (item.is_table) return item.table->rows.size();
    Value s = Resolve(item.s, binding), p = Resolve(item.p, binding), o = Resolve(item.o, binding);
    if ((s != kUnbound && s < 0) || (p != kUnbound && p < 0) || (o != kUnbound && o < 0)) return 0;
    auto id = [](Value v) { return static_cast<TermId>(v); };
    if (s != kUnbound && p != kUnbound && o != kUnbound) return 1;
    if (s != kUnbound && p != kUnbound) return store_.Objects(id(s), id(p)).size();
    if (p != kUnbound && o != kUnbound) return store_.Subjects(id(p), id(o)).size();
    if (s != kUnbound) return store_.BySubject(id(s)).size();
    if (o != kUnbound) return store_.ByObject(id(o)).size();
    if (p != kUnbound) return store_.ByPredicate(id(p)).size();
    return store_.size();
  }

  using Emit = std::function<bool(const std::vector<Value>&)>;

  // Binds `slot` to `v`; returns false on conflict. Records newly bound slots.
  static bool Bind(int slot, Value v, std::vector<Value>* binding, std::vector<int>* bound) {
    if (slot < 0) return true;
    Value& cur = (*binding)[slot];
    if (cur == kUnbound) {
      cur = v;
      bound->push_back(slot);
      return true;
    }
    return cur == v;
  }

  bool FiltersHold(const Problem& prob, const std::vector<Value>& binding,
                   std::vector<bool>* checked, std::vector<int>* newly, bool final_pass) {
    for (std::size_t f = 0; f < prob.filters.size(); ++f) {
      if ((*checked)[f]) continue;
      bool ready = true;
      for (int s : prob.filter_slots[f]) {
        if (binding[s] == kUnbound) ready = false;
      }
      if (!ready && !final_pass) continue;
      (*checked)[f] = true;
      newly->push_back(static_cast<int>(f));
      if (!EvalExpr(*prob.filters[f], prob, binding)) return false;
    }
    return true;
  }

  // Returns false when the emitter asked to stop.
  bool Recurse(const Problem& prob, std::vector<Value>* binding, std::vector<bool>* done,
               std::vector<bool>* checked, std::size_t remaining, const Emit& emit) {
    std::vector<int> newly;
    bool ok = FiltersHold(prob, *binding, checked, &newly, remaining == 0);
    bool keep_going = true;
    if (ok) {
      if (remaining == 0) {
        keep_going = emit(*binding);
      } else {
        keep_going = ExpandBest(prob, binding, done, checked, remaining, emit);
      }
    }
    for (int f : newly) (*checked)[f] = false;
    return keep_going;
  }

  bool ExpandBest(const Problem& prob, std::vector<Value>* binding, std::vector<bool>* done,
                  std::vector<bool>* checked, std::size_t remaining, const Emit& emit) {
    int best = -1;
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < prob.items.size(); ++i) {
      if ((*done)[i]) continue;
      std::size_t c = Estimate(prob.items[i], *binding);
      if (best < 0 || c < best_count) {
        best = static_cast<int>(i);
        best_count = c;
      }
    }
    if (best_count == 0) return true;
    const Item& item = prob.items[best];
    (*done)[best] = true;
    bool keep_going = true;
    auto attempt = [&](std::initializer_list<std::pair<int, Value>> assignment) {
      Step();
      std::vector<int> bound;
      bool consistent = true;
      for (auto [slot, v] : assignment) {
        if (!Bind(slot, v, binding, &bound)) {
          consistent = false;
          break;
        }
      }
      if (consistent) keep_going = Recurse(prob, binding, done, checked, remaining - 1, emit);
      for (int s : bound) (*binding)[s] = kUnbound;
    };
    if (item.is_table) {
      for (const auto& row : item.table->rows) {
        Step();
        std::vector<int> bound;
        bool consistent = true;
        for (std::size_t c = 0; c < row.size() && consistent; ++c) {
          consistent = Bind(item.table_slots[c], row[c], binding, &bound);
        }
        if (consistent) keep_going = Recurse(prob, binding, done, checked, remaining - 1, emit);
        for (int s : bound) (*binding)[s] = kUnbound;
        if (!keep_going) break;
      }
    } else {
      Value s = Resolve(item.s, *binding), p = Resolve(item.p, *binding),
            o = Resolve(item.o, *binding);
      auto id = [](Value v) { return static_cast<TermId>(v); };
      if (s != kUnbound && p != kUnbound && o != kUnbound) {
        if (store_.Contains(id(s), id(p), id(o))) attempt({});
      } else if (s != kUnbound && p != kUnbound) {
        for (TermId x : store_.Objects(id(s), id(p))) {
          attempt({{item.o.var, x}});
          if (!keep_going) break;
        }
      } else if (p != kUnbound && o != kUnbound) {
        for (TermId x : store_.Subjects(id(p), id(o))) {
          attempt({{item.s.var, x}});
          if (!keep_going) break;
        }
      } else if (s != kUnbound) {
        for (auto [pp, oo] : store_.BySubject(id(s))) {
          if (o != kUnbound && oo != o) continue;
          attempt({{item.p.var, pp}, {item.o.var, oo}});
          if (!keep_going) break;
        }
      } else if (o != kUnbound) {
        for (auto [ss, pp] : store_.ByObject(id(o))) {
          attempt({{item.s.var, ss}, {item.p.var, pp}});
          if (!keep_going) break;
        }
      } else if (p != kUnbound) {
        for (auto [ss, oo] : store_.ByPredicate(id(p))) {
          attempt({{item.s.var, ss}, {item.o.var, oo}});
          if (!keep_going) break;
        }
      } else {
        for (const Triple& t : store_.triples()) {
          attempt({{item.s.var, t.s}, {item.p.var, t.p}, {item.o.var, t.o}});
          if (!keep_going) break;
        }
      }
    }
    (*done)[best] = false;
    return keep_going;
  }

  void Search(const Problem& prob, std::vector<Value>* binding, const Emit& emit) {
    if (prob.impossible) return;
    std::vector<bool> done(prob.items.size(), false);
    std::vector<bool> checked(prob.filters.size(), false);
    Recurse(prob, binding, &done, &checked, prob.items.size(), emit);
  }

  // ---- blocks -------------------------------------------------------------

  Table EvalSubquery(const Block& b) { return EvalBlock(b); }

  Table EvalBlock(const Block& b) {
    std::vector<Table> subtables;
    for (const Block& sub : b.subqueries) subtables.push_back(EvalSubquery(sub));
    Problem prob = Compile(b.triples, b.filters, subtables, {});
    std::vector<Value> binding(prob.vars.size(), kUnbound);
    std::set<std::vector<Value>> solutions;
    Search(prob, &binding, [&](const std::vector<Value>& sol) {
      solutions.insert(sol);
      return true;
    });
    auto slot_of = [&](const std::string& v) {
      auto it = prob.slot.find(v);
      return it == prob.slot.end() ? -1 : it->second;
    };

    Table out;
    if (b.aggregate) {
      out.vars = {b.aggregate->alias};
      int slot = slot_of(b.aggregate->arg);
      std::vector<Value> values;
      for (const auto& sol : solutions) {
        if (slot >= 0 && sol[slot] != kUnbound) values.push_back(sol[slot]);
      }
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      const std::string& fn = b.aggregate->function;
      if (fn == "COUNT") {
        auto lit = *Literal::Make(LiteralKind::kInt, std::to_string(values.size()));
        out.rows.push_back({LiteralValue(lit)});
      } else if (!values.empty()) {
        Value best = kUnbound;
        for (Value v : values) {
          if (!LiteralOf(v)) {
            if (!Fail(fn + " over a non-literal value " + Text(v))) continue;
          }
          if (best == kUnbound) {
            best = v;
            continue;
          }
          if (!Literal::Comparable(*LiteralOf(v), *LiteralOf(best))) {
            Fail(fn + " over incomparable values");
            continue;
          }
          int c = Literal::Compare(*LiteralOf(v), *LiteralOf(best));
          if ((fn == "MAX" && c > 0) || (fn == "MIN" && c < 0)) best = v;
        }
        if (best != kUnbound) out.rows.push_back({best});
      }
      return out;
    }

    out.vars = b.projection;
    std::vector<int> slots;
    for (const std::string& v : out.vars) slots.push_back(slot_of(v));
    std::vector<std::vector<Value>> ordered(solutions.begin(), solutions.end());
    auto project = [&](const std::vector<Value>& sol) {
      std::vector<Value> row;
      for (int s : slots) row.push_back(s >= 0 ? sol[s] : kUnbound);
      return row;
    };
    auto row_less = [&](const std::vector<Value>& a, const std::vector<Value>& c) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == c[i]) continue;
        if (a[i] == kUnbound) return true;
        if (c[i] == kUnbound) return false;
        int r = OrderCompare(a[i], c[i]);
        if (r != 0) return r < 0;
      }
      return false;
    };
    if (b.order) {
      int key = slot_of(b.order->var);
      bool asc = b.order->ascending;
      std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& x, const auto& y) {
        if (key >= 0 && x[key] != y[key]) {
          if (x[key] == kUnbound) return true;
          if (y[key] == kUnbound) return false;
          int r = OrderCompare(x[key], y[key]);
          if (r != 0) return asc ? r < 0 : r > 0;
        }
        return row_less(project(x), project(y));
      });
      std::set<std::vector<Value>> seen;
      for (const auto& sol : ordered) {
        auto row = project(sol);
        if (!seen.insert(row).second) continue;
        out.rows.push_back(std::move(row));
        if (b.limit && static_cast<std::int64_t>(out.rows.size()) >= *b.limit) break;
      }
      return out;
    }
    std::set<std::vector<Value>> seen;
    for (const auto& sol : ordered) {
      auto row = project(sol);
      if (seen.insert(row).second) out.rows.push_back(std::move(row));
    }
    std::sort(out.rows.begin(), out.rows.end(), row_less);
    return out;
  }

  Value LiteralValue(const Literal& lit) {
    std::string surface = lit.Surface();
    if (auto id = store_.Find(surface)) return *id;
    return Const(surface, lit);
  }

  const TripleStore& store_;
  EvalOptions opt_;
  EvalStats* stats_;
  std::uint64_t steps_ = 0;
  std::vector<Constant> consts_;
  std::map<std::string, Value> const_ids_;
};

}  // namespace

bool Ask(const TripleStore& store, const Query& q, const EvalOptions& options, EvalStats* stats) {
  return Evaluator(store, options, stats).AskBlock(q.where);
}

ResultTable Select(const TripleStore& store, const Query& q, const EvalOptions& options,
                   EvalStats* stats) {
  if (q.intent == sparql::Intent::kAsk) {
    throw Error(ErrorCode::kInvalidArgument, "Select needs a SELECT program");
  }
  return Evaluator(store, options, stats).SelectMain(q.where);
}

std::set<std::string> Answers(const TripleStore& store, const Query& q,
                              const EvalOptions& options) {
  if (q.intent == sparql::Intent::kAsk) {
    return {Ask(store, q, options) ? "true" : "false"};
  }
  return Select(store, q, options).FirstColumn();
}

}  // namespace qgforge
