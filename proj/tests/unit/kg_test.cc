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
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kg/store.h"
#include "sparql/ast.h"
#include "unit/fixtures.h"

namespace qgforge {
namespace testing {
namespace {

using Triples = std::vector<std::array<std::string, 3>>;

std::string WriteTemp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("qgforge_kg_test_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path.string();
}

std::string Int(long v) { return "\"" + std::to_string(v) + "\"^^int"; }

// A triple pattern over raw strings; names starting with '?' are variables.
using Pattern = std::vector<std::array<std::string, 3>>;

std::string PatternText(const Pattern& p) {
  std::string out;
  for (const auto& t : p) {
    for (const std::string& x : t) out += (x[0] == '?' ? x : "<" + x + ">") + " ";
    out += ". ";
  }
  return out;
}

// Values of ?a over every assignment of the pattern variables to store terms.
std::set<std::string> BruteForce(const Triples& store, const Pattern& pattern) {
  std::set<std::array<std::string, 3>> facts(store.begin(), store.end());
  std::set<std::string> universe;
  for (const auto& t : store) universe.insert(t.begin(), t.end());
  std::vector<std::string> vars;
  for (const auto& t : pattern) {
    for (const std::string& x : t) {
      if (x[0] == '?' && std::find(vars.begin(), vars.end(), x) == vars.end()) vars.push_back(x);
    }
  }
  std::vector<std::string> terms(universe.begin(), universe.end());
  std::set<std::string> out;
  std::map<std::string, std::string> binding;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == vars.size()) {
      for (const auto& t : pattern) {
        std::array<std::string, 3> g;
        for (int k = 0; k < 3; ++k) g[k] = t[k][0] == '?' ? binding[t[k]] : t[k];
        if (!facts.count(g)) return;
      }
      out.insert(binding["?a"]);
      return;
    }
    for (const std::string& term : terms) {
      binding[vars[i]] = term;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_CASE("loading a three-line file") {
  std::string path = WriteTemp("three.txt",
                               "# people\n"
                               "<m.a> <r.knows> <m.b> .\n"
                               "m.b r.knows m.c\n"
                               "m.a r.age \"30\"^^int\n");
  TripleStore kg = TripleStore::Load(path);
  CHECK(kg.num_loaded() == 3);
  CHECK(kg.size() == 3);
  REQUIRE(kg.Find("\"30\"^^int").has_value());
  CHECK(kg.LiteralOf(*kg.Find("\"30\"^^int"))->integer() == 30);
  CHECK(kg.Relations() == std::vector<std::string>{"r.age", "r.knows"});
}

TEST_CASE("an empty file gives an empty store") {
  TripleStore kg = TripleStore::Load(WriteTemp("empty.txt", ""));
  CHECK(kg.size() == 0);
  CHECK(kg.num_loaded() == 0);
}

TEST_CASE("a malformed line is reported by number") {
  std::string path = WriteTemp("bad.txt", "m.a r.knows m.b\nm.a r.knows\nm.b r.knows m.c\n");
  try {
    TripleStore::Load(path);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  CHECK(ThrownCode([] { TripleStore::Load("/nonexistent/qgforge/kg.txt"); }) == ErrorCode::kIo);
}

TEST_CASE("duplicate triples are dropped") {
  TripleStore kg = TripleStore::FromText("a r b\na r b\n<a> <r> <b> .\n");
  CHECK(kg.num_loaded() == 1);
}

TEST_CASE("ask finds a matching triple and rejects a missing relation") {
  TripleStore kg = TripleStore::FromTriples({{"e", "r", "a"}});
  CHECK(Ask(kg, sparql::Parse("ASK WHERE { ?x <r> <a> }")));
  CHECK_FALSE(Ask(kg, sparql::Parse("ASK WHERE { ?x <q> <a> }")));
}

TEST_CASE("ask and select agree with brute-force enumeration on random stores") {
  std::mt19937_64 rng(13);
  const std::vector<std::string> ents = {"e0", "e1", "e2", "e3", "e4", "e5"};
  const std::vector<std::string> rels = {"r0", "r1", "r2"};
  const std::vector<std::string> vars = {"?a", "?b", "?c"};
  int nonempty = 0, empty = 0;
  for (int round = 0; round < 300; ++round) {
    Triples store;
    int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) {
      store.push_back({ents[rng() % ents.size()], rels[rng() % rels.size()], ents[rng() % ents.size()]});
    }
    Pattern pattern;
    int m = 1 + static_cast<int>(rng() % 4);
    auto node = [&](bool first) {
      if (first) return std::string("?a");
      return rng() % 3 == 0 ? ents[rng() % ents.size()] : vars[rng() % vars.size()];
    };
    for (int i = 0; i < m; ++i) {
      std::string s = node(i == 0), o = node(false);
      std::string p = rng() % 8 == 0 ? "?p" : rels[rng() % rels.size()];
      if (rng() % 2) std::swap(s, o);
      pattern.push_back({s, p, o});
    }
    TripleStore kg = TripleStore::FromTriples(store);
    std::set<std::string> want = BruteForce(store, pattern);
    std::string body = "WHERE { " + PatternText(pattern) + "}";
    CHECK_MESSAGE(Ask(kg, sparql::Parse("ASK " + body)) == !want.empty(), body);
    CHECK_MESSAGE(Answers(kg, sparql::Parse("SELECT DISTINCT ?a " + body)) == want, body);
    (want.empty() ? empty : nonempty)++;
  }
  CHECK(empty > 20);
  CHECK(nonempty > 20);
}

TEST_CASE("select returns every binding and COUNT counts them") {
  TripleStore kg = TripleStore::FromTriples({{"e", "r", "a"}, {"e", "r", "b"}});
  CHECK(Answers(kg, sparql::Parse("SELECT ?x WHERE { <e> <r> ?x }")) == std::set<std::string>{"a", "b"});
  CHECK(Answers(kg, sparql::Parse("SELECT (COUNT(?x) AS ?c) WHERE { <e> <r> ?x }")) ==
        std::set<std::string>{Int(2)});
}

TEST_CASE("ascending order with limit one keeps the minimum") {
  TripleStore kg = TripleStore::FromTriples(
      {{"a", "v", Int(3)}, {"b", "v", Int(1)}, {"c", "v", Int(2)}});
  CHECK(Answers(kg, sparql::Parse("SELECT ?n WHERE { ?s <v> ?n } ORDER BY ASC(?n) LIMIT 1")) ==
        std::set<std::string>{Int(1)});
}

TEST_CASE("ORDER BY with LIMIT matches sorting") {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 100; ++round) {
    Triples store;
    std::vector<long> values;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      long v = static_cast<long>(rng() % 2001) - 1000;
      values.push_back(v);
      store.push_back({"s" + std::to_string(i), "v", Int(v)});
    }
    bool asc = rng() % 2;
    int k = 1 + static_cast<int>(rng() % 4);
    std::vector<long> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (!asc) std::reverse(sorted.begin(), sorted.end());
    TripleStore kg = TripleStore::FromTriples(store);
    ResultTable t = Select(kg, sparql::Parse(std::string("SELECT ?n WHERE { ?s <v> ?n } ORDER BY ") +
                                             (asc ? "ASC" : "DESC") + "(?n) LIMIT " +
                                             std::to_string(k)));
    REQUIRE(t.rows.size() == std::min<std::size_t>(k, sorted.size()));
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i][0] == Int(sorted[i]));
  }
}

TEST_CASE("ask holds exactly when select has rows on the program corpus") {
  const TripleStore& kg = ToyKg();
  for (const ProgramCase& p : ToyPrograms(kg, 120, 5)) {
    sparql::Query q = sparql::Parse(p.sparql);
    if (q.intent == sparql::Intent::kAsk || q.where.aggregate) continue;
    CHECK_MESSAGE(Ask(kg, q) == !Select(kg, q).rows.empty(), p.sparql);
  }
}

TEST_CASE("adding triples never falsifies a filter-free ask") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> ents = {"e0", "e1", "e2", "e3"};
  const std::vector<std::string> rels = {"r0", "r1"};
  int checked = 0;
  for (int round = 0; round < 200; ++round) {
    Triples store;
    for (int i = 0; i < 6; ++i) {
      store.push_back({ents[rng() % 4], rels[rng() % 2], ents[rng() % 4]});
    }
    Pattern pattern = {{"?a", rels[rng() % 2], "?b"}, {"?b", rels[rng() % 2], rng() % 2 ? "?c" : ents[rng() % 4]}};
    sparql::Query q = sparql::Parse("ASK WHERE { " + PatternText(pattern) + "}");
    bool before = Ask(TripleStore::FromTriples(store), q);
    for (int i = 0; i < 4; ++i) store.push_back({ents[rng() % 4], rels[rng() % 2], ents[rng() % 4]});
    bool after = Ask(TripleStore::FromTriples(store), q);
    if (before) {
      CHECK(after);
      ++checked;
    }
  }
  CHECK(checked > 10);
}

TEST_CASE("interval endpoints are materialized as combined relations") {
  TripleStore kg = TripleStore::FromText(
      "m.f r.production.from \"1990\"^^date\n"
      "m.f r.production.to \"1995\"^^date\n");
  CHECK(kg.num_loaded() == 2);
  CHECK(kg.size() == 3);
  auto rel = kg.Find("r.production.from$$$r.production.to");
  REQUIRE(rel.has_value());
  const auto& pairs = kg.ByPredicate(*rel);
  REQUIRE(pairs.size() == 1);
  const auto& interval = kg.IntervalOf(pairs[0].second);
  REQUIRE(interval.has_value());
  CHECK(interval->start.lexical() == "1990");
  CHECK(interval->end.lexical() == "1995");
}

TEST_CASE("comparing literals of different kinds") {
  TripleStore kg = TripleStore::FromTriples({{"a", "v", Int(3)}, {"a", "w", "\"1990\"^^date"}});
  sparql::Query q = sparql::Parse("SELECT ?s WHERE { ?s <v> ?n . ?s <w> ?d . FILTER (?n < ?d) }");
  CHECK(ThrownCode([&] { Select(kg, q); }) == ErrorCode::kEval);
  EvalOptions lenient;
  lenient.strict = false;
  CHECK(Select(kg, q, lenient).rows.empty());
}

TEST_CASE("an exhausted step budget stops evaluation") {
  const TripleStore& kg = ToyKg();
  sparql::Query q = sparql::Parse("ASK WHERE { ?a ?p ?b . ?b ?q ?c . ?c ?r ?d . FILTER (?d = \"never\"^^str) }");
  EvalOptions options;
  options.step_budget = 50;
  options.strict = false;
  CHECK(ThrownCode([&] { Ask(kg, q, options); }) == ErrorCode::kBudgetExceeded);
  EvalStats stats;
  CHECK(Ask(kg, sparql::Parse("ASK WHERE { ?f <film.film.directed_by> ?p }"), {}, &stats));
  CHECK(stats.steps >= 1);
}

TEST_CASE("index lookups are consistent with the triple list") {
  const TripleStore& kg = ToyKg();
  for (const Triple& t : kg.triples()) {
    const auto& objs = kg.Objects(t.s, t.p);
    CHECK(std::binary_search(objs.begin(), objs.end(), t.o));
    const auto& subs = kg.Subjects(t.p, t.o);
    CHECK(std::binary_search(subs.begin(), subs.end(), t.s));
    CHECK(kg.Contains(t.s, t.p, t.o));
  }
  CHECK(std::is_sorted(kg.Relations().begin(), kg.Relations().end()));
  CHECK(kg.Label("m.f01") != "m.f01");
}

}  // namespace testing
}  // namespace qgforge
