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

#include <string>
#include <vector>

#include "sparql/ast.h"
#include "search/search.h"
#include "sparql/bridge.h"
#include "support/oracles.h"
#include "unit/fixtures.h"

namespace qgforge {
namespace testing {
namespace {

using sparql::Intent;
using sparql::Query;
using VC = VertexClass;
using EC = EdgeClass;

std::vector<ProgramCase> Programs() {
  static const std::vector<ProgramCase> programs = ToyPrograms(ToyKg(), 120, 5);
  return programs;
}

bool HasCmp(const Graph& g, const std::string& op) {
  for (const Edge& e : g.edges) {
    if (e.cls == EC::kCmp && e.instance == op) return true;
  }
  return false;
}

std::string Int(int v) { return "\"" + std::to_string(v) + "\"^^int"; }

}  // namespace

TEST_CASE("nested counting program parses into one ordered subquery") {
  Query q = sparql::Parse(kRunningExample);
  CHECK(q.intent == Intent::kSelect);
  REQUIRE(q.where.aggregate.has_value());
  CHECK(q.where.aggregate->function == "COUNT");
  CHECK(q.where.aggregate->distinct);
  REQUIRE(q.where.subqueries.size() == 1);
  const sparql::Block& sub = q.where.subqueries[0];
  REQUIRE(sub.order.has_value());
  CHECK(sub.order->ascending);
  CHECK(sub.limit == 1);
  CHECK(q.where.triples[0].s.value == "m.0f2y0");
}

TEST_CASE("minimal ASK program") {
  Query q = sparql::Parse("ASK WHERE { ?x <r> <e> }");
  CHECK(q.intent == Intent::kAsk);
  CHECK(q.where.triples.size() == 1);
  CHECK(q.where.triples[0].p.value == "r");
}

TEST_CASE("constructs outside the subset are rejected") {
  for (const char* text : {"SELECT ?x WHERE { { ?x <r> <e> } UNION { ?x <q> <e> } }",
                           "SELECT ?x WHERE { ?x <r> <e> OPTIONAL { ?x <q> ?y } }",
                           "SELECT * WHERE { ?x <r> <e> }"}) {
    CHECK(ThrownCode([&] { sparql::Parse(text); }) == ErrorCode::kUnsupportedFeature);
  }
}

TEST_CASE("syntax errors carry a position") {
  try {
    sparql::Parse("SELECT ?x WHERE {\n  ?x <r> \n}");
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSyntax);
    CHECK(e.line() >= 2);
    CHECK(e.column() >= 1);
  }
}

TEST_CASE("printing and parsing are inverse on the program corpus") {
  for (const ProgramCase& p : Programs()) {
    Query q = sparql::Parse(p.sparql);
    CHECK_MESSAGE(sparql::Parse(sparql::Print(q)) == q, p.sparql);
  }
}

TEST_CASE("interval pairs fold into combined relations with a DURING link") {
  const char* text = R"(PREFIX ns: <http://example.org/ns/>
SELECT DISTINCT ?x WHERE {
  ?x ns:film.film.production.from ?fs .
  ?x ns:film.film.production.to ?fe .
  ns:m.p12 ns:people.person.employment.from ?ps .
  ns:m.p12 ns:people.person.employment.to ?pe .
  FILTER (?ps <= ?fs && ?fe <= ?pe)
})";
  QueryGraph g = sparql::ConvertProgram(text);
  CHECK(HasCmp(g, "DURING"));
  int combined = 0;
  for (const Edge& e : g.edges) {
    if (e.instance && e.instance->find("$$$") != std::string::npos) ++combined;
  }
  CHECK(combined == 2);
  CHECK(g.num_vertices() == 4);
  CHECK(g.edges.size() == 3);
  // Serialization splits the pairs again and restores the endpoint comparisons.
  std::string back = sparql::ToSparql(g, Intent::kSelect);
  CHECK(back.find("$$$") == std::string::npos);
  CHECK(back.find("film.film.production.to") != std::string::npos);
  CHECK(Answers(ToyKg(), sparql::Parse(back)) == Answers(ToyKg(), sparql::Parse(text)));
}

TEST_CASE("programs without interval filters are left alone by the interval rewrite") {
  Query q = sparql::Parse(Programs()[0].sparql);
  CHECK(sparql::CombineIntervals(q) == q);
}

TEST_CASE("combined interval comparisons agree with endpoint arithmetic on all small intervals") {
  // a spans [s1, e1] and b spans [s2, e2]; both folds are checked against
  // the direct endpoint formulas, before and after the rewrite.
  const std::string during = R"(ASK WHERE {
  <a> <e.span.from> ?s1 . <a> <e.span.to> ?e1 .
  <b> <e.span.from> ?s2 . <b> <e.span.to> ?e2 .
  FILTER (?s2 <= ?s1 && ?e1 <= ?e2) })";
  const std::string overlap = R"(ASK WHERE {
  <a> <e.span.from> ?s1 . <a> <e.span.to> ?e1 .
  <b> <e.span.from> ?s2 . <b> <e.span.to> ?e2 .
  FILTER (?s1 <= ?e2 && ?s2 <= ?e1) })";
  Query qd = sparql::Parse(during), qo = sparql::Parse(overlap);
  Query cd = sparql::CombineIntervals(qd), co = sparql::CombineIntervals(qo);
  CHECK_FALSE(cd == qd);
  CHECK(sparql::PrintExpr(cd.where.filters.at(0)).find("DURING") != std::string::npos);
  CHECK(sparql::PrintExpr(co.where.filters.at(0)).find("OVERLAP") != std::string::npos);
  int cases = 0, during_true = 0, overlap_true = 0;
  for (int s1 = 0; s1 <= 5; ++s1) {
    for (int e1 = 0; e1 <= 5; ++e1) {
      for (int s2 = 0; s2 <= 5; ++s2) {
        for (int e2 = 0; e2 <= 5; ++e2) {
          TripleStore kg = TripleStore::FromTriples({{"a", "e.span.from", Int(s1)},
                                                     {"a", "e.span.to", Int(e1)},
                                                     {"b", "e.span.from", Int(s2)},
                                                     {"b", "e.span.to", Int(e2)}});
          bool want_d = s1 >= s2 && e1 <= e2;
          bool want_o = s1 <= e2 && e1 >= s2;
          CHECK(Ask(kg, qd) == want_d);
          CHECK(Ask(kg, cd) == want_d);
          CHECK(Ask(kg, qo) == want_o);
          CHECK(Ask(kg, co) == want_o);
          during_true += want_d;
          overlap_true += want_o;
          ++cases;
        }
      }
    }
  }
  CHECK(cases == 1296);
  CHECK(during_true > 0);
  CHECK(during_true < cases);
  CHECK(overlap_true > 0);
  CHECK(overlap_true < cases);
}

TEST_CASE("answer-variable subqueries merge without changing results") {
  int merged = 0;
  for (const ProgramCase& p : Programs()) {
    Query q = sparql::Parse(p.sparql);
    Query m = sparql::MergeXIntention(q);
    if (p.category == "x-intention") {
      CHECK(m.where.subqueries.empty());
      ++merged;
    }
    CHECK_MESSAGE(Answers(ToyKg(), m) == Answers(ToyKg(), q), p.sparql);
  }
  CHECK(merged > 0);
  Query flat = sparql::Parse("SELECT ?x WHERE { ?x <r> <e> }");
  CHECK(sparql::MergeXIntention(flat) == flat);
}

TEST_CASE("optional-style EXISTS filters reduce to their constraint") {
  int stripped = 0;
  for (const ProgramCase& p : Programs()) {
    Query q = sparql::Parse(p.sparql);
    Query s = sparql::StripExists(q);
    if (p.category == "exists") {
      CHECK_FALSE(s == q);
      for (const sparql::Expr& f : s.where.filters) {
        CHECK(sparql::PrintExpr(f).find("EXISTS") == std::string::npos);
      }
      ++stripped;
    } else {
      CHECK(s == q);
    }
    // Every film has a release date, so the guarded pattern always holds.
    CHECK_MESSAGE(Answers(ToyKg(), s) == Answers(ToyKg(), q), p.sparql);
  }
  CHECK(stripped > 0);
  CHECK(ThrownCode([] {
          sparql::StripExists(sparql::Parse("SELECT ?x WHERE { ?x <r> ?y . FILTER (EXISTS { ?y <q> <e> }) }"));
        }) == ErrorCode::kRewrite);
}

TEST_CASE("each rewrite is idempotent") {
  for (const ProgramCase& p : Programs()) {
    Query q = sparql::Parse(p.sparql);
    Query a = sparql::StripExists(q);
    CHECK(sparql::StripExists(a) == a);
    Query b = sparql::CombineIntervals(a);
    CHECK(sparql::CombineIntervals(b) == b);
    Query c = sparql::MergeXIntention(b);
    CHECK(sparql::MergeXIntention(c) == c);
    CHECK(sparql::Preprocess(q) == c);
  }
}

TEST_CASE("smallest program becomes one relation edge") {
  QueryGraph g = sparql::ConvertProgram("SELECT ?x WHERE { <e> <r> ?x }");
  REQUIRE(g.num_vertices() == 2);
  REQUIRE(g.num_edges() == 1);
  CHECK(g.vertices[g.AnswerVertex()].cls == VC::kAns);
  CHECK(g.vertices[1 - g.AnswerVertex()].cls == VC::kEnt);
  CHECK(g.edges[0].cls == EC::kRel);
  CHECK(g.edges[0].instance == "r");
}

TEST_CASE("cyclic patterns are not trees") {
  CHECK(ThrownCode([] { sparql::ConvertProgram("SELECT ?x WHERE { ?x <r> ?y . ?y <q> ?x }"); }) ==
        ErrorCode::kNonTree);
}

TEST_CASE("conversion then serialization preserves answers on the program corpus") {
  for (const ProgramCase& p : Programs()) {
    QueryGraph g = sparql::ConvertProgram(p.sparql);
    CHECK(Validate(g).ok());
    Query back = sparql::Parse(sparql::ToSparql(g, GraphIntent(g)));
    CHECK_MESSAGE(Answers(ToyKg(), back) == Answers(ToyKg(), sparql::Parse(p.sparql)), p.sparql);
  }
}

TEST_CASE("ASK form of a graph has a solution exactly when the original pattern does") {
  for (const ProgramCase& p : Programs()) {
    QueryGraph g = sparql::ConvertProgram(p.sparql);
    std::string ask = sparql::ToSparql(g, Intent::kAsk);
    CHECK(ask.rfind("ASK", 0) == 0);
    CHECK(ask.find("COUNT") == std::string::npos);
    CHECK_MESSAGE(Ask(ToyKg(), sparql::Parse(ask)) == Ask(ToyKg(), sparql::Parse(p.sparql)), p.sparql);
  }
  QueryGraph running = sparql::ConvertProgram(kRunningExample);
  std::string ask = sparql::ToSparql(running, Intent::kAsk);
  CHECK(ask.rfind("ASK", 0) == 0);
  CHECK(ask.find("COUNT") == std::string::npos);
  CHECK(ask.find("ORDER BY ASC") != std::string::npos);
}

TEST_CASE("an answer vertex alone cannot be serialized") {
  Graph g;
  g.AddVertex(VC::kAns, 0);
  CHECK(ThrownCode([&] { sparql::ToSparql(g, Intent::kSelect); }) == ErrorCode::kSerialization);
}

TEST_CASE("unfilled relation slots become predicate variables") {
  Graph g;
  g.AddVertex(VC::kAns, 0);
  g.AddVertex(VC::kEnt, 0, "m.f01");
  g.AddVertex(VC::kVar, 0);
  g.AddEdge(1, 0, EC::kRel);
  g.AddEdge(0, 2, EC::kRel);
  std::string text = sparql::ToSparql(g, Intent::kAsk);
  CHECK(text.find("?p1") != std::string::npos);
  CHECK(text.find("?p2") != std::string::npos);
  CHECK(Ask(ToyKg(), sparql::Parse(text)));
}

TEST_CASE("ordering triple encodes ORDER BY with LIMIT") {
  QueryGraph g = sparql::ConvertProgram("SELECT ?x WHERE { ?x <r> ?v } ORDER BY ASC(?v) LIMIT 3");
  bool found = false;
  for (const Edge& e : g.edges) {
    if (e.cls != EC::kOrd) continue;
    found = true;
    CHECK(e.instance == "ASC");
    CHECK(g.vertices[e.tail].cls == VC::kVal);
    CHECK(g.vertices[e.tail].instance == Int(3));
  }
  CHECK(found);
  std::string back = sparql::ToSparql(g, Intent::kSelect);
  CHECK(back.find("ORDER BY ASC(?v1) LIMIT 3") != std::string::npos);
  CHECK(QueryGraphEqual(sparql::ConvertProgram(back), g));
}

TEST_CASE("serialization round-trips random graphs up to 6 vertices") {
  int checked = 0, skipped = 0;
  for (const QueryGraph& g : RandomGraphs(500, 3)) {
    if (g.num_vertices() > 6) continue;
    std::string text;
    try {
      text = sparql::ToSparql(g, GraphIntent(g));
    } catch (const Error& e) {
      // Subquery links to a non-aggregate vertex of an aggregate segment.
      CHECK(e.code() == ErrorCode::kSerialization);
      ++skipped;
      continue;
    }
    QueryGraph back = sparql::ConvertProgram(text);
    CHECK_MESSAGE(CanonicalForm(back) == CanonicalForm(g), text);
    CHECK(OracleIsomorphic(back, g));
    ++checked;
  }
  CHECK(checked >= 100);
  CHECK(skipped * 20 <= checked);
}

TEST_CASE("repeated entities across segments become copy-links") {
  QueryGraph g = sparql::ConvertProgram(kRunningExample);
  REQUIRE(g.copies.vertex.size() == 1);
  auto [src, tgt] = *g.copies.vertex.begin();
  CHECK(g.vertices[src].instance == "m.0f2y0");
  CHECK(g.vertices[src].segment != g.vertices[tgt].segment);
}

TEST_CASE("answer variable of each intent") {
  CHECK(sparql::AnswerVariable(sparql::Parse("SELECT ?y WHERE { ?y <r> <e> }")) == "y");
  CHECK(sparql::AnswerVariable(sparql::Parse("SELECT (COUNT(?y) AS ?c) WHERE { ?y <r> <e> }")) == "y");
  CHECK(sparql::AnswerVariable(sparql::Parse("ASK WHERE { ?z <r> ?x }")) == "x");
  CHECK(sparql::AnswerVariable(sparql::Parse("ASK WHERE { ?z <r> ?w }")) == "z");
  CHECK(sparql::SplitIntervalRelation("a.from$$$a.to") ==
        std::pair<std::string, std::string>{"a.from", "a.to"});
  CHECK_FALSE(sparql::SplitIntervalRelation("a.from").has_value());
  CHECK(sparql::IntervalEndRelation("x.start_date") == "x.end_date");
}

}  // namespace testing
}  // namespace qgforge
