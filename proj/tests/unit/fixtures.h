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

/*!
 * \file unit/fixtures.h
 * \brief Shared inputs of the unit tests.
 */
#ifndef QGFORGE_TESTS_UNIT_FIXTURES_H_
#define QGFORGE_TESTS_UNIT_FIXTURES_H_

#include <functional>
#include <string>
#include <vector>

#include <doctest.h>

#include "candidates/candidates.h"
#include "common/error.h"
#include "kg/store.h"
#include "nn/model.h"
#include "nn/train.h"
#include "sparql/bridge.h"
#include "supervision/supervision.h"
#include "support/corpus.h"

namespace qgforge {
namespace testing {

/*!
 * \brief Nested program counting the films of the actor who played a
 * character in that character's earliest film. It has one ordered subquery,
 * a COUNT selection and entities and relations repeated across segments.
 */
inline constexpr const char* kRunningExample = R"(PREFIX ns: <http://rdf.freebase.com/ns/>
SELECT (COUNT(DISTINCT ?f1) AS ?x) WHERE {
  ns:m.0f2y0 ns:film.film_character.portrayed_in_films ?y1 .
  ?y1 ns:film.performance.actor ns:m.010gnrn8 .
  ?y1 ns:film.performance.film ?f1 .
  { SELECT ?f WHERE {
      ns:m.0f2y0 ns:film.film_character.portrayed_in_films ?y2 .
      ?y2 ns:film.performance.film ?f .
      ?f ns:film.film.initial_release_date ?d .
    } ORDER BY ASC(?d) LIMIT 1 }
  FILTER (?f1 = ?f)
}
)";

/*! \brief The toy film graph, built once. */
inline const TripleStore& ToyKg() {
  static const TripleStore kg = TripleStore::FromText(ToyKgText());
  return kg;
}

/*! \brief Code of the Error thrown by \p fn; fails the test when nothing is thrown. */
inline ErrorCode ThrownCode(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::kInvalidArgument;
}

/*!
 * \brief Training triples over the toy corpus. Pools hold the gold instances
 * plus a few distractor relations so every fill has a choice.
 */
inline std::vector<nn::TrainExample> MakeExamples(int n, std::uint64_t seed) {
  std::vector<nn::TrainExample> out;
  std::vector<std::string> rels = ToyKg().Relations();
  for (const Example& ex : ToyQaCorpus(ToyKg(), n, seed, "nn-")) {
    QueryGraph gold = sparql::ConvertProgram(ex.sparql);
    nn::TrainExample t{ex.id, ex.question, BuildSignals(gold), {}};
    Builtins b = EnumerateBuiltins();
    t.pool.ord = b.ord;
    t.pool.cmp = b.cmp;
    t.pool.agg = b.agg;
    t.pool.ent = GoldEntities(ex.sparql);
    t.pool.val = ExtractValues(ex.question);
    for (std::size_t i = 0; i < rels.size() && i < 3; ++i) t.pool.rel.push_back(rels[i]);
    ForceGold(gold, &t.pool);
    out.push_back(std::move(t));
  }
  return out;
}

/*! \brief Untrained scorer whose vocabulary covers \p examples. */
inline nn::Model MakeModel(const std::vector<nn::TrainExample>& examples, int dim, std::uint64_t seed) {
  std::vector<std::string> questions, texts;
  for (const auto& ex : examples) {
    questions.push_back(ex.question);
    for (const auto* v : {&ex.pool.ent, &ex.pool.rel, &ex.pool.val, &ex.pool.type, &ex.pool.cmp}) {
      texts.insert(texts.end(), v->begin(), v->end());
    }
  }
  return nn::Model(nn::BuildVocabulary(questions, texts), {dim, seed});
}

}  // namespace testing
}  // namespace qgforge

#endif  // QGFORGE_TESTS_UNIT_FIXTURES_H_
