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
 * \file candidates/candidates.h
 * \brief Candidate instance pools: closed sets, extracted values, gold
 * entities and ranked relations/types.
 */
#ifndef QGFORGE_CANDIDATES_CANDIDATES_H_
#define QGFORGE_CANDIDATES_CANDIDATES_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "graph/graph.h"
#include "kg/store.h"

namespace qgforge {

inline constexpr int kDefaultRelTopK = 50;
inline constexpr int kDefaultTypeTopK = 3;
/*! \brief Sentinel candidate that stands for "no type is mentioned". */
inline constexpr std::string_view kNoneType = "NONE";

struct CandidatePool {
  std::vector<std::string> ent;
  std::vector<std::string> rel;
  std::vector<std::string> type;
  std::vector<std::string> val;
  std::vector<std::string> ord;
  std::vector<std::string> cmp;
  std::vector<std::string> agg;
  /*! \brief Display text used to encode an instance (entity labels); falls back to the id. */
  std::map<std::string, std::string> text;

  /*! \brief Candidates for a vertex class (empty for Ans/Var). */
  const std::vector<std::string>& ForVertex(VertexClass c) const;
  const std::vector<std::string>& ForEdge(EdgeClass c) const;
  std::string TextOf(const std::string& instance) const;

  std::string ToJson(int indent = -1) const;
  static CandidatePool FromJson(std::string_view text);
};

struct Builtins {
  std::vector<std::string> ord;
  std::vector<std::string> cmp;
  std::vector<std::string> agg;
};

Builtins EnumerateBuiltins();

/*!
 * \brief Literal surfaces found in a question, left to right, deduplicated.
 *
 * Recognizes quoted strings, ISO dates, decimals and integers. A four-digit
 * number between 1000 and 2999 is read as a year (a date literal) and also
 * as an integer.
 */
std::vector<std::string> ExtractValues(std::string_view question);

/*!
 * \brief Entity ids of a program (non-type IRIs in subject/object position),
 * deduplicated in first-occurrence order.
 * \throws Error(kSyntax) on unparsable text.
 */
std::vector<std::string> GoldEntities(std::string_view sparql);

/*!
 * \brief Mean-pooled token embeddings scored by dot product.
 *
 * One embedding table is shared between questions and candidates; the score
 * of a pair is mean(E[question tokens]) . mean(E[candidate tokens]).
 */
class Ranker {
 public:
  Ranker() = default;
  Ranker(std::vector<std::string> vocab, int dim, std::uint64_t seed);

  int dim() const { return dim_; }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::vector<float>& weights() { return weights_; }
  const std::vector<float>& weights() const { return weights_; }

  double Score(std::string_view question, std::string_view candidate) const;

  /*!
   * \brief Top-k candidates by score (nonincreasing), ties broken by name.
   */
  std::vector<std::string> Rank(std::string_view question,
                                const std::vector<std::string>& candidates, int k) const;

  struct Example {
    std::string question;
    std::vector<std::string> positives;
  };

  /*!
   * \brief Hinge-loss training: max(0, margin - s(q, r+) + s(q, r-)) with
   * negatives drawn uniformly from the non-positive candidates.
   * \return mean loss per epoch.
   * \throws Error(kData) when an example has no positive.
   */
  std::vector<double> Train(const std::vector<Example>& examples,
                            const std::vector<std::string>& candidates, int epochs,
                            std::uint64_t seed, double lr = 0.05);

  static constexpr double kMargin = 0.5;
  static constexpr int kNegatives = 10;

 private:
  std::vector<int> Ids(std::string_view text, bool instance) const;
  std::vector<double> Mean(const std::vector<int>& ids) const;

  int dim_ = 0;
  std::vector<std::string> vocab_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<float> weights_;
};

/*! \brief Relations of the store ranked for a question. */
std::vector<std::string> RankRelations(const Ranker& ranker, std::string_view question,
                                       const TripleStore& kg, int k);

/*!
 * \brief Types of the store plus NONE ranked for a question; empty when NONE
 * ranks first or the store has no types.
 */
std::vector<std::string> RankTypes(const Ranker& ranker, std::string_view question,
                                   const TripleStore& kg, int k);

struct PoolOptions {
  int rel_top_k = kDefaultRelTopK;
  int type_top_k = kDefaultTypeTopK;
};

/*!
 * \brief Candidate pool of a question: closed sets, extracted values plus the
 * literal 1 (implicit ordinal limit), gold entities, ranked relations and types.
 */
CandidatePool BuildPool(std::string_view question, const std::vector<std::string>& entities,
                        const TripleStore& kg, const Ranker& rel_ranker,
                        const Ranker& type_ranker, const PoolOptions& options = {});

/*! \brief Adds every instance of \p gold missing from the pool (training only). */
void ForceGold(const QueryGraph& gold, CandidatePool* pool);

}  // namespace qgforge

#endif  // QGFORGE_CANDIDATES_CANDIDATES_H_
