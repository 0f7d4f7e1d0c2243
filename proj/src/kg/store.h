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
 * \file kg/store.h
 * \brief In-memory triple store and its evaluator for the supported SPARQL subset.
 *
 * Triple files hold one triple per line: three whitespace-separated fields,
 * an optional trailing '.', and '#' comments. IRIs may be written bare or in
 * angle brackets; literals are quoted with an optional ^^int, ^^dec, ^^date or
 * ^^str suffix (default str).
 *
 * For every subject carrying both halves of an interval relation pair
 * (r.from / r.to, r.start_date / r.end_date) the store also holds synthetic
 * triples (s, "r.from$$$r.to", interval) for each combination of endpoints, so
 * that combined relations can be queried directly.
 */
#ifndef QGFORGE_KG_STORE_H_
#define QGFORGE_KG_STORE_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "common/literal.h"
#include "sparql/ast.h"

namespace qgforge {

using TermId = std::int32_t;

struct Triple {
  TermId s;
  TermId p;
  TermId o;
  auto operator<=>(const Triple&) const = default;
};

struct Interval {
  Literal start;
  Literal end;
};

class TripleStore {
 public:
  /*! \throws Error(kIo) or Error(kParse) naming the offending line. */
  static TripleStore Load(const std::string& path);
  static TripleStore FromText(std::string_view text, std::string_view source = "<text>");
  /*! \brief Builds a store from (subject, predicate, object) strings in file field syntax. */
  static TripleStore FromTriples(const std::vector<std::array<std::string, 3>>& triples);

  /*! \brief Loaded triples, duplicates removed (synthetic interval triples excluded). */
  std::size_t num_loaded() const { return num_loaded_; }
  /*! \brief All triples including the synthetic interval ones. */
  std::size_t size() const { return triples_.size(); }
  const std::vector<Triple>& triples() const { return triples_; }

  std::optional<TermId> Find(std::string_view text) const;
  const std::string& Text(TermId id) const { return terms_[id]; }
  const std::optional<Literal>& LiteralOf(TermId id) const { return literals_[id]; }
  const std::optional<Interval>& IntervalOf(TermId id) const { return intervals_[id]; }
  std::size_t num_terms() const { return terms_.size(); }

  /*! \brief Distinct predicates (including combined interval relations), sorted. */
  const std::vector<std::string>& Relations() const { return relations_; }
  /*! \brief Distinct objects of type relations, sorted. */
  const std::vector<std::string>& Types() const { return types_; }
  /*! \brief Distinct non-literal subjects and objects, sorted. */
  const std::vector<std::string>& Entities() const { return entities_; }
  /*! \brief Human-readable name of an entity (its label/name literal), or the id itself. */
  std::string Label(std::string_view entity) const;

  // Index lookups; every result list is sorted.
  const std::vector<TermId>& Objects(TermId s, TermId p) const;
  const std::vector<TermId>& Subjects(TermId p, TermId o) const;
  const std::vector<std::pair<TermId, TermId>>& ByPredicate(TermId p) const;
  const std::vector<std::pair<TermId, TermId>>& BySubject(TermId s) const;
  const std::vector<std::pair<TermId, TermId>>& ByObject(TermId o) const;
  bool Contains(TermId s, TermId p, TermId o) const;

 private:
  TermId Intern(const std::string& text, std::optional<Literal> literal);
  void Finalize();

  std::vector<std::string> terms_;
  std::vector<std::optional<Literal>> literals_;
  std::vector<std::optional<Interval>> intervals_;
  std::unordered_map<std::string, TermId> ids_;
  std::vector<Triple> triples_;
  std::size_t num_loaded_ = 0;
  std::vector<std::string> relations_;
  std::vector<std::string> types_;
  std::vector<std::string> entities_;
  std::unordered_map<std::uint64_t, std::vector<TermId>> sp_;
  std::unordered_map<std::uint64_t, std::vector<TermId>> po_;
  std::unordered_map<TermId, std::vector<std::pair<TermId, TermId>>> p_;
  std::unordered_map<TermId, std::vector<std::pair<TermId, TermId>>> s_;
  std::unordered_map<TermId, std::vector<std::pair<TermId, TermId>>> o_;
};

struct EvalOptions {
  /*! \brief When false, comparisons between incomparable values drop the solution. */
  bool strict = true;
  /*! \brief Maximum number of candidate bindings tried; 0 disables the budget. */
  std::uint64_t step_budget = 0;
};

struct EvalStats {
  std::uint64_t steps = 0;
};

struct ResultTable {
  std::vector<std::string> columns;
  /*! \brief Rows in deterministic order: ORDER BY order when present, else sorted. */
  std::vector<std::vector<std::string>> rows;

  /*! \brief Values of the first column. */
  std::set<std::string> FirstColumn() const;
};

/*!
 * \brief True iff the main pattern of \p q has a solution (main-block
 * aggregate and ordering are ignored).
 * \throws Error(kEval) on incomparable values in strict mode,
 * Error(kBudgetExceeded) when the step budget runs out.
 */
bool Ask(const TripleStore& store, const sparql::Query& q, const EvalOptions& options = {},
         EvalStats* stats = nullptr);

/*! \brief Full solution table of a SELECT program. */
ResultTable Select(const TripleStore& store, const sparql::Query& q,
                   const EvalOptions& options = {}, EvalStats* stats = nullptr);

/*! \brief Answer set: the first column of Select, or {"true"}/{"false"} for ASK. */
std::set<std::string> Answers(const TripleStore& store, const sparql::Query& q,
                              const EvalOptions& options = {});

}  // namespace qgforge

#endif  // QGFORGE_KG_STORE_H_
