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
 * \file sparql/bridge.h
 * \brief Program rewrites and the conversions between programs and query graphs.
 */
#ifndef QGFORGE_SPARQL_BRIDGE_H_
#define QGFORGE_SPARQL_BRIDGE_H_

#include <optional>
#include <string>
#include <string_view>

#include "graph/graph.h"
#include "sparql/ast.h"

namespace qgforge {
namespace sparql {

/*!
 * \brief Replaces FILTER(EXISTS{P . FILTER(C)} || NOT EXISTS{P}) by P and C.
 * \throws Error(kRewrite) for any other use of EXISTS.
 */
Query StripExists(const Query& q);

/*!
 * \brief Folds (r.from, r.to) and (r.start_date, r.end_date) pairs that are
 * compared with each other into "r_st$$$r_ed" relations to interval variables
 * linked by one DURING or OVERLAP comparison.
 * \throws Error(kRewrite) when the comparisons between two pairs match
 * neither expansion.
 */
Query CombineIntervals(const Query& q);

/*! \brief Inlines plain subqueries that project the answer variable. */
Query MergeXIntention(const Query& q);

/*! \brief StripExists, then CombineIntervals, then MergeXIntention. */
Query Preprocess(const Query& q);

/*!
 * \brief Variable the answer vertex is derived from: the projected variable,
 * the aggregate argument, or for ASK the variable named x (else the first
 * variable of the main block).
 */
std::optional<std::string> AnswerVariable(const Query& q);

/*! \brief Splits "a$$$b" into its two relations when it names a valid pair. */
std::optional<std::pair<std::string, std::string>> SplitIntervalRelation(std::string_view rel);
/*! \brief Partner of an interval start relation (x.from -> x.to), if any. */
std::optional<std::string> IntervalEndRelation(std::string_view start_rel);

/*!
 * \brief Builds the query graph of a preprocessed program.
 * \throws Error(kNonTree) when |V| != |E| + 1, Error(kUnsupportedFeature)
 * for shapes without a graph encoding, Error(kValidation) otherwise.
 */
QueryGraph ToQueryGraph(const Query& q);

/*! \brief Parse, Preprocess and ToQueryGraph in one call. */
QueryGraph ConvertProgram(std::string_view text);

/*!
 * \brief Builds a program from a (possibly partially filled) graph.
 *
 * Unfilled Rel slots become predicate variables ?p1..?pm; other unfilled
 * edge slots are left out. With Intent::kAsk the main block's aggregate and
 * ordering are dropped. A graph with an ASK aggregate always yields ASK.
 * \throws Error(kSerialization) for degenerate graphs.
 */
Query GraphToQuery(const Graph& g, Intent intent);
std::string ToSparql(const Graph& g, Intent intent);

}  // namespace sparql
}  // namespace qgforge

#endif  // QGFORGE_SPARQL_BRIDGE_H_
