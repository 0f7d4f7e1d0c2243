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
 * \file sparql/ast.h
 * \brief Syntax tree of the supported SPARQL subset, its parser and printer.
 *
 * The grammar is documented in docs/sparql_subset.ebnf. Prefixed names are
 * resolved at parse time: a name under a declared prefix keeps its local part,
 * undeclared prefixes keep the whole "p:l" text, and every spelling of the RDF
 * type predicate becomes "rdf:type".
 */
#ifndef QGFORGE_SPARQL_AST_H_
#define QGFORGE_SPARQL_AST_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "common/literal.h"

namespace qgforge {
namespace sparql {

struct Term {
  enum class Kind : std::uint8_t { kVar, kIri, kLiteral };
  Kind kind = Kind::kVar;
  /*! \brief Variable name without '?', IRI text, or literal surface form. */
  std::string value;

  static Term Var(std::string name) { return Term{Kind::kVar, std::move(name)}; }
  static Term Iri(std::string iri) { return Term{Kind::kIri, std::move(iri)}; }
  static Term Lit(const Literal& lit) { return Term{Kind::kLiteral, lit.Surface()}; }

  bool is_var() const { return kind == Kind::kVar; }
  bool is_iri() const { return kind == Kind::kIri; }
  bool is_literal() const { return kind == Kind::kLiteral; }
  Literal literal() const;

  auto operator<=>(const Term&) const = default;
};

struct TriplePattern {
  Term s;
  Term p;
  Term o;
  auto operator<=>(const TriplePattern&) const = default;
};

struct Expr {
  enum class Kind : std::uint8_t { kCompare, kAnd, kOr, kNot, kExists, kNotExists };
  Kind kind = Kind::kCompare;
  /*! \brief Comparison operator: = != > >= < <= DURING OVERLAP. */
  std::string op;
  Term lhs;
  Term rhs;
  std::vector<Expr> args;
  /*! \brief Group of an EXISTS / NOT EXISTS test. */
  std::vector<TriplePattern> pattern;
  std::vector<Expr> pattern_filters;

  static Expr Compare(std::string op, Term lhs, Term rhs);
  static Expr And(std::vector<Expr> args);
  static Expr Or(std::vector<Expr> args);

  bool operator==(const Expr&) const = default;
};

struct Aggregate {
  std::string function;  // COUNT, MAX or MIN
  bool distinct = false;
  std::string arg;
  std::string alias;
  bool operator==(const Aggregate&) const = default;
};

struct OrderKey {
  bool ascending = true;
  std::string var;
  bool operator==(const OrderKey&) const = default;
};

struct Block {
  bool distinct = false;
  /*! \brief Projected variables (empty for ASK and for aggregate selections). */
  std::vector<std::string> projection;
  std::optional<Aggregate> aggregate;
  std::vector<TriplePattern> triples;
  std::vector<Expr> filters;
  std::vector<Block> subqueries;
  std::optional<OrderKey> order;
  std::optional<std::int64_t> limit;

  /*! \brief Variables visible outside the block. */
  std::vector<std::string> Exported() const;
  bool operator==(const Block&) const = default;
};

enum class Intent : std::uint8_t { kSelect, kAsk };

struct Query {
  Intent intent = Intent::kSelect;
  Block where;
  bool operator==(const Query&) const = default;
};

inline constexpr std::string_view kRdfType = "rdf:type";
inline constexpr std::string_view kIntervalSeparator = "$$$";

/*! \brief Predicates whose objects are entity types. */
bool IsTypePredicate(std::string_view iri);

/*!
 * \brief Parses program text.
 * \throws Error(kSyntax) with line and column, or Error(kUnsupportedFeature).
 */
Query Parse(std::string_view text);

/*! \brief Deterministic program text; Parse(Print(q)) == q. */
std::string Print(const Query& q);
std::string PrintExpr(const Expr& e);
std::string PrintTerm(const Term& t);

/*! \brief Variables mentioned anywhere in an expression, including EXISTS groups. */
void CollectVars(const Expr& e, std::set<std::string>* out);
/*! \brief Variables of triples, filters and modifiers of one block (not its subqueries). */
std::set<std::string> BlockVars(const Block& b);

}  // namespace sparql
}  // namespace qgforge

#endif  // QGFORGE_SPARQL_AST_H_
