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

#include <sstream>

#include "sparql/ast.h"

namespace qgforge {
namespace sparql {

namespace {

std::string Quote(const std::string& lexical) {
  std::string out = "\"";
  for (char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c); break;
    }
  }
  out += "\"";
  return out;
}

void PrintBlockBody(const Block& b, int indent, std::ostringstream& os);

void PrintPattern(const std::vector<TriplePattern>& triples, const std::vector<Expr>& filters,
                  std::ostringstream& os) {
  os << "{ ";
  for (const TriplePattern& t : triples) {
    os << PrintTerm(t.s) << " " << PrintTerm(t.p) << " " << PrintTerm(t.o) << " . ";
  }
  for (const Expr& f : filters) os << "FILTER (" << PrintExpr(f) << ") ";
  os << "}";
}

void PrintSelect(const Block& b, std::ostringstream& os) {
  os << "SELECT ";
  if (b.distinct) os << "DISTINCT ";
  if (b.aggregate) {
    os << "(" << b.aggregate->function << "(" << (b.aggregate->distinct ? "DISTINCT " : "") << "?"
       << b.aggregate->arg << ") AS ?" << b.aggregate->alias << ")";
  } else {
    for (std::size_t i = 0; i < b.projection.size(); ++i) {
      if (i) os << " ";
      os << "?" << b.projection[i];
    }
  }
}

void PrintModifiers(const Block& b, std::ostringstream& os) {
  if (b.order) {
    os << " ORDER BY " << (b.order->ascending ? "ASC" : "DESC") << "(?" << b.order->var << ")";
  }
  if (b.limit) os << " LIMIT " << *b.limit;
}

void PrintBlockBody(const Block& b, int indent, std::ostringstream& os) {
  std::string pad(indent, ' ');
  os << "{\n";
  for (const TriplePattern& t : b.triples) {
    os << pad << "  " << PrintTerm(t.s) << " " << PrintTerm(t.p) << " " << PrintTerm(t.o)
       << " .\n";
  }
  for (const Block& sub : b.subqueries) {
    os << pad << "  { ";
    PrintSelect(sub, os);
    os << " WHERE ";
    PrintBlockBody(sub, indent + 2, os);
    PrintModifiers(sub, os);
    os << " }\n";
  }
  for (const Expr& f : b.filters) os << pad << "  FILTER (" << PrintExpr(f) << ")\n";
  os << pad << "}";
}

}  // namespace

std::string PrintTerm(const Term& t) {
  switch (t.kind) {
    case Term::Kind::kVar: return "?" + t.value;
    case Term::Kind::kIri: return "<" + t.value + ">";
    case Term::Kind::kLiteral: {
      Literal lit = t.literal();
      switch (lit.kind()) {
        case LiteralKind::kInt: return lit.lexical();
        case LiteralKind::kDec: return Quote(lit.lexical()) + "^^xsd:decimal";
        case LiteralKind::kDate: return Quote(lit.lexical()) + "^^xsd:dateTime";
        case LiteralKind::kStr: return Quote(lit.lexical());
      }
    }
  }
  return t.value;
}

std::string PrintExpr(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kCompare:
      return PrintTerm(e.lhs) + " " + e.op + " " + PrintTerm(e.rhs);
    case Expr::Kind::kAnd:
    case Expr::Kind::kOr: {
      std::string sep = e.kind == Expr::Kind::kAnd ? " && " : " || ";
      std::string out = "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += sep;
        out += PrintExpr(e.args[i]);
      }
      return out + ")";
    }
    case Expr::Kind::kNot:
      return "!(" + PrintExpr(e.args.at(0)) + ")";
    case Expr::Kind::kExists:
    case Expr::Kind::kNotExists: {
      std::ostringstream os;
      os << (e.kind == Expr::Kind::kExists ? "EXISTS " : "NOT EXISTS ");
      PrintPattern(e.pattern, e.pattern_filters, os);
      return os.str();
    }
  }
  return {};
}

std::string Print(const Query& q) {
  std::ostringstream os;
  if (q.intent == Intent::kAsk) {
    os << "ASK";
  } else {
    PrintSelect(q.where, os);
  }
  os << " WHERE ";
  PrintBlockBody(q.where, 0, os);
  if (q.intent == Intent::kSelect) PrintModifiers(q.where, os);
  os << "\n";
  return os.str();
}

}  // namespace sparql
}  // namespace qgforge
