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
#include <cctype>
#include <map>

#include "common/error.h"
#include "graph/graph.h"
#include "sparql/ast.h"

namespace qgforge {
namespace sparql {

namespace {

constexpr std::string_view kRdfTypeIri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

enum class Tok {
  kVar,
  kIri,
  kPName,
  kWord,
  kString,
  kNumber,
  kPunct,
  kEof,
};

struct Token {
  Tok kind = Tok::kEof;
  std::string text;
  int line = 1;
  int column = 1;
};

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool IsNameStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool IsNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    for (;;) {
      SkipSpace();
      Token tok;
      tok.line = line_;
      tok.column = column_;
      if (pos_ >= text_.size()) {
        out.push_back(tok);
        return out;
      }
      char c = text_[pos_];
      if (c == '?' || c == '$') {
        Advance();
        std::string name = TakeWhile([](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
        });
        if (name.empty()) Fail("expected variable name", tok);
        tok.kind = Tok::kVar;
        tok.text = name;
      } else if (c == '<' && LooksLikeIri()) {
        Advance();
        std::string iri;
        while (Peek() != '>') iri.push_back(Advance());
        Advance();
        tok.kind = Tok::kIri;
        tok.text = iri;
      } else if (c == '"' || c == '\'') {
        tok.kind = Tok::kString;
        tok.text = ReadString(tok);
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(PeekAt(1))))) {
        tok.kind = Tok::kNumber;
        tok.text = ReadNumber();
      } else if (IsNameStart(c) || c == ':') {
        std::string word = TakeWhile([](char ch) { return IsNameChar(ch); });
        if (Peek() == ':') {
          Advance();
          std::string local = TakeWhile([](char ch) { return IsNameChar(ch) || ch == ':'; });
          // A trailing '.' terminates the triple, not the name.
          while (!local.empty() && local.back() == '.') {
            local.pop_back();
            --pos_;
            --column_;
          }
          tok.kind = Tok::kPName;
          tok.text = word + ":" + local;
        } else {
          while (!word.empty() && word.back() == '.') {
            word.pop_back();
            --pos_;
            --column_;
          }
          tok.kind = Tok::kWord;
          tok.text = word;
        }
      } else {
        tok.kind = Tok::kPunct;
        static const char* kTwo[] = {"!=", ">=", "<=", "&&", "||", "^^"};
        bool matched = false;
        for (const char* two : kTwo) {
          if (text_.substr(pos_, 2) == two) {
            tok.text = two;
            Advance();
            Advance();
            matched = true;
            break;
          }
        }
        if (!matched) {
          if (c == '@') {
            Advance();
            tok.text = "@" + TakeWhile([](char ch) {
                         return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-';
                       });
          } else {
            tok.text = std::string(1, Advance());
          }
        }
      }
      out.push_back(std::move(tok));
    }
  }

 private:
  [[noreturn]] void Fail(const std::string& msg, const Token& at) {
    throw Error(ErrorCode::kSyntax, msg, at.line, at.column);
  }

  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  char PeekAt(std::size_t off) const {
    return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
  }
  char Advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  template <typename Pred>
  std::string TakeWhile(Pred pred) {
    std::string out;
    while (pos_ < text_.size() && pred(text_[pos_])) out.push_back(Advance());
    return out;
  }

  void SkipSpace() {
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) Advance();
      if (Peek() == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') Advance();
        continue;
      }
      return;
    }
  }

  bool LooksLikeIri() const {
    char next = PeekAt(1);
    if (next == '=' || next == '\0' || std::isspace(static_cast<unsigned char>(next))) return false;
    for (std::size_t i = pos_ + 1; i < text_.size(); ++i) {
      char c = text_[i];
      if (c == '>') return true;
      if (std::isspace(static_cast<unsigned char>(c)) || c == '<' || c == '"' || c == '{' ||
          c == '}') {
        return false;
      }
    }
    return false;
  }

  std::string ReadString(const Token& at) {
    char quote = Advance();
    std::string out;
    for (;;) {
      if (pos_ >= text_.size() || Peek() == '\n') Fail("unterminated string literal", at);
      char c = Advance();
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= text_.size()) Fail("unterminated string literal", at);
        char e = Advance();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          default: out.push_back(e); break;
        }
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

  std::string ReadNumber() {
    std::string out;
    if (Peek() == '-' || Peek() == '+') out.push_back(Advance());
    out += TakeWhile([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    if (Peek() == '.' && std::isdigit(static_cast<unsigned char>(PeekAt(1)))) {
      out.push_back(Advance());
      out += TakeWhile([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    }
    if ((Peek() == 'e' || Peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(PeekAt(1))) ||
         ((PeekAt(1) == '-' || PeekAt(1) == '+') &&
          std::isdigit(static_cast<unsigned char>(PeekAt(2)))))) {
      out.push_back(Advance());
      if (Peek() == '-' || Peek() == '+') out.push_back(Advance());
      out += TakeWhile([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    }
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

const std::set<std::string>& UnsupportedWords() {
  static const std::set<std::string> kWords = {
      "UNION", "OPTIONAL", "GROUP", "HAVING", "BIND", "VALUES", "MINUS", "OFFSET", "SERVICE",
      "GRAPH", "FROM", "CONSTRUCT", "DESCRIBE", "REDUCED", "BASE", "SUM", "AVG", "SAMPLE",
      "GROUP_CONCAT", "IN", "REGEX", "LANG", "LANGMATCHES", "STR", "CONTAINS", "STRSTARTS",
      "BOUND", "IF", "COALESCE", "YEAR", "NOW", "ISIRI", "ISLITERAL", "DATATYPE"};
  return kWords;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(Lexer(text).Run()) {}

  Query Run() {
    Query q;
    while (IsWord("PREFIX")) ParsePrefix();
    if (IsWord("SELECT")) {
      q.intent = Intent::kSelect;
      ParseSelectClause(&q.where, /*main=*/true);
    } else if (IsWord("ASK")) {
      Next();
      q.intent = Intent::kAsk;
    } else {
      RejectIfUnsupported();
      Fail("expected SELECT or ASK");
    }
    if (IsWord("WHERE")) Next();
    ParseGroup(&q.where, /*depth=*/0);
    ParseModifiers(&q.where);
    if (q.intent == Intent::kAsk && (q.where.order || q.where.limit)) {
      Unsupported("solution modifiers on ASK");
    }
    if (Peek().kind != Tok::kEof) {
      RejectIfUnsupported();
      Fail("unexpected trailing input '" + Peek().text + "'");
    }
    return q;
  }

 private:
  const Token& Peek(int off = 0) const {
    std::size_t i = std::min(pos_ + off, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& Next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool IsWord(std::string_view upper, int off = 0) const {
    const Token& t = Peek(off);
    return t.kind == Tok::kWord && Upper(t.text) == upper;
  }
  bool IsPunct(std::string_view p, int off = 0) const {
    const Token& t = Peek(off);
    return t.kind == Tok::kPunct && t.text == p;
  }

  [[noreturn]] void Fail(const std::string& msg) const {
    throw Error(ErrorCode::kSyntax, msg, Peek().line, Peek().column);
  }
  [[noreturn]] void Unsupported(const std::string& what) const {
    throw Error(ErrorCode::kUnsupportedFeature, what + " is outside the supported subset",
                Peek().line, Peek().column);
  }
  void RejectIfUnsupported() const {
    if (Peek().kind == Tok::kWord && UnsupportedWords().count(Upper(Peek().text))) {
      Unsupported(Upper(Peek().text));
    }
  }

  void ExpectPunct(std::string_view p) {
    if (!IsPunct(p)) {
      RejectIfUnsupported();
      Fail("expected '" + std::string(p) + "'");
    }
    Next();
  }
  void ExpectWord(std::string_view upper) {
    if (!IsWord(upper)) {
      RejectIfUnsupported();
      Fail("expected " + std::string(upper));
    }
    Next();
  }
  std::string ExpectVar() {
    if (Peek().kind != Tok::kVar) Fail("expected a variable");
    return Next().text;
  }

  void ParsePrefix() {
    Next();
    const Token& name = Peek();
    if (name.kind != Tok::kPName || name.text.back() != ':') Fail("expected prefix name");
    std::string prefix = name.text.substr(0, name.text.size() - 1);
    Next();
    if (Peek().kind != Tok::kIri) Fail("expected IRI after prefix name");
    prefixes_[prefix] = Next().text;
  }

  std::string ResolveIri(const std::string& iri) const {
    if (iri == kRdfTypeIri) return std::string(kRdfType);
    return iri;
  }

  std::string ResolvePName(const Token& t) const {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    std::string local = t.text.substr(colon + 1);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) {
      if (t.text == "rdf:type") return std::string(kRdfType);
      return t.text;
    }
    if (it->second + local == kRdfTypeIri) return std::string(kRdfType);
    return local;
  }

  // Returns the xsd local name if the IRI or prefixed name denotes an xsd datatype.
  std::optional<std::string> XsdName(const Token& t) const {
    if (t.kind == Tok::kIri) {
      if (t.text.rfind(kXsd, 0) == 0) return t.text.substr(kXsd.size());
      return std::nullopt;
    }
    if (t.kind == Tok::kPName) {
      auto colon = t.text.find(':');
      std::string prefix = t.text.substr(0, colon);
      auto it = prefixes_.find(prefix);
      if ((it != prefixes_.end() && it->second == kXsd) || (it == prefixes_.end() && prefix == "xsd")) {
        return t.text.substr(colon + 1);
      }
    }
    return std::nullopt;
  }

  void ParseSelectClause(Block* block, bool main) {
    ExpectWord("SELECT");
    if (IsWord("DISTINCT")) {
      Next();
      block->distinct = true;
    }
    RejectIfUnsupported();
    if (IsPunct("*")) Unsupported("SELECT *");
    while (true) {
      if (Peek().kind == Tok::kVar) {
        if (block->aggregate) Unsupported("mixing aggregates with plain projections");
        block->projection.push_back(Next().text);
      } else if (IsPunct("(")) {
        if (block->aggregate || !block->projection.empty()) {
          Unsupported("more than one selection alongside an aggregate");
        }
        Next();
        Aggregate agg;
        RejectIfUnsupported();
        if (!(IsWord("COUNT") || IsWord("MAX") || IsWord("MIN"))) Fail("expected COUNT, MAX or MIN");
        agg.function = Upper(Next().text);
        ExpectPunct("(");
        if (IsWord("DISTINCT")) {
          Next();
          agg.distinct = true;
        }
        if (IsPunct("*")) Unsupported("COUNT(*)");
        agg.arg = ExpectVar();
        ExpectPunct(")");
        ExpectWord("AS");
        agg.alias = ExpectVar();
        ExpectPunct(")");
        block->aggregate = agg;
      } else {
        break;
      }
    }
    if (block->projection.empty() && !block->aggregate) Fail("empty selection");
    if (main && block->projection.size() > 1) Unsupported("multiple projections in the main query");
  }

  void ParseGroup(Block* block, int depth) {
    ExpectPunct("{");
    while (!IsPunct("}")) {
      RejectIfUnsupported();
      if (Peek().kind == Tok::kEof) Fail("unterminated group");
      if (IsPunct(".")) {
        Next();
      } else if (IsWord("FILTER")) {
        Next();
        block->filters.push_back(ParseFilterBody());
      } else if (IsPunct("{")) {
        if (!IsWord("SELECT", 1)) Unsupported("nested group patterns");
        if (depth >= 1) Unsupported("subqueries nested more than one level");
        Next();
        Block sub;
        ParseSelectClause(&sub, /*main=*/false);
        if (IsWord("WHERE")) Next();
        ParseGroup(&sub, depth + 1);
        ParseModifiers(&sub);
        ExpectPunct("}");
        block->subqueries.push_back(std::move(sub));
      } else {
        ParseTriples(&block->triples);
      }
    }
    Next();
  }

  void ParseModifiers(Block* block) {
    RejectIfUnsupported();
    if (IsWord("ORDER")) {
      Next();
      ExpectWord("BY");
      OrderKey key;
      if (IsWord("ASC") || IsWord("DESC")) {
        key.ascending = Upper(Next().text) == "ASC";
        ExpectPunct("(");
        key.var = ExpectVar();
        ExpectPunct(")");
      } else if (Peek().kind == Tok::kVar) {
        key.var = Next().text;
      } else {
        Fail("expected ordering key");
      }
      if (Peek().kind == Tok::kVar || IsWord("ASC") || IsWord("DESC")) {
        Unsupported("multiple ordering keys");
      }
      block->order = key;
    }
    RejectIfUnsupported();
    if (IsWord("LIMIT")) {
      Next();
      if (Peek().kind != Tok::kNumber) Fail("expected LIMIT count");
      auto lit = Literal::Make(LiteralKind::kInt, Next().text);
      if (!lit || lit->integer() < 1) Fail("LIMIT must be a positive integer");
      block->limit = lit->integer();
    }
    RejectIfUnsupported();
    if (block->order.has_value() != block->limit.has_value()) {
      Unsupported("ORDER BY without LIMIT (or LIMIT without ORDER BY)");
    }
  }

  Term ParseResource() {
    const Token& t = Peek();
    if (t.kind == Tok::kVar) return Term::Var(Next().text);
    if (t.kind == Tok::kIri) return Term::Iri(ResolveIri(Next().text));
    if (t.kind == Tok::kPName) return Term::Iri(ResolvePName(Next()));
    RejectIfUnsupported();
    Fail("expected a variable or IRI");
  }

  Term ParsePredicate() {
    if (Peek().kind == Tok::kWord && Peek().text == "a") {
      Next();
      return Term::Iri(std::string(kRdfType));
    }
    if (IsPunct("^") || IsPunct("(") || IsPunct("!")) Unsupported("property paths");
    Term p = ParseResource();
    if (IsPunct("/") || IsPunct("|") || IsPunct("*") || IsPunct("+")) {
      Unsupported("property paths");
    }
    return p;
  }

  Term ParseLiteral() {
    const Token& t = Peek();
    if (t.kind == Tok::kNumber) {
      std::string text = Next().text;
      bool is_int = text.find_first_of(".eE") == std::string::npos;
      auto lit = Literal::Make(is_int ? LiteralKind::kInt : LiteralKind::kDec, text);
      if (!lit) Fail("malformed number");
      return Term::Lit(*lit);
    }
    if (t.kind == Tok::kWord && (Upper(t.text) == "TRUE" || Upper(t.text) == "FALSE")) {
      Unsupported("boolean literals");
    }
    if (t.kind != Tok::kString) Fail("expected a literal");
    Token str = Next();
    LiteralKind kind = LiteralKind::kStr;
    if (IsPunct("^^")) {
      Next();
      const Token& type = Peek();
      std::optional<std::string> xsd = XsdName(type);
      std::string name;
      if (xsd) {
        name = *xsd;
      } else if (type.kind == Tok::kWord) {
        name = type.text;
      } else {
        Unsupported("literal datatype '" + type.text + "'");
      }
      Next();
      if (name == "dateTime" || name == "date" || name == "gYear" || name == "gYearMonth") {
        kind = LiteralKind::kDate;
      } else if (name == "integer" || name == "int" || name == "long" ||
                 name == "nonNegativeInteger" || name == "positiveInteger") {
        kind = LiteralKind::kInt;
      } else if (name == "decimal" || name == "double" || name == "float" || name == "dec") {
        kind = LiteralKind::kDec;
      } else if (name == "string" || name == "str") {
        kind = LiteralKind::kStr;
      } else {
        Unsupported("literal datatype '" + name + "'");
      }
    } else if (Peek().kind == Tok::kPunct && Peek().text.size() > 1 && Peek().text[0] == '@') {
      Next();  // language tags are dropped; the value stays a plain string
    }
    auto lit = Literal::Make(kind, str.text);
    if (!lit) {
      throw Error(ErrorCode::kSyntax, "malformed " + std::string(LiteralKindName(kind)) +
                                          " literal \"" + str.text + "\"",
                  str.line, str.column);
    }
    return Term::Lit(*lit);
  }

  Term ParseObject() {
    const Token& t = Peek();
    if (t.kind == Tok::kString || t.kind == Tok::kNumber) return ParseLiteral();
    return ParseResource();
  }

  void ParseTriples(std::vector<TriplePattern>* out) {
    if (Peek().kind == Tok::kString || Peek().kind == Tok::kNumber) {
      Fail("a literal cannot be a subject");
    }
    Term s = ParseResource();
    for (;;) {
      Term p = ParsePredicate();
      for (;;) {
        Term o = ParseObject();
        out->push_back(TriplePattern{s, p, o});
        if (!IsPunct(",")) break;
        Next();
      }
      if (!IsPunct(";")) break;
      Next();
      if (IsPunct(".") || IsPunct("}")) break;
    }
    if (IsPunct(".")) {
      Next();
    } else if (!IsPunct("}")) {
      RejectIfUnsupported();
      Fail("expected '.' or '}' after triple");
    }
  }

  Expr ParseFilterBody() {
    if (IsWord("EXISTS") || IsWord("NOT")) return ParsePrimary();
    RejectIfUnsupported();
    ExpectPunct("(");
    Expr e = ParseOr();
    ExpectPunct(")");
    return e;
  }

  Expr ParseOr() {
    std::vector<Expr> args{ParseAnd()};
    while (IsPunct("||")) {
      Next();
      args.push_back(ParseAnd());
    }
    return args.size() == 1 ? std::move(args[0]) : Expr::Or(std::move(args));
  }

  Expr ParseAnd() {
    std::vector<Expr> args{ParseUnary()};
    while (IsPunct("&&")) {
      Next();
      args.push_back(ParseUnary());
    }
    return args.size() == 1 ? std::move(args[0]) : Expr::And(std::move(args));
  }

  Expr ParseUnary() {
    if (IsPunct("!")) {
      Next();
      if (IsWord("EXISTS")) {
        Next();
        return ParseExistsGroup(Expr::Kind::kNotExists);
      }
      Expr inner = ParseUnary();
      Expr e;
      e.kind = Expr::Kind::kNot;
      e.args.push_back(std::move(inner));
      return e;
    }
    return ParsePrimary();
  }

  Expr ParseExistsGroup(Expr::Kind kind) {
    Expr e;
    e.kind = kind;
    Block group;
    if (IsPunct("{") && IsWord("SELECT", 1)) Unsupported("subqueries inside EXISTS");
    ParseGroup(&group, /*depth=*/1);
    if (!group.subqueries.empty()) Unsupported("subqueries inside EXISTS");
    e.pattern = std::move(group.triples);
    e.pattern_filters = std::move(group.filters);
    return e;
  }

  Expr ParsePrimary() {
    if (IsWord("EXISTS")) {
      Next();
      return ParseExistsGroup(Expr::Kind::kExists);
    }
    if (IsWord("NOT")) {
      Next();
      ExpectWord("EXISTS");
      return ParseExistsGroup(Expr::Kind::kNotExists);
    }
    if (IsPunct("(")) {
      Next();
      Expr e = ParseOr();
      ExpectPunct(")");
      return e;
    }
    Term lhs = ParseOperand();
    std::string op;
    if (IsPunct("=") || IsPunct("!=") || IsPunct(">") || IsPunct(">=") || IsPunct("<") ||
        IsPunct("<=")) {
      op = Next().text;
    } else if (IsWord("DURING") || IsWord("OVERLAP")) {
      op = Upper(Next().text);
    } else {
      RejectIfUnsupported();
      Unsupported("filter expressions other than comparisons");
    }
    Term rhs = ParseOperand();
    if (lhs.is_literal() && rhs.is_literal()) Unsupported("comparisons between two constants");
    return Expr::Compare(op, lhs, rhs);
  }

  Term ParseOperand() {
    const Token& t = Peek();
    if (t.kind == Tok::kVar) return Term::Var(Next().text);
    if (t.kind == Tok::kString || t.kind == Tok::kNumber) return ParseLiteral();
    if ((t.kind == Tok::kPName || t.kind == Tok::kIri) && IsPunct("(", 1)) {
      // Datatype casts are value-preserving in this subset.
      if (!XsdName(t)) Unsupported("function call " + t.text);
      Next();
      Next();
      Term inner = ParseOperand();
      ExpectPunct(")");
      return inner;
    }
    if (t.kind == Tok::kPName || t.kind == Tok::kIri) {
      Unsupported("comparisons involving entities");
    }
    RejectIfUnsupported();
    if (t.kind == Tok::kWord && IsPunct("(", 1)) Unsupported("function call " + t.text);
    Fail("expected a comparison operand");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

Literal Term::literal() const {
  auto lit = Literal::FromSurface(value);
  if (!lit) throw Error(ErrorCode::kInvalidArgument, "term is not a literal: " + value);
  return *lit;
}

Expr Expr::Compare(std::string op, Term lhs, Term rhs) {
  Expr e;
  e.kind = Kind::kCompare;
  e.op = std::move(op);
  e.lhs = std::move(lhs);
  e.rhs = std::move(rhs);
  return e;
}

Expr Expr::And(std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::kAnd;
  e.args = std::move(args);
  return e;
}

Expr Expr::Or(std::vector<Expr> args) {
  Expr e;
  e.kind = Kind::kOr;
  e.args = std::move(args);
  return e;
}

std::vector<std::string> Block::Exported() const {
  if (aggregate) return {aggregate->alias};
  return projection;
}

bool IsTypePredicate(std::string_view iri) { return IsTypeRelation(iri); }

Query Parse(std::string_view text) { return Parser(text).Run(); }

void CollectVars(const Expr& e, std::set<std::string>* out) {
  if (e.kind == Expr::Kind::kCompare) {
    if (e.lhs.is_var()) out->insert(e.lhs.value);
    if (e.rhs.is_var()) out->insert(e.rhs.value);
  }
  for (const Expr& a : e.args) CollectVars(a, out);
  for (const TriplePattern& t : e.pattern) {
    for (const Term* term : {&t.s, &t.p, &t.o}) {
      if (term->is_var()) out->insert(term->value);
    }
  }
  for (const Expr& f : e.pattern_filters) CollectVars(f, out);
}

std::set<std::string> BlockVars(const Block& b) {
  std::set<std::string> out;
  for (const TriplePattern& t : b.triples) {
    for (const Term* term : {&t.s, &t.p, &t.o}) {
      if (term->is_var()) out.insert(term->value);
    }
  }
  for (const Expr& f : b.filters) CollectVars(f, &out);
  for (const std::string& v : b.projection) out.insert(v);
  if (b.aggregate) {
    out.insert(b.aggregate->arg);
    out.insert(b.aggregate->alias);
  }
  if (b.order) out.insert(b.order->var);
  return out;
}

}  // namespace sparql
}  // namespace qgforge
