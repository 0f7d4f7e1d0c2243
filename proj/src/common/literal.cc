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

#include "common/literal.h"

#include <charconv>
#include <cstdlib>
#include <regex>

#include "common/error.h"

namespace qgforge {

namespace {

bool ParseInt(std::string_view text, std::int64_t* out) {
  if (text.empty()) return false;
  auto begin = text.data();
  auto end = text.data() + text.size();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, *out);
  return ec == std::errc() && ptr == end;
}

bool ParseDate(std::string_view text, std::int64_t* key) {
  static const std::regex kDate(R"(^(\d{4})(?:-(\d{2})(?:-(\d{2}))?)?(?:T[0-9:.+\-Z]*)?$)");
  std::cmatch m;
  if (!std::regex_match(text.begin(), text.end(), m, kDate)) return false;
  int year = std::stoi(m[1].str());
  int month = m[2].matched ? std::stoi(m[2].str()) : 1;
  int day = m[3].matched ? std::stoi(m[3].str()) : 1;
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  *key = static_cast<std::int64_t>(year) * 10000 + month * 100 + day;
  return true;
}

}  // namespace

std::string_view LiteralKindName(LiteralKind kind) {
  switch (kind) {
    case LiteralKind::kInt: return "int";
    case LiteralKind::kDec: return "dec";
    case LiteralKind::kDate: return "date";
    case LiteralKind::kStr: return "str";
  }
  return "str";
}

std::optional<LiteralKind> LiteralKindFromName(std::string_view name) {
  if (name == "int") return LiteralKind::kInt;
  if (name == "dec") return LiteralKind::kDec;
  if (name == "date") return LiteralKind::kDate;
  if (name == "str") return LiteralKind::kStr;
  return std::nullopt;
}

std::optional<Literal> Literal::Make(LiteralKind kind, std::string_view lexical) {
  Literal lit;
  lit.kind_ = kind;
  lit.lexical_ = std::string(lexical);
  switch (kind) {
    case LiteralKind::kInt:
      if (!ParseInt(lexical, &lit.integer_)) return std::nullopt;
      lit.number_ = static_cast<long double>(lit.integer_);
      break;
    case LiteralKind::kDec: {
      static const std::regex kDec(R"(^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$)");
      if (!std::regex_match(lit.lexical_, kDec)) return std::nullopt;
      lit.number_ = std::strtold(lit.lexical_.c_str(), nullptr);
      break;
    }
    case LiteralKind::kDate:
      if (!ParseDate(lexical, &lit.integer_)) return std::nullopt;
      break;
    case LiteralKind::kStr:
      break;
  }
  return lit;
}

bool Literal::LooksLikeSurface(std::string_view text) {
  return !text.empty() && text.front() == '"';
}

std::optional<Literal> Literal::FromSurface(std::string_view surface) {
  if (!LooksLikeSurface(surface)) return std::nullopt;
  std::string lexical;
  std::size_t i = 1;
  bool closed = false;
  for (; i < surface.size(); ++i) {
    char c = surface[i];
    if (c == '\\' && i + 1 < surface.size()) {
      lexical.push_back(surface[++i]);
    } else if (c == '"') {
      closed = true;
      ++i;
      break;
    } else {
      lexical.push_back(c);
    }
  }
  if (!closed) return std::nullopt;
  std::string_view rest = surface.substr(i);
  if (rest.empty()) return Make(LiteralKind::kStr, lexical);
  if (rest.substr(0, 2) != "^^") return std::nullopt;
  auto kind = LiteralKindFromName(rest.substr(2));
  if (!kind) return std::nullopt;
  return Make(*kind, lexical);
}

std::string Literal::Surface() const {
  std::string out = "\"";
  for (char c : lexical_) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out += "\"^^";
  out += LiteralKindName(kind_);
  return out;
}

bool Literal::Comparable(const Literal& a, const Literal& b) {
  if (a.numeric() && b.numeric()) return true;
  return a.kind_ == b.kind_;
}

int Literal::Compare(const Literal& a, const Literal& b) {
  if (!Comparable(a, b)) {
    throw Error(ErrorCode::kEval, "cannot compare " + a.Surface() + " with " + b.Surface());
  }
  switch (a.kind_) {
    case LiteralKind::kInt:
    case LiteralKind::kDec:
      if (a.kind_ == LiteralKind::kInt && b.kind_ == LiteralKind::kInt) {
        return a.integer_ < b.integer_ ? -1 : (a.integer_ > b.integer_ ? 1 : 0);
      }
      return a.number_ < b.number_ ? -1 : (a.number_ > b.number_ ? 1 : 0);
    case LiteralKind::kDate:
      return a.integer_ < b.integer_ ? -1 : (a.integer_ > b.integer_ ? 1 : 0);
    case LiteralKind::kStr:
      return a.lexical_.compare(b.lexical_) < 0 ? -1 : (a.lexical_ == b.lexical_ ? 0 : 1);
  }
  return 0;
}

}  // namespace qgforge
