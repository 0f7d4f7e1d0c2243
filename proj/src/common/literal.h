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

#ifndef QGFORGE_COMMON_LITERAL_H_
#define QGFORGE_COMMON_LITERAL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace qgforge {

enum class LiteralKind : std::uint8_t { kInt, kDec, kDate, kStr };

std::string_view LiteralKindName(LiteralKind kind);
std::optional<LiteralKind> LiteralKindFromName(std::string_view name);

/*!
 * \brief A typed literal value.
 *
 * The surface form used throughout the library (instance strings, triple
 * files) is `"lexical"^^kind` with kind one of int, dec, date, str. Dates accept
 * YYYY, YYYY-MM and YYYY-MM-DD (optionally followed by a time part, ignored);
 * missing month/day normalize to January 1st.
 */
class Literal {
 public:
  static std::optional<Literal> Make(LiteralKind kind, std::string_view lexical);
  /*! \brief Parses the `"lex"^^kind` surface form. */
  static std::optional<Literal> FromSurface(std::string_view surface);
  static bool LooksLikeSurface(std::string_view text);

  LiteralKind kind() const { return kind_; }
  const std::string& lexical() const { return lexical_; }
  bool numeric() const { return kind_ == LiteralKind::kInt || kind_ == LiteralKind::kDec; }
  std::int64_t integer() const { return integer_; }
  long double number() const { return number_; }
  std::int64_t date_key() const { return integer_; }

  std::string Surface() const;

  /*! \brief Whether the two literals can be ordered against each other. */
  static bool Comparable(const Literal& a, const Literal& b);
  /*! \brief Three-way value comparison; throws EvalError on kind mismatch. */
  static int Compare(const Literal& a, const Literal& b);

 private:
  LiteralKind kind_ = LiteralKind::kStr;
  std::string lexical_;
  std::int64_t integer_ = 0;  // int value or date key yyyymmdd
  long double number_ = 0;
};

}  // namespace qgforge

#endif  // QGFORGE_COMMON_LITERAL_H_
