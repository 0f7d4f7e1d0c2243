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

#include "common/text.h"

#include <cctype>
#include <map>

#include "common/literal.h"

namespace qgforge {

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<std::string> InstanceTokens(std::string_view text) {
  static const std::map<std::string, std::string, std::less<>> kKeywords = {
      {"=", "<eq>"},        {"!=", "<ne>"},         {">", "<gt>"},       {">=", "<ge>"},
      {"<", "<lt>"},        {"<=", "<le>"},         {"DURING", "<during>"}, {"OVERLAP", "<overlap>"},
      {"ASC", "<asc>"},     {"DESC", "<desc>"},     {"COUNT", "<count>"}, {"MAX", "<max>"},
      {"MIN", "<min>"},     {"ASK", "<ask>"},       {"NONE", "<none>"}};
  auto it = kKeywords.find(text);
  if (it != kKeywords.end()) return {it->second};
  if (auto lit = Literal::FromSurface(text)) return Tokenize(lit->lexical());
  return Tokenize(text);
}

}  // namespace qgforge
