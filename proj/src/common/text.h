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
 * \file common/text.h
 * \brief Tokenization shared by the ranker and the neural scorer.
 */
#ifndef QGFORGE_COMMON_TEXT_H_
#define QGFORGE_COMMON_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace qgforge {

/*!
 * \brief Lower-cased alphanumeric runs of \p text.
 *
 * Every other character separates tokens, so relation names such as
 * "film.film.directed_by" become [film, film, directed, by].
 */
std::vector<std::string> Tokenize(std::string_view text);

/*!
 * \brief Tokens describing an instance: built-in keywords map to one reserved
 * word each, literals to the tokens of their lexical form, everything else to
 * Tokenize(\p text).
 */
std::vector<std::string> InstanceTokens(std::string_view text);

}  // namespace qgforge

#endif  // QGFORGE_COMMON_TEXT_H_
