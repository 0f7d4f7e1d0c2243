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

#include "kg/store.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "common/error.h"
#include "graph/graph.h"
#include "sparql/bridge.h"

namespace qgforge {

namespace {

std::uint64_t PairKey(TermId a, TermId b) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct Field {
  std::string text;
  std::optional<Literal> literal;
};

std::optional<LiteralKind> DatatypeKind(std::string_view type) {
  if (auto kind = LiteralKindFromName(type)) return kind;
  auto colon = type.rfind(':');
  auto hash = type.rfind('#');
  std::size_t cut = std::string_view::npos;
  if (colon != std::string_view::npos) cut = colon;
  if (hash != std::string_view::npos && (cut == std::string_view::npos || hash > cut)) cut = hash;
  std::string_view local = cut == std::string_view::npos ? type : type.substr(cut + 1);
  if (!local.empty() && local.back() == '>') local.remove_suffix(1);
  if (local == "integer" || local == "int" || local == "long") return LiteralKind::kInt;
  if (local == "decimal" || local == "double" || local == "float") return LiteralKind::kDec;
  if (local == "date" || local == "dateTime" || local == "gYear" || local == "gYearMonth") {
    return LiteralKind::kDate;
  }
  if (local == "string") return LiteralKind::kStr;
  return std::nullopt;
}

// Splits one line into fields; returns false on malformed input.
bool SplitLine(std::string_view line, std::vector<Field>* fields, std::string* why) {
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (true) {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= n || line[i] == '#') return true;
    if (line[i] == '"') {
      std::string lexical;
      ++i;
      bool closed = false;
      while (i < n) {
        char c = line[i++];
        if (c == '\\' && i < n) {
          char e = line[i++];
          lexical.push_back(e == 'n' ? '\n' : e == 't' ? '\t' : e);
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          lexical.push_back(c);
        }
      }
      if (!closed) {
        *why = "unterminated literal";
        return false;
      }
      LiteralKind kind = LiteralKind::kStr;
      if (i + 1 < n && line[i] == '^' && line[i + 1] == '^') {
        i += 2;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::string_view type = line.substr(start, i - start);
        if (!type.empty() && type.back() == '.' && type.size() > 1) {
          type.remove_suffix(1);
          --i;
        }
        auto k = DatatypeKind(type);
        if (!k) {
          *why = "unknown datatype '" + std::string(type) + "'";
          return false;
        }
        kind = *k;
      } else if (i < n && line[i] == '@') {
        while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      }
      auto lit = Literal::Make(kind, lexical);
      if (!lit) {
        *why = "invalid " + std::string(LiteralKindName(kind)) + " literal \"" + lexical + "\"";
        return false;
      }
      fields->push_back(Field{lit->Surface(), lit});
      continue;
    }
    std::size_t start = i;
    if (line[i] == '<') {
      auto close = line.find('>', i);
      if (close == std::string_view::npos) {
        *why = "unterminated IRI";
        return false;
      }
      fields->push_back(Field{std::string(line.substr(i + 1, close - i - 1)), std::nullopt});
      i = close + 1;
      continue;
    }
    while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    fields->push_back(Field{std::string(line.substr(start, i - start)), std::nullopt});
  }
}

const std::vector<TermId>& EmptyIds() {
  static const std::vector<TermId> kEmpty;
  return kEmpty;
}

const std::vector<std::pair<TermId, TermId>>& EmptyPairs() {
  static const std::vector<std::pair<TermId, TermId>> kEmpty;
  return kEmpty;
}

bool IsLabelRelation(std::string_view p) {
  return p == "label" || p == "name" || p == "rdfs:label" || p == "type.object.name";
}

}  // namespace

TermId TripleStore::Intern(const std::string& text, std::optional<Literal> literal) {
  auto it = ids_.find(text);
  if (it != ids_.end()) return it->second;
  TermId id = static_cast<TermId>(terms_.size());
  terms_.push_back(text);
  literals_.push_back(std::move(literal));
  intervals_.emplace_back();
  ids_.emplace(text, id);
  return id;
}

TripleStore TripleStore::FromText(std::string_view text, std::string_view source) {
  TripleStore store;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    std::vector<Field> fields;
    std::string why;
    if (!SplitLine(line, &fields, &why)) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ":" + std::to_string(line_no) + ": " + why, line_no);
    }
    if (fields.size() == 4 && !fields[3].literal && fields[3].text == ".") fields.pop_back();
    if (fields.size() == 3 && !fields[2].literal && fields[2].text.size() > 1 &&
        fields[2].text.back() == '.') {
      fields[2].text.pop_back();
    }
    if (fields.empty()) continue;
    if (fields.size() != 3) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ":" + std::to_string(line_no) + ": expected 3 fields, got " +
                      std::to_string(fields.size()),
                  line_no);
    }
    if (fields[0].literal || fields[1].literal) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ":" + std::to_string(line_no) +
                      ": literal in subject or predicate position",
                  line_no);
    }
    if (fields[1].text.find(sparql::kIntervalSeparator) != std::string::npos) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ":" + std::to_string(line_no) +
                      ": predicate uses the reserved separator $$$",
                  line_no);
    }
    TermId s = store.Intern(fields[0].text, std::nullopt);
    TermId p = store.Intern(fields[1].text, std::nullopt);
    TermId o = store.Intern(fields[2].text, fields[2].literal);
    store.triples_.push_back(Triple{s, p, o});
    if (end == text.size()) break;
  }
  store.Finalize();
  return store;
}

TripleStore TripleStore::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromText(buf.str(), path);
}

TripleStore TripleStore::FromTriples(const std::vector<std::array<std::string, 3>>& triples) {
  std::string text;
  for (const auto& t : triples) text += t[0] + " " + t[1] + " " + t[2] + "\n";
  return FromText(text);
}

void TripleStore::Finalize() {
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());
  num_loaded_ = triples_.size();

  // Materialize combined interval relations.
  std::map<std::pair<TermId, TermId>, std::vector<TermId>> by_sp;
  for (const Triple& t : triples_) by_sp[{t.s, t.p}].push_back(t.o);
  std::vector<Triple> synthetic;
  for (const auto& [key, starts] : by_sp) {
    auto end_rel = sparql::IntervalEndRelation(terms_[key.second]);
    if (!end_rel) continue;
    auto end_id = ids_.find(*end_rel);
    if (end_id == ids_.end()) continue;
    auto ends = by_sp.find({key.first, end_id->second});
    if (ends == by_sp.end()) continue;
    TermId combined = Intern(terms_[key.second] + std::string(sparql::kIntervalSeparator) + *end_rel,
                             std::nullopt);
    for (TermId st : starts) {
      for (TermId ed : ends->second) {
        if (!literals_[st] || !literals_[ed]) continue;
        TermId node = Intern("[" + terms_[st] + " , " + terms_[ed] + "]", std::nullopt);
        intervals_[node] = Interval{*literals_[st], *literals_[ed]};
        synthetic.push_back(Triple{key.first, combined, node});
      }
    }
  }
  triples_.insert(triples_.end(), synthetic.begin(), synthetic.end());
  std::sort(triples_.begin(), triples_.end());
  triples_.erase(std::unique(triples_.begin(), triples_.end()), triples_.end());

  std::set<std::string> relations, types, entities;
  for (const Triple& t : triples_) {
    sp_[PairKey(t.s, t.p)].push_back(t.o);
    po_[PairKey(t.p, t.o)].push_back(t.s);
    p_[t.p].emplace_back(t.s, t.o);
    s_[t.s].emplace_back(t.p, t.o);
    o_[t.o].emplace_back(t.s, t.p);
    relations.insert(terms_[t.p]);
    if (IsTypeRelation(terms_[t.p])) types.insert(terms_[t.o]);
    entities.insert(terms_[t.s]);
    if (!literals_[t.o] && !intervals_[t.o]) entities.insert(terms_[t.o]);
  }
  for (auto* index : {&sp_, &po_}) {
    for (auto& [key, list] : *index) std::sort(list.begin(), list.end());
  }
  for (auto* index : {&p_, &s_, &o_}) {
    for (auto& [key, list] : *index) std::sort(list.begin(), list.end());
  }
  relations_.assign(relations.begin(), relations.end());
  types_.assign(types.begin(), types.end());
  entities_.assign(entities.begin(), entities.end());
}

std::optional<TermId> TripleStore::Find(std::string_view text) const {
  auto it = ids_.find(std::string(text));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string TripleStore::Label(std::string_view entity) const {
  auto id = Find(entity);
  if (!id) return std::string(entity);
  for (const auto& [p, o] : BySubject(*id)) {
    if (IsLabelRelation(terms_[p]) && literals_[o]) return literals_[o]->lexical();
  }
  return std::string(entity);
}

const std::vector<TermId>& TripleStore::Objects(TermId s, TermId p) const {
  auto it = sp_.find(PairKey(s, p));
  return it == sp_.end() ? EmptyIds() : it->second;
}

const std::vector<TermId>& TripleStore::Subjects(TermId p, TermId o) const {
  auto it = po_.find(PairKey(p, o));
  return it == po_.end() ? EmptyIds() : it->second;
}

const std::vector<std::pair<TermId, TermId>>& TripleStore::ByPredicate(TermId p) const {
  auto it = p_.find(p);
  return it == p_.end() ? EmptyPairs() : it->second;
}

const std::vector<std::pair<TermId, TermId>>& TripleStore::BySubject(TermId s) const {
  auto it = s_.find(s);
  return it == s_.end() ? EmptyPairs() : it->second;
}

const std::vector<std::pair<TermId, TermId>>& TripleStore::ByObject(TermId o) const {
  auto it = o_.find(o);
  return it == o_.end() ? EmptyPairs() : it->second;
}

bool TripleStore::Contains(TermId s, TermId p, TermId o) const {
  const auto& objects = Objects(s, p);
  return std::binary_search(objects.begin(), objects.end(), o);
}

std::set<std::string> ResultTable::FirstColumn() const {
  std::set<std::string> out;
  for (const auto& row : rows) {
    if (!row.empty()) out.insert(row[0]);
  }
  return out;
}

}  // namespace qgforge
