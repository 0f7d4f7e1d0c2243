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

#include "candidates/candidates.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <regex>
#include <set>

#include <json.hpp>

#include "common/error.h"
#include "common/literal.h"
#include "common/text.h"
#include "sparql/ast.h"

namespace qgforge {

namespace {

using Json = nlohmann::ordered_json;

void PushUnique(std::vector<std::string>* list, const std::string& item) {
  if (std::find(list->begin(), list->end(), item) == list->end()) list->push_back(item);
}

void CollectEntities(const sparql::Block& b, std::vector<std::string>* out);

void CollectPattern(const std::vector<sparql::TriplePattern>& triples,
                    std::vector<std::string>* out) {
  for (const auto& t : triples) {
    if (t.s.is_iri()) PushUnique(out, t.s.value);
    if (t.o.is_iri() && !(t.p.is_iri() && sparql::IsTypePredicate(t.p.value))) {
      PushUnique(out, t.o.value);
    }
  }
}

void CollectExpr(const sparql::Expr& e, std::vector<std::string>* out) {
  if (e.kind == sparql::Expr::Kind::kCompare) {
    if (e.lhs.is_iri()) PushUnique(out, e.lhs.value);
    if (e.rhs.is_iri()) PushUnique(out, e.rhs.value);
  }
  for (const auto& a : e.args) CollectExpr(a, out);
  CollectPattern(e.pattern, out);
  for (const auto& f : e.pattern_filters) CollectExpr(f, out);
}

void CollectEntities(const sparql::Block& b, std::vector<std::string>* out) {
  CollectPattern(b.triples, out);
  for (const auto& f : b.filters) CollectExpr(f, out);
  for (const auto& sub : b.subqueries) CollectEntities(sub, out);
}

// Deterministic uniform index in [0, n).
std::size_t Draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

}  // namespace

const std::vector<std::string>& CandidatePool::ForVertex(VertexClass c) const {
  static const std::vector<std::string> kEmpty;
  switch (c) {
    case VertexClass::kEnt: return ent;
    case VertexClass::kType: return type;
    case VertexClass::kVal: return val;
    default: return kEmpty;
  }
}

const std::vector<std::string>& CandidatePool::ForEdge(EdgeClass c) const {
  switch (c) {
    case EdgeClass::kRel: return rel;
    case EdgeClass::kOrd: return ord;
    case EdgeClass::kCmp: return cmp;
    case EdgeClass::kAgg: return agg;
  }
  return rel;
}

std::string CandidatePool::TextOf(const std::string& instance) const {
  auto it = text.find(instance);
  return it == text.end() ? instance : it->second;
}

std::string CandidatePool::ToJson(int indent) const {
  Json j;
  j["ent"] = ent;
  j["rel"] = rel;
  j["type"] = type;
  j["val"] = val;
  j["ord"] = ord;
  j["cmp"] = cmp;
  j["agg"] = agg;
  j["text"] = text;
  return j.dump(indent);
}

CandidatePool CandidatePool::FromJson(std::string_view text) {
  try {
    Json j = Json::parse(text);
    CandidatePool p;
    auto list = [&](const char* key) {
      return j.contains(key) ? j[key].get<std::vector<std::string>>() : std::vector<std::string>{};
    };
    p.ent = list("ent");
    p.rel = list("rel");
    p.type = list("type");
    p.val = list("val");
    Builtins b = EnumerateBuiltins();
    p.ord = j.contains("ord") ? list("ord") : b.ord;
    p.cmp = j.contains("cmp") ? list("cmp") : b.cmp;
    p.agg = j.contains("agg") ? list("agg") : b.agg;
    if (j.contains("text")) p.text = j["text"].get<std::map<std::string, std::string>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad candidate pool: ") + e.what());
  }
}

Builtins EnumerateBuiltins() { return Builtins{OrdInstances(), CmpInstances(), AggInstances()}; }

std::vector<std::string> ExtractValues(std::string_view question) {
  static const std::regex kPattern(
      R"re("([^"]*)"|(?:^|[^\w.])(?:(\d{4}-\d{2}-\d{2})|(-?\d+\.\d+)|(-?\d+))\b)re");
  std::vector<std::string> out;
  std::string text(question);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kPattern);
       it != std::sregex_iterator(); ++it) {
    const std::smatch& m = *it;
    std::optional<Literal> lit;
    if (m[1].matched) {
      lit = Literal::Make(LiteralKind::kStr, m[1].str());
    } else if (m[2].matched) {
      lit = Literal::Make(LiteralKind::kDate, m[2].str());
    } else if (m[3].matched) {
      lit = Literal::Make(LiteralKind::kDec, m[3].str());
    } else if (m[4].matched) {
      std::string digits = m[4].str();
      if (digits.size() == 4 && digits[0] >= '1' && digits[0] <= '2') {
        if (auto year = Literal::Make(LiteralKind::kDate, digits)) PushUnique(&out, year->Surface());
      }
      lit = Literal::Make(LiteralKind::kInt, digits);
    }
    if (lit) PushUnique(&out, lit->Surface());
  }
  return out;
}

std::vector<std::string> GoldEntities(std::string_view text) {
  sparql::Query q = sparql::Parse(text);
  std::vector<std::string> out;
  CollectEntities(q.where, &out);
  return out;
}

Ranker::Ranker(std::vector<std::string> vocab, int dim, std::uint64_t seed)
    : dim_(dim), vocab_(std::move(vocab)) {
  QG_CHECK(dim > 0, ErrorCode::kInvalidArgument, "ranker dimension must be positive");
  if (vocab_.empty() || vocab_[0] != "<unk>") vocab_.insert(vocab_.begin(), "<unk>");
  for (std::size_t i = 0; i < vocab_.size(); ++i) index_.emplace(vocab_[i], static_cast<int>(i));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-0.1, 0.1);
  weights_.resize(vocab_.size() * static_cast<std::size_t>(dim));
  for (float& w : weights_) w = static_cast<float>(uniform(rng));
}

std::vector<int> Ranker::Ids(std::string_view text, bool instance) const {
  std::vector<std::string> tokens = instance ? InstanceTokens(text) : Tokenize(text);
  std::vector<int> ids;
  for (const auto& t : tokens) {
    auto it = index_.find(t);
    ids.push_back(it == index_.end() ? 0 : it->second);
  }
  if (ids.empty()) ids.push_back(0);
  return ids;
}

std::vector<double> Ranker::Mean(const std::vector<int>& ids) const {
  std::vector<double> m(dim_, 0.0);
  for (int id : ids) {
    for (int k = 0; k < dim_; ++k) m[k] += weights_[static_cast<std::size_t>(id) * dim_ + k];
  }
  for (double& x : m) x /= static_cast<double>(ids.size());
  return m;
}

double Ranker::Score(std::string_view question, std::string_view candidate) const {
  if (dim_ == 0) return 0.0;
  std::vector<double> a = Mean(Ids(question, false));
  std::vector<double> b = Mean(Ids(candidate, true));
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<std::string> Ranker::Rank(std::string_view question,
                                      const std::vector<std::string>& candidates, int k) const {
  if (k <= 0) return {};
  std::vector<std::pair<double, std::string>> scored;
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (seen.insert(c).second) scored.emplace_back(Score(question, c), c);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && static_cast<int>(i) < k; ++i) {
    out.push_back(scored[i].second);
  }
  return out;
}

std::vector<double> Ranker::Train(const std::vector<Example>& examples,
                                  const std::vector<std::string>& candidates, int epochs,
                                  std::uint64_t seed, double lr) {
  for (const auto& ex : examples) {
    if (ex.positives.empty()) throw Error(ErrorCode::kData, "ranker example without positives");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> history;
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t terms = 0;
    for (std::size_t idx : order) {
      const Example& ex = examples[idx];
      std::set<std::string> positives(ex.positives.begin(), ex.positives.end());
      std::vector<const std::string*> negatives;
      for (const auto& c : candidates) {
        if (!positives.count(c)) negatives.push_back(&c);
      }
      std::vector<int> q_ids = Ids(ex.question, false);
      for (const auto& pos : ex.positives) {
        if (negatives.empty()) break;
        std::vector<int> p_ids = Ids(pos, true);
        for (int s = 0; s < kNegatives; ++s) {
          std::vector<int> n_ids = Ids(*negatives[Draw(rng, negatives.size())], true);
          std::vector<double> q = Mean(q_ids), p = Mean(p_ids), n = Mean(n_ids);
          double sp = std::inner_product(q.begin(), q.end(), p.begin(), 0.0);
          double sn = std::inner_product(q.begin(), q.end(), n.begin(), 0.0);
          double loss = std::max(0.0, kMargin - sp + sn);
          total += loss;
          ++terms;
          if (loss <= 0.0) continue;
          // d loss / d q = n - p, d loss / d p = -q, d loss / d n = q.
          auto update = [&](const std::vector<int>& ids, const std::vector<double>& grad) {
            double scale = lr / static_cast<double>(ids.size());
            for (int id : ids) {
              float* row = &weights_[static_cast<std::size_t>(id) * dim_];
              for (int k = 0; k < dim_; ++k) row[k] = static_cast<float>(row[k] - scale * grad[k]);
            }
          };
          std::vector<double> gq(dim_), gp(dim_), gn(dim_);
          for (int k = 0; k < dim_; ++k) {
            gq[k] = n[k] - p[k];
            gp[k] = -q[k];
            gn[k] = q[k];
          }
          update(q_ids, gq);
          update(p_ids, gp);
          update(n_ids, gn);
        }
      }
    }
    history.push_back(terms ? total / static_cast<double>(terms) : 0.0);
  }
  return history;
}

std::vector<std::string> RankRelations(const Ranker& ranker, std::string_view question,
                                       const TripleStore& kg, int k) {
  return ranker.Rank(question, kg.Relations(), k);
}

std::vector<std::string> RankTypes(const Ranker& ranker, std::string_view question,
                                   const TripleStore& kg, int k) {
  if (kg.Types().empty() || k <= 0) return {};
  std::vector<std::string> candidates = kg.Types();
  candidates.emplace_back(kNoneType);
  std::vector<std::string> ranked = ranker.Rank(question, candidates, k + 1);
  if (ranked.empty() || ranked.front() == kNoneType) return {};
  ranked.erase(std::remove(ranked.begin(), ranked.end(), std::string(kNoneType)), ranked.end());
  if (static_cast<int>(ranked.size()) > k) ranked.resize(k);
  return ranked;
}

CandidatePool BuildPool(std::string_view question, const std::vector<std::string>& entities,
                        const TripleStore& kg, const Ranker& rel_ranker,
                        const Ranker& type_ranker, const PoolOptions& options) {
  CandidatePool pool;
  Builtins b = EnumerateBuiltins();
  pool.ord = b.ord;
  pool.cmp = b.cmp;
  pool.agg = b.agg;
  for (const auto& e : entities) {
    PushUnique(&pool.ent, e);
    std::string label = kg.Label(e);
    if (label != e) pool.text[e] = label;
  }
  pool.val = ExtractValues(question);
  PushUnique(&pool.val, Literal::Make(LiteralKind::kInt, "1")->Surface());
  pool.rel = RankRelations(rel_ranker, question, kg, options.rel_top_k);
  pool.type = RankTypes(type_ranker, question, kg, options.type_top_k);
  return pool;
}

void ForceGold(const QueryGraph& gold, CandidatePool* pool) {
  for (const Vertex& v : gold.vertices) {
    if (!v.instance) continue;
    if (v.cls == VertexClass::kEnt) PushUnique(&pool->ent, *v.instance);
    if (v.cls == VertexClass::kType) PushUnique(&pool->type, *v.instance);
    if (v.cls == VertexClass::kVal) PushUnique(&pool->val, *v.instance);
  }
  for (const Edge& e : gold.edges) {
    if (e.instance && e.cls == EdgeClass::kRel) PushUnique(&pool->rel, *e.instance);
  }
}

}  // namespace qgforge
