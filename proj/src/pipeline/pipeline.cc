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

#include "pipeline/pipeline.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "common/error.h"
#include "sparql/bridge.h"
#include "supervision/supervision.h"

namespace qgforge {

namespace {

using Json = nlohmann::ordered_json;

void Log(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

std::string Fixed(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

struct Prepared {
  const Example* ex;
  QueryGraph gold;
};

std::vector<Prepared> PrepareGold(const std::vector<Example>& examples) {
  std::vector<Prepared> out;
  for (const Example& ex : examples) {
    try {
      out.push_back(Prepared{&ex, sparql::ConvertProgram(ex.sparql)});
    } catch (const Error& e) {
      throw Error(ErrorCode::kData, "example " + ex.id + ": " + e.what());
    }
  }
  return out;
}

bool HasType(const TripleStore& kg) { return !kg.Types().empty(); }

}  // namespace

std::vector<Example> ParseDataset(std::string_view text) {
  std::vector<Example> out;
  std::set<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = Json::parse(line);
      Example ex{j.at("id").get<std::string>(), j.at("question").get<std::string>(),
                 j.at("sparql").get<std::string>()};
      if (!ids.insert(ex.id).second) throw Error(ErrorCode::kData, "duplicate example id " + ex.id);
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("dataset line: ") + e.what(), number);
    }
  }
  return out;
}

std::vector<Example> LoadDataset(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ParseDataset(ss.str());
}

std::string DatasetToJsonl(const std::vector<Example>& examples) {
  std::string out;
  for (const Example& ex : examples) {
    Json j;
    j["id"] = ex.id;
    j["question"] = ex.question;
    j["sparql"] = ex.sparql;
    out += j.dump() + "\n";
  }
  return out;
}

CandidatePool InferencePool(const nn::Model& model, const Example& ex, const TripleStore& kg,
                            const PoolOptions& options) {
  return BuildPool(ex.question, GoldEntities(ex.sparql), kg, model.rel_ranker(),
                   model.type_ranker(), options);
}

TrainOutcome TrainPipeline(const std::vector<Example>& examples, const TripleStore& kg,
                           const PipelineOptions& options, const LogFn& log) {
  if (examples.empty()) throw Error(ErrorCode::kData, "training dataset is empty");
  std::vector<Prepared> prepared = PrepareGold(examples);

  std::vector<std::string> questions, texts;
  for (const auto& p : prepared) {
    questions.push_back(p.ex->question);
    for (const auto& e : GoldEntities(p.ex->sparql)) texts.push_back(kg.Label(e));
    for (const auto& v : ExtractValues(p.ex->question)) texts.push_back(v);
    for (const Vertex& v : p.gold.vertices) {
      if (v.instance) texts.push_back(v.cls == VertexClass::kEnt ? kg.Label(*v.instance) : *v.instance);
    }
  }
  for (const auto& r : kg.Relations()) texts.push_back(r);
  for (const auto& t : kg.Types()) texts.push_back(t);
  nn::ModelConfig config;
  config.dim = options.dim;
  config.seed = options.seed;
  TrainOutcome out{nn::Model(nn::BuildVocabulary(questions, texts), config), {}, {}};
  nn::Model& model = out.model;
  Log(log, "vocabulary: " + std::to_string(model.vocab().size()) + " tokens");

  std::vector<Ranker::Example> rel_examples, type_examples;
  for (const auto& p : prepared) {
    Ranker::Example r{p.ex->question, {}}, t{p.ex->question, {}};
    for (const Edge& e : p.gold.edges) {
      if (e.cls == EdgeClass::kRel && e.instance &&
          std::find(r.positives.begin(), r.positives.end(), *e.instance) == r.positives.end()) {
        r.positives.push_back(*e.instance);
      }
    }
    for (const Vertex& v : p.gold.vertices) {
      if (v.cls == VertexClass::kType && v.instance) t.positives.push_back(*v.instance);
    }
    if (t.positives.empty()) t.positives.emplace_back(kNoneType);
    if (!r.positives.empty()) rel_examples.push_back(std::move(r));
    type_examples.push_back(std::move(t));
  }
  if (!rel_examples.empty()) {
    auto h = model.rel_ranker().Train(rel_examples, kg.Relations(), options.ranker_epochs,
                                      options.seed + 11);
    Log(log, "relation ranker loss " + Fixed(h.empty() ? 0.0 : h.back()));
  }
  if (HasType(kg)) {
    std::vector<std::string> cands = kg.Types();
    cands.emplace_back(kNoneType);
    auto h = model.type_ranker().Train(type_examples, cands, options.ranker_epochs, options.seed + 13);
    Log(log, "type ranker loss " + Fixed(h.empty() ? 0.0 : h.back()));
  }

  std::vector<nn::TrainExample> train;
  for (const auto& p : prepared) {
    nn::TrainExample te;
    te.id = p.ex->id;
    te.question = p.ex->question;
    te.signals = BuildSignals(p.gold);
    te.pool = InferencePool(model, *p.ex, kg, options.pool);
    ForceGold(p.gold, &te.pool);
    train.push_back(std::move(te));
  }

  nn::TrainConfig tc = options.train;
  tc.seed = options.seed;
  auto after_epoch = [&](int epoch, double loss) {
    Log(log, "epoch " + std::to_string(epoch) + " loss " + Fixed(loss, 6));
    bool check = options.eval_every > 0 && (epoch % options.eval_every == 0 || epoch == tc.epochs);
    if (!check) return false;
    int correct = 0;
    for (const auto& p : prepared) {
      try {
        CandidatePool pool = InferencePool(model, *p.ex, kg, options.pool);
        ScoredGraph pred = Parse(model, p.ex->question, pool, kg, options.search);
        if (QueryGraphEqual(pred.graph, p.gold)) ++correct;
      } catch (const Error&) {
      }
    }
    double acc = static_cast<double>(correct) / static_cast<double>(prepared.size());
    out.gq_checks.emplace_back(epoch, acc);
    Log(log, "epoch " + std::to_string(epoch) + " train Gq " + Fixed(acc));
    return correct == static_cast<int>(prepared.size());
  };
  out.losses = nn::Train(model, train, tc, after_epoch);
  return out;
}

ExampleResult ScorePrediction(const TripleStore& kg, const std::string& gold_sparql,
                              const QueryGraph& predicted) {
  ExampleResult r;
  QueryGraph gold = sparql::ConvertProgram(gold_sparql);
  r.gq = QueryGraphEqual(predicted, gold);
  try {
    r.ga = AqgEqual(Abstract(predicted), Abstract(gold));
  } catch (const Error&) {
    r.ga = false;
  }
  std::set<std::string> gold_answers = Answers(kg, sparql::Parse(gold_sparql));
  r.predicted_sparql = sparql::ToSparql(predicted, GraphIntent(predicted));
  sparql::Query pq = sparql::Parse(r.predicted_sparql);
  EvalOptions lenient;
  lenient.strict = false;
  std::set<std::string> predicted_answers;
  std::string top;
  if (pq.intent == sparql::Intent::kAsk) {
    top = Ask(kg, pq, lenient) ? "true" : "false";
    predicted_answers = {top};
  } else {
    ResultTable table = Select(kg, pq, lenient);
    predicted_answers = table.FirstColumn();
    if (!table.rows.empty() && !table.rows[0].empty()) top = table.rows[0][0];
  }
  std::size_t overlap = 0;
  for (const auto& a : predicted_answers) overlap += gold_answers.count(a);
  if (predicted_answers.empty() && gold_answers.empty()) {
    r.precision = r.recall = r.f1 = 1.0;
  } else {
    r.precision = predicted_answers.empty() ? 0.0 : static_cast<double>(overlap) / predicted_answers.size();
    r.recall = gold_answers.empty() ? 1.0 : static_cast<double>(overlap) / gold_answers.size();
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  }
  r.hit1 = !top.empty() && gold_answers.count(top) > 0;
  r.ok = true;
  return r;
}

EvalReport Evaluate(const nn::Model& model, const std::vector<Example>& examples,
                    const TripleStore& kg, const PipelineOptions& options) {
  EvalReport report;
  for (const Example& ex : examples) {
    ExampleResult r;
    SearchStats stats;
    try {
      CandidatePool pool = InferencePool(model, ex, kg, options.pool);
      ScoredGraph pred = Parse(model, ex.question, pool, kg, options.search, &stats);
      r = ScorePrediction(kg, ex.sparql, pred.graph);
    } catch (const Error& e) {
      r = ExampleResult{};
      r.error = std::string(ErrorCodeName(e.code())) + ": " + e.what();
    }
    r.id = ex.id;
    r.stats = stats;
    report.totals.Merge(stats);
    report.examples.push_back(std::move(r));
  }
  std::sort(report.examples.begin(), report.examples.end(),
            [](const ExampleResult& a, const ExampleResult& b) { return a.id < b.id; });
  if (!report.examples.empty()) {
    double n = static_cast<double>(report.examples.size());
    for (const auto& r : report.examples) {
      report.gq += r.gq;
      report.ga += r.ga;
      report.precision += r.precision;
      report.recall += r.recall;
      report.f1 += r.f1;
      report.hit1 += r.hit1;
    }
    report.gq /= n;
    report.ga /= n;
    report.precision /= n;
    report.recall /= n;
    report.f1 /= n;
    report.hit1 /= n;
  }
  return report;
}

std::string EvalReport::ToJson(bool timing, int indent) const {
  Json j;
  j["examples"] = examples.size();
  j["gq_accuracy"] = gq;
  j["ga_accuracy"] = ga;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["hit1"] = hit1;
  j["scored"] = totals.scored();
  j["eta"] = totals.eta;
  if (timing) {
    j["t_kg_ms"] = totals.kg_ms;
    j["t_inf_ms"] = totals.inference_ms;
  }
  Json per = Json::array();
  for (const auto& r : examples) {
    Json e;
    e["id"] = r.id;
    e["gq"] = r.gq;
    e["ga"] = r.ga;
    e["precision"] = r.precision;
    e["recall"] = r.recall;
    e["f1"] = r.f1;
    e["hit1"] = r.hit1;
    if (!r.error.empty()) e["error"] = r.error;
    if (!r.predicted_sparql.empty()) e["predicted"] = r.predicted_sparql;
    if (timing) {
      e["t_kg_ms"] = r.stats.kg_ms;
      e["t_inf_ms"] = r.stats.inference_ms;
    }
    per.push_back(std::move(e));
  }
  j["per_example"] = per;
  return j.dump(indent);
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  out << "examples  Gq      Ga      P       R       F1      Hit@1\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-9zu %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f %-7.4f\n", examples.size(), gq,
                ga, precision, recall, f1, hit1);
  out << buf;
  std::size_t pseudo = 0;
  for (const auto& r : examples) {
    if (r.f1 == 1.0 && !r.gq) ++pseudo;
  }
  out << "right answers from a wrong graph: " << pseudo << "\n";
  return out.str();
}

std::string EvalReport::TraceJsonl(int beam) const {
  std::string out;
  for (const auto& r : examples) {
    Json j;
    j["id"] = r.id;
    j["beam"] = beam;
    j["max_vertices"] = r.stats.max_vertices;
    j["y_outline"] = r.stats.y_outline;
    j["y_vertex"] = r.stats.y_vertex;
    j["y_edge"] = r.stats.y_edge;
    j["scored"] = r.stats.scored();
    j["scored_bound"] = r.stats.ScoringBound(beam);
    j["eta"] = r.stats.eta;
    j["eta_bound"] = r.stats.EtaBound(beam);
    j["probes_executed"] = r.stats.probes_executed;
    out += j.dump() + "\n";
  }
  return out;
}

DatasetStats ComputeDatasetStats(const std::vector<Example>& examples) {
  DatasetStats s;
  s.examples = examples.size();
  for (const Example& ex : examples) {
    try {
      QueryGraph g = sparql::ConvertProgram(ex.sparql);
      ++s.convertible;
      ++s.edge_histogram[g.num_edges()];
      s.max_vertices = std::max(s.max_vertices, g.num_vertices());
    } catch (const Error&) {
    }
  }
  return s;
}

TraceStats ComputeTraceStats(std::string_view trace) {
  TraceStats s;
  std::istringstream in{std::string(trace)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = Json::parse(line);
      ++s.runs;
      s.scored += j.at("scored").get<std::uint64_t>();
      s.eta += j.at("eta").get<std::uint64_t>();
      s.scored_bound += j.at("scored_bound").get<double>();
      s.eta_bound += j.at("eta_bound").get<double>();
      if (j.at("eta").get<double>() > j.at("eta_bound").get<double>()) ++s.eta_violations;
      if (j.at("scored").get<double>() > j.at("scored_bound").get<double>()) ++s.scoring_violations;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("trace line: ") + e.what(), number);
    }
  }
  return s;
}

}  // namespace qgforge
