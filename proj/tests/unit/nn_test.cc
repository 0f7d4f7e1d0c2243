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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "candidates/candidates.h"
#include "nn/model.h"
#include "nn/tape.h"
#include "nn/train.h"
#include "sparql/bridge.h"
#include "supervision/supervision.h"
#include "unit/fixtures.h"

namespace qgforge {
namespace testing {
namespace {

using nn::Model;
using nn::Param;
using nn::Session;
using nn::Tape;

void ZeroGrad(Model& m) {
  for (Param& p : m.params()) std::fill(p.g.begin(), p.g.end(), 0.0);
}

// Relative error with an absolute floor below which finite differences are
// dominated by rounding.
bool GradientsAgree(double analytic, double numeric, double rel, double floor) {
  return std::fabs(analytic - numeric) <= rel * std::max(std::fabs(analytic), std::fabs(numeric)) + floor;
}

}  // namespace

TEST_CASE("tape gradients match central differences for every operator") {
  Param w("w", 3, 4), v("v", 2, 3), u("u", 4, 3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 0.5);
  for (Param* p : {&w, &v, &u}) {
    for (double& x : p->w) x = normal(rng);
  }
  // A scalar touching every tape operator.
  auto forward = [&](Tape& t) {
    Tape::Id a = t.Row(&u, 1);
    Tape::Id b = t.Row(&u, 2);
    Tape::Id x = t.Concat({t.Row(&v, 0), t.Const({0.3})});
    Tape::Id h = t.Tanh(t.Add(t.MatVec(&w, x), b));
    Tape::Id m = t.Max({h, a, t.Neg(b)});
    Tape::Id mean = t.Mean({h, m});
    Tape::Id s1 = t.Dot(mean, a);
    Tape::Id s2 = t.Dot(t.Exp(h), b);
    Tape::Id lp = t.LogSoftmax(t.Stack({s1, s2, t.Dot(h, h)}));
    Tape::Id ws = t.WeightedSum(t.Exp(lp), {h, m, a});
    return t.Sum({t.Pick(lp, 1), t.Dot(ws, t.Row(&u, 0)), t.Neg(s2)});
  };
  Tape tape;
  tape.Backward(forward(tape));
  int checked = 0;
  for (Param* p : {&w, &v, &u}) {
    for (std::size_t i = 0; i < p->w.size(); ++i) {
      double saved = p->w[i];
      p->w[i] = saved + 1e-6;
      Tape up;
      double fu = up.scalar(forward(up));
      p->w[i] = saved - 1e-6;
      Tape down;
      double fd = down.scalar(forward(down));
      p->w[i] = saved;
      double numeric = (fu - fd) / 2e-6;
      CHECK_MESSAGE(GradientsAgree(p->g[i], numeric, 1e-5, 1e-9), p->name, "[", i, "] ", p->g[i], " vs ", numeric);
      ++checked;
    }
  }
  CHECK(checked == 12 + 6 + 12);
}

TEST_CASE("model loss gradients match central differences") {
  std::vector<nn::TrainExample> examples = MakeExamples(3, 5);
  Model model = MakeModel(examples, 8, 2);
  std::vector<const nn::TrainExample*> batch;
  for (const auto& ex : examples) batch.push_back(&ex);
  ZeroGrad(model);
  nn::LossAndGradients(model, batch);
  std::mt19937_64 rng(9);
  int blocks = 0;
  for (Param& p : model.params()) {
    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < p.g.size(); ++i) {
      if (p.g[i] != 0.0) touched.push_back(i);
    }
    if (touched.empty()) continue;
    ++blocks;
    std::shuffle(touched.begin(), touched.end(), rng);
    touched.resize(std::min<std::size_t>(touched.size(), 4));
    for (std::size_t i : touched) {
      double saved = p.w[i];
      p.w[i] = saved + 1e-5;
      double up = nn::BatchLoss(model, batch);
      p.w[i] = saved - 1e-5;
      double down = nn::BatchLoss(model, batch);
      p.w[i] = saved;
      double numeric = (up - down) / 2e-5;
      CHECK_MESSAGE(GradientsAgree(p.g[i], numeric, 1e-4, 1e-8), p.name, "[", i, "] ", p.g[i], " vs ", numeric);
    }
  }
  CHECK(blocks >= 20);
}

TEST_CASE("question encoding") {
  Model model({"<unk>", "film", "who", "directed"}, {8, 4});
  Session s(model);
  nn::EncodedQuestion one = model.EncodeQuestion(s, "film");
  REQUIRE(one.tokens.size() == 1);
  CHECK(s.tape.value(one.pooled) == s.tape.value(one.tokens[0]));

  nn::EncodedQuestion a = model.EncodeQuestion(s, "who directed film");
  nn::EncodedQuestion b = model.EncodeQuestion(s, "film who directed");
  CHECK(a.tokens.size() == 3);
  const std::vector<double> pa = s.tape.value(a.pooled);
  const std::vector<double> pb = s.tape.value(b.pooled);
  for (int k = 0; k < model.dim(); ++k) CHECK(pa[k] == doctest::Approx(pb[k]).epsilon(1e-12));

  Model twin({"<unk>", "film", "who", "directed"}, {8, 4});
  Session t(twin);
  CHECK(t.tape.value(twin.EncodeQuestion(t, "who directed film").pooled) == pa);

  CHECK(ThrownCode([&] { model.EncodeQuestion(s, "?! ..."); }) == ErrorCode::kEmptyInput);
  CHECK(ThrownCode([&] { model.EncodeInstance(s, ""); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("instance encodings max-pool token encodings per coordinate") {
  Model model({"<unk>", "film", "directed", "by"}, {8, 6});
  Session s(model);
  const std::vector<double> whole = s.tape.value(model.EncodeInstance(s, "ns:film.directed_by"));
  std::vector<std::vector<double>> parts;
  for (const char* tok : {"ns", "film", "directed", "by"}) parts.push_back(s.tape.value(model.EncodeInstance(s, tok)));
  for (int k = 0; k < model.dim(); ++k) {
    double m = parts[0][k];
    for (const auto& p : parts) m = std::max(m, p[k]);
    CHECK(whole[k] == m);
  }
}

TEST_CASE("graph encoding") {
  Model model({"<unk>"}, {8, 3});
  Session s(model);
  Graph empty;
  CHECK(s.tape.value(model.EncodeGraph(s, empty).graph) == std::vector<double>(8, 0.0));

  QueryGraph g = sparql::ConvertProgram(kRunningExample);
  // Reverse the vertex ids.
  Graph r = g;
  int n = g.num_vertices();
  for (Vertex& v : r.vertices) v.id = n - 1 - v.id;
  std::reverse(r.vertices.begin(), r.vertices.end());
  for (Edge& e : r.edges) {
    e.head = n - 1 - e.head;
    e.tail = n - 1 - e.tail;
  }
  const std::vector<double> hg = s.tape.value(model.EncodeGraph(s, g).graph);
  const std::vector<double> hr = s.tape.value(model.EncodeGraph(s, r).graph);
  for (int k = 0; k < 8; ++k) CHECK(hg[k] == doctest::Approx(hr[k]).epsilon(1e-12));

  // Markers change the encoding.
  const std::vector<double> marked = s.tape.value(model.EncodeGraph(s, g, 1, 0).graph);
  CHECK(marked != hg);
}

TEST_CASE("attention weights form a distribution") {
  Model model({"<unk>", "a", "b", "c"}, {8, 8});
  Session s(model);
  nn::EncodedQuestion q = model.EncodeQuestion(s, "a a a");
  Tape::Id key = model.EncodeInstance(s, "b");
  // Identical tokens: any convex combination returns the token itself.
  const std::vector<double> same = s.tape.value(model.Attend(s, key, q, false));
  const std::vector<double> token = s.tape.value(q.tokens[0]);
  for (int k = 0; k < 8; ++k) CHECK(same[k] == doctest::Approx(token[k]).epsilon(1e-12));

  // Recompute the weights of a mixed question and check they sum to one.
  nn::EncodedQuestion mixed = model.EncodeQuestion(s, "a b c");
  for (bool fill : {false, true}) {
    Param* w = model.param(fill ? "fattn.W" : "attn.W");
    std::vector<Tape::Id> scores;
    for (Tape::Id qi : mixed.tokens) scores.push_back(s.tape.Dot(key, s.tape.MatVec(w, qi)));
    const std::vector<double> weights = s.tape.value(s.tape.Exp(s.tape.LogSoftmax(s.tape.Stack(scores))));
    double total = 0.0;
    for (double x : weights) {
      CHECK(x > 0.0);
      total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> out = s.tape.value(model.Attend(s, key, mixed, fill));
    for (int k = 0; k < 8; ++k) {
      double expect = 0.0;
      for (std::size_t i = 0; i < mixed.tokens.size(); ++i) expect += weights[i] * s.tape.value(mixed.tokens[i])[k];
      CHECK(out[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("losses are finite and need gold instances in the pool") {
  std::vector<nn::TrainExample> examples = MakeExamples(4, 13);
  Model model = MakeModel(examples, 8, 1);
  for (const auto& ex : examples) {
    Session s(model);
    double loss = s.tape.scalar(model.Loss(s, ex.question, ex.signals, ex.pool));
    CHECK(std::isfinite(loss));
    CHECK(loss >= 0.0);
  }
  nn::TrainExample broken = examples[0];
  broken.pool.rel.clear();
  Session s(model);
  CHECK(ThrownCode([&] { model.Loss(s, broken.question, broken.signals, broken.pool); }) == ErrorCode::kEmptyPool);
}

TEST_CASE("fill candidates are empty for unfilled slots and checked otherwise") {
  std::vector<nn::TrainExample> examples = MakeExamples(1, 21);
  GenerationState st = GenerationState::ForFilling(Abstract(Replay(examples[0].signals)));
  CHECK(nn::LegalFillCandidates(st, examples[0].pool).empty());
}

TEST_CASE("training") {
  std::vector<nn::TrainExample> examples = MakeExamples(5, 17);
  Model model = MakeModel(examples, 16, 3);
  nn::TrainConfig config;
  config.epochs = 30;
  config.batch_size = 2;
  std::vector<double> losses = nn::Train(model, examples, config);
  REQUIRE(losses.size() == 30);
  CHECK(losses.back() < 0.5 * losses.front());

  Model frozen = MakeModel(examples, 16, 3);
  std::vector<Param> before = frozen.params();
  config.lr = 0.0;
  config.epochs = 3;
  nn::Train(frozen, examples, config);
  for (std::size_t i = 0; i < before.size(); ++i) CHECK(frozen.params()[i].w == before[i].w);

  int stopped_at = 0;
  config.lr = 1e-2;
  config.epochs = 10;
  std::vector<double> early = nn::Train(frozen, examples, config, [&](int epoch, double) {
    stopped_at = epoch;
    return epoch == 4;
  });
  CHECK(early.size() == 4);
  CHECK(stopped_at == 4);
  CHECK(ThrownCode([&] { nn::Train(frozen, {}, config); }) == ErrorCode::kData);
}

TEST_CASE("checkpoints are byte-stable") {
  std::vector<nn::TrainExample> examples = MakeExamples(2, 31);
  Model model = MakeModel(examples, 8, 7);
  std::string bytes = model.Serialize();
  CHECK(bytes.rfind(Model::kMagic, 0) == 0);
  Model back = Model::Deserialize(bytes);
  CHECK(back.Serialize() == bytes);
  CHECK(back.vocab() == model.vocab());
  CHECK(back.dim() == model.dim());
  for (std::size_t i = 0; i < model.params().size(); ++i) {
    const Param& a = model.params()[i];
    const Param& b = back.params()[i];
    CHECK(a.name == b.name);
    for (std::size_t k = 0; k < a.w.size(); ++k) CHECK(b.w[k] == static_cast<double>(static_cast<float>(a.w[k])));
  }
  Session s1(back);
  Model again = Model::Deserialize(bytes);
  Session s3(again);
  CHECK(s1.tape.scalar(back.Loss(s1, examples[0].question, examples[0].signals, examples[0].pool)) ==
        s3.tape.scalar(again.Loss(s3, examples[0].question, examples[0].signals, examples[0].pool)));

  std::filesystem::path path = std::filesystem::temp_directory_path() / "qgforge_nn_test.ckpt";
  model.Save(path.string());
  CHECK(Model::Load(path.string()).Serialize() == bytes);
  std::filesystem::remove(path);

  CHECK(ThrownCode([&] { Model::Deserialize("not a checkpoint"); }) == ErrorCode::kCheckpoint);
  CHECK(ThrownCode([&] { Model::Deserialize(bytes.substr(0, bytes.size() - 5)); }) == ErrorCode::kCheckpoint);
  CHECK(ThrownCode([&] { Model::Load(path.string()); }) == ErrorCode::kIo);
}

}  // namespace testing
}  // namespace qgforge
